//! Dynamic networks as step oracles.
//!
//! A schedule hands out the snapshot `G^(t)` for integer step `t`. Adaptive
//! families look at the informed set handed to them; the simulator queries
//! steps in increasing order, once each, passing the informed set as of the
//! integer time `t`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub trait DynamicSchedule: Send {
    /// Number of vertices shared by every snapshot.
    fn n(&self) -> usize;

    /// Snapshot for step `step`, given the informed set at that integer time.
    fn graph_at(&mut self, step: u64, informed: &VertexSet) -> Result<Arc<Graph>>;

    fn describe(&self) -> String;
}

impl<S: DynamicSchedule + ?Sized> DynamicSchedule for Box<S> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn graph_at(&mut self, step: u64, informed: &VertexSet) -> Result<Arc<Graph>> {
        (**self).graph_at(step, informed)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// The same graph at every step.
#[derive(Debug, Clone)]
pub struct StaticSchedule {
    graph: Arc<Graph>,
}

pub fn static_schedule(g: Graph) -> StaticSchedule {
    StaticSchedule { graph: Arc::new(g) }
}

impl StaticSchedule {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }
}

impl DynamicSchedule for StaticSchedule {
    fn n(&self) -> usize {
        self.graph.n()
    }

    fn graph_at(&mut self, _step: u64, _informed: &VertexSet) -> Result<Arc<Graph>> {
        Ok(Arc::clone(&self.graph))
    }

    fn describe(&self) -> String {
        format!("static(n={}, m={})", self.graph.n(), self.graph.num_edges())
    }
}

/// A fixed list of snapshots; the last one repeats forever.
#[derive(Debug, Clone)]
pub struct SequenceSchedule {
    graphs: Vec<Arc<Graph>>,
}

impl SequenceSchedule {
    pub fn new(graphs: Vec<Graph>) -> Result<Self> {
        let first = graphs.first().ok_or_else(|| Error::Config("empty graph sequence".into()))?;
        let n = first.n();
        if let Some((i, g)) = graphs.iter().enumerate().find(|(_, g)| g.n() != n) {
            return Err(Error::Config(format!("snapshot {i} has {} vertices, expected {n}", g.n())));
        }
        Ok(SequenceSchedule { graphs: graphs.into_iter().map(Arc::new).collect() })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

impl DynamicSchedule for SequenceSchedule {
    fn n(&self) -> usize {
        self.graphs[0].n()
    }

    fn graph_at(&mut self, step: u64, _informed: &VertexSet) -> Result<Arc<Graph>> {
        let i = (step as usize).min(self.graphs.len() - 1);
        Ok(Arc::clone(&self.graphs[i]))
    }

    fn describe(&self) -> String {
        format!("sequence(n={}, len={})", self.n(), self.graphs.len())
    }
}

/// Wraps a schedule and keeps every snapshot it hands out, indexed by step.
pub struct Recording<'a> {
    inner: &'a mut dyn DynamicSchedule,
    steps: Vec<Arc<Graph>>,
}

impl<'a> Recording<'a> {
    pub fn new(inner: &'a mut dyn DynamicSchedule) -> Self {
        Recording { inner, steps: Vec::new() }
    }

    pub fn into_steps(self) -> Vec<Arc<Graph>> {
        self.steps
    }
}

impl DynamicSchedule for Recording<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn graph_at(&mut self, step: u64, informed: &VertexSet) -> Result<Arc<Graph>> {
        let g = self.inner.graph_at(step, informed)?;
        if step as usize == self.steps.len() {
            self.steps.push(Arc::clone(&g));
        }
        Ok(g)
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }
}

/// Materializes the first `len` snapshots of a schedule for a fixed informed
/// set (non-adaptive schedules ignore it).
pub fn prefix(schedule: &mut dyn DynamicSchedule, informed: &VertexSet, len: usize) -> Result<Vec<Arc<Graph>>> {
    (0..len as u64).map(|t| schedule.graph_at(t, informed)).collect()
}
