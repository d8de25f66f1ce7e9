use serde::{Deserialize, Serialize};

use crate::graph::VertexSet;

/// Informed set plus the simulation clock.
#[derive(Debug, Clone, PartialEq)]
pub struct RumorState {
    informed: VertexSet,
    time: f64,
}

impl RumorState {
    pub fn new(informed: VertexSet) -> Self {
        RumorState { informed, time: 0.0 }
    }

    pub fn informed(&self) -> &VertexSet {
        &self.informed
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn informed_count(&self) -> usize {
        self.informed.len()
    }

    pub fn all_informed(&self) -> bool {
        self.informed.is_full()
    }

    /// Returns true when `v` was not informed before.
    pub fn inform(&mut self, v: usize) -> bool {
        self.informed.insert(v)
    }

    pub fn advance_to(&mut self, time: f64) {
        debug_assert!(time >= self.time, "clock moved backwards: {} -> {}", self.time, time);
        self.time = time;
    }
}

/// One clock tick: `caller` ticked at `time` and contacted `callee`
/// (`None` when it had no neighbor in the current snapshot).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub time: f64,
    pub caller: usize,
    pub callee: Option<usize>,
    pub transferred: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpreadTrace {
    /// Only filled when the run was configured to record.
    pub events: Vec<ContactEvent>,
    /// Number of processed ticks (recorded or not).
    pub num_events: u64,
    pub completion_time: Option<f64>,
    /// `(time, informed count)` after every informativity change, starting
    /// with the initial state at time 0.
    pub growth: Vec<(f64, usize)>,
}

impl SpreadTrace {
    pub fn completed(&self) -> bool {
        self.completion_time.is_some()
    }

    /// First time the informed count reached `count`.
    pub fn time_to_reach(&self, count: usize) -> Option<f64> {
        self.growth.iter().find(|&&(_, c)| c >= count).map(|&(t, _)| t)
    }

    pub fn final_informed(&self) -> usize {
        self.growth.last().map_or(0, |&(_, c)| c)
    }

    /// JSON lines `{time, caller, callee, transferred}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }
}
