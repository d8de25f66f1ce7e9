use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hgraph::{h_graph, HGraph};
use super::regular::{near_regular_graph, random_regular_connected, shuffled};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::mix;
use crate::schedule::{static_schedule, DynamicSchedule};

/// `Δ = ⌈1/ρ⌉`, with a little slack so `1/0.25` stays 4.
pub fn delta_for(rho: f64) -> usize {
    ((1.0 / rho) - 1e-9).ceil().max(1.0) as usize
}

/// The even choice among `⌈1/ρ⌉` and `⌈1/ρ⌉ + 1`.
pub fn even_delta_for(rho: f64) -> usize {
    let d = delta_for(rho);
    if d.is_multiple_of(2) {
        d
    } else {
        d + 1
    }
}

/// `k = ⌈ln n / ln ln n⌉`, at least 1.
pub fn default_string_length(n: usize) -> usize {
    let ln = (n as f64).ln();
    if ln <= 1.0 {
        return 1;
    }
    ((ln / ln.ln()).ceil() as usize).max(1)
}

/// Keeps one snapshot per queried step; asks `advance` only for new steps.
struct StepLog {
    history: Vec<Arc<Graph>>,
}

impl StepLog {
    fn get_or_advance(
        &mut self,
        step: u64,
        mut advance: impl FnMut(u64, &Arc<Graph>) -> Result<Arc<Graph>>,
    ) -> Result<Arc<Graph>> {
        while (self.history.len() as u64) <= step {
            let t = self.history.len() as u64;
            let next = advance(t, self.history.last().expect("step 0 is built eagerly"))?;
            self.history.push(next);
        }
        Ok(Arc::clone(&self.history[step as usize]))
    }
}

/// Adaptive network `𝒢(n, ρ)`: `H_{k,Δ}(A_t, B_t)` rebuilt whenever the
/// uninformed side `B` shrinks while still holding at least `⌊n/4⌋` vertices.
pub struct GnRhoSchedule {
    n: usize,
    k: usize,
    delta: usize,
    seed: u64,
    b: VertexSet,
    current: HGraph,
    rebuilds: usize,
    log: StepLog,
}

impl GnRhoSchedule {
    pub fn new(n: usize, rho: f64, k: usize, seed: u64) -> Result<Self> {
        if !(rho >= 1.0 / (n as f64).sqrt() - 1e-12 && rho <= 1.0) {
            return Err(Error::pre(format!("𝒢(n,ρ) needs 1/sqrt(n) <= ρ <= 1, got ρ = {rho}, n = {n}")));
        }
        let delta = delta_for(rho);
        let a0 = VertexSet::from_vertices(n, 0..n / 4);
        // Every later rebuild has |B| >= floor(n/4); make sure that size is buildable.
        let min_b = n / 4;
        let min_side = 5usize.max(delta);
        if min_b < k * delta + min_side {
            return Err(Error::Infeasible(format!(
                "floor(n/4) = {min_b} leaves no room for k·Δ + {min_side} = {} vertices on the B side",
                k * delta + min_side
            )));
        }
        let current = h_graph(n, k, delta, &a0, mix(seed, 0x6e72, 0))?;
        let g0 = Arc::new(current.graph.clone());
        Ok(GnRhoSchedule {
            n,
            k,
            delta,
            seed,
            b: a0.complement(),
            current,
            rebuilds: 0,
            log: StepLog { history: vec![g0] },
        })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b_side(&self) -> &VertexSet {
        &self.b
    }

    pub fn current(&self) -> &HGraph {
        &self.current
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }
}

impl DynamicSchedule for GnRhoSchedule {
    fn n(&self) -> usize {
        self.n
    }

    fn graph_at(&mut self, step: u64, informed: &VertexSet) -> Result<Arc<Graph>> {
        let GnRhoSchedule { n, k, delta, seed, b, current, rebuilds, log } = self;
        log.get_or_advance(step, |t, prev| {
            let mut next_b = b.clone();
            for v in informed.iter() {
                next_b.remove(v);
            }
            let shrank = next_b.len() < b.len();
            let rebuild = shrank && next_b.len() >= *n / 4;
            *b = next_b;
            if !rebuild {
                return Ok(Arc::clone(prev));
            }
            *current = h_graph(*n, *k, *delta, &b.complement(), mix(*seed, 0x6e72, t))?;
            *rebuilds += 1;
            Ok(Arc::new(current.graph.clone()))
        })
    }

    fn describe(&self) -> String {
        format!("g-n-rho(n={}, k={}, delta={})", self.n, self.k, self.delta)
    }
}

/// One snapshot of `𝒢̄(n, ρ)`.
#[derive(Debug, Clone)]
pub struct GbarSnapshot {
    pub graph: Graph,
    /// Degree-Δ vertex of the `A` side.
    pub hub: usize,
    /// `B`-side endpoint of the bridge.
    pub boundary: usize,
}

/// `G(A, 4, Δ)` and `G(B, Δ)` joined by one bridge from the `A`-side hub to
/// the lowest-id vertex of `B`.
pub fn gbar_snapshot(n: usize, delta: usize, a_side: &VertexSet, seed: u64) -> Result<GbarSnapshot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = shuffled(a_side.iter(), &mut rng);
    let b: Vec<usize> = a_side.complement().iter().collect();
    let near = near_regular_graph(a.len(), 4, delta, mix(seed, 1, 0))?;
    let reg = random_regular_connected(b.len(), delta, mix(seed, 2, 0))?;
    let hub = a[near.hub];
    let boundary = b[0];
    let edges = near
        .graph
        .edges()
        .map(|(u, v)| (a[u], a[v]))
        .chain(reg.edges().map(|(u, v)| (b[u], b[v])))
        .chain(std::iter::once((hub, boundary)));
    Ok(GbarSnapshot { graph: Graph::from_edge_iter(n, edges)?, hub, boundary })
}

/// Adaptive network `𝒢̄(n, ρ)`, rebuilt while `⌊n/6⌋ <= |B_{t+1}| < |B_t|`.
pub struct GbarSchedule {
    n: usize,
    delta: usize,
    seed: u64,
    b: VertexSet,
    current: GbarSnapshot,
    rebuilds: usize,
    log: StepLog,
}

impl GbarSchedule {
    pub fn new(n: usize, rho: f64, seed: u64) -> Result<Self> {
        if !(rho >= 10.0 / n as f64 - 1e-12 && rho <= 1.0) {
            return Err(Error::pre(format!("𝒢̄(n,ρ) needs 10/n <= ρ <= 1, got ρ = {rho}, n = {n}")));
        }
        let delta = even_delta_for(rho);
        if n / 6 < delta + 1 {
            return Err(Error::Infeasible(format!(
                "the smallest B side floor(n/6) = {} cannot hold a {delta}-regular graph",
                n / 6
            )));
        }
        let a0 = VertexSet::from_vertices(n, 0..n / 2);
        let current = gbar_snapshot(n, delta, &a0, mix(seed, 0x6762, 0))?;
        let g0 = Arc::new(current.graph.clone());
        Ok(GbarSchedule { n, delta, seed, b: a0.complement(), current, rebuilds: 0, log: StepLog { history: vec![g0] } })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn b_side(&self) -> &VertexSet {
        &self.b
    }

    pub fn current(&self) -> &GbarSnapshot {
        &self.current
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }
}

impl DynamicSchedule for GbarSchedule {
    fn n(&self) -> usize {
        self.n
    }

    fn graph_at(&mut self, step: u64, informed: &VertexSet) -> Result<Arc<Graph>> {
        let GbarSchedule { n, delta, seed, b, current, rebuilds, log } = self;
        log.get_or_advance(step, |t, prev| {
            let mut next_b = b.clone();
            for v in informed.iter() {
                next_b.remove(v);
            }
            let rebuild = next_b.len() < b.len() && next_b.len() >= *n / 6;
            *b = next_b;
            if !rebuild {
                return Ok(Arc::clone(prev));
            }
            *current = gbar_snapshot(*n, *delta, &b.complement(), mix(*seed, 0x6762, t))?;
            *rebuilds += 1;
            Ok(Arc::new(current.graph.clone()))
        })
    }

    fn describe(&self) -> String {
        format!("gbar-n-rho(n={}, delta={})", self.n, self.delta)
    }
}

/// Star on `n + 1` vertices whose center is always the lowest-id uninformed
/// vertex (vertex 0 once everyone is informed).
pub struct DynamicStar {
    leaves: usize,
    last: Option<(usize, Arc<Graph>)>,
}

impl DynamicStar {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::pre("dynamic star needs n >= 2"));
        }
        Ok(DynamicStar { leaves: n, last: None })
    }

    pub fn center_for(&self, informed: &VertexSet) -> usize {
        (0..=self.leaves).find(|&v| !informed.contains(v)).unwrap_or(0)
    }
}

impl DynamicSchedule for DynamicStar {
    fn n(&self) -> usize {
        self.leaves + 1
    }

    fn graph_at(&mut self, _step: u64, informed: &VertexSet) -> Result<Arc<Graph>> {
        let center = self.center_for(informed);
        if let Some((c, g)) = &self.last {
            if *c == center {
                return Ok(Arc::clone(g));
            }
        }
        let g = Arc::new(Graph::star(self.leaves + 1, center)?);
        self.last = Some((center, Arc::clone(&g)));
        Ok(g)
    }

    fn describe(&self) -> String {
        format!("dynamic-star(n={})", self.leaves)
    }
}

/// `𝒢₁` on `n + 1` vertices. Step 0: clique on `0..n` plus the pendant edge
/// `{0, n}`. Steps ≥ 1: cliques on `0..=n/2` and `n/2+1..=n` joined by the
/// bridge `{0, n}`.
pub struct TwoClique {
    first: Arc<Graph>,
    rest: Arc<Graph>,
}

impl TwoClique {
    pub fn new(n: usize) -> Result<Self> {
        if n % 2 == 1 || n < 4 {
            return Err(Error::pre(format!("two-clique network needs even n >= 4, got {n}")));
        }
        let clique = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        let first = Graph::from_edge_iter(n + 1, clique.chain([(0, n)]))?;
        let half = n / 2;
        let left = (0..=half).flat_map(|u| (u + 1..=half).map(move |v| (u, v)));
        let right = (half + 1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        let rest = Graph::from_edge_iter(n + 1, left.chain(right).chain([(0, n)]))?;
        Ok(TwoClique { first: Arc::new(first), rest: Arc::new(rest) })
    }

    /// The rumor starts at the pendant vertex.
    pub fn source(&self) -> usize {
        self.first.n() - 1
    }
}

impl DynamicSchedule for TwoClique {
    fn n(&self) -> usize {
        self.first.n()
    }

    fn graph_at(&mut self, step: u64, _informed: &VertexSet) -> Result<Arc<Graph>> {
        Ok(Arc::clone(if step == 0 { &self.first } else { &self.rest }))
    }

    fn describe(&self) -> String {
        format!("two-clique(n={})", self.first.n() - 1)
    }
}

/// Named network families, as used in manifests and experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Static star on `n` vertices, center 0.
    StaticStar { n: usize },
    StaticClique { n: usize },
    /// Static random connected `degree`-regular graph.
    StaticExpander {
        n: usize,
        #[serde(default = "default_expander_degree")]
        degree: usize,
    },
    /// `𝒢₂`: `n + 1` vertices.
    DynamicStar { n: usize },
    /// `𝒢₁`: `n + 1` vertices.
    TwoClique { n: usize },
    GNRho {
        n: usize,
        rho: f64,
        #[serde(default)]
        k: Option<usize>,
    },
    GbarNRho { n: usize, rho: f64 },
}

fn default_expander_degree() -> usize {
    4
}

impl Family {
    pub fn code(&self) -> &'static str {
        match self {
            Family::StaticStar { .. } => "static-star",
            Family::StaticClique { .. } => "static-clique",
            Family::StaticExpander { .. } => "static-expander",
            Family::DynamicStar { .. } => "dynamic-star",
            Family::TwoClique { .. } => "two-clique",
            Family::GNRho { .. } => "g-n-rho",
            Family::GbarNRho { .. } => "gbar-n-rho",
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, Family::DynamicStar { .. } | Family::GNRho { .. } | Family::GbarNRho { .. })
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            Family::StaticStar { n }
            | Family::StaticClique { n }
            | Family::StaticExpander { n, .. }
            | Family::GNRho { n, .. }
            | Family::GbarNRho { n, .. } => n,
            Family::DynamicStar { n } | Family::TwoClique { n } => n + 1,
        }
    }

    /// Where the rumor starts by convention.
    pub fn default_source(&self) -> usize {
        match *self {
            Family::StaticStar { .. } | Family::DynamicStar { .. } => 1,
            Family::TwoClique { n } => n,
            _ => 0,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn DynamicSchedule>> {
        Ok(match *self {
            Family::StaticStar { n } => Box::new(static_schedule(Graph::star(n, 0)?)),
            Family::StaticClique { n } => Box::new(static_schedule(Graph::complete(n)?)),
            Family::StaticExpander { n, degree } => Box::new(static_schedule(random_regular_connected(n, degree, seed)?)),
            Family::DynamicStar { n } => Box::new(DynamicStar::new(n)?),
            Family::TwoClique { n } => Box::new(TwoClique::new(n)?),
            Family::GNRho { n, rho, k } => {
                Box::new(GnRhoSchedule::new(n, rho, k.unwrap_or_else(|| default_string_length(n)), seed)?)
            }
            Family::GbarNRho { n, rho } => Box::new(GbarSchedule::new(n, rho, seed)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{absolute_diligence, ratio};

    #[test]
    fn deltas() {
        assert_eq!(delta_for(1.0), 1);
        assert_eq!(delta_for(0.5), 2);
        assert_eq!(delta_for(0.25), 4);
        assert_eq!(delta_for(0.3), 4);
        assert_eq!(even_delta_for(1.0), 2);
        assert_eq!(even_delta_for(0.5), 2);
        assert_eq!(even_delta_for(0.3), 4);
        assert_eq!(default_string_length(64), 3);
        assert_eq!(default_string_length(256), 4);
    }

    #[test]
    fn g_n_rho_holds_when_b_untouched() {
        let n = 64;
        let mut s = GnRhoSchedule::new(n, 0.5, 2, 3).unwrap();
        let informed = VertexSet::from_vertices(n, [0, 1, 2]);
        let g0 = s.graph_at(0, &informed).unwrap();
        let g1 = s.graph_at(1, &informed).unwrap();
        assert!(Arc::ptr_eq(&g0, &g1));
        assert_eq!(s.rebuilds(), 0);
    }

    #[test]
    fn g_n_rho_shrinks_then_freezes() {
        let n = 64;
        let mut s = GnRhoSchedule::new(n, 0.5, 2, 3).unwrap();
        let mut informed = VertexSet::from_vertices(n, 0..16);
        let g0 = s.graph_at(0, &informed).unwrap();
        let b0 = s.b_side().len();
        let layer = s.current().layers.layers[1].clone();
        for &v in &layer {
            informed.insert(v);
        }
        let g1 = s.graph_at(1, &informed).unwrap();
        assert_eq!(s.b_side().len(), b0 - layer.len());
        assert!(!Arc::ptr_eq(&g0, &g1));
        assert!(s.current().layers.layers[1..].iter().flatten().all(|&v| !informed.contains(v)));

        // push B below floor(n/4) in one go: the snapshot must freeze
        let b: Vec<usize> = s.b_side().iter().collect();
        for &v in &b[..b.len() - n / 4 + 1] {
            informed.insert(v);
        }
        let g2 = s.graph_at(2, &informed).unwrap();
        assert!(Arc::ptr_eq(&g1, &g2));
        for v in 0..n {
            informed.insert(v);
        }
        let g3 = s.graph_at(3, &informed).unwrap();
        assert!(Arc::ptr_eq(&g2, &g3));
    }

    #[test]
    fn g_n_rho_range() {
        assert!(GnRhoSchedule::new(64, 0.1, 2, 0).is_err());
        assert!(GnRhoSchedule::new(64, 1.5, 2, 0).is_err());
    }

    #[test]
    fn gbar_initial_split_and_bridge() {
        let n = 61;
        let mut s = GbarSchedule::new(n, 0.25, 5).unwrap();
        assert_eq!(s.delta(), 4);
        assert_eq!(s.b_side().len(), 31);
        let g = s.graph_at(0, &VertexSet::from_vertices(n, [0])).unwrap();
        assert!(g.is_connected());
        let snap = s.current();
        assert_eq!(g.degree(snap.hub), 5);
        assert_eq!(g.degree(snap.boundary), 5);
        assert_eq!(absolute_diligence(&g).value, ratio(1, 5));
    }

    #[test]
    fn gbar_range() {
        assert!(GbarSchedule::new(40, 0.2, 0).is_err());
        assert!(GbarSchedule::new(40, 0.25, 0).is_ok());
    }

    #[test]
    fn dynamic_star_center_rule() {
        let mut s = DynamicStar::new(5).unwrap();
        let g = s.graph_at(0, &VertexSet::from_vertices(6, [1])).unwrap();
        assert_eq!(g.degree(0), 5);
        let g = s.graph_at(1, &VertexSet::from_vertices(6, [0, 1])).unwrap();
        assert_eq!(g.degree(2), 5);
        let g = s.graph_at(2, &VertexSet::full(6)).unwrap();
        assert_eq!(g.degree(0), 5);
    }

    #[test]
    fn two_clique_shape() {
        let n = 8;
        let mut s = TwoClique::new(n).unwrap();
        let none = VertexSet::new(n + 1);
        let g0 = s.graph_at(0, &none).unwrap();
        assert_eq!(g0.degree(n), 1);
        assert_eq!(g0.degree(0), n);
        let g1 = s.graph_at(1, &none).unwrap();
        assert_eq!(g1.degree(0), n / 2 + 1);
        assert_eq!(g1.degree(n), n / 2);
        assert!(g1.has_edge(0, n));
        assert_eq!(*s.graph_at(5, &none).unwrap(), *g1);
        assert!(TwoClique::new(7).is_err());
    }
}
