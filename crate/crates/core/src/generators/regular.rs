use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const RETRY_BUDGET: usize = 2000;

/// Local adjacency used while a graph is under construction.
pub(crate) struct Builder {
    adj: Vec<Vec<usize>>,
}

impl Builder {
    pub(crate) fn new(m: usize) -> Self {
        Builder { adj: vec![Vec::new(); m] }
    }

    pub(crate) fn from_graph(g: &Graph) -> Self {
        Builder { adj: (0..g.n()).map(|u| g.neighbors(u).to_vec()).collect() }
    }

    pub(crate) fn has(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub(crate) fn add(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    pub(crate) fn remove(&mut self, u: usize, v: usize) {
        self.adj[u].retain(|&x| x != v);
        self.adj[v].retain(|&x| x != u);
    }

    pub(crate) fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub(crate) fn build(&self) -> Result<Graph> {
        Graph::from_edges(self.adj.len(), &self.edges())
    }
}

/// One pass of the pairing model that re-draws a rejected pair instead of
/// discarding the whole configuration. `None` when the remaining stubs
/// cannot be matched without a loop or a multi-edge.
fn pair_stubs(m: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Builder> {
    let mut free: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut b = Builder::new(m);
    while !free.is_empty() {
        let mut chosen = None;
        for _ in 0..64 {
            let i = rng.gen_range(0..free.len());
            let j = rng.gen_range(0..free.len());
            let (a, c) = (free[i], free[j]);
            if i != j && a != c && !b.has(a, c) {
                chosen = Some((i, j));
                break;
            }
        }
        let (i, j) = match chosen {
            Some(p) => p,
            None => {
                let mut valid = Vec::new();
                for i in 0..free.len() {
                    for j in i + 1..free.len() {
                        if free[i] != free[j] && !b.has(free[i], free[j]) {
                            valid.push((i, j));
                        }
                    }
                }
                *valid.choose(rng)?
            }
        };
        let (a, c) = (free[i], free[j]);
        b.add(a, c);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        free.swap_remove(hi);
        free.swap_remove(lo);
    }
    Some(b)
}

/// Simple connected `d`-regular graph on `m` vertices.
pub fn random_regular_connected(m: usize, d: usize, seed: u64) -> Result<Graph> {
    if m == 0 {
        return Err(Error::EmptyVertexSet);
    }
    if d >= m && !(m == 1 && d == 0) {
        return Err(Error::Infeasible(format!("degree {d} needs more than {m} vertices")));
    }
    if (m * d) % 2 == 1 {
        return Err(Error::Infeasible(format!("m*d = {m}*{d} is odd")));
    }
    if d == 0 && m > 1 {
        return Err(Error::Infeasible("a 0-regular graph on more than one vertex is disconnected".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..RETRY_BUDGET {
        let Some(b) = pair_stubs(m, d, &mut rng) else { continue };
        let g = b.build()?;
        if g.is_connected() {
            if attempt > 0 {
                debug!("random_regular_connected(m={m}, d={d}): accepted after {attempt} retries");
            }
            return Ok(g);
        }
    }
    Err(Error::RetryBudget { what: format!("connected {d}-regular graph on {m} vertices"), budget: RETRY_BUDGET })
}

/// Connected graph where vertex `hub` has degree `d2` and every other vertex
/// has degree `d1`.
#[derive(Debug, Clone)]
pub struct NearRegular {
    pub graph: Graph,
    pub hub: usize,
}

/// Starts from a connected `d1`-regular graph and moves the hub's degree to
/// `d2` two at a time. Raising: delete an edge `{a,b}` away from the hub and
/// add `{hub,a}`, `{hub,b}`. Lowering: delete `{hub,a}`, `{hub,b}` for
/// non-adjacent neighbors and add `{a,b}`. Other degrees never change.
pub fn near_regular_graph(m: usize, d1: usize, d2: usize, seed: u64) -> Result<NearRegular> {
    if d1 % 2 == 1 || d2 % 2 == 1 {
        return Err(Error::Infeasible(format!("degrees must be even, got d1={d1}, d2={d2}")));
    }
    if d1 == 0 || d2 == 0 {
        return Err(Error::Infeasible("degrees must be positive".into()));
    }
    if d2 >= m || d1 >= m {
        return Err(Error::Infeasible(format!("degrees d1={d1}, d2={d2} need more than {m} vertices")));
    }
    let hub = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for attempt in 0..RETRY_BUDGET {
        let base = random_regular_connected(m, d1, rng.gen())?;
        let mut b = Builder::from_graph(&base);
        if d2 > d1 {
            for _ in 0..(d2 - d1) / 2 {
                let eligible: Vec<(usize, usize)> = b
                    .edges()
                    .into_iter()
                    .filter(|&(x, y)| x != hub && y != hub && !b.has(hub, x) && !b.has(hub, y))
                    .collect();
                let Some(&(x, y)) = eligible.choose(&mut rng) else { continue 'attempt };
                b.remove(x, y);
                b.add(hub, x);
                b.add(hub, y);
            }
        } else {
            for _ in 0..(d1 - d2) / 2 {
                let nbrs = b.adj[hub].clone();
                let mut pairs = Vec::new();
                for (i, &x) in nbrs.iter().enumerate() {
                    for &y in &nbrs[i + 1..] {
                        if !b.has(x, y) {
                            pairs.push((x, y));
                        }
                    }
                }
                let Some(&(x, y)) = pairs.choose(&mut rng) else { continue 'attempt };
                b.remove(hub, x);
                b.remove(hub, y);
                b.add(x, y);
            }
        }
        let graph = b.build()?;
        if graph.is_connected() {
            if attempt > 0 {
                debug!("near_regular_graph(m={m}, d1={d1}, d2={d2}): accepted after {attempt} retries");
            }
            return Ok(NearRegular { graph, hub });
        }
    }
    Err(Error::RetryBudget { what: format!("near-regular graph m={m} d1={d1} d2={d2}"), budget: RETRY_BUDGET })
}

/// Vertex order used to embed a local graph into a larger vertex set.
pub(crate) fn shuffled(vertices: impl IntoIterator<Item = usize>, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v: Vec<usize> = vertices.into_iter().collect();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_regular_is_a_cycle() {
        for seed in 0..20 {
            let g = random_regular_connected(6, 2, seed).unwrap();
            assert!(g.degrees().iter().all(|&d| d == 2));
            assert!(g.is_connected());
            assert_eq!(g.num_edges(), 6);
        }
    }

    #[test]
    fn four_regular_on_eight() {
        let g = random_regular_connected(8, 4, 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(g.is_connected());
    }

    #[test]
    fn infeasible_regular() {
        assert!(matches!(random_regular_connected(5, 3, 0), Err(Error::Infeasible(_))));
        assert!(matches!(random_regular_connected(4, 4, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn complete_graph_is_the_only_option() {
        let g = random_regular_connected(5, 4, 9).unwrap();
        assert_eq!(g, Graph::complete(5).unwrap());
    }

    #[test]
    fn near_regular_degree_multiset() {
        let nr = near_regular_graph(8, 4, 6, 1).unwrap();
        let mut degs = nr.graph.degrees();
        assert_eq!(degs[nr.hub], 6);
        degs.sort_unstable();
        assert_eq!(degs, vec![4, 4, 4, 4, 4, 4, 4, 6]);
        assert!(nr.graph.is_connected());
    }

    #[test]
    fn near_regular_lowering() {
        let nr = near_regular_graph(10, 4, 2, 5).unwrap();
        let degs = nr.graph.degrees();
        assert_eq!(degs[nr.hub], 2);
        assert_eq!(degs.iter().filter(|&&d| d == 4).count(), 9);
        assert!(nr.graph.is_connected());
    }

    #[test]
    fn near_regular_equal_degrees_is_regular() {
        let nr = near_regular_graph(9, 4, 4, 2).unwrap();
        assert!(nr.graph.degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn near_regular_infeasible() {
        assert!(matches!(near_regular_graph(4, 2, 4, 0), Err(Error::Infeasible(_))));
        assert!(matches!(near_regular_graph(8, 3, 5, 0), Err(Error::Infeasible(_))));
    }
}
