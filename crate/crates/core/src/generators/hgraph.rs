use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::regular::{random_regular_connected, shuffled, RETRY_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::metrics::{self, ratio};

/// `Δ² <= DELTA_SQ_FACTOR · n` is how `Δ = O(√n)` is enforced.
pub const DELTA_SQ_FACTOR: usize = 2;
/// Expander sides this small get an exact conductance spot-check.
pub const EXPANDER_CHECK_CAP: usize = 20;
/// Minimum conductance accepted for a spot-checked expander side.
pub const EXPANDER_MIN_CONDUCTANCE: (u128, u128) = (1, 10);
const EXPANDER_DEGREE: usize = 4;

/// Layers `S_0..S_k` of `Δ` vertices each; consecutive layers are completely
/// joined.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredString {
    pub layers: Vec<Vec<usize>>,
}

impl LayeredString {
    pub fn k(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn delta(&self) -> usize {
        self.layers.first().map_or(0, Vec::len)
    }

    /// Layer index per vertex, `None` for vertices outside the string.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (i, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                out[v] = Some(i);
            }
        }
        out
    }

    pub fn layer_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layers
            .windows(2)
            .flat_map(|w| w[0].iter().flat_map(move |&u| w[1].iter().map(move |&v| (u, v))))
    }
}

/// An `H_{k,Δ}(A, B)` instance.
#[derive(Debug, Clone)]
pub struct HGraph {
    pub graph: Graph,
    pub layers: LayeredString,
    pub a_side: VertexSet,
    /// Expander vertices on each side, in attachment order.
    pub a_expander: Vec<usize>,
    pub b_expander: Vec<usize>,
}

impl HGraph {
    pub fn b_side(&self) -> VertexSet {
        self.a_side.complement()
    }
}

/// Just the string `S_0 ∪ … ∪ S_k` on `(k+1)·Δ` vertices, layer `i` holding
/// vertices `iΔ..(i+1)Δ`.
pub fn layered_string(k: usize, delta: usize) -> Result<(Graph, LayeredString)> {
    if delta == 0 {
        return Err(Error::Infeasible("layer width must be positive".into()));
    }
    let layers: Vec<Vec<usize>> = (0..=k).map(|i| (i * delta..(i + 1) * delta).collect()).collect();
    let s = LayeredString { layers };
    let g = Graph::from_edge_iter((k + 1) * delta, s.layer_edges())?;
    Ok((g, s))
}

fn expander(m: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let (lo_num, lo_den) = EXPANDER_MIN_CONDUCTANCE;
    for _ in 0..RETRY_BUDGET {
        let g = random_regular_connected(m, EXPANDER_DEGREE, rng.gen())?;
        if m > EXPANDER_CHECK_CAP {
            return Ok(g);
        }
        let phi = metrics::conductance_exact(&g, EXPANDER_CHECK_CAP)?.value;
        if phi >= ratio(lo_num, lo_den) {
            return Ok(g);
        }
    }
    Err(Error::RetryBudget { what: format!("4-regular expander on {m} vertices"), budget: RETRY_BUDGET })
}

/// Builds `H_{k,Δ}(A, B)` with `B = V \ A`.
///
/// `S_0` is drawn from `A` and `S_1..S_k` from `B`. Both remainders carry a
/// random connected 4-regular graph; `S_0` attaches to `Δ` distinct vertices
/// of the `A` expander round-robin (`S_0[j]` gets expander slots
/// `jΔ..jΔ+Δ` mod size), and `S_k` attaches to the `B` expander the same way.
pub fn h_graph(n: usize, k: usize, delta: usize, a_side: &VertexSet, seed: u64) -> Result<HGraph> {
    if a_side.universe() != n {
        return Err(Error::pre("A side universe differs from n"));
    }
    let a_len = a_side.len();
    let b_len = n - a_len;
    if k == 0 {
        return Err(Error::Infeasible("string length k must be at least 1".into()));
    }
    if delta == 0 {
        return Err(Error::Infeasible("Δ must be at least 1".into()));
    }
    if a_len < n / 4 || a_len > n - n / 4 {
        return Err(Error::Infeasible(format!("need floor(n/4) <= |A| <= n - floor(n/4), got |A| = {a_len}, n = {n}")));
    }
    if delta * delta > DELTA_SQ_FACTOR * n {
        return Err(Error::Infeasible(format!("need Δ² <= {DELTA_SQ_FACTOR}n, got Δ = {delta}, n = {n}")));
    }
    let min_side = (EXPANDER_DEGREE + 1).max(delta);
    if a_len < delta + min_side {
        return Err(Error::Infeasible(format!("need |A| >= Δ + {min_side}, got |A| = {a_len}")));
    }
    if b_len < k * delta + min_side {
        return Err(Error::Infeasible(format!(
            "need |B| >= kΔ + {min_side} = {}, got |B| = {b_len}",
            k * delta + min_side
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = shuffled(a_side.iter(), &mut rng);
    let b = shuffled(a_side.complement().iter(), &mut rng);

    let mut layers = vec![a[..delta].to_vec()];
    for i in 0..k {
        layers.push(b[i * delta..(i + 1) * delta].to_vec());
    }
    let layers = LayeredString { layers };
    let a_expander = a[delta..].to_vec();
    let b_expander = b[k * delta..].to_vec();

    let mut edges: Vec<(usize, usize)> = layers.layer_edges().collect();
    for (verts, end) in [(&a_expander, &layers.layers[0]), (&b_expander, &layers.layers[k])] {
        let g = expander(verts.len(), &mut rng)?;
        edges.extend(g.edges().map(|(u, v)| (verts[u], verts[v])));
        let m = verts.len();
        for (j, &s) in end.iter().enumerate() {
            for i in 0..delta {
                edges.push((s, verts[(j * delta + i) % m]));
            }
        }
    }

    Ok(HGraph { graph: Graph::from_edges(n, &edges)?, layers, a_side: a_side.clone(), a_expander, b_expander })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_quarter(n: usize) -> VertexSet {
        VertexSet::from_vertices(n, 0..n / 4)
    }

    #[test]
    fn string_degrees_and_layer_edges() {
        let n = 32;
        let h = h_graph(n, 2, 2, &VertexSet::from_vertices(n, 0..12), 4).unwrap();
        let g = &h.graph;
        for layer in &h.layers.layers {
            for &v in layer {
                assert_eq!(g.degree(v), 4, "string vertex {v}");
            }
        }
        for w in h.layers.layers.windows(2) {
            let count = w[0].iter().flat_map(|&u| w[1].iter().filter(move |&&v| g.has_edge(u, v))).count();
            assert_eq!(count, 4);
        }
        let bound = 4 + (2 * 2usize).div_ceil(h.a_expander.len());
        for &v in h.a_expander.iter().chain(&h.b_expander) {
            assert!(g.degree(v) >= 4 && g.degree(v) <= bound);
        }
        assert!(g.is_connected());
    }

    #[test]
    fn layers_sit_on_the_right_sides() {
        let n = 40;
        let a = first_quarter(n);
        let h = h_graph(n, 3, 3, &a, 1).unwrap();
        assert!(h.layers.layers[0].iter().all(|&v| a.contains(v)));
        assert!(h.layers.layers[1..].iter().flatten().all(|&v| !a.contains(v)));
        assert_eq!(h.layers.k(), 3);
        assert_eq!(h.layers.delta(), 3);
    }

    #[test]
    fn infeasible_sizes() {
        let n = 16;
        assert!(matches!(h_graph(n, 2, 2, &VertexSet::from_vertices(n, 0..2), 0), Err(Error::Infeasible(_))));
        assert!(matches!(h_graph(n, 5, 2, &first_quarter(n), 0), Err(Error::Infeasible(_))));
        assert!(matches!(h_graph(n, 1, 6, &first_quarter(n), 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn bare_string() {
        let (g, s) = layered_string(3, 2).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.num_edges(), 3 * 4);
        assert_eq!(s.labels(8)[5], Some(2));
        let (g0, s0) = layered_string(0, 3).unwrap();
        assert_eq!((g0.num_edges(), s0.k()), (0, 0));
    }
}
