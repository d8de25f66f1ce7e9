//! Builds an H-graph (expander – layered string – expander) and compares
//! its exact metrics with the predicted `Δ²/(kΔ²+n)` and `1/Δ`, then walks
//! a few steps of the adaptive G(n, ρ) family.
//!
//! Run with `cargo run --release --example families`.

use dyngossip::generators::{h_graph, GnRhoSchedule};
use dyngossip::metrics::observed_family_metrics;
use dyngossip::schedule::DynamicSchedule;
use dyngossip::{Result, VertexSet};

fn main() -> Result<()> {
    let (n, k, delta) = (20, 1, 2);
    let h = h_graph(n, k, delta, &VertexSet::from_vertices(n, 0..10), 7)?;
    let check = observed_family_metrics(&h, 20)?;
    println!("H-graph n={n} k={k} Δ={delta}: {} edges, layers {:?}", h.graph.num_edges(), h.layers.layers);
    println!("  Φ = {} (predicted {}, ratio {:.3})", check.conductance, check.predicted_conductance, check.conductance_ratio);
    println!("  ρ = {} (predicted {}, ratio {:.3})", check.diligence, check.predicted_diligence, check.diligence_ratio);

    let mut s = GnRhoSchedule::new(256, 0.5, 3, 11)?;
    let mut informed = VertexSet::from_vertices(256, [0]);
    println!("\nG(256, 1/2) with k = {}, Δ = {}", s.k(), s.delta());
    for t in 0..4 {
        let g = s.graph_at(t, &informed)?;
        println!("  step {t}: {} edges, |B| = {}, rebuilds so far {}", g.num_edges(), s.b_side().len(), s.rebuilds());
        // pretend the rumor crossed half of B
        let b: Vec<usize> = s.b_side().iter().collect();
        for &v in b.iter().take(b.len() / 2) {
            informed.insert(v);
        }
    }
    Ok(())
}
