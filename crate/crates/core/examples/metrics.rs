//! Exact conductance, diligence and absolute diligence of a few small graphs.
//!
//! Run with `cargo run --example metrics`.

use dyngossip::metrics::{metric_report, to_f64};
use dyngossip::{Graph, Result};

fn main() -> Result<()> {
    let graphs = [
        ("star K1,7", Graph::star(8, 0)?),
        ("clique K8", Graph::complete(8)?),
        ("path P8", Graph::path(8)?),
        ("cycle C8", Graph::cycle(8)?),
        ("two K4 + bridge", two_cliques()?),
    ];
    println!("{:<16} {:>10} {:>10} {:>10}  witness (conductance)", "graph", "Φ", "ρ", "ρ̄");
    for (name, g) in &graphs {
        let r = metric_report(g, 20)?;
        let witness: Vec<usize> = r.conductance_witness.iter().flat_map(|s| s.iter()).collect();
        println!(
            "{:<16} {:>10} {:>10} {:>10}  {:?}",
            name,
            r.conductance.to_string(),
            r.diligence.to_string(),
            r.absolute_diligence.to_string(),
            witness
        );
        assert!(to_f64(&r.conductance) <= 1.0);
    }
    Ok(())
}

fn two_cliques() -> Result<Graph> {
    let k4 = Graph::complete(4)?;
    let both = k4.disjoint_union(&k4)?;
    let mut edges: Vec<_> = both.edges().collect();
    edges.push((0, 4));
    Graph::from_edges(8, &edges)
}
