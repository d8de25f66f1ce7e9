//! Upper bounds T (conductance × diligence) and T_abs (absolute diligence)
//! for a static star and a random 4-regular graph, next to simulated
//! completion times.
//!
//! Run with `cargo run --release --example bounds`.

use dyngossip::bounds::{bound_report, static_crossings, DEFAULT_C};
use dyngossip::generators::random_regular_connected;
use dyngossip::sim::{simulate, Protocol, SimConfig};
use dyngossip::stats::quantile;
use dyngossip::{static_schedule, Graph, Result, VertexSet};

fn main() -> Result<()> {
    for (name, g) in [("star n=12", Graph::star(12, 0)?), ("4-regular n=14", random_regular_connected(14, 4, 3)?)] {
        let (t, t_abs) = static_crossings(&g, DEFAULT_C, 20)?;
        let mut times: Vec<f64> = (0..500)
            .map(|seed| {
                let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(g.n(), [1]));
                simulate(&mut static_schedule(g.clone()), &cfg).map(|tr| tr.completion_time.unwrap())
            })
            .collect::<Result<_>>()?;
        times.sort_by(f64::total_cmp);
        println!("{name}: T = {:?}, T_abs = {:?}", t.step(), t_abs.step());
        println!("  completion median {:.2}, 99th percentile {:.2}", quantile(&times, 0.5), quantile(&times, 0.99));
    }

    // per-step table for a short sequence where the graph is disconnected at step 1
    let prefix = vec![Graph::cycle(6)?, Graph::empty(6)?, Graph::complete(6)?, Graph::complete(6)?];
    let r = bound_report(&prefix, DEFAULT_C, 20)?;
    for row in &r.rows {
        println!("step {} connected={} Φ={:?} ρ={:?} ρ̄={}", row.step, row.connected, row.conductance, row.diligence, row.absolute_diligence);
    }
    println!("T_abs over the prefix: {:?}", r.t_absolute);
    Ok(())
}
