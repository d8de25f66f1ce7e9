//! Forward 2-push along a layered string: how long until the last layer
//! hears the rumor, compared with the string length.
//!
//! Run with `cargo run --release --example forward_push`.

use dyngossip::generators::layered_string;
use dyngossip::sim::run_forward_2push;
use dyngossip::stats::mean;
use dyngossip::Result;

fn main() -> Result<()> {
    for (k, delta) in [(3, 4), (5, 4), (8, 2)] {
        let (g, layers) = layered_string(k, delta)?;
        let labels = layers.labels(g.n());
        let arrivals: Vec<f64> = (0..2000)
            .map(|seed| run_forward_2push(&g, &labels, seed, 1e3, false).map(|r| r.first_arrival_last_layer().unwrap()))
            .collect::<Result<_>>()?;
        println!("k={k} Δ={delta}: mean time to reach layer k = {:.3} (k/2 = {:.1})", mean(&arrivals), k as f64 / 2.0);
    }
    Ok(())
}
