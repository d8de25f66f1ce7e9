//! The same dynamic networks can favour either protocol: a dynamic star is
//! fast for asynchronous push-pull and slow for rounds, and two cliques that
//! lose their bridge after step 0 are the reverse.
//!
//! Run with `cargo run --release --example async_vs_sync`.

use dyngossip::generators::Family;
use dyngossip::sim::{simulate, Protocol, SimConfig};
use dyngossip::stats::median;
use dyngossip::{Result, VertexSet};

const TRIALS: u64 = 200;

fn median_completion(family: &Family, protocol: Protocol) -> Result<f64> {
    let mut times = Vec::new();
    for seed in 0..TRIALS {
        let mut s = family.build(seed)?;
        let initial = VertexSet::from_vertices(family.vertex_count(), [family.default_source()]);
        let cfg = SimConfig::new(protocol, seed, initial).with_horizon(1e4);
        times.push(simulate(&mut *s, &cfg)?.completion_time.unwrap_or(f64::INFINITY));
    }
    Ok(median(&times))
}

fn main() -> Result<()> {
    println!("{:>5} {:>14} {:>14} {:>14} {:>14}", "n", "star async", "star sync", "cliques async", "cliques sync");
    for n in [16, 32, 64, 128] {
        println!(
            "{:>5} {:>14.2} {:>14.0} {:>14.2} {:>14.0}",
            n,
            median_completion(&Family::DynamicStar { n }, Protocol::AsyncPushPull)?,
            median_completion(&Family::DynamicStar { n }, Protocol::SyncPushPull)?,
            median_completion(&Family::TwoClique { n }, Protocol::AsyncPushPull)?,
            median_completion(&Family::TwoClique { n }, Protocol::SyncPushPull)?,
        );
    }
    Ok(())
}
