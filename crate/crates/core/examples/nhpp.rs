//! The number of informative contacts is a Poisson process whose rate is
//! the sum of `1/d_u + 1/d_v` over cut edges. This samples such a process
//! with a step rate and checks its counts against the Poisson law.
//!
//! Run with `cargo run --release --example nhpp`.

use dyngossip::metrics::to_f64;
use dyngossip::sim::{instantaneous_rate, poisson_cdf, poisson_lower_tail_bound, sample_nhpp, StepRate};
use dyngossip::{Graph, Result, VertexSet};

fn main() -> Result<()> {
    let g = Graph::path(5)?;
    let informed = VertexSet::from_vertices(5, [0, 1]);
    let lambda = instantaneous_rate(&g, &informed)?;
    println!("rate across the cut of P5 after two vertices know the rumor: {lambda} = {:.4}", to_f64(&lambda));

    // rate 1 on [0, 1), rate 3 on [1, 2)
    let rate = StepRate::new(vec![0.0, 1.0, 2.0], vec![1.0, 3.0])?;
    let mean = rate.integral(0.0, 2.0);
    let runs = 20_000;
    let mut at_most_2 = 0;
    let mut total = 0usize;
    for seed in 0..runs {
        let k = sample_nhpp(&rate, 0.0, 2.0, seed)?.arrivals.len();
        total += k;
        if k <= 2 {
            at_most_2 += 1;
        }
    }
    println!("mean count {:.3} (expected {mean})", total as f64 / runs as f64);
    println!("Pr[N ≤ 2] = {:.4} (Poisson {:.4})", at_most_2 as f64 / runs as f64, poisson_cdf(2, mean));
    println!("Pr[N ≤ r/2] ≤ {:.4} for r = {mean}", poisson_lower_tail_bound(mean)?);
    Ok(())
}
