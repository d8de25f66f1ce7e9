//! Runs a reduced dichotomy experiment and prints its verdicts. The output
//! directory gets raw.csv, summary.csv and verdicts.json.
//!
//! Run with `cargo run --release --example experiment [out-dir]`.

use dyngossip::experiment::{run_experiment, ExperimentConfig};
use dyngossip::Result;

const CONFIG: &str = r#"
experiment = "dichotomy"
trials = 200
seed_base = 1

[sweep]
n = [16, 32, 64]
exact_n = [16, 32]
k = [4, 6]
tail_n = 128
"#;

fn main() -> Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let result = run_experiment(&cfg)?;
    for v in &result.verdicts {
        println!("{} {:<55} observed {:>8.4} vs {:>8.4}", if v.passed { "pass" } else { "FAIL" }, v.criterion, v.observed, v.threshold);
    }
    if let Some(out) = std::env::args().nth(1) {
        result.write(out.as_ref())?;
        println!("wrote {out}");
    }
    Ok(())
}
