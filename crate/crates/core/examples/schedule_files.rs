//! Writes a graph sequence and an adaptive schedule to disk, reads them
//! back and simulates on the loaded copies.
//!
//! Run with `cargo run --example schedule_files`.

use dyngossip::generators::Family;
use dyngossip::io::{graph_to_string, load_schedule, write_adaptive_schedule, write_graph_schedule};
use dyngossip::sim::{simulate, Protocol, SimConfig};
use dyngossip::{Graph, Result, VertexSet};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("dyngossip-schedules-{}", std::process::id()));

    let seq = dir.join("path-then-cycle");
    write_graph_schedule(&seq, &[Graph::path(6)?, Graph::cycle(6)?])?;
    print!("{}", graph_to_string(&Graph::path(6)?));

    let star = dir.join("dynamic-star");
    write_adaptive_schedule(&star, &Family::DynamicStar { n: 10 }, 0)?;
    println!("{}", std::fs::read_to_string(star.join("manifest.toml")).unwrap_or_default());

    for path in [&seq, &star] {
        let source = load_schedule(path)?;
        let mut s = source.build(None)?;
        let cfg = SimConfig::new(Protocol::SyncPushPull, 1, VertexSet::from_vertices(source.n(), [source.default_source()]));
        let t = simulate(&mut *s, &cfg)?;
        println!("{}: {} rounds", path.display(), t.completion_time.unwrap());
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
