use super::{choice_stream, Protocol, SimConfig};
use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::schedule::DynamicSchedule;
use crate::state::{ContactEvent, SpreadTrace};

/// Synchronous push-pull. In round `t` every vertex calls a uniform neighbor
/// in `G^(t)`; all calls are resolved against the informed set at the start
/// of the round. Completion is reported in rounds.
pub fn run_sync(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig) -> Result<SpreadTrace> {
    if cfg.protocol != Protocol::SyncPushPull {
        return Err(Error::Config(format!("run_sync called with protocol {}", cfg.protocol.code())));
    }
    let n = schedule.n();
    cfg.validate(n)?;
    let max_rounds = cfg.horizon_for(n).floor() as u64;
    let target = cfg.target(n);
    let mut informed = cfg.initial.clone();
    let mut out = SpreadTrace { growth: vec![(0.0, informed.len())], ..SpreadTrace::default() };
    if informed.len() >= target {
        out.completion_time = informed.is_full().then_some(0.0);
        return Ok(out);
    }

    for round in 0..max_rounds {
        let g = schedule.graph_at(round, &informed)?;
        if g.n() != n {
            return Err(Error::Config(format!("schedule produced {} vertices at step {round}, expected {n}", g.n())));
        }
        let mut next = informed.clone();
        for u in 0..n {
            out.num_events += 1;
            let nbrs = g.neighbors(u);
            let callee = (!nbrs.is_empty())
                .then(|| nbrs[CounterRng::new(cfg.seed, choice_stream(u), round).index(nbrs.len())]);
            let mut transferred = false;
            if let Some(v) = callee {
                if informed.contains(u) != informed.contains(v) {
                    next.insert(u);
                    next.insert(v);
                    transferred = true;
                }
            }
            if cfg.record_trace {
                out.events.push(ContactEvent { time: round as f64, caller: u, callee, transferred });
            }
        }
        let end = (round + 1) as f64;
        if next.len() > informed.len() {
            out.growth.push((end, next.len()));
        }
        informed = next;
        if informed.len() >= target {
            out.completion_time = informed.is_full().then_some(end);
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::DynamicStar;
    use crate::graph::{Graph, VertexSet};
    use crate::schedule::static_schedule;

    fn cfg(n: usize, initial: &[usize], seed: u64) -> SimConfig {
        SimConfig::new(Protocol::SyncPushPull, seed, VertexSet::from_vertices(n, initial.iter().copied()))
    }

    #[test]
    fn dynamic_star_takes_exactly_n_rounds() {
        for n in [3, 8, 20] {
            for seed in 0..10 {
                let mut s = DynamicStar::new(n).unwrap();
                let t = run_sync(&mut s, &cfg(n + 1, &[1], seed)).unwrap();
                assert_eq!(t.completion_time, Some(n as f64));
                assert!(t.growth.windows(2).all(|w| w[1].1 == w[0].1 + 1));
            }
        }
    }

    #[test]
    fn no_chaining_within_a_round() {
        // On a path 0-1-2 informed {0}, one round can reach 1 but never 2.
        let mut s = static_schedule(Graph::path(3).unwrap());
        for seed in 0..50 {
            let t = run_sync(&mut s, &cfg(3, &[0], seed).with_horizon(1.0)).unwrap();
            assert!(t.final_informed() <= 2);
        }
    }

    #[test]
    fn trivial_cases() {
        let mut s = static_schedule(Graph::empty(1).unwrap());
        assert_eq!(run_sync(&mut s, &cfg(1, &[0], 0)).unwrap().completion_time, Some(0.0));
        let mut k2 = static_schedule(Graph::complete(2).unwrap());
        assert_eq!(run_sync(&mut k2, &cfg(2, &[0], 0)).unwrap().completion_time, Some(1.0));
    }
}
