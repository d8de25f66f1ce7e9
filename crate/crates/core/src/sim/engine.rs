use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use log::trace;

use super::{choice_stream, clock_stream, ClockPolicy, Protocol, SimConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::CounterRng;
use crate::schedule::{static_schedule, DynamicSchedule};
use crate::state::{ContactEvent, RumorState, SpreadTrace};

#[derive(Debug, Clone, Copy)]
struct Tick {
    time: f64,
    seq: u64,
    vertex: usize,
    /// Index of this tick in the vertex's clock stream.
    counter: u64,
}

impl PartialEq for Tick {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Tick {}

impl PartialOrd for Tick {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tick {
    // Reversed so BinaryHeap pops the earliest tick.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Clocks {
    seed: u64,
    rate: f64,
    seq: u64,
    next_counter: Vec<u64>,
    heap: BinaryHeap<Tick>,
}

impl Clocks {
    fn new(n: usize, seed: u64, rate: f64) -> Self {
        let mut c = Clocks { seed, rate, seq: 0, next_counter: vec![0; n], heap: BinaryHeap::with_capacity(n) };
        for v in 0..n {
            c.arm(v, 0.0);
        }
        c
    }

    fn arm(&mut self, v: usize, from: f64) {
        let counter = self.next_counter[v];
        self.next_counter[v] += 1;
        let gap = CounterRng::new(self.seed, clock_stream(v), counter).exp(self.rate);
        self.heap.push(Tick { time: from + gap, seq: self.seq, vertex: v, counter });
        self.seq += 1;
    }

    fn redraw_all(&mut self, from: f64) {
        self.heap.clear();
        for v in 0..self.next_counter.len() {
            self.arm(v, from);
        }
    }
}

/// Asynchronous push-pull: rate-1 clocks, and a tick exchanges the rumor
/// in both directions with a uniform neighbor of the current snapshot.
pub fn run_async(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig) -> Result<SpreadTrace> {
    if cfg.protocol != Protocol::AsyncPushPull {
        return Err(Error::Config(format!("run_async called with protocol {}", cfg.protocol.code())));
    }
    run_clocked(schedule, cfg, 1.0, false)
}

/// Asynchronous 2-push: rate-2 clocks and only informed callers transfer.
pub fn run_2push(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig) -> Result<SpreadTrace> {
    if cfg.protocol != Protocol::Async2Push {
        return Err(Error::Config(format!("run_2push called with protocol {}", cfg.protocol.code())));
    }
    run_clocked(schedule, cfg, 2.0, true)
}

fn run_clocked(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig, rate: f64, push_only: bool) -> Result<SpreadTrace> {
    let n = schedule.n();
    cfg.validate(n)?;
    let horizon = cfg.horizon_for(n);
    let target = cfg.target(n);
    let mut state = RumorState::new(cfg.initial.clone());
    let mut out = SpreadTrace { growth: vec![(0.0, state.informed_count())], ..SpreadTrace::default() };
    if state.informed_count() >= target {
        out.completion_time = state.all_informed().then_some(0.0);
        return Ok(out);
    }

    let mut step = 0u64;
    let mut graph = checked(schedule.graph_at(0, state.informed())?, n, 0)?;
    let mut clocks = Clocks::new(n, cfg.seed, rate);

    while let Some(tick) = clocks.heap.pop() {
        if tick.time > horizon {
            break;
        }
        // A tick exactly at an integer time already sees the new snapshot.
        if tick.time >= (step + 1) as f64 {
            let next_step = tick.time.floor() as u64;
            while step < next_step {
                step += 1;
                state.advance_to(step as f64);
                graph = checked(schedule.graph_at(step, state.informed())?, n, step)?;
            }
            if cfg.clock == ClockPolicy::RedrawAtSwitch {
                clocks.redraw_all(step as f64);
                continue;
            }
        }
        state.advance_to(tick.time);
        out.num_events += 1;

        let u = tick.vertex;
        let nbrs = graph.neighbors(u);
        let callee = if nbrs.is_empty() {
            trace!("t={:.6}: vertex {u} ticked while isolated", tick.time);
            None
        } else {
            Some(nbrs[CounterRng::new(cfg.seed, choice_stream(u), tick.counter).index(nbrs.len())])
        };
        let mut transferred = false;
        if let Some(v) = callee {
            let (iu, iv) = (state.informed().contains(u), state.informed().contains(v));
            if iu != iv && (!push_only || iu) {
                state.inform(if iu { v } else { u });
                transferred = true;
                out.growth.push((tick.time, state.informed_count()));
            }
        }
        if cfg.record_trace {
            out.events.push(ContactEvent { time: tick.time, caller: u, callee, transferred });
        }
        if transferred && state.informed_count() >= target {
            out.completion_time = state.all_informed().then_some(tick.time);
            return Ok(out);
        }
        clocks.arm(u, tick.time);
    }
    Ok(out)
}

fn checked(g: Arc<Graph>, n: usize, step: u64) -> Result<Arc<Graph>> {
    if g.n() != n {
        return Err(Error::Config(format!("schedule produced {} vertices at step {step}, expected {n}", g.n())));
    }
    Ok(g)
}

/// Time of the first informativity change of asynchronous push-pull on a
/// static graph, starting from `informed`.
pub fn first_transition_time(g: &Graph, informed: &VertexSet, seed: u64, horizon: f64) -> Result<Option<f64>> {
    if informed.is_empty() || informed.is_full() {
        return Err(Error::pre("informed set must be a non-empty proper subset"));
    }
    let mut s = static_schedule(g.clone());
    let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, informed.clone())
        .with_horizon(horizon)
        .stop_at(informed.len() + 1);
    Ok(run_async(&mut s, &cfg)?.time_to_reach(informed.len() + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::DynamicStar;

    fn cfg(n: usize, initial: &[usize], seed: u64) -> SimConfig {
        SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(n, initial.iter().copied()))
    }

    #[test]
    fn single_vertex_is_done_at_zero() {
        let mut s = static_schedule(Graph::empty(1).unwrap());
        let t = run_async(&mut s, &cfg(1, &[0], 1)).unwrap();
        assert_eq!(t.completion_time, Some(0.0));
        assert_eq!(t.num_events, 0);
    }

    #[test]
    fn k2_mean_is_half() {
        let mut s = static_schedule(Graph::complete(2).unwrap());
        let trials = 20_000;
        let sum: f64 =
            (0..trials).map(|seed| run_async(&mut s, &cfg(2, &[0], seed)).unwrap().completion_time.unwrap()).sum();
        assert!((sum / trials as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn replay_is_identical() {
        let mut s = static_schedule(Graph::cycle(9).unwrap());
        let c = cfg(9, &[0], 42).recording();
        assert_eq!(run_async(&mut s, &c).unwrap(), run_async(&mut s, &c).unwrap());
    }

    #[test]
    fn trace_is_monotone_and_transfers_cross_the_cut() {
        let n = 12;
        let mut s = DynamicStar::new(n - 1).unwrap();
        let t = run_async(&mut s, &cfg(n, &[1], 3).recording()).unwrap();
        assert!(t.completed());
        assert!(t.events.windows(2).all(|w| w[0].time < w[1].time));
        let mut informed = VertexSet::from_vertices(n, [1]);
        for e in &t.events {
            let v = e.callee.unwrap();
            let crossing = informed.contains(e.caller) != informed.contains(v);
            assert_eq!(e.transferred, crossing);
            if e.transferred {
                informed.insert(e.caller);
                informed.insert(v);
            }
        }
        assert!(informed.is_full());
    }

    #[test]
    fn isolated_ticks_are_logged_noops() {
        let mut s = static_schedule(Graph::from_edges(3, &[(0, 1)]).unwrap());
        let t = run_async(&mut s, &cfg(3, &[0], 5).with_horizon(5.0).recording()).unwrap();
        assert!(!t.completed());
        assert!(t.events.iter().any(|e| e.caller == 2 && e.callee.is_none() && !e.transferred));
        assert_eq!(t.final_informed(), 2);
    }

    #[test]
    fn two_push_ignores_uninformed_callers() {
        let mut s = static_schedule(Graph::star(5, 0).unwrap());
        let c = SimConfig::new(Protocol::Async2Push, 8, VertexSet::from_vertices(5, [1])).recording();
        let t = run_2push(&mut s, &c).unwrap();
        assert!(t.completed());
        let mut informed = VertexSet::from_vertices(5, [1]);
        for e in t.events.iter().filter(|e| e.transferred) {
            assert!(informed.contains(e.caller), "push from uninformed {}", e.caller);
            informed.insert(e.callee.unwrap());
        }
    }

    #[test]
    fn wrong_protocol_is_rejected() {
        let mut s = static_schedule(Graph::complete(2).unwrap());
        let c = SimConfig::new(Protocol::SyncPushPull, 0, VertexSet::from_vertices(2, [0]));
        assert!(run_async(&mut s, &c).is_err());
        assert!(run_2push(&mut s, &c).is_err());
    }
}
