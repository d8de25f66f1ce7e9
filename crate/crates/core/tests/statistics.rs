//! Distributional checks of the simulator against closed-form oracles.

use dyngossip::bounds::rate_lower_bound;
use dyngossip::generators::random_regular_connected;
use dyngossip::schedule::DynamicSchedule;
use dyngossip::sim::{instantaneous_rate, simulate, ClockPolicy, Protocol, SimConfig};
use dyngossip::stats::{ks_one_sample, ks_two_sample};
use dyngossip::{static_schedule, Graph, SequenceSchedule, VertexSet};

const ALPHA: f64 = 0.01;

fn completion(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig) -> f64 {
    simulate(schedule, cfg).unwrap().completion_time.expect("run completes")
}

/// A sequence on 8 vertices whose snapshots differ enough that runs cross
/// several switches.
fn switching_sequence() -> Vec<Graph> {
    vec![
        Graph::path(8).unwrap(),
        Graph::star(8, 7).unwrap(),
        Graph::cycle(8).unwrap(),
        Graph::path(8).unwrap().relabel(&[3, 6, 0, 7, 1, 5, 2, 4]).unwrap(),
        Graph::cycle(8).unwrap().relabel(&[7, 6, 5, 4, 0, 1, 2, 3]).unwrap(),
    ]
}

#[test]
fn persistent_and_redrawn_clocks_agree_in_distribution() {
    let graphs = switching_sequence();
    let runs = 10_000u64;
    let sample = |policy: ClockPolicy, offset: u64| -> Vec<f64> {
        (0..runs)
            .map(|i| {
                let mut s = SequenceSchedule::new(graphs.clone()).unwrap();
                let cfg = SimConfig::new(Protocol::AsyncPushPull, offset + i, VertexSet::from_vertices(8, [0]))
                    .with_clock(policy);
                completion(&mut s, &cfg)
            })
            .collect()
    };
    // disjoint seeds keep the two samples independent
    let a = sample(ClockPolicy::Persistent, 0);
    let b = sample(ClockPolicy::RedrawAtSwitch, runs);
    let ks = ks_two_sample(&a, &b).unwrap();
    assert!(ks.p_value > ALPHA, "KS D = {}, p = {}", ks.statistic, ks.p_value);
    // the sample really crosses switches
    assert!(a.iter().filter(|&&t| t > 2.0).count() > 1000);
}

#[test]
fn triangle_completion_is_gamma_two_two() {
    // from one informed vertex of K3 both transitions have rate 2 · (1/2 + 1/2) = 2
    let g = Graph::complete(3).unwrap();
    let xs: Vec<f64> = (0..20_000)
        .map(|seed| {
            let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(3, [0]));
            completion(&mut static_schedule(g.clone()), &cfg)
        })
        .collect();
    let ks = ks_one_sample(&xs, |t| if t <= 0.0 { 0.0 } else { 1.0 - (-2.0 * t).exp() * (1.0 + 2.0 * t) }).unwrap();
    assert!(ks.p_value > ALPHA, "KS D = {}, p = {}", ks.statistic, ks.p_value);
}

#[test]
fn two_push_on_an_edge_is_exponential_two() {
    // only the informed endpoint's rate-2 clock can transfer
    let g = Graph::complete(2).unwrap();
    let xs: Vec<f64> = (0..20_000)
        .map(|seed| {
            let cfg = SimConfig::new(Protocol::Async2Push, seed, VertexSet::from_vertices(2, [0]));
            completion(&mut static_schedule(g.clone()), &cfg)
        })
        .collect();
    let ks = ks_one_sample(&xs, |t| 1.0 - (-2.0 * t.max(0.0)).exp()).unwrap();
    assert!(ks.p_value > ALPHA, "KS D = {}, p = {}", ks.statistic, ks.p_value);
}

#[test]
fn sync_rounds_never_chain_along_a_path() {
    // without chaining the frontier moves at most one hop per round
    for n in 2..12 {
        for seed in 0..50 {
            let cfg = SimConfig::new(Protocol::SyncPushPull, seed, VertexSet::from_vertices(n, [0]));
            let t = completion(&mut static_schedule(Graph::path(n).unwrap()), &cfg);
            assert!(t >= (n - 1) as f64, "n={n} seed={seed}: {t} rounds");
            assert_eq!(t.fract(), 0.0);
        }
    }
}

#[test]
fn rate_floor_holds_at_every_event_of_real_traces() {
    for seed in 0..40u64 {
        let n = 10 + (seed % 3) as usize;
        let graphs: Vec<Graph> = (0..4)
            .map(|i| {
                if n.is_multiple_of(2) {
                    random_regular_connected(n, 3 + (i % 2), seed * 7 + i as u64).unwrap()
                } else {
                    random_regular_connected(n, 4, seed * 7 + i as u64).unwrap()
                }
            })
            .collect();
        let mut s = SequenceSchedule::new(graphs.clone()).unwrap();
        let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(n, [0])).recording();
        let t = simulate(&mut s, &cfg).unwrap();
        let mut informed = VertexSet::from_vertices(n, [0]);
        for e in &t.events {
            if informed.is_full() {
                break;
            }
            let g = &graphs[(e.time.floor() as usize).min(graphs.len() - 1)];
            let floor = rate_lower_bound(g, &informed, 20).unwrap();
            let rate = instantaneous_rate(g, &informed).unwrap();
            assert!(floor <= rate, "seed {seed} t={}: {floor} > {rate}", e.time);
            if e.transferred {
                informed.insert(e.caller);
                informed.insert(e.callee.unwrap());
            }
        }
    }
}
