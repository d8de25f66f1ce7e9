use std::collections::BinaryHeap;

use super::{choice_stream, clock_stream};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::CounterRng;
use crate::state::{ContactEvent, SpreadTrace};

/// Outcome of a forward 2-push run.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardRun {
    pub trace: SpreadTrace,
    /// Per layer, the sorted times at which its vertices were informed.
    pub layer_arrivals: Vec<Vec<f64>>,
}

impl ForwardRun {
    pub fn count_in_layer_by(&self, layer: usize, time: f64) -> usize {
        self.layer_arrivals[layer].partition_point(|&t| t <= time)
    }

    /// First time the last layer received the rumor.
    pub fn first_arrival_last_layer(&self) -> Option<f64> {
        self.layer_arrivals.last().and_then(|l| l.first().copied())
    }
}

/// Forward 2-push on a layered string: layer 0 starts informed, vertices of
/// layers `0..k` tick at rate 2, and an informed vertex of layer `i` pushes
/// to a uniform neighbor in layer `i + 1`. Uninformed ticks are no-ops, so
/// clocks are only simulated from the moment a vertex is informed.
pub fn run_forward_2push(
    g: &Graph,
    labels: &[Option<usize>],
    seed: u64,
    horizon: f64,
    record_trace: bool,
) -> Result<ForwardRun> {
    let n = g.n();
    if labels.len() != n {
        return Err(Error::Config(format!("{} layer labels for {n} vertices", labels.len())));
    }
    let k = match labels.iter().flatten().max() {
        Some(&k) => k,
        None => return Err(Error::Config("graph carries no layer labels".into())),
    };
    let mut members = vec![Vec::new(); k + 1];
    for (v, l) in labels.iter().enumerate() {
        if let Some(l) = *l {
            members[l].push(v);
        }
    }
    if let Some(i) = members.iter().position(Vec::is_empty) {
        return Err(Error::Config(format!("layer {i} is empty")));
    }
    if !(horizon > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| match labels[u] {
            Some(i) if i < k => g.neighbors(u).iter().copied().filter(|&v| labels[v] == Some(i + 1)).collect(),
            _ => Vec::new(),
        })
        .collect();

    let mut informed = vec![false; n];
    let mut counters = vec![0u64; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut arm = |heap: &mut BinaryHeap<_>, v: usize, from: f64, counters: &mut Vec<u64>| {
        let c = counters[v];
        counters[v] += 1;
        let t = from + CounterRng::new(seed, clock_stream(v), c).exp(2.0);
        heap.push(std::cmp::Reverse((OrdF64(t), seq, v, c)));
        seq += 1;
    };

    let mut layer_arrivals = vec![Vec::new(); k + 1];
    let mut count = members[0].len();
    let mut trace = SpreadTrace { growth: vec![(0.0, count)], ..SpreadTrace::default() };
    for &v in &members[0] {
        informed[v] = true;
        layer_arrivals[0].push(0.0);
        if k > 0 {
            arm(&mut heap, v, 0.0, &mut counters);
        }
    }
    let string_size: usize = members.iter().map(Vec::len).sum();
    if count == string_size {
        trace.completion_time = Some(0.0);
    }

    while let Some(std::cmp::Reverse((OrdF64(t), _, u, c))) = heap.pop() {
        if t > horizon {
            break;
        }
        trace.num_events += 1;
        let targets = &forward[u];
        let callee = (!targets.is_empty()).then(|| targets[CounterRng::new(seed, choice_stream(u), c).index(targets.len())]);
        let mut transferred = false;
        if let Some(v) = callee {
            if !informed[v] {
                informed[v] = true;
                transferred = true;
                count += 1;
                trace.growth.push((t, count));
                let l = labels[v].expect("forward targets are labeled");
                layer_arrivals[l].push(t);
                if l < k {
                    arm(&mut heap, v, t, &mut counters);
                }
            }
        }
        if record_trace {
            trace.events.push(ContactEvent { time: t, caller: u, callee, transferred });
        }
        if count == string_size {
            trace.completion_time = Some(t);
            break;
        }
        arm(&mut heap, u, t, &mut counters);
    }
    Ok(ForwardRun { trace, layer_arrivals })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::layered_string;

    #[test]
    fn single_layer_is_done_immediately() {
        let (g, s) = layered_string(0, 3).unwrap();
        let r = run_forward_2push(&g, &s.labels(g.n()), 1, 1.0, false).unwrap();
        assert_eq!(r.trace.completion_time, Some(0.0));
        assert_eq!(r.count_in_layer_by(0, 0.0), 3);
    }

    #[test]
    fn missing_labels_are_a_config_error() {
        let g = Graph::path(4).unwrap();
        assert!(matches!(run_forward_2push(&g, &[None; 4], 0, 1.0, false), Err(Error::Config(_))));
        assert!(run_forward_2push(&g, &[Some(0), None], 0, 1.0, false).is_err());
        assert!(run_forward_2push(&g, &[Some(0), Some(2), None, None], 0, 1.0, false).is_err());
    }

    #[test]
    fn pushes_only_move_forward() {
        let (g, s) = layered_string(4, 3).unwrap();
        let labels = s.labels(g.n());
        let r = run_forward_2push(&g, &labels, 9, 100.0, true).unwrap();
        assert!(r.trace.completed());
        for e in &r.trace.events {
            assert_eq!(labels[e.callee.unwrap()], labels[e.caller].map(|l| l + 1));
        }
        for l in 1..=4 {
            assert!(r.layer_arrivals[l][0] > r.layer_arrivals[l - 1][0]);
        }
    }

    #[test]
    fn first_layer_mean_respects_linear_bound() {
        let (g, s) = layered_string(1, 4).unwrap();
        let labels = s.labels(g.n());
        let trials = 4000;
        let tau = 0.25;
        let mean = (0..trials)
            .map(|seed| run_forward_2push(&g, &labels, seed, tau, false).unwrap().count_in_layer_by(1, tau) as f64)
            .sum::<f64>()
            / trials as f64;
        assert!(mean <= 2.0 * tau * 4.0);
    }
}
