//! Protocol engines.
//!
//! All engines are single-threaded and fully determined by
//! `(schedule, SimConfig)`: vertex `v`'s clock gaps come from counter-keyed
//! stream `2v` and its neighbor choices from stream `2v + 1`, so trials can
//! run in parallel and replay exactly.

mod engine;
mod forward;
mod nhpp;
mod sync;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::schedule::DynamicSchedule;
use crate::state::SpreadTrace;

pub use engine::{first_transition_time, run_2push, run_async};
pub use forward::{run_forward_2push, ForwardRun};
pub use nhpp::{instantaneous_rate, poisson_cdf, poisson_lower_tail_bound, sample_nhpp, NhppSample, StepRate};
pub use sync::run_sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    AsyncPushPull,
    SyncPushPull,
    Async2Push,
    Forward2Push,
}

impl Protocol {
    pub fn code(self) -> &'static str {
        match self {
            Protocol::AsyncPushPull => "async-push-pull",
            Protocol::SyncPushPull => "sync-push-pull",
            Protocol::Async2Push => "async-2-push",
            Protocol::Forward2Push => "forward-2-push",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "async" | "async-push-pull" => Ok(Protocol::AsyncPushPull),
            "sync" | "sync-push-pull" => Ok(Protocol::SyncPushPull),
            "2-push" | "async-2-push" => Ok(Protocol::Async2Push),
            "forward-2-push" => Ok(Protocol::Forward2Push),
            _ => Err(Error::Config(format!("unknown protocol {s:?}"))),
        }
    }

    pub fn clock_rate(self) -> f64 {
        match self {
            Protocol::AsyncPushPull | Protocol::SyncPushPull => 1.0,
            Protocol::Async2Push | Protocol::Forward2Push => 2.0,
        }
    }
}

/// What happens to pending clock ticks when the graph switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockPolicy {
    /// Tick times are drawn once; only the neighbor lists change.
    #[default]
    Persistent,
    /// Every vertex redraws its next tick from the switch time.
    RedrawAtSwitch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub protocol: Protocol,
    pub seed: u64,
    pub initial: VertexSet,
    /// Time units (async) or rounds (sync); `None` means `10·n`.
    pub horizon: Option<f64>,
    pub record_trace: bool,
    pub clock: ClockPolicy,
    /// Stop as soon as this many vertices are informed.
    pub stop_at_count: Option<usize>,
}

impl SimConfig {
    pub fn new(protocol: Protocol, seed: u64, initial: VertexSet) -> Self {
        SimConfig { protocol, seed, initial, horizon: None, record_trace: false, clock: ClockPolicy::Persistent, stop_at_count: None }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn with_clock(mut self, clock: ClockPolicy) -> Self {
        self.clock = clock;
        self
    }

    pub fn stop_at(mut self, count: usize) -> Self {
        self.stop_at_count = Some(count);
        self
    }

    pub(crate) fn horizon_for(&self, n: usize) -> f64 {
        self.horizon.unwrap_or(10.0 * n as f64)
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.initial.universe() != n {
            return Err(Error::Config(format!(
                "initial set is over {} vertices, schedule has {n}",
                self.initial.universe()
            )));
        }
        if self.initial.is_empty() {
            return Err(Error::Config("initial informed set is empty".into()));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err(Error::Config(format!("horizon must be positive, got {h}")));
            }
        }
        Ok(())
    }

    pub(crate) fn target(&self, n: usize) -> usize {
        self.stop_at_count.map_or(n, |c| c.min(n))
    }
}

/// Runs whichever schedule-driven protocol `cfg` names. The forward 2-push
/// needs layer labels and is only reachable through [`run_forward_2push`].
pub fn simulate(schedule: &mut dyn DynamicSchedule, cfg: &SimConfig) -> Result<SpreadTrace> {
    match cfg.protocol {
        Protocol::AsyncPushPull => run_async(schedule, cfg),
        Protocol::SyncPushPull => run_sync(schedule, cfg),
        Protocol::Async2Push => run_2push(schedule, cfg),
        Protocol::Forward2Push => {
            Err(Error::Config("forward 2-push runs on a layered string; use run_forward_2push".into()))
        }
    }
}

pub(crate) fn clock_stream(v: usize) -> u64 {
    2 * v as u64
}

pub(crate) fn choice_stream(v: usize) -> u64 {
    2 * v as u64 + 1
}
