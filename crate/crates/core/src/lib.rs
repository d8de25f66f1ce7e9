//! Rumor spreading on dynamic evolving networks.
//!
//! The crate simulates asynchronous and synchronous push-pull gossip on
//! graph sequences that may react to who already knows the rumor, computes
//! the graph parameters that govern spread time (conductance, diligence,
//! absolute diligence) exactly, and evaluates the resulting spread-time
//! bounds. The `experiment` module runs seeded Monte Carlo sweeps over the
//! network families in `generators`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod schedule;
pub mod sim;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use schedule::{static_schedule, DynamicSchedule, SequenceSchedule, StaticSchedule};
pub use state::{ContactEvent, RumorState, SpreadTrace};
