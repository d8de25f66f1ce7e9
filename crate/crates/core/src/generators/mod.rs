//! Network families: random regular building blocks, the layered string
//! gadget, and the static, dynamic and adaptive schedules built from them.

mod families;
mod hgraph;
mod regular;

pub use families::{
    default_string_length, delta_for, even_delta_for, gbar_snapshot, DynamicStar, Family, GbarSchedule, GbarSnapshot,
    GnRhoSchedule, TwoClique,
};
pub use hgraph::{h_graph, layered_string, HGraph, LayeredString, DELTA_SQ_FACTOR, EXPANDER_CHECK_CAP};
pub use regular::{near_regular_graph, random_regular_connected, NearRegular, RETRY_BUDGET};
