//! Headless synthetic volunteers.
//!
//! A [`SwarmPlan`] lists client profiles (speed, join time, departure);
//! [`run_swarm`] plays it against a live server, each profile driving its
//! own [`client_loop`]. Compute time of a browser is stood in for by a
//! sleep of `base_segment_delay × speed_factor` per segment; a base delay
//! of zero runs the GA flat out.

mod client;
mod plan;
mod swarm;

pub use client::{client_loop, ClientExit, ClientOptions, ClientRunSummary};
pub use plan::{
    make_plan, ChurnSpec, ClientProfile, PlanError, SpeedSpec, SwarmPlan, DEFAULT_BASE_SEGMENT_DELAY,
};
pub use swarm::{run_swarm, SwarmReport};
