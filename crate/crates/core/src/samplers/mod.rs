//! Sampling distributions used by the planner: uniform, admissible
//! L2-informed, local tube sampling around the incumbent, and the adaptive
//! selector that mixes the last two.

mod guess;
mod informed;
mod local;
mod rng;
mod unit_ball;

pub use guess::{local_radius, select_strategy, GuessState, SamplerChoice};
pub use informed::{informed_set_measure, sample_informed, sample_uniform, EllipsoidFrame, InformedSampler};
pub use local::sample_local;
pub use rng::RngState;
pub use unit_ball::sample_unit_ball;

/// Default number of rejected candidates before a sampler reports starvation.
pub const DEFAULT_REJECTION_BUDGET: usize = 1000;
