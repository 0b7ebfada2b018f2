//! Asymptotically optimal sampling-based path planning with an adaptive
//! mixed sampling strategy.
//!
//! The planner is an anytime RRT*. Once a first solution exists it draws
//! each sample either from the admissible L2-informed set (the prolate
//! hyperspheroid with foci at start and goal) or from a thin tube around
//! the incumbent path. The probability of the local draw follows the
//! recent cost improvements, so exploitation fades once the incumbent
//! settles into a local minimum while global informed sampling keeps the
//! planner asymptotically optimal.
//!
//! All geometry is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod benchmark;
pub mod error;
pub mod geometry;
pub mod planner;
pub mod problem_file;
pub mod samplers;
pub mod scalar;
pub mod spatial;
pub mod tree;

pub use error::{Error, Result};
pub use planner::{plan, PhiMode, Planner, Strategy, Termination, Variant};
pub use scalar::Real;

pub type Configuration = geometry::Configuration<f64>;
pub type Bounds = geometry::Bounds<f64>;
pub type Obstacle = geometry::Obstacle<f64>;
pub type Problem = geometry::Problem<f64>;
pub type Path = geometry::Path<f64>;
pub type PlannerConfig = planner::PlannerConfig<f64>;
pub type PlanResult = planner::PlanResult<f64>;
pub type TraceRecord = planner::TraceRecord<f64>;
pub type GuessState = samplers::GuessState<f64>;

pub type Configuration32 = geometry::Configuration<f32>;
pub type Problem32 = geometry::Problem<f32>;
pub type Path32 = geometry::Path<f32>;
pub type PlannerConfig32 = planner::PlannerConfig<f32>;
