//! JSON problem files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "bounds": { "lower": [-5, -5], "upper": [5, 5] },
//!   "obstacles": [
//!     { "type": "box", "min": [0, 0], "max": [1, 1] },
//!     { "type": "sphere", "center": [2, 2], "radius": 0.5 },
//!     { "type": "hollow_spherinder", "length": 1, "outer_radius": 1, "cavity_radius": 0.5, "axis": 0 }
//!   ],
//!   "start": [-0.6, 0.625],
//!   "goal": [0.6, 0.625],
//!   "edge_resolution": 0.01,
//!   "lower_bound_u": 1.2
//! }
//! ```
//!
//! `edge_resolution` and `lower_bound_u` are optional; `axis` defaults to 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Bounds, Configuration, Obstacle, Path, Problem};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObstacleSpec {
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    HollowSpherinder {
        length: f64,
        outer_radius: f64,
        cavity_radius: f64,
        #[serde(default)]
        axis: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub bounds: BoundsSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound_u: Option<f64>,
}

fn config<T: Real>(name: &str, v: &[f64], n: usize, errs: &mut Vec<String>) -> Option<Configuration<T>> {
    if v.len() != n {
        errs.push(format!("{name}: expected {n} coordinates, got {}", v.len()));
        return None;
    }
    match Configuration::from_f64(v) {
        Ok(c) => Some(c),
        Err(_) => {
            errs.push(format!("{name}: coordinates must be finite"));
            None
        }
    }
}

impl ProblemFile {
    /// Parses JSON; syntax and type errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    /// Builds the problem, collecting every violated invariant.
    pub fn to_problem<T: Real>(&self) -> Result<Problem<T>> {
        let n = self.dimension;
        let mut errs = Vec::new();
        if n < 2 {
            errs.push(format!("dimension: must be >= 2, got {n}"));
        }
        let lower = config::<T>("bounds.lower", &self.bounds.lower, n, &mut errs);
        let upper = config::<T>("bounds.upper", &self.bounds.upper, n, &mut errs);
        let bounds = match (lower, upper) {
            (Some(l), Some(u)) => match Bounds::new(l, u) {
                Ok(b) => Some(b),
                Err(e) => {
                    errs.push(e.to_string());
                    None
                }
            },
            _ => None,
        };
        let mut obstacles = Vec::new();
        for (i, o) in self.obstacles.iter().enumerate() {
            let name = format!("obstacles[{i}]");
            let built = match o {
                ObstacleSpec::Box { min, max } => {
                    let lo = config::<T>(&format!("{name}.min"), min, n, &mut errs);
                    let hi = config::<T>(&format!("{name}.max"), max, n, &mut errs);
                    lo.zip(hi).map(|(min, max)| Obstacle::AxisAlignedBox { min, max })
                }
                ObstacleSpec::Sphere { center, radius } => config::<T>(&format!("{name}.center"), center, n, &mut errs)
                    .map(|center| Obstacle::HyperSphere { center, radius: T::of(*radius) }),
                ObstacleSpec::HollowSpherinder { length, outer_radius, cavity_radius, axis } => {
                    Some(Obstacle::HollowSpherinder {
                        length: T::of(*length),
                        outer_radius: T::of(*outer_radius),
                        cavity_radius: T::of(*cavity_radius),
                        axis: *axis,
                    })
                }
            };
            if let Some(o) = built {
                if let Err(e) = o.validate(n) {
                    errs.push(format!("{name}: {e}"));
                }
                obstacles.push(o);
            }
        }
        let start = config::<T>("start", &self.start, n, &mut errs);
        let goal = config::<T>("goal", &self.goal, n, &mut errs);
        if let Some(r) = self.edge_resolution {
            if !(r > 0.0) || !r.is_finite() {
                errs.push("edge_resolution: must be > 0".into());
            }
        }
        if let Some(u) = self.lower_bound_u {
            if !(u >= 0.0) || !u.is_finite() {
                errs.push("lower_bound_u: must be finite and >= 0".into());
            }
        }
        match (bounds, start, goal) {
            (Some(bounds), Some(start), Some(goal)) if errs.is_empty() => Problem::with_options(
                bounds,
                obstacles,
                start,
                goal,
                self.edge_resolution.map(T::of),
                self.lower_bound_u.map(T::of),
            ),
            (Some(bounds), Some(start), Some(goal)) => {
                // Report geometric violations alongside the structural ones.
                if let Err(Error::InvalidProblem(more)) = Problem::with_options(
                    bounds,
                    obstacles.into_iter().filter(|o| o.validate(n).is_ok()).collect(),
                    start,
                    goal,
                    None,
                    None,
                ) {
                    errs.extend(more);
                }
                Err(Error::InvalidProblem(errs))
            }
            _ => Err(Error::InvalidProblem(errs)),
        }
    }

    pub fn from_problem<T: Real>(p: &Problem<T>) -> Self {
        let obstacles = p
            .obstacles()
            .iter()
            .map(|o| match o {
                Obstacle::AxisAlignedBox { min, max } => ObstacleSpec::Box { min: min.to_f64(), max: max.to_f64() },
                Obstacle::HyperSphere { center, radius } => {
                    ObstacleSpec::Sphere { center: center.to_f64(), radius: radius.as_f64() }
                }
                Obstacle::HollowSpherinder { length, outer_radius, cavity_radius, axis } => {
                    ObstacleSpec::HollowSpherinder {
                        length: length.as_f64(),
                        outer_radius: outer_radius.as_f64(),
                        cavity_radius: cavity_radius.as_f64(),
                        axis: *axis,
                    }
                }
            })
            .collect();
        Self {
            dimension: p.dim(),
            bounds: BoundsSpec { lower: p.bounds().lower().to_f64(), upper: p.bounds().upper().to_f64() },
            obstacles,
            start: p.start().to_f64(),
            goal: p.goal().to_f64(),
            edge_resolution: Some(p.edge_resolution().as_f64()),
            lower_bound_u: Some(p.lower_bound().as_f64()),
        }
    }
}

/// Solution output: `{"cost": c, "waypoints": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: Option<f64>,
    pub waypoints: Vec<Vec<f64>>,
}

impl SolutionFile {
    pub fn from_path<T: Real>(path: Option<&Path<T>>) -> Self {
        match path {
            Some(p) => Self {
                cost: Some(p.cost().as_f64()),
                waypoints: p.waypoints().iter().map(|w| w.to_f64()).collect(),
            },
            None => Self { cost: None, waypoints: Vec::new() },
        }
    }
}
