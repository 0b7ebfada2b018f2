//! Narrow-passage benchmark: a hollow hyper-spherinder between start and
//! goal whose cavity offers a shorter route than going around it.

use crate::error::{Error, Result};
use crate::geometry::{Bounds, Configuration, Obstacle, Problem};
use crate::scalar::Real;

/// Derived geometry of the narrow-passage problem in dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NarrowPassageSpec<T> {
    pub n: usize,
    pub length: T,
    pub outer_radius: T,
    /// Chosen so the cavity holds half the (n-1)-ball volume of the
    /// cylinder cross-section.
    pub cavity_radius: T,
    /// Height of start and goal above the axis, a quarter of the way from
    /// the cavity wall to the outer wall.
    pub offset: T,
    pub start: Vec<T>,
    pub goal: Vec<T>,
}

impl<T: Real> NarrowPassageSpec<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("narrow passage needs n >= 2, got {n}")));
        }
        let length = T::one();
        let outer_radius = T::one();
        let cavity_radius = outer_radius * T::of(2.0).powf(-T::one() / T::of_usize(n - 1));
        let offset = (outer_radius + T::of(3.0) * cavity_radius) / T::of(4.0);
        let mut start = vec![T::zero(); n];
        let mut goal = vec![T::zero(); n];
        start[0] = -T::of(0.6) * length;
        goal[0] = T::of(0.6) * length;
        start[1] = offset;
        goal[1] = offset;
        Ok(Self { n, length, outer_radius, cavity_radius, offset, start, goal })
    }

    /// Edge resolution used for the benchmark problem. Fine enough that
    /// discretized edge checks cannot shave the obstacle corners by more
    /// than a small fraction of the 1% early-stop margin.
    pub fn edge_resolution(&self) -> T {
        T::of(0.01) * self.length
    }

    pub fn problem(&self) -> Result<Problem<T>> {
        Problem::with_options(
            Bounds::cube(self.n, T::of(-5.0), T::of(5.0))?,
            vec![Obstacle::HollowSpherinder {
                length: self.length,
                outer_radius: self.outer_radius,
                cavity_radius: self.cavity_radius,
                axis: 0,
            }],
            Configuration::new(self.start.clone())?,
            Configuration::new(self.goal.clone())?,
            Some(self.edge_resolution()),
            None,
        )
    }

    /// Optimal cost of the route that bends around a wall of radius `r`:
    /// `l + 2 sqrt((0.1 l)^2 + (r - a)^2)`.
    fn route_cost(&self, r: T) -> T {
        let dx = T::of(0.1) * self.length;
        let dy = r - self.offset;
        self.length + T::of(2.0) * (dx * dx + dy * dy).sqrt()
    }

    pub fn minima(&self) -> AnalyticMinima<T> {
        AnalyticMinima {
            through_passage: self.route_cost(self.cavity_radius),
            around: self.route_cost(self.outer_radius),
        }
    }
}

/// The two locally optimal costs of the narrow-passage problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticMinima<T> {
    /// Route hugging the cavity wall.
    pub through_passage: T,
    /// Route hugging the outer wall.
    pub around: T,
}

impl<T: Real> AnalyticMinima<T> {
    /// The smaller candidate; used as the early-stop reference.
    pub fn global(&self) -> T {
        self.through_passage.min(self.around)
    }

    pub fn local(&self) -> T {
        self.through_passage.max(self.around)
    }
}

pub fn make_narrow_passage<T: Real>(n: usize) -> Result<Problem<T>> {
    NarrowPassageSpec::new(n)?.problem()
}

pub fn analytic_minima<T: Real>(n: usize) -> Result<AnalyticMinima<T>> {
    Ok(NarrowPassageSpec::new(n)?.minima())
}
