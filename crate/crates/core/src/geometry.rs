//! Configuration-space geometry: points, bounds, obstacles, collision
//! checking and polyline paths.

use std::ops::{Deref, Index};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point in the n-dimensional search space.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T>(Vec<T>);

impl<T: Real> Configuration<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("configuration has non-finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    /// Builds a configuration without the finiteness check. Callers promise
    /// the coordinates are finite.
    pub(crate) fn from_vec_unchecked(coords: Vec<T>) -> Self {
        Self(coords)
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| T::of(c)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.as_f64()).collect()
    }

    /// Point on the segment from `self` to `other` at parameter `t`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a + (b - a) * t).collect())
    }
}

impl<T> Deref for Configuration<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> Index<usize> for Configuration<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[inline]
pub(crate) fn distance_sq<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[inline]
pub(crate) fn slice_distance<T: Real>(a: &[T], b: &[T]) -> T {
    distance_sq(a, b).sqrt()
}

/// Euclidean distance between two configurations.
pub fn distance<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(slice_distance(a, b))
}

/// Axis-aligned box `lower <= x <= upper` bounding the search space.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    lower: Configuration<T>,
    upper: Configuration<T>,
}

impl<T: Real> Bounds<T> {
    pub fn new(lower: Configuration<T>, upper: Configuration<T>) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch { expected: lower.dim(), got: upper.dim() });
        }
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] >= upper[i]) {
            return Err(Error::InvalidArgument(format!("bounds: lower[{i}] must be < upper[{i}]")));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(Configuration::new(vec![lo; n])?, Configuration::new(vec![hi; n])?)
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Configuration<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Configuration<T> {
        &self.upper
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(self.upper.iter())).all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Length of the main diagonal.
    pub fn diameter(&self) -> T {
        slice_distance(&self.lower, &self.upper)
    }

    /// Lebesgue measure (volume) of the box.
    pub fn measure(&self) -> T {
        self.lower.iter().zip(self.upper.iter()).fold(T::one(), |acc, (&lo, &hi)| acc * (hi - lo))
    }
}

/// A closed obstacle region.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle<T> {
    AxisAlignedBox { min: Configuration<T>, max: Configuration<T> },
    HyperSphere { center: Configuration<T>, radius: T },
    /// Cylinder of length `length` along `axis`, centered at the origin,
    /// whose cross-section is the annulus between `cavity_radius` and
    /// `outer_radius`. The cavity forms a passage through the obstacle.
    HollowSpherinder { length: T, outer_radius: T, cavity_radius: T, axis: usize },
}

impl<T: Real> Obstacle<T> {
    /// Checks the obstacle's own invariants against a space of dimension `n`.
    pub fn validate(&self, n: usize) -> std::result::Result<(), String> {
        match self {
            Obstacle::AxisAlignedBox { min, max } => {
                if min.dim() != n || max.dim() != n {
                    return Err(format!("box dimension must be {n}"));
                }
                if (0..n).any(|i| min[i] >= max[i]) {
                    return Err("box min must be < max componentwise".into());
                }
            }
            Obstacle::HyperSphere { center, radius } => {
                if center.dim() != n {
                    return Err(format!("sphere center dimension must be {n}"));
                }
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err("sphere radius must be > 0".into());
                }
            }
            Obstacle::HollowSpherinder { length, outer_radius, cavity_radius, axis } => {
                if *axis >= n {
                    return Err(format!("spherinder axis {axis} out of range for dimension {n}"));
                }
                if n < 2 {
                    return Err("spherinder needs dimension >= 2".into());
                }
                if !(*length > T::zero()) || !length.is_finite() {
                    return Err("spherinder length must be > 0".into());
                }
                if !(*cavity_radius > T::zero() && cavity_radius < outer_radius) || !outer_radius.is_finite() {
                    return Err("spherinder radii must satisfy 0 < cavity_radius < outer_radius".into());
                }
            }
        }
        Ok(())
    }

    /// Containment predicate (closed set).
    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            Obstacle::AxisAlignedBox { min, max } => {
                x.iter().zip(min.iter().zip(max.iter())).all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
            }
            Obstacle::HyperSphere { center, radius } => distance_sq(x, center) <= *radius * *radius,
            Obstacle::HollowSpherinder { length, outer_radius, cavity_radius, axis } => {
                if x[*axis].abs() > *length / T::of(2.0) {
                    return false;
                }
                let radial_sq = x
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i != axis)
                    .fold(T::zero(), |acc, (_, &v)| acc + v * v);
                radial_sq >= *cavity_radius * *cavity_radius && radial_sq <= *outer_radius * *outer_radius
            }
        }
    }
}

/// A single-query path planning problem with path-length cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    bounds: Bounds<T>,
    obstacles: Vec<Obstacle<T>>,
    start: Configuration<T>,
    goal: Configuration<T>,
    edge_resolution: T,
    lower_bound: T,
    c_min: T,
}

impl<T: Real> Problem<T> {
    /// Builds a problem with default edge resolution (0.005 x bounds
    /// diameter) and lower bound `u = c_min`.
    pub fn new(
        bounds: Bounds<T>,
        obstacles: Vec<Obstacle<T>>,
        start: Configuration<T>,
        goal: Configuration<T>,
    ) -> Result<Self> {
        Self::with_options(bounds, obstacles, start, goal, None, None)
    }

    pub fn with_options(
        bounds: Bounds<T>,
        obstacles: Vec<Obstacle<T>>,
        start: Configuration<T>,
        goal: Configuration<T>,
        edge_resolution: Option<T>,
        lower_bound: Option<T>,
    ) -> Result<Self> {
        let n = bounds.dim();
        let mut violations = Vec::new();
        if n < 2 {
            violations.push(format!("dimension must be >= 2, got {n}"));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if let Err(e) = o.validate(n) {
                violations.push(format!("obstacle {i}: {e}"));
            }
        }
        for (name, x) in [("start", &start), ("goal", &goal)] {
            if x.dim() != n {
                violations.push(format!("{name} has dimension {}, expected {n}", x.dim()));
            } else if !bounds.contains(x) {
                violations.push(format!("{name} is outside the bounds"));
            } else if let Some(i) = obstacles.iter().position(|o| o.contains(x)) {
                violations.push(format!("{name} is in collision with obstacle {i}"));
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidProblem(violations));
        }

        let c_min = slice_distance(&start, &goal);
        if !(c_min > T::zero()) {
            violations.push("start and goal coincide (c_min must be > 0)".to_string());
        }
        let edge_resolution = edge_resolution.unwrap_or_else(|| T::of(0.005) * bounds.diameter());
        if !(edge_resolution > T::zero()) || !edge_resolution.is_finite() {
            violations.push("edge_resolution must be > 0".to_string());
        }
        let lower_bound = lower_bound.unwrap_or(c_min);
        if !lower_bound.is_finite() || lower_bound < T::zero() {
            violations.push("lower_bound_u must be finite and >= 0".to_string());
        }
        let problem = Self { bounds, obstacles, start, goal, edge_resolution, lower_bound, c_min };
        // The straight line is the optimum whenever it is free, so `u` above
        // c_min is then provably inadmissible.
        if violations.is_empty() && lower_bound > c_min && !problem.edge_in_collision(&problem.start, &problem.goal) {
            violations.push(format!(
                "lower_bound_u {} exceeds the achievable straight-line cost {}",
                lower_bound, c_min
            ));
        }
        if !violations.is_empty() {
            return Err(Error::InvalidProblem(violations));
        }
        Ok(problem)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds<T> {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Obstacle<T>] {
        &self.obstacles
    }

    pub fn start(&self) -> &Configuration<T> {
        &self.start
    }

    pub fn goal(&self) -> &Configuration<T> {
        &self.goal
    }

    pub fn edge_resolution(&self) -> T {
        self.edge_resolution
    }

    /// Admissible estimate `u` of the optimal cost.
    pub fn lower_bound(&self) -> T {
        self.lower_bound
    }

    /// Straight-line start-goal distance.
    pub fn c_min(&self) -> T {
        self.c_min
    }

    /// True iff `x` lies in an obstacle or outside the bounds.
    pub fn point_in_collision(&self, x: &[T]) -> bool {
        !self.bounds.contains(x) || self.obstacles.iter().any(|o| o.contains(x))
    }

    /// Discretized segment check. Samples the segment at `2^k + 1` evenly
    /// spaced points (both endpoints included) with spacing at most the
    /// edge resolution. Dyadic spacing makes refinement monotone, and the
    /// endpoints are canonically ordered so the result is symmetric.
    pub fn edge_in_collision(&self, a: &[T], b: &[T]) -> bool {
        self.edge_in_collision_at(a, b, self.edge_resolution)
    }

    pub fn edge_in_collision_at(&self, a: &[T], b: &[T], resolution: T) -> bool {
        let (a, b) = if lexicographic_le(a, b) { (a, b) } else { (b, a) };
        if self.point_in_collision(a) || self.point_in_collision(b) {
            return true;
        }
        let len = slice_distance(a, b);
        let mut steps: u64 = 1;
        while T::of_usize(steps as usize) * resolution < len {
            steps *= 2;
        }
        let inv = T::one() / T::of_usize(steps as usize);
        let mut buf = vec![T::zero(); a.len()];
        for i in 1..steps {
            let t = T::of_usize(i as usize) * inv;
            for (k, v) in buf.iter_mut().enumerate() {
                *v = a[k] + (b[k] - a[k]) * t;
            }
            if self.point_in_collision(&buf) {
                return true;
            }
        }
        false
    }

    /// True iff `x` lies strictly inside the L2-informed ellipsoid of cost `c`.
    pub fn in_informed_set(&self, x: &[T], c: T) -> bool {
        slice_distance(x, &self.start) + slice_distance(&self.goal, x) < c
    }
}

fn lexicographic_le<T: Real>(a: &[T], b: &[T]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    true
}

/// Ordered polyline with cached segment lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    waypoints: Vec<Configuration<T>>,
    segment_lengths: Vec<T>,
    cumulative: Vec<T>,
    total_cost: T,
}

impl<T: Real> Path<T> {
    pub fn new(waypoints: Vec<Configuration<T>>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a path needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        let n = waypoints[0].dim();
        if let Some(w) = waypoints.iter().find(|w| w.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
        }
        let segment_lengths: Vec<T> = waypoints.windows(2).map(|w| slice_distance(&w[0], &w[1])).collect();
        let mut cumulative = Vec::with_capacity(waypoints.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for &l in &segment_lengths {
            acc += l;
            cumulative.push(acc);
        }
        Ok(Self { waypoints, segment_lengths, cumulative, total_cost: acc })
    }

    pub fn waypoints(&self) -> &[Configuration<T>] {
        &self.waypoints
    }

    pub fn segment_lengths(&self) -> &[T] {
        &self.segment_lengths
    }

    pub fn cost(&self) -> T {
        self.total_cost
    }

    /// Point at arc-length fraction `s` in `[0, 1]`.
    pub fn interpolate(&self, s: T) -> Result<Configuration<T>> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidArgument(format!("path parameter {s} outside [0, 1]")));
        }
        Ok(self.point_at_length(s * self.total_cost))
    }

    fn point_at_length(&self, target: T) -> Configuration<T> {
        if target <= T::zero() || self.total_cost <= T::zero() {
            return self.waypoints[0].clone();
        }
        if target >= self.total_cost {
            return self.waypoints[self.waypoints.len() - 1].clone();
        }
        // Last segment whose start lies at or before `target`.
        let seg = self.cumulative.partition_point(|&c| c <= target).saturating_sub(1);
        let seg = seg.min(self.segment_lengths.len() - 1);
        let len = self.segment_lengths[seg];
        let t = if len > T::zero() { (target - self.cumulative[seg]) / len } else { T::zero() };
        self.waypoints[seg].lerp(&self.waypoints[seg + 1], t.min(T::one()))
    }

    /// Splits at arc-length fraction `s` into a prefix and a suffix that
    /// share the interpolated point.
    pub fn split(&self, s: T) -> Result<(Path<T>, Path<T>)> {
        let mid = self.interpolate(s)?;
        let target = s * self.total_cost;
        let seg = self.cumulative.partition_point(|&c| c <= target).saturating_sub(1);
        let seg = seg.min(self.segment_lengths.len() - 1);
        let mut prefix: Vec<_> = self.waypoints[..=seg].to_vec();
        prefix.push(mid.clone());
        let mut suffix = vec![mid];
        suffix.extend_from_slice(&self.waypoints[seg + 1..]);
        Ok((Path::new(prefix)?, Path::new(suffix)?))
    }

    /// Exact Euclidean distance from `x` to the polyline.
    pub fn distance_to(&self, x: &[T]) -> T {
        self.waypoints
            .windows(2)
            .map(|w| point_segment_distance(x, &w[0], &w[1]))
            .fold(T::infinity(), T::min)
    }
}

/// Total length of a path.
pub fn path_cost<T: Real>(path: &Path<T>) -> T {
    path.cost()
}

/// Point at arc-length fraction `s` along `path`.
pub fn interpolate_path<T: Real>(path: &Path<T>, s: T) -> Result<Configuration<T>> {
    path.interpolate(s)
}

pub(crate) fn point_segment_distance<T: Real>(x: &[T], a: &[T], b: &[T]) -> T {
    let ab_sq = distance_sq(a, b);
    if ab_sq <= T::zero() {
        return slice_distance(x, a);
    }
    let dot = x.iter().zip(a).zip(b).fold(T::zero(), |acc, ((&xi, &ai), &bi)| acc + (xi - ai) * (bi - ai));
    let t = (dot / ab_sq).max(T::zero()).min(T::one());
    x.iter()
        .zip(a)
        .zip(b)
        .fold(T::zero(), |acc, ((&xi, &ai), &bi)| {
            let d = xi - (ai + (bi - ai) * t);
            acc + d * d
        })
        .sqrt()
}
