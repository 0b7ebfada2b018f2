use rand::Rng;

use super::{sample_unit_ball, DEFAULT_REJECTION_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{Bounds, Configuration, Problem};
use crate::scalar::{unit_ball_measure, Real};

/// Frame of the prolate hyperspheroid with foci at start and goal.
///
/// `rotation` is stored row-major; its first column is the unit vector from
/// start to goal, the remaining columns complete an orthonormal basis. Any
/// completion works because the ellipsoid is symmetric about its
/// transverse axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidFrame<T> {
    center: Vec<T>,
    rotation: Vec<T>,
    c_min: T,
    n: usize,
}

impl<T: Real> EllipsoidFrame<T> {
    pub fn new(start: &[T], goal: &[T]) -> Result<Self> {
        let n = start.len();
        if goal.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: goal.len() });
        }
        let axis: Vec<T> = start.iter().zip(goal).map(|(&s, &g)| g - s).collect();
        let c_min = axis.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        if !(c_min > T::zero()) {
            return Err(Error::InvalidArgument("ellipsoid foci coincide".into()));
        }
        let half = T::of(0.5);
        let center = start.iter().zip(goal).map(|(&s, &g)| (s + g) * half).collect();

        let mut columns: Vec<Vec<T>> = vec![axis.iter().map(|&v| v / c_min).collect()];
        // Candidate basis vectors least aligned with the transverse axis first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| columns[0][i].abs().partial_cmp(&columns[0][j].abs()).unwrap());
        for &i in &order {
            if columns.len() == n {
                break;
            }
            let mut v = vec![T::zero(); n];
            v[i] = T::one();
            // Modified Gram-Schmidt, two passes.
            for _ in 0..2 {
                for col in &columns {
                    let dot = v.iter().zip(col).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
                    for (vk, &ck) in v.iter_mut().zip(col) {
                        *vk -= dot * ck;
                    }
                }
            }
            let norm = v.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt();
            if norm > T::of(1e-3) {
                columns.push(v.into_iter().map(|a| a / norm).collect());
            }
        }
        debug_assert_eq!(columns.len(), n);
        let mut rotation = vec![T::zero(); n * n];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                rotation[i * n + j] = v;
            }
        }
        Ok(Self { center, rotation, c_min, n })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn c_min(&self) -> T {
        self.c_min
    }

    /// Rotation entry at row `i`, column `j`.
    pub fn rotation(&self, i: usize, j: usize) -> T {
        self.rotation[i * self.n + j]
    }

    /// Maps a unit-ball point onto the ellipsoid of transverse diameter `c`.
    pub fn transform(&self, ball: &[T], c: T) -> Vec<T> {
        let half = T::of(0.5);
        let transverse = c * half;
        let conjugate = (c * c - self.c_min * self.c_min).max(T::zero()).sqrt() * half;
        let n = self.n;
        let mut out = self.center.clone();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.rotation[i * n..(i + 1) * n];
            let mut acc = row[0] * ball[0] * transverse;
            for j in 1..n {
                acc += row[j] * ball[j] * conjugate;
            }
            *o += acc;
        }
        out
    }
}

/// Volume of the L2-informed hyperellipsoid,
/// `c (c^2 - c_min^2)^((n-1)/2) zeta_n / 2^n`.
pub fn informed_set_measure<T: Real>(c_k: T, c_min: T, n: usize) -> Result<T> {
    if c_k < c_min {
        return Err(Error::InvalidArgument(format!("cost {c_k} is below c_min {c_min}")));
    }
    if c_k.is_infinite() {
        return Ok(T::infinity());
    }
    let conj = (c_k * c_k - c_min * c_min).sqrt();
    Ok(c_k * conj.powi(n as i32 - 1) * unit_ball_measure::<T>(n) / T::of(2.0).powi(n as i32))
}

/// Uniform draw over the bounds (no collision check).
pub fn sample_uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds<T>) -> Configuration<T> {
    let coords = bounds
        .lower()
        .iter()
        .zip(bounds.upper().iter())
        .map(|(&lo, &hi)| {
            let u: f64 = rng.random();
            lo + (hi - lo) * T::of(u)
        })
        .collect();
    Configuration::from_vec_unchecked(coords)
}

/// Rejection sampler over the admissible informed set of a problem.
#[derive(Debug, Clone)]
pub struct InformedSampler<T> {
    frame: EllipsoidFrame<T>,
    max_attempts: usize,
}

impl<T: Real> InformedSampler<T> {
    pub fn new(problem: &Problem<T>) -> Self {
        Self {
            frame: EllipsoidFrame::new(problem.start(), problem.goal()).expect("problem has c_min > 0"),
            max_attempts: DEFAULT_REJECTION_BUDGET,
        }
    }

    pub fn with_budget(mut self, max_attempts: usize) -> Self {
        self.max_attempts = max_attempts.max(1);
        self
    }

    pub fn frame(&self) -> &EllipsoidFrame<T> {
        &self.frame
    }

    /// Draws a collision-free point inside the bounds that satisfies
    /// `|x - start| + |goal - x| < c_k`. With `c_k = inf` the draw is
    /// uniform over the free part of the bounds.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, problem: &Problem<T>, c_k: T) -> Result<Configuration<T>> {
        if c_k <= problem.c_min() {
            return Err(Error::InformedSetEmpty { cost: c_k.as_f64(), c_min: problem.c_min().as_f64() });
        }
        for _ in 0..self.max_attempts {
            if c_k.is_infinite() {
                let x = sample_uniform(rng, problem.bounds());
                if !problem.point_in_collision(&x) {
                    return Ok(x);
                }
                continue;
            }
            let ball = sample_unit_ball::<T, R>(rng, problem.dim());
            let x = self.frame.transform(&ball, c_k);
            if problem.in_informed_set(&x, c_k) && !problem.point_in_collision(&x) {
                return Ok(Configuration::from_vec_unchecked(x));
            }
        }
        Err(Error::Starved { attempts: self.max_attempts })
    }
}

/// One-shot informed sample; builds the ellipsoid frame on every call.
pub fn sample_informed<T: Real, R: Rng + ?Sized>(rng: &mut R, problem: &Problem<T>, c_k: T) -> Result<Configuration<T>> {
    InformedSampler::new(problem).sample(rng, problem, c_k)
}
