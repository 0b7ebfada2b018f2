use rand::Rng;

use super::sample_unit_ball;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Path, Problem};
use crate::scalar::Real;

/// Draws a point from the tube of radius `radius` around `path`, intersected
/// with the informed set of cost `c_k` and the free space.
///
/// Picks an arc-length fraction `s` uniformly, offsets `path(s)` by a
/// uniform unit-ball draw scaled by `radius`, and rejects candidates outside
/// the bounds, outside the informed set, or in collision. The result is not
/// uniform over the tube: points near the path and inside its corners are
/// favored.
pub fn sample_local<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    path: &Path<T>,
    radius: T,
    problem: &Problem<T>,
    c_k: T,
    max_attempts: usize,
) -> Result<Configuration<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument(format!("local radius must be > 0, got {radius}")));
    }
    for _ in 0..max_attempts {
        let ball = sample_unit_ball::<T, R>(rng, problem.dim());
        let s: f64 = rng.random();
        let mut x = path.interpolate(T::of(s))?.into_vec();
        for (xi, b) in x.iter_mut().zip(ball) {
            *xi += radius * b;
        }
        if problem.in_informed_set(&x, c_k) && !problem.point_in_collision(&x) {
            return Ok(Configuration::from_vec_unchecked(x));
        }
    }
    Err(Error::Starved { attempts: max_attempts })
}
