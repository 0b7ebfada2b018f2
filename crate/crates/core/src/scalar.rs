//! Scalar abstraction shared by every geometric and sampling routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    /// Lossy conversion to `f64` (for reporting and serialization).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    /// Conversion from a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Lebesgue measure of the unit `n`-ball, `pi^(n/2) / Gamma(n/2 + 1)`.
///
/// Uses the recurrence `V_n = V_{n-2} * 2 pi / n`, which is exact for the
/// half-integer gamma values involved.
pub fn unit_ball_measure<T: Real>(n: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let mut v = if n % 2 == 0 { T::one() } else { T::of(2.0) };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v = v * two_pi / T::of_usize(k);
        k += 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ball_known_values() {
        assert_relative_eq!(unit_ball_measure::<f64>(1), 2.0);
        assert_relative_eq!(unit_ball_measure::<f64>(2), std::f64::consts::PI);
        assert_relative_eq!(unit_ball_measure::<f64>(3), 4.0 / 3.0 * std::f64::consts::PI, epsilon = 1e-12);
        // pi^2 / 2
        assert_relative_eq!(unit_ball_measure::<f64>(4), std::f64::consts::PI.powi(2) / 2.0, epsilon = 1e-12);
        // 16 pi^3 / 105
        assert_relative_eq!(unit_ball_measure::<f64>(7), 16.0 * std::f64::consts::PI.powi(3) / 105.0, epsilon = 1e-12);
    }

    #[test]
    fn f32_matches_f64() {
        for n in 1..10 {
            let a = unit_ball_measure::<f32>(n) as f64;
            let b = unit_ball_measure::<f64>(n);
            assert!((a - b).abs() < 1e-5 * b);
        }
    }
}
