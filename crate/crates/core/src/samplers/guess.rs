use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which sampler the mixed strategy picked for an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerChoice {
    Local,
    Global,
}

/// Draws `Local` with probability `p`, `Global` otherwise.
pub fn select_strategy<T: Real, R: Rng + ?Sized>(rng: &mut R, p: T) -> SamplerChoice {
    let j: f64 = rng.random();
    if T::of(j) < p {
        SamplerChoice::Local
    } else {
        SamplerChoice::Global
    }
}

/// Tube radius `R0 (c_k - u)`.
pub fn local_radius<T: Real>(r0: T, c_k: T, u: T) -> Result<T> {
    if c_k < u {
        return Err(Error::AdmissibilityViolation { cost: c_k.as_f64(), lower_bound: u.as_f64() });
    }
    Ok(r0 * (c_k - u))
}

/// Running guess `p_k` that the incumbent is not yet locally optimal.
///
/// On improvement `p <- nu p + (1 - nu)(c_prev - c_new)/(c_prev - u)`,
/// otherwise `p <- nu p`; the result is clamped into `(0, p_max]` so the
/// mixed sampler keeps a nonzero share of global samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessState<T> {
    p: T,
    nu: T,
    p_max: T,
    p0: T,
}

impl<T: Real> GuessState<T> {
    pub const DEFAULT_P0: f64 = 0.1;
    pub const DEFAULT_P_MAX: f64 = 0.99;

    pub fn new(p0: T, nu: T, p_max: T) -> Result<Self> {
        if !(nu >= T::zero() && nu < T::one()) {
            return Err(Error::InvalidArgument(format!("forgetting factor must lie in [0, 1), got {nu}")));
        }
        if !(p_max > T::zero() && p_max < T::one()) {
            return Err(Error::InvalidArgument(format!("p_max must lie in (0, 1), got {p_max}")));
        }
        if !(p0 > T::zero() && p0 <= T::one()) {
            return Err(Error::InvalidArgument(format!("p0 must lie in (0, 1], got {p0}")));
        }
        Ok(Self { p: Self::clamp(p0, p_max), nu, p_max, p0 })
    }

    fn clamp(p: T, p_max: T) -> T {
        p.min(p_max).max(T::min_positive_value())
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn p_max(&self) -> T {
        self.p_max
    }

    pub fn p0(&self) -> T {
        self.p0
    }

    /// Unclamped next value of the guess.
    pub fn raw_update(&self, c_prev: T, c_new: T, u: T) -> Result<T> {
        if c_new > c_prev {
            return Err(Error::CostIncreased { previous: c_prev.as_f64(), new: c_new.as_f64() });
        }
        if c_new < c_prev {
            if !(c_prev > u) {
                return Err(Error::AdmissibilityViolation { cost: c_prev.as_f64(), lower_bound: u.as_f64() });
            }
            Ok(self.nu * self.p + (T::one() - self.nu) * (c_prev - c_new) / (c_prev - u))
        } else {
            Ok(self.nu * self.p)
        }
    }

    pub fn update(&self, c_prev: T, c_new: T, u: T) -> Result<Self> {
        let p = self.raw_update(c_prev, c_new, u)?;
        Ok(Self { p: Self::clamp(p, self.p_max), ..*self })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngState;
    use proptest::prelude::*;

    #[test]
    fn improvement_rule() {
        let g = GuessState::<f64>::new(0.5, 0.9, 0.99).unwrap();
        let next = g.update(10.0, 8.0, 5.0).unwrap();
        assert!((next.p() - 0.49).abs() < 1e-12);
    }

    #[test]
    fn decay_rule() {
        let g = GuessState::<f64>::new(0.5, 0.999, 0.99).unwrap();
        let next = g.update(10.0, 10.0, 5.0).unwrap();
        assert!((next.p() - 0.4995).abs() < 1e-12);
    }

    #[test]
    fn cost_increase_is_rejected() {
        let g = GuessState::<f64>::new(0.5, 0.9, 0.99).unwrap();
        assert!(matches!(g.update(8.0, 9.0, 5.0), Err(Error::CostIncreased { .. })));
    }

    #[test]
    fn clamps_at_p_max_when_reaching_lower_bound() {
        let g = GuessState::<f64>::new(0.99, 0.5, 0.99).unwrap();
        // c_new = u gives a raw value of exactly 1
        assert!((g.raw_update(10.0, 5.0, 5.0).unwrap() - 0.995).abs() < 1e-12);
        let g = GuessState::new(0.99, 0.0, 0.99).unwrap();
        assert_eq!(g.raw_update(10.0, 5.0, 5.0).unwrap(), 1.0);
        assert_eq!(g.update(10.0, 5.0, 5.0).unwrap().p(), 0.99);
    }

    #[test]
    fn long_decay_stays_positive() {
        let mut g = GuessState::new(0.1, 0.9, 0.99).unwrap();
        for _ in 0..100_000 {
            g = g.update(3.0, 3.0, 1.0).unwrap();
        }
        assert!(g.p() > 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(GuessState::new(0.1, 1.0, 0.99).is_err());
        assert!(GuessState::new(0.0, 0.9, 0.99).is_err());
        assert!(GuessState::new(0.1, 0.9, 1.0).is_err());
    }

    #[test]
    fn radius_examples() {
        assert!((local_radius::<f64>(0.02, 5.0, 4.0).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(local_radius::<f64>(0.02, 4.0, 4.0).unwrap(), 0.0);
        assert!((local_radius::<f64>(0.02, 1.3202, 1.2).unwrap() - 0.0024).abs() < 1e-4);
        assert!(matches!(local_radius::<f64>(0.02, 3.0, 4.0), Err(Error::AdmissibilityViolation { .. })));
    }

    #[test]
    fn strategy_selection_frequencies() {
        let mut rng = RngState::new(9);
        assert!((0..10_000).all(|_| select_strategy(&mut rng, 0.0) == SamplerChoice::Global));
        let draws = 100_000;
        let local = (0..draws).filter(|_| select_strategy(&mut rng, 0.99) == SamplerChoice::Local).count();
        let frac = local as f64 / draws as f64;
        assert!((frac - 0.99).abs() < 0.005, "{frac}");
    }

    #[test]
    fn strategy_sequence_replays() {
        let seq = |seed| {
            let mut rng = RngState::new(seed);
            (0..200).map(|_| select_strategy(&mut rng, 0.5)).collect::<Vec<_>>()
        };
        assert_eq!(seq(17), seq(17));
    }

    proptest! {
        #[test]
        fn stays_in_open_unit_interval(
            p0 in 0.001f64..=1.0,
            nu in 0.0f64..0.9999,
            steps in proptest::collection::vec(0.0f64..1.0, 1..200),
        ) {
            let u = 1.0;
            let mut c = 10.0;
            let mut g = GuessState::new(p0, nu, 0.99).unwrap();
            for frac in steps {
                let next = c - frac * (c - u) * 0.5;
                let raw = g.raw_update(c, next, u).unwrap();
                prop_assert!(raw > 0.0 && raw <= 1.0);
                g = g.update(c, next, u).unwrap();
                prop_assert!(g.p() > 0.0 && g.p() <= 0.99);
                c = next;
            }
        }

        #[test]
        fn monotone_in_improvement(
            p in 0.01f64..0.99,
            nu in 0.0f64..0.999,
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let (small, large) = if a < b { (a, b) } else { (b, a) };
            let g = GuessState::new(p, nu, 0.99).unwrap();
            let (c_prev, u) = (5.0, 2.0);
            let p_small = g.update(c_prev, c_prev - small * (c_prev - u), u).unwrap().p();
            let p_large = g.update(c_prev, c_prev - large * (c_prev - u), u).unwrap().p();
            prop_assert!(p_large >= p_small);
        }
    }
}
