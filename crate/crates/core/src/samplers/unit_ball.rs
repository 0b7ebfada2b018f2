use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

/// Uniform draw from the unit `n`-ball: a normalized Gaussian direction
/// scaled by `r^(1/n)` with `r` uniform on `[0, 1)`.
pub fn sample_unit_ball<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    assert!(n >= 1, "unit ball dimension must be >= 1");
    let mut w = vec![0.0f64; n];
    let norm = loop {
        for v in w.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            break norm;
        }
    };
    let r: f64 = rng.random();
    let scale = r.powf(1.0 / n as f64) / norm;
    w.into_iter().map(|v| T::of(v * scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngState;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn draws_lie_in_ball() {
        let mut rng = RngState::new(1);
        for n in [1, 2, 3, 7, 12] {
            for _ in 0..2000 {
                assert!(norm(&sample_unit_ball::<f64, _>(&mut rng, n)) <= 1.0);
            }
        }
    }

    #[test]
    fn radial_cdf_half_radius_2d() {
        let mut rng = RngState::new(2);
        let draws = 100_000;
        let inside = (0..draws).filter(|_| norm(&sample_unit_ball::<f64, _>(&mut rng, 2)) <= 0.5).count();
        let frac = inside as f64 / draws as f64;
        assert!((frac - 0.25).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn mean_is_zero_7d() {
        let mut rng = RngState::new(3);
        let draws = 100_000;
        let mut mean = [0.0f64; 7];
        for _ in 0..draws {
            for (m, v) in mean.iter_mut().zip(sample_unit_ball::<f64, _>(&mut rng, 7)) {
                *m += v;
            }
        }
        for m in mean {
            assert!((m / draws as f64).abs() < 0.02);
        }
    }

    #[test]
    fn f32_draws_lie_in_ball() {
        let mut rng = RngState::new(4);
        for _ in 0..1000 {
            let v: Vec<f32> = sample_unit_ball(&mut rng, 3);
            assert!(v.iter().map(|x| x * x).sum::<f32>() <= 1.0 + 1e-6);
        }
    }

    /// One-sample Kolmogorov-Smirnov test of the radii against `F(r) = r^n`.
    #[test]
    fn radial_distribution_goodness_of_fit() {
        for (n, seed) in [(2usize, 10u64), (4, 11), (7, 12)] {
            let mut rng = RngState::new(seed);
            let m = 20_000;
            let mut radii: Vec<f64> = (0..m).map(|_| norm(&sample_unit_ball::<f64, _>(&mut rng, n))).collect();
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let d = radii
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let f = r.powi(n as i32);
                    (f - i as f64 / m as f64).abs().max(((i + 1) as f64 / m as f64 - f).abs())
                })
                .fold(0.0, f64::max);
            // asymptotic critical value at alpha = 0.01
            let critical = 1.628 / (m as f64).sqrt();
            assert!(d < critical, "n={n}: D={d} >= {critical}");
        }
    }
}
