//! Random feature maps estimating the Gaussian kernel.
//!
//! With w₁…w_D drawn from N(0, σ²I_d), the feature map
//! φ(x) = √(1/D)·[sin(wᵢ·x)…, cos(wᵢ·x)…] satisfies
//! E[φ(x)·φ(y)] = exp(−‖x−y‖²/2σ²), so inner products of features are
//! unbiased estimates of the kernel. Sampling is driven by an explicit seed
//! and is fully reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::{Error, Result};

/// A seeded draw of D Gaussian projection vectors.
#[derive(Clone, Debug)]
pub struct RandomFeatureMap {
    input_dim: usize,
    feature_pairs: usize,
    sigma: f64,
    projections: Vec<Vec<f64>>,
    pub seed: u64,
}

impl RandomFeatureMap {
    /// `sigma` is the standard deviation of each projection coordinate, so
    /// the estimated kernel is exp(−‖x−y‖²/2σ²).
    pub fn new(input_dim: usize, feature_pairs: usize, sigma: f64, seed: u64) -> Result<Self> {
        if feature_pairs == 0 {
            return Err(Error::invalid("feature map", "D must be at least 1"));
        }
        if !(sigma > 0.0) {
            return Err(Error::invalid("feature map", "sigma must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
        let projections = (0..feature_pairs)
            .map(|_| (0..input_dim).map(|_| normal.sample(&mut rng)).collect())
            .collect();
        Ok(RandomFeatureMap {
            input_dim,
            feature_pairs,
            sigma,
            projections,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn feature_pairs(&self) -> usize {
        self.feature_pairs
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// φ(x): D sine features then D cosine features, scaled by √(1/D).
    pub fn phi(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let scale = (1.0 / self.feature_pairs as f64).sqrt();
        let mut out = Vec::with_capacity(2 * self.feature_pairs);
        let dots: Vec<f64> = self
            .projections
            .iter()
            .map(|w| w.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        out.extend(dots.iter().map(|z| scale * z.sin()));
        out.extend(dots.iter().map(|z| scale * z.cos()));
        Ok(out)
    }

    /// φ(x)·φ(y), the randomized kernel estimate.
    pub fn kernel_estimate(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let fx = self.phi(x)?;
        let fy = self.phi(y)?;
        Ok(fx.iter().zip(&fy).map(|(a, b)| a * b).sum())
    }
}

/// The closed-form Gaussian kernel exp(−‖x−y‖²/2σ²).
pub fn kernel_exact(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let dist_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-dist_sq / (2.0 * sigma * sigma)).exp())
}

/// Seeded unit-scale test pairs: coordinates uniform in [−1, 1].
pub fn sample_pairs(input_dim: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = Uniform::new_inclusive(-1.0f64, 1.0);
    (0..count)
        .map(|_| {
            let x = (0..input_dim).map(|_| uniform.sample(&mut rng)).collect();
            let y = (0..input_dim).map(|_| uniform.sample(&mut rng)).collect();
            (x, y)
        })
        .collect()
}

/// Summary for the estimator check: mean and max absolute deviation of the
/// estimate from the exact kernel over seeded pairs. The map is seeded with
/// `seed`, the pairs with `seed + 1`.
#[derive(Clone, Copy, Debug)]
pub struct EstimatorReport {
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
}

pub fn estimator_report(
    input_dim: usize,
    feature_pairs: usize,
    sigma: f64,
    pair_count: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    let map = RandomFeatureMap::new(input_dim, feature_pairs, sigma, seed)?;
    let pairs = sample_pairs(input_dim, pair_count, seed.wrapping_add(1));
    let mut total = 0.0;
    let mut worst = 0.0f64;
    for (x, y) in &pairs {
        let err = (map.kernel_estimate(x, y)? - kernel_exact(x, y, sigma)?).abs();
        total += err;
        if err > worst {
            worst = err;
        }
    }
    Ok(EstimatorReport {
        mean_abs_error: total / pair_count as f64,
        max_abs_error: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_has_unit_norm() {
        let map = RandomFeatureMap::new(4, 64, 1.0, 3).unwrap();
        for (x, _) in sample_pairs(4, 10, 4) {
            let f = map.phi(&x).unwrap();
            let norm_sq: f64 = f.iter().map(|v| v * v).sum();
            assert!((norm_sq - 1.0).abs() <= 1e-12, "‖φ‖² = {norm_sq}");
        }
    }

    #[test]
    fn phi_at_zero() {
        let big_d = 16;
        let map = RandomFeatureMap::new(3, big_d, 1.0, 5).unwrap();
        let f = map.phi(&[0.0, 0.0, 0.0]).unwrap();
        let scale = (1.0 / big_d as f64).sqrt();
        for (i, v) in f.iter().enumerate() {
            if i < big_d {
                assert_eq!(*v, 0.0, "sin terms vanish");
            } else {
                assert_eq!(*v, scale, "cos terms are √(1/D)");
            }
        }
    }

    #[test]
    fn dimension_mismatches_error() {
        let map = RandomFeatureMap::new(4, 8, 1.0, 1).unwrap();
        assert!(matches!(
            map.phi(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 4, found: 2 })
        ));
        assert!(kernel_exact(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn estimate_is_symmetric_and_exact_on_equal_inputs() {
        let map = RandomFeatureMap::new(4, 32, 1.0, 9).unwrap();
        for (x, y) in sample_pairs(4, 10, 10) {
            assert_eq!(
                map.kernel_estimate(&x, &y).unwrap(),
                map.kernel_estimate(&y, &x).unwrap()
            );
            let self_est = map.kernel_estimate(&x, &x).unwrap();
            assert!((self_est - 1.0).abs() <= 1e-12);
            assert_eq!(kernel_exact(&x, &x, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn map_is_seed_deterministic() {
        let a = RandomFeatureMap::new(4, 16, 1.0, 77).unwrap();
        let b = RandomFeatureMap::new(4, 16, 1.0, 77).unwrap();
        let (x, y) = &sample_pairs(4, 1, 78)[0];
        assert_eq!(
            a.kernel_estimate(x, y).unwrap(),
            b.kernel_estimate(x, y).unwrap()
        );
    }

    #[test]
    fn monte_carlo_error_is_small() {
        let report = estimator_report(4, 2048, 1.0, 30, 7).unwrap();
        assert!(
            report.mean_abs_error <= 0.05,
            "mean error {}",
            report.mean_abs_error
        );
    }

    #[test]
    fn error_shrinks_with_more_features() {
        let coarse = estimator_report(4, 256, 1.0, 50, 7).unwrap();
        let fine = estimator_report(4, 4096, 1.0, 50, 7).unwrap();
        assert!(
            fine.mean_abs_error <= coarse.mean_abs_error,
            "{} vs {}",
            fine.mean_abs_error,
            coarse.mean_abs_error
        );
    }

    #[test]
    fn averaging_over_maps_approaches_exact() {
        // Unbiasedness: the mean estimate over independent maps converges.
        let pairs = sample_pairs(4, 10, 20);
        let maps: Vec<_> = (0..50)
            .map(|i| RandomFeatureMap::new(4, 64, 1.0, 100 + i).unwrap())
            .collect();
        let mut worst: f64 = 0.0;
        for (x, y) in &pairs {
            let mean: f64 = maps
                .iter()
                .map(|m| m.kernel_estimate(x, y).unwrap())
                .sum::<f64>()
                / maps.len() as f64;
            let exact = kernel_exact(x, y, 1.0).unwrap();
            worst = worst.max((mean - exact).abs());
        }
        assert!(worst <= 0.05, "worst deviation {worst}");
    }

    #[test]
    fn translation_shifts_leave_estimates_stable() {
        let map = RandomFeatureMap::new(4, 4096, 1.0, 13).unwrap();
        let (x, y) = &sample_pairs(4, 1, 14)[0];
        let t = [0.3, -0.7, 1.1, 0.05];
        let shifted_x: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
        let shifted_y: Vec<f64> = y.iter().zip(&t).map(|(a, b)| a + b).collect();
        let base = map.kernel_estimate(x, y).unwrap();
        let shifted = map.kernel_estimate(&shifted_x, &shifted_y).unwrap();
        assert!(
            (base - shifted).abs() <= 0.1,
            "Monte Carlo translation drift {base} vs {shifted}"
        );
    }
}
