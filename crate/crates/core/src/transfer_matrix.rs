//! Transfer matrices of the unitary walk and their Lyapunov exponent.
//!
//! For an eigenvector of `U_HN(0)` with eigenvalue `e^{iθ}`, `T_x` maps
//! `(ψ_{x,L}, ψ_{x+1,R})` to `(ψ_{x-1,L}, ψ_{x,R})`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::numerics::{mix_seed, SeededRng};
use crate::quantum_walk::{CoinEnsemble, CoinParams, MIN_COS_THETA};
use crate::scalar::Scalar;

pub const TRANSIENT_STEPS: usize = 1000;
pub const MIN_STEPS: usize = 1000;
pub const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn determinant(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// Transfer matrix of one coin at quasi-energy `theta`.
pub fn transfer_at<T: Scalar>(p: &CoinParams<T>, theta: T) -> Result<TransferMatrix<T>> {
    let (s, c) = p.theta_mix.sin_cos();
    if c.abs() < T::lit(MIN_COS_THETA) {
        return Err(ModelError::SingularCoin {
            cos_theta: c.as_f64(),
        });
    }
    let inv_c = c.recip();
    let tan = s / c;
    let e = |phase: T, r: T| Complex::from_polar(r, phase);
    Ok(TransferMatrix {
        m: [
            [
                e(-theta + p.phi + p.alpha, inv_c),
                -e(p.alpha + p.beta, tan),
            ],
            [
                -e(p.alpha - p.beta, tan),
                e(theta - p.phi + p.alpha, inv_c),
            ],
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovResult<T> {
    pub theta: T,
    /// Clamped to be nonnegative.
    pub kappa: T,
    pub stderr: T,
    pub steps: usize,
    /// Set when the raw estimate was not positive.
    pub flagged: bool,
}

/// Largest Lyapunov exponent of `T_N ⋯ T_1` with coins drawn from `ensemble`.
///
/// The first [`TRANSIENT_STEPS`] products are discarded. The error is the standard error of
/// [`BATCHES`] equal block means.
pub fn lyapunov<T: Scalar>(
    ensemble: &CoinEnsemble<T>,
    theta: T,
    steps: usize,
    seed: u64,
) -> Result<LyapunovResult<T>> {
    if steps < MIN_STEPS {
        return Err(ModelError::InvalidParameter {
            name: "N",
            reason: format!("need at least {MIN_STEPS} steps, got {steps}"),
        });
    }
    if !theta.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "theta",
            reason: "must be finite".into(),
        });
    }
    let mut rng = SeededRng::new(seed);
    let a = T::lit(std::f64::consts::FRAC_PI_2 * rng.unit());
    let b = T::lit(2.0 * std::f64::consts::PI * rng.unit());
    let mut v = [
        Complex::new(a.cos(), T::zero()),
        Complex::from_polar(a.sin(), b),
    ];

    let step = |v: &mut [Complex<T>; 2], rng: &mut SeededRng| -> Result<T> {
        let coin = ensemble.sample(rng);
        let w = transfer_at(&coin, theta)?.apply(*v);
        let norm = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        *v = [w[0] / norm, w[1] / norm];
        Ok(norm.ln())
    };

    for _ in 0..TRANSIENT_STEPS {
        step(&mut v, &mut rng)?;
    }

    let block = steps / BATCHES;
    let mut block_sums = [0.0f64; BATCHES];
    let mut total = 0.0f64;
    for i in 0..steps {
        let ln = step(&mut v, &mut rng)?.as_f64();
        total += ln;
        if i < block * BATCHES {
            block_sums[i / block] += ln;
        }
    }

    let raw = total / steps as f64;
    let means: Vec<f64> = block_sums.iter().map(|s| s / block as f64).collect();
    let mean = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let stderr = (var / BATCHES as f64).sqrt();

    Ok(LyapunovResult {
        theta,
        kappa: T::lit(raw.max(0.0)),
        stderr: T::lit(stderr),
        steps,
        flagged: !(raw > 0.0),
    })
}

/// Runs [`lyapunov`] at every grid point in parallel.
///
/// The grid is sorted first; point `i` of the sorted grid uses seed `mix_seed(seed, i)`.
pub fn kappa_curve<T: Scalar>(
    ensemble: &CoinEnsemble<T>,
    theta_grid: &[T],
    steps: usize,
    seed: u64,
) -> Result<Vec<LyapunovResult<T>>> {
    if theta_grid.is_empty() {
        return Err(ModelError::InvalidParameter {
            name: "theta_grid",
            reason: "empty grid".into(),
        });
    }
    if let Some(bad) = theta_grid.iter().find(|t| !(t.abs() <= T::PI())) {
        return Err(ModelError::InvalidParameter {
            name: "theta_grid",
            reason: format!("{bad} outside [-pi, pi]"),
        });
    }
    let mut grid = theta_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid is finite"));
    grid.par_iter()
        .enumerate()
        .map(|(i, &theta)| lyapunov(ensemble, theta, steps, mix_seed(seed, i as u64)))
        .collect()
}

/// `n` equally spaced points on `(-π, π]`.
pub fn default_theta_grid<T: Scalar>(n: usize) -> Vec<T> {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (1..=n)
        .map(|k| T::lit(-std::f64::consts::PI + step * k as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn zero_angles_give_identity() {
        let t = transfer_at(&CoinParams::<f64>::identity(), 0.0).unwrap();
        assert_eq!(t.m[0][0], Complex::new(1.0, 0.0));
        assert_eq!(t.m[1][1], Complex::new(1.0, 0.0));
        assert!(t.m[0][1].is_zero() && t.m[1][0].is_zero());
    }

    #[test]
    fn perfect_reflection_is_singular() {
        let p = CoinParams::new(0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2);
        assert!(matches!(transfer_at(&p, 0.3), Err(ModelError::SingularCoin { .. })));
    }

    #[test]
    fn determinant_is_phase_two_alpha() {
        let p = CoinParams::new(0.7, -1.3, 2.1, 1.2);
        let d = transfer_at(&p, 0.4).unwrap().determinant();
        assert!((d - Complex::from_polar(1.0, 1.4)).norm() < 1e-12);
    }

    #[test]
    fn short_runs_are_rejected() {
        assert!(lyapunov(&CoinEnsemble::<f64>::Haar, 0.0, 999, 1).is_err());
    }

    #[test]
    fn free_walk_does_not_localize() {
        let ens = CoinEnsemble::FixedMixing { theta_mix: 0.0 };
        let r = lyapunov(&ens, 0.5, 5000, 3).unwrap();
        assert!(r.kappa < 1e-10);
        assert!(r.kappa >= 0.0 && r.stderr >= 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(kappa_curve(&CoinEnsemble::<f64>::Haar, &[], 1000, 0).is_err());
        assert!(kappa_curve(&CoinEnsemble::<f64>::Haar, &[4.0], 1000, 0).is_err());
    }

    #[test]
    fn default_grid_ends_at_pi() {
        let g = default_theta_grid::<f64>(129);
        assert_eq!(g.len(), 129);
        assert!(g[0] > -std::f64::consts::PI);
        assert!((g[128] - std::f64::consts::PI).abs() < 1e-12);
    }
}
