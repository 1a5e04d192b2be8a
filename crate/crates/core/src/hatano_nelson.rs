//! One-dimensional Hatano-Nelson chain: asymmetric hopping `e^{±g}` plus a random on-site
//! potential, its imaginary gauge transformation, spectra, biorthogonal eigenvector profiles
//! and localization lengths read off from the complex part of the spectrum.

use num_complex::Complex;

use crate::error::{ModelError, NumericsError, Result};
use crate::lattice::{sort_spectrum, Boundary};
use crate::numerics::{eigendecompose, eigenvalues, ComplexMatrix, SeededRng};
use crate::scalar::Scalar;

/// Largest gauge exponent `|g|·(L−1)` that stays inside the double-precision range.
pub const MAX_GAUGE_EXPONENT: f64 = 700.0;

/// Default threshold for calling an eigenvalue complex, relative to `max |E|`.
pub const COMPLEX_EPS_REL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HnParams<T> {
    pub sites: usize,
    /// Imaginary vector potential.
    pub g: T,
    pub hopping: T,
    pub boundary: Boundary,
    /// Potentials are drawn from `[-W, W]`.
    pub disorder_halfwidth: T,
    pub seed: u64,
}

impl<T: Scalar> HnParams<T> {
    /// Periodic chain with unit hopping and unit disorder half-width.
    pub fn new(sites: usize, g: T) -> Self {
        Self {
            sites,
            g,
            hopping: T::one(),
            boundary: Boundary::Periodic,
            disorder_halfwidth: T::one(),
            seed: 0,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_disorder(mut self, halfwidth: T) -> Self {
        self.disorder_halfwidth = halfwidth;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_g(mut self, g: T) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(ModelError::InvalidParameter {
                name: "L",
                reason: format!("need at least 2 sites, got {}", self.sites),
            });
        }
        if !(self.hopping > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "hopping",
                reason: format!("must be positive, got {}", self.hopping),
            });
        }
        if !(self.disorder_halfwidth >= T::zero()) || !self.disorder_halfwidth.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "W",
                reason: format!("must be finite and nonnegative, got {}", self.disorder_halfwidth),
            });
        }
        if !self.g.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "g",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// One draw of the on-site potential.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization<T> {
    pub potential: Vec<T>,
}

impl<T: Scalar> DisorderRealization<T> {
    pub fn clean(sites: usize) -> Self {
        Self {
            potential: vec![T::zero(); sites],
        }
    }

    pub fn len(&self) -> usize {
        self.potential.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potential.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationFit<T> {
    /// Inverse localization length of the amplitude, `|ψ| ~ e^{-κ|x - x_c|}`.
    pub kappa: T,
    pub center: T,
    /// Root-mean-square residual of the log-linear fit.
    pub fit_residual: T,
}

/// Real-energy window bounding the complex arc of a spectrum at a given `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityEdgeEstimate<T> {
    pub g: T,
    pub lower_edge: T,
    pub upper_edge: T,
}

/// Which eigenstate a profile is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSelector {
    /// Lowest real part of the eigenvalue (the ground state).
    LowestRealPart,
    /// Position in the spectrum sorted by (Re, Im).
    Index(usize),
}

/// Left-right product profile of one eigenstate.
#[derive(Debug, Clone, PartialEq)]
pub struct LrProfile<T> {
    pub energy: Complex<T>,
    /// `Re[l(x) r(x)]` with `Σ_x l(x) r(x) = 1`.
    pub product: Vec<T>,
    /// Largest `|Im[l(x) r(x)]|`, kept as a diagnostic.
    pub max_imag: T,
}

/// Uniform potentials on `[-W, W]` from the seeded stream of `params`.
pub fn sample_disorder<T: Scalar>(params: &HnParams<T>) -> Result<DisorderRealization<T>> {
    params.validate()?;
    let w = params.disorder_halfwidth.as_f64();
    if w == 0.0 {
        return Ok(DisorderRealization::clean(params.sites));
    }
    let mut rng = SeededRng::new(params.seed);
    let potential = (0..params.sites)
        .map(|_| rng.uniform(-w, w).map(T::lit))
        .collect::<std::result::Result<Vec<_>, NumericsError>>()?;
    Ok(DisorderRealization { potential })
}

/// Hamiltonian matrix: `V_x` on the diagonal, `-t e^{g}` for hops `x → x+1` (row `x+1`,
/// column `x`) and `-t e^{-g}` for hops `x+1 → x`. Periodic chains treat `L-1 → 0` as one
/// more forward hop, so row 0, column `L-1` carries `-t e^{g}`.
pub fn build_hamiltonian<T: Scalar>(
    params: &HnParams<T>,
    dis: &DisorderRealization<T>,
) -> Result<ComplexMatrix<T>> {
    params.validate()?;
    let n = params.sites;
    if dis.len() != n {
        return Err(ModelError::LengthMismatch {
            expected: n,
            got: dis.len(),
        });
    }
    let forward = Complex::new(-params.hopping * params.g.exp(), T::zero());
    let backward = Complex::new(-params.hopping * (-params.g).exp(), T::zero());
    let mut h = ComplexMatrix::zeros(n);
    for x in 0..n {
        h[(x, x)] = Complex::new(dis.potential[x], T::zero());
    }
    for x in 0..n - 1 {
        h[(x + 1, x)] = forward;
        h[(x, x + 1)] = backward;
    }
    if params.boundary == Boundary::Periodic {
        h[(0, n - 1)] = h[(0, n - 1)] + forward;
        h[(n - 1, 0)] = h[(n - 1, 0)] + backward;
    }
    h.check_finite().map_err(ModelError::from)?;
    Ok(h)
}

/// Imaginary gauge transformation `diag(e^{g x})`, `x = 0..L-1`.
pub fn gauge_matrix<T: Scalar>(params: &HnParams<T>) -> Result<ComplexMatrix<T>> {
    params.validate()?;
    let exponent = params.g.abs().as_f64() * (params.sites - 1) as f64;
    if exponent > MAX_GAUGE_EXPONENT {
        return Err(ModelError::Overflow { exponent });
    }
    let diag: Vec<Complex<T>> = (0..params.sites)
        .map(|x| Complex::new((params.g * T::lit(x as f64)).exp(), T::zero()))
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Eigenvalues sorted by (Re, Im).
pub fn spectrum<T: Scalar>(
    params: &HnParams<T>,
    dis: &DisorderRealization<T>,
) -> Result<Vec<Complex<T>>> {
    let h = build_hamiltonian(params, dis)?;
    let mut values = eigenvalues(&h)?;
    sort_spectrum(&mut values);
    Ok(values)
}

/// Product of the biorthonormal left and right eigenvectors of the selected state.
pub fn lr_product_profile<T: Scalar>(
    params: &HnParams<T>,
    dis: &DisorderRealization<T>,
    selector: StateSelector,
    tol: T,
) -> Result<LrProfile<T>> {
    let h = build_hamiltonian(params, dis)?;
    let dec = eigendecompose(&h, tol)?;
    let mut order: Vec<usize> = (0..dec.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (dec.values[i], dec.values[j]);
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let pos = match selector {
        StateSelector::LowestRealPart => 0,
        StateSelector::Index(k) => {
            if k >= order.len() {
                return Err(ModelError::InvalidParameter {
                    name: "state index",
                    reason: format!("{k} out of range for {} states", order.len()),
                });
            }
            k
        }
    };
    let k = order[pos];
    if let Some(cluster) = dec.degenerate_clusters.iter().find(|c| c.contains(&k)) {
        return Err(NumericsError::DegeneratePairing {
            clusters: vec![cluster.clone()],
        }
        .into());
    }
    let pairs: Vec<Complex<T>> = dec.left_vectors[k]
        .iter()
        .zip(&dec.right_vectors[k])
        .map(|(&l, &r)| l * r)
        .collect();
    let max_imag = pairs.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
    Ok(LrProfile {
        energy: dec.values[k],
        product: pairs.iter().map(|z| z.re).collect(),
        max_imag,
    })
}

/// Fits `|profile(x)| ~ e^{-2κ|x - x_c|}` by least squares on `ln|profile|`.
///
/// The factor two accounts for the profile being a product of two amplitudes. On a periodic
/// chain `|x - x_c|` is the distance around the ring.
pub fn fit_localization<T: Scalar>(profile: &[T], boundary: Boundary) -> Result<LocalizationFit<T>> {
    if profile.len() < 2 {
        return Err(ModelError::InvalidParameter {
            name: "profile",
            reason: "need at least two points".into(),
        });
    }
    let abs: Vec<T> = profile.iter().map(|p| p.abs()).collect();
    let (center, max) = abs
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    let min = abs.iter().copied().fold(T::infinity(), T::min);
    let ratio = if min > T::zero() { max / min } else { T::infinity() };
    if !(max > T::zero()) || ratio < T::lit(10.0) {
        return Err(ModelError::FlatProfile {
            ratio: ratio.as_f64(),
        });
    }
    let floor = T::lit(1e-12) * max;
    let points: Vec<(T, T)> = abs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > floor)
        .map(|(x, &v)| {
            let d = x.abs_diff(center);
            let d = match boundary {
                Boundary::Periodic => d.min(profile.len() - d),
                Boundary::Open => d,
            };
            (-T::lit(d as f64), v.ln())
        })
        .collect();
    let m = T::lit(points.len() as f64);
    let mean_d = points.iter().fold(T::zero(), |a, p| a + p.0) / m;
    let mean_y = points.iter().fold(T::zero(), |a, p| a + p.1) / m;
    let sxx = points.iter().fold(T::zero(), |a, p| a + (p.0 - mean_d).powi(2));
    let sxy = points
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mean_d) * (p.1 - mean_y));
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = mean_y - slope * mean_d;
    let rss = points
        .iter()
        .fold(T::zero(), |a, p| a + (p.1 - intercept - slope * p.0).powi(2));
    Ok(LocalizationFit {
        kappa: (slope / T::lit(2.0)).max(T::zero()),
        center: T::lit(center as f64),
        fit_residual: (rss / m).sqrt(),
    })
}

/// `1e-8 · max|E|`, the default threshold separating genuine imaginary parts from roundoff.
pub fn default_complex_eps<T: Scalar>(eigs: &[Complex<T>]) -> T {
    let max = eigs.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    T::lit(COMPLEX_EPS_REL) * max
}

/// Fraction of eigenvalues with `|Im E| > eps`.
pub fn complex_fraction<T: Scalar>(eigs: &[Complex<T>], eps: T) -> T {
    if eigs.is_empty() {
        return T::zero();
    }
    let count = eigs.iter().filter(|z| z.im.abs() > eps).count();
    T::lit(count as f64 / eigs.len() as f64)
}

/// Real-energy extent of the complex eigenvalues; at both edges `κ(E) = g`.
pub fn mobility_edges<T: Scalar>(
    eigs: &[Complex<T>],
    g: T,
    eps: T,
) -> Result<MobilityEdgeEstimate<T>> {
    let (lo, hi) = eigs
        .iter()
        .filter(|z| z.im.abs() > eps)
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), z| {
            (lo.min(z.re), hi.max(z.re))
        });
    if lo > hi {
        return Err(ModelError::NoComplexArc { eps: eps.as_f64() });
    }
    Ok(MobilityEdgeEstimate {
        g,
        lower_edge: lo,
        upper_edge: hi,
    })
}

/// Clean periodic-chain band `E(k) = -2t(cosh g cos k + i sinh g sin k)` at `k = 2πm/L`.
pub fn clean_ring_spectrum<T: Scalar>(sites: usize, g: T, hopping: T) -> Vec<Complex<T>> {
    let two = T::lit(2.0);
    (0..sites)
        .map(|m| {
            let k = two * T::PI() * T::lit(m as f64) / T::lit(sites as f64);
            Complex::new(
                -two * hopping * g.cosh() * k.cos(),
                -two * hopping * g.sinh() * k.sin(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn clean_disorder_is_zero() {
        let p = HnParams::new(10, 0.0).with_disorder(0.0);
        assert!(sample_disorder(&p).unwrap().potential.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disorder_is_reproducible_and_bounded() {
        let p = HnParams::new(500, 0.0).with_seed(7).with_disorder(1.5);
        let a = sample_disorder(&p).unwrap();
        assert_eq!(a, sample_disorder(&p).unwrap());
        assert!(a.potential.iter().all(|v| (-1.5..1.5).contains(v)));
        assert_ne!(a, sample_disorder(&p.clone().with_seed(8)).unwrap());
    }

    #[test]
    fn disorder_moments_match_uniform_distribution() {
        let p = HnParams::new(100_000, 0.0).with_seed(99);
        let v = sample_disorder(&p).unwrap().potential;
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.006, "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn four_site_ring_at_zero_g() {
        let p = HnParams::new(4, 0.0).with_disorder(0.0);
        let h = build_hamiltonian(&p, &DisorderRealization::clean(4)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            vec![0.0, -1.0, 0.0, -1.0],
            vec![-1.0, 0.0, -1.0, 0.0],
            vec![0.0, -1.0, 0.0, -1.0],
            vec![-1.0, 0.0, -1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(h, expected);
        let e = spectrum(&p, &DisorderRealization::clean(4)).unwrap();
        for (got, want) in e.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn open_three_site_hopping_pattern() {
        let g: f64 = 0.5;
        let p = HnParams::new(3, g).with_boundary(Boundary::Open);
        let h = build_hamiltonian(&p, &DisorderRealization::clean(3)).unwrap();
        assert_eq!(h[(1, 0)], c(-g.exp()));
        assert_eq!(h[(2, 1)], c(-g.exp()));
        assert_eq!(h[(0, 1)], c(-(-g).exp()));
        assert_eq!(h[(1, 2)], c(-(-g).exp()));
        assert_eq!(h[(0, 2)], c(0.0));
        assert_eq!(h[(2, 0)], c(0.0));
    }

    #[test]
    fn ring_closure_continues_the_forward_hop() {
        let g: f64 = 0.5;
        let h = build_hamiltonian(&HnParams::new(3, g), &DisorderRealization::clean(3)).unwrap();
        assert_eq!(h[(0, 2)], c(-g.exp()));
        assert_eq!(h[(2, 0)], c(-(-g).exp()));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let p = HnParams::new(5, 0.1);
        assert_eq!(
            build_hamiltonian(&p, &DisorderRealization::clean(4)),
            Err(ModelError::LengthMismatch { expected: 5, got: 4 })
        );
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(HnParams::new(1, 0.0).validate().is_err());
        let mut p = HnParams::new(4, 0.0);
        p.hopping = 0.0;
        assert!(p.validate().is_err());
        assert!(HnParams::new(4, 0.0).with_disorder(-1.0).validate().is_err());
    }

    #[test]
    fn gauge_matrix_identity_and_overflow() {
        let p = HnParams::new(6, 0.0);
        assert_eq!(gauge_matrix(&p).unwrap(), ComplexMatrix::identity(6));
        assert!(matches!(
            gauge_matrix(&HnParams::new(300, 3.0)),
            Err(ModelError::Overflow { .. })
        ));
    }

    #[test]
    fn synthetic_profile_fit_recovers_slope() {
        let profile: Vec<f64> = (0..300)
            .map(|x| (-2.0 * 0.5 * (x as f64 - 100.0).abs()).exp())
            .collect();
        let fit = fit_localization(&profile, Boundary::Open).unwrap();
        assert!((fit.kappa - 0.5).abs() < 1e-6, "kappa {}", fit.kappa);
        assert_eq!(fit.center, 100.0);
        assert!(fit.fit_residual < 1e-9);
    }

    #[test]
    fn flat_profile_is_rejected() {
        assert!(matches!(
            fit_localization(&[0.01; 50], Boundary::Open),
            Err(ModelError::FlatProfile { .. })
        ));
    }

    #[test]
    fn ties_in_maximum_pick_smallest_site() {
        let mut p = vec![1e-6; 40];
        p[10] = 1.0;
        p[30] = 1.0;
        assert_eq!(fit_localization(&p, Boundary::Open).unwrap().center, 10.0);
    }

    #[test]
    fn complex_fraction_and_edges() {
        let real = vec![c(-1.0), c(0.5), c(2.0)];
        assert_eq!(complex_fraction(&real, 1e-9), 0.0);
        assert!(matches!(
            mobility_edges(&real, 0.2, 1e-9),
            Err(ModelError::NoComplexArc { .. })
        ));
        let mixed = vec![
            c(-2.0),
            Complex::new(-0.5, 0.1),
            Complex::new(-0.5, -0.1),
            Complex::new(0.7, 0.2),
            c(2.0),
        ];
        assert_eq!(complex_fraction(&mixed, 1e-9), 0.6);
        let e = mobility_edges(&mixed, 0.3, 1e-9).unwrap();
        assert_eq!((e.lower_edge, e.upper_edge, e.g), (-0.5, 0.7, 0.3));
    }
}
