//! Discrete-time quantum walk on a chain with left- and right-moving channels.
//!
//! Amplitudes at site `x` form the column `(ψ_{x,L}, ψ_{x,R})`, and a coin acts on it by
//! ordinary matrix-vector multiplication. Dense operators use the basis order
//! `(0L, 0R, 1L, 1R, …)`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{ModelError, Result};
use crate::lattice::{sort_spectrum, Boundary};
use crate::numerics::{eigenvalues, ComplexMatrix, SeededRng};
use crate::scalar::Scalar;

/// Amplitudes above this abort an evolution instead of overflowing.
pub const AMPLITUDE_GUARD: f64 = 1e150;

/// Haar draws with `|cos ϑ|` below this are resampled.
pub const MIN_COS_THETA: f64 = 1e-12;

pub type CoinMatrix<T> = [[Complex<T>; 2]; 2];

/// Angles of the coin `e^{iφ} [[e^{iα} cos ϑ, -e^{iβ} sin ϑ], [e^{-iβ} sin ϑ, e^{-iα} cos ϑ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoinParams<T> {
    pub alpha: T,
    pub beta: T,
    pub phi: T,
    pub theta_mix: T,
}

impl<T: Scalar> CoinParams<T> {
    pub fn new(alpha: T, beta: T, phi: T, theta_mix: T) -> Self {
        Self {
            alpha,
            beta,
            phi,
            theta_mix,
        }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// `(1/√2) [[1, 1], [-1, 1]]`.
    pub fn simple() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), -T::FRAC_PI_4())
    }

    pub fn matrix(&self) -> CoinMatrix<T> {
        coin_matrix(self)
    }
}

pub fn coin_matrix<T: Scalar>(p: &CoinParams<T>) -> CoinMatrix<T> {
    let global = Complex::from_polar(T::one(), p.phi);
    let (s, c) = p.theta_mix.sin_cos();
    [
        [
            global * Complex::from_polar(c, p.alpha),
            -global * Complex::from_polar(s, p.beta),
        ],
        [
            global * Complex::from_polar(s, -p.beta),
            global * Complex::from_polar(c, -p.alpha),
        ],
    ]
}

/// Haar-distributed U(2) coin: phases uniform on `[0, 2π)`, `ϑ = arcsin √ξ` with `ξ` uniform.
pub fn sample_haar_coin<T: Scalar>(rng: &mut SeededRng) -> CoinParams<T> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let alpha = two_pi * rng.unit();
    let beta = two_pi * rng.unit();
    let phi = two_pi * rng.unit();
    let mut theta = rng.unit().sqrt().asin();
    while theta.cos().abs() < MIN_COS_THETA {
        theta = rng.unit().sqrt().asin();
    }
    CoinParams::new(T::lit(alpha), T::lit(beta), T::lit(phi), T::lit(theta))
}

/// Distribution the per-site coins are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinEnsemble<T> {
    Haar,
    /// Fixed mixing angle with phases `α, β, φ` uniform on `[0, 2π)`.
    FixedMixing { theta_mix: T },
    /// The same coin on every site.
    Uniform(CoinParams<T>),
}

impl<T: Scalar> CoinEnsemble<T> {
    pub fn sample(&self, rng: &mut SeededRng) -> CoinParams<T> {
        match *self {
            CoinEnsemble::Haar => sample_haar_coin(rng),
            CoinEnsemble::FixedMixing { theta_mix } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let alpha = T::lit(two_pi * rng.unit());
                let beta = T::lit(two_pi * rng.unit());
                let phi = T::lit(two_pi * rng.unit());
                CoinParams::new(alpha, beta, phi, theta_mix)
            }
            CoinEnsemble::Uniform(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinField<T> {
    pub coins: Vec<CoinParams<T>>,
}

impl<T: Scalar> CoinField<T> {
    pub fn uniform(sites: usize, coin: CoinParams<T>) -> Self {
        Self {
            coins: vec![coin; sites],
        }
    }

    pub fn sample(sites: usize, ensemble: &CoinEnsemble<T>, rng: &mut SeededRng) -> Self {
        Self {
            coins: (0..sites).map(|_| ensemble.sample(rng)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coins.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState<T> {
    pub amp_left: Vec<Complex<T>>,
    pub amp_right: Vec<Complex<T>>,
    pub boundary: Boundary,
}

impl<T: Scalar> WalkState<T> {
    pub fn zeros(sites: usize, boundary: Boundary) -> Self {
        Self {
            amp_left: vec![Complex::zero(); sites],
            amp_right: vec![Complex::zero(); sites],
            boundary,
        }
    }

    /// State supported on one site with the given `(ψ_L, ψ_R)`.
    pub fn localized(
        sites: usize,
        site: usize,
        left: Complex<T>,
        right: Complex<T>,
        boundary: Boundary,
    ) -> Self {
        let mut s = Self::zeros(sites, boundary);
        s.amp_left[site] = left;
        s.amp_right[site] = right;
        s
    }

    pub fn sites(&self) -> usize {
        self.amp_left.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.amp_left
            .iter()
            .chain(&self.amp_right)
            .fold(T::zero(), |a, z| a + z.norm_sqr())
    }

    /// `P(x) = |ψ_{x,L}|² + |ψ_{x,R}|²`.
    pub fn probabilities(&self) -> Vec<T> {
        self.amp_left
            .iter()
            .zip(&self.amp_right)
            .map(|(l, r)| l.norm_sqr() + r.norm_sqr())
            .collect()
    }

    /// Amplitudes in the interleaved basis `(0L, 0R, 1L, 1R, …)`.
    pub fn to_vector(&self) -> Vec<Complex<T>> {
        self.amp_left
            .iter()
            .zip(&self.amp_right)
            .flat_map(|(&l, &r)| [l, r])
            .collect()
    }

    pub fn from_vector(v: &[Complex<T>], boundary: Boundary) -> Self {
        Self {
            amp_left: v.iter().step_by(2).copied().collect(),
            amp_right: v.iter().skip(1).step_by(2).copied().collect(),
            boundary,
        }
    }

    fn max_amplitude(&self) -> T {
        self.amp_left
            .iter()
            .chain(&self.amp_right)
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

/// Eigenphases `θ_n = -i log λ_n` of a one-step operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSet<T> {
    pub g: T,
    /// Sorted by (Re θ, Im θ); `Re θ ∈ (-π, π]`.
    pub thetas: Vec<Complex<T>>,
}

impl<T: Scalar> EigenphaseSet<T> {
    /// Fraction of phases with `|Im θ| > eps`.
    pub fn complex_fraction(&self, eps: T) -> T {
        if self.thetas.is_empty() {
            return T::zero();
        }
        let count = self.thetas.iter().filter(|t| t.im.abs() > eps).count();
        T::lit(count as f64 / self.thetas.len() as f64)
    }
}

pub fn apply_coin<T: Scalar>(state: &WalkState<T>, coins: &CoinField<T>) -> Result<WalkState<T>> {
    if coins.len() != state.sites() {
        return Err(ModelError::LengthMismatch {
            expected: state.sites(),
            got: coins.len(),
        });
    }
    let mut out = state.clone();
    for (x, coin) in coins.coins.iter().enumerate() {
        let m = coin.matrix();
        let (l, r) = (state.amp_left[x], state.amp_right[x]);
        out.amp_left[x] = m[0][0] * l + m[0][1] * r;
        out.amp_right[x] = m[1][0] * l + m[1][1] * r;
    }
    Ok(out)
}

/// `S(g)`: left movers hop `x → x-1` with weight `e^{-g}`, right movers `x → x+1` with `e^{g}`.
pub fn apply_shift<T: Scalar>(state: &WalkState<T>, g: T) -> Result<WalkState<T>> {
    let n = state.sites();
    let mut out = WalkState::zeros(n, state.boundary);
    let down = (-g).exp();
    let up = g.exp();
    if state.boundary == Boundary::Open {
        if !state.amp_left[0].is_zero() {
            return Err(ModelError::OpenBoundaryLeak { site: 0 });
        }
        if !state.amp_right[n - 1].is_zero() {
            return Err(ModelError::OpenBoundaryLeak { site: n - 1 });
        }
    }
    for x in 0..n {
        out.amp_left[(x + n - 1) % n] = state.amp_left[x] * down;
        out.amp_right[(x + 1) % n] = state.amp_right[x] * up;
    }
    Ok(out)
}

/// `G(g)`: scales left movers by `e^{-g}` and right movers by `e^{g}` in place.
pub fn apply_gain_loss<T: Scalar>(state: &WalkState<T>, g: T) -> WalkState<T> {
    let down = (-g).exp();
    let up = g.exp();
    WalkState {
        amp_left: state.amp_left.iter().map(|&z| z * down).collect(),
        amp_right: state.amp_right.iter().map(|&z| z * up).collect(),
        boundary: state.boundary,
    }
}

/// Iterates `ψ ← S(g) C ψ` for `steps` steps and returns `P(x, t)` for `t = 0..=steps`.
///
/// Amplitudes are not renormalized, so total weight drifts when `g ≠ 0`.
pub fn evolve<T: Scalar>(
    initial: &WalkState<T>,
    coins: &CoinField<T>,
    g: T,
    steps: usize,
) -> Result<Vec<Vec<T>>> {
    if steps == 0 {
        return Err(ModelError::InvalidParameter {
            name: "T",
            reason: "need at least one step".into(),
        });
    }
    if coins.len() != initial.sites() {
        return Err(ModelError::LengthMismatch {
            expected: initial.sites(),
            got: coins.len(),
        });
    }
    let guard = T::lit(AMPLITUDE_GUARD);
    let mut state = initial.clone();
    let mut profiles = Vec::with_capacity(steps + 1);
    profiles.push(state.probabilities());
    for step in 1..=steps {
        state = apply_shift(&apply_coin(&state, coins)?, g)?;
        let max = state.max_amplitude();
        if !(max <= guard) {
            return Err(ModelError::AmplitudeOverflow {
                step,
                max_amplitude: max.as_f64(),
            });
        }
        profiles.push(state.probabilities());
    }
    Ok(profiles)
}

/// Dense `S(g)`; open chains drop the hops that would leave the chain.
pub fn shift_operator<T: Scalar>(sites: usize, g: T, boundary: Boundary) -> ComplexMatrix<T> {
    let n = sites;
    let mut s = ComplexMatrix::zeros(2 * n);
    let down = Complex::new((-g).exp(), T::zero());
    let up = Complex::new(g.exp(), T::zero());
    for x in 0..n {
        if x > 0 || boundary == Boundary::Periodic {
            s[(2 * ((x + n - 1) % n), 2 * x)] = down;
        }
        if x + 1 < n || boundary == Boundary::Periodic {
            s[(2 * ((x + 1) % n) + 1, 2 * x + 1)] = up;
        }
    }
    s
}

/// Dense `G(g)`.
pub fn gain_loss_operator<T: Scalar>(sites: usize, g: T) -> ComplexMatrix<T> {
    let down = Complex::new((-g).exp(), T::zero());
    let up = Complex::new(g.exp(), T::zero());
    let diag: Vec<Complex<T>> = (0..sites).flat_map(|_| [down, up]).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Dense block-diagonal coin operator.
pub fn coin_operator<T: Scalar>(coins: &CoinField<T>) -> ComplexMatrix<T> {
    let mut c = ComplexMatrix::zeros(2 * coins.len());
    for (x, coin) in coins.coins.iter().enumerate() {
        let m = coin.matrix();
        for a in 0..2 {
            for b in 0..2 {
                c[(2 * x + a, 2 * x + b)] = m[a][b];
            }
        }
    }
    c
}

/// One-step operator `U_HN(g) = S(g) C`.
pub fn build_walk_operator<T: Scalar>(
    coins: &CoinField<T>,
    g: T,
    boundary: Boundary,
) -> ComplexMatrix<T> {
    // S(g) has one entry per column, so the product is a row permutation of C with weights
    let n = coins.len();
    let mut u = ComplexMatrix::zeros(2 * n);
    let down = (-g).exp();
    let up = g.exp();
    for (x, coin) in coins.coins.iter().enumerate() {
        let m = coin.matrix();
        if x > 0 || boundary == Boundary::Periodic {
            let row = 2 * ((x + n - 1) % n);
            u[(row, 2 * x)] = m[0][0] * down;
            u[(row, 2 * x + 1)] = m[0][1] * down;
        }
        if x + 1 < n || boundary == Boundary::Periodic {
            let row = 2 * ((x + 1) % n) + 1;
            u[(row, 2 * x)] = m[1][0] * up;
            u[(row, 2 * x + 1)] = m[1][1] * up;
        }
    }
    u
}

/// Two-step gain-loss walk `U_PT(g) = S(-g) C S(g) C`.
pub fn build_pt_walk<T: Scalar>(coins: &CoinField<T>, g: T, boundary: Boundary) -> ComplexMatrix<T> {
    let first = build_walk_operator(coins, g, boundary);
    let second = build_walk_operator(coins, -g, boundary);
    &second * &first
}

/// Eigenphases of `u`, `θ = arg λ - i ln|λ|`, with `Re θ` folded into `(-π, π]`.
pub fn eigenphases<T: Scalar>(u: &ComplexMatrix<T>, g: T) -> Result<EigenphaseSet<T>> {
    let lambdas = eigenvalues(u)?;
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let mut thetas = Vec::with_capacity(lambdas.len());
    for (index, lam) in lambdas.iter().enumerate() {
        let modulus = lam.norm();
        if modulus < tiny {
            return Err(ModelError::ZeroEigenvalue { index });
        }
        let mut re = lam.im.atan2(lam.re);
        if re <= -T::PI() {
            re = T::PI();
        }
        thetas.push(Complex::new(re, -modulus.ln()));
    }
    sort_spectrum(&mut thetas);
    Ok(EigenphaseSet { g, thetas })
}

/// Gauge matrix `diag(e^{g x})` acting identically on both channels.
pub fn walk_gauge_matrix<T: Scalar>(sites: usize, g: T) -> ComplexMatrix<T> {
    let diag: Vec<Complex<T>> = (0..sites)
        .flat_map(|x| {
            let w = Complex::new((g * T::lit(x as f64)).exp(), T::zero());
            [w, w]
        })
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `Re θ` spacing check helper: largest gap between consecutive sorted real parts, counting
/// the wrap-around gap across `±π`.
pub fn max_phase_gap<T: Scalar>(set: &EigenphaseSet<T>) -> T {
    let mut re: Vec<T> = set.thetas.iter().map(|t| t.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if re.is_empty() {
        return T::zero();
    }
    let wrap = re[0] + T::lit(2.0) * T::PI() - re[re.len() - 1];
    re.windows(2).map(|w| w[1] - w[0]).fold(wrap, T::max)
}
