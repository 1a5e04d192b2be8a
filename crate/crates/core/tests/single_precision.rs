//! The generic core also runs in `f32`, at single-precision tolerances.

use num_complex::Complex;
use nhwalk_core::hatano_nelson::{spectrum, DisorderRealization, HnParams};
use nhwalk_core::quantum_walk::{evolve, CoinEnsemble, CoinField, WalkState};
use nhwalk_core::transfer_matrix::lyapunov;
use nhwalk_core::{Boundary, SeededRng};

#[test]
fn clean_ring_in_single_precision() {
    let (l, g) = (40usize, 0.3f32);
    let eigs = spectrum(&HnParams::new(l, g), &DisorderRealization::clean(l)).unwrap();
    for e in eigs {
        // the ellipse (Re E / 2cosh g)^2 + (Im E / 2sinh g)^2 = 1
        let r = (e.re / (2.0 * g.cosh())).powi(2) + (e.im / (2.0 * g.sinh())).powi(2);
        assert!((r - 1.0).abs() < 1e-4, "{e} off the ellipse");
    }
}

#[test]
fn unitary_walk_keeps_weight_in_single_precision() {
    let l = 64;
    let h = std::f32::consts::FRAC_1_SQRT_2;
    let start = WalkState::localized(l, l / 2, Complex::new(h, 0.0), Complex::new(0.0, h), Boundary::Periodic);
    let coins = CoinField::sample(l, &CoinEnsemble::<f32>::Haar, &mut SeededRng::new(4));
    let p = evolve(&start, &coins, 0.0, 30).unwrap();
    for row in &p {
        assert!((row.iter().sum::<f32>() - 1.0).abs() < 1e-4);
    }
}

#[test]
fn lyapunov_in_single_precision() {
    let ens = CoinEnsemble::FixedMixing { theta_mix: std::f32::consts::FRAC_PI_4 };
    let r = lyapunov(&ens, 0.0f32, 200_000, 9).unwrap();
    assert!((r.kappa - 2f32.ln() / 2.0).abs() < 0.01, "{}", r.kappa);
}
