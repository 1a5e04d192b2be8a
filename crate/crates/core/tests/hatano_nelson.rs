use nhwalk_core::hatano_nelson::{
    build_hamiltonian, complex_fraction, default_complex_eps, fit_localization, gauge_matrix,
    lr_product_profile, mobility_edges, sample_disorder, spectrum, StateSelector,
};
use nhwalk_core::numerics::{eigendecompose, DEFAULT_TOL};
use nhwalk_core::{Boundary, Complex64, DisorderRealization64, HnParams64, ModelError};
use proptest::prelude::*;
use std::f64::consts::PI;

fn closest(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn clean_ring_lies_on_ellipse() {
    let g: f64 = 0.3;
    let p = HnParams64::new(100, g).with_disorder(0.0);
    let eigs = spectrum(&p, &DisorderRealization64::clean(100)).unwrap();
    let band: Vec<Complex64> = (0..100)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / 100.0;
            Complex64::new(-2.0 * g.cosh() * k.cos(), -2.0 * g.sinh() * k.sin())
        })
        .collect();
    for z in &eigs {
        assert!(closest(*z, &band) < 1e-8, "{z}");
    }
    for z in &band {
        assert!(closest(*z, &eigs) < 1e-8, "{z}");
    }
    assert!((complex_fraction(&eigs, 1e-9) - 0.98).abs() < 1e-12);
    let edges = mobility_edges(&eigs, g, 1e-9).unwrap();
    assert!((edges.upper_edge - 2.0 * g.cosh()).abs() < 0.01);
    assert!((edges.lower_edge + 2.0 * g.cosh()).abs() < 0.01);
}

#[test]
fn hermitian_at_zero_g() {
    let p = HnParams64::new(200, 0.0).with_seed(11);
    let dis = sample_disorder(&p).unwrap();
    let h = build_hamiltonian(&p, &dis).unwrap();
    assert_eq!(h, h.adjoint());
    let eigs = spectrum(&p, &dis).unwrap();
    assert!(eigs.iter().all(|z| z.im.abs() <= 1e-9));
}

#[test]
fn spectrum_closed_under_conjugation() {
    let p = HnParams64::new(120, 0.6).with_seed(5);
    let dis = sample_disorder(&p).unwrap();
    let eigs = spectrum(&p, &dis).unwrap();
    assert!(complex_fraction(&eigs, default_complex_eps(&eigs)) > 0.0);
    for z in &eigs {
        assert!(closest(z.conj(), &eigs) < 1e-8);
    }
}

#[test]
fn gauge_transform_undoes_field_on_open_chain() {
    let p = HnParams64::new(10, 0.3).with_boundary(Boundary::Open).with_seed(2);
    let dis = sample_disorder(&p).unwrap();
    let hg = build_hamiltonian(&p, &dis).unwrap();
    let h0 = build_hamiltonian(&p.clone().with_g(0.0), &dis).unwrap();
    let w = gauge_matrix(&p).unwrap();
    let winv = gauge_matrix(&p.clone().with_g(-0.3)).unwrap();
    let back = &(&winv * &hg) * &w;
    assert!(back.max_abs_diff(&h0) < 1e-12);
}

#[test]
fn gauge_refuses_overflow() {
    let p = HnParams64::new(300, 3.0);
    assert!(matches!(gauge_matrix(&p), Err(ModelError::Overflow { .. })));
}

#[test]
fn disorder_moments() {
    let p = HnParams64::new(100_000, 0.0).with_seed(77);
    let v = sample_disorder(&p).unwrap().potential;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 0.006);
    assert!((var - 1.0 / 3.0).abs() < 0.01);
    assert!(v.iter().all(|x| (-1.0..1.0).contains(x)));
}

#[test]
fn biorthogonal_norm_sums_to_one_for_every_state() {
    for g in [0.0, 0.4, 1.2] {
        let p = HnParams64::new(40, g).with_seed(9);
        let dis = sample_disorder(&p).unwrap();
        for k in 0..40 {
            let prof = lr_product_profile(&p, &dis, StateSelector::Index(k), DEFAULT_TOL).unwrap();
            let s: f64 = prof.product.iter().sum();
            assert!((s - 1.0).abs() < 1e-8, "g={g} k={k} sum={s}");
        }
    }
}

#[test]
fn hermitian_profile_is_a_probability() {
    let p = HnParams64::new(60, 0.0).with_seed(4);
    let dis = sample_disorder(&p).unwrap();
    let prof = lr_product_profile(&p, &dis, StateSelector::LowestRealPart, DEFAULT_TOL).unwrap();
    assert!(prof.product.iter().all(|&x| x >= -1e-12));
    assert!(prof.max_imag < 1e-10);
}

#[test]
fn profile_survives_field_below_kappa() {
    let p = HnParams64::new(200, 0.0).with_disorder(2.0).with_seed(21);
    let dis = sample_disorder(&p).unwrap();
    let base = lr_product_profile(&p, &dis, StateSelector::LowestRealPart, DEFAULT_TOL).unwrap();
    let fit = fit_localization(&base.product, Boundary::Periodic).unwrap();
    assert!(fit.kappa > 0.5, "kappa {}", fit.kappa);
    let moved =
        lr_product_profile(&p.clone().with_g(0.3), &dis, StateSelector::LowestRealPart, DEFAULT_TOL)
            .unwrap();
    let diff = base
        .product
        .iter()
        .zip(&moved.product)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-6, "diff {diff}");
    assert!((base.energy - moved.energy).norm() < 1e-9);
}

#[test]
fn synthetic_profile_fit() {
    let prof: Vec<f64> = (0..300).map(|x| (-(x as f64 - 100.0).abs()).exp()).collect();
    let fit = fit_localization(&prof, Boundary::Open).unwrap();
    assert!((fit.kappa - 0.5).abs() < 1e-6);
    assert_eq!(fit.center, 100.0);
    assert!(matches!(fit_localization(&[1.0; 50], Boundary::Open), Err(ModelError::FlatProfile { .. })));
}

#[test]
fn ring_fit_measures_distance_around_the_ring() {
    let prof: Vec<f64> = (0..100)
        .map(|x: i64| {
            let d = (x - 97).abs().min(100 - (x - 97).abs());
            (-1.2 * d as f64).exp()
        })
        .collect();
    let fit = fit_localization(&prof, Boundary::Periodic).unwrap();
    assert!((fit.kappa - 0.6).abs() < 1e-9);
    assert_eq!(fit.center, 97.0);
}

#[test]
fn real_spectrum_has_no_arc() {
    let eigs = vec![Complex64::new(-1.0, 0.0), Complex64::new(2.0, 0.0)];
    assert_eq!(complex_fraction(&eigs, 1e-9), 0.0);
    assert!(matches!(mobility_edges(&eigs, 0.2, 1e-9), Err(ModelError::NoComplexArc { .. })));
}

#[test]
fn decomposition_of_open_chain_is_biorthonormal() {
    let p = HnParams64::new(10, 0.3).with_boundary(Boundary::Open).with_seed(8);
    let h = build_hamiltonian(&p, &sample_disorder(&p).unwrap()).unwrap();
    let dec = eigendecompose(&h, DEFAULT_TOL).unwrap();
    let o = dec.overlap_matrix();
    assert!(o.max_abs_diff(&nhwalk_core::ComplexMatrix64::identity(10)) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn open_chain_spectrum_is_gauge_invariant(seed: u64, g in -1.0f64..1.0, sites in 4usize..30) {
        let p = HnParams64::new(sites, g).with_boundary(Boundary::Open).with_seed(seed);
        prop_assume!(g.abs() * (sites - 1) as f64 <= 30.0);
        let dis = sample_disorder(&p).unwrap();
        let a = spectrum(&p, &dis).unwrap();
        let b = spectrum(&p.clone().with_g(0.0), &dis).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-6, "{} vs {}", x, y);
        }
    }

    #[test]
    fn disorder_respects_halfwidth(seed: u64, w in 0.0f64..5.0, sites in 2usize..200) {
        let p = HnParams64::new(sites, 0.0).with_disorder(w).with_seed(seed);
        let v = sample_disorder(&p).unwrap().potential;
        prop_assert_eq!(v.len(), sites);
        prop_assert!(v.iter().all(|x| x.abs() <= w));
        prop_assert_eq!(v, sample_disorder(&p).unwrap().potential);
    }
}
