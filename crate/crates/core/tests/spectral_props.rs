use std::f64::consts::PI;

use ilw_core::spectral::{forward_transform, inverse_transform, BoundaryMass};
use ilw_core::{RealGrid, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(n: usize) -> RealGrid {
    RealGrid::new(20.0, n).unwrap()
}

/// Real samples in `[-1, 1]`, so every field built from them is conjugate symmetric.
fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn field(n: usize) -> impl Strategy<Value = SpectralField> {
    samples(n).prop_map(move |s| forward_transform(grid(n), &s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(s in samples(64)) {
        let back = inverse_transform(&forward_transform(grid(64), &s).unwrap()).unwrap();
        let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for (a, b) in s.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn conjugate_symmetry_holds(f in field(32)) {
        prop_assert!(f.symmetry_defect() < 1e-14);
        prop_assert_eq!(f.coeffs()[16].im, 0.0);
    }

    #[test]
    fn plancherel(s in samples(128)) {
        let g = grid(128);
        let f = forward_transform(g, &s).unwrap();
        let physical = (s.iter().map(|v| v * v).sum::<f64>() * g.spacing()).sqrt();
        prop_assert!((f.l2_norm() - physical).abs() <= 1e-10 * physical.max(1e-300));
    }

    #[test]
    fn projectors_partition_exactly(f in field(64), cutoff in 0.0f64..12.0) {
        let lo = f.project_low(cutoff);
        let hi = f.project_high(cutoff);
        // each coefficient goes to exactly one side, so the sum is bitwise
        prop_assert_eq!(lo.add(&hi).into_coeffs(), f.coeffs().to_vec());
        let lhs = lo.l2_norm().powi(2) + hi.l2_norm().powi(2);
        let rhs = f.l2_norm().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        prop_assert_eq!(lo.project_low(cutoff).into_coeffs(), lo.coeffs().to_vec());
        prop_assert!(hi.project_low(cutoff).coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn translation_preserves_norm(f in field(64), y in -50.0f64..50.0) {
        // the real Nyquist mode cannot carry a phase, so drop it
        let f = f.project_low(grid(64).frequency(31));
        let t = f.translate(y);
        prop_assert!((t.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm().max(1e-300));
        prop_assert!(t.symmetry_defect() < 1e-12);
    }

    #[test]
    fn translation_by_period_is_identity(f in field(64)) {
        let t = f.translate(20.0);
        prop_assert!(t.sub(&f).l2_norm() <= 1e-12 * f.l2_norm().max(1e-300));
    }

    #[test]
    fn sobolev_norm_monotone_in_s(amps in prop::collection::vec(-1.0f64..1.0, 10), s in 0.0f64..3.0, ds in 0.0f64..2.0) {
        // modes 4..14 on L = 20 have |ξ| ≥ 2π·4/20 > 1
        let g = grid(64);
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        for (j, a) in amps.iter().enumerate() {
            let k = 4 + j;
            c[k] = Complex64::new(*a, 0.5 * a);
            c[64 - k] = c[k].conj();
        }
        let f = SpectralField::from_coeffs(g, c).unwrap();
        prop_assert!(f.sobolev_norm(s + ds) >= f.sobolev_norm(s));
    }
}

#[test]
fn transform_normalisation_examples() {
    let l = 2.0 * PI;
    let g = RealGrid::new(l, 16).unwrap();
    let one = SpectralField::from_fn(g, |_| 1.0);
    assert!((one.coeffs()[0].re - l).abs() < 1e-13);
    assert!(one.coeffs()[1..].iter().all(|c| c.norm() < 1e-13));

    let cos = SpectralField::from_fn(g, |x| x.cos());
    assert!((cos.coeffs()[1] - Complex64::new(l / 2.0, 0.0)).norm() < 1e-13);
    assert!((cos.coeffs()[15] - Complex64::new(l / 2.0, 0.0)).norm() < 1e-13);
    assert!((cos.l2_norm() - PI.sqrt()).abs() < 1e-13);
}

#[test]
fn gaussian_matches_analytic_transform() {
    // L = 80 standard deviations of e^{-x²/2}
    let g = RealGrid::new(80.0, 512).unwrap();
    let f = SpectralField::from_fn(g, |x| (-0.5 * x * x).exp());
    for (i, c) in f.coeffs().iter().enumerate() {
        let xi = g.frequency(i);
        let exact = (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp();
        assert!((c - exact).norm() < 1e-8, "xi = {xi}");
    }
    assert!(BoundaryMass::measure(&f).is_negligible());
}

#[test]
fn shift_of_single_mode_two_ways() {
    let l = 2.0 * PI;
    let g = RealGrid::new(l, 32).unwrap();
    let f = SpectralField::from_fn(g, |x| (3.0 * x).cos());
    for y in [0.1, 0.37, 1.3] {
        let physical = SpectralField::from_fn(g, |x| (3.0 * (x + y)).cos()).sub(&f);
        let multiplier = f.translate(y).sub(&f);
        for s in [0.0, 1.0, 2.5] {
            let (a, b) = (physical.sobolev_norm(s), multiplier.sobolev_norm(s));
            assert!((a - b).abs() < 1e-12 * a.max(1.0), "y = {y}, s = {s}");
        }
    }
}

#[test]
fn translation_modulus_tracks_tail() {
    // f_m = cos(m x): ‖f(·+y) - f‖ = 2|sin(m y/2)|‖f‖, ‖P⊥_{m-1} f‖ = ‖f‖.
    // Small translation modulus at fixed ε iff the tail sits at low m.
    let g = RealGrid::new(2.0 * PI, 256).unwrap();
    let eps = 1e-2;
    let mut prev = 0.0;
    for m in [1.0, 4.0, 16.0, 64.0] {
        let f = SpectralField::from_fn(g, |x| (m * x).cos());
        let w = f.translation_modulus(0.0, eps, 64);
        let tail = f.project_high(m - 0.5).l2_norm();
        let predicted = 2.0 * (m * eps / 2.0).sin() * tail;
        assert!((w - predicted).abs() < 1e-10, "m = {m}");
        assert!(w > prev);
        prev = w;
    }
}
