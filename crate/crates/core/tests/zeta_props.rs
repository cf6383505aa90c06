use num_complex::Complex64;
use proptest::prelude::*;
use zetalab_core::zeta::{uv_components, zeta_a, zeta_a_with_n, zeta_b};

fn strip_grid() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 0..10 {
        let sigma = 0.1 + 0.8 * i as f64 / 9.0;
        for t in [0.0, 5.0, 14.1, 25.0] {
            pts.push(Complex64::new(sigma, t));
        }
    }
    pts
}

#[test]
fn truncation_point_does_not_matter() {
    for s in strip_grid() {
        let n = 50;
        let a = zeta_a_with_n(s, n, 1e-12).unwrap();
        let b = zeta_a_with_n(s, 2 * n, 1e-12).unwrap();
        let bound = 2.0 * (a.tail_error_bound + b.tail_error_bound);
        assert!((a.value - b.value).norm() <= bound, "s = {s}");
    }
}

#[test]
fn forms_agree_on_the_strip() {
    for s in strip_grid() {
        let a = zeta_a(s, 1e-10).unwrap().value;
        let b = zeta_b(s, 1e-3).unwrap();
        assert!((a - b).norm() <= 2e-3, "s = {s}: {a} vs {b}");
    }
}

#[test]
fn pole_residue_tends_to_one() {
    let mut prev = f64::INFINITY;
    for k in 2..=6 {
        let h = 10f64.powi(-k);
        let v = zeta_a(Complex64::new(1.0 + h, 0.0), 1e-13).unwrap().value * h;
        let gap = (v.re - 1.0).abs();
        assert!(gap < 10.0 * h && gap < prev, "k = {k}");
        prev = gap;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_symmetry(sigma in 0.05f64..3.0, t in -60.0f64..60.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-3 || t.abs() > 1e-3);
        let a = zeta_a(Complex64::new(sigma, t), 1e-13).unwrap().value;
        let b = zeta_a(Complex64::new(sigma, -t), 1e-13).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-10);
    }

    #[test]
    fn components_rebuild_the_value(sigma in 0.01f64..0.99, t in 0.5f64..60.0) {
        let pair = uv_components(sigma, t, 60).unwrap();
        let z = zeta_a_with_n(Complex64::new(sigma, t), 60, 1e-12).unwrap();
        prop_assert!((Complex64::new(pair.u, pair.v) - z.value).norm() < 1e-9);
        prop_assert!(pair.residual().max_abs().is_finite());
    }
}
