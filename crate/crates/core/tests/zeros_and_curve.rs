use num_complex::Complex64;
use proptest::prelude::*;
use zetalab_core::curve::{
    bound_functions, decompose_part2, decompose_part3, ibp_identity_ii, PathSpec, Variant,
};
use zetalab_core::zeros::{count_zeros_box, find_zeros};
use zetalab_core::zeta::zeta_a;

#[test]
fn winding_agrees_with_refined_zeros() {
    for (lo, hi) in [(10.0, 30.0), (30.0, 45.0), (2.0, 10.0)] {
        let zeros = find_zeros(lo, hi, 0.1, 1e-8).unwrap();
        let count = count_zeros_box((0.05, 0.95), (lo, hi), 400).unwrap();
        assert_eq!(count.winding, zeros.len() as i64, "({lo}, {hi})");
        for z in zeros {
            assert!(z.min_abs < 1e-8);
            assert!((z.sigma - 0.5).abs() < 1e-6);
            let again = zeta_a(Complex64::new(z.sigma, z.t), 1e-14).unwrap().value;
            let mirror = zeta_a(Complex64::new(z.sigma, -z.t), 1e-14).unwrap().value;
            assert!(again.norm() < 1e-6 && mirror.norm() < 1e-6);
        }
    }
}

#[test]
fn remainder_follows_the_regimes() {
    // The part-three remainder at depth M−1 is M!/ln^M N·∫N^{1−s}/(1−s)^{M+1}ds.
    let path = PathSpec::new(0.3, 6.0).unwrap();
    let n = 30u64;
    let ln_n = (n as f64).ln();
    let lo = path.start().norm() * ln_n;
    let hi = std::f64::consts::E * (Complex64::new(1.0, 0.0) - path.start()).norm() * ln_n;
    let rem = |m: usize| {
        let r = decompose_part3(&path, n, m - 1, Variant::AtZero).unwrap();
        r.term("d5").unwrap().norm()
    };
    let below: Vec<f64> = (2..=lo.floor() as usize).map(rem).collect();
    assert!(below.windows(2).all(|w| w[1] < w[0]), "{below:?}");
    let start = hi.ceil() as usize;
    let above: Vec<f64> = (start..start + 10).map(rem).collect();
    assert!(above.windows(2).all(|w| w[1] > w[0]), "{above:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_identities_hold(
        sigma0 in 0.1f64..0.45,
        t0 in 5.0f64..40.0,
        n in 10u64..200,
        m_frac in 0.0f64..1.0,
    ) {
        let path = PathSpec::new(sigma0, t0).unwrap();
        let m_max = ((path.start().norm() * (n as f64).ln()).floor() as usize).clamp(1, 20);
        let m = 1 + (m_frac * (m_max - 1) as f64) as usize;
        prop_assert!(ibp_identity_ii(&path, n, m).unwrap() < 1e-8);
        prop_assert!(decompose_part2(&path, n, m, Variant::Exact).unwrap().residual < 1e-6);
    }

    #[test]
    fn bounds_hold(sigma0 in 0.01f64..0.499, t0 in -80.0f64..80.0, n in 2u64..2_000) {
        let path = PathSpec::new(sigma0, t0).unwrap();
        let r = bound_functions(&path, n).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn conjugate_paths(sigma0 in 0.05f64..0.5, t0 in 1.0f64..50.0) {
        let p = PathSpec::new(sigma0, t0).unwrap();
        let q = PathSpec::new(sigma0, -t0).unwrap();
        let a = zetalab_core::curve::direct_quadrature(&p, 1e-10).unwrap();
        let b = zetalab_core::curve::direct_quadrature(&q, 1e-10).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-9);
    }
}
