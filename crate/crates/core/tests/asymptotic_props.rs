use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;
use zetalab_core::asymptotic::{bracket_n, ln_stirling_decay, stirling_phi, PiRow, SeriesState};
use zetalab_core::primes::{pi_exact, Limits};

const DECADES: [u64; 7] = [
    1_000,
    10_000,
    100_000,
    1_000_000,
    10_000_000,
    100_000_000,
    1_000_000_000,
];

#[test]
fn bracket_exists_on_every_decade() {
    let limits = Limits::default();
    for x in DECADES {
        let b = bracket_n(x, &limits).unwrap();
        assert!(b.n().is_some(), "x = {x}: {b:?}");
    }
}

#[test]
fn rows_pass_gap_phi_and_li_checks() {
    let limits = Limits::default();
    for x in DECADES {
        let row = PiRow::build(x, pi_exact(x, &limits).unwrap()).unwrap();
        assert!(row.failures(0.25).is_empty(), "x = {x}: {row:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn recurrence_matches_ln_gamma(lx in 2.0f64..10.0, n in 0usize..=200) {
        let x = 10f64.powf(lx);
        let s = SeriesState::new(x, n).unwrap();
        let expect = (ln_gamma(n as f64 + 1.0) - n as f64 * x.ln().ln()).exp();
        prop_assert!((s.terms[n] - expect).abs() <= 1e-12 * expect.max(f64::MIN_POSITIVE) * 10.0);
        prop_assert!(s.terms.iter().all(|t| *t > 0.0));
    }

    #[test]
    fn residuals_telescope(x in 100u64..1_000_000, pi in 0u64..100_000, n in 1usize..30) {
        let s = SeriesState::with_pi(x, pi, n).unwrap();
        let lhs = s.delta[n - 1] - s.delta[n];
        prop_assert!((lhs - s.terms[n]).abs() <= 1e-12 * s.delta[n - 1].abs().max(s.terms[n]).max(1.0));
    }

    #[test]
    fn stirling_sandwich(n in 1u64..=10_000, alpha in 0.1f64..200.0) {
        let ev = stirling_phi(n, alpha).unwrap();
        let lower = ev.ln_lower_envelope();
        let slack = 1e-12 * lower.abs().max(1.0);
        prop_assert!(ev.ln_phi >= lower - slack);
        prop_assert!(ev.ln_phi < lower + 1.0);
    }
}

#[test]
fn stirling_decay_reaches_small_values() {
    for c in [1.0, 2.0, 4.0] {
        let vals: Vec<f64> = (1..=400)
            .map(|m| ln_stirling_decay(0.3, c, m).unwrap())
            .collect();
        let tail = &vals[200..];
        assert!(tail.windows(2).all(|w| w[1] < w[0]), "c = {c}");
        assert!(*tail.last().unwrap() < 1e-6f64.ln(), "c = {c}");
    }
}
