use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use zetalab_core::curve::{
    decompose_part2_with, decompose_part3_with, default_m, ibp_identity_ii, DecomposeOptions,
    DecompositionReport, PathSpec, Variant, DEFAULT_ETA_TOL, DEFAULT_QUAD_TOL,
};
use zetalab_core::zeros::{find_zeros, DEFAULT_ZERO_TOL};
use zetalab_core::Error as CoreError;

use crate::config::RunConfig;
use crate::output::{fmt_f, fmt_opt, Outcome};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_PATHS: [(f64, f64); 3] = [(0.4, 10.0), (0.3, 20.0), (0.25, 30.0)];
pub const DEFAULT_N_LIST: [u64; 3] = [50, 100, 200];
pub const DEFAULT_ZERO_RANGE: (f64, f64) = (10.0, 35.0);
pub const ZERO_COUNT: usize = 5;
pub const EXACT_RESIDUAL_MAX: f64 = 1e-6;
pub const IBP_RESIDUAL_MAX: f64 = 1e-8;

const HEADER: [&str; 18] = [
    "group",
    "mode",
    "variant",
    "sigma0",
    "t0",
    "n",
    "m",
    "residual",
    "ibp_residual",
    "dominant_term",
    "regime",
    "direct_re",
    "direct_im",
    "term_sum_re",
    "term_sum_im",
    "eta_tol",
    "status",
    "note",
];

struct Row {
    group: &'static str,
    path: PathSpec,
    n: u64,
    m: usize,
    variant: Variant,
    mode: &'static str,
    report: Option<DecompositionReport>,
    ibp: Option<f64>,
    status: &'static str,
    note: String,
}

impl Row {
    fn cells(&self) -> Vec<String> {
        let r = self.report.as_ref();
        vec![
            self.group.to_string(),
            self.mode.to_string(),
            self.variant.label().to_string(),
            fmt_f(self.path.sigma0),
            fmt_f(self.path.t0),
            self.n.to_string(),
            self.m.to_string(),
            fmt_opt(r.map(|r| fmt_f(r.residual))),
            fmt_opt(self.ibp.map(fmt_f)),
            fmt_opt(r.map(|r| r.dominant_term.clone())),
            fmt_opt(r.map(|r| r.regime_label())),
            fmt_opt(r.map(|r| fmt_f(r.direct.re))),
            fmt_opt(r.map(|r| fmt_f(r.direct.im))),
            fmt_opt(r.map(|r| fmt_f(r.term_sum.re))),
            fmt_opt(r.map(|r| fmt_f(r.term_sum.im))),
            fmt_opt(r.and_then(|r| r.eta_tolerance).map(fmt_f)),
            self.status.to_string(),
            self.note.clone(),
        ]
    }

    fn record(&self) -> Value {
        json!({
            "group": self.group,
            "n": self.n,
            "m": self.m,
            "sigma0": self.path.sigma0,
            "t0": self.path.t0,
            "variant": self.variant,
            "ibp_residual": self.ibp,
            "report": self.report,
            "status": self.status,
            "note": self.note,
        })
    }
}

/// Runs a decomposition; an overflow-regime error becomes a flagged row.
fn attempt(
    result: Result<DecompositionReport, CoreError>,
) -> Result<(Option<DecompositionReport>, String), CliError> {
    match result {
        Ok(r) => Ok((Some(r), String::new())),
        Err(CoreError::Regime(msg)) => Ok((None, msg)),
        Err(e) => Err(e.into()),
    }
}

fn sample_tuple(rng: &mut ChaCha8Rng) -> (PathSpec, u64, usize) {
    let sigma0 = rng.gen_range(0.1..0.45);
    let t0 = rng.gen_range(5.0..40.0);
    let n = rng.gen_range(10u64..=200);
    let path = PathSpec { sigma0, t0 };
    let m_max = ((path.start().norm() * (n as f64).ln()).floor() as usize).clamp(1, 20);
    let m = rng.gen_range(1..=m_max);
    (path, n, m)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let quad_tol = cfg.tol_in(DEFAULT_QUAD_TOL, 1e-10, 1e-4)?;
    let paths = cfg.paths.clone().unwrap_or_else(|| DEFAULT_PATHS.to_vec());
    let n_list = cfg
        .n_list
        .clone()
        .unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    if n_list.is_empty() || n_list.iter().any(|&n| n < 2) {
        return Err(CliError::Config(
            "n_list must be non-empty with every N >= 2".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(
            "n_list must be strictly increasing".into(),
        ));
    }
    let paths = paths
        .iter()
        .map(|&(s, t)| PathSpec::new(s, t))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(m) = cfg.m {
        if !(1..=zetalab_core::curve::MAX_M).contains(&m) {
            return Err(CliError::Config(format!("m must lie in [1, 120], got {m}")));
        }
    }
    let zero_lo = cfg.t_lo.unwrap_or(DEFAULT_ZERO_RANGE.0);
    let zero_hi = cfg.t_hi.unwrap_or(DEFAULT_ZERO_RANGE.1);
    let opts = DecomposeOptions {
        quad_tol,
        eta_tol: DEFAULT_ETA_TOL,
    };
    let pick_m = |p: &PathSpec, n: u64| cfg.m.unwrap_or_else(|| default_m(p, n));

    let mut rows: Vec<Row> = Vec::new();
    let mut failures = Vec::new();

    // Exact identities on seeded random tuples.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let (path, n, m) = sample_tuple(&mut rng);
        let ibp = ibp_identity_ii(&path, n, m)?;
        let (report, note) = attempt(decompose_part2_with(&path, n, m, Variant::Exact, &opts))?;
        let ok = report
            .as_ref()
            .is_some_and(|r| r.residual < EXACT_RESIDUAL_MAX)
            && ibp < IBP_RESIDUAL_MAX;
        if !ok {
            failures.push(format!(
                "sample {i}: sigma0={} t0={} N={n} M={m} identity residual too large",
                path.sigma0, path.t0
            ));
        }
        rows.push(Row {
            group: "identity",
            path,
            n,
            m,
            variant: Variant::Exact,
            mode: "part2_f",
            report,
            ibp: Some(ibp),
            status: if ok { "pass" } else { "fail" },
            note,
        });
    }

    // Convergence of the five-term expression as N grows.
    for path in &paths {
        let mut residuals = Vec::new();
        let first = rows.len();
        for &n in &n_list {
            let m = pick_m(path, n);
            let (report, note) = attempt(decompose_part3_with(path, n, m, Variant::Exact, &opts))?;
            residuals.push(report.as_ref().map(|r| r.residual));
            rows.push(Row {
                group: "convergence",
                path: *path,
                n,
                m,
                variant: Variant::Exact,
                mode: "part3_delta",
                report,
                ibp: None,
                status: "pass",
                note,
            });
        }
        let decreasing =
            residuals.iter().all(Option::is_some) && residuals.windows(2).all(|w| w[1] < w[0]);
        if !decreasing {
            failures.push(format!(
                "sigma0={} t0={}: residual not strictly decreasing over N",
                path.sigma0, path.t0
            ));
            for r in &mut rows[first..] {
                r.status = "fail";
            }
        }
    }

    // The zero-substituted variant, on degenerate paths at zeros and between them,
    // and on the off-line paths.
    let n0 = n_list[0];
    let zeros: Vec<f64> = if zero_lo < zero_hi && zero_lo >= 0.0 {
        find_zeros(zero_lo, zero_hi, 0.1, DEFAULT_ZERO_TOL)?
            .into_iter()
            .take(ZERO_COUNT)
            .map(|z| z.t)
            .collect()
    } else {
        return Err(CliError::Config(format!(
            "zero search range must satisfy 0 <= t_lo < t_hi, got [{zero_lo}, {zero_hi}]"
        )));
    };
    let mut at_zero = Vec::new();
    for &t in &zeros {
        at_zero.push(("at_zero_on_zero", PathSpec { sigma0: 0.5, t0: t }));
    }
    for w in zeros.windows(2) {
        at_zero.push((
            "at_zero_midpoint",
            PathSpec {
                sigma0: 0.5,
                t0: 0.5 * (w[0] + w[1]),
            },
        ));
    }
    for p in &paths {
        at_zero.push(("at_zero_offline", *p));
    }
    for (group, path) in at_zero {
        let m = pick_m(&path, n0);
        let (report, note) = attempt(decompose_part2_with(&path, n0, m, Variant::AtZero, &opts))?;
        rows.push(Row {
            group,
            path,
            n: n0,
            m,
            variant: Variant::AtZero,
            mode: "part2_f",
            report,
            ibp: None,
            status: "info",
            note,
        });
    }

    for r in &mut rows {
        if r.report.is_none() {
            r.status = "regime";
        }
    }

    Ok(Outcome {
        header: HEADER.to_vec(),
        rows: rows.iter().map(Row::cells).collect(),
        json: json!({ "rows": rows.iter().map(Row::record).collect::<Vec<_>>(), "zeros": zeros }),
        failures,
        summary: json!({
            "identity_samples": samples,
            "zeros_used": zeros,
        }),
        settings: json!({
            "seed": seed,
            "samples": samples,
            "tol": quad_tol,
            "eta_tol": DEFAULT_ETA_TOL,
            "paths": paths.iter().map(|p| [p.sigma0, p.t0]).collect::<Vec<_>>(),
            "n_list": n_list,
            "m": cfg.m,
            "zero_range": [zero_lo, zero_hi],
        }),
    })
}
