use serde_json::json;
use zetalab_core::zeros::{find_zeros, DEFAULT_ZERO_TOL};
use zetalab_core::zeta::{centered_components, default_n, uv_components, TOL_B_MAX, TOL_B_MIN};

use crate::config::{positive, RunConfig};
use crate::output::{fmt_f, fmt_opt, Outcome};
use crate::CliError;

pub const DEFAULT_T_RANGE: (f64, f64) = (0.0, 60.0);
pub const DEFAULT_STEP: f64 = 0.5;
pub const DEFAULT_THRESHOLD: f64 = 0.01;
/// `|du|` and `|dv|` at refined zeros must stay below this.
pub const AT_ZERO_MAX: f64 = 1e-5;

const HEADER: [&str; 12] = [
    "sigma", "t", "u", "v", "u_mirror", "v_mirror", "du", "dv", "u_eta_c", "v_eta_c", "u_zeta_c",
    "v_zeta_c",
];

fn default_sigmas() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

fn t_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sigmas = cfg.sigma_list.clone().unwrap_or_else(default_sigmas);
    if sigmas.is_empty() {
        return Err(CliError::Config("sigma_list is empty".into()));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
        return Err(CliError::Config(format!(
            "every sigma must lie in (0, 1), got {s}"
        )));
    }
    let t_lo = cfg.t_lo.unwrap_or(DEFAULT_T_RANGE.0);
    let t_hi = cfg.t_hi.unwrap_or(DEFAULT_T_RANGE.1);
    if !(t_lo >= 0.0 && t_lo <= t_hi && t_hi.is_finite()) {
        return Err(CliError::Config(format!(
            "t range must satisfy 0 <= t_lo <= t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let step = positive("step", cfg.step.unwrap_or(DEFAULT_STEP))?;
    let threshold = positive("threshold", cfg.threshold.unwrap_or(DEFAULT_THRESHOLD))?;
    let eta_tol = cfg.tol_in(TOL_B_MAX, TOL_B_MIN, TOL_B_MAX)?;
    if let Some(n) = cfg.n_terms {
        if n < 10 {
            return Err(CliError::Config(format!(
                "n_terms must be at least 10, got {n}"
            )));
        }
    }
    let terms = |sigma: f64, t: f64| {
        cfg.n_terms
            .unwrap_or_else(|| default_n(zetalab_core::zeta::ComplexValue::new(sigma, t)))
    };

    let ts = t_grid(t_lo, t_hi, step);
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    for &sigma in &sigmas {
        for &t in &ts {
            let pair = uv_components(sigma, t, terms(sigma, t))?;
            let res = pair.residual();
            max_residual = max_residual.max(res.max_abs());
            let centered = centered_components(sigma - 0.5, t, eta_tol).ok();
            rows.push(vec![
                fmt_f(sigma),
                fmt_f(t),
                fmt_f(pair.u),
                fmt_f(pair.v),
                fmt_f(pair.u_mirror),
                fmt_f(pair.v_mirror),
                fmt_f(res.du),
                fmt_f(res.dv),
                fmt_opt(centered.map(|c| fmt_f(c.u_eta))),
                fmt_opt(centered.map(|c| fmt_f(c.v_eta))),
                fmt_opt(centered.map(|c| fmt_f(c.u_zeta))),
                fmt_opt(centered.map(|c| fmt_f(c.v_zeta))),
            ]);
        }
    }

    let mut failures = Vec::new();
    if !(max_residual > threshold) {
        failures.push(format!(
            "max grid residual {max_residual:e} does not exceed threshold {threshold:e}"
        ));
    }
    let mut at_zeros = Vec::new();
    if t_lo < t_hi {
        for z in find_zeros(t_lo, t_hi, 0.1, DEFAULT_ZERO_TOL)? {
            let res = uv_components(0.5, z.t, terms(0.5, z.t))?.residual();
            if !(res.du.abs() < AT_ZERO_MAX && res.dv.abs() < AT_ZERO_MAX) {
                failures.push(format!("residual at zero t={} is {:e}", z.t, res.max_abs()));
            }
            at_zeros.push(res);
        }
    }

    Ok(Outcome {
        header: HEADER.to_vec(),
        rows,
        json: json!({ "max_residual": max_residual, "at_zeros": at_zeros }),
        failures,
        summary: json!({ "max_residual": max_residual, "zeros_checked": at_zeros.len() }),
        settings: json!({
            "sigma_list": sigmas, "t_lo": t_lo, "t_hi": t_hi, "step": step,
            "threshold": threshold, "eta_tol": eta_tol, "n_terms": cfg.n_terms,
            "at_zero_max": AT_ZERO_MAX,
        }),
    })
}
