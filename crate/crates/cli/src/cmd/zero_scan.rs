use serde_json::json;
use zetalab_core::zeros::{count_zeros_box, find_zeros, DEFAULT_ZERO_TOL};

use crate::config::{positive, RunConfig};
use crate::output::{fmt_f, Outcome};
use crate::CliError;

pub const DEFAULT_RANGE: (f64, f64) = (10.0, 30.0);
pub const DEFAULT_STEP: f64 = 0.1;
pub const DEFAULT_BOX_POINTS: usize = 400;
pub const BOX_SIGMA: (f64, f64) = (0.05, 0.95);
pub const SIGMA_TOLERANCE: f64 = 1e-6;
const T_CEILING: f64 = 1e3;

const HEADER: [&str; 6] = [
    "index",
    "t",
    "sigma",
    "min_abs",
    "refinement_steps",
    "on_line",
];

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t_lo = cfg.t_lo.unwrap_or(DEFAULT_RANGE.0);
    let t_hi = cfg.t_hi.unwrap_or(DEFAULT_RANGE.1);
    if !(t_lo >= 0.0 && t_hi <= T_CEILING && t_lo < t_hi) {
        return Err(CliError::Config(format!(
            "t range must satisfy 0 <= t_lo < t_hi <= {T_CEILING}, got [{t_lo}, {t_hi}]"
        )));
    }
    let step = positive("step", cfg.step.unwrap_or(DEFAULT_STEP))?;
    let tol = cfg.tol_in(DEFAULT_ZERO_TOL, 1e-12, 1e-4)?;
    let box_points = cfg.box_points.unwrap_or(DEFAULT_BOX_POINTS);
    if box_points < DEFAULT_BOX_POINTS {
        return Err(CliError::Config(format!(
            "box_points must be at least {DEFAULT_BOX_POINTS}, got {box_points}"
        )));
    }

    let zeros = find_zeros(t_lo, t_hi, step, tol)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (i, z) in zeros.iter().enumerate() {
        let on_line = (z.sigma - 0.5).abs() <= SIGMA_TOLERANCE;
        if !on_line {
            failures.push(format!("zero at t={} has sigma={}", z.t, z.sigma));
        }
        rows.push(vec![
            (i + 1).to_string(),
            fmt_f(z.t),
            fmt_f(z.sigma),
            fmt_f(z.min_abs),
            z.refinement_steps.to_string(),
            on_line.to_string(),
        ]);
    }

    // The box count is reported alongside; a zero on its edge is not fatal.
    let winding = match count_zeros_box(BOX_SIGMA, (t_lo, t_hi), box_points) {
        Ok(b) => json!({ "winding": b.winding, "evaluations": b.evaluations,
                         "agrees": b.winding == zeros.len() as i64 }),
        Err(e) => json!({ "error": e.to_string() }),
    };

    Ok(Outcome {
        header: HEADER.to_vec(),
        rows,
        json: json!({ "zeros": zeros, "box": winding }),
        failures,
        summary: json!({ "zeros": zeros.len(), "box": winding }),
        settings: json!({
            "t_lo": t_lo, "t_hi": t_hi, "step": step, "tol": tol,
            "box_sigma": [BOX_SIGMA.0, BOX_SIGMA.1], "box_points": box_points,
        }),
    })
}
