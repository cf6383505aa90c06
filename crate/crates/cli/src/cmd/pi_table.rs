use serde_json::json;
use zetalab_core::asymptotic::{fit_beta, in_chebyshev_band, in_second_order_band, PiRow};
use zetalab_core::primes::pi_exact_many;

use crate::config::RunConfig;
use crate::output::{fmt_f, fmt_opt, Outcome};
use crate::CliError;

pub const DEFAULT_PHI_SLACK: f64 = 0.25;

const HEADER: [&str; 16] = [
    "x",
    "pi",
    "n",
    "pi_star",
    "delta_n",
    "delta_n1",
    "phi",
    "phi_star",
    "gap",
    "sqrt_x_log_x",
    "li",
    "abs_pi_minus_li",
    "chebyshev_band",
    "second_order_band",
    "failed_checks",
    "pass",
];

fn default_xs() -> Vec<u64> {
    (3..=9).map(|k| 10u64.pow(k)).collect()
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let xs = cfg.x_list.clone().unwrap_or_else(default_xs);
    if xs.is_empty() {
        return Err(CliError::Config("x_list is empty".into()));
    }
    if let Some(&x) = xs.iter().find(|&&x| x < 3) {
        return Err(CliError::Config(format!(
            "every x must be at least 3, got {x}"
        )));
    }
    let slack = cfg.phi_slack.unwrap_or(DEFAULT_PHI_SLACK);
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(CliError::Config(format!(
            "phi_slack must be non-negative, got {slack}"
        )));
    }
    let limits = cfg.limits()?;
    let pis = pi_exact_many(&xs, &limits)?;

    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&x, &pi) in xs.iter().zip(&pis) {
        let row = PiRow::build(x, pi)?;
        let failed = row.failures(slack);
        if !failed.is_empty() {
            failures.push(format!("x={x}: {}", failed.join("+")));
        }
        let cheb = in_chebyshev_band(x, pi);
        let second = in_second_order_band(x, pi);
        rows.push(vec![
            x.to_string(),
            pi.to_string(),
            fmt_opt(row.n),
            fmt_opt(row.pi_star.map(fmt_f)),
            fmt_opt(row.delta_n.map(fmt_f)),
            fmt_opt(row.delta_n1.map(fmt_f)),
            fmt_opt(row.phi.map(fmt_f)),
            fmt_f(row.phi_star),
            fmt_opt(row.gap.map(fmt_f)),
            fmt_f(row.sqrt_x_log_x),
            fmt_f(row.li),
            fmt_f(row.abs_pi_minus_li),
            cheb.to_string(),
            second.to_string(),
            failed.join("+"),
            failed.is_empty().to_string(),
        ]);
        records.push(json!({
            "row": row,
            "chebyshev_band": cheb,
            "second_order_band": second,
            "failed_checks": failed,
        }));
    }

    let mut fit_xs: Vec<u64> = xs.iter().copied().filter(|&x| x >= 100).collect();
    fit_xs.sort_unstable();
    fit_xs.dedup();
    let beta = if fit_xs.is_empty() {
        json!(null)
    } else {
        match fit_beta(&fit_xs, &limits) {
            Ok(fit) => json!(fit),
            Err(e) => json!({ "error": e.to_string() }),
        }
    };

    Ok(Outcome {
        header: HEADER.to_vec(),
        rows,
        json: json!({ "rows": records, "beta_fit": beta }),
        failures,
        summary: json!({ "beta_fit": beta }),
        settings: json!({
            "x_list": xs,
            "phi_slack": slack,
            "sieve_ceiling": limits.sieve_ceiling,
            "segment_size": limits.segment_size,
        }),
    })
}
