//! Truncated asymptotic series for π(x), bracketing, gap bounds, Li(x) and
//! the factorial-over-power function used in the Stirling regime analysis.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::primes::{isqrt, pi_exact, pi_exact_many, Limits};
use crate::quad::{integrate, DEFAULT_BUDGET};

pub const LI_TOLERANCE: f64 = 1e-6;

fn check_x(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return domain(format!("x must be finite and at least 2, got {x}"));
    }
    Ok(x.ln())
}

/// `x / ln x`.
pub fn scale(x: f64) -> f64 {
    x / x.ln()
}

/// `η(x) = π(x) / (x / ln x)`.
pub fn eta(x: u64, pi: u64) -> f64 {
    pi as f64 / scale(x as f64)
}

/// Series terms `t_n = n!/lnⁿx` and partial sums `η*(x, n)` for `n = 0..=n_max`,
/// plus the residuals `δ_n = η − η*` when `π(x)` is supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesState {
    pub x: f64,
    pub terms: Vec<f64>,
    pub partial: Vec<f64>,
    pub eta: Option<f64>,
    pub delta: Vec<f64>,
}

impl SeriesState {
    pub fn new(x: f64, n_max: usize) -> Result<SeriesState> {
        let ln_x = check_x(x)?;
        let mut terms = Vec::with_capacity(n_max + 1);
        let mut partial = Vec::with_capacity(n_max + 1);
        let (mut t, mut sum) = (1.0f64, 0.0f64);
        for n in 0..=n_max {
            if n > 0 {
                t *= n as f64 / ln_x;
            }
            sum += t;
            terms.push(t);
            partial.push(sum);
        }
        Ok(SeriesState {
            x,
            terms,
            partial,
            eta: None,
            delta: Vec::new(),
        })
    }

    pub fn with_pi(x: u64, pi: u64, n_max: usize) -> Result<SeriesState> {
        let mut s = SeriesState::new(x as f64, n_max)?;
        let e = eta(x, pi);
        s.delta = s.partial.iter().map(|p| e - p).collect();
        s.eta = Some(e);
        Ok(s)
    }
}

/// `π*(x, N) = (x/ln x)·Σ_{n≤N} n!/lnⁿx`.
pub fn pi_star(x: f64, n: usize) -> Result<f64> {
    let s = SeriesState::new(x, n)?;
    Ok(scale(x) * s.partial[n])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BracketOutcome {
    Found {
        n: usize,
        delta_n: f64,
        delta_n1: f64,
    },
    /// No `N` in `0..=window` satisfies `π*(x,N) ≤ π(x) < π*(x,N+1)`.
    NoBracket { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub x: u64,
    pub pi: u64,
    pub eta: f64,
    pub outcome: BracketOutcome,
}

impl Bracket {
    pub fn n(&self) -> Option<usize> {
        match self.outcome {
            BracketOutcome::Found { n, .. } => Some(n),
            BracketOutcome::NoBracket { .. } => None,
        }
    }
}

/// Search window upper end, `⌈ln x⌉`.
pub fn bracket_window(x: u64) -> usize {
    (x as f64).ln().ceil() as usize
}

/// Smallest `N ≤ ⌈ln x⌉` with `δ_N ≥ 0 > δ_{N+1}`, given the exact count `pi`.
pub fn bracket_with_pi(x: u64, pi: u64) -> Result<Bracket> {
    if x < 2 {
        return domain(format!("bracketing requires x >= 2, got {x}"));
    }
    let window = bracket_window(x);
    let s = SeriesState::with_pi(x, pi, window + 1)?;
    let outcome = (0..=window)
        .find(|&n| s.delta[n] >= 0.0 && s.delta[n + 1] < 0.0)
        .map(|n| BracketOutcome::Found {
            n,
            delta_n: s.delta[n],
            delta_n1: s.delta[n + 1],
        })
        .unwrap_or(BracketOutcome::NoBracket { window });
    Ok(Bracket {
        x,
        pi,
        eta: s.eta.unwrap(),
        outcome,
    })
}

pub fn bracket_n(x: u64, limits: &Limits) -> Result<Bracket> {
    if x < 2 {
        return domain(format!("bracketing requires x >= 2, got {x}"));
    }
    bracket_with_pi(x, pi_exact(x, limits)?)
}

/// `φ(x, N) = ln x / (N + 3/2)`.
pub fn phi_ratio(x: f64, n: usize) -> Result<f64> {
    Ok(check_x(x)? / (n as f64 + 1.5))
}

/// `φ*(x) = 5.1 − 5.5·ln 10 / ln x`.
pub fn phi_star(x: f64) -> Result<f64> {
    Ok(5.1 - 5.5 * std::f64::consts::LN_10 / check_x(x)?)
}

/// `g(x, N) = π*(x, N+1) − π*(x, N) = (x/ln x)·(N+1)!/ln^{N+1}x`.
pub fn gap_bound(x: f64, n: usize) -> Result<f64> {
    let s = SeriesState::new(x, n + 1)?;
    Ok(scale(x) * s.terms[n + 1])
}

/// `Li(x) = ∫₂ˣ dt/ln t`, integrated in `u = ln t` as `∫ eᵘ/u du`.
pub fn li_quadrature(x: f64) -> Result<f64> {
    let ln_x = check_x(x)?;
    let r = integrate(
        |u: f64| u.exp() / u,
        std::f64::consts::LN_2,
        ln_x,
        LI_TOLERANCE,
        DEFAULT_BUDGET,
    )?;
    Ok(r.value)
}

/// `7/8 < η < 9/8`.
pub fn in_chebyshev_band(x: u64, pi: u64) -> bool {
    let e = eta(x, pi);
    e > 0.875 && e < 1.125
}

/// `1 + 1/(2 ln x) < η < 1 + 3/(2 ln x)`.
pub fn in_second_order_band(x: u64, pi: u64) -> bool {
    let e = eta(x, pi);
    let l = (x as f64).ln();
    e > 1.0 + 0.5 / l && e < 1.0 + 1.5 / l
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    pub sample_xs: Vec<u64>,
    /// `τ(x) − [x/ln x + β·π(√x)·√x/(2 ln x) − √x]` per sample.
    pub residuals: Vec<f64>,
    /// Smallest sample from which every residual (at it and all larger samples) is non-negative.
    pub x0_observed: Option<u64>,
}

/// Least-squares `β` for `τ(x) ≈ x/ln x + β·π(√x)·√x/(2 ln x) − √x`.
pub fn fit_beta(xs: &[u64], limits: &Limits) -> Result<BetaFit> {
    if xs.is_empty() {
        return Err(Error::DegenerateFit("no sample points".into()));
    }
    if let Some(&bad) = xs.iter().find(|&&x| x < 100) {
        return domain(format!("fit samples must be at least 100, got {bad}"));
    }
    let roots: Vec<u64> = xs.iter().map(|&x| isqrt(x)).collect();
    let mut wanted = xs.to_vec();
    wanted.extend(&roots);
    let counts = pi_exact_many(&wanted, limits)?;
    let (pis, pi_roots) = counts.split_at(xs.len());

    let mut design = Vec::with_capacity(xs.len());
    let mut target = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let xf = x as f64;
        let tau = (pis[i] - pi_roots[i]) as f64;
        design.push(pi_roots[i] as f64 * xf.sqrt() / (2.0 * xf.ln()));
        target.push(tau - scale(xf) + xf.sqrt());
    }
    if design.len() >= 2 && design.iter().all(|&a| a == design[0]) {
        return Err(Error::DegenerateFit(
            "all samples share the same design value".into(),
        ));
    }
    let beta = design.iter().zip(&target).map(|(a, y)| a * y).sum::<f64>()
        / design.iter().map(|a| a * a).sum::<f64>();
    let residuals: Vec<f64> = design
        .iter()
        .zip(&target)
        .map(|(a, y)| y - beta * a)
        .collect();

    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by_key(|&i| xs[i]);
    let mut x0_observed = None;
    for &i in order.iter().rev() {
        if residuals[i] < 0.0 {
            break;
        }
        x0_observed = Some(xs[i]);
    }
    Ok(BetaFit {
        beta,
        sample_xs: xs.to_vec(),
        residuals,
        x0_observed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n ≤ α`
    AtMostAlpha,
    /// `α < n < eα`
    Between,
    /// `n ≥ eα`
    AtLeastEAlpha,
}

impl Regime {
    pub fn classify(n: f64, alpha: f64) -> Regime {
        if n <= alpha {
            Regime::AtMostAlpha
        } else if n < std::f64::consts::E * alpha {
            Regime::Between
        } else {
            Regime::AtLeastEAlpha
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::AtMostAlpha => "M<=a",
            Regime::Between => "a<M<ea",
            Regime::AtLeastEAlpha => "M>=ea",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingEval {
    pub n: u64,
    pub alpha: f64,
    pub ln_phi: f64,
    /// `n!/αⁿ`; infinite or zero when outside the `f64` range.
    pub phi: f64,
    pub regime: Regime,
}

impl StirlingEval {
    /// Natural log of `√(2πn)·(n/(eα))ⁿ`, the lower Stirling envelope.
    pub fn ln_lower_envelope(&self) -> f64 {
        let n = self.n as f64;
        0.5 * (2.0 * std::f64::consts::PI * n).ln() + n * (n / self.alpha).ln() - n
    }
}

/// `Φ(n, α) = n!/αⁿ` in log space.
pub fn stirling_phi(n: u64, alpha: f64) -> Result<StirlingEval> {
    if n < 1 {
        return domain("stirling_phi requires n >= 1");
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return domain(format!("alpha must be positive and finite, got {alpha}"));
    }
    let ln_phi = ln_gamma(n as f64 + 1.0) - n as f64 * alpha.ln();
    Ok(StirlingEval {
        n,
        alpha,
        ln_phi,
        phi: ln_phi.exp(),
        regime: Regime::classify(n as f64, alpha),
    })
}

/// `ln[N^{1−σ}·M·Φ(M, α)]` along `α = M`, `N = e^{M/c}` (so `α = c·ln N`).
pub fn ln_stirling_decay(sigma: f64, c: f64, m: u64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("c must be positive, got {c}"));
    }
    let ev = stirling_phi(m, m as f64)?;
    Ok((1.0 - sigma) * m as f64 / c + (m as f64).ln() + ev.ln_phi)
}

/// One row of the π-table report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiRow {
    pub x: u64,
    pub pi: u64,
    pub n: Option<usize>,
    pub pi_star: Option<f64>,
    pub delta_n: Option<f64>,
    pub delta_n1: Option<f64>,
    pub phi: Option<f64>,
    pub phi_star: f64,
    pub gap: Option<f64>,
    pub sqrt_x_log_x: f64,
    pub li: f64,
    pub abs_pi_minus_li: f64,
}

impl PiRow {
    pub fn build(x: u64, pi: u64) -> Result<PiRow> {
        let b = bracket_with_pi(x, pi)?;
        let xf = x as f64;
        let li = li_quadrature(xf)?;
        let (n, pi_star_v, dn, dn1, phi, gap) = match b.outcome {
            BracketOutcome::Found {
                n,
                delta_n,
                delta_n1,
            } => (
                Some(n),
                Some(pi_star(xf, n)?),
                Some(delta_n),
                Some(delta_n1),
                Some(phi_ratio(xf, n)?),
                Some(gap_bound(xf, n)?),
            ),
            BracketOutcome::NoBracket { .. } => (None, None, None, None, None, None),
        };
        Ok(PiRow {
            x,
            pi,
            n,
            pi_star: pi_star_v,
            delta_n: dn,
            delta_n1: dn1,
            phi,
            phi_star: phi_star(xf)?,
            gap,
            sqrt_x_log_x: (xf * xf.ln()).sqrt(),
            li,
            abs_pi_minus_li: (pi as f64 - li).abs(),
        })
    }

    /// Names of the failed checks; empty when the row passes.
    pub fn failures(&self, phi_slack: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        match (self.pi_star, self.gap, self.phi) {
            (Some(ps), Some(g), Some(phi)) => {
                let diff = self.pi as f64 - ps;
                if !(diff >= 0.0 && diff < g) {
                    out.push("gap");
                }
                if phi > self.phi_star + phi_slack {
                    out.push("phi");
                }
            }
            _ => out.push("bracket"),
        }
        if !(self.abs_pi_minus_li < self.sqrt_x_log_x) {
            out.push("li");
        }
        out
    }
}
