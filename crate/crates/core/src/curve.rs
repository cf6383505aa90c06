//! Horizontal path integrals of ζ between `s₀ = σ₀ + it₀` and `1 − s̄₀`, and
//! their expansions by repeated integration by parts.
//!
//! Coefficients `(m−1)!/lnᵐN` and `M!/ln^M N` are combined with the powers
//! they multiply in log space, so every term is formed as a single `exp`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotic::Regime;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, DEFAULT_BUDGET};
use crate::zeta::{eta_b, tail_integral, zeta_a, TOL_B_MAX};

pub const MAX_M: usize = 120;
/// Terms whose magnitude would exceed `1e300` are rejected.
pub const OVERFLOW_GUARD: f64 = 1e300;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_ETA_TOL: f64 = 1e-6;
const TAIL_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub sigma0: f64,
    pub t0: f64,
}

impl PathSpec {
    pub fn new(sigma0: f64, t0: f64) -> Result<PathSpec> {
        if !(sigma0 > 0.0 && sigma0 <= 0.5) {
            return domain(format!("sigma0 must lie in (0, 1/2], got {sigma0}"));
        }
        if !t0.is_finite() {
            return domain(format!("t0 must be finite, got {t0}"));
        }
        Ok(PathSpec { sigma0, t0 })
    }

    pub fn start(&self) -> Complex64 {
        Complex64::new(self.sigma0, self.t0)
    }

    /// `1 − s̄₀`.
    pub fn end(&self) -> Complex64 {
        Complex64::new(1.0 - self.sigma0, self.t0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma0 == 0.5
    }

    fn point(&self, sigma: f64) -> Complex64 {
        Complex64::new(sigma, self.t0)
    }
}

fn one_minus(s: Complex64) -> Complex64 {
    Complex64::new(1.0 - s.re, -s.im)
}

/// `∫ ζ(s) ds` from `s₀` to `1 − s̄₀`; exactly zero on a degenerate path.
pub fn direct_quadrature(path: &PathSpec, tol: f64) -> Result<Complex64> {
    if !(tol >= 1e-10) {
        return domain(format!(
            "path quadrature tolerance must be at least 1e-10, got {tol}"
        ));
    }
    if path.is_degenerate() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    integrate_path(path, tol, |s| Ok(zeta_a(s, 1e-13)?.value))
}

fn integrate_path<F>(path: &PathSpec, tol: f64, mut f: F) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut failure = None;
    let r = integrate(
        |sigma| match f(path.point(sigma)) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        path.sigma0,
        1.0 - path.sigma0,
        tol,
        DEFAULT_BUDGET,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// Log-factorial and `ln ln N` tables for the expansion coefficients.
struct Coefficients {
    ln_n: f64,
    ln_ln_n: f64,
    ln_fact: Vec<f64>,
}

impl Coefficients {
    fn new(n: u64, m_max: usize) -> Coefficients {
        let mut ln_fact = vec![0.0; m_max + 2];
        for k in 1..ln_fact.len() {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        let ln_n = (n as f64).ln();
        Coefficients {
            ln_n,
            ln_ln_n: ln_n.ln(),
            ln_fact,
        }
    }

    /// `ln[(m−1)!/lnᵐN]`
    fn ln_c(&self, m: usize) -> f64 {
        self.ln_fact[m - 1] - m as f64 * self.ln_ln_n
    }

    /// `ln[M!/ln^M N]`
    fn ln_c_prime(&self, m: usize) -> f64 {
        self.ln_fact[m] - m as f64 * self.ln_ln_n
    }
}

fn guarded_exp(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re > OVERFLOW_GUARD.ln() {
        return Err(Error::Regime(format!(
            "{what} has magnitude e^{:.1} beyond {OVERFLOW_GUARD:e}; use a smaller M",
            z.re
        )));
    }
    Ok(z.exp())
}

struct Path {
    a: Complex64,
    b: Complex64,
    n: u64,
    coef: Coefficients,
}

impl Path {
    fn new(path: &PathSpec, n: u64, m_max: usize) -> Path {
        Path {
            a: path.start(),
            b: path.end(),
            n,
            coef: Coefficients::new(n, m_max),
        }
    }

    /// `(m−1)!/lnᵐN · N^{1−s}/(1−s)ᵐ`
    fn boundary_piece(&self, s: Complex64, m: usize) -> Result<Complex64> {
        let om = one_minus(s);
        guarded_exp(
            self.coef.ln_c(m) + om * self.coef.ln_n - om.ln() * m as f64,
            "boundary term",
        )
    }

    /// `(m−1)!/lnᵐN · 1/(1−s)^{m−1}`
    fn weight(&self, s: Complex64, m: usize) -> Result<Complex64> {
        guarded_exp(
            self.coef.ln_c(m) - one_minus(s).ln() * (m as f64 - 1.0),
            "expansion weight",
        )
    }

    /// `B_m = −[(m−1)!/lnᵐN · N^{1−s}/(1−s)ᵐ]` taken between the path ends.
    fn boundary(&self, m: usize) -> Result<Complex64> {
        Ok(self.boundary_piece(self.a, m)? - self.boundary_piece(self.b, m)?)
    }

    /// `M!/ln^M N · ∫ N^{1−s}/(1−s)^{M+1} ds` along the path.
    fn remainder(&self, seg: &PathSpec, m: usize, tol: f64) -> Result<Complex64> {
        let ln_c = self.coef.ln_c_prime(m);
        let exponent = |s: Complex64| {
            let om = one_minus(s);
            ln_c + om * self.coef.ln_n - om.ln() * (m as f64 + 1.0)
        };
        let width = 1.0 - 2.0 * seg.sigma0;
        let peak = (0..=32)
            .map(|i| exponent(seg.point(seg.sigma0 + width * i as f64 / 32.0)).re)
            .fold(f64::NEG_INFINITY, f64::max);
        if peak > OVERFLOW_GUARD.ln() {
            return Err(Error::Regime(format!(
                "remainder integrand reaches e^{peak:.1}; use a smaller M"
            )));
        }
        let scale = peak.exp() * width.max(f64::MIN_POSITIVE);
        integrate_path(seg, tol.max(1e-13 * scale), |s| Ok(exponent(s).exp()))
    }

    fn head(&self, s: Complex64) -> Complex64 {
        (1..=self.n)
            .map(|k| (-s * (k as f64).ln()).exp())
            .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
    }

    fn npow(&self, s: Complex64) -> Complex64 {
        (-s * self.coef.ln_n).exp()
    }

    /// `Σ_{n≤N} ∫ n^{−s} ds`
    fn head_integral(&self) -> Complex64 {
        let mut acc = self.b - self.a;
        for k in 2..=self.n {
            let l = (k as f64).ln();
            acc += ((-self.a * l).exp() - (-self.b * l).exp()) / l;
        }
        acc
    }

    fn tail(&self, s: Complex64) -> Result<Complex64> {
        Ok(tail_integral(s, self.n, TAIL_TOL)?.value)
    }
}

fn check_expansion(path: &PathSpec, n: u64, m: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("N must be at least 2, got {n}"));
    }
    if !(1..=MAX_M).contains(&m) {
        return domain(format!("M must lie in [1, {MAX_M}], got {m}"));
    }
    if path.t0 == 0.0 {
        return domain("paths on the real axis (t0 = 0) are rejected");
    }
    Ok(())
}

/// `|∫N^{1−s}/(1−s)ds − Σ_{m≤M}(m−1)!/lnᵐN·B_m − M!/ln^M N·∫N^{1−s}/(1−s)^{M+1}ds|`,
/// both integrals by quadrature.
pub fn ibp_identity_ii(path: &PathSpec, n: u64, m: usize) -> Result<f64> {
    check_expansion(path, n, m)?;
    let p = Path::new(path, n, m);
    let lhs = integrate_path(path, DEFAULT_QUAD_TOL * 1e-2, |s| {
        let om = one_minus(s);
        Ok((om * p.coef.ln_n - om.ln()).exp())
    })?;
    let mut rhs = p.remainder(path, m, DEFAULT_QUAD_TOL * 1e-2)?;
    for k in 1..=m {
        rhs += p.boundary(k)?;
    }
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Part2F,
    Part3Delta,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Part2F => "part2_f",
            Mode::Part3Delta => "part3_delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Exact,
    AtZero,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::AtZero => "at_zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTerm {
    pub name: String,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub mode: Mode,
    pub variant: Variant,
    pub sigma0: f64,
    pub t0: f64,
    pub n: u64,
    pub m: usize,
    pub terms: Vec<NamedTerm>,
    pub term_sum: Complex64,
    pub direct: Complex64,
    pub residual: f64,
    /// Largest-magnitude term, `none` when every term vanishes.
    pub dominant_term: String,
    /// Regimes of `M` against `|s₀|·ln N` and `|1 − s₀|·ln N`.
    pub regime: (Regime, Regime),
    /// Tolerance actually used for `η` in the retained boundary term (part three, exact).
    pub eta_tolerance: Option<f64>,
}

impl DecompositionReport {
    pub fn term(&self, name: &str) -> Option<Complex64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Both regime labels joined by `/`.
    pub fn regime_label(&self) -> String {
        format!("{}/{}", self.regime.0.label(), self.regime.1.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    pub quad_tol: f64,
    pub eta_tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            quad_tol: DEFAULT_QUAD_TOL,
            eta_tol: DEFAULT_ETA_TOL,
        }
    }
}

fn regimes(path: &PathSpec, n: u64, m: usize) -> (Regime, Regime) {
    let ln_n = (n as f64).ln();
    let mf = m as f64;
    (
        Regime::classify(mf, path.start().norm() * ln_n),
        Regime::classify(mf, one_minus(path.start()).norm() * ln_n),
    )
}

/// Midpoint of `(|s₀| ln N, e|1 − s₀| ln N)`, clamped to `[1, 120]`.
pub fn default_m(path: &PathSpec, n: u64) -> usize {
    let ln_n = (n as f64).ln();
    let lo = path.start().norm() * ln_n;
    let hi = std::f64::consts::E * one_minus(path.start()).norm() * ln_n;
    (0.5 * (lo + hi)).round().clamp(1.0, MAX_M as f64) as usize
}

fn finish(
    mode: Mode,
    variant: Variant,
    path: &PathSpec,
    n: u64,
    m: usize,
    terms: Vec<NamedTerm>,
    direct: Complex64,
    eta_tolerance: Option<f64>,
) -> DecompositionReport {
    let term_sum = terms
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, t| acc + t.value);
    let dominant_term = terms
        .iter()
        .filter(|t| t.value.norm() > 0.0)
        .max_by(|x, y| x.value.norm().total_cmp(&y.value.norm()))
        .map_or_else(|| "none".to_string(), |t| t.name.clone());
    DecompositionReport {
        mode,
        variant,
        sigma0: path.sigma0,
        t0: path.t0,
        n,
        m,
        residual: (term_sum - direct).norm(),
        terms,
        term_sum,
        direct,
        dominant_term,
        regime: regimes(path, n, m),
        eta_tolerance,
    }
}

fn named(name: &str, value: Complex64) -> NamedTerm {
    NamedTerm {
        name: name.to_string(),
        value,
    }
}

pub fn decompose_part2(
    path: &PathSpec,
    n: u64,
    m: usize,
    variant: Variant,
) -> Result<DecompositionReport> {
    decompose_part2_with(path, n, m, variant, &DecomposeOptions::default())
}

/// `f₁ … f₄` of the truncated-sum expansion. The exact variant adds
/// `Σ_m (m−1)!/lnᵐN·[ζ(s₀)/(1−s₀)^{m−1} − ζ(1−s̄₀)/s̄₀^{m−1}]`, the quantity the
/// at-zero variant assumes to vanish.
pub fn decompose_part2_with(
    path: &PathSpec,
    n: u64,
    m: usize,
    variant: Variant,
    opts: &DecomposeOptions,
) -> Result<DecompositionReport> {
    check_expansion(path, n, m)?;
    let p = Path::new(path, n, m);
    let (a, b) = (p.a, p.b);
    let (h_a, h_b) = (p.head(a), p.head(b));
    let (t_a, t_b) = (p.tail(a)?, p.tail(b)?);
    let (np_a, np_b) = (p.npow(a), p.npow(b));

    let mut head_sum = Complex64::new(0.0, 0.0);
    let mut half_sum = Complex64::new(0.0, 0.0);
    let mut tail_sum = Complex64::new(0.0, 0.0);
    let mut zeta_sum = Complex64::new(0.0, 0.0);
    // ζ at each end from the same N-truncated pieces.
    let zeta_a_end = h_a - np_a * n as f64 / one_minus(a) - 0.5 * np_a + a * t_a;
    let zeta_b_end = h_b - np_b * n as f64 / one_minus(b) - 0.5 * np_b + b * t_b;
    for k in 1..=m {
        let (wa, wb) = (p.weight(a, k)?, p.weight(b, k)?);
        head_sum += wa * h_a - wb * h_b;
        if k >= 2 {
            half_sum += wa * np_a - wb * np_b;
        }
        tail_sum += wa * a * t_a - wb * b * t_b;
        zeta_sum += wa * zeta_a_end - wb * zeta_b_end;
    }
    let remainder = p.remainder(path, m, opts.quad_tol * 1e-2)?;
    let f1 = p.head_integral() - remainder - head_sum;
    let f2 = 0.5 * half_sum;
    let f3 = -tail_sum;
    let f4 = if path.is_degenerate() {
        Complex64::new(0.0, 0.0)
    } else {
        integrate_path(path, opts.quad_tol * 1e-2, |s| Ok(s * p.tail(s)?))?
    };
    let mut terms = vec![
        named("f1", f1),
        named("f2", f2),
        named("f3", f3),
        named("f4", f4),
    ];
    if variant == Variant::Exact {
        terms.push(named("zeta_boundary", zeta_sum));
    }
    let direct = direct_quadrature(path, opts.quad_tol)?;
    Ok(finish(
        Mode::Part2F,
        variant,
        path,
        n,
        m,
        terms,
        direct,
        None,
    ))
}

pub fn decompose_part3(
    path: &PathSpec,
    n: u64,
    m: usize,
    variant: Variant,
) -> Result<DecompositionReport> {
    decompose_part3_with(path, n, m, variant, &DecomposeOptions::default())
}

/// `η(s)` by the `[x] − x` integral, loosening the tolerance by factors of 100
/// up to the form's limit when the interval budget is exceeded.
fn eta_with_fallback(s: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let mut t = tol;
    loop {
        match eta_b(s, t) {
            Ok(v) => return Ok((v, t)),
            Err(Error::Precision(_)) if t * 100.0 <= TOL_B_MAX * (1.0 + 1e-12) => t *= 100.0,
            Err(e) => return Err(e),
        }
    }
}

/// The five terms of `Δ(s₀, N)`. The exact variant also keeps the boundary
/// term `[s²·η(s)]` between the path ends, so the sum tends to `∫ζ ds` as `N` grows.
pub fn decompose_part3_with(
    path: &PathSpec,
    n: u64,
    m: usize,
    variant: Variant,
    opts: &DecomposeOptions,
) -> Result<DecompositionReport> {
    check_expansion(path, n, m)?;
    let p = Path::new(path, n, m + 1);
    let (a, b) = (p.a, p.b);
    let d1 = a * p.head(a) - b * p.head(b);
    let d2 = p.head_integral();
    let nf = n as f64;
    let d3 = b / one_minus(b) * p.npow(b) * nf - a / one_minus(a) * p.npow(a) * nf;
    let mut d4 = Complex64::new(0.0, 0.0);
    for k in 1..=m + 1 {
        d4 -= p.boundary(k)?;
    }
    let d5 = -p.remainder(path, m + 1, opts.quad_tol * 1e-2)?;
    let mut terms = vec![
        named("d1", d1),
        named("d2", d2),
        named("d3", d3),
        named("d4", d4),
        named("d5", d5),
    ];
    let mut eta_tolerance = None;
    if variant == Variant::Exact {
        let boundary = if path.is_degenerate() {
            Complex64::new(0.0, 0.0)
        } else {
            let (eta_b_end, tb) = eta_with_fallback(b, opts.eta_tol)?;
            let (eta_a_end, ta) = eta_with_fallback(a, opts.eta_tol)?;
            eta_tolerance = Some(ta.max(tb));
            b * b * eta_b_end - a * a * eta_a_end
        };
        terms.push(named("boundary", boundary));
    }
    let direct = direct_quadrature(path, opts.quad_tol)?;
    Ok(finish(
        Mode::Part3Delta,
        variant,
        path,
        n,
        m,
        terms,
        direct,
        eta_tolerance,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sigma0: f64,
    pub t0: f64,
    pub n: u64,
    /// `(N^{1−σ₀} − N^{σ₀})/(σ₀ ln N)`
    pub head_sum_bound: f64,
    /// `|Σ_{n≤N} ∫ n^{−s} ds|`
    pub head_sum_observed: f64,
    /// `2|1 − s̄₀| N^{1−σ₀}/(1 − σ₀)`
    pub first_sum_bound: f64,
    /// `|Σ_{n≤N} (s₀ n^{−s₀} − (1 − s̄₀) n^{−(1−s̄₀)})|`
    pub first_sum_observed: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.head_sum_observed <= self.head_sum_bound
            && self.first_sum_observed <= self.first_sum_bound
    }
}

pub fn bound_functions(path: &PathSpec, n: u64) -> Result<BoundReport> {
    if n < 2 {
        return domain(format!("N must be at least 2, got {n}"));
    }
    if !(path.sigma0 < 0.5) {
        return domain("bounds are undefined on a degenerate path");
    }
    let p = Path::new(path, n, 1);
    let nf = n as f64;
    let s0 = path.sigma0;
    Ok(BoundReport {
        sigma0: s0,
        t0: path.t0,
        n,
        head_sum_bound: (nf.powf(1.0 - s0) - nf.powf(s0)) / (s0 * nf.ln()),
        head_sum_observed: p.head_integral().norm(),
        first_sum_bound: 2.0 * p.b.norm() * nf.powf(1.0 - s0) / (1.0 - s0),
        first_sum_observed: (p.a * p.head(p.a) - p.b * p.head(p.b)).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GRow {
    pub m: usize,
    /// Remainder integral plus the double sum over `n ≤ N`, `m ≤ M`.
    pub g_statement: Complex64,
    /// `∫N^{1−s}/(1−s)ds` plus the half-power and tail-integral sums.
    pub g_proof: Complex64,
    pub step_statement: f64,
    pub step_proof: f64,
    /// `|½·M!/ln^{M+1}N·[…] − M!/ln^{M+1}N·[…]|`, the single-term difference.
    pub step_displayed: f64,
}

/// `g(N, M)` in both of its forms for `M` in `m_lo..=m_hi`, with the step to `M + 1`.
/// The two forms differ by `Σ_m (m−1)!/lnᵐN·[ζ(s₀)/(1−s₀)^{m−1} − ζ(1−s̄₀)/s̄₀^{m−1}]`.
pub fn g_sequence(path: &PathSpec, n: u64, m_lo: usize, m_hi: usize) -> Result<Vec<GRow>> {
    check_expansion(path, n, m_lo)?;
    check_expansion(path, n, m_hi)?;
    if m_lo > m_hi {
        return Err(Error::RangeInverted {
            lo: m_lo as u64,
            hi: m_hi as u64,
        });
    }
    let p = Path::new(path, n, m_hi + 1);
    let (a, b) = (p.a, p.b);
    let (h_a, h_b) = (p.head(a), p.head(b));
    let (t_a, t_b) = (p.tail(a)?, p.tail(b)?);
    let (np_a, np_b) = (p.npow(a), p.npow(b));
    let first = integrate_path(path, DEFAULT_QUAD_TOL * 1e-2, |s| {
        let om = one_minus(s);
        Ok((om * p.coef.ln_n - om.ln()).exp())
    })?;

    // Running sums over m ≤ M.
    let mut head = Complex64::new(0.0, 0.0);
    let mut half = Complex64::new(0.0, 0.0);
    let mut tail = Complex64::new(0.0, 0.0);
    let mut statement = Vec::new();
    let mut proof = Vec::new();
    let mut displayed = Vec::new();
    for k in 1..=m_hi + 1 {
        let (wa, wb) = (p.weight(a, k)?, p.weight(b, k)?);
        let half_k = wa * np_a - wb * np_b;
        let tail_k = wa * a * t_a - wb * b * t_b;
        head += wa * h_a - wb * h_b;
        half += half_k;
        tail += tail_k;
        if k >= m_lo {
            let rem = p.remainder(path, k, DEFAULT_QUAD_TOL * 1e-2)?;
            statement.push(rem + head);
            proof.push(first + 0.5 * half - tail);
        }
        if k > m_lo {
            displayed.push((0.5 * half_k - tail_k).norm());
        }
    }
    Ok((m_lo..=m_hi)
        .enumerate()
        .map(|(i, m)| GRow {
            m,
            g_statement: statement[i],
            g_proof: proof[i],
            step_statement: (statement[i + 1] - statement[i]).norm(),
            step_proof: (proof[i + 1] - proof[i]).norm(),
            step_displayed: displayed[i],
        })
        .collect())
}
