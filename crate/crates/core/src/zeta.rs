//! ζ(s) in the right half-plane from two integral representations.
//!
//! Form A is the truncated sum `Σ_{n≤N} n^{−s} − N^{1−s}/(1−s) − N^{−s}/2 + s·T(s,N)`
//! with `T(s,N) = ∫_N^∞ (½ − {x}) x^{−s−1} dx`. The tail is summed exactly over
//! unit intervals up to `K`, and the remainder past `K` comes from the
//! Euler–Maclaurin expansion with its standard error bound.
//!
//! Form B is `ζ(s) = s·∫_0^∞ ([x] − x) x^{−s−1} dx` on the critical strip,
//! summed over unit intervals up to `K` plus the exact mean of the tail.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type ComplexValue = Complex64;

pub const TOL_A_MIN: f64 = 1e-14;
pub const TOL_A_MAX: f64 = 1e-2;
pub const TOL_B_MIN: f64 = 1e-6;
pub const TOL_B_MAX: f64 = 1e-2;
/// Largest number of unit intervals form B will sum.
pub const FORM_B_BUDGET: u64 = 20_000_000;

// B_{2k}/(2k)! for k = 1..=30.
const BERNOULLI_SCALED: [f64; 30] = [
    0.083_333_333_333_333_33,
    -0.001_388_888_888_888_889,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_7e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_2e-19,
    3.534_707_039_629_467e-21,
    -8.953_517_427_037_546e-23,
    2.267_952_452_337_683e-24,
    -5.744_790_668_872_202e-26,
    1.455_172_475_614_865e-27,
    -3.685_994_940_665_310_3e-29,
    9.336_734_257_095_045e-31,
    -2.365_022_415_700_63e-32,
    5.990_671_762_482_134e-34,
    -1.517_454_884_468_290_3e-35,
    3.843_758_125_454_189e-37,
    -9.736_353_072_646_691e-39,
    2.466_247_044_200_681e-40,
    -6.247_076_741_820_743e-42,
    1.582_403_024_464_491_4e-43,
    -4.008_273_685_948_936e-45,
    1.015_307_585_556_955_7e-46,
    -2.571_804_158_241_871_7e-48,
];

const EPS: f64 = f64::EPSILON;

fn npow(n: f64, s: Complex64) -> Complex64 {
    (-s * n.ln()).exp()
}

fn check_finite(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return domain(format!("s must be finite, got {s}"));
    }
    Ok(())
}

/// `∫_n^{n+1} (n + ½ − x) x^{−s−1} dx` together with the magnitude of the
/// quantities that were combined to form it (for rounding estimates).
fn unit_interval(n: u64, s: Complex64, p_n: Complex64, p_n1: Complex64) -> (Complex64, f64) {
    let nf = n as f64;
    let abs_s = s.norm();
    if nf >= 4.0 * (abs_s + 2.0) {
        // With x = n(1+y): −n^{−s} Σ_{k≥1} C(−s−1,k)·k/(2(k+1)(k+2))·n^{−k−1}
        let h = 1.0 / nf;
        let mut c = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..200u32 {
            let kf = k as f64;
            c = c * (-s - kf) * (h / kf);
            let term = c * (h * kf / (2.0 * (kf + 1.0) * (kf + 2.0)));
            acc += term;
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        let v = -p_n * acc;
        (v, v.norm())
    } else {
        let a = (p_n - p_n1) * (nf + 0.5) / s;
        let b = (p_n1 * (nf + 1.0) - p_n * nf) / (1.0 - s);
        (a - b, a.norm() + b.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIntegral {
    pub value: Complex64,
    /// Euler–Maclaurin truncation bound past the summed intervals.
    pub truncation_bound: f64,
    /// Floating-point rounding estimate.
    pub rounding_bound: f64,
    pub intervals: u64,
}

/// `T(s, N) = ∫_N^∞ (½ − {x}) x^{−s−1} dx` for `ℜ(s) > 0`.
pub fn tail_integral(s: Complex64, n: u64, tol: f64) -> Result<TailIntegral> {
    check_finite(s)?;
    if !(s.re > 0.0) {
        return domain(format!("tail integral requires Re(s) > 0, got {s}"));
    }
    if n < 1 {
        return domain("tail integral requires N >= 1");
    }
    let k_start = n.max(s.norm().ceil() as u64 + 20);
    let mut value = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut p = npow(n as f64, s);
    for m in n..k_start {
        let p_next = npow((m + 1) as f64, s);
        let (v, mag) = unit_interval(m, s, p, p_next);
        value += v;
        magnitude += mag;
        p = p_next;
    }

    // T(s,K) = Σ_k B_{2k}/(2k)!·(s+1)_{2k−2}·K^{−s−2k+1} + R_m
    let kf = k_start as f64;
    let mut r = p / kf;
    let mut em = Complex64::new(0.0, 0.0);
    let mut bound = f64::INFINITY;
    for (i, b) in BERNOULLI_SCALED.iter().enumerate() {
        let k = (i + 1) as f64;
        em += r * *b;
        magnitude += (r * *b).norm();
        r = r * (s + 2.0 * k - 1.0) * (s + 2.0 * k) / (kf * kf);
        bound = match BERNOULLI_SCALED.get(i + 1) {
            Some(next) => (r * *next).norm() * (s + 2.0 * k + 1.0).norm() / (s.re + 2.0 * k + 1.0),
            None => bound,
        };
        if bound <= 1e-3 * tol || bound <= EPS * em.norm() * 1e-2 {
            break;
        }
    }
    if bound > tol {
        return Err(Error::Precision(format!(
            "tail remainder bound {bound:e} exceeds tolerance {tol:e} at s = {s}"
        )));
    }
    value += em;
    Ok(TailIntegral {
        value,
        truncation_bound: bound,
        rounding_bound: 16.0 * EPS * magnitude,
        intervals: k_start - n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEval {
    pub s: ComplexValue,
    pub value: ComplexValue,
    /// Head sum, `−N^{1−s}/(1−s)`, `−N^{−s}/2`, `s·T(s,N)`.
    pub parts: [ComplexValue; 4],
    pub n_used: u64,
    pub tail_error_bound: f64,
}

fn check_form_a(s: Complex64, tol: f64) -> Result<()> {
    check_finite(s)?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if !(s.re > 0.0) {
        return domain(format!("form A requires Re(s) > 0, got {s}"));
    }
    if !(TOL_A_MIN..=TOL_A_MAX).contains(&tol) {
        return domain(format!(
            "tolerance {tol:e} outside [{TOL_A_MIN:e}, {TOL_A_MAX:e}]"
        ));
    }
    Ok(())
}

/// Default truncation point `max(10, ⌈|s|⌉)`.
pub fn default_n(s: Complex64) -> u64 {
    (s.norm().ceil() as u64).max(10)
}

pub fn zeta_a(s: Complex64, tol: f64) -> Result<ZetaEval> {
    check_form_a(s, tol)?;
    zeta_a_with_n(s, default_n(s), tol)
}

/// Form A with an explicit truncation point `n ≥ 1`.
pub fn zeta_a_with_n(s: Complex64, n: u64, tol: f64) -> Result<ZetaEval> {
    check_form_a(s, tol)?;
    if n < 1 {
        return domain("truncation point must be at least 1");
    }
    let mut head = Complex64::new(0.0, 0.0);
    let mut head_mag = 0.0;
    for k in 1..=n {
        let term = npow(k as f64, s);
        head += term;
        head_mag += term.norm();
    }
    let nf = n as f64;
    let p_n = npow(nf, s);
    let second = -(p_n * nf) / (1.0 - s);
    let third = -0.5 * p_n;
    let tail = tail_integral(s, n, tol / (s.norm() + 1.0))?;
    let fourth = s * tail.value;
    let parts = [head, second, third, fourth];
    let value = parts[0] + parts[1] + parts[2] + parts[3];
    let rounding =
        16.0 * EPS * (head_mag + second.norm() + third.norm()) + s.norm() * tail.rounding_bound;
    Ok(ZetaEval {
        s,
        value,
        parts,
        n_used: n,
        tail_error_bound: s.norm() * tail.truncation_bound + rounding,
    })
}

/// Shorthand for a form A value at tolerance `1e-13`.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    Ok(zeta_a(s, 1e-13)?.value)
}

fn check_form_b(s: Complex64, tol: f64) -> Result<()> {
    check_finite(s)?;
    if !(s.re > 0.0 && s.re < 1.0) {
        return domain(format!("form B requires 0 < Re(s) < 1, got {s}"));
    }
    if !(TOL_B_MIN..=TOL_B_MAX).contains(&tol) {
        return domain(format!(
            "tolerance {tol:e} outside [{TOL_B_MIN:e}, {TOL_B_MAX:e}]"
        ));
    }
    Ok(())
}

/// Number of unit intervals form B needs: the dropped oscillatory tail is at
/// most `|s||s+1| / (8(σ+1)K^{σ+1})`.
pub fn form_b_intervals(s: Complex64, tol: f64) -> f64 {
    let num = s.norm() * (s + 1.0).norm() / (8.0 * (s.re + 1.0) * tol);
    num.powf(1.0 / (s.re + 1.0)).ceil().max(1.0)
}

/// `η(s) = ∫_0^∞ ([x] − x) x^{−s−1} dx`, so that `ζ(s) = s·η(s)`.
pub fn eta_b(s: Complex64, tol: f64) -> Result<Complex64> {
    check_form_b(s, tol)?;
    eta_b_unchecked(s, tol)
}

fn eta_b_unchecked(s: Complex64, tol: f64) -> Result<Complex64> {
    let k = form_b_intervals(s, tol);
    if k > FORM_B_BUDGET as f64 {
        return Err(Error::Precision(format!(
            "form B needs {k:e} intervals at s = {s} for tolerance {tol:e} (budget {FORM_B_BUDGET})"
        )));
    }
    let k = k as u64;
    // [0,1) contributes −1/(1−s); each [n,n+1) contributes the centred moment
    // minus the mean, and the means of [1,K) and [K,∞) add to −1/(2s).
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for n in 1..k {
        let p_next = npow((n + 1) as f64, s);
        sum += unit_interval(n, s, p, p_next).0;
        p = p_next;
    }
    Ok(-1.0 / (1.0 - s) - 0.5 / s + sum)
}

pub fn zeta_b(s: Complex64, tol: f64) -> Result<Complex64> {
    check_form_b(s, tol)?;
    Ok(s * eta_b_unchecked(s, tol / s.norm().max(1.0))?)
}

/// `du = u(σ,t) + u(1−σ,t)`, `dv = v(σ,t) + v(1−σ,t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResidual {
    pub sigma: f64,
    pub t: f64,
    pub du: f64,
    pub dv: f64,
}

impl SymmetryResidual {
    pub fn max_abs(&self) -> f64 {
        self.du.abs().max(self.dv.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UvPair {
    pub sigma: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub u_mirror: f64,
    pub v_mirror: f64,
}

impl UvPair {
    pub fn residual(&self) -> SymmetryResidual {
        SymmetryResidual {
            sigma: self.sigma,
            t: self.t,
            du: self.u + self.u_mirror,
            dv: self.v + self.v_mirror,
        }
    }
}

/// Real and imaginary parts of form A written out in cosines and sines.
pub fn uv_at(sigma: f64, t: f64, n: u64) -> Result<(f64, f64)> {
    let s = Complex64::new(sigma, t);
    check_form_a(s, 1e-13)?;
    let mut u = 0.0;
    let mut v = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        let (sin, cos) = (t * kf.ln()).sin_cos();
        let w = kf.powf(-sigma);
        u += w * cos;
        v -= w * sin;
    }
    let nf = n as f64;
    let (sin_n, cos_n) = (t * nf.ln()).sin_cos();
    let a = nf.powf(1.0 - sigma) / ((1.0 - sigma).powi(2) + t * t);
    u -= a * ((1.0 - sigma) * cos_n + t * sin_n);
    v -= a * (t * cos_n - (1.0 - sigma) * sin_n);
    let half = 0.5 * nf.powf(-sigma);
    u -= half * cos_n;
    v += half * sin_n;
    // T = C − iS with C, S the cosine and sine tail integrals.
    let tail = tail_integral(s, n, 1e-15)?.value;
    let (c, sn) = (tail.re, -tail.im);
    u += sigma * c + t * sn;
    v += t * c - sigma * sn;
    Ok((u, v))
}

pub fn uv_components(sigma: f64, t: f64, n: u64) -> Result<UvPair> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return domain(format!("sigma must lie in (0, 1), got {sigma}"));
    }
    if n < 10 {
        return domain(format!("component formulas need N >= 10, got {n}"));
    }
    let (u, v) = uv_at(sigma, t, n)?;
    let (u_mirror, v_mirror) = uv_at(1.0 - sigma, t, n)?;
    Ok(UvPair {
        sigma,
        t,
        u,
        v,
        u_mirror,
        v_mirror,
    })
}

/// Components of `ζ_c(σ', t) = (½ + σ' + it)·η_c(σ', t)` about the critical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centered {
    pub sigma_prime: f64,
    pub t: f64,
    pub u_eta: f64,
    pub v_eta: f64,
    pub u_zeta: f64,
    pub v_zeta: f64,
}

pub fn centered_components(sigma_prime: f64, t: f64, tol: f64) -> Result<Centered> {
    if !(sigma_prime > -0.5 && sigma_prime < 0.5) {
        return domain(format!("sigma' must lie in (-1/2, 1/2), got {sigma_prime}"));
    }
    let a = 0.5 + sigma_prime;
    let s = Complex64::new(a, t);
    check_form_b(s, tol)?;
    let eta = eta_b_unchecked(s, tol / s.norm().max(1.0))?;
    Ok(Centered {
        sigma_prime,
        t,
        u_eta: eta.re,
        v_eta: eta.im,
        u_zeta: a * eta.re - t * eta.im,
        v_zeta: a * eta.im + t * eta.re,
    })
}
