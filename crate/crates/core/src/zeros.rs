//! Zero location on the critical line and argument-principle zero counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::zeta::zeta_a;

pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
pub const MAX_REFINE_STEPS: usize = 200;
pub const BRACKET_THRESHOLD: f64 = 0.5;
pub const BOUNDARY_MARGIN: f64 = 1e-3;
const EVAL_TOL: f64 = 1e-13;
const SCAN_TOL: f64 = 1e-10;
const NEWTON_H: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroBracket {
    pub lo: f64,
    pub hi: f64,
    /// Grid point with the smallest `|ζ(½+it)|`.
    pub t_grid: f64,
    pub abs_grid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub t: f64,
    pub sigma: f64,
    pub min_abs: f64,
    pub refinement_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub sigma_range: (f64, f64),
    pub t_range: (f64, f64),
    pub winding: i64,
    /// Boundary points actually evaluated after adaptive refinement.
    pub evaluations: usize,
}

fn z(s: Complex64, tol: f64) -> Result<Complex64> {
    Ok(zeta_a(s, tol)?.value)
}

fn on_line(t: f64) -> Complex64 {
    Complex64::new(0.5, t)
}

/// Grid points `t_lo + i·step` up to `t_hi`; the last point is clamped to `t_hi`.
fn grid(t_lo: f64, t_hi: f64, step: f64) -> Vec<f64> {
    let n = ((t_hi - t_lo) / step - 1e-9).ceil() as usize;
    (0..=n)
        .map(|i| (t_lo + i as f64 * step).min(t_hi))
        .collect()
}

/// Local minima of `|ζ(½+it)|` below the bracket threshold on a uniform grid.
pub fn scan_critical_line(t_lo: f64, t_hi: f64, step: f64) -> Result<Vec<ZeroBracket>> {
    if !(t_lo >= 0.0 && t_lo < t_hi && t_hi.is_finite()) {
        return domain(format!(
            "scan range must satisfy 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]"
        ));
    }
    if !(step > 0.0 && step <= 0.5) {
        return domain(format!("scan step must lie in (0, 0.5], got {step}"));
    }
    let ts = grid(t_lo, t_hi, step);
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| z(on_line(t), SCAN_TOL).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let last = ts.len() - 1;
    let mut out = Vec::new();
    for i in 0..=last {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i == last {
            f64::INFINITY
        } else {
            vals[i + 1]
        };
        if vals[i] < BRACKET_THRESHOLD && vals[i] <= left && vals[i] < right {
            out.push(ZeroBracket {
                lo: ts[i.saturating_sub(1)],
                hi: ts[(i + 1).min(last)],
                t_grid: ts[i],
                abs_grid: vals[i],
            });
        }
    }
    Ok(out)
}

fn refinement_error(steps: usize, best: (f64, f64, f64)) -> Error {
    Error::Refinement {
        steps,
        best_t: best.1,
        best_sigma: best.0,
        best_abs: best.2,
    }
}

/// Golden-section search on `|ζ(½+it)|` over the bracket, then complex Newton
/// in `s` with a central-difference derivative.
pub fn refine_zero(bracket: &ZeroBracket, tol: f64) -> Result<ZeroRecord> {
    if !(tol >= 1e-12) {
        return domain(format!("zero tolerance must be at least 1e-12, got {tol}"));
    }
    let f = |t: f64| z(on_line(t), EVAL_TOL).map(|v| v.norm());
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut steps = 0;
    while b - a > 1e-7 && steps < MAX_REFINE_STEPS / 2 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        steps += 1;
    }

    let mut s = on_line(if fc < fd { c } else { d });
    let mut val = z(s, EVAL_TOL)?;
    let mut best = (s.re, s.im, val.norm());
    let h = Complex64::new(NEWTON_H, 0.0);
    while steps < MAX_REFINE_STEPS {
        steps += 1;
        let deriv = (z(s + h, EVAL_TOL)? - z(s - h, EVAL_TOL)?) / (2.0 * NEWTON_H);
        if deriv.norm() == 0.0 || !deriv.norm().is_finite() {
            return Err(refinement_error(steps, best));
        }
        let delta = val / deriv;
        s -= delta;
        if !(s.re > 0.0 && s.re < 1.0) {
            return Err(refinement_error(steps, best));
        }
        val = z(s, EVAL_TOL)?;
        if val.norm() < best.2 {
            best = (s.re, s.im, val.norm());
        }
        if best.2 < tol && delta.norm() < 1e-10 {
            return Ok(ZeroRecord {
                t: best.1,
                sigma: best.0,
                min_abs: best.2,
                refinement_steps: steps,
            });
        }
    }
    if best.2 < tol {
        return Ok(ZeroRecord {
            t: best.1,
            sigma: best.0,
            min_abs: best.2,
            refinement_steps: steps,
        });
    }
    Err(refinement_error(steps, best))
}

/// Scan, refine every bracket, keep zeros with `t_lo ≤ t ≤ t_hi`, drop duplicates.
pub fn find_zeros(t_lo: f64, t_hi: f64, step: f64, tol: f64) -> Result<Vec<ZeroRecord>> {
    let brackets = scan_critical_line(t_lo, t_hi, step)?;
    let refined: Vec<ZeroRecord> = brackets
        .par_iter()
        .map(|b| refine_zero(b, tol))
        .collect::<Result<_>>()?;
    let mut out: Vec<ZeroRecord> = Vec::new();
    for r in refined {
        if r.t < t_lo || r.t > t_hi {
            continue;
        }
        if out.iter().any(|o| (o.t - r.t).abs() < 1e-6) {
            continue;
        }
        out.push(r);
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

/// Number of zeros inside `[σ_lo, σ_hi] × [t_lo, t_hi]` by the argument principle.
pub fn count_zeros_box(
    sigma_range: (f64, f64),
    t_range: (f64, f64),
    n_points: usize,
) -> Result<BoxCount> {
    let (s_lo, s_hi) = sigma_range;
    let (t_lo, t_hi) = t_range;
    if !(s_lo > 0.0 && s_lo < s_hi && s_hi < 1.0) {
        return domain(format!(
            "sigma range must satisfy 0 < lo < hi < 1, got ({s_lo}, {s_hi})"
        ));
    }
    if !(t_lo < t_hi && t_lo.is_finite() && t_hi.is_finite()) {
        return domain(format!("t range inverted or non-finite: ({t_lo}, {t_hi})"));
    }
    if n_points < 400 {
        return domain(format!(
            "box boundary needs at least 400 points, got {n_points}"
        ));
    }
    // Counter-clockwise: bottom, right, top, left.
    let corners = [
        Complex64::new(s_lo, t_lo),
        Complex64::new(s_hi, t_lo),
        Complex64::new(s_hi, t_hi),
        Complex64::new(s_lo, t_hi),
    ];
    let perimeter = 2.0 * ((s_hi - s_lo) + (t_hi - t_lo));
    let mut pts = Vec::with_capacity(n_points + 4);
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let m = (((b - a).norm() / perimeter) * n_points as f64)
            .ceil()
            .max(1.0) as usize;
        pts.extend((0..m).map(|i| a + (b - a) * (i as f64 / m as f64)));
    }
    pts.push(corners[0]);

    let vals: Vec<Complex64> = pts
        .par_iter()
        .map(|&s| z(s, SCAN_TOL))
        .collect::<Result<_>>()?;
    let mut evaluations = vals.len();
    let mut total = 0.0;
    for i in 0..pts.len() - 1 {
        total += unwrap_segment(
            pts[i],
            pts[i + 1],
            vals[i],
            vals[i + 1],
            0,
            &mut evaluations,
        )?;
    }
    if let Some((s, v)) = pts
        .iter()
        .zip(&vals)
        .find(|(_, v)| v.norm() < BOUNDARY_MARGIN)
    {
        return Err(Error::BoundaryTooClose {
            sigma: s.re,
            t: s.im,
            abs: v.norm(),
        });
    }
    let w = total / (2.0 * PI);
    let winding = w.round();
    if (w - winding).abs() > 0.2 || winding < 0.0 {
        return Err(Error::Unwrapping(format!(
            "winding estimate {w} is not a valid count"
        )));
    }
    Ok(BoxCount {
        sigma_range,
        t_range,
        winding: winding as i64,
        evaluations,
    })
}

/// Phase change from `a` to `b`, bisecting until every step is below π/4.
fn unwrap_segment(
    a: Complex64,
    b: Complex64,
    za: Complex64,
    zb: Complex64,
    depth: u32,
    evaluations: &mut usize,
) -> Result<f64> {
    for (s, v) in [(a, za), (b, zb)] {
        if v.norm() < BOUNDARY_MARGIN {
            return Err(Error::BoundaryTooClose {
                sigma: s.re,
                t: s.im,
                abs: v.norm(),
            });
        }
    }
    let d = (zb / za).arg();
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth >= 40 {
        return Err(Error::Unwrapping(format!(
            "phase jump {d} persists between {a} and {b}"
        )));
    }
    let mid = (a + b) * 0.5;
    let zm = z(mid, SCAN_TOL)?;
    *evaluations += 1;
    Ok(unwrap_segment(a, mid, za, zm, depth + 1, evaluations)?
        + unwrap_segment(mid, b, zm, zb, depth + 1, evaluations)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_examples() {
        let b = scan_critical_line(10.0, 30.0, 0.1).unwrap();
        assert_eq!(b.len(), 3);
        for (br, t) in b.iter().zip([14.13, 21.02, 25.01]) {
            assert!(br.lo <= t && t <= br.hi, "{br:?}");
        }
        assert!(scan_critical_line(0.0, 10.0, 0.1).unwrap().is_empty());
        assert!(!scan_critical_line(14.0, 15.0, 0.5).unwrap().is_empty());
        assert!(scan_critical_line(5.0, 1.0, 0.1).is_err());
        assert!(scan_critical_line(0.0, 1.0, 0.6).is_err());
    }

    #[test]
    fn refine_first_two() {
        let b = scan_critical_line(10.0, 22.0, 0.1).unwrap();
        let first = refine_zero(&b[0], DEFAULT_ZERO_TOL).unwrap();
        assert!((first.t - 14.134_725_141_734_693).abs() < 1e-9);
        assert!((first.sigma - 0.5).abs() < 1e-9);
        assert!(first.min_abs < 1e-8);
        let second = refine_zero(&b[1], DEFAULT_ZERO_TOL).unwrap();
        assert!((second.t - 21.022_039_638_771_555).abs() < 1e-9);
    }

    #[test]
    fn refine_rejects_loose_tol() {
        let b = ZeroBracket {
            lo: 14.0,
            hi: 14.2,
            t_grid: 14.1,
            abs_grid: 0.1,
        };
        assert!(refine_zero(&b, 1e-13).is_err());
    }

    #[test]
    fn box_counts() {
        assert_eq!(
            count_zeros_box((0.05, 0.95), (10.0, 30.0), 400)
                .unwrap()
                .winding,
            3
        );
        assert_eq!(
            count_zeros_box((0.05, 0.95), (0.0, 10.0), 400)
                .unwrap()
                .winding,
            0
        );
        assert_eq!(
            count_zeros_box((0.05, 0.45), (10.0, 30.0), 400)
                .unwrap()
                .winding,
            0
        );
        assert!(count_zeros_box((0.05, 0.95), (10.0, 30.0), 100).is_err());
        let e = count_zeros_box((0.05, 0.95), (14.134_725_141_734_693, 20.0), 400);
        assert!(matches!(e, Err(Error::BoundaryTooClose { .. })));
    }
}
