//! Adaptive Gauss–Kronrod (7/15) quadrature over real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: usize = 100_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<V> {
    pub value: V,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Piece<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<V> Eq for Piece<V> {}
impl<V> PartialOrd for Piece<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Piece<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Piece<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kron = kron + pair * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + pair * WG[i / 2];
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).magnitude();
    Piece { a, b, value, err }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol` with at most
/// `budget` subintervals.
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Integral<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    if a == b {
        return Ok(Integral {
            value: V::default(),
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, tol, budget)?;
        return Ok(Integral {
            value: r.value * -1.0,
            ..r
        });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, a, b);
    let mut err = first.err;
    heap.push(first);
    let mut intervals = 1;
    while err > tol || !err.is_finite() {
        if intervals >= budget.max(1) {
            return Err(Error::Quadrature {
                tol,
                budget,
                estimate: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature {
                tol,
                budget,
                estimate: err,
            });
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        intervals += 1;
        // Resum to shed cancellation drift from the running update.
        if err <= tol || intervals % 256 == 0 {
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value = heap.iter().fold(V::default(), |acc, p| acc + p.value);
    Ok(Integral {
        value,
        error_estimate: err,
        intervals,
    })
}
