//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.
//!
//! Bisection is driven by a global priority on the interval error estimate,
//! so the subdivision sequence is a deterministic function of the integrand.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Options for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_intervals: 20_000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    (value, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate a complex-valued `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        };
    }
    if b < a {
        let r = integrate(f, b, a, opts);
        return QuadResult {
            value: -r.value,
            ..r
        };
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&f, a, b);
    heap.push(Piece { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.norm()) && heap.len() < opts.max_intervals {
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
    }
    // Final sum in interval order, compensated.
    let mut pieces: Vec<&Piece> = heap.iter().collect();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut acc = crate::summation::ComplexNeumaier::new();
    let mut err = 0.0;
    for p in pieces {
        acc.add(p.value);
        err += p.err;
    }
    QuadResult {
        value: acc.total(),
        error: err,
        intervals: heap.len(),
    }
}

/// Integrate a real-valued `f` over `[a, b]` with default options.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, QuadOptions::default())
        .value
        .re
}

/// Integrate a complex-valued `f` over `[a, b]` with default options.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Complex64 {
    integrate(f, a, b, QuadOptions::default()).value
}
