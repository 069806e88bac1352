//! Adaptive Gauss–Kronrod (7/15) integration of complex integrands.

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
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Kronrod panel: (integral, error estimate).
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of bisections on top of the initial panels.
    pub max_splits: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Integrates over abutting panels given by `breaks` (sorted), refining
/// the worst panel until the global estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, breaks: &[f64], tol: Tolerance) -> Estimate {
    let mut heap = BinaryHeap::with_capacity(breaks.len() + tol.max_splits);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e });
    }
    let mut splits = 0;
    while err > tol.abs.max(tol.rel * total.norm()) && splits < tol.max_splits {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // cannot bisect further in floating point
            heap.push(Panel { err: 0.0, ..p });
            err -= p.err;
            continue;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2 });
        splits += 1;
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.err).sum();
    let converged = error <= tol.abs.max(tol.rel * Complex64::norm(value));
    Estimate { value, error, converged }
}
