//! Independent reference evaluation of the regularized spectrum.
//!
//! Fixed-panel Gauss–Legendre quadrature (10 nodes, panels of at most
//! 1/8 oscillation) on the pulse window, with the phase rebuilt from the
//! profile alone by the same rule, plus hand-written boundary tails.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_SQRT_PI, PI};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Unit-area-convention profiles written out independently of the library.
#[derive(Clone, Copy, Debug)]
pub enum RefShape {
    Square,
    Gaussian,
    Trapezoid(f64),
    RaisedCosine,
}

impl RefShape {
    pub fn profile(self, t: f64) -> f64 {
        match self {
            RefShape::Square => (t.abs() <= 0.5) as u8 as f64,
            RefShape::Gaussian => FRAC_2_SQRT_PI * (-t * t).exp(),
            RefShape::Trapezoid(s) => ((0.5 + 0.5 * s - t.abs()) / s).clamp(0.0, 1.0),
            RefShape::RaisedCosine => {
                if t.abs() <= 1.0 {
                    (0.5 * PI * t).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn peak(self) -> f64 {
        match self {
            RefShape::Gaussian => FRAC_2_SQRT_PI,
            _ => 1.0,
        }
    }

    /// Window plus interior kinks, ascending, including 0.
    fn breaks(self) -> Vec<f64> {
        let mut b = match self {
            RefShape::Square => vec![-0.5, 0.5],
            RefShape::Gaussian => vec![-5.5, 5.5],
            RefShape::Trapezoid(s) => vec![-0.5 - 0.5 * s, -0.5 + 0.5 * s, 0.5 - 0.5 * s, 0.5 + 0.5 * s],
            RefShape::RaisedCosine => vec![-1.0, 1.0],
        };
        b.push(0.0);
        b.sort_by(f64::total_cmp);
        b
    }
}

/// Precomputed nodes for one shape, drive strength and frequency ceiling.
pub struct Oracle {
    shape: RefShape,
    eps: f64,
    nodes: Vec<(f64, f64, f64)>,
    a: f64,
    b: f64,
    phase_a: f64,
    phase_b: f64,
}

impl Oracle {
    /// Valid for |x| ≤ `x_max`.
    pub fn new(shape: RefShape, eps: f64, x_max: f64) -> Self {
        let gl = gauss_legendre(10);
        let f_max = x_max.abs() + eps * shape.peak() + 1.0;
        let width = 2.0 * PI / (8.0 * f_max);
        let br = shape.breaks();
        // panels on each side of 0, walking outward so the phase accumulates from φ(0) = 0
        let mut panels: Vec<(f64, f64)> = vec![];
        for w in br.windows(2) {
            let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            for k in 0..n {
                panels.push((w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h));
            }
        }
        let panel_integral = |lo: f64, hi: f64| -> f64 {
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            gl.iter().map(|(x, w)| w * r * shape.profile(c + r * x)).sum()
        };
        let mid = panels.iter().position(|p| p.0 >= 0.0).unwrap();
        let mut start_phase = vec![0.0; panels.len()];
        let mut acc = 0.0;
        for i in mid..panels.len() {
            start_phase[i] = acc;
            acc += panel_integral(panels[i].0, panels[i].1);
        }
        let phase_b = acc;
        acc = 0.0;
        for i in (0..mid).rev() {
            acc -= panel_integral(panels[i].0, panels[i].1);
            start_phase[i] = acc;
        }
        let phase_a = acc;
        let mut nodes = Vec::with_capacity(panels.len() * gl.len());
        for (i, &(lo, hi)) in panels.iter().enumerate() {
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for &(x, w) in &gl {
                let t = c + r * x;
                let phi = start_phase[i] + panel_integral(lo, t);
                nodes.push((t, w * r, phi));
            }
        }
        let a = br[0];
        let b = *br.last().unwrap();
        Oracle { shape, eps, nodes, a, b, phase_a, phase_b }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let i = Complex64::i();
        let core: Complex64 = self.nodes.iter().map(|&(t, w, phi)| w * (i * (x * t - self.eps * phi)).exp()).sum();
        let out = |t: f64| self.shape.profile(t);
        let right = -(i * (x * self.b - self.eps * self.phase_b)).exp() / (i * (x - self.eps * out(self.b + 1e-12)));
        let left = (i * (x * self.a - self.eps * self.phase_a)).exp() / (i * (x - self.eps * out(self.a - 1e-12)));
        core + right + left
    }
}

/// Exact square-pulse spectrum.
pub fn square_exact(eps: f64, x: f64) -> f64 {
    let u = 0.5 * (x - eps);
    let s = if u == 0.0 { 1.0 } else { u.sin() / u };
    s * eps / x
}

/// ⁶Li pair in a 5 kHz guide and a 50 Hz longitudinal trap.
pub fn lithium() -> feshpulse::PhysicalSetup {
    use feshpulse::constants::{BOHR_MAGNETON, LITHIUM6_MASS};
    feshpulse::PhysicalSetup {
        a_bg: 5e-9,
        mu_res: 1e-2 * BOHR_MAGNETON,
        delta_b_res: 1e-5,
        omega_guide: 2.0 * PI * 5e3,
        omega_trap: 2.0 * PI * 50.0,
        depth_guide: 1.38e-29,
        depth_trap: 1.0e-29,
        mass: LITHIUM6_MASS,
        b0: 0.0,
        b_res: 0.0,
        off_tuned: true,
    }
}

/// Drive of strength `eps` and duration `t` whose base energy puts the pair
/// threshold at ωT = `x0`.
pub fn drive_below_threshold(setup: &feshpulse::PhysicalSetup, eps: f64, t: f64, x0: f64) -> feshpulse::DimensionlessDrive {
    let e0 = setup.background_threshold() - x0 * feshpulse::constants::HBAR / t;
    feshpulse::DimensionlessDrive::from_epsilon(eps, t, e0).unwrap()
}

/// Uniform spectrum grid from just below the pair threshold `x0` to `top`.
pub fn state_band(x0: f64, top: f64, n: usize) -> Vec<f64> {
    let h = (top - x0) / (n - 3) as f64;
    (0..n).map(|k| x0 - 2.0 * h + k as f64 * h).collect()
}
