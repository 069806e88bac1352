use crate::error::{Error, Result};
use crate::pulses::DimensionlessDrive;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a spectrum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Numeric,
    AiryUniform,
    StationaryPhase,
    SquareClosed,
    Convolved,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::AiryUniform => "airy_uniform",
            Method::StationaryPhase => "stationary_phase",
            Method::SquareClosed => "square_closed",
            Method::Convolved => "convolved",
        }
    }
}

/// Complex spectrum sampled on reduced frequencies ωT.
///
/// Values follow the convention value(ωT) = ∫ e^{iωT t} e^{-iεφ(t)} dt
/// with t in units of the pulse duration; the overall unit-modulus
/// prefactor of the physical amplitude is dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub omega_t: Vec<f64>,
    pub values: Vec<Complex64>,
    /// False where the method has no answer (e.g. no stationary point).
    pub valid: Vec<bool>,
    pub method: Method,
    pub drive: Option<DimensionlessDrive>,
    pub warnings: Vec<String>,
    /// Largest error estimate relative to the largest |value|.
    pub achieved_tolerance: f64,
}

impl SpectrumGrid {
    pub fn new(omega_t: Vec<f64>, values: Vec<Complex64>, method: Method) -> Self {
        let valid = vec![true; omega_t.len()];
        SpectrumGrid { omega_t, values, valid, method, drive: None, warnings: vec![], achieved_tolerance: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.omega_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_t.is_empty()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.valid).filter(|(_, &ok)| ok).map(|(v, _)| v.norm()).fold(0.0, f64::max)
    }

    /// Uniform spacing, if the grid is uniform to 1e-9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        uniform_step(&self.omega_t)
    }
}

pub(crate) fn uniform_step(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let ok = x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    ok.then_some(h)
}

/// The default frequency grid ωT_k = 1.3ε·k/n for k = 1..=n.
pub fn default_grid(epsilon: f64, n: usize) -> Vec<f64> {
    let top = 1.3 * epsilon;
    (1..=n).map(|k| top * k as f64 / n as f64).collect()
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Checks that a frequency grid is strictly increasing and positive.
pub fn check_positive_grid(omega_t: &[f64]) -> Result<()> {
    if omega_t.is_empty() {
        return Err(Error::config("frequency grid is empty"));
    }
    if let Some(&x) = omega_t.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::domain(format!(
            "frequency grid contains ωT = {x}; only positive finite frequencies are representable"
        )));
    }
    if omega_t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("frequency grid must be strictly increasing"));
    }
    Ok(())
}
