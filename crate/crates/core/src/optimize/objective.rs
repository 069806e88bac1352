use crate::dissstate::{lobe_bracket, LOBE_FLOOR};
use crate::error::{Error, Result};
use crate::pulses::{DimensionlessDrive, PhaseFunction, PulseShape, Tabulated};
use crate::spectrum::spectrum_numeric;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Lower edge of the scored band as a fraction of ε; excludes the 1/ωT
/// rise toward the zero-frequency pole.
pub const BAND_FLOOR: f64 = 0.1;
/// Upper edge of the scored band as a fraction of ε.
pub const BAND_TOP: f64 = 1.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Spectral mass outside the main lobe.
    RippleEnergy,
    /// RMS spread of the spectral mass in units of ε.
    RmsWidth,
    /// One minus the mass within ±2π of the peak.
    NegPeakConcentration,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObjectiveValue {
    pub score: f64,
    /// No main lobe could be identified; the score is the worst value.
    pub flagged: bool,
}

/// Parametrized family of unit-area pulses interpolating square ↔ smooth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Linear edges of relative width s.
    Trapezoid,
    /// Raised-cosine edges of relative width s.
    CosineEdge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseFamily {
    pub kind: FamilyKind,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

const COSINE_EDGE_SAMPLES: usize = 4001;

impl PulseFamily {
    pub fn trapezoid(lo: f64, hi: f64) -> Self {
        PulseFamily { kind: FamilyKind::Trapezoid, lower: vec![lo], upper: vec![hi] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != 1 || self.upper.len() != 1 {
            return Err(Error::config("pulse families take a single edge-width parameter"));
        }
        let (lo, hi) = (self.lower[0], self.upper[0]);
        if !(lo > 0.0 && hi <= 0.5 && lo <= hi) {
            return Err(Error::config(format!("edge-width bounds must satisfy 0 < lo ≤ hi ≤ 0.5, got [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn shape(&self, params: &[f64]) -> Result<PulseShape> {
        let s = params[0];
        match self.kind {
            FamilyKind::Trapezoid => PulseShape::trapezoid(s),
            FamilyKind::CosineEdge => {
                if !(s > 0.0 && s <= 0.5) {
                    return Err(Error::config(format!("cosine edge width must lie in (0, 0.5], got {s}")));
                }
                let (c1, c2) = (0.5 - 0.5 * s, 0.5 + 0.5 * s);
                let samples: Vec<(f64, f64)> = (0..COSINE_EDGE_SAMPLES)
                    .map(|k| {
                        let u = -c2 + 2.0 * c2 * k as f64 / (COSINE_EDGE_SAMPLES - 1) as f64;
                        let a = u.abs();
                        let p = if a <= c1 { 1.0 } else { 0.5 * (1.0 + (PI * (a - c1) / s).cos()) };
                        (u, p)
                    })
                    .collect();
                Ok(PulseShape::Tabulated(Tabulated::new(&samples)?))
            }
        }
    }
}

fn cell_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let r = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

/// Scores the spectral sharpness of a pulse on a fixed frequency grid.
pub fn evaluate_objective(
    kind: ObjectiveKind,
    shape: &PulseShape,
    drive: &DimensionlessDrive,
    omega_t: &[f64],
) -> Result<ObjectiveValue> {
    evaluate_phase_objective(kind, &PhaseFunction::new(shape.clone()), drive, omega_t)
}

/// As [`evaluate_objective`] for an arbitrary placed pulse or sequence.
pub fn evaluate_phase_objective(
    kind: ObjectiveKind,
    phase: &PhaseFunction,
    drive: &DimensionlessDrive,
    omega_t: &[f64],
) -> Result<ObjectiveValue> {
    let worst = ObjectiveValue { score: 1.0, flagged: true };
    let eps = drive.epsilon;
    let band: Vec<f64> =
        omega_t.iter().copied().filter(|&x| x >= BAND_FLOOR * eps && x <= BAND_TOP * eps && x > 0.0).collect();
    if band.len() < 3 {
        return Ok(worst);
    }
    let spec = spectrum_numeric(phase, drive, &band)?;
    let mass: Vec<f64> = spec.values.iter().map(|v| v.norm_sqr()).collect();
    let w = cell_weights(&band);
    let total: f64 = mass.iter().zip(&w).map(|(m, w)| m * w).sum();
    let (peak, top) = mass.iter().enumerate().fold((0, 0.0), |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc });
    if !(top > 0.0) || !(total > 0.0) {
        return Ok(worst);
    }
    let inside = |lo: usize, hi: usize| (lo..=hi).map(|i| mass[i] * w[i]).sum::<f64>();
    let score = match kind {
        ObjectiveKind::RippleEnergy => {
            let (lo, hi) = lobe_bracket(&mass, peak);
            let bounded_right = hi + 1 < mass.len() || mass[hi] < LOBE_FLOOR * top;
            let bounded_left = lo > 0 || mass[lo] < LOBE_FLOOR * top;
            if !bounded_left && !bounded_right {
                return Ok(worst);
            }
            1.0 - inside(lo, hi) / total
        }
        ObjectiveKind::RmsWidth => {
            let mean = band.iter().zip(&mass).zip(&w).map(|((x, m), w)| x * m * w).sum::<f64>() / total;
            let var = band.iter().zip(&mass).zip(&w).map(|((x, m), w)| (x - mean).powi(2) * m * w).sum::<f64>() / total;
            var.sqrt() / eps
        }
        ObjectiveKind::NegPeakConcentration => {
            let x0 = band[peak];
            let lo = band.partition_point(|&x| x < x0 - TAU);
            let hi = band.partition_point(|&x| x <= x0 + TAU) - 1;
            1.0 - inside(lo, hi) / total
        }
    };
    Ok(ObjectiveValue { score: score.max(0.0), flagged: false })
}

/// Fraction of spectral mass outside the main lobe.
pub fn ripple_objective(shape: &PulseShape, drive: &DimensionlessDrive, omega_t: &[f64]) -> Result<ObjectiveValue> {
    evaluate_objective(ObjectiveKind::RippleEnergy, shape, drive, omega_t)
}
