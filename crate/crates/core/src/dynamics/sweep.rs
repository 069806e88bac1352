use super::setup::PhysicalSetup;
use crate::constants::HBAR;
use crate::pulses::{DimensionlessDrive, PhaseFunction};
use serde::Serialize;

/// Comparison of the field slew rate with the memory-time bound.
#[derive(Clone, Debug, Serialize)]
pub struct SlowSweepReport {
    /// max |dB/dt| over the pulse [T/s].
    pub max_rate: f64,
    /// ħ/(t_m² μ_res) [T/s].
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
    pub note: Option<String>,
}

/// Checks dB/dt ≪ ħ/(t_m² μ_res), passing when the ratio is below 0.1.
pub fn check_slow_sweep(
    pulse: &PhaseFunction,
    drive: &DimensionlessDrive,
    setup: &PhysicalSetup,
    memory_time: f64,
) -> SlowSweepReport {
    let field = drive.height / setup.mu_res;
    let slope = pulse
        .elements
        .iter()
        .map(|e| e.height * e.shape.max_slope() / e.duration)
        .fold(0.0, f64::max);
    let max_rate = field * slope / drive.duration;
    let bound = HBAR / (memory_time * memory_time * setup.mu_res);
    let ratio = max_rate / bound;
    let note = (!slope.is_finite())
        .then(|| "pulse has ideal jump edges; the field slope is unbounded in this idealization".to_string());
    SlowSweepReport { max_rate, bound, ratio, pass: ratio < 0.1, note }
}
