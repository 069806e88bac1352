//! Spectral sharpness objectives and a derivative-free pulse search.

mod nelder_mead;
mod objective;

pub use nelder_mead::{minimize, SearchOptions, SearchResult, StartResult, TraceRow};
pub use objective::{
    evaluate_objective, evaluate_phase_objective, ripple_objective, FamilyKind, ObjectiveKind, ObjectiveValue, PulseFamily, BAND_FLOOR,
    BAND_TOP,
};

use crate::error::Result;
use crate::io::write_csv;
use crate::pulses::DimensionlessDrive;
use serde::Serialize;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
pub struct Optimization {
    pub search: SearchResult,
    /// Evaluations whose objective had no identifiable main lobe.
    pub flagged_evaluations: usize,
}

/// Searches the family for the sharpest spectrum at fixed drive.
pub fn optimize_pulse(
    family: &PulseFamily,
    drive: &DimensionlessDrive,
    objective: ObjectiveKind,
    omega_t: &[f64],
    options: SearchOptions,
) -> Result<Optimization> {
    family.validate()?;
    let mut flagged = 0;
    let search = minimize(
        |p: &[f64]| {
            let v = evaluate_objective(objective, &family.shape(p)?, drive, omega_t)?;
            flagged += v.flagged as usize;
            Ok(v.score)
        },
        &family.lower,
        &family.upper,
        options,
    )?;
    Ok(Optimization { search, flagged_evaluations: flagged })
}

/// Writes the evaluation trace as `iter,<params...>,score`.
pub fn write_trace(path: &Path, param_names: &[&str], trace: &[TraceRow]) -> Result<()> {
    let mut header = vec!["iter"];
    header.extend_from_slice(param_names);
    header.push("score");
    let rows = trace.iter().map(|r| {
        let mut v = vec![r.iter as f64];
        v.extend(&r.params);
        v.push(r.score);
        v
    });
    write_csv(path, &header, rows)
}
