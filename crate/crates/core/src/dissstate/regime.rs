use super::metrics::DistributionMetrics;
use super::state::{DissociationState, PROBABILITY_WARNING};
use crate::constants::HBAR;
use crate::dynamics::{PhysicalSetup, SlowSweepReport};
use crate::pulses::DimensionlessDrive;
use serde::Serialize;

/// Minimum ratio of transverse length to background scattering length.
pub const CONFINEMENT_RATIO: f64 = 10.0;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeReport {
    pub checks: Vec<Check>,
    /// Informational: whether the user asserted off-tuning from trap bound states.
    pub off_tuned_asserted: bool,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let mut s = format!("{} {}: {:e} (limit {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
                if let Some(n) = &c.note {
                    s.push_str(" - ");
                    s.push_str(n);
                }
                s
            })
            .collect()
    }
}

fn check(name: &str, pass: bool, value: f64, limit: f64, note: Option<String>) -> Check {
    Check { name: name.to_string(), pass, value, limit, note }
}

/// Peak kinetic energy below the guide gap.
pub fn single_mode_check(kinetic: f64, setup: &PhysicalSetup) -> Check {
    let gap = HBAR * setup.omega_guide;
    check("single_mode", kinetic < gap, kinetic, gap, None)
}

pub fn confinement_check(setup: &PhysicalSetup) -> Check {
    let ratio = setup.transverse_length() / setup.a_bg;
    let pass = ratio > CONFINEMENT_RATIO;
    let note = (!pass).then(|| "transverse length comparable to a_bg: confinement-induced resonance possible".to_string());
    check("confinement", pass, ratio, CONFINEMENT_RATIO, note)
}

pub fn base_energy_check(drive: &DimensionlessDrive, setup: &PhysicalSetup) -> Check {
    let e0 = drive.base_energy;
    let limit = setup.background_threshold().min(0.0);
    let pass = e0 < limit;
    let note = (!pass).then(|| "the zero-frequency delta term would enter the physical band".to_string());
    check("base_energy_below_threshold", pass, e0, limit, note)
}

/// Validity report for an assembled state.
pub fn validate_regime(
    state: &DissociationState,
    metrics: &DistributionMetrics,
    setup: &PhysicalSetup,
    drive: &DimensionlessDrive,
    slow: &SlowSweepReport,
) -> RegimeReport {
    let kinetic = metrics.peak_momentum.powi(2) / (2.0 * setup.reduced_mass());
    let checks = vec![
        single_mode_check(kinetic, setup),
        confinement_check(setup),
        check("probability", state.probability < PROBABILITY_WARNING, state.probability, PROBABILITY_WARNING, None),
        check("slow_sweep", slow.pass, slow.ratio, 0.1, slow.note.clone()),
        base_energy_check(drive, setup),
    ];
    RegimeReport { checks, off_tuned_asserted: setup.off_tuned }
}
