//! Asymptotic two-particle dissociation state in the waveguide.

mod metrics;
mod regime;
mod state;

pub use metrics::{distribution_metrics, lobe_bracket, local_maxima, DistributionMetrics, LOBE_FLOOR};
pub use regime::{
    base_energy_check, confinement_check, single_mode_check, validate_regime, Check, RegimeReport,
    CONFINEMENT_RATIO,
};
pub use state::{
    assemble_state, dissociation_probability, energy_to_omega_t, max_momentum, momentum_amplitude, omega_t_for,
    spectral_norm, trap_amplitude, DissociationState, StateOptions, COVERAGE_LIMIT, PROBABILITY_WARNING,
};
