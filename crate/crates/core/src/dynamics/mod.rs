//! Channel-coupling dynamics: decay rate, survival, convolution of
//! spectra, quasi-stationary energy distribution, sweep-rate bound.

mod convolution;
mod decay;
mod quasi;
mod setup;
mod sweep;

pub use convolution::{convolve_spectrum, lorentzian};
pub use decay::{
    decay_profile, decay_rate, decay_time_grid, resonance_energy_at, threshold_crossings, DecayProfile, DecayRate,
};
pub use quasi::{quasi_stationary_distribution, EnergyDistribution};
pub use setup::{coupling_strength, memory_time, PhysicalSetup};
pub use sweep::{check_slow_sweep, SlowSweepReport};

use crate::constants::BOHR_RADIUS;

/// Default localization scale for the memory-time estimate.
pub const DEFAULT_LOCALIZATION: f64 = 100.0 * BOHR_RADIUS;
