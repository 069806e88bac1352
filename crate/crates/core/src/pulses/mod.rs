//! Pulse shapes, their phase functions, and pulse sequences.

mod phase;
mod sequence;
mod shape;
mod tabulated;

pub use phase::{phase_at, stationary_point, PhaseFunction, PlacedPulse, StationaryPoint};
pub use sequence::{concatenate, PulseSequence, SequenceElement};
pub use shape::{PulseShape, GAUSSIAN_WINDOW};
pub use tabulated::Tabulated;

use crate::constants::HBAR;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Pulse strength in reduced units together with its physical scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessDrive {
    /// ΔE·T/ħ.
    pub epsilon: f64,
    /// Pulse duration [s].
    pub duration: f64,
    /// Base energy offset [J].
    pub base_energy: f64,
    /// Pulse height [J].
    pub height: f64,
}

impl DimensionlessDrive {
    /// Builds the drive from the pulse height in energy.
    pub fn from_height(height: f64, duration: f64, base_energy: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::config(format!("pulse duration must be positive, got {duration}")));
        }
        let d = DimensionlessDrive { epsilon: height * duration / HBAR, duration, base_energy, height };
        d.validate()?;
        Ok(d)
    }

    /// Builds the drive from ε, deriving the energy height.
    pub fn from_epsilon(epsilon: f64, duration: f64, base_energy: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::config(format!("pulse duration must be positive, got {duration}")));
        }
        let d = DimensionlessDrive { epsilon, duration, base_energy, height: epsilon * HBAR / duration };
        d.validate()?;
        Ok(d)
    }

    /// Pure reduced drive with unit duration and zero offset, for
    /// computations that only involve ε.
    pub fn reduced(epsilon: f64) -> Self {
        DimensionlessDrive { epsilon, duration: 1.0, base_energy: 0.0, height: epsilon * HBAR }
    }

    /// A field pulse of amplitude `delta_b` on a resonance with magnetic
    /// moment difference `mu_res`.
    pub fn from_field(mu_res: f64, delta_b: f64, duration: f64, base_energy: f64) -> Result<Self> {
        Self::from_height(mu_res * delta_b, duration, base_energy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be finite and non-negative, got {}", self.epsilon)));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::config(format!("pulse duration must be positive, got {}", self.duration)));
        }
        Ok(())
    }
}
