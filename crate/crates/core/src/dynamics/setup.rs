use crate::constants::HBAR;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Resonance, trap and guide parameters (SI units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Background scattering length [m].
    pub a_bg: f64,
    /// Magnetic moment difference between the channels [J/T].
    pub mu_res: f64,
    /// Resonance width [T].
    pub delta_b_res: f64,
    /// Transverse guide frequency [rad/s].
    pub omega_guide: f64,
    /// Longitudinal trap frequency [rad/s].
    pub omega_trap: f64,
    /// Guide laser depth [J].
    pub depth_guide: f64,
    /// Trap laser depth [J].
    pub depth_trap: f64,
    /// Atomic mass [kg].
    pub mass: f64,
    /// Base field [T].
    pub b0: f64,
    /// Resonance position [T].
    pub b_res: f64,
    /// The user asserts the pulse stays off-tuned from trap bound states.
    #[serde(default)]
    pub off_tuned: bool,
}

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a_bg", self.a_bg),
            ("mu_res", self.mu_res),
            ("omega_guide", self.omega_guide),
            ("omega_trap", self.omega_trap),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("setup.{name} must be positive, got {v}")));
            }
        }
        let finite = [
            ("delta_b_res", self.delta_b_res),
            ("depth_guide", self.depth_guide),
            ("depth_trap", self.depth_trap),
            ("b0", self.b0),
            ("b_res", self.b_res),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(format!("setup.{name} must be finite")));
            }
        }
        if self.delta_b_res < 0.0 {
            return Err(Error::config("setup.delta_b_res must be non-negative"));
        }
        Ok(())
    }

    /// Relative-motion mass m/2.
    pub fn reduced_mass(&self) -> f64 {
        0.5 * self.mass
    }

    /// Center-of-mass mass 2m.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.mass
    }

    /// Closed-channel potential offset.
    pub fn closed_offset(&self) -> f64 {
        -2.0 * self.depth_trap + 0.5 * HBAR * self.omega_trap - 2.0 * self.depth_guide
            + HBAR * self.omega_guide
    }

    /// Background-channel continuum threshold.
    pub fn background_threshold(&self) -> f64 {
        -2.0 * self.depth_guide + 2.0 * HBAR * self.omega_guide
    }

    /// Resonance energy above which the molecule decays.
    pub fn decay_threshold(&self) -> f64 {
        2.0 * self.depth_trap - 0.5 * HBAR * self.omega_trap + HBAR * self.omega_guide
    }

    /// Half-width of the band above threshold where Γ is reported as a pole.
    pub fn pole_guard(&self) -> f64 {
        1e-3 * HBAR * self.omega_guide
    }

    /// Transverse oscillator length √(ħ/(mω_G)).
    pub fn transverse_length(&self) -> f64 {
        (HBAR / (self.mass * self.omega_guide)).sqrt()
    }

    /// Resonance energy μ_res(B - B_res).
    pub fn resonance_energy(&self, field: f64) -> f64 {
        self.mu_res * (field - self.b_res)
    }

    /// Base energy E_res(B₀) + U_cl.
    pub fn base_energy(&self) -> f64 {
        self.resonance_energy(self.b0) + self.closed_offset()
    }

    /// Prefactor of Γ: 2ω_G a_bg μ_res ΔB_res / ħ.
    pub fn decay_prefactor(&self) -> f64 {
        2.0 * self.omega_guide * self.a_bg * self.mu_res * self.delta_b_res / HBAR
    }

    /// Longitudinal momentum width of the trap ground state √(Mħω_T/2).
    pub fn trap_momentum_width(&self) -> f64 {
        (self.total_mass() * HBAR * self.omega_trap / 2.0).sqrt()
    }
}

/// Squared inter-channel matrix element (4πħ²/(m(2πħ)³))·a_bg μ_res ΔB_res.
pub fn coupling_strength(setup: &PhysicalSetup) -> f64 {
    4.0 * PI * HBAR * HBAR / (setup.mass * (2.0 * PI * HBAR).powi(3)) * setup.a_bg * setup.mu_res * setup.delta_b_res
}

/// Memory time m·Δx²/ħ of the channel coupling for a pair localized to Δx.
pub fn memory_time(mass: f64, dx: f64) -> f64 {
    mass * dx * dx / HBAR
}
