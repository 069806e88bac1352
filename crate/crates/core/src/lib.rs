//! Dissociation spectra of trapped Feshbach molecules driven by
//! magnetic-field pulses.
//!
//! The central object is the regularized Fourier transform of the
//! uncoupled closed-channel amplitude, `value(ωT) = ∫ e^{iωT t} e^{-iεφ(t)} dt`,
//! evaluated numerically or through asymptotic forms. The remaining
//! modules turn that spectrum into decay dynamics, a momentum-space
//! dissociation state, and a pulse-shape search.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod constants;
pub mod dissstate;
pub mod dynamics;
mod error;
pub mod io;
pub mod optimize;
pub mod pulses;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use asymptotics::{spectrum_gaussian_uniform, spectrum_square_closed, spectrum_stationary_phase};
pub use dissstate::{DissociationState, StateOptions};
pub use dynamics::{DecayProfile, PhysicalSetup};
pub use pulses::{concatenate, DimensionlessDrive, PhaseFunction, PulseSequence, PulseShape};
pub use spectrum::{spectrum_numeric, Method, SpectrumGrid};
