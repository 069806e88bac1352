//! Regularized Fourier spectrum of the uncoupled closed-channel amplitude.

mod grid;
mod numeric;

pub use grid::{check_positive_grid, default_grid, linspace, Method, SpectrumGrid};
pub(crate) use grid::uniform_step;
pub use numeric::{spectrum_numeric, spectrum_value, EPSILON_MAX};
