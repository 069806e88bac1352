//! Physical constants (CODATA 2018, SI units).

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Bohr magneton [J/T].
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;

/// Bohr radius [m].
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Mass of a ⁶Li atom [kg].
pub const LITHIUM6_MASS: f64 = 9.988e-27;
