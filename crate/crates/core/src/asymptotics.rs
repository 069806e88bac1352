//! Closed-form and asymptotic spectra.

use crate::error::{Error, Result};
use crate::pulses::{DimensionlessDrive, PhaseFunction};
use crate::specfun::{airy_ai_detail, erf, erfi_scaled, sinc};
use crate::spectrum::{check_positive_grid, Method, SpectrumGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_SQRT_PI, FRAC_PI_4, PI};

/// Below this ε the uniform expansion is computed but flagged.
pub const AIRY_EPSILON_FLOOR: f64 = 20.0;

/// Caustic threshold for the stationary-phase amplitude.
pub const CAUSTIC_SLOPE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// ωT/ε ≤ 2/√π: the sweep passes this frequency, oscillatory Airy side.
    Below,
    Above,
}

/// Coefficients of the uniform expansion at one reduced frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryCoefficients {
    pub alpha: f64,
    /// Signed square of the turning-point coordinate; the Airy argument
    /// is ε^{2/3} times this. Non-positive on the lower branch.
    pub gamma_sq: f64,
    pub a0_mod: f64,
    pub branch: Branch,
}

/// S(α) with erf α - να = (2/√π)α³S on the lower branch and
/// να - erfi α = (2/√π)α³S on the upper one. Summed as a series for
/// small α, where the direct difference cancels.
fn turning_series(alpha: f64, branch: Branch) -> f64 {
    let a2 = alpha * alpha;
    if alpha < 1.0 {
        let mut sum = 0.0;
        // pw carries α^{2n-2}/n!; the lower branch alternates in sign
        let mut pw = 1.0;
        let mut n = 1.0_f64;
        loop {
            pw /= n;
            let t = 2.0 * n * pw / (2.0 * n + 1.0);
            sum += if branch == Branch::Below && (n as i64) % 2 == 0 { -t } else { t };
            if t < 1e-18 * sum.abs() {
                break;
            }
            pw *= a2;
            n += 1.0;
        }
        sum
    } else {
        let a3 = a2 * alpha;
        match branch {
            Branch::Below => {
                let nu = FRAC_2_SQRT_PI * (-a2).exp();
                (erf(alpha) - nu * alpha) / (FRAC_2_SQRT_PI * a3)
            }
            Branch::Above => {
                // να - erfi α = e^{α²}((2/√π)α - e^{-α²}erfi α)
                a2.exp() * (FRAC_2_SQRT_PI * alpha - erfi_scaled(alpha)) / (FRAC_2_SQRT_PI * a3)
            }
        }
    }
}

/// Branch, α, γ², and |a₀| at ν = ωT/ε.
pub fn airy_coefficients(nu: f64) -> Result<AiryCoefficients> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("uniform expansion needs ωT/ε > 0, got {nu}")));
    }
    let log = (0.5 * PI.sqrt() * nu).ln();
    let branch = if log <= 0.0 { Branch::Below } else { Branch::Above };
    let alpha = log.abs().sqrt();
    let s = turning_series(alpha, branch);
    let c = 3.0 * s / PI.sqrt();
    let mag = c.powf(2.0 / 3.0) * alpha * alpha;
    let gamma_sq = if branch == Branch::Below { -mag } else { mag };
    let a0_mod = c.powf(1.0 / 6.0) / nu.sqrt();
    Ok(AiryCoefficients { alpha, gamma_sq, a0_mod, branch })
}

/// Uniform Airy-type expansion of the Gaussian-pulse spectrum.
pub fn spectrum_gaussian_uniform(drive: &DimensionlessDrive, omega_t: &[f64]) -> Result<SpectrumGrid> {
    drive.validate()?;
    check_positive_grid(omega_t)?;
    let eps = drive.epsilon;
    if !(eps > 0.0) {
        return Err(Error::domain("uniform expansion needs ε > 0"));
    }
    let e23 = eps.powf(2.0 / 3.0);
    let e13 = eps.cbrt();
    let evals: Vec<(f64, bool)> = omega_t
        .par_iter()
        .map(|&x| {
            let c = airy_coefficients(x / eps)?;
            let ai = airy_ai_detail(e23 * c.gamma_sq)?;
            Ok((2.0 * PI * c.a0_mod / e13 * ai.value, ai.underflow))
        })
        .collect::<Result<_>>()?;
    let mut grid = SpectrumGrid::new(
        omega_t.to_vec(),
        evals.iter().map(|e| Complex64::new(e.0, 0.0)).collect(),
        Method::AiryUniform,
    );
    if eps < AIRY_EPSILON_FLOOR {
        grid.warnings.push(format!("asymptotics unreliable: epsilon = {eps} is below {AIRY_EPSILON_FLOOR}"));
    }
    let underflows = evals.iter().filter(|e| e.1).count();
    if underflows > 0 {
        grid.warnings.push(format!("{underflows} points underflowed to 0"));
    }
    grid.drive = Some(*drive);
    grid.achieved_tolerance = f64::NAN;
    Ok(grid)
}

/// Stationary-phase spectrum for a symmetric continuous pulse. Points
/// with no stationary point are returned with `valid = false`.
pub fn spectrum_stationary_phase(
    phase: &PhaseFunction,
    drive: &DimensionlessDrive,
    omega_t: &[f64],
) -> Result<SpectrumGrid> {
    phase.validate()?;
    drive.validate()?;
    check_positive_grid(omega_t)?;
    if !phase.is_symmetric() || !phase.is_continuous() {
        return Err(Error::domain(
            "stationary phase needs a single symmetric pulse without jumps centered at zero",
        ));
    }
    let eps = drive.epsilon;
    if !(eps > 0.0) {
        return Err(Error::domain("stationary phase needs ε > 0"));
    }
    let mut values = Vec::with_capacity(omega_t.len());
    let mut valid = Vec::with_capacity(omega_t.len());
    let mut multiple = false;
    for &x in omega_t {
        let sp = phase.stationary_point(x / eps);
        multiple |= sp.multiple;
        match sp.root {
            None => {
                values.push(Complex64::new(0.0, 0.0));
                valid.push(false);
            }
            Some(t) => {
                let slope = phase.profile_derivative(t).abs();
                if slope < CAUSTIC_SLOPE {
                    return Err(Error::Singular(format!(
                        "|P'| = {slope:e} at the stationary point for ωT = {x}"
                    )));
                }
                let amp = (8.0 * PI / (eps * slope)).sqrt();
                let v = amp * (x * t - eps * phase.phase_at(t) + FRAC_PI_4).cos();
                values.push(Complex64::new(v, 0.0));
                valid.push(true);
            }
        }
    }
    let mut grid = SpectrumGrid::new(omega_t.to_vec(), values, Method::StationaryPhase);
    let missing = valid.iter().filter(|v| !**v).count();
    grid.valid = valid;
    if missing > 0 {
        grid.warnings.push(format!("{missing} points have no stationary point"));
    }
    if multiple {
        grid.warnings.push("several stationary points; the outermost was used".into());
    }
    grid.drive = Some(*drive);
    grid.achieved_tolerance = f64::NAN;
    Ok(grid)
}

/// Exact square-pulse spectrum sinc((ωT-ε)/2)·ε/ωT.
pub fn spectrum_square_closed(drive: &DimensionlessDrive, omega_t: &[f64]) -> Result<SpectrumGrid> {
    drive.validate()?;
    check_positive_grid(omega_t)?;
    let eps = drive.epsilon;
    let values = omega_t.iter().map(|&x| Complex64::new(square_value(eps, x), 0.0)).collect();
    let mut grid = SpectrumGrid::new(omega_t.to_vec(), values, Method::SquareClosed);
    grid.drive = Some(*drive);
    Ok(grid)
}

/// Square-pulse spectrum at a single point.
pub fn square_value(epsilon: f64, x: f64) -> f64 {
    sinc(0.5 * (x - epsilon)) * epsilon / x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseShape;
    use std::f64::consts::TAU;

    #[test]
    fn threshold_has_zero_alpha() {
        let c = airy_coefficients(FRAC_2_SQRT_PI).unwrap();
        assert!(c.alpha < 1e-7);
        assert!(c.gamma_sq.abs() < 1e-14);
        assert_eq!(c.branch, Branch::Below);
    }

    #[test]
    fn series_matches_direct_form_at_crossover() {
        for branch in [Branch::Below, Branch::Above] {
            let a: f64 = 1.0 - 1e-12;
            let series = turning_series(a, branch);
            let direct = turning_series(1.0, branch);
            assert!((series - direct).abs() < 1e-10 * direct, "{branch:?} {series} {direct}");
        }
    }

    #[test]
    fn continuous_across_threshold() {
        let d = DimensionlessDrive::reduced(100.0);
        let x0 = 100.0 * FRAC_2_SQRT_PI;
        let g = spectrum_gaussian_uniform(&d, &[x0 * (1.0 - 1e-9), x0, x0 * (1.0 + 1e-9)]).unwrap();
        let v = g.abs();
        assert!((v[0] - v[1]).abs() < 1e-6 * v[1]);
        assert!((v[2] - v[1]).abs() < 1e-6 * v[1]);
    }

    #[test]
    fn decays_beyond_sweep() {
        let d = DimensionlessDrive::reduced(100.0);
        let xs: Vec<f64> = (0..20).map(|k| 120.0 + k as f64).collect();
        let g = spectrum_gaussian_uniform(&d, &xs).unwrap();
        let v = g.abs();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        let args: Vec<f64> = xs.iter().map(|&x| airy_coefficients(x / 100.0).unwrap().gamma_sq).collect();
        assert!(args.windows(2).all(|w| w[1] > w[0] && w[0] > 0.0));
    }

    #[test]
    fn low_epsilon_is_flagged() {
        let g = spectrum_gaussian_uniform(&DimensionlessDrive::reduced(5.0), &[1.0, 2.0]).unwrap();
        assert!(g.warnings.iter().any(|w| w.contains("unreliable")));
    }

    #[test]
    fn square_closed_examples() {
        assert_eq!(square_value(100.0, 100.0), 1.0);
        assert!(square_value(100.0, 100.0 + TAU).abs() < 1e-13);
        assert!((square_value(100.0, 50.0) + 0.010_588_140_008).abs() < 1e-12);
    }

    #[test]
    fn stationary_phase_validity() {
        let rc = PhaseFunction::new(PulseShape::RaisedCosine);
        let d = DimensionlessDrive::reduced(100.0);
        let g = spectrum_stationary_phase(&rc, &d, &[50.0, 150.0]).unwrap();
        assert_eq!(g.valid, vec![true, false]);
        let sq = PhaseFunction::new(PulseShape::Square);
        assert!(spectrum_stationary_phase(&sq, &d, &[50.0]).is_err());
        let gauss = PhaseFunction::new(PulseShape::Gaussian);
        assert!(matches!(
            spectrum_stationary_phase(&gauss, &d, &[100.0 * FRAC_2_SQRT_PI]),
            Err(Error::Singular(_))
        ));
    }
}
