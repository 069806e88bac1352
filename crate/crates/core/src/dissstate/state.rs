use crate::constants::HBAR;
use crate::dynamics::PhysicalSetup;
use crate::error::{Error, Result};
use crate::pulses::DimensionlessDrive;
use crate::spectrum::SpectrumGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Probability above which the single-dissociation regime is left.
pub const PROBABILITY_WARNING: f64 = 0.1;

/// Allowed truncation loss of the spectral norm.
pub const COVERAGE_LIMIT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StateOptions {
    /// Treat the center-of-mass distribution as a delta function.
    pub delta_approximation: bool,
    /// Points on the relative-momentum grid (odd counts include p = 0).
    pub p_rel_points: usize,
    /// Points on the center-of-mass grid when the delta approximation is off.
    pub p_cm_points: usize,
    /// Half-span of the center-of-mass grid in units of the trap width.
    pub p_cm_span: f64,
    /// Override of the trap momentum width (limit tests).
    pub trap_width: Option<f64>,
}

impl Default for StateOptions {
    fn default() -> Self {
        StateOptions { delta_approximation: true, p_rel_points: 4001, p_cm_points: 41, p_cm_span: 6.0, trap_width: None }
    }
}

/// Longitudinal two-particle momentum amplitude.
#[derive(Clone, Debug, Serialize)]
pub struct DissociationState {
    pub p_cm: Vec<f64>,
    pub p_rel: Vec<f64>,
    /// Row-major over (p_cm, p_rel), normalized so that
    /// Σ|Ψ|²Δp_cm Δp_rel = 1 (Δp_cm = 1 for the singleton grid).
    pub amplitude: Vec<Complex64>,
    /// ‖C̃‖² [s²·kg·m/s].
    pub norm_sq: f64,
    pub probability: f64,
    /// Estimated fraction of ‖C̃‖² lying beyond the momentum grid.
    pub truncation: f64,
    pub warnings: Vec<String>,
}

impl DissociationState {
    pub fn at(&self, i_cm: usize, i_rel: usize) -> Complex64 {
        self.amplitude[i_cm * self.p_rel.len() + i_rel]
    }

    pub fn dp_rel(&self) -> f64 {
        step(&self.p_rel)
    }

    pub fn dp_cm(&self) -> f64 {
        if self.p_cm.len() > 1 {
            step(&self.p_cm)
        } else {
            1.0
        }
    }

    /// Σ|Ψ|² ΔpΔp with trapezoid weights.
    pub fn total_probability(&self) -> f64 {
        let (ncm, nrel) = (self.p_cm.len(), self.p_rel.len());
        let mut s = 0.0;
        for i in 0..ncm {
            for j in 0..nrel {
                s += trapezoid_weight(i, ncm) * trapezoid_weight(j, nrel) * self.at(i, j).norm_sqr();
            }
        }
        s * self.dp_cm() * self.dp_rel()
    }

    /// Relative-momentum density with the center of mass integrated out.
    pub fn marginal(&self) -> Vec<f64> {
        let (ncm, nrel) = (self.p_cm.len(), self.p_rel.len());
        (0..nrel)
            .map(|j| (0..ncm).map(|i| trapezoid_weight(i, ncm) * self.at(i, j).norm_sqr()).sum::<f64>() * self.dp_cm())
            .collect()
    }
}

fn step(x: &[f64]) -> f64 {
    (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
}

pub(crate) fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if n > 1 && (i == 0 || i == n - 1) {
        0.5
    } else {
        1.0
    }
}

/// Symmetric grid with exactly mirrored points.
pub(crate) fn symmetric_grid(half_span: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    let m = (n - 1) as f64;
    (0..n).map(|k| half_span * (2.0 * k as f64 - m) / m).collect()
}

/// Pair energy → reduced frequency of the spectrum.
pub fn energy_to_omega_t(energy: f64, drive: &DimensionlessDrive) -> f64 {
    (energy - drive.base_energy) * drive.duration / HBAR
}

/// Reduced frequency at which the pair with the given momenta samples the spectrum.
pub fn omega_t_for(p_cm: f64, p_rel: f64, setup: &PhysicalSetup, drive: &DimensionlessDrive) -> f64 {
    let e = setup.background_threshold()
        + p_cm * p_cm / (2.0 * setup.total_mass())
        + p_rel * p_rel / (2.0 * setup.reduced_mass());
    energy_to_omega_t(e, drive)
}

/// Ground-state amplitude of the longitudinal trap in momentum space.
pub fn trap_amplitude(p: f64, width: f64) -> f64 {
    (2.0 * PI * width * width).powf(-0.25) * (-p * p / (4.0 * width * width)).exp()
}

/// Cubic Lagrange interpolation of the spectrum, in units of T.
pub(crate) fn interpolate(grid: &SpectrumGrid, x: f64) -> Result<Complex64> {
    let xs = &grid.omega_t;
    let n = xs.len();
    if n < 4 {
        return Err(Error::config("spectrum grid needs at least 4 points for interpolation"));
    }
    let (lo, hi) = (xs[0], xs[n - 1]);
    let slack = 1e-12 * hi.abs();
    if x < lo - slack || x > hi + slack {
        return Err(Error::Range {
            message: format!(
                "spectrum needed at ωT = {x:.6e} but the grid covers [{lo:.6e}, {hi:.6e}]; extend it to include the band [{:.6e}, {:.6e}]",
                x.min(lo),
                x.max(hi)
            ),
            scaled: None,
        });
    }
    let i = xs.partition_point(|&v| v < x);
    let start = i.saturating_sub(2).min(n - 4);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in start..start + 4 {
        if !grid.valid[a] {
            return Err(Error::Range {
                message: format!("spectrum has no value at ωT = {:.6e}", xs[a]),
                scaled: None,
            });
        }
        let mut w = 1.0;
        for b in start..start + 4 {
            if a != b {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += grid.values[a] * w;
    }
    Ok(acc)
}

fn drive_of(grid: &SpectrumGrid) -> Result<DimensionlessDrive> {
    grid.drive.ok_or_else(|| Error::config("spectrum carries no drive record; the energy mapping needs T and E₀"))
}

/// Largest relative momentum whose energy is still inside the spectrum grid.
pub fn max_momentum(grid: &SpectrumGrid, setup: &PhysicalSetup) -> Result<f64> {
    let drive = drive_of(grid)?;
    let x_min = grid.omega_t[0];
    let x_max = *grid.omega_t.last().unwrap();
    let x0 = omega_t_for(0.0, 0.0, setup, &drive);
    if x0 < x_min * (1.0 - 1e-12) {
        return Err(Error::Range {
            message: format!(
                "pair threshold maps to ωT = {x0:.6e}, below the spectrum grid start {x_min:.6e}; extend the grid down to it"
            ),
            scaled: None,
        });
    }
    if x0 >= x_max {
        return Err(Error::Range {
            message: format!("spectrum grid ends at ωT = {x_max:.6e}, below the pair threshold {x0:.6e}"),
            scaled: None,
        });
    }
    let energy = (x_max - x0) * HBAR / drive.duration;
    Ok((2.0 * setup.reduced_mass() * energy).sqrt() * (1.0 - 1e-12))
}

/// Ψ_z(p_cm, p_rel)·‖C̃‖: the interpolated spectrum times the trap factor.
/// With `trap_width = None` the trap factor is omitted (delta approximation).
pub fn momentum_amplitude(
    ctilde: &SpectrumGrid,
    setup: &PhysicalSetup,
    p_cm: f64,
    p_rel: f64,
    trap_width: Option<f64>,
) -> Result<Complex64> {
    let drive = drive_of(ctilde)?;
    let c = interpolate(ctilde, omega_t_for(p_cm, p_rel, setup, &drive))? * drive.duration;
    Ok(match trap_width {
        Some(w) => c * trap_amplitude(p_cm, w),
        None => c,
    })
}

/// Relative density below which the tail is treated as numerical noise.
const NOISE_FLOOR: f64 = 1e-10;

/// Tail estimate from the envelope of the density over the outer 10% of
/// the grid, fitted to a power law.
fn truncation_estimate(p: &[f64], density: &[f64], integral: f64) -> f64 {
    let n = p.len();
    let p_max = p[n - 1];
    let env = |lo: f64, hi: f64| {
        p.iter().zip(density).filter(|(q, _)| **q >= lo * p_max && **q <= hi * p_max).map(|(_, d)| *d).fold(0.0, f64::max)
    };
    let inner = env(0.90, 0.95);
    let outer = env(0.95, 1.0);
    if outer <= 0.0 {
        return 0.0;
    }
    if integral <= 0.0 {
        return f64::INFINITY;
    }
    // an envelope at roundoff level carries no usable decay law
    let top = density.iter().copied().fold(0.0, f64::max);
    if outer <= NOISE_FLOOR * top {
        return 2.0 * outer * p_max / integral;
    }
    // decay exponent between the envelope centers 0.925 and 0.975
    let k = (inner / outer).ln() / (0.975f64 / 0.925).ln();
    if k <= 1.0 {
        return f64::INFINITY;
    }
    // both sides of the symmetric grid
    2.0 * outer * p_max / (k - 1.0) / integral
}

/// ‖C̃‖² with its estimated truncation loss. Errors if the loss exceeds 1e-4.
pub fn spectral_norm(ctilde: &SpectrumGrid, setup: &PhysicalSetup, options: &StateOptions) -> Result<(f64, f64)> {
    let state = assemble_unnormalized(ctilde, setup, options)?;
    check_coverage(&state)?;
    Ok((state.norm_sq, state.truncation))
}

/// |C_bg|² = ω_G a_bg μ_res ΔB_res ‖C̃‖² / (πħ²).
pub fn dissociation_probability(norm_sq: f64, setup: &PhysicalSetup) -> (f64, Option<String>) {
    let p = setup.omega_guide * setup.a_bg * setup.mu_res * setup.delta_b_res * norm_sq / (PI * HBAR * HBAR);
    let warn = (p > PROBABILITY_WARNING).then(|| {
        format!("dissociation probability {p:.3} exceeds {PROBABILITY_WARNING}; multiple dissociations become likely")
    });
    (p, warn)
}

fn assemble_unnormalized(
    ctilde: &SpectrumGrid,
    setup: &PhysicalSetup,
    options: &StateOptions,
) -> Result<DissociationState> {
    setup.validate()?;
    let p_max = max_momentum(ctilde, setup)?;
    let n_rel = options.p_rel_points.max(5) | 1;
    let p_rel = symmetric_grid(p_max, n_rel);
    let width = options.trap_width.unwrap_or_else(|| setup.trap_momentum_width());
    let (p_cm, trap) = if options.delta_approximation {
        (vec![0.0], None)
    } else {
        let cm = symmetric_grid(options.p_cm_span * width, options.p_cm_points.max(3));
        // the heaviest center-of-mass energy must fit as well
        let corner = omega_t_for(cm[cm.len() - 1], p_max, setup, &ctilde.drive.unwrap());
        if corner > *ctilde.omega_t.last().unwrap() {
            let p_fit = (p_max * p_max - cm[cm.len() - 1].powi(2) * setup.reduced_mass() / setup.total_mass())
                .max(0.0)
                .sqrt();
            return assemble_with(ctilde, setup, symmetric_grid(p_fit, n_rel), cm, Some(width));
        }
        (cm, Some(width))
    };
    assemble_with(ctilde, setup, p_rel, p_cm, trap)
}

fn assemble_with(
    ctilde: &SpectrumGrid,
    setup: &PhysicalSetup,
    p_rel: Vec<f64>,
    p_cm: Vec<f64>,
    trap: Option<f64>,
) -> Result<DissociationState> {
    let mut amplitude = Vec::with_capacity(p_cm.len() * p_rel.len());
    for &pc in &p_cm {
        for &pr in &p_rel {
            amplitude.push(momentum_amplitude(ctilde, setup, pc, pr, trap)?);
        }
    }
    let mut state = DissociationState {
        p_cm,
        p_rel,
        amplitude,
        norm_sq: 0.0,
        probability: 0.0,
        truncation: 0.0,
        warnings: ctilde.warnings.clone(),
    };
    let norm_sq = state.total_probability();
    let marginal = state.marginal();
    let n = state.p_rel.len();
    let half_p: Vec<f64> = state.p_rel[n / 2..].to_vec();
    let half_d: Vec<f64> = marginal[n / 2..].to_vec();
    state.truncation = truncation_estimate(&half_p, &half_d, norm_sq);
    state.norm_sq = norm_sq;
    Ok(state)
}

fn check_coverage(state: &DissociationState) -> Result<()> {
    if !(state.norm_sq > 0.0) {
        return Err(Error::Coverage("spectrum vanishes on the mapped momentum band".into()));
    }
    if state.truncation > COVERAGE_LIMIT {
        return Err(Error::Coverage(format!(
            "estimated {:.2e} of the spectral norm lies beyond the grid (limit {COVERAGE_LIMIT:e}); extend the frequency grid",
            state.truncation
        )));
    }
    Ok(())
}

/// Normalized dissociation state assembled from a spectrum.
pub fn assemble_state(
    ctilde: &SpectrumGrid,
    setup: &PhysicalSetup,
    options: &StateOptions,
) -> Result<DissociationState> {
    let mut state = assemble_unnormalized(ctilde, setup, options)?;
    check_coverage(&state)?;
    let scale = 1.0 / state.norm_sq.sqrt();
    state.amplitude.iter_mut().for_each(|a| *a *= scale);
    let (p, warn) = dissociation_probability(state.norm_sq, setup);
    state.probability = p;
    state.warnings.extend(warn);
    Ok(state)
}
