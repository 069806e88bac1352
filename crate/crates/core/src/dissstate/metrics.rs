use super::state::{omega_t_for, trapezoid_weight, DissociationState};
use crate::dynamics::PhysicalSetup;
use crate::pulses::DimensionlessDrive;
use serde::Serialize;

/// Local minima below this fraction of the peak bracket the main lobe.
pub const LOBE_FLOOR: f64 = 1e-2;

#[derive(Clone, Debug, Serialize)]
pub struct DistributionMetrics {
    /// Relative momentum of the main peak (p ≥ 0 side).
    pub peak_momentum: f64,
    /// Full width at half maximum in p_rel; absent without a dominant peak.
    pub fwhm: Option<f64>,
    /// FWHM mapped to reduced frequency.
    pub fwhm_omega_t: Option<f64>,
    /// Standard deviation of |p_rel|.
    pub rms_width: f64,
    /// Probability outside the main lobe, both signs of p_rel counted.
    pub ripple_fraction: f64,
    /// p₀/m.
    pub atom_velocity: f64,
    /// p₀/μ.
    pub relative_velocity: f64,
    /// Local maxima on p ≥ 0 above the lobe floor, largest first.
    pub modes: Vec<f64>,
    pub dominant: bool,
}

/// Index bracket [lo, hi] of the lobe around `peak`: walk outward to the
/// first local minimum under `LOBE_FLOOR`·peak, or to the grid end.
pub fn lobe_bracket(density: &[f64], peak: usize) -> (usize, usize) {
    let floor = LOBE_FLOOR * density[peak];
    let n = density.len();
    let mut hi = peak;
    while hi + 1 < n {
        let is_min = density[hi + 1] >= density[hi] && hi > peak;
        if is_min && density[hi] < floor {
            break;
        }
        hi += 1;
    }
    let mut lo = peak;
    while lo > 0 {
        let is_min = density[lo - 1] >= density[lo] && lo < peak;
        if is_min && density[lo] < floor {
            break;
        }
        lo -= 1;
    }
    (lo, hi)
}

/// Local maxima with values, sorted by decreasing height.
pub fn local_maxima(density: &[f64], floor: f64) -> Vec<(usize, f64)> {
    let n = density.len();
    let mut out: Vec<(usize, f64)> = (0..n)
        .filter(|&i| {
            let left = i == 0 || density[i] > density[i - 1];
            let right = i == n - 1 || density[i] >= density[i + 1];
            left && right && density[i] > floor
        })
        .map(|i| (i, density[i]))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

fn half_crossings(p: &[f64], d: &[f64], peak: usize) -> Option<(f64, f64)> {
    let half = 0.5 * d[peak];
    let interp = |i: usize, j: usize| p[i] + (p[j] - p[i]) * (half - d[i]) / (d[j] - d[i]);
    let mut r = peak;
    while r + 1 < d.len() && d[r + 1] > half {
        r += 1;
    }
    let right = if r + 1 < d.len() { interp(r, r + 1) } else { return None };
    let mut l = peak;
    while l > 0 && d[l - 1] > half {
        l -= 1;
    }
    // a lobe touching p = 0 is mirrored, its left half-point is on the p < 0 side
    let left = if l > 0 { interp(l, l - 1) } else { -right };
    Some((left, right))
}

pub fn distribution_metrics(
    state: &DissociationState,
    setup: &PhysicalSetup,
    drive: &DimensionlessDrive,
) -> DistributionMetrics {
    let marginal = state.marginal();
    let n = state.p_rel.len();
    let mid = n / 2;
    let p: Vec<f64> = state.p_rel[mid..].to_vec();
    let d: Vec<f64> = marginal[mid..].to_vec();

    let (peak, top) = d.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let p0 = p[peak];
    let modes = local_maxima(&d, LOBE_FLOOR * top);
    let dominant = modes.len() < 2 || modes[0].1 >= 2.0 * modes[1].1;

    let fwhm_pair = if dominant { half_crossings(&p, &d, peak) } else { None };
    let fwhm = fwhm_pair.map(|(a, b)| b - a);
    let fwhm_omega_t = fwhm_pair.map(|(a, b)| {
        let lo = if a < 0.0 { 0.0 } else { a };
        omega_t_for(0.0, b, setup, drive) - omega_t_for(0.0, lo, setup, drive)
    });

    // moments over the full symmetric grid
    let dp = state.dp_rel();
    let w: Vec<f64> = (0..n).map(|j| trapezoid_weight(j, n) * marginal[j] * dp).collect();
    let total: f64 = w.iter().sum();
    let mean_abs: f64 = w.iter().zip(&state.p_rel).map(|(w, q)| w * q.abs()).sum::<f64>() / total;
    let var: f64 = w.iter().zip(&state.p_rel).map(|(w, q)| w * (q.abs() - mean_abs).powi(2)).sum::<f64>() / total;

    let (lo, hi) = lobe_bracket(&d, peak);
    let mut inside = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let k = if j >= mid { j - mid } else { n - 1 - j - mid };
        if k >= lo && k <= hi {
            inside += wj;
        }
    }
    let ripple_fraction = (1.0 - inside / total).max(0.0);

    DistributionMetrics {
        peak_momentum: p0,
        fwhm,
        fwhm_omega_t,
        rms_width: var.sqrt(),
        ripple_fraction,
        atom_velocity: p0 / setup.mass,
        relative_velocity: p0 / setup.reduced_mass(),
        modes: modes.iter().map(|&(i, _)| p[i]).collect(),
        dominant,
    }
}
