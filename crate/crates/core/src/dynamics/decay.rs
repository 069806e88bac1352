use super::setup::PhysicalSetup;
use crate::error::{Error, Result};
use crate::pulses::{DimensionlessDrive, PhaseFunction};
use crate::quadrature::{integrate, Tolerance};
use num_complex::Complex64;
use serde::Serialize;

/// Decay rate at one resonance energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRate {
    /// Γ in 1/s; +∞ inside the pole guard band.
    pub value: f64,
    pub near_pole: bool,
}

/// Γ(E_res) without the guard band, used inside integrals.
pub(crate) fn raw_rate(e_res: f64, setup: &PhysicalSetup) -> f64 {
    let above = e_res - setup.decay_threshold();
    if above > 0.0 {
        setup.decay_prefactor() * (2.0 * setup.reduced_mass() / above).sqrt()
    } else {
        0.0
    }
}

/// Decay rate of the closed-channel molecule into the guide continuum.
pub fn decay_rate(e_res: f64, setup: &PhysicalSetup) -> DecayRate {
    let above = e_res - setup.decay_threshold();
    if above > 0.0 && above <= setup.pole_guard() {
        DecayRate { value: f64::INFINITY, near_pole: true }
    } else {
        DecayRate { value: raw_rate(e_res, setup), near_pole: false }
    }
}

/// Survival amplitude along a time grid.
#[derive(Clone, Debug, Serialize)]
pub struct DecayProfile {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Real and positive by gauge choice.
    pub amplitude: Vec<f64>,
    pub survival: f64,
    /// Samples that fell into the pole guard band.
    pub near_pole: Vec<bool>,
}

/// Energy swept by the pulse: E_res(t) = E₀ + ΔE·P(t/T) - U_cl.
pub fn resonance_energy_at(pulse: &PhaseFunction, drive: &DimensionlessDrive, setup: &PhysicalSetup, t: f64) -> f64 {
    drive.base_energy + drive.height * pulse.profile(t / drive.duration) - setup.closed_offset()
}

/// Times (physical) at which E_res crosses the decay threshold.
pub fn threshold_crossings(pulse: &PhaseFunction, drive: &DimensionlessDrive, setup: &PhysicalSetup) -> Vec<f64> {
    if !(drive.height > 0.0) {
        return vec![];
    }
    let level = (setup.decay_threshold() - drive.base_energy + setup.closed_offset()) / drive.height;
    pulse.crossings(level).into_iter().map(|u| u * drive.duration).collect()
}

const TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-11, max_splits: 4000 };

/// ∫Γ dt over [a, b] where Γ is smooth inside, except for an inverse
/// square-root singularity at an end flagged as a crossing.
fn integrate_piece(rate: &dyn Fn(f64) -> f64, a: f64, b: f64, sing_a: bool, sing_b: bool) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if sing_a && sing_b {
        let m = 0.5 * (a + b);
        return Ok(integrate_piece(rate, a, m, true, false)? + integrate_piece(rate, m, b, false, true)?);
    }
    let w = (b - a).sqrt();
    let est = if sing_a {
        integrate(&|s: f64| Complex64::new(rate(a + s * s) * 2.0 * s, 0.0), &[0.0, w], TOL)
    } else if sing_b {
        integrate(&|s: f64| Complex64::new(rate(b - s * s) * 2.0 * s, 0.0), &[0.0, w], TOL)
    } else {
        integrate(&|t: f64| Complex64::new(rate(t), 0.0), &[a, b], TOL)
    };
    if !est.converged && est.error > 1e-8 * est.value.re.abs().max(1e-300) {
        return Err(Error::Numeric { message: "decay integral did not converge".into(), achieved: est.error });
    }
    Ok(est.value.re)
}

/// Decay profile D(t) = exp(-½∫Γ) on the given time grid, integrating Γ
/// exactly between nodes (knots and threshold crossings are resolved
/// analytically, so the grid only controls where D is reported).
pub fn decay_profile(
    pulse: &PhaseFunction,
    drive: &DimensionlessDrive,
    setup: &PhysicalSetup,
    times: &[f64],
) -> Result<DecayProfile> {
    pulse.validate()?;
    drive.validate()?;
    setup.validate()?;
    if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("decay time grid needs at least two strictly increasing points"));
    }
    let rate = |t: f64| raw_rate(resonance_energy_at(pulse, drive, setup, t), setup);

    let crossings = threshold_crossings(pulse, drive, setup);
    let mut cuts: Vec<(f64, bool)> = pulse.knots().into_iter().map(|u| (u * drive.duration, false)).collect();
    cuts.extend(crossings.iter().map(|&t| (t, true)));
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut cumulative = vec![0.0; times.len()];
    for i in 0..times.len() - 1 {
        let (a, b) = (times[i], times[i + 1]);
        let mut pts: Vec<(f64, bool)> = vec![(a, crossings.contains(&a))];
        pts.extend(cuts.iter().copied().filter(|&(t, _)| t > a && t < b));
        pts.push((b, crossings.contains(&b)));
        let mut sum = 0.0;
        for w in pts.windows(2) {
            sum += integrate_piece(&rate, w[0].0, w[1].0, w[0].1, w[1].1)?;
        }
        cumulative[i + 1] = cumulative[i] + sum;
    }

    let samples: Vec<DecayRate> =
        times.iter().map(|&t| decay_rate(resonance_energy_at(pulse, drive, setup, t), setup)).collect();
    check_resolution(times, &samples, pulse, drive, setup)?;

    let amplitude: Vec<f64> = cumulative.iter().map(|x| (-0.5 * x).exp()).collect();
    let survival = amplitude.last().unwrap().powi(2);
    Ok(DecayProfile {
        times: times.to_vec(),
        gamma: samples.iter().map(|r| r.value).collect(),
        amplitude,
        survival,
        near_pole: samples.iter().map(|r| r.near_pole).collect(),
    })
}

/// Flags intervals clear of the pole band on which Γ changes by more
/// than 20%; intervals containing a pulse jump are exempt.
fn check_resolution(
    times: &[f64],
    samples: &[DecayRate],
    pulse: &PhaseFunction,
    drive: &DimensionlessDrive,
    setup: &PhysicalSetup,
) -> Result<()> {
    let jumps: Vec<f64> = if pulse.is_continuous() {
        vec![]
    } else {
        pulse.knots().into_iter().map(|u| u * drive.duration).collect()
    };
    let clear = setup.decay_threshold() + setup.pole_guard();
    for i in 0..times.len() - 1 {
        let (ea, eb) = (
            resonance_energy_at(pulse, drive, setup, times[i]),
            resonance_energy_at(pulse, drive, setup, times[i + 1]),
        );
        if ea <= clear || eb <= clear {
            continue;
        }
        if jumps.iter().any(|&j| j >= times[i] && j <= times[i + 1]) {
            continue;
        }
        let (ga, gb) = (samples[i].value, samples[i + 1].value);
        let change = (ga - gb).abs() / ga.max(gb);
        if change > 0.2 {
            return Err(Error::Resolution(format!(
                "decay rate changes by {:.0}% between t = {:e} s and t = {:e} s; refine the time grid",
                100.0 * change,
                times[i],
                times[i + 1]
            )));
        }
    }
    Ok(())
}

/// Geometric growth of the refinement offsets; Γ ∝ (E - thr)^(-1/2) then
/// changes by at most 1 - 1/√1.4 ≈ 15% between neighbours.
const GRID_RATIO: f64 = 1.4;

/// Time grid resolving the rate near threshold crossings: `n` uniform
/// points over [t0, t1] plus geometric refinement from the pole band
/// outward on the decaying side of every crossing.
pub fn decay_time_grid(
    pulse: &PhaseFunction,
    drive: &DimensionlessDrive,
    setup: &PhysicalSetup,
    t0: f64,
    t1: f64,
    n: usize,
) -> Vec<f64> {
    let n = n.max(2);
    let h = (t1 - t0) / (n - 1) as f64;
    let mut t: Vec<f64> = (0..n).map(|k| t0 + h * k as f64).collect();
    let energy = |s: f64| resonance_energy_at(pulse, drive, setup, s);
    let thr = setup.decay_threshold();
    for c in threshold_crossings(pulse, drive, setup) {
        // decaying side is where the energy rises above threshold
        let probe = 1e-9 * drive.duration;
        let dir = if energy(c + probe) > thr { 1.0 } else { -1.0 };
        // smallest offset clearing the pole band, by bisection on the offset
        let (mut lo, mut hi) = (0.0, drive.duration);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if energy(c + dir * mid) - thr > setup.pole_guard() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // continue past one uniform step so the hand-off ratio stays bounded
        let mut d = hi;
        loop {
            let s = c + dir * d;
            if s > t0 && s < t1 {
                t.push(s);
            }
            if d >= 2.0 * h {
                break;
            }
            d *= GRID_RATIO;
        }
    }
    t.sort_by(f64::total_cmp);
    t.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * h);
    t
}
