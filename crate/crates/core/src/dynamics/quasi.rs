use super::decay::raw_rate;
use super::setup::PhysicalSetup;
use crate::error::{Error, Result};
use serde::Serialize;

/// Energy distribution of dissociated pairs for a monotone sweep.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyDistribution {
    /// Cell edges (the ramp energies).
    pub edges: Vec<f64>,
    /// Cell averages of n(E) [1/J]; exact, so Σ n·ΔE = 1 - survival.
    pub density: Vec<f64>,
    /// n(E) at the ramp nodes, +∞ at the threshold node if it is one.
    pub pointwise: Vec<f64>,
    /// Probability that no dissociation happened by the end of the ramp.
    pub survival: f64,
}

impl EnergyDistribution {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total(&self) -> f64 {
        self.density.iter().zip(self.edges.windows(2)).map(|(n, w)| n * (w[1] - w[0])).sum()
    }
}

/// n(E) = -d/dE exp(-∫Γ/Ė dE) for a ramp given as samples (t_i, E_i),
/// linear between samples.
pub fn quasi_stationary_distribution(
    times: &[f64],
    energies: &[f64],
    setup: &PhysicalSetup,
) -> Result<EnergyDistribution> {
    setup.validate()?;
    if times.len() != energies.len() || times.len() < 2 {
        return Err(Error::config("ramp needs at least two (t, E) samples of equal length"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("ramp times must increase strictly"));
    }
    if energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("ramp energy must increase strictly; non-monotone sweeps are not supported"));
    }
    let thr = setup.decay_threshold();
    let c = setup.decay_prefactor() * (2.0 * setup.reduced_mass()).sqrt();
    let root = |e: f64| (e - thr).max(0.0).sqrt();

    let mut exposure = vec![0.0; times.len()];
    for i in 0..times.len() - 1 {
        let (ea, eb) = (energies[i], energies[i + 1]);
        let dt = times[i + 1] - times[i];
        exposure[i + 1] = exposure[i] + c * dt / (eb - ea) * 2.0 * (root(eb) - root(ea));
    }
    let remaining: Vec<f64> = exposure.iter().map(|x| (-x).exp()).collect();
    let density = (0..times.len() - 1)
        .map(|i| (remaining[i] - remaining[i + 1]) / (energies[i + 1] - energies[i]))
        .collect();
    let pointwise = (0..times.len())
        .map(|i| {
            let j = if i + 1 < times.len() { i } else { i - 1 };
            let rate_e = (energies[j + 1] - energies[j]) / (times[j + 1] - times[j]);
            let g = if energies[i] > thr { raw_rate(energies[i], setup) } else { 0.0 };
            let g = if energies[i] == thr { f64::INFINITY } else { g };
            g / rate_e * remaining[i]
        })
        .collect();
    Ok(EnergyDistribution {
        edges: energies.to_vec(),
        density,
        pointwise,
        survival: *remaining.last().unwrap(),
    })
}
