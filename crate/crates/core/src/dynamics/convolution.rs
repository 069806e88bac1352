use crate::error::{Error, Result};
use crate::spectrum::{uniform_step, Method, SpectrumGrid};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// (1/2π)∫ a(ω̄) b(ω - ω̄) dω̄ on uniform grids with equal spacing.
///
/// The shorter grid acts as the kernel and is summed in full with
/// trapezoid weights; the output covers the frequencies where the kernel
/// fits entirely inside the longer grid.
pub fn convolve_spectrum(c0: &SpectrumGrid, d: &SpectrumGrid) -> Result<SpectrumGrid> {
    let hc = uniform_step(&c0.omega_t).ok_or_else(|| Error::config("convolution: first grid is not uniform"))?;
    let hd = uniform_step(&d.omega_t).ok_or_else(|| Error::config("convolution: second grid is not uniform"))?;
    if ((hc - hd) / hc).abs() > 1e-9 {
        return Err(Error::config(format!("convolution: grid spacings differ ({hc} vs {hd})")));
    }
    let (long, kernel) = if d.len() <= c0.len() { (c0, d) } else { (d, c0) };
    let (nl, nk) = (long.len(), kernel.len());
    let h = hc;
    let base = long.omega_t[0] + kernel.omega_t[0];
    let weight = |k: usize| if nk > 1 && (k == 0 || k == nk - 1) { 0.5 } else { 1.0 };

    let mut omega = Vec::with_capacity(nl - nk + 1);
    let mut values = Vec::with_capacity(nl - nk + 1);
    for n in (nk - 1)..nl {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..nk {
            acc += kernel.values[k] * long.values[n - k] * weight(k);
        }
        omega.push(base + h * n as f64);
        values.push(acc * (h / TAU));
    }
    let mut out = SpectrumGrid::new(omega, values, Method::Convolved);
    out.drive = c0.drive.or(d.drive);
    out.achieved_tolerance = c0.achieved_tolerance.max(d.achieved_tolerance);
    out.warnings = c0.warnings.iter().chain(&d.warnings).cloned().collect();
    let edge = kernel.values[0].norm().max(kernel.values[nk - 1].norm());
    if edge > 1e-6 * kernel.max_abs() {
        out.warnings.push("convolution kernel does not decay to 1e-6 of its maximum at the grid edges".into());
    }
    Ok(out)
}

/// Transform of exp(-Γt/2)Θ(t) in reduced units: 1/(ΓT/2 - iωT).
pub fn lorentzian(gamma_t: f64, omega_t: &[f64]) -> SpectrumGrid {
    let values = omega_t.iter().map(|&x| 1.0 / Complex64::new(0.5 * gamma_t, -x)).collect();
    SpectrumGrid::new(omega_t.to_vec(), values, Method::Convolved)
}
