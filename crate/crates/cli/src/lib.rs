//! Orchestration behind the `feshpulse` binary: configuration parsing and
//! the subcommands that write spectra, states, decay profiles, search
//! traces and validity reports as CSV/JSON with sidecars.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;

pub use config::{parse_config, parse_config_str, GridConfig, MethodChoice, OptimizeConfig, RunConfig};

use feshpulse::dissstate::{assemble_state, distribution_metrics, omega_t_for, validate_regime, RegimeReport};
use feshpulse::dynamics::{
    check_slow_sweep, decay_profile, decay_time_grid, memory_time, quasi_stationary_distribution,
    resonance_energy_at, threshold_crossings, DEFAULT_LOCALIZATION,
};
use feshpulse::io::{write_csv, write_json, write_spectrum_csv, Sidecar};
use feshpulse::optimize::{optimize_pulse, write_trace, SearchOptions};
use feshpulse::spectrum::{default_grid, linspace};
use feshpulse::{
    spectrum_gaussian_uniform, spectrum_numeric, spectrum_square_closed, spectrum_stationary_phase, PulseShape,
    SpectrumGrid,
};
use serde_json::json;
use std::path::{Path, PathBuf};

/// Default number of spectrum points.
pub const DEFAULT_OMEGA_POINTS: usize = 4096;
/// Default upper edge of the spectrum band relative to ε.
pub const DEFAULT_BAND_TOP: f64 = 1.3;
/// Upper edge of the band used to assemble states, relative to ε; wide
/// enough that the slowly decaying square-pulse tail stays under the
/// coverage limit.
pub const STATE_BAND_TOP: f64 = 4.0;
/// Minimum width in ωT of the state band above the pair threshold; the
/// spectral tails decay in absolute ωT, so small ε needs this floor.
pub const STATE_BAND_MIN: f64 = 400.0;
/// Target spacing in ωT of the state spectrum grid.
pub const STATE_SPACING: f64 = 0.05;
/// Default uniform points of the decay time grid.
pub const DEFAULT_TIME_POINTS: usize = 2000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] feshpulse::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use feshpulse::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Config(_) | E::Domain(_) | E::Io(_) | E::Json(_) | E::Csv(_)) => 2,
            CliError::Core(_) => 3,
        }
    }
}

pub const EXIT_VALIDITY: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Dissociation spectrum on the ωT grid.
    Spectrum,
    /// Momentum-space dissociation state, metrics and validity report.
    State,
    /// Decay profile across threshold crossings and the energy distribution.
    Decay,
    /// Pulse-family search for the sharpest spectrum.
    Optimize,
    /// Regime validity report only.
    Validate,
    /// Residual between the numeric spectrum and an asymptotic form.
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::State => "state",
            Command::Decay => "decay",
            Command::Optimize => "optimize",
            Command::Validate => "validate",
            Command::Compare => "compare",
        }
    }
}

/// Command-line overrides of the configuration.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub method: Option<MethodChoice>,
    pub grid_points: Option<usize>,
    pub strict: bool,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Regime checks passed (true when none were run).
    pub valid: bool,
    pub messages: Vec<String>,
}

impl Outcome {
    /// Process exit status for this outcome.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && !self.valid {
            EXIT_VALIDITY
        } else {
            0
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    ov: &'a Overrides,
    dir: PathBuf,
    out: Outcome,
}

impl Ctx<'_> {
    fn emit_csv(&mut self, name: &str, sidecar: impl FnOnce(&Path) -> Sidecar, write: impl FnOnce(&Path) -> feshpulse::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write(&path)?;
        sidecar(&path).write_for(&path)?;
        self.out.files.push(path);
        Ok(())
    }

    fn emit_json<T: serde::Serialize>(&mut self, name: &str, method: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_json(&path, value)?;
        Sidecar::new(&path, &self.cfg.hash, method, 0.0).write_for(&path)?;
        self.out.files.push(path);
        Ok(())
    }

    fn sidecar(&self, path: &Path, spec: &SpectrumGrid) -> Sidecar {
        Sidecar::new(path, &self.cfg.hash, spec.method.tag(), spec.achieved_tolerance)
            .with_details(json!({ "drive": drive_json(self.cfg), "points": spec.len() }))
            .with_warnings(&spec.warnings)
    }
}

fn drive_json(cfg: &RunConfig) -> serde_json::Value {
    let d = &cfg.drive;
    json!({
        "epsilon": d.epsilon,
        "duration": d.duration,
        "base_energy": d.base_energy,
        "height": d.height,
        "physical_time": cfg.physical_time,
    })
}

/// Resolves `auto` and checks that closed forms match the pulse.
fn resolve_method(cfg: &RunConfig, choice: MethodChoice) -> Result<MethodChoice, CliError> {
    let single = cfg.single_shape.as_ref();
    match choice {
        MethodChoice::Auto => Ok(match single {
            Some(PulseShape::Square) => MethodChoice::Square,
            _ => MethodChoice::Numeric,
        }),
        MethodChoice::Airy if !matches!(single, Some(PulseShape::Gaussian)) => {
            Err(CliError::Config("method `airy` needs a single gaussian pulse".into()))
        }
        MethodChoice::Square if !matches!(single, Some(PulseShape::Square)) => {
            Err(CliError::Config("method `square` needs a single square pulse".into()))
        }
        m => Ok(m),
    }
}

fn compute(cfg: &RunConfig, method: MethodChoice, grid: &[f64]) -> Result<SpectrumGrid, CliError> {
    Ok(match resolve_method(cfg, method)? {
        MethodChoice::Numeric | MethodChoice::Auto => spectrum_numeric(&cfg.pulse, &cfg.drive, grid)?,
        MethodChoice::Airy => spectrum_gaussian_uniform(&cfg.drive, grid)?,
        MethodChoice::Stationary => spectrum_stationary_phase(&cfg.pulse, &cfg.drive, grid)?,
        MethodChoice::Square => spectrum_square_closed(&cfg.drive, grid)?,
    })
}

/// The ωT grid of the spectrum-type subcommands.
pub fn spectrum_grid(cfg: &RunConfig, points: Option<usize>) -> Vec<f64> {
    let n = points.or(cfg.grids.omega_points).unwrap_or(DEFAULT_OMEGA_POINTS).max(2);
    let eps = cfg.drive.epsilon;
    match (cfg.grids.omega_min, cfg.grids.omega_max) {
        (None, None) => default_grid(eps, n),
        (lo, hi) => {
            let hi = hi.unwrap_or(DEFAULT_BAND_TOP * eps);
            let lo = lo.unwrap_or(hi / n as f64);
            linspace(lo, hi, n)
        }
    }
}

/// ωT grid for state assembly: from just below the pair threshold to
/// the larger of `STATE_BAND_TOP`·ε and `STATE_BAND_MIN` past the
/// threshold, unless overridden.
pub fn state_grid(cfg: &RunConfig, points: Option<usize>) -> Result<Vec<f64>, CliError> {
    let setup = cfg.require_setup("state")?;
    let x0 = omega_t_for(0.0, 0.0, setup, &cfg.drive);
    if !(x0 > 0.0) {
        return Err(CliError::Config(format!(
            "the base energy must lie below the background threshold (pair threshold maps to ωT = {x0:.4e})"
        )));
    }
    let hi = cfg.grids.omega_max.unwrap_or((STATE_BAND_TOP * cfg.drive.epsilon).max(x0 + STATE_BAND_MIN));
    if !(hi > x0) {
        return Err(CliError::Config(format!("grids.omega_max = {hi} does not reach past the pair threshold {x0:.4e}")));
    }
    let n = points
        .or(cfg.grids.omega_points)
        .unwrap_or_else(|| ((hi - x0) / STATE_SPACING).ceil() as usize + 3)
        .max(8);
    let h = (hi - x0) / (n - 3) as f64;
    let lo = cfg.grids.omega_min.unwrap_or((x0 - 2.0 * h).max(0.5 * x0));
    if lo > x0 {
        return Err(CliError::Config(format!("grids.omega_min = {lo} lies above the pair threshold {x0:.4e}")));
    }
    Ok(linspace(lo, hi, n))
}

fn cmd_spectrum(ctx: &mut Ctx) -> Result<(), CliError> {
    let grid = spectrum_grid(ctx.cfg, ctx.ov.grid_points);
    let spec = compute(ctx.cfg, ctx.ov.method.unwrap_or(ctx.cfg.method), &grid)?;
    let side = |p: &Path| ctx.sidecar(p, &spec);
    let side = side(&ctx.dir.join("spectrum.csv"));
    ctx.emit_csv("spectrum.csv", |_| side, |p| write_spectrum_csv(p, &spec))?;
    ctx.out.messages.push(format!("spectrum: {} points, method {}", spec.len(), spec.method.tag()));
    Ok(())
}

fn asymptotic_for(cfg: &RunConfig, flag: Option<MethodChoice>) -> MethodChoice {
    match flag.unwrap_or(cfg.method) {
        m @ (MethodChoice::Airy | MethodChoice::Stationary | MethodChoice::Square) => m,
        _ => match cfg.single_shape {
            Some(PulseShape::Square) => MethodChoice::Square,
            Some(PulseShape::Gaussian) => MethodChoice::Airy,
            _ => MethodChoice::Stationary,
        },
    }
}

fn cmd_compare(ctx: &mut Ctx) -> Result<(), CliError> {
    let grid = spectrum_grid(ctx.cfg, ctx.ov.grid_points);
    let asym = asymptotic_for(ctx.cfg, ctx.ov.method);
    let num = compute(ctx.cfg, MethodChoice::Numeric, &grid)?;
    let other = compute(ctx.cfg, asym, &grid)?;
    let scale = num.max_abs();
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| {
            let (a, b) = (num.values[i], other.values[i]);
            if !(num.valid[i] && other.valid[i]) {
                return vec![grid[i], a.norm(), f64::NAN, f64::NAN, f64::NAN];
            }
            let r = (a - b).norm();
            max_abs = max_abs.max(r);
            max_rel = max_rel.max(r / scale);
            vec![grid[i], a.norm(), b.norm(), r, r / scale]
        })
        .collect();
    let mut warnings = num.warnings.clone();
    warnings.extend(other.warnings.iter().cloned());
    let tag = format!("numeric_vs_{}", other.method.tag());
    let side = Sidecar::new(&ctx.dir.join("compare.csv"), &ctx.cfg.hash, &tag, num.achieved_tolerance)
        .with_details(json!({
            "drive": drive_json(ctx.cfg),
            "max_residual": max_abs,
            "max_relative_residual": max_rel,
            "scale": scale,
        }))
        .with_warnings(&warnings);
    ctx.emit_csv(
        "compare.csv",
        |_| side,
        |p| write_csv(p, &["omega_T", "numeric_abs", "asymptotic_abs", "residual", "relative_residual"], rows),
    )?;
    ctx.out.messages.push(format!("compare: max residual {max_abs:.3e} (relative {max_rel:.3e}) against {}", other.method.tag()));
    Ok(())
}

fn memory_time_of(cfg: &RunConfig, mass: f64) -> f64 {
    cfg.memory_time.unwrap_or_else(|| memory_time(mass, DEFAULT_LOCALIZATION))
}

fn build_state(ctx: &mut Ctx, command: &str, write_state: bool) -> Result<RegimeReport, CliError> {
    let cfg = ctx.cfg;
    let setup = *cfg.require_setup(command)?;
    cfg.require_time(command)?;
    let grid = state_grid(cfg, ctx.ov.grid_points)?;
    let spec = compute(cfg, ctx.ov.method.unwrap_or(cfg.method), &grid)?;
    let state = assemble_state(&spec, &setup, &cfg.state)?;
    let metrics = distribution_metrics(&state, &setup, &cfg.drive);
    let slow = check_slow_sweep(&cfg.pulse, &cfg.drive, &setup, memory_time_of(cfg, setup.mass));
    let report = validate_regime(&state, &metrics, &setup, &cfg.drive, &slow);
    if write_state {
        let mut warnings = spec.warnings.clone();
        warnings.extend(state.warnings.iter().cloned());
        let side = Sidecar::new(&ctx.dir.join("state.csv"), &cfg.hash, spec.method.tag(), spec.achieved_tolerance)
            .with_details(json!({
                "drive": drive_json(cfg),
                "norm_sq": state.norm_sq,
                "probability": state.probability,
                "truncation": state.truncation,
                "total_probability": state.total_probability(),
                "spectrum_points": spec.len(),
            }))
            .with_warnings(&warnings);
        let n_rel = state.p_rel.len();
        let rows = (0..state.p_cm.len() * n_rel).map(|k| {
            let (i, j) = (k / n_rel, k % n_rel);
            let a = state.amplitude[k];
            vec![state.p_cm[i], state.p_rel[j], a.re, a.im, a.norm_sqr()]
        });
        ctx.emit_csv("state.csv", |_| side, |p| write_csv(p, &["p_cm", "p_rel", "re", "im", "prob_density"], rows))?;
        ctx.emit_json("metrics.json", spec.method.tag(), &metrics)?;
        ctx.out.messages.push(format!(
            "state: probability {:.4e}, peak p_rel {:.4e} kg·m/s, atom velocity {:.4e} m/s",
            state.probability, metrics.peak_momentum, metrics.atom_velocity
        ));
    }
    ctx.emit_json("regime.json", "regime_report", &report)?;
    ctx.out.messages.extend(report.lines());
    ctx.out.valid = report.all_pass();
    Ok(report)
}

/// Longest strictly increasing run of the energy samples containing the
/// first threshold crossing.
fn rising_run(times: &[f64], energies: &[f64], crossing: f64) -> Option<(usize, usize)> {
    let k = times.partition_point(|&t| t < crossing).min(times.len() - 1);
    let mut lo = k.saturating_sub(1);
    while lo > 0 && energies[lo - 1] < energies[lo] {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < energies.len() && energies[hi + 1] > energies[hi] {
        hi += 1;
    }
    (hi > lo && energies[lo] < energies[lo + 1]).then_some((lo, hi))
}

fn cmd_decay(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let setup = *cfg.require_setup("decay")?;
    cfg.require_time("decay")?;
    let (a, b) = cfg.pulse.window();
    let pad = 0.1 * (b - a);
    let t_dur = cfg.drive.duration;
    let n = ctx.ov.grid_points.or(cfg.grids.time_points).unwrap_or(DEFAULT_TIME_POINTS);
    let times = decay_time_grid(&cfg.pulse, &cfg.drive, &setup, (a - pad) * t_dur, (b + pad) * t_dur, n);
    let prof = decay_profile(&cfg.pulse, &cfg.drive, &setup, &times)?;
    let near: Vec<f64> = prof.times.iter().zip(&prof.near_pole).filter(|(_, f)| **f).map(|(t, _)| *t).collect();
    let side = Sidecar::new(&ctx.dir.join("decay.csv"), &cfg.hash, "decay_profile", 0.0).with_details(json!({
        "drive": drive_json(cfg),
        "survival": prof.survival,
        "threshold_crossings": threshold_crossings(&cfg.pulse, &cfg.drive, &setup),
        "near_pole_times": near,
    }));
    let rows = (0..prof.times.len()).map(|i| vec![prof.times[i], prof.gamma[i], prof.amplitude[i]]);
    ctx.emit_csv("decay.csv", |_| side, |p| write_csv(p, &["t", "gamma", "absD"], rows))?;
    ctx.out.messages.push(format!("decay: survival {:.6e}", prof.survival));

    let energies: Vec<f64> =
        times.iter().map(|&t| resonance_energy_at(&cfg.pulse, &cfg.drive, &setup, t)).collect();
    let crossing = threshold_crossings(&cfg.pulse, &cfg.drive, &setup).first().copied();
    match crossing.and_then(|c| rising_run(&times, &energies, c)) {
        Some((lo, hi)) => {
            let dist = quasi_stationary_distribution(&times[lo..=hi], &energies[lo..=hi], &setup)?;
            let side = Sidecar::new(&ctx.dir.join("energy_distribution.csv"), &cfg.hash, "quasi_stationary", 0.0)
                .with_details(json!({
                    "survival": dist.survival,
                    "dissociated": dist.total(),
                    "ramp": [times[lo], times[hi]],
                }));
            let rows = dist.centers().into_iter().zip(dist.density.clone()).map(|(e, n)| vec![e, n]);
            ctx.emit_csv("energy_distribution.csv", |_| side, |p| write_csv(p, &["E", "n"], rows))?;
        }
        None => ctx
            .out
            .messages
            .push("decay: no smooth rising crossing of the threshold; energy distribution not written".into()),
    }
    Ok(())
}

fn cmd_optimize(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let grid = spectrum_grid(cfg, ctx.ov.grid_points);
    let opts = SearchOptions { stall_budget: cfg.optimize.stall_budget, ..SearchOptions::default() };
    let family = cfg.optimize.family();
    let result = optimize_pulse(&family, &cfg.drive, cfg.optimize.objective, &grid, opts)?;
    let summary = json!({
        "family": family,
        "objective": cfg.optimize.objective,
        "best": result.search.best,
        "score": result.search.score,
        "iterations": result.search.iterations,
        "evaluations": result.search.trace.len(),
        "budget_exhausted": result.search.budget_exhausted,
        "flagged_evaluations": result.flagged_evaluations,
        "starts": result.search.starts,
        "at_lower_bound": result.search.best.iter().zip(&family.lower).all(|(b, l)| (b - l).abs() <= 1e-9 * l.abs().max(1.0)),
    });
    let mut warnings = vec![];
    if result.search.budget_exhausted {
        warnings.push("evaluation budget exhausted without relative improvement".to_string());
    }
    let side = Sidecar::new(&ctx.dir.join("trace.csv"), &cfg.hash, "nelder_mead", 0.0)
        .with_details(summary.clone())
        .with_warnings(&warnings);
    let trace = result.search.trace.clone();
    ctx.emit_csv("trace.csv", |_| side, |p| write_trace(p, &["edge_fraction"], &trace))?;
    ctx.emit_json("optimize.json", "nelder_mead", &summary)?;
    ctx.out.messages.push(format!(
        "optimize: best edge_fraction {:?}, score {:.6e}, {} evaluations",
        result.search.best,
        result.search.score,
        result.search.trace.len()
    ));
    Ok(())
}

/// Runs one subcommand, writing its artifacts into the output directory.
pub fn run(command: Command, cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let dir = ov.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let mut ctx = Ctx { cfg, ov, dir, out: Outcome { valid: true, ..Outcome::default() } };
    match command {
        Command::Spectrum => cmd_spectrum(&mut ctx)?,
        Command::Compare => cmd_compare(&mut ctx)?,
        Command::State => {
            build_state(&mut ctx, "state", true)?;
        }
        Command::Validate => {
            build_state(&mut ctx, "validate", false)?;
        }
        Command::Decay => cmd_decay(&mut ctx)?,
        Command::Optimize => cmd_optimize(&mut ctx)?,
    }
    Ok(ctx.out)
}
