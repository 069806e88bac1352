//! JSON run configuration.

use crate::CliError;
use feshpulse::constants::HBAR;
use feshpulse::io::sha256_hex;
use feshpulse::optimize::{FamilyKind, ObjectiveKind, PulseFamily};
use feshpulse::pulses::Tabulated;
use feshpulse::{concatenate, DimensionlessDrive, PhaseFunction, PhysicalSetup, PulseSequence, PulseShape, StateOptions};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Relative tolerance for ε given both directly and through the field.
pub const CONFLICT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Numeric,
    Airy,
    Stationary,
    Square,
    Auto,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    epsilon: Option<f64>,
    /// Pulse height as a field amplitude [T].
    delta_b: Option<f64>,
    /// Moment difference [J/T]; falls back to `setup.mu_res`.
    mu_res: Option<f64>,
    /// Pulse duration T [s].
    duration: Option<f64>,
    /// E₀ [J]; falls back to the setup's base field, else 0.
    base_energy: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawPulse {
    Sequence { sequence: PulseSequence },
    Csv { csv: PathBuf },
    Shape(PulseShape),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub omega_points: Option<usize>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    /// Uniform points of the decay time grid before refinement.
    pub time_points: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default = "default_family")]
    pub family: FamilyKind,
    #[serde(default = "default_lower")]
    pub lower: Vec<f64>,
    #[serde(default = "default_upper")]
    pub upper: Vec<f64>,
    #[serde(default = "default_objective")]
    pub objective: ObjectiveKind,
    #[serde(default = "default_budget")]
    pub stall_budget: usize,
}

fn default_family() -> FamilyKind {
    FamilyKind::Trapezoid
}
fn default_lower() -> Vec<f64> {
    vec![0.01]
}
fn default_upper() -> Vec<f64> {
    vec![0.45]
}
fn default_objective() -> ObjectiveKind {
    ObjectiveKind::RippleEnergy
}
fn default_budget() -> usize {
    500
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            family: default_family(),
            lower: default_lower(),
            upper: default_upper(),
            objective: default_objective(),
            stall_budget: default_budget(),
        }
    }
}

impl OptimizeConfig {
    pub fn family(&self) -> PulseFamily {
        PulseFamily { kind: self.family, lower: self.lower.clone(), upper: self.upper.clone() }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    setup: Option<PhysicalSetup>,
    drive: Option<RawDrive>,
    pulse: Option<RawPulse>,
    #[serde(default)]
    grids: GridConfig,
    method: Option<MethodChoice>,
    #[serde(default)]
    output: RawOutput,
    optimize: Option<OptimizeConfig>,
    #[serde(default)]
    state: StateOptions,
    /// Channel-coupling memory time [s]; defaults to a 100 a₀ localization.
    memory_time: Option<f64>,
}

/// Validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub setup: Option<PhysicalSetup>,
    pub drive: DimensionlessDrive,
    /// Whether T (and hence a physical energy scale) was given.
    pub physical_time: bool,
    pub pulse: PhaseFunction,
    /// The pulse when it is a single unshifted shape.
    pub single_shape: Option<PulseShape>,
    pub grids: GridConfig,
    pub method: MethodChoice,
    pub output_dir: Option<PathBuf>,
    pub optimize: OptimizeConfig,
    pub state: StateOptions,
    pub memory_time: Option<f64>,
    /// SHA-256 of the configuration file bytes.
    pub hash: String,
}

impl RunConfig {
    pub fn require_setup(&self, command: &str) -> Result<&PhysicalSetup, CliError> {
        self.setup.as_ref().ok_or_else(|| CliError::Config(format!("`{command}` needs a `setup` section")))
    }

    pub fn require_time(&self, command: &str) -> Result<(), CliError> {
        if self.physical_time {
            Ok(())
        } else {
            Err(CliError::Config(format!("`{command}` needs drive.duration to fix the physical energy scale")))
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn resolve_drive(raw: &RawDrive, setup: Option<&PhysicalSetup>) -> Result<(DimensionlessDrive, bool), CliError> {
    let duration = raw.duration.map(|t| positive("drive.duration", t)).transpose()?;
    let from_field = match raw.delta_b {
        None => None,
        Some(db) => {
            let mu = raw
                .mu_res
                .or(setup.map(|s| s.mu_res))
                .ok_or_else(|| CliError::Config("drive.delta_b needs drive.mu_res or setup.mu_res".into()))?;
            let mu = positive("drive.mu_res", mu)?;
            let t = duration.ok_or_else(|| CliError::Config("drive.delta_b needs drive.duration".into()))?;
            if !db.is_finite() || db < 0.0 {
                return Err(CliError::Config(format!("drive.delta_b must be non-negative, got {db}")));
            }
            Some(mu * db * t / HBAR)
        }
    };
    let epsilon = match (raw.epsilon, from_field) {
        (None, None) => return Err(CliError::Config("drive: give either epsilon or delta_b".into())),
        (Some(e), None) => e,
        (None, Some(e)) => e,
        (Some(e), Some(f)) => {
            if (e - f).abs() > CONFLICT_TOLERANCE * e.abs().max(f.abs()) {
                return Err(CliError::Config(format!(
                    "drive: epsilon = {e} conflicts with mu_res·delta_b·T/ħ = {f}"
                )));
            }
            e
        }
    };
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(CliError::Config(format!("drive.epsilon must be non-negative, got {epsilon}")));
    }
    let base = raw.base_energy.or(setup.map(|s| s.base_energy())).unwrap_or(0.0);
    if !base.is_finite() {
        return Err(CliError::Config("drive.base_energy must be finite".into()));
    }
    let drive = DimensionlessDrive::from_epsilon(epsilon, duration.unwrap_or(1.0), base)?;
    Ok((drive, duration.is_some()))
}

fn resolve_pulse(raw: RawPulse, base_dir: &Path) -> Result<(PhaseFunction, Option<PulseShape>), CliError> {
    let (phase, single) = match raw {
        RawPulse::Shape(shape) => (PhaseFunction::new(shape.clone()), Some(shape)),
        RawPulse::Csv { csv } => {
            let path = if csv.is_absolute() { csv } else { base_dir.join(csv) };
            let shape = PulseShape::Tabulated(Tabulated::from_csv(&path)?);
            (PhaseFunction::new(shape.clone()), Some(shape))
        }
        RawPulse::Sequence { sequence } => (concatenate(&sequence)?, None),
    };
    phase.validate()?;
    Ok((phase, single))
}

/// Parses and validates a configuration from JSON text; `base_dir`
/// anchors relative paths.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    if let Some(s) = &raw.setup {
        s.validate()?;
    }
    let drive = raw.drive.ok_or_else(|| CliError::Config("missing field `drive`".into()))?;
    let (drive, physical_time) = resolve_drive(&drive, raw.setup.as_ref())?;
    let pulse = raw.pulse.ok_or_else(|| CliError::Config("missing field `pulse`".into()))?;
    let (pulse, single_shape) = resolve_pulse(pulse, base_dir)?;
    if let Some(tm) = raw.memory_time {
        positive("memory_time", tm)?;
    }
    if let Some(n) = raw.grids.omega_points {
        if n < 2 {
            return Err(CliError::Config("grids.omega_points must be at least 2".into()));
        }
    }
    match (raw.grids.omega_min, raw.grids.omega_max) {
        (Some(lo), _) if !(lo > 0.0) => {
            return Err(CliError::Config(format!("grids.omega_min must be positive, got {lo}")));
        }
        (Some(lo), Some(hi)) if !(hi > lo) => {
            return Err(CliError::Config(format!("grids.omega_max must exceed omega_min, got {hi} ≤ {lo}")));
        }
        (_, Some(hi)) if !(hi > 0.0) => {
            return Err(CliError::Config(format!("grids.omega_max must be positive, got {hi}")));
        }
        _ => {}
    }
    let optimize = raw.optimize.unwrap_or_default();
    optimize.family().validate()?;
    Ok(RunConfig {
        setup: raw.setup,
        drive,
        physical_time,
        pulse,
        single_shape,
        grids: raw.grids,
        method: raw.method.unwrap_or(MethodChoice::Auto),
        output_dir: raw.output.dir.map(|d| if d.is_absolute() { d } else { base_dir.join(d) }),
        optimize,
        state: raw.state,
        memory_time: raw.memory_time,
        hash: sha256_hex(text.as_bytes()),
    })
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base)
}
