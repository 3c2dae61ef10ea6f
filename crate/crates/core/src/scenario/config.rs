//! Scenario configuration (TOML).
//!
//! Every section is optional and pre-filled with the calibrated defaults, so
//! an empty file runs Scenario 1 on the synthetic dataset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calendar::parse_month;
use crate::catalog::GRParams;
use crate::control::Gains;
use crate::diffusion::{BoundaryCondition, DiffusionParams};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::seismicity::SRConstants;
use crate::solver::PreconditionerKind;
use crate::units::HOURS_PER_MONTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Historical production only.
    NoControl,
    /// Q = sat(Q_c + Q_s), extraction-only bounds.
    Scenario1,
    /// Q = sat(Q_c) with the producers' total pinned to the demand.
    Scenario2,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::NoControl => "no-control",
            Mode::Scenario1 => "scenario1",
            Mode::Scenario2 => "scenario2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "no-control" | "none" => Some(Mode::NoControl),
            "scenario1" | "s1" => Some(Mode::Scenario1),
            "scenario2" | "s2" => Some(Mode::Scenario2),
            _ => None,
        }
    }

    pub fn controlled(self) -> bool {
        self != Mode::NoControl
    }

    /// Default per-well bounds [m³/month].
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            Mode::Scenario2 => (-1e6, 1e6),
            _ => (-1e6, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatasetSource {
    Synthetic {
        #[serde(default = "default_dataset_seed")]
        seed: u64,
    },
    Files {
        grid: GridSpec,
        wells: PathBuf,
        extraction: PathBuf,
        density: PathBuf,
    },
}

fn default_dataset_seed() -> u64 {
    1
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synthetic {
            seed: default_dataset_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    /// First simulated month, YYYY-MM.
    pub start: String,
    /// Last simulated month (inclusive), YYYY-MM.
    pub end: String,
    /// Physics step [hr].
    pub physics_dt_hr: f64,
    /// First sampling instant (start of this month), YYYY-MM.
    pub control_start: String,
    /// Control period Δt_c [hr].
    pub control_period_hr: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            start: "1965-10".into(),
            end: "2023-01".into(),
            physics_dt_hr: HOURS_PER_MONTH / 10.0,
            control_start: "1991-12".into(),
            control_period_hr: HOURS_PER_MONTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffusionConfig {
    pub c_hy: f64,
    pub beta: f64,
    pub bc: BoundaryCondition,
    pub preconditioner: PreconditionerKind,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        let d = DiffusionParams::default();
        DiffusionConfig {
            c_hy: d.c_hy,
            beta: d.beta,
            bc: d.bc,
            preconditioner: PreconditionerKind::IncompleteCholesky,
        }
    }
}

impl DiffusionConfig {
    pub fn params(&self) -> DiffusionParams {
        DiffusionParams {
            c_hy: self.c_hy,
            beta: self.beta,
            bc: self.bc,
        }
    }
}

/// Piece of a piecewise-constant reference, in force from `from` onwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePiece {
    /// YYYY-MM.
    pub from: String,
    /// Reservoir-wide event rate [events/yr].
    pub events_per_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub l: f64,
    pub gamma1_0: f64,
    /// R*_0 [events/yr].
    pub r_star_0: f64,
    /// β0 [1/MPa]; 0.8·β when absent.
    pub beta_0: Option<f64>,
    /// EMA time constant τ [hr].
    pub tau_hr: f64,
    /// Per-well bounds [m³/month]; mode-dependent when absent.
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    /// Reference r_R; constant R*_0 when empty.
    pub reference: Vec<ReferencePiece>,
    /// Scenario 2 producer ids; dataset roles when absent.
    pub producers: Option<Vec<String>>,
}

impl Default for ControlConfig {
    fn default() -> Self {
        let g = Gains::default();
        ControlConfig {
            k1: g.k1,
            k2: g.k2,
            k3: g.k3,
            l: g.l,
            gamma1_0: 1.35e7,
            r_star_0: 4.11e-5,
            beta_0: None,
            tau_hr: HOURS_PER_MONTH,
            q_min: None,
            q_max: None,
            reference: Vec::new(),
            producers: None,
        }
    }
}

impl ControlConfig {
    pub fn gains(&self) -> Gains {
        Gains {
            k1: self.k1,
            k2: self.k2,
            k3: self.k3,
            l: self.l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    /// Master seed.
    pub seed: u64,
    /// Ensemble size.
    pub runs: usize,
    pub dataset: DatasetSource,
    pub time: TimeConfig,
    pub diffusion: DiffusionConfig,
    pub seismicity: SRConstants,
    pub catalog: GRParams,
    pub control: ControlConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mode: Mode::Scenario1,
            seed: 0,
            runs: 1,
            dataset: DatasetSource::default(),
            time: TimeConfig::default(),
            diffusion: DiffusionConfig::default(),
            seismicity: SRConstants::default(),
            catalog: GRParams::default(),
            control: ControlConfig::default(),
        }
    }
}

/// Resolved time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAxis {
    pub start_month: i64,
    /// Number of simulated months.
    pub months: usize,
    pub dt: f64,
    pub steps_per_month: usize,
    /// Physics steps per control period.
    pub steps_per_control: usize,
    /// Step index of the first sampling instant.
    pub control_start_step: usize,
}

impl TimeAxis {
    pub fn steps(&self) -> usize {
        self.months * self.steps_per_month
    }

    pub fn t0(&self) -> f64 {
        self.start_month as f64 * HOURS_PER_MONTH
    }

    /// Start time of step `s` [hr].
    pub fn time(&self, s: usize) -> f64 {
        self.t0() + s as f64 * self.dt
    }

    pub fn month_of_step(&self, s: usize) -> i64 {
        self.start_month + (s / self.steps_per_month) as i64
    }

    pub fn control_period(&self) -> f64 {
        self.steps_per_control as f64 * self.dt
    }

    pub fn is_sampling_step(&self, s: usize) -> bool {
        s >= self.control_start_step && (s - self.control_start_step).is_multiple_of(self.steps_per_control)
    }
}

/// `x/y` as an integer when it is one to within 1e-9 relative.
fn integer_ratio(x: f64, y: f64) -> Option<usize> {
    let r = x / y;
    let k = r.round();
    (k >= 1.0 && (r - k).abs() <= 1e-9 * k).then_some(k as usize)
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::parse("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a config file; dataset paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::config(format!("{}: {m}", path.display())),
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })?;
        if let DatasetSource::Files {
            wells,
            extraction,
            density,
            ..
        } = &mut cfg.dataset
        {
            let base = path.parent().unwrap_or(Path::new("."));
            for p in [wells, extraction, density] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.time_axis()?;
        self.diffusion.params().validate()?;
        self.catalog.validate()?;
        if self.seismicity.gamma2 <= 0.0 || self.seismicity.gamma1_scale < 0.0 || self.seismicity.r_star_0 < 0.0 {
            return Err(Error::config(
                "seismicity: gamma2 must be positive, gamma1_scale and r_star_0 nonnegative",
            ));
        }
        if self.mode.controlled() {
            self.control.gains().validate()?;
            if !(self.control.tau_hr >= 0.0) {
                return Err(Error::config("control.tau_hr must be nonnegative"));
            }
            let (lo, hi) = self.bounds();
            if !(lo < hi) {
                return Err(Error::config(format!(
                    "control bounds: q_min {lo} must be below q_max {hi}"
                )));
            }
            for p in &self.control.reference {
                parse_month(&p.from)?;
                if !(p.events_per_year >= 0.0) {
                    return Err(Error::config("control.reference rates must be nonnegative"));
                }
            }
        }
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        Ok(())
    }

    pub fn bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.mode.default_bounds();
        (self.control.q_min.unwrap_or(lo), self.control.q_max.unwrap_or(hi))
    }

    pub fn time_axis(&self) -> Result<TimeAxis> {
        let t = &self.time;
        let start_month = parse_month(&t.start)?;
        let end = parse_month(&t.end)?;
        if end < start_month {
            return Err(Error::config(format!(
                "time.end {} precedes time.start {}",
                t.end, t.start
            )));
        }
        if !(t.physics_dt_hr > 0.0) {
            return Err(Error::config("time.physics_dt_hr must be positive"));
        }
        let steps_per_month = integer_ratio(HOURS_PER_MONTH, t.physics_dt_hr).ok_or_else(|| {
            Error::config(format!(
                "time.physics_dt_hr = {} must divide a month ({} hr) into whole steps",
                t.physics_dt_hr, HOURS_PER_MONTH
            ))
        })?;
        let steps_per_control = integer_ratio(t.control_period_hr, t.physics_dt_hr).ok_or_else(|| {
            Error::config(format!(
                "time.control_period_hr = {} is not an integer multiple of the physics step {} hr",
                t.control_period_hr, t.physics_dt_hr
            ))
        })?;
        let cs = parse_month(&t.control_start)?;
        if cs < start_month {
            return Err(Error::config("time.control_start precedes time.start"));
        }
        Ok(TimeAxis {
            start_month,
            months: (end - start_month + 1) as usize,
            dt: HOURS_PER_MONTH / steps_per_month as f64,
            steps_per_month,
            steps_per_control,
            control_start_step: (cs - start_month) as usize * steps_per_month,
        })
    }
}
