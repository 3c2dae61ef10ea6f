//! The closed loop: physics substeps, catalog windows and control sampling.

use crate::calendar::parse_month;
use crate::catalog::{sample_window, Catalog, IntensityWindow, SeismicEvent};
use crate::control::{
    saturate, Bounds, ConstrainedAllocation, ControlRecord, Controller, ControllerConfig, ZeroOrderHold,
};
use crate::dataset::{read_density, read_extraction, read_wells, synth_groningen, Dataset};
use crate::diffusion::{DiffusionStepper, PressureState};
use crate::error::{Error, Result};
use crate::grid::ReservoirGrid;
use crate::rng::catalog_stream;
use crate::seismicity::{step_sr_in_place, SRParams, SRState};
use crate::units::{HOURS_PER_MONTH, HOURS_PER_YEAR};
use crate::wells::{WellRole, WellSet};

use super::config::{DatasetSource, Mode, ScenarioConfig, TimeAxis};

pub fn load_dataset(source: &DatasetSource) -> Result<Dataset> {
    match source {
        DatasetSource::Synthetic { seed } => synth_groningen(*seed),
        DatasetSource::Files {
            grid,
            wells,
            extraction,
            density,
        } => {
            let grid_spec = grid.clone();
            let grid = ReservoirGrid::build(&grid_spec)?;
            let (specs, shares) = read_wells(wells)?;
            let wells = WellSet::resolve(&grid, &specs)?;
            let density = read_density(density, &grid)?;
            let extraction = read_extraction(extraction)?;
            Ok(Dataset {
                grid_spec,
                grid,
                wells,
                shares,
                density,
                extraction,
            })
        }
    }
}

/// Everything a run needs that does not depend on the run index.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub cfg: ScenarioConfig,
    pub axis: TimeAxis,
    pub dataset: Dataset,
    pub bounds: Bounds,
    pub sr: SRParams,
    pub controller: Option<ControllerConfig>,
    pub allocation: Option<ConstrainedAllocation>,
    /// (start step, r_R) pieces in events/(km³·hr).
    reference: Vec<(usize, f64)>,
}

impl Prepared {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let mut dataset = load_dataset(&cfg.dataset)?;
        Self::with_dataset(cfg, &mut dataset)
    }

    /// Use an already loaded dataset (its wells get the scenario's bounds
    /// and roles).
    pub fn with_dataset(cfg: &ScenarioConfig, dataset: &mut Dataset) -> Result<Self> {
        cfg.validate()?;
        let axis = cfg.time_axis()?;
        let (lo, hi) = cfg.bounds();
        if cfg.mode.controlled() {
            dataset.wells.set_uniform_bounds(lo, hi)?;
        }
        if let Some(ids) = &cfg.control.producers {
            let roles: Vec<WellRole> = dataset
                .wells
                .iter()
                .map(|w| {
                    if ids.contains(&w.id) {
                        WellRole::Producer
                    } else {
                        WellRole::Injector
                    }
                })
                .collect();
            for id in ids {
                if !dataset.wells.iter().any(|w| &w.id == id) {
                    return Err(Error::config(format!("control.producers: unknown well {id}")));
                }
            }
            dataset.wells.set_roles(&roles)?;
        }
        let bounds = Bounds::from_wells(&dataset.wells);
        let sr = SRParams::from_density(&dataset.density, &cfg.seismicity)?;
        let volume = dataset.grid.total_volume();
        let n = dataset.wells.len();

        let (controller, allocation) = if cfg.mode.controlled() {
            let c = &cfg.control;
            let beta_0 = c.beta_0.unwrap_or(0.8 * cfg.diffusion.beta);
            let cc = ControllerConfig::new(c.gains(), c.gamma1_0, c.r_star_0, beta_0, volume, n)?;
            let alloc = if cfg.mode == Mode::Scenario2 {
                let w: Vec<f64> = dataset
                    .wells
                    .iter()
                    .map(|w| if w.role == WellRole::Producer { 1.0 } else { 0.0 })
                    .collect();
                let producers = w.iter().filter(|v| **v == 1.0).count();
                if producers == 0 || producers == n {
                    return Err(Error::config(format!(
                        "scenario2 needs at least one producer and one injector, got {producers} producers of {n} wells"
                    )));
                }
                Some(ConstrainedAllocation::new(w, &cc)?)
            } else {
                None
            };
            (Some(cc), alloc)
        } else {
            (None, None)
        };

        let per_hr = |events_per_year: f64| events_per_year / (volume * HOURS_PER_YEAR);
        let mut reference = vec![(0usize, per_hr(cfg.control.r_star_0))];
        for p in &cfg.control.reference {
            let m = parse_month(&p.from)? - axis.start_month;
            reference.push(((m.max(0) as usize) * axis.steps_per_month, per_hr(p.events_per_year)));
        }
        reference.sort_by_key(|r| r.0);

        Ok(Prepared {
            cfg: cfg.clone(),
            axis,
            dataset: dataset.clone(),
            bounds,
            sr,
            controller,
            allocation,
            reference,
        })
    }

    /// r_R at step `s` [events/(km³·hr)].
    pub fn reference_at(&self, s: usize) -> f64 {
        let k = self.reference.partition_point(|r| r.0 <= s);
        self.reference[k.saturating_sub(1)].1
    }

    pub fn well_ids(&self) -> Vec<String> {
        self.dataset.wells.iter().map(|w| w.id.clone()).collect()
    }
}

/// Per-step series, sampled at the end of each physics step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    /// Step end [hr].
    pub t: Vec<f64>,
    /// Total rate Λ [events/hr].
    pub lambda: Vec<f64>,
    /// Spatial mean of R [events/(km³·yr)].
    pub mean_r: Vec<f64>,
    /// Events generated up to the step end.
    pub cum_events: Vec<u64>,
    /// ∫Λ dt up to the step end.
    pub expected_cum: Vec<f64>,
    /// Applied per-well flux over the step [m³/month].
    pub q_applied: Vec<Vec<f64>>,
    /// Demand f(t) [m³/month, positive].
    pub demand: Vec<f64>,
    /// Extracted volume up to the step end [m³].
    pub extracted_cum: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn total_flux(&self, k: usize) -> f64 {
        self.q_applied[k].iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub mode: Mode,
    pub seed: u64,
    pub run: u64,
    pub well_ids: Vec<String>,
    pub catalog: Catalog,
    pub series: TimeSeries,
    pub control_log: Vec<ControlRecord>,
    pub bounds: Bounds,
    /// Simulated span [hr].
    pub horizon: (f64, f64),
    /// Largest excursion of an applied flux outside its bounds [m³/month].
    pub max_bound_violation: f64,
}

impl SimulationResult {
    pub fn total_events(&self) -> usize {
        self.catalog.len()
    }

    pub fn expected_events(&self) -> f64 {
        self.series.expected_cum.last().copied().unwrap_or(0.0)
    }

    /// Total extracted volume [m³].
    pub fn extracted_volume(&self) -> f64 {
        self.series.extracted_cum.last().copied().unwrap_or(0.0)
    }

    pub fn mean_abs_sigma(&self) -> f64 {
        if self.control_log.is_empty() {
            return 0.0;
        }
        self.control_log.iter().map(|r| r.sigma.abs()).sum::<f64>() / self.control_log.len() as f64
    }

    pub fn peak_abs_sigma(&self) -> f64 {
        self.control_log.iter().fold(0.0, |m, r| m.max(r.sigma.abs()))
    }

    /// Mean |σ| over the control steps in the final `fraction` of the
    /// horizon, divided by the peak |σ|.
    pub fn settling_ratio(&self, fraction: f64) -> f64 {
        let (t0, t1) = self.horizon;
        let from = t1 - fraction * (t1 - t0);
        let late: Vec<f64> = self
            .control_log
            .iter()
            .filter(|r| r.t >= from)
            .map(|r| r.sigma.abs())
            .collect();
        if late.is_empty() {
            return f64::NAN;
        }
        late.iter().sum::<f64>() / late.len() as f64 / self.peak_abs_sigma()
    }
}

/// Non-catalog part of a run.
pub(crate) struct LoopOutput {
    pub series: TimeSeries,
    pub control_log: Vec<ControlRecord>,
    pub max_bound_violation: f64,
}

/// Run the physics and control loop. `on_window(step, window)` draws the
/// catalog of each physics step and returns how many events it produced;
/// those counts are what the controller sees.
pub(crate) fn drive<F>(prep: &Prepared, mut on_window: F) -> Result<LoopOutput>
where
    F: FnMut(usize, &IntensityWindow) -> Result<u64>,
{
    let cfg = &prep.cfg;
    let ax = prep.axis;
    let ds = &prep.dataset;
    let grid = &ds.grid;
    let n_cells = grid.active_count();
    let n_wells = ds.wells.len();
    let cv = grid.cell_volume();
    let dt = ax.dt;
    let dt_c = ax.control_period();

    let mut pressure = PressureState::at_rest(grid);
    pressure.t = ax.t0();
    let mut sr_state = SRState::background(grid);
    sr_state.t = ax.t0();
    let mut stepper =
        DiffusionStepper::with_preconditioner(grid, cfg.diffusion.params(), dt, cfg.diffusion.preconditioner)?;
    let r_star_hr: Vec<f64> = prep.sr.r_star.values.iter().map(|r| r / HOURS_PER_YEAR).collect();

    let mut r_old = r_star_hr.clone();
    let mut r_new = vec![0.0; n_cells];
    let mut lam_old = r_old.iter().sum::<f64>() * cv;
    let mut source = grid.zeros(crate::units::Unit::PerHr);

    let mut controller = prep
        .controller
        .clone()
        .map(|c| Controller::new(c, cfg.control.tau_hr, prep.allocation.clone()));
    let mut hold = ZeroOrderHold::new();
    let mut window_counts: Vec<u64> = Vec::with_capacity(ax.steps());
    let mut log: Vec<ControlRecord> = Vec::new();
    let mut series = TimeSeries::default();
    let mut cum_events = 0u64;
    let mut expected = 0.0;
    let mut extracted = 0.0;
    let mut max_violation = 0.0f64;

    for s in 0..ax.steps() {
        let t = ax.time(s);
        let month = ax.month_of_step(s);
        let demand = ds.extraction.at_month(month);

        let mut sampled = false;
        if let Some(ctl) = controller.as_mut() {
            if ax.is_sampling_step(s) {
                let lo = s.saturating_sub(ax.steps_per_control);
                let n_events: u64 = window_counts[lo..s].iter().sum();
                let target = (cfg.mode == Mode::Scenario2).then_some(-demand);
                let rec = ctl.sample(t, n_events, dt_c, prep.reference_at(s), target);
                hold.push(t, rec.q_c.clone());
                log.push(rec);
                sampled = true;
            }
        }

        let q_s = ds.extraction.static_profile(&ds.shares, month);
        let q_pre: Vec<f64> = match (cfg.mode, hold.value_at(t)) {
            (Mode::Scenario1, Some(q_c)) => q_c.iter().zip(&q_s).map(|(c, s)| c + s).collect(),
            (Mode::Scenario2, Some(q_c)) => q_c.to_vec(),
            _ => q_s,
        };
        if let (Some(ctl), false) = (controller.as_mut(), hold.is_empty()) {
            ctl.observe(&q_pre, &prep.bounds)?;
        }
        let q = saturate(&q_pre, &prep.bounds);
        for (v, (lo, hi)) in q.iter().zip(prep.bounds.lower.iter().zip(&prep.bounds.upper)) {
            max_violation = max_violation.max(lo - v).max(v - hi);
        }
        if sampled {
            if let Some(rec) = log.last_mut() {
                rec.q_applied = q.clone();
            }
        }

        ds.wells.source_into(&q, &mut source.values)?;
        stepper.step(&mut pressure, &source)?;
        let u_t = pressure.u_t.as_ref().expect("rate set by step");
        step_sr_in_place(&mut sr_state, u_t, dt, &prep.sr)?;
        for ((r, rn), rs) in r_new.iter_mut().zip(&sr_state.rn.values).zip(&r_star_hr) {
            *r = rn * rs;
        }
        let lam_new = r_new.iter().sum::<f64>() * cv;
        if !lam_new.is_finite() {
            return Err(Error::numerical(t + dt, "total seismicity rate is not finite"));
        }
        let win = IntensityWindow::with_rates(t, t + dt, &r_old, &r_new, lam_old, lam_new)?;
        let n = on_window(s, &win)?;
        window_counts.push(n);
        cum_events += n;
        expected += win.expected_count();
        extracted += -q.iter().map(|v| v.min(0.0)).sum::<f64>() * dt / HOURS_PER_MONTH;

        series.t.push(t + dt);
        series.lambda.push(lam_new);
        series
            .mean_r
            .push(r_new.iter().sum::<f64>() / n_cells as f64 * HOURS_PER_YEAR);
        series.cum_events.push(cum_events);
        series.expected_cum.push(expected);
        series.q_applied.push(q);
        series.demand.push(demand);
        series.extracted_cum.push(extracted);

        std::mem::swap(&mut r_old, &mut r_new);
        lam_old = lam_new;
    }
    debug_assert!(n_wells == prep.bounds.len());
    Ok(LoopOutput {
        series,
        control_log: log,
        max_bound_violation: max_violation,
    })
}

/// One realization: run index `run` under the config's master seed.
pub fn run_prepared(prep: &Prepared, run: u64) -> Result<SimulationResult> {
    let seed = prep.cfg.seed;
    let gr = prep.cfg.catalog;
    let grid = &prep.dataset.grid;
    let mut events: Vec<SeismicEvent> = Vec::new();
    let out = drive(prep, |s, win| {
        let mut rng = catalog_stream(seed, run, s as u64);
        sample_window(grid, win, &gr, &mut rng, &mut events)
    })?;
    Ok(SimulationResult {
        mode: prep.cfg.mode,
        seed,
        run,
        well_ids: prep.well_ids(),
        catalog: Catalog { events },
        series: out.series,
        control_log: out.control_log,
        bounds: prep.bounds.clone(),
        horizon: (prep.axis.t0(), prep.axis.time(prep.axis.steps())),
        max_bound_violation: out.max_bound_violation,
    })
}

/// Run 0 of `cfg`.
pub fn run(cfg: &ScenarioConfig) -> Result<SimulationResult> {
    run_prepared(&Prepared::new(cfg)?, 0)
}
