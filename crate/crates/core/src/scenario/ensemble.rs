//! Ensembles of catalog realizations and parameter sweeps.

use rayon::prelude::*;

use crate::catalog::{sample_window, Catalog, SeismicEvent};
use crate::error::{Error, Result};
use crate::rng::catalog_stream;

use super::config::{Mode, ScenarioConfig};
use super::run::{drive, run_prepared, Prepared, SimulationResult};

/// Cumulative-count statistics of an ensemble, per physics step.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub runs: usize,
    /// Step end [hr].
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation.
    pub std: Vec<f64>,
    /// ∫Λ dt of the run-0 intensity. Equal for all runs without control.
    pub expected: Vec<f64>,
    /// Total events per run.
    pub terminal: Vec<u64>,
}

impl EnsembleStats {
    fn from_counts(t: Vec<f64>, expected: Vec<f64>, counts: &[Vec<u64>]) -> Self {
        let runs = counts.len();
        let steps = t.len();
        let mut mean = vec![0.0; steps];
        let mut std = vec![0.0; steps];
        for k in 0..steps {
            let m = counts.iter().map(|c| c[k] as f64).sum::<f64>() / runs as f64;
            let ss = counts.iter().map(|c| (c[k] as f64 - m).powi(2)).sum::<f64>();
            mean[k] = m;
            std[k] = if runs > 1 { (ss / (runs - 1) as f64).sqrt() } else { 0.0 };
        }
        let terminal = counts.iter().map(|c| c.last().copied().unwrap_or(0)).collect();
        EnsembleStats {
            runs,
            t,
            mean,
            std,
            expected,
            terminal,
        }
    }

    pub fn from_results(results: &[SimulationResult]) -> Result<Self> {
        let first = results
            .first()
            .ok_or_else(|| Error::config("ensemble needs at least one run"))?;
        let counts: Vec<Vec<u64>> = results.iter().map(|r| r.series.cum_events.clone()).collect();
        Ok(Self::from_counts(
            first.series.t.clone(),
            first.series.expected_cum.clone(),
            &counts,
        ))
    }

    pub fn terminal_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn terminal_std(&self) -> f64 {
        self.std.last().copied().unwrap_or(0.0)
    }

    pub fn terminal_expected(&self) -> f64 {
        self.expected.last().copied().unwrap_or(0.0)
    }

    /// |mean − expected| in units of the standard error of the mean.
    pub fn terminal_z(&self) -> f64 {
        let se = self.terminal_std() / (self.runs as f64).sqrt();
        (self.terminal_mean() - self.terminal_expected()).abs() / se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub stats: EnsembleStats,
    /// Catalog of each run, in run order.
    pub catalogs: Vec<Catalog>,
}

/// Runs 0..runs of `prep`. Without control every run shares one intensity
/// history, so the physics is integrated once and all catalogs are drawn
/// from it; the catalogs equal those of separate `run_prepared` calls.
pub fn run_ensemble(prep: &Prepared, runs: usize) -> Result<Ensemble> {
    if runs < 2 {
        return Err(Error::config(format!("an ensemble needs at least 2 runs, got {runs}")));
    }
    if prep.cfg.mode == Mode::NoControl {
        let seed = prep.cfg.seed;
        let gr = prep.cfg.catalog;
        let grid = &prep.dataset.grid;
        let mut events: Vec<Vec<SeismicEvent>> = vec![Vec::new(); runs];
        let mut counts: Vec<Vec<u64>> = vec![Vec::with_capacity(prep.axis.steps()); runs];
        let out = drive(prep, |s, win| {
            let drawn: Vec<Result<u64>> = events
                .par_iter_mut()
                .enumerate()
                .map(|(r, ev)| {
                    let mut rng = catalog_stream(seed, r as u64, s as u64);
                    sample_window(grid, win, &gr, &mut rng, ev)
                })
                .collect();
            for (r, n) in drawn.into_iter().enumerate() {
                let n = n?;
                let c = counts[r].last().copied().unwrap_or(0) + n;
                counts[r].push(c);
            }
            Ok(0)
        })?;
        let stats = EnsembleStats::from_counts(out.series.t, out.series.expected_cum, &counts);
        let catalogs = events.into_iter().map(|events| Catalog { events }).collect();
        return Ok(Ensemble { stats, catalogs });
    }
    let results = run_many(prep, runs)?;
    let stats = EnsembleStats::from_results(&results)?;
    Ok(Ensemble {
        stats,
        catalogs: results.into_iter().map(|r| r.catalog).collect(),
    })
}

/// Independent runs 0..runs, in parallel.
pub fn run_many(prep: &Prepared, runs: usize) -> Result<Vec<SimulationResult>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|r| run_prepared(prep, r))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K3Row {
    pub k3: f64,
    /// [m³]
    pub extracted_volume: f64,
    pub total_events: usize,
    /// [m³/month]
    pub max_bound_violation: f64,
}

/// Scenario-1 run per k3 value on the config's seed.
pub fn sweep_k3(cfg: &ScenarioConfig, values: &[f64]) -> Result<Vec<K3Row>> {
    let mut base = cfg.clone();
    base.mode = Mode::Scenario1;
    let mut dataset = super::run::load_dataset(&base.dataset)?;
    let preps: Vec<Prepared> = values
        .iter()
        .map(|&k3| {
            let mut c = base.clone();
            c.control.k3 = k3;
            Prepared::with_dataset(&c, &mut dataset)
        })
        .collect::<Result<_>>()?;
    preps
        .par_iter()
        .zip(values.par_iter())
        .map(|(p, &k3)| {
            let r = run_prepared(p, 0)?;
            Ok(K3Row {
                k3,
                extracted_volume: r.extracted_volume(),
                total_events: r.total_events(),
                max_bound_violation: r.max_bound_violation,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtcRow {
    /// Control period [hr].
    pub dt_c: f64,
    pub total_events: usize,
    pub mean_abs_sigma: f64,
    /// [m³/month]
    pub max_bound_violation: f64,
}

/// Scenario-1 run per control period [hr] on the config's seed.
pub fn sweep_dtc(cfg: &ScenarioConfig, periods_hr: &[f64]) -> Result<Vec<DtcRow>> {
    let mut base = cfg.clone();
    base.mode = Mode::Scenario1;
    let mut dataset = super::run::load_dataset(&base.dataset)?;
    let preps: Vec<Prepared> = periods_hr
        .iter()
        .map(|&p| {
            let mut c = base.clone();
            c.time.control_period_hr = p;
            Prepared::with_dataset(&c, &mut dataset)
        })
        .collect::<Result<_>>()?;
    preps
        .par_iter()
        .zip(periods_hr.par_iter())
        .map(|(p, &dt_c)| {
            let r = run_prepared(p, 0)?;
            Ok(DtcRow {
                dt_c,
                total_events: r.total_events(),
                mean_abs_sigma: r.mean_abs_sigma(),
                max_bound_violation: r.max_bound_violation,
            })
        })
        .collect()
}

/// Spearman rank correlation, average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        let r = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]);
        assert!(r > 0.0 && r < 1.0);
    }
}
