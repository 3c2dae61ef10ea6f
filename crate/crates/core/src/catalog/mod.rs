//! Synthetic earthquake catalogs from a seismicity-rate field.
//!
//! Over a window [t1, t2] the total rate Λ(t) is taken linear between its
//! endpoint values. The event count is Poisson with mean equal to the
//! trapezoid area, times come from inverting the quadratic cumulative
//! intensity, locations from thinning against the field interpolated to the
//! event time, and magnitudes from a truncated Gutenberg–Richter law.

mod io;

pub use io::{read_catalog, write_catalog, CatalogHeader};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ReservoirGrid, ScalarField};
use crate::units::per_year_to_per_hr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GRParams {
    pub a: f64,
    pub b: f64,
    pub m_c: f64,
    pub m_max: f64,
}

impl Default for GRParams {
    fn default() -> Self {
        GRParams {
            a: 4.08,
            b: 0.97,
            m_c: 1.0,
            m_max: 3.6,
        }
    }
}

impl GRParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::config(format!("G-R b must be positive, got {}", self.b)));
        }
        if !(self.m_c < self.m_max) {
            return Err(Error::config(format!(
                "completeness magnitude {} must be below M_max {}",
                self.m_c, self.m_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeismicEvent {
    /// [hr since epoch]
    pub t: f64,
    /// [km]
    pub x: f64,
    pub y: f64,
    /// Active-cell index holding (x, y).
    pub cell: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub events: Vec<SeismicEvent>,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.magnitude).collect()
    }

    /// Events with magnitude ≥ `m_c`.
    pub fn above(&self, m_c: f64) -> Catalog {
        Catalog {
            events: self.events.iter().copied().filter(|e| e.magnitude >= m_c).collect(),
        }
    }

    /// Number of events with t < `t`.
    pub fn count_before(&self, t: f64) -> usize {
        self.events.partition_point(|e| e.t < t)
    }

    pub fn sort(&mut self) {
        self.events.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
}

/// Total rate Λ = ∑ R·cell_volume [events/hr] of a field in events/(km³·yr).
pub fn total_rate(grid: &ReservoirGrid, r: &ScalarField) -> Result<f64> {
    r.check_len(grid, "intensity field")?;
    if let Some(k) = r.values.iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative, cell {k} has {}",
            r.values[k]
        )));
    }
    Ok(per_year_to_per_hr(grid.integrate(r)))
}

/// A time window with intensity fields at both ends, in events/(km³·hr).
#[derive(Debug, Clone, Copy)]
pub struct IntensityWindow<'a> {
    pub t1: f64,
    pub t2: f64,
    pub r1: &'a [f64],
    pub r2: &'a [f64],
    /// Endpoint total rates [events/hr].
    pub lam1: f64,
    pub lam2: f64,
}

impl<'a> IntensityWindow<'a> {
    /// `r1`, `r2` in events/(km³·hr).
    pub fn new(grid: &ReservoirGrid, t1: f64, t2: f64, r1: &'a [f64], r2: &'a [f64]) -> Result<Self> {
        if !(t2 > t1) {
            return Err(Error::config(format!("window end {t2} must follow start {t1}")));
        }
        let n = grid.active_count();
        if r1.len() != n || r2.len() != n {
            return Err(Error::config("window fields do not match the grid"));
        }
        let cv = grid.cell_volume();
        let lam1 = r1.iter().sum::<f64>() * cv;
        let lam2 = r2.iter().sum::<f64>() * cv;
        Self::with_rates(t1, t2, r1, r2, lam1, lam2)
    }

    /// Build from precomputed endpoint rates.
    pub fn with_rates(t1: f64, t2: f64, r1: &'a [f64], r2: &'a [f64], lam1: f64, lam2: f64) -> Result<Self> {
        if !(lam1 >= 0.0 && lam2 >= 0.0) {
            return Err(Error::Domain(format!("negative total rate ({lam1}, {lam2})")));
        }
        Ok(IntensityWindow {
            t1,
            t2,
            r1,
            r2,
            lam1,
            lam2,
        })
    }

    /// Expected event count ΔΛ (trapezoid, exact for linear Λ).
    pub fn expected_count(&self) -> f64 {
        0.5 * (self.lam1 + self.lam2) * (self.t2 - self.t1)
    }
}

pub fn draw_event_count<R: Rng + ?Sized>(win: &IntensityWindow, rng: &mut R) -> u64 {
    poisson(win.expected_count(), rng)
}

pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(d) => d.sample(rng) as u64,
        Err(_) => 0,
    }
}

/// Offset τ ∈ [0, T] solving Λ1·τ + (Λ2 − Λ1)·τ²/(2T) = u·ΔΛ.
pub fn invert_cumulative(lam1: f64, lam2: f64, span: f64, u: f64) -> f64 {
    let target = u * 0.5 * (lam1 + lam2) * span;
    if target <= 0.0 {
        return 0.0;
    }
    let disc = lam1 * lam1 + 2.0 * (lam2 - lam1) * target / span;
    let tau = 2.0 * target / (lam1 + disc.max(0.0).sqrt());
    tau.clamp(0.0, span)
}

pub fn draw_event_times<R: Rng + ?Sized>(win: &IntensityWindow, n: u64, rng: &mut R) -> Vec<f64> {
    let span = win.t2 - win.t1;
    let mut times: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let tau = if win.lam1 == 0.0 && win.lam2 == 0.0 {
                u * span
            } else {
                invert_cumulative(win.lam1, win.lam2, span, u)
            };
            win.t1 + tau
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Location of one event drawn by thinning: propose uniformly over the
/// active area, accept with probability R_cell/R_max.
pub fn draw_location<R: Rng + ?Sized>(grid: &ReservoirGrid, r: &[f64], rng: &mut R) -> Result<(usize, f64, f64)> {
    let r_max = r.iter().copied().fold(0.0, f64::max);
    thin(grid, |k| r[k], r_max, rng)
}

/// Thinning against an arbitrary cell intensity with upper bound `bound`.
/// A bound above the true maximum only lowers the acceptance rate; the
/// accepted distribution is still proportional to the intensity.
fn thin<R: Rng + ?Sized>(
    grid: &ReservoirGrid,
    intensity: impl Fn(usize) -> f64,
    bound: f64,
    rng: &mut R,
) -> Result<(usize, f64, f64)> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::Domain("cannot place an event in a zero intensity field".into()));
    }
    let n = grid.active_count();
    loop {
        let k = rng.random_range(0..n);
        let (ox, oy): (f64, f64) = (rng.random(), rng.random());
        let accept: f64 = rng.random();
        if accept * bound < intensity(k) {
            let (i, j) = grid.cell(k);
            return Ok((k, (i as f64 + ox) * grid.dx(), (j as f64 + oy) * grid.dy()));
        }
    }
}

/// Inverse CDF of the truncated Gutenberg–Richter law.
pub fn magnitude_from_uniform(gr: &GRParams, u: f64) -> f64 {
    let span = 1.0 - 10f64.powf(-gr.b * (gr.m_max - gr.m_c));
    let m = gr.m_c - (1.0 - u * span).log10() / gr.b;
    m.clamp(gr.m_c, gr.m_max)
}

pub fn draw_magnitude<R: Rng + ?Sized>(gr: &GRParams, rng: &mut R) -> f64 {
    magnitude_from_uniform(gr, rng.random())
}

/// Draw the events of one window and append them to `out` in time order.
pub fn sample_window<R: Rng + ?Sized>(
    grid: &ReservoirGrid,
    win: &IntensityWindow,
    gr: &GRParams,
    rng: &mut R,
    out: &mut Vec<SeismicEvent>,
) -> Result<u64> {
    let n = draw_event_count(win, rng);
    if n == 0 {
        return Ok(0);
    }
    let times = draw_event_times(win, n, rng);
    let span = win.t2 - win.t1;
    let max1 = win.r1.iter().copied().fold(0.0, f64::max);
    let max2 = win.r2.iter().copied().fold(0.0, f64::max);
    for t in times {
        let w = ((t - win.t1) / span).clamp(0.0, 1.0);
        let bound = (1.0 - w) * max1 + w * max2;
        let (cell, x, y) = thin(grid, |k| (1.0 - w) * win.r1[k] + w * win.r2[k], bound, rng)
            .map_err(|e| Error::numerical(t, e.to_string()))?;
        out.push(SeismicEvent {
            t,
            x,
            y,
            cell,
            magnitude: draw_magnitude(gr, rng),
        });
    }
    Ok(n)
}

/// Catalog over contiguous windows, using one generator for all of them.
pub fn generate_catalog<R: Rng + ?Sized>(
    grid: &ReservoirGrid,
    windows: &[IntensityWindow],
    gr: &GRParams,
    rng: &mut R,
) -> Result<Catalog> {
    gr.validate()?;
    for w in windows.windows(2) {
        if (w[1].t1 - w[0].t2).abs() > 1e-9 * w[0].t2.abs().max(1.0) {
            return Err(Error::config(format!(
                "windows are not contiguous: {} then {}",
                w[0].t2, w[1].t1
            )));
        }
    }
    let mut events = Vec::new();
    for win in windows {
        sample_window(grid, win, gr, rng, &mut events)?;
    }
    Ok(Catalog { events })
}

/// Aki maximum-likelihood (a, b) from events with M ≥ `m_c`.
pub fn estimate_b(catalog: &Catalog, m_c: f64) -> Result<(f64, f64)> {
    let mags: Vec<f64> = catalog
        .events
        .iter()
        .map(|e| e.magnitude)
        .filter(|&m| m >= m_c)
        .collect();
    estimate_b_from_magnitudes(&mags, m_c)
}

pub fn estimate_b_from_magnitudes(mags: &[f64], m_c: f64) -> Result<(f64, f64)> {
    const MIN_EVENTS: usize = 30;
    let n = mags.iter().filter(|&&m| m >= m_c).count();
    if n < MIN_EVENTS {
        return Err(Error::InsufficientData {
            required: MIN_EVENTS,
            found: n,
        });
    }
    let mean = mags.iter().filter(|&&m| m >= m_c).sum::<f64>() / n as f64;
    let excess = mean - m_c;
    if !(excess > 0.0) {
        return Err(Error::Degenerate(format!(
            "mean magnitude equals the completeness magnitude {m_c}"
        )));
    }
    let b = std::f64::consts::LOG10_E / excess;
    Ok(((n as f64).log10() + b * m_c, b))
}

/// Rows (m, N(≥m)) for m = m_c, m_c + step, … up to the largest magnitude.
pub fn exceedance_table(catalog: &Catalog, m_c: f64, step: f64) -> Vec<(f64, usize)> {
    let mut mags: Vec<f64> = catalog.magnitudes().into_iter().filter(|&m| m >= m_c).collect();
    mags.sort_by(f64::total_cmp);
    let Some(&top) = mags.last() else {
        return Vec::new();
    };
    let mut rows = Vec::new();
    let mut k = 0usize;
    loop {
        let m = m_c + k as f64 * step;
        if m > top + 1e-12 {
            break;
        }
        let below = mags.partition_point(|&x| x < m - 1e-12);
        rows.push((m, mags.len() - below));
        k += 1;
    }
    rows
}
