//! Reservoir datasets: a seeded Groningen-like generator and the delimited
//! file formats used to ingest real data.
//!
//! File formats (comma separated, one header row):
//!
//! * wells: `id,x_km,y_km,q_min,q_max,role[,share]`, fluxes in m³/month;
//!   `share` is the well's fraction of the total extraction (equal shares
//!   when absent).
//! * extraction history: `month,total_m3_per_month`, month as `YYYY-MM`,
//!   extraction reported positive.
//! * density: `i,j,d`, one row per active cell, d in 1/km³.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calendar::{month_label, parse_month};
use crate::error::{Error, Result};
use crate::grid::{ActiveRegion, GridSpec, ReservoirGrid, ScalarField};
use crate::rng::{stream, Purpose};
use crate::units::Unit;
use crate::wells::{WellRole, WellSet, WellSpec};

/// Monthly total extraction [m³/month, ≥ 0].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionHistory {
    /// Month index of the first entry.
    pub start_month: i64,
    pub total: Vec<f64>,
}

impl ExtractionHistory {
    /// f(t) for a month index; zero outside the record.
    pub fn at_month(&self, month: i64) -> f64 {
        let k = month - self.start_month;
        if k < 0 {
            return 0.0;
        }
        self.total.get(k as usize).copied().unwrap_or(0.0)
    }

    pub fn end_month(&self) -> i64 {
        self.start_month + self.total.len() as i64
    }

    /// Per-well static fluxes Q_s(t) = −f(t)·share [m³/month].
    pub fn static_profile(&self, shares: &[f64], month: i64) -> Vec<f64> {
        let f = self.at_month(month);
        shares.iter().map(|s| -f * s).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid_spec: GridSpec,
    pub grid: ReservoirGrid,
    pub wells: WellSet,
    /// Each well's fraction of the total extraction; sums to 1.
    pub shares: Vec<f64>,
    /// Spatial density d(x) [1/km³], ∑ d·cell_volume = 1.
    pub density: ScalarField,
    pub extraction: ExtractionHistory,
}

/// Generator settings. The defaults give a reservoir on which the default
/// controller gains regulate with partial actuator authority; see the
/// README for how they were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub nx: usize,
    pub ny: usize,
    /// Cell size [km].
    pub dx: f64,
    /// Effective thickness [km].
    pub thickness: f64,
    pub n_wells: usize,
    /// Minimum Manhattan distance between well cells.
    pub well_spacing: usize,
    pub density_components: usize,
    /// Gaussian width of density components [km].
    pub density_sigma: f64,
    /// Plateau extraction per well [m³/month].
    pub plateau_per_well: f64,
    /// Early peak relative to the plateau.
    pub early_peak: f64,
    /// Relative spread of per-well shares.
    pub share_spread: f64,
    /// Seasonal amplitude.
    pub seasonal: f64,
    /// Lower and upper per-well bounds [m³/month].
    pub q_min: f64,
    pub q_max: f64,
    /// Number of producers; the rest are injectors.
    pub producers: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            nx: 40,
            ny: 50,
            dx: 0.8,
            thickness: 0.0005,
            n_wells: 29,
            well_spacing: 3,
            density_components: 3,
            density_sigma: 2.2,
            plateau_per_well: 22_000.0,
            early_peak: 2.2,
            share_spread: 0.2,
            seasonal: 0.15,
            q_min: -1e6,
            q_max: 0.0,
            producers: 15,
        }
    }
}

/// Month indices of the synthetic record: 1965-10 through 2023-01.
pub const SYNTH_MONTHS: usize = 688;

/// Lobed ellipse outline inscribed in the box, as a polygon.
fn outline(p: &SynthParams) -> ActiveRegion {
    let (w, h) = (p.nx as f64 * p.dx, p.ny as f64 * p.dx);
    let (cx, cy, ax, ay) = (w / 2.0, h / 2.0, 0.46 * w, 0.46 * h);
    let vertices = (0..720)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / 720.0;
            let r = lobe(th);
            [cx + r * ax * th.cos(), cy + r * ay * th.sin()]
        })
        .collect();
    ActiveRegion::Polygon { vertices }
}

fn lobe(theta: f64) -> f64 {
    1.0 + 0.08 * (3.0 * theta + 1.0).sin() + 0.05 * (5.0 * theta).cos()
}

/// Normalized extraction shape at fractional year `yr`.
fn extraction_shape(p: &SynthParams, yr: f64, month: usize) -> f64 {
    let base = if yr < 1976.0 {
        (yr - 1965.75) / (1976.0 - 1965.75) * p.early_peak
    } else if yr < 1980.0 {
        p.early_peak + (1.0 - p.early_peak) * (yr - 1976.0) / 4.0
    } else {
        1.0
    };
    let f = if yr > 2013.5 {
        let decline = (1.0 - (yr - 2013.5) / (2023.0 - 2013.5)).max(0.0) * 0.9;
        decline + if yr < 2023.0 { 0.1 } else { 0.0 }
    } else {
        base
    };
    f * (1.0 + p.seasonal * (2.0 * PI * month as f64 / 12.0).sin())
}

/// Seeded synthetic Groningen-like dataset with the default settings.
pub fn synth_groningen(seed: u64) -> Result<Dataset> {
    synth_with(seed, &SynthParams::default())
}

pub fn synth_with(seed: u64, p: &SynthParams) -> Result<Dataset> {
    if p.producers == 0 || p.producers >= p.n_wells {
        return Err(Error::config("need at least one producer and one injector"));
    }
    let mut rng = stream(seed, 0, Purpose::Dataset, 0);
    let grid_spec = GridSpec {
        nx: p.nx,
        ny: p.ny,
        dx: p.dx,
        dy: p.dx,
        thickness: p.thickness,
        region: outline(p),
    };
    let grid = ReservoirGrid::build(&grid_spec)?;

    // wells in the inner 70% of the outline
    let (w, h) = (p.nx as f64 * p.dx, p.ny as f64 * p.dx);
    let (cx, cy, ax, ay) = (w / 2.0, h / 2.0, 0.46 * w, 0.46 * h);
    let candidates: Vec<usize> = (0..grid.active_count())
        .filter(|&k| {
            let (x, y) = grid.cell_centre(k);
            let (u, v) = ((x - cx) / ax, (y - cy) / ay);
            u.hypot(v) < 0.7 * lobe(v.atan2(u))
        })
        .collect();
    let mut picked: Vec<usize> = Vec::with_capacity(p.n_wells);
    let mut attempts = 0usize;
    while picked.len() < p.n_wells {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::config("cannot place wells with the requested spacing"));
        }
        let c = candidates[rng.random_range(0..candidates.len())];
        let (ci, cj) = grid.cell(c);
        let far = picked.iter().all(|&o| {
            let (oi, oj) = grid.cell(o);
            ci.abs_diff(oi) + cj.abs_diff(oj) >= p.well_spacing
        });
        if far {
            picked.push(c);
        }
    }

    // Gaussian-mixture density centred on random wells, with a small floor
    let mut d = vec![0.0; grid.active_count()];
    let two_s2 = 2.0 * p.density_sigma * p.density_sigma;
    for _ in 0..p.density_components {
        let (wx, wy) = grid.cell_centre(picked[rng.random_range(0..picked.len())]);
        let weight = 0.5 + rng.random::<f64>();
        for (k, v) in d.iter_mut().enumerate() {
            let (x, y) = grid.cell_centre(k);
            *v += weight * (-((x - wx).powi(2) + (y - wy).powi(2)) / two_s2).exp();
        }
    }
    let floor = 0.02 * d.iter().copied().fold(0.0, f64::max);
    d.iter_mut().for_each(|v| *v += floor);
    let norm = d.iter().sum::<f64>() * grid.cell_volume();
    d.iter_mut().for_each(|v| *v /= norm);
    let density = ScalarField::new(d, Unit::Dimensionless);

    let mut shares: Vec<f64> = (0..p.n_wells)
        .map(|_| 1.0 - p.share_spread + 2.0 * p.share_spread * rng.random::<f64>())
        .collect();
    let total: f64 = shares.iter().sum();
    shares.iter_mut().for_each(|s| *s /= total);

    let specs: Vec<WellSpec> = picked
        .iter()
        .enumerate()
        .map(|(n, &k)| {
            let (x, y) = grid.cell_centre(k);
            WellSpec {
                id: format!("W{:02}", n + 1),
                x,
                y,
                q_min: p.q_min,
                q_max: p.q_max,
                role: if n < p.producers {
                    WellRole::Producer
                } else {
                    WellRole::Injector
                },
                footprint_radius: None,
            }
        })
        .collect();
    let wells = WellSet::resolve(&grid, &specs)?;

    let plateau = p.plateau_per_well * p.n_wells as f64;
    let total = (0..SYNTH_MONTHS)
        .map(|m| plateau * extraction_shape(p, 1965.75 + m as f64 / 12.0, m).max(0.0))
        .collect();
    Ok(Dataset {
        grid_spec,
        grid,
        wells,
        shares,
        density,
        extraction: ExtractionHistory { start_month: 0, total },
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct WellRow {
    id: String,
    x_km: f64,
    y_km: f64,
    q_min: f64,
    q_max: f64,
    role: String,
    #[serde(default)]
    share: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExtractionRow {
    month: String,
    total_m3_per_month: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DensityRow {
    i: usize,
    j: usize,
    d: f64,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}

pub fn write_wells(path: &Path, wells: &WellSet, shares: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    for (well, share) in wells.iter().zip(shares) {
        w.serialize(WellRow {
            id: well.id.clone(),
            x_km: well.x,
            y_km: well.y,
            q_min: well.q_min,
            q_max: well.q_max,
            role: well.role.as_str().into(),
            share: Some(*share),
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Well specs and extraction shares (normalized to sum to 1).
pub fn read_wells(path: &Path) -> Result<(Vec<WellSpec>, Vec<f64>)> {
    let mut specs = Vec::new();
    let mut shares = Vec::new();
    for (n, row) in reader(path)?.deserialize::<WellRow>().enumerate() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let role = WellRole::parse(&row.role)
            .ok_or_else(|| Error::parse(path, format!("row {}: unknown role {:?}", n + 1, row.role)))?;
        shares.push(row.share.unwrap_or(1.0));
        specs.push(WellSpec {
            id: row.id,
            x: row.x_km,
            y: row.y_km,
            q_min: row.q_min,
            q_max: row.q_max,
            role,
            footprint_radius: None,
        });
    }
    let total: f64 = shares.iter().sum();
    if specs.is_empty() || !(total > 0.0) {
        return Err(Error::parse(path, "no wells, or shares do not sum to a positive value"));
    }
    shares.iter_mut().for_each(|s| *s /= total);
    Ok((specs, shares))
}

pub fn write_extraction(path: &Path, h: &ExtractionHistory) -> Result<()> {
    let mut w = writer(path)?;
    for (k, v) in h.total.iter().enumerate() {
        w.serialize(ExtractionRow {
            month: month_label(h.start_month + k as i64),
            total_m3_per_month: *v,
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a gap-free monthly history.
pub fn read_extraction(path: &Path) -> Result<ExtractionHistory> {
    let mut start = None;
    let mut total = Vec::new();
    for row in reader(path)?.deserialize::<ExtractionRow>() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let m = parse_month(&row.month).map_err(|e| Error::parse(path, e.to_string()))?;
        let s = *start.get_or_insert(m);
        if m != s + total.len() as i64 {
            return Err(Error::parse(
                path,
                format!("month {} breaks the monthly sequence", row.month),
            ));
        }
        if !(row.total_m3_per_month >= 0.0) {
            return Err(Error::parse(path, format!("negative extraction in {}", row.month)));
        }
        total.push(row.total_m3_per_month);
    }
    let start_month = start.ok_or_else(|| Error::parse(path, "empty extraction history"))?;
    Ok(ExtractionHistory { start_month, total })
}

pub fn write_density(path: &Path, grid: &ReservoirGrid, d: &ScalarField) -> Result<()> {
    d.check_len(grid, "density")?;
    let mut w = writer(path)?;
    for (k, v) in d.values.iter().enumerate() {
        let (i, j) = grid.cell(k);
        w.serialize(DensityRow { i, j, d: *v }).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads d(x); cells not listed get 0. The result is renormalized so that
/// ∑ d·cell_volume = 1.
pub fn read_density(path: &Path, grid: &ReservoirGrid) -> Result<ScalarField> {
    let mut d = vec![0.0; grid.active_count()];
    for row in reader(path)?.deserialize::<DensityRow>() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let k = grid
            .active_index(row.i, row.j)
            .ok_or_else(|| Error::parse(path, format!("cell ({}, {}) is not active", row.i, row.j)))?;
        if !(row.d >= 0.0) {
            return Err(Error::parse(
                path,
                format!("negative density at ({}, {})", row.i, row.j),
            ));
        }
        d[k] = row.d;
    }
    let norm = d.iter().sum::<f64>() * grid.cell_volume();
    if !(norm > 0.0) {
        return Err(Error::parse(path, "density is zero everywhere"));
    }
    d.iter_mut().for_each(|v| *v /= norm);
    Ok(ScalarField::new(d, Unit::Dimensionless))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_dataset() {
        let a = synth_groningen(5).unwrap();
        let b = synth_groningen(5).unwrap();
        assert_eq!(a.density, b.density);
        assert_eq!(a.wells, b.wells);
        assert_eq!(a.extraction, b.extraction);
        let c = synth_groningen(6).unwrap();
        assert_ne!(a.density, c.density);
    }

    #[test]
    fn shape_and_normalization() {
        let ds = synth_groningen(1).unwrap();
        assert_eq!(ds.wells.len(), 29);
        let integral = ds.grid.integrate(&ds.density);
        assert!((integral - 1.0).abs() < 1e-12);
        assert!(ds.density.min() > 0.0);
        assert!((ds.shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(ds.extraction.total.len(), SYNTH_MONTHS);
        assert_eq!(month_label(ds.extraction.end_month() - 1), "2023-01");
        // extraction reported positive; static fluxes are withdrawals
        assert!(ds.extraction.total.iter().all(|&f| f >= 0.0));
        for m in 0..SYNTH_MONTHS as i64 {
            assert!(ds.extraction.static_profile(&ds.shares, m).iter().all(|&q| q <= 0.0));
        }
        let producers = ds.wells.iter().filter(|w| w.role == WellRole::Producer).count();
        assert_eq!(producers, 15);
        // ramp, plateau, decline
        let f = &ds.extraction.total;
        let year = |y: usize| f[y * 12..y * 12 + 12].iter().sum::<f64>();
        assert!(year(0) < year(9));
        assert!(year(9) > year(30));
        assert!(year(56) < 0.3 * year(30));
    }

    #[test]
    fn files_round_trip() {
        let ds = synth_groningen(2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (pw, pe, pd) = (
            dir.path().join("w.csv"),
            dir.path().join("e.csv"),
            dir.path().join("d.csv"),
        );
        write_wells(&pw, &ds.wells, &ds.shares).unwrap();
        write_extraction(&pe, &ds.extraction).unwrap();
        write_density(&pd, &ds.grid, &ds.density).unwrap();
        let (specs, shares) = read_wells(&pw).unwrap();
        assert_eq!(WellSet::resolve(&ds.grid, &specs).unwrap(), ds.wells);
        for (a, b) in shares.iter().zip(&ds.shares) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(read_extraction(&pe).unwrap(), ds.extraction);
        let d = read_density(&pd, &ds.grid).unwrap();
        for (a, b) in d.values.iter().zip(&ds.density.values) {
            assert!((a - b).abs() <= 1e-13 * b);
        }
    }

    #[test]
    fn gaps_in_history_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        std::fs::write(&p, "month,total_m3_per_month\n1990-01,5\n1990-03,5\n").unwrap();
        assert!(read_extraction(&p).is_err());
    }
}
