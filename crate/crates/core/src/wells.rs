//! Wells, their footprints on the grid, and the source operator that
//! spreads per-well fluxes over footprint volumes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ReservoirGrid, ScalarField};
use crate::units::{m3_per_month_to_km3_per_hr, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WellRole {
    Producer,
    Injector,
    Both,
}

impl WellRole {
    pub fn as_str(self) -> &'static str {
        match self {
            WellRole::Producer => "producer",
            WellRole::Injector => "injector",
            WellRole::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "producer" => Some(WellRole::Producer),
            "injector" => Some(WellRole::Injector),
            "both" => Some(WellRole::Both),
            _ => None,
        }
    }
}

/// User-level description of a well before it is resolved onto a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub id: String,
    /// Location [km].
    pub x: f64,
    pub y: f64,
    /// Lower flux bound [m³/month].
    pub q_min: f64,
    /// Upper flux bound [m³/month].
    pub q_max: f64,
    pub role: WellRole,
    /// Footprint radius [km]; `None` means the single cell holding (x, y).
    #[serde(default)]
    pub footprint_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Well {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub role: WellRole,
    /// Active-cell indices of the footprint V_i*.
    pub footprint: Vec<usize>,
    /// Footprint volume [km³].
    pub footprint_volume: f64,
}

impl Well {
    /// Width of the admissible flux range [m³/month].
    pub fn bound_width(&self) -> f64 {
        self.q_max - self.q_min
    }

    /// Value of the indicator B_i on each footprint cell [1/km³].
    pub fn indicator(&self) -> f64 {
        1.0 / self.footprint_volume
    }
}

/// Set of wells resolved onto a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WellSet {
    wells: Vec<Well>,
    n_cells: usize,
}

impl WellSet {
    /// Resolve well specs onto `grid`. Every footprint cell must be active.
    pub fn resolve(grid: &ReservoirGrid, specs: &[WellSpec]) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::config("well set is empty"));
        }
        let mut wells = Vec::with_capacity(specs.len());
        for s in specs {
            if !(s.q_min < s.q_max) {
                return Err(Error::config(format!(
                    "well {}: lower bound {} must be below upper bound {}",
                    s.id, s.q_min, s.q_max
                )));
            }
            let footprint = match s.footprint_radius {
                None => {
                    let (i, j) = grid.locate(s.x, s.y).ok_or_else(|| {
                        Error::config(format!("well {} at ({}, {}) is outside the grid", s.id, s.x, s.y))
                    })?;
                    let k = grid.active_index(i, j).ok_or_else(|| {
                        Error::config(format!("well {} at ({}, {}) lies in an inactive cell", s.id, s.x, s.y))
                    })?;
                    vec![k]
                }
                Some(r) => footprint_disc(grid, s, r)?,
            };
            let footprint_volume = footprint.len() as f64 * grid.cell_volume();
            wells.push(Well {
                id: s.id.clone(),
                x: s.x,
                y: s.y,
                q_min: s.q_min,
                q_max: s.q_max,
                role: s.role,
                footprint,
                footprint_volume,
            });
        }
        Ok(WellSet {
            wells,
            n_cells: grid.active_count(),
        })
    }

    pub fn len(&self) -> usize {
        self.wells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wells.is_empty()
    }

    pub fn wells(&self) -> &[Well] {
        &self.wells
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Well> {
        self.wells.iter()
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        self.wells.iter().map(|w| w.q_min).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        self.wells.iter().map(|w| w.q_max).collect()
    }

    /// Overwrite every well's bounds.
    pub fn set_uniform_bounds(&mut self, q_min: f64, q_max: f64) -> Result<()> {
        if !(q_min < q_max) {
            return Err(Error::config(format!(
                "lower bound {q_min} must be below upper bound {q_max}"
            )));
        }
        for w in &mut self.wells {
            w.q_min = q_min;
            w.q_max = q_max;
        }
        Ok(())
    }

    pub fn set_roles(&mut self, roles: &[WellRole]) -> Result<()> {
        if roles.len() != self.wells.len() {
            return Err(Error::config(format!(
                "{} roles given for {} wells",
                roles.len(),
                self.wells.len()
            )));
        }
        for (w, r) in self.wells.iter_mut().zip(roles) {
            w.role = *r;
        }
        Ok(())
    }

    pub fn specs(&self) -> Vec<WellSpec> {
        self.wells
            .iter()
            .map(|w| WellSpec {
                id: w.id.clone(),
                x: w.x,
                y: w.y,
                q_min: w.q_min,
                q_max: w.q_max,
                role: w.role,
                footprint_radius: None,
            })
            .collect()
    }

    /// Source density s(x) = ∑ B_i(x)·Q_i in km³/(km³·hr), for fluxes `q`
    /// in m³/month. Inactive cells never receive anything.
    pub fn source_field(&self, q: &[f64]) -> Result<ScalarField> {
        let mut s = ScalarField::constant(self.n_cells, 0.0, Unit::PerHr);
        self.source_into(q, &mut s.values)?;
        Ok(s)
    }

    /// In-place variant of [`source_field`](Self::source_field).
    pub fn source_into(&self, q: &[f64], out: &mut [f64]) -> Result<()> {
        if q.len() != self.wells.len() {
            return Err(Error::config(format!(
                "flux vector has {} entries for {} wells",
                q.len(),
                self.wells.len()
            )));
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        for (w, &qi) in self.wells.iter().zip(q) {
            let density = m3_per_month_to_km3_per_hr(qi) * w.indicator();
            for &k in &w.footprint {
                out[k] += density;
            }
        }
        Ok(())
    }
}

fn footprint_disc(grid: &ReservoirGrid, s: &WellSpec, r: f64) -> Result<Vec<usize>> {
    if !(r > 0.0) {
        return Err(Error::config(format!(
            "well {}: footprint radius must be positive",
            s.id
        )));
    }
    let mut cells = Vec::new();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let x = (i as f64 + 0.5) * grid.dx();
            let y = (j as f64 + 0.5) * grid.dy();
            if (x - s.x).hypot(y - s.y) <= r {
                match grid.active_index(i, j) {
                    Some(k) => cells.push(k),
                    None => {
                        return Err(Error::config(format!(
                            "well {}: footprint cell ({i}, {j}) is outside the active region",
                            s.id
                        )))
                    }
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::config(format!(
            "well {}: footprint radius {r} km covers no cell centre",
            s.id
        )));
    }
    cells.sort_unstable();
    Ok(cells)
}
