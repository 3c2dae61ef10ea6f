//! Masked structured grid for the depth-averaged reservoir and the
//! cell-valued fields that live on it.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::units::Unit;

/// Region of the bounding box whose cells belong to the reservoir.
///
/// A cell is active when its centre lies inside the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActiveRegion {
    /// Every cell of the box.
    Rectangle,
    /// Axis-aligned ellipse, all values in km.
    Ellipse { cx: f64, cy: f64, ax: f64, ay: f64 },
    /// Closed polygon (last vertex joins the first), vertices in km.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ActiveRegion {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            ActiveRegion::Rectangle => true,
            ActiveRegion::Ellipse { cx, cy, ax, ay } => {
                let u = (x - cx) / ax;
                let v = (y - cy) / ay;
                u * u + v * v <= 1.0
            }
            ActiveRegion::Polygon { vertices } => point_in_polygon(vertices, x, y),
        }
    }
}

/// Even-odd ray casting.
fn point_in_polygon(vertices: &[[f64; 2]], x: f64, y: f64) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let [xi, yi] = vertices[i];
        let [xj, yj] = vertices[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Geometry description consumed by [`ReservoirGrid::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Cell size along x [km].
    pub dx: f64,
    /// Cell size along y [km].
    pub dy: f64,
    /// Reservoir thickness [km].
    pub thickness: f64,
    pub region: ActiveRegion,
}

impl GridSpec {
    pub fn rectangle(nx: usize, ny: usize, dx: f64, dy: f64, thickness: f64) -> Self {
        GridSpec {
            nx,
            ny,
            dx,
            dy,
            thickness,
            region: ActiveRegion::Rectangle,
        }
    }
}

/// Discretized 2D depth-averaged reservoir.
///
/// Cells are addressed either by `(i, j)` in the bounding box or by their
/// position in the list of active cells; every field stores one value per
/// active cell, in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirGrid {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    thickness: f64,
    /// Box index (j * nx + i) -> active index.
    lookup: Vec<Option<usize>>,
    /// Active index -> (i, j).
    cells: Vec<(usize, usize)>,
}

impl ReservoirGrid {
    pub fn build(spec: &GridSpec) -> Result<Self> {
        if spec.nx < 3 || spec.ny < 3 {
            return Err(Error::config(format!(
                "grid needs at least 3x3 cells, got {}x{}",
                spec.nx, spec.ny
            )));
        }
        for (name, v) in [("dx", spec.dx), ("dy", spec.dy), ("thickness", spec.thickness)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("grid {name} must be positive, got {v}")));
            }
        }
        let mut lookup = vec![None; spec.nx * spec.ny];
        let mut cells = Vec::new();
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let x = (i as f64 + 0.5) * spec.dx;
                let y = (j as f64 + 0.5) * spec.dy;
                if spec.region.contains(x, y) {
                    lookup[j * spec.nx + i] = Some(cells.len());
                    cells.push((i, j));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::config("active region contains no cell centres"));
        }
        Ok(ReservoirGrid {
            nx: spec.nx,
            ny: spec.ny,
            dx: spec.dx,
            dy: spec.dy,
            thickness: spec.thickness,
            lookup,
            cells,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn active_count(&self) -> usize {
        self.cells.len()
    }

    /// dx·dy·h [km³].
    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy * self.thickness
    }

    /// Total active volume V [km³].
    pub fn total_volume(&self) -> f64 {
        self.active_count() as f64 * self.cell_volume()
    }

    /// Horizontal area of the active region [km²].
    pub fn active_area(&self) -> f64 {
        self.active_count() as f64 * self.dx * self.dy
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.active_index(i, j).is_some()
    }

    pub fn active_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        self.lookup[j * self.nx + i]
    }

    /// Box coordinates of the active cell `k`.
    pub fn cell(&self, k: usize) -> (usize, usize) {
        self.cells[k]
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    /// Centre of active cell `k` [km].
    pub fn cell_centre(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.cells[k];
        ((i as f64 + 0.5) * self.dx, (j as f64 + 0.5) * self.dy)
    }

    /// Box cell containing a point, if the point falls inside the box.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let i = (x / self.dx).floor() as usize;
        let j = (y / self.dy).floor() as usize;
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    /// Active neighbours of cell `k` in the 5-point stencil, and how many of
    /// the four faces touch an inactive cell or the box edge.
    pub fn neighbours(&self, k: usize) -> ([Option<usize>; 4], usize) {
        let (i, j) = self.cells[k];
        let west = if i > 0 { self.active_index(i - 1, j) } else { None };
        let east = self.active_index(i + 1, j);
        let south = if j > 0 { self.active_index(i, j - 1) } else { None };
        let north = self.active_index(i, j + 1);
        let nb = [west, east, south, north];
        let boundary = nb.iter().filter(|n| n.is_none()).count();
        (nb, boundary)
    }

    /// Short content hash identifying the geometry (shape, sizes, mask).
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.nx as u64).to_le_bytes());
        h.update((self.ny as u64).to_le_bytes());
        h.update(self.dx.to_le_bytes());
        h.update(self.dy.to_le_bytes());
        h.update(self.thickness.to_le_bytes());
        for c in &self.lookup {
            h.update([c.is_some() as u8]);
        }
        let digest = h.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Volume integral ∑ f·cell_volume over active cells.
    pub fn integrate(&self, field: &ScalarField) -> f64 {
        field.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn zeros(&self, unit: Unit) -> ScalarField {
        ScalarField::constant(self.active_count(), 0.0, unit)
    }
}

/// One real value per active cell, tagged with its unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub unit: Unit,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, unit: Unit) -> Self {
        ScalarField { values, unit }
    }

    pub fn constant(n: usize, value: f64, unit: Unit) -> Self {
        ScalarField {
            values: vec![value; n],
            unit,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// New field with every value multiplied by `k`, under a new unit.
    pub fn scaled(&self, k: f64, unit: Unit) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|v| v * k).collect(),
            unit,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_len(&self, grid: &ReservoirGrid, what: &str) -> Result<()> {
        if self.len() != grid.active_count() {
            return Err(Error::config(format!(
                "{what} has {} values but the grid has {} active cells",
                self.len(),
                grid.active_count()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rectangle_volume() {
        let g = ReservoirGrid::build(&GridSpec::rectangle(10, 10, 1.0, 1.0, 0.1)).unwrap();
        assert_eq!(g.active_count(), 100);
        assert!((g.total_volume() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_mask_matches_brute_force_count() {
        let (nx, ny, dx, dy) = (40, 50, 0.8, 0.8);
        let region = ActiveRegion::Ellipse {
            cx: 16.0,
            cy: 20.0,
            ax: 15.0,
            ay: 19.0,
        };
        let spec = GridSpec {
            nx,
            ny,
            dx,
            dy,
            thickness: 0.05,
            region,
        };
        let g = ReservoirGrid::build(&spec).unwrap();
        // independent count, centre by centre
        let mut count = 0usize;
        for i in 0..nx {
            for j in 0..ny {
                let x = dx * (2 * i + 1) as f64 / 2.0;
                let y = dy * (2 * j + 1) as f64 / 2.0;
                if ((x - 16.0) / 15.0).powi(2) + ((y - 20.0) / 19.0).powi(2) <= 1.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(g.active_count(), count);
        assert_eq!(g.cell_volume(), dx * dy * 0.05);
        assert_eq!(g.total_volume(), count as f64 * g.cell_volume());
    }

    #[test]
    fn polygon_mask() {
        // right triangle covering the lower-left half of a 4x4 box
        let spec = GridSpec {
            nx: 4,
            ny: 4,
            dx: 1.0,
            dy: 1.0,
            thickness: 1.0,
            region: ActiveRegion::Polygon {
                vertices: vec![[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]],
            },
        };
        let g = ReservoirGrid::build(&spec).unwrap();
        // centres with x + y < 4
        assert_eq!(g.active_count(), 6);
        assert!(g.is_active(0, 0) && g.is_active(2, 0) && !g.is_active(3, 3));
    }

    #[test]
    fn rejects_empty_and_small_grids() {
        let mut spec = GridSpec::rectangle(10, 10, 1.0, 1.0, 0.1);
        spec.region = ActiveRegion::Ellipse {
            cx: -50.0,
            cy: -50.0,
            ax: 1.0,
            ay: 1.0,
        };
        assert!(matches!(ReservoirGrid::build(&spec), Err(Error::Config(_))));
        assert!(ReservoirGrid::build(&GridSpec::rectangle(2, 10, 1.0, 1.0, 0.1)).is_err());
        assert!(ReservoirGrid::build(&GridSpec::rectangle(5, 5, 0.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn neighbours_respect_mask() {
        let g = ReservoirGrid::build(&GridSpec::rectangle(3, 3, 1.0, 1.0, 1.0)).unwrap();
        let corner = g.active_index(0, 0).unwrap();
        let (_, boundary) = g.neighbours(corner);
        assert_eq!(boundary, 2);
        let centre = g.active_index(1, 1).unwrap();
        assert_eq!(g.neighbours(centre).1, 0);
    }

    #[test]
    fn hash_depends_on_mask() {
        let a = ReservoirGrid::build(&GridSpec::rectangle(5, 5, 1.0, 1.0, 1.0)).unwrap();
        let mut spec = GridSpec::rectangle(5, 5, 1.0, 1.0, 1.0);
        spec.region = ActiveRegion::Ellipse {
            cx: 2.5,
            cy: 2.5,
            ax: 2.0,
            ay: 2.0,
        };
        let b = ReservoirGrid::build(&spec).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), a.clone().content_hash());
    }
}
