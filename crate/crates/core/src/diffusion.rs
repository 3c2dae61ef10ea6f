//! Pore-pressure diffusion driven by well sources.
//!
//! The pressure change u obeys u_t = c_hy ∇²u + s/β on the active cells,
//! discretized with the masked 5-point Laplacian and advanced by backward
//! Euler. Each step stores the backward-difference rate (u_new − u_old)/dt,
//! which is what drives the seismicity model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ReservoirGrid, ScalarField};
use crate::solver::{PcgSolver, PreconditionerKind, SolveStats, SymmetricMatrix};
use crate::units::Unit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// u = 0 on the reservoir boundary (mirrored ghost cells).
    DirichletZero,
    /// No flux through the reservoir boundary.
    NeumannZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    /// Hydraulic diffusivity [km²/hr].
    pub c_hy: f64,
    /// Mixture compressibility [1/MPa].
    pub beta: f64,
    pub bc: BoundaryCondition,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        DiffusionParams {
            c_hy: 4.4e-2,
            beta: 5.7e-4,
            bc: BoundaryCondition::NeumannZero,
        }
    }
}

impl DiffusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_hy > 0.0 && self.c_hy.is_finite()) {
            return Err(Error::config(format!("c_hy must be positive, got {}", self.c_hy)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureState {
    /// Pressure change [MPa].
    pub u: ScalarField,
    /// Rate over the last step [MPa/hr]; `None` before the first step.
    pub u_t: Option<ScalarField>,
    /// Current time [hr].
    pub t: f64,
}

impl PressureState {
    pub fn at_rest(grid: &ReservoirGrid) -> Self {
        PressureState {
            u: grid.zeros(Unit::MPa),
            u_t: None,
            t: 0.0,
        }
    }

    pub fn from_field(u: ScalarField, t: f64) -> Self {
        PressureState { u, u_t: None, t }
    }
}

/// Neighbour and weight across each of the four faces of a cell.
pub(crate) type FaceRow = [(Option<usize>, f64); 4];

/// Masked 5-point Laplacian assembled as (neighbour, weight) lists plus a
/// diagonal, with the boundary condition folded into the diagonal.
#[allow(clippy::needless_range_loop)]
pub(crate) fn laplacian_weights(grid: &ReservoirGrid, bc: BoundaryCondition) -> (Vec<f64>, Vec<FaceRow>) {
    let wx = 1.0 / (grid.dx() * grid.dx());
    let wy = 1.0 / (grid.dy() * grid.dy());
    let face_w = [wx, wx, wy, wy];
    let n = grid.active_count();
    let mut diag = vec![0.0; n];
    let mut faces = Vec::with_capacity(n);
    for k in 0..n {
        let (nb, _) = grid.neighbours(k);
        let mut row = [(None, 0.0); 4];
        for f in 0..4 {
            match nb[f] {
                Some(m) => {
                    diag[k] -= face_w[f];
                    row[f] = (Some(m), face_w[f]);
                }
                None => {
                    if bc == BoundaryCondition::DirichletZero {
                        // ghost = −u_k puts u = 0 on the face
                        diag[k] -= 2.0 * face_w[f];
                    }
                }
            }
        }
        faces.push(row);
    }
    (diag, faces)
}

/// Apply the masked Laplacian to `u`.
pub fn apply_laplacian(grid: &ReservoirGrid, bc: BoundaryCondition, u: &[f64]) -> Vec<f64> {
    let (diag, faces) = laplacian_weights(grid, bc);
    (0..u.len())
        .map(|k| {
            let mut acc = diag[k] * u[k];
            for (m, w) in faces[k] {
                if let Some(m) = m {
                    acc += w * u[m];
                }
            }
            acc
        })
        .collect()
}

/// Backward-Euler stepper with the system matrix and preconditioner built
/// once for a fixed step length.
#[derive(Debug, Clone)]
pub struct DiffusionStepper {
    params: DiffusionParams,
    dt: f64,
    solver: PcgSolver,
    rhs: Vec<f64>,
    guess: Vec<f64>,
    pub last_stats: Option<SolveStats>,
}

impl DiffusionStepper {
    pub fn new(grid: &ReservoirGrid, params: DiffusionParams, dt: f64) -> Result<Self> {
        Self::with_preconditioner(grid, params, dt, PreconditionerKind::IncompleteCholesky)
    }

    pub fn with_preconditioner(
        grid: &ReservoirGrid,
        params: DiffusionParams,
        dt: f64,
        kind: PreconditionerKind,
    ) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("time step must be positive, got {dt}")));
        }
        let (ldiag, faces) = laplacian_weights(grid, params.bc);
        let k = dt * params.c_hy;
        // A = I − dt·c·L
        let mut a = SymmetricMatrix::from_diag(ldiag.iter().map(|d| 1.0 - k * d).collect());
        for (row, f) in faces.iter().enumerate() {
            for &(m, w) in f {
                if let Some(m) = m {
                    if m < row {
                        a.set_pair(row, m, -k * w);
                    }
                }
            }
        }
        let n = grid.active_count();
        Ok(DiffusionStepper {
            params,
            dt,
            solver: PcgSolver::new(a, kind)?,
            rhs: vec![0.0; n],
            guess: vec![0.0; n],
            last_stats: None,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &DiffusionParams {
        &self.params
    }

    pub fn set_tolerance(&mut self, tol: f64) {
        self.solver.tolerance = tol;
    }

    /// Advance `state` by one step under source density `s` [km³/(km³·hr)].
    pub fn step(&mut self, state: &mut PressureState, s: &ScalarField) -> Result<()> {
        let n = state.u.len();
        if s.len() != n {
            return Err(Error::config(format!(
                "source field has {} values, pressure field {}",
                s.len(),
                n
            )));
        }
        let inv_beta = 1.0 / self.params.beta;
        for k in 0..n {
            self.rhs[k] = state.u.values[k] + self.dt * s.values[k] * inv_beta;
        }
        // linear extrapolation of the previous rate as the initial guess
        match &state.u_t {
            Some(ut) => {
                for k in 0..n {
                    self.guess[k] = state.u.values[k] + self.dt * ut.values[k];
                }
            }
            None => self.guess.copy_from_slice(&state.u.values),
        }
        let stats = self.solver.solve(&self.rhs, &mut self.guess).map_err(|e| match e {
            Error::Numerical { message, .. } => Error::numerical(state.t + self.dt, message),
            other => other,
        })?;
        self.last_stats = Some(stats);
        let mut rate = match state.u_t.take() {
            Some(f) => f,
            None => ScalarField::constant(n, 0.0, Unit::MPaPerHr),
        };
        for k in 0..n {
            rate.values[k] = (self.guess[k] - state.u.values[k]) / self.dt;
        }
        state.u.values.copy_from_slice(&self.guess);
        state.u_t = Some(rate);
        state.t += self.dt;
        Ok(())
    }
}

/// One backward-Euler step: solves (I − dt·c_hy·L) u_new = u_old + dt·s/β.
///
/// Builds the system from scratch; loops should hold a [`DiffusionStepper`].
pub fn step_pressure(
    grid: &ReservoirGrid,
    state: &PressureState,
    s: &ScalarField,
    dt: f64,
    params: &DiffusionParams,
) -> Result<PressureState> {
    s.check_len(grid, "source field")?;
    state.u.check_len(grid, "pressure field")?;
    let mut stepper = DiffusionStepper::new(grid, *params, dt)?;
    let mut next = state.clone();
    stepper.step(&mut next, s)?;
    Ok(next)
}

/// Rate of the most recent step [MPa/hr].
pub fn pressure_rate(state: &PressureState) -> Result<&ScalarField> {
    state
        .u_t
        .as_ref()
        .ok_or_else(|| Error::State("pressure rate requested before the first step".into()))
}
