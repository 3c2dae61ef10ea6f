#![allow(dead_code)]

use seiscontrol::diffusion::{BoundaryCondition, DiffusionParams, DiffusionStepper, PressureState};
use seiscontrol::grid::{GridSpec, ReservoirGrid, ScalarField};
use seiscontrol::units::Unit;
use std::f64::consts::PI;

pub const LX: f64 = 8.0;
pub const LY: f64 = 10.0;

pub fn dirichlet() -> DiffusionParams {
    DiffusionParams {
        bc: BoundaryCondition::DirichletZero,
        ..Default::default()
    }
}

/// Full rectangle LX × LY with `nx` cells along x and 1.25·nx along y.
pub fn sine_grid(nx: usize) -> ReservoirGrid {
    let ny = nx * 5 / 4;
    ReservoirGrid::build(&GridSpec::rectangle(nx, ny, LX / nx as f64, LY / ny as f64, 0.1)).unwrap()
}

pub fn sine_mode(g: &ReservoirGrid) -> ScalarField {
    let v = (0..g.active_count())
        .map(|k| {
            let (x, y) = g.cell_centre(k);
            (PI * x / LX).sin() * (PI * y / LY).sin()
        })
        .collect();
    ScalarField::new(v, Unit::MPa)
}

/// Continuous decay rate c·π²(1/Lx² + 1/Ly²) [1/hr].
pub fn sine_rate(p: &DiffusionParams) -> f64 {
    p.c_hy * PI * PI * (1.0 / (LX * LX) + 1.0 / (LY * LY))
}

/// Integrate the unforced sine mode to `t_end` with `steps` backward-Euler
/// steps and return the final field alongside the initial one.
pub fn run_sine(nx: usize, t_end: f64, steps: usize) -> (ScalarField, ScalarField) {
    let g = sine_grid(nx);
    let p = dirichlet();
    let u0 = sine_mode(&g);
    let mut st = PressureState::from_field(u0.clone(), 0.0);
    let mut stepper = DiffusionStepper::new(&g, p, t_end / steps as f64).unwrap();
    let s = g.zeros(Unit::PerHr);
    for _ in 0..steps {
        stepper.step(&mut st, &s).unwrap();
    }
    (u0, st.u)
}

pub fn max_err(u: &ScalarField, u0: &ScalarField, factor: f64) -> f64 {
    u.values
        .iter()
        .zip(&u0.values)
        .map(|(a, b)| (a - factor * b).abs())
        .fold(0.0, f64::max)
}

/// Spatial error: reference is backward Euler in time applied to the exact
/// continuous eigenvalue, so temporal error cancels.
pub fn space_error(nx: usize, t_end: f64, steps: usize) -> f64 {
    let lam = sine_rate(&dirichlet());
    let dt = t_end / steps as f64;
    let (u0, u) = run_sine(nx, t_end, steps);
    max_err(&u, &u0, (1.0 + dt * lam).powi(-(steps as i32)))
}

/// Error against the analytical decay exp(−c π²(…) t).
pub fn analytic_error(nx: usize, t_end: f64, steps: usize) -> f64 {
    let lam = sine_rate(&dirichlet());
    let (u0, u) = run_sine(nx, t_end, steps);
    max_err(&u, &u0, (-lam * t_end).exp())
}

pub fn order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}
