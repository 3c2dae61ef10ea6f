//! A single producer drains a rectangular reservoir for a year; prints the
//! pressure drawdown at the well and the mean pressure month by month.

use seiscontrol::diffusion::{DiffusionParams, DiffusionStepper, PressureState};
use seiscontrol::grid::{GridSpec, ReservoirGrid};
use seiscontrol::units::{Unit, HOURS_PER_MONTH};
use seiscontrol::wells::{WellRole, WellSet, WellSpec};

fn main() -> seiscontrol::Result<()> {
    let grid = ReservoirGrid::build(&GridSpec::rectangle(40, 50, 0.8, 0.8, 0.05))?;
    let spec = WellSpec {
        id: "P1".into(),
        x: 16.0,
        y: 20.0,
        q_min: -1e6,
        q_max: 0.0,
        role: WellRole::Producer,
        footprint_radius: None,
    };
    let wells = WellSet::resolve(&grid, &[spec])?;
    let well_cell = wells.wells()[0].footprint[0];

    let dt = HOURS_PER_MONTH / 10.0;
    let mut stepper = DiffusionStepper::new(&grid, DiffusionParams::default(), dt)?;
    let mut state = PressureState::at_rest(&grid);
    let mut source = grid.zeros(Unit::PerHr);
    wells.source_into(&[-2.0e5], &mut source.values)?;

    println!("month  u_well [MPa]  mean u [MPa]  PCG iters");
    for month in 1..=12 {
        for _ in 0..10 {
            stepper.step(&mut state, &source)?;
        }
        let iters = stepper.last_stats.map(|s| s.iterations).unwrap_or(0);
        println!(
            "{month:>5}  {:>12.4e}  {:>12.4e}  {iters:>9}",
            state.u.values[well_cell],
            state.u.mean()
        );
    }
    Ok(())
}
