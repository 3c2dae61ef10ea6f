//! Seismicity-rate response of one cell to a constant depletion rate p that
//! is switched off later. Rn climbs to 1 + (γ1/γ2)p and relaxes back to 1.
//! Time is reported in units of the aftershock duration 1/γ2.

use seiscontrol::grid::{GridSpec, ReservoirGrid, ScalarField};
use seiscontrol::seismicity::{step_sr_in_place, SRConstants, SRParams, SRState};
use seiscontrol::units::Unit;

fn main() -> seiscontrol::Result<()> {
    let grid = ReservoirGrid::build(&GridSpec::rectangle(3, 3, 1.0, 1.0, 0.1))?;
    let d = ScalarField::constant(grid.active_count(), 1.0 / grid.total_volume(), Unit::Dimensionless);
    let params = SRParams::from_density(&d, &SRConstants::default())?;
    let p = 2e-8;
    let g1 = params.gamma1.values[0];
    let steady = 1.0 + g1 / params.gamma2 * p;
    println!(
        "gamma1 = {g1:.3} 1/MPa, 1/gamma2 = {:.0} yr, steady state {steady:.4}",
        1.0 / params.gamma2 / 8766.0
    );

    let mut st = SRState::background(&grid);
    let dt = 0.05 / params.gamma2;
    let on = ScalarField::constant(grid.active_count(), -p, Unit::MPaPerHr);
    let off = grid.zeros(Unit::MPaPerHr);
    println!("t*gamma2  forcing  Rn");
    for k in 1..=240 {
        let forcing = if k <= 120 { &on } else { &off };
        step_sr_in_place(&mut st, forcing, dt, &params)?;
        if k % 20 == 0 {
            let label = if k <= 120 { "on" } else { "off" };
            println!("{:>8.1}  {label:<7}  {:.6}", k as f64 * 0.05, st.rn.values[0]);
        }
    }
    Ok(())
}
