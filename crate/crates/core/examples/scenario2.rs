//! Scenario 2: producers must deliver the historical demand exactly while
//! the controller redistributes flux through the injectors.

use seiscontrol::calendar::iso_time;
use seiscontrol::scenario::{run_prepared, Mode, Prepared, ScenarioConfig};
use seiscontrol::wells::WellRole;

fn main() -> seiscontrol::Result<()> {
    let cfg = ScenarioConfig {
        mode: Mode::Scenario2,
        ..ScenarioConfig::default()
    };
    let prep = Prepared::new(&cfg)?;
    let r = run_prepared(&prep, 0)?;
    let alloc = prep.allocation.as_ref().expect("scenario 2 has an allocation");
    let roles: Vec<WellRole> = prep.dataset.wells.iter().map(|w| w.role).collect();
    let worst = r
        .control_log
        .iter()
        .map(|c| (alloc.constraint_value(&c.q_c) - c.target.unwrap()).abs() / c.target.unwrap().abs().max(1.0))
        .fold(0.0, f64::max);
    println!(
        "{} events; worst relative constraint error {worst:.2e}",
        r.total_events()
    );
    println!("date        demand [m3/month]  producers     injectors     sigma");
    for c in r.control_log.iter().step_by(36) {
        let by_role = |role| {
            c.q_applied
                .iter()
                .zip(&roles)
                .filter(|(_, r)| **r == role)
                .map(|(q, _)| q)
                .sum::<f64>()
        };
        println!(
            "{}  {:>17.4e}  {:>12.4e}  {:>12.4e}  {:.4e}",
            &iso_time(c.t)[..10],
            -c.target.unwrap(),
            by_role(WellRole::Producer),
            by_role(WellRole::Injector),
            c.sigma
        );
    }
    Ok(())
}
