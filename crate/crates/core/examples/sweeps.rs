//! Scenario-1 sweeps over the leakage gain k3 and the control period.

use seiscontrol::scenario::{spearman, sweep_dtc, sweep_k3, ScenarioConfig};
use seiscontrol::units::HOURS_PER_MONTH;

fn main() -> seiscontrol::Result<()> {
    let cfg = ScenarioConfig::default();
    let k3 = [5.0, 10.0, 20.0, 36.05, 60.0];
    let rows = sweep_k3(&cfg, &k3)?;
    println!("k3      extracted [m3]  events");
    for r in &rows {
        println!("{:<6}  {:<14.4e}  {}", r.k3, r.extracted_volume, r.total_events);
    }
    let vol: Vec<f64> = rows.iter().map(|r| r.extracted_volume).collect();
    let ev: Vec<f64> = rows.iter().map(|r| r.total_events as f64).collect();
    println!(
        "spearman(k3, volume) = {:.2}, spearman(volume, events) = {:.2}",
        spearman(&k3, &vol),
        spearman(&vol, &ev)
    );

    let months = [1.0, 3.0, 6.0, 12.0];
    let rows = sweep_dtc(&cfg, &months.map(|m| m * HOURS_PER_MONTH))?;
    println!("dt_c [months]  events  mean |sigma|");
    for (m, r) in months.iter().zip(&rows) {
        println!("{m:<13}  {:<6}  {:.4e}", r.total_events, r.mean_abs_sigma);
    }
    Ok(())
}
