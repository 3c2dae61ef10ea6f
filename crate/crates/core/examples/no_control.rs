//! Uncontrolled run on the synthetic dataset: yearly cumulative event count
//! against the expected count ∫Λ dt, and the spatially averaged rate.

use seiscontrol::calendar::iso_time;
use seiscontrol::scenario::{run, Mode, ScenarioConfig};

fn main() -> seiscontrol::Result<()> {
    let cfg = ScenarioConfig {
        mode: Mode::NoControl,
        ..ScenarioConfig::default()
    };
    let r = run(&cfg)?;
    let s = &r.series;
    println!("date        events  expected  mean R [1/km3/yr]  extracted [m3]");
    for k in (59..s.len()).step_by(600) {
        println!(
            "{}  {:>6}  {:>8.1}  {:>17.4e}  {:.4e}",
            &iso_time(s.t[k])[..10],
            s.cum_events[k],
            s.expected_cum[k],
            s.mean_r[k],
            s.extracted_cum[k]
        );
    }
    println!("total {} events, expected {:.1}", r.total_events(), r.expected_events());
    Ok(())
}
