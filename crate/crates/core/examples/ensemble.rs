//! 100 uncontrolled catalogs drawn from one intensity history: the ensemble
//! mean converges to ∫Λ dt and the spread grows like its square root.

use seiscontrol::calendar::iso_time;
use seiscontrol::scenario::{run_ensemble, Mode, Prepared, ScenarioConfig};

fn main() -> seiscontrol::Result<()> {
    let cfg = ScenarioConfig {
        mode: Mode::NoControl,
        ..ScenarioConfig::default()
    };
    let prep = Prepared::new(&cfg)?;
    let t = std::time::Instant::now();
    let ens = run_ensemble(&prep, 100)?;
    let s = &ens.stats;
    println!("100 runs in {:.1?}", t.elapsed());
    println!("date        mean     std    sqrt(mean)  expected");
    for k in (599..s.t.len()).step_by(600) {
        println!(
            "{}  {:>7.1}  {:>5.1}  {:>10.1}  {:>8.1}",
            &iso_time(s.t[k])[..10],
            s.mean[k],
            s.std[k],
            s.mean[k].sqrt(),
            s.expected[k]
        );
    }
    println!("terminal |mean - expected| = {:.2} standard errors", s.terminal_z());
    Ok(())
}
