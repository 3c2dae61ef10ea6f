//! Write a result bundle twice for the same config and seed and check that
//! the manifests agree and every listed file matches its hash.

use seiscontrol::bundle::{verify_bundle, write_bundle};
use seiscontrol::scenario::{run_prepared, Prepared, ScenarioConfig};

fn main() -> seiscontrol::Result<()> {
    let out = std::env::temp_dir().join("seiscontrol_bundle_example");
    let cfg = ScenarioConfig {
        seed: 42,
        ..ScenarioConfig::default()
    };
    let mut manifests = Vec::new();
    for copy in ["a", "b"] {
        let prep = Prepared::new(&cfg)?;
        let r = run_prepared(&prep, 0)?;
        let dir = out.join(copy);
        manifests.push(write_bundle(&dir, &cfg, &r, &prep.dataset.grid.content_hash())?);
        println!(
            "{}: {} events, modified files after write: {:?}",
            dir.display(),
            r.total_events(),
            verify_bundle(&dir)?
        );
    }
    for f in &manifests[0].outputs {
        println!("  {:<20} {}", f.path, f.sha256);
    }
    println!("manifests identical: {}", manifests[0] == manifests[1]);
    Ok(())
}
