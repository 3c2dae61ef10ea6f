//! Generate the synthetic Groningen-like dataset and write it as CSV files
//! into the directory given as the first argument (default: synth_data).

use seiscontrol::calendar::month_label;
use seiscontrol::dataset::{synth_groningen, write_density, write_extraction, write_wells};
use seiscontrol::wells::WellRole;

fn main() -> seiscontrol::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "synth_data".into());
    let dir = std::path::Path::new(&dir);
    std::fs::create_dir_all(dir).map_err(|e| seiscontrol::Error::Io {
        path: dir.into(),
        source: e,
    })?;
    let ds = synth_groningen(1)?;
    let producers = ds.wells.iter().filter(|w| w.role == WellRole::Producer).count();
    println!(
        "{} active cells of {}x{}, volume {:.4} km3, {} wells ({producers} producers)",
        ds.grid.active_count(),
        ds.grid.nx(),
        ds.grid.ny(),
        ds.grid.total_volume(),
        ds.wells.len()
    );
    let h = &ds.extraction;
    let total: f64 = h.total.iter().sum();
    println!(
        "extraction {} .. {}, total {total:.4e} m3",
        month_label(h.start_month),
        month_label(h.end_month() - 1)
    );
    for year in [1966, 1976, 1990, 2013, 2020] {
        let m = seiscontrol::calendar::month_index(year, 1);
        println!("  {year}-01: {:.4e} m3/month", h.at_month(m));
    }
    write_wells(&dir.join("wells.csv"), &ds.wells, &ds.shares)?;
    write_extraction(&dir.join("extraction.csv"), &ds.extraction)?;
    write_density(&dir.join("density.csv"), &ds.grid, &ds.density)?;
    println!("wrote wells.csv, extraction.csv, density.csv to {}", dir.display());
    Ok(())
}
