//! Draw a catalog from a fixed two-blob seismicity-rate field and re-estimate
//! the Gutenberg-Richter parameters from it.

use seiscontrol::catalog::{estimate_b, exceedance_table, generate_catalog, GRParams, IntensityWindow};
use seiscontrol::grid::{GridSpec, ReservoirGrid};
use seiscontrol::rng::{stream, Purpose};

fn main() -> seiscontrol::Result<()> {
    let grid = ReservoirGrid::build(&GridSpec::rectangle(30, 30, 1.0, 1.0, 0.1))?;
    let r: Vec<f64> = (0..grid.active_count())
        .map(|k| {
            let (x, y) = grid.cell_centre(k);
            let blob = |cx: f64, cy: f64, s: f64| (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp();
            1e-3 * (blob(10.0, 12.0, 3.0) + 0.5 * blob(21.0, 19.0, 2.0))
        })
        .collect();
    let windows: Vec<IntensityWindow> = (0..120)
        .map(|m| IntensityWindow::new(&grid, m as f64 * 730.5, (m + 1) as f64 * 730.5, &r, &r))
        .collect::<Result<_, _>>()?;
    let expected: f64 = windows.iter().map(|w| w.expected_count()).sum();
    let gr = GRParams::default();
    let mut rng = stream(3, 0, Purpose::Test, 0);
    let catalog = generate_catalog(&grid, &windows, &gr, &mut rng)?;
    println!("{} events over ten years (expected {expected:.1})", catalog.len());

    let west = catalog.events.iter().filter(|e| e.x < 15.0).count();
    println!("west half {west}, east half {}", catalog.len() - west);

    let (a, b) = estimate_b(&catalog, gr.m_c)?;
    println!("a_hat = {a:.3}, b_hat = {b:.3} (true b = {})", gr.b);
    println!("M     N(>=M)");
    for (m, n) in exceedance_table(&catalog, gr.m_c, 0.25) {
        println!("{m:<5.2} {n}");
    }
    Ok(())
}
