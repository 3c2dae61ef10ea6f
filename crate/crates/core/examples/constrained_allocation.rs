//! Null-space allocation: five producers must deliver a fixed total while
//! the regulation term moves flux only through the four injectors.

use seiscontrol::control::{
    constrained_control_update, ConstrainedAllocation, ControllerConfig, ControllerState, Gains,
};

fn main() -> seiscontrol::Result<()> {
    let n = 9;
    let cfg = ControllerConfig::new(Gains::default(), 1.35e7, 4.11e-5, 0.8 * 5.7e-4, 0.8, n)?;
    let w: Vec<f64> = (0..n).map(|i| if i < 5 { 1.0 } else { 0.0 }).collect();
    let alloc = ConstrainedAllocation::new(w, &cfg)?;
    let residual = alloc.w_bar.transpose() * nalgebra::DVector::from_vec(alloc.w.clone());
    println!(
        "null-space basis {}x{}, |W W_bar| = {:.1e}",
        alloc.w_bar.nrows(),
        alloc.w_bar.ncols(),
        residual.amax()
    );

    let demand = -3.0e5;
    let mut st = ControllerState::new(n);
    for sigma in [0.0, 0.02, 0.1, -0.05] {
        let (q, next) = constrained_control_update(&cfg, &alloc, &st, sigma, demand, 730.5);
        let total = alloc.constraint_value(&q);
        let q_fmt: Vec<String> = q.iter().map(|v| format!("{v:.0}")).collect();
        println!(
            "sigma {sigma:>5}: W.Q = {total:.6e} (demand {demand:e}), Q = [{}]",
            q_fmt.join(", ")
        );
        st = next;
    }
    Ok(())
}
