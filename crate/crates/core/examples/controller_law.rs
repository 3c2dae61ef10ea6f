//! The super-twisting law driven by a constant tracking error, with and
//! without saturation. Under saturation the anti-windup leakage holds ν at
//! the fixed point −k2·sign(σ)/(k3·ρ) instead of letting it grow. ν is
//! stepped with explicit Euler, which needs k3·ρ·Δt_c < 2.

use seiscontrol::control::{
    anti_windup_rho, control_update, saturate, Bounds, ControllerConfig, ControllerState, Gains,
};

fn main() -> seiscontrol::Result<()> {
    let gains = Gains::default();
    let n = 4;
    let cfg = ControllerConfig::new(gains, 1.35e7, 4.11e-5, 0.8 * 5.7e-4, 0.8, n)?;
    let dt_c = 730.5;
    let sigma = 0.05;
    let wide = Bounds::uniform(n, -1e9, 1e9);
    let tight = Bounds::uniform(n, -8e5, 0.0);

    let rho = anti_windup_rho(&[1.0; 4], &tight, &cfg)?;
    println!(
        "saturated: rho = {rho:.4e}, k3*rho*dt_c = {:.3}, leakage fixed point nu* = {:.5e}",
        gains.k3 * rho * dt_c,
        -gains.k2 / (gains.k3 * rho)
    );
    for (name, bounds) in [("unsaturated", &wide), ("saturated", &tight)] {
        let mut st = ControllerState::new(n);
        println!("{name}");
        println!("  step  nu            rho           Q_c[0] m3/month  applied");
        for k in 0..=120 {
            let (q, mut next) = control_update(&cfg, &st, sigma, dt_c);
            next.rho = anti_windup_rho(&q, bounds, &cfg)?;
            if k % 20 == 0 {
                let applied = saturate(&q, bounds);
                println!(
                    "  {k:>4}  {:<12.5e}  {:<12.5e}  {:<15.4e}  {:.4e}",
                    st.nu, st.rho, q[0], applied[0]
                );
            }
            st = next;
        }
    }
    Ok(())
}
