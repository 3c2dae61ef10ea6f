//! Event counts to a filtered seismicity-rate measurement.

use serde::{Deserialize, Serialize};

/// n/(V·Δt_c) [events/(km³·hr)].
pub fn raw_sr_estimate(n_events: u64, volume: f64, dt_c: f64) -> f64 {
    n_events as f64 / (volume * dt_c)
}

/// α = 1 − e^{−Δt_c/τ}; τ = 0 means no smoothing.
pub fn ema_alpha(dt_c: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        1.0
    } else {
        -(-dt_c / tau).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverterState {
    /// Filtered rate y_R [events/(km³·hr)].
    pub y_r: f64,
    /// EMA time constant τ [hr].
    pub tau: f64,
}

impl ConverterState {
    pub fn new(tau: f64) -> Self {
        ConverterState { y_r: 0.0, tau }
    }
}

/// y_R ← (1 − α)·y_R + α·ŷ.
pub fn ema_update(state: &ConverterState, y_hat: f64, dt_c: f64) -> ConverterState {
    let a = ema_alpha(dt_c, state.tau);
    ConverterState {
        y_r: (1.0 - a) * state.y_r + a * y_hat,
        tau: state.tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_estimate() {
        assert_eq!(raw_sr_estimate(0, 10.0, 730.5), 0.0);
        assert_eq!(raw_sr_estimate(10, 10.0, 730.5), 10.0 / (10.0 * 730.5));
        assert_eq!(
            raw_sr_estimate(10, 10.0, 1461.0),
            0.5 * raw_sr_estimate(10, 10.0, 730.5)
        );
    }

    #[test]
    fn alpha_values() {
        assert!((ema_alpha(730.5, 730.5) - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(ema_alpha(730.5, 0.0), 1.0);
        let s = ema_update(&ConverterState { y_r: 3.0, tau: 0.0 }, 7.0, 1.0);
        assert_eq!(s.y_r, 7.0);
    }

    #[test]
    fn geometric_convergence() {
        let mut s = ConverterState::new(730.5);
        let a = ema_alpha(730.5, 730.5);
        for k in 1..30 {
            s = ema_update(&s, 2.0, 730.5);
            let expected = 2.0 * (1.0 - (1.0 - a).powi(k));
            assert!((s.y_r - expected).abs() < 1e-14);
        }
    }
}
