//! Sampled-data seismicity controller.
//!
//! At each sampling instant the events of the past interval become a raw
//! rate estimate, the EMA filter smooths it, the normalized tracking error
//! feeds the super-twisting law, and the resulting well command is held
//! until the next instant. Saturation seen while the command is held sets
//! the leakage coefficient ρ used at the next update.

mod allocation;
mod converter;
mod law;
mod zoh;

pub use allocation::{constrained_control_update, null_space_basis, ConstrainedAllocation};
pub use converter::{ema_alpha, ema_update, raw_sr_estimate, ConverterState};
pub use law::{
    anti_windup_rho, control_update, law_output, nu_step, saturate, signed_pow, tracking_error, violated_width, Bounds,
    ControllerConfig, ControllerState, Gains,
};
pub use zoh::{zoh_hold, SampleSchedule, ZeroOrderHold};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of the controller log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlRecord {
    /// Sampling instant [hr].
    pub t: f64,
    pub n_events: u64,
    pub y_hat: f64,
    pub y_r: f64,
    pub sigma: f64,
    /// ν used for this command (before the update).
    pub nu: f64,
    pub rho: f64,
    /// Demand constraint value, when constrained [m³/month].
    pub target: Option<f64>,
    pub q_c: Vec<f64>,
    /// Flux applied on the first substep after the instant [m³/month].
    pub q_applied: Vec<f64>,
}

/// Converter, law and anti-windup bookkeeping for one simulation.
#[derive(Debug, Clone)]
pub struct Controller {
    pub cfg: ControllerConfig,
    pub state: ControllerState,
    pub converter: ConverterState,
    pub allocation: Option<ConstrainedAllocation>,
    /// Narrowest saturated range seen since the last update [km³/hr].
    pending_width: Option<f64>,
}

impl Controller {
    pub fn new(cfg: ControllerConfig, tau: f64, allocation: Option<ConstrainedAllocation>) -> Self {
        let n = cfg.b0_pinv.len();
        Controller {
            cfg,
            state: ControllerState::new(n),
            converter: ConverterState::new(tau),
            allocation,
            pending_width: None,
        }
    }

    /// Record a pre-saturation flux applied during the current interval.
    pub fn observe(&mut self, q_presat: &[f64], bounds: &Bounds) -> Result<bool> {
        let w = violated_width(q_presat, bounds)?;
        if let Some(w) = w {
            self.pending_width = Some(self.pending_width.map_or(w, |p| p.min(w)));
        }
        Ok(w.is_some())
    }

    /// Sampling instant: consume the interval's event count and return the
    /// command to hold [m³/month]. `r_r` is the reference in events/(km³·hr);
    /// `target` is the demand W·Q_c must meet in constrained mode.
    pub fn sample(&mut self, t: f64, n_events: u64, dt_c: f64, r_r: f64, target: Option<f64>) -> ControlRecord {
        self.state.rho = match self.pending_width.take() {
            None => 0.0,
            Some(w) => self.cfg.gains.k2 * self.cfg.b0_pinv_norm_inf() / w,
        };
        let y_hat = raw_sr_estimate(n_events, self.cfg.volume, dt_c);
        self.converter = ema_update(&self.converter, y_hat, dt_c);
        let sigma = tracking_error(self.converter.y_r, r_r, self.cfg.gamma1_0, self.cfg.r_star_0_measured());
        let nu = self.state.nu;
        let (q, next) = match (&self.allocation, target) {
            (Some(a), Some(f)) => constrained_control_update(&self.cfg, a, &self.state, sigma, f, dt_c),
            _ => control_update(&self.cfg, &self.state, sigma, dt_c),
        };
        self.state = next;
        ControlRecord {
            t,
            n_events,
            y_hat,
            y_r: self.converter.y_r,
            sigma,
            nu,
            rho: self.state.rho,
            target: if self.allocation.is_some() { target } else { None },
            q_c: q,
            q_applied: Vec::new(),
        }
    }
}
