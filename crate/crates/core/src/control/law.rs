//! Super-twisting feedback law with saturation and leakage anti-windup.
//!
//! The command is Q_c = B0⁺·(−k1⌈σ⌋^{1/(1−l)} + ν) with
//! ν' = −k2⌈σ⌋^{(1+l)/(1−l)} − k3·ρ·ν, where ⌈x⌋^p = |x|^p·sign(x).
//! l = −1 is the classical super-twisting algorithm, l = 0 a linear
//! proportional-integral law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{km3_per_hr_to_m3_per_month, m3_per_month_to_km3_per_hr, HOURS_PER_YEAR};
use crate::wells::WellSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub l: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Gains {
            k1: 6.7e-4,
            k2: 2.2e-7,
            k3: 36.05,
            l: -1.0,
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::config(format!(
                "gains k1, k2 must be positive, got {}, {}",
                self.k1, self.k2
            )));
        }
        if !(self.k3 > 1.0) {
            return Err(Error::config(format!("gain k3 must exceed 1, got {}", self.k3)));
        }
        if !(-1.0..=0.0).contains(&self.l) {
            return Err(Error::config(format!("l must lie in [-1, 0], got {}", self.l)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub gains: Gains,
    /// Error normalization γ1_0.
    pub gamma1_0: f64,
    /// Reservoir background rate R*_0 [events/yr].
    pub r_star_0: f64,
    /// Nominal compressibility β0 [1/MPa].
    pub beta_0: f64,
    /// Reservoir volume V [km³].
    pub volume: f64,
    /// B0⁺ = −(β0·V/n)·ones [km³/MPa].
    pub b0_pinv: Vec<f64>,
}

impl ControllerConfig {
    pub fn new(gains: Gains, gamma1_0: f64, r_star_0: f64, beta_0: f64, volume: f64, n_wells: usize) -> Result<Self> {
        gains.validate()?;
        for (name, v) in [
            ("gamma1_0", gamma1_0),
            ("R*_0", r_star_0),
            ("beta_0", beta_0),
            ("volume", volume),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if n_wells == 0 {
            return Err(Error::config("controller needs at least one well"));
        }
        Ok(ControllerConfig {
            gains,
            gamma1_0,
            r_star_0,
            beta_0,
            volume,
            b0_pinv: vec![-beta_0 * volume / n_wells as f64; n_wells],
        })
    }

    /// Entries of the row B0 = −1/(β0·V)·ones [MPa/km³].
    pub fn b0_entry(&self) -> f64 {
        -1.0 / (self.beta_0 * self.volume)
    }

    /// R*_0 in measurement units, events/(km³·hr).
    pub fn r_star_0_measured(&self) -> f64 {
        self.r_star_0 / (self.volume * HOURS_PER_YEAR)
    }

    pub fn b0_pinv_norm_inf(&self) -> f64 {
        self.b0_pinv.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub nu: f64,
    pub rho: f64,
    pub last_sigma: f64,
    /// Command currently held [m³/month].
    pub q_c_held: Vec<f64>,
}

impl ControllerState {
    pub fn new(n_wells: usize) -> Self {
        ControllerState {
            nu: 0.0,
            rho: 0.0,
            last_sigma: 0.0,
            q_c_held: vec![0.0; n_wells],
        }
    }
}

/// ⌈x⌋^p = |x|^p·sign(x), with sign(0) = 0.
pub fn signed_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(p) * x.signum()
    }
}

/// σ = (y_R − r_R)/(γ1_0·R*_0).
pub fn tracking_error(y_r: f64, r_r: f64, gamma1_0: f64, r_star_0: f64) -> f64 {
    (y_r - r_r) / (gamma1_0 * r_star_0)
}

/// Scalar law output −k1⌈σ⌋^{1/(1−l)} + ν [MPa/hr].
pub fn law_output(g: &Gains, sigma: f64, nu: f64) -> f64 {
    -g.k1 * signed_pow(sigma, 1.0 / (1.0 - g.l)) + nu
}

/// One explicit Euler step of ν.
pub fn nu_step(g: &Gains, sigma: f64, nu: f64, rho: f64, dt_c: f64) -> f64 {
    nu + dt_c * (-g.k2 * signed_pow(sigma, (1.0 + g.l) / (1.0 - g.l)) - g.k3 * rho * nu)
}

/// Command for the coming interval and the advanced state. Q_c uses the
/// current ν; ν then advances with the ρ left by the previous interval.
pub fn control_update(
    cfg: &ControllerConfig,
    state: &ControllerState,
    sigma: f64,
    dt_c: f64,
) -> (Vec<f64>, ControllerState) {
    let u = law_output(&cfg.gains, sigma, state.nu);
    let q: Vec<f64> = cfg.b0_pinv.iter().map(|b| km3_per_hr_to_m3_per_month(b * u)).collect();
    let next = ControllerState {
        nu: nu_step(&cfg.gains, sigma, state.nu, state.rho, dt_c),
        rho: state.rho,
        last_sigma: sigma,
        q_c_held: q.clone(),
    };
    (q, next)
}

/// Per-well flux limits [m³/month].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn from_wells(wells: &WellSet) -> Self {
        Bounds {
            lower: wells.lower_bounds(),
            upper: wells.upper_bounds(),
        }
    }

    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Bounds {
            lower: vec![lower; n],
            upper: vec![upper; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        q.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// Component-wise clamp to the well limits.
pub fn saturate(q: &[f64], bounds: &Bounds) -> Vec<f64> {
    q.iter()
        .zip(bounds.lower.iter().zip(&bounds.upper))
        .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
        .collect()
}

/// Smallest admissible-range width [km³/hr] over wells whose requested flux
/// touches or crosses a limit; `None` when every well is strictly inside.
pub fn violated_width(q_presat: &[f64], bounds: &Bounds) -> Result<Option<f64>> {
    let mut min_w: Option<f64> = None;
    for (i, v) in q_presat.iter().enumerate() {
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        if *v <= lo || *v >= hi {
            let w = hi - lo;
            if !(w > 0.0) {
                return Err(Error::config(format!("well {i} has an empty flux range")));
            }
            let w = m3_per_month_to_km3_per_hr(w);
            min_w = Some(min_w.map_or(w, |m| m.min(w)));
        }
    }
    Ok(min_w)
}

/// ρ = 0 without saturation, else k2·‖B0⁺‖∞ / min |Q_M − Q_m| over the
/// saturated wells.
pub fn anti_windup_rho(q_presat: &[f64], bounds: &Bounds, cfg: &ControllerConfig) -> Result<f64> {
    Ok(match violated_width(q_presat, bounds)? {
        None => 0.0,
        Some(w) => cfg.gains.k2 * cfg.b0_pinv_norm_inf() / w,
    })
}
