//! Normalized seismicity-rate dynamics.
//!
//! Each cell obeys Rn' = Rn·(γ2·(1 − Rn) − γ1·u_t). With u_t frozen over a
//! step this is a logistic (Bernoulli) equation with a closed-form solution,
//! which is what [`step_sr`] uses. The result is positive for any step size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ReservoirGrid, ScalarField};
use crate::units::Unit;

/// Scalar constants from which [`SRParams`] fields are built as multiples of
/// the spatial density d(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SRConstants {
    /// γ1 = gamma1_scale·d(x) [1/MPa].
    pub gamma1_scale: f64,
    /// γ2 [1/hr].
    pub gamma2: f64,
    /// R* = r_star_0·d(x) [events/(km³·yr)].
    pub r_star_0: f64,
}

impl Default for SRConstants {
    fn default() -> Self {
        SRConstants {
            gamma1_scale: 3.7,
            gamma2: 4.67e-8,
            r_star_0: 4.11e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SRParams {
    /// Coulomb coupling γ1(x) [1/MPa].
    pub gamma1: ScalarField,
    /// Inverse aftershock duration γ2 [1/hr].
    pub gamma2: f64,
    /// Background rate density R*(x) [events/(km³·yr)].
    pub r_star: ScalarField,
}

impl SRParams {
    /// γ1 = c.gamma1_scale·d, R* = c.r_star_0·d.
    pub fn from_density(d: &ScalarField, c: &SRConstants) -> Result<Self> {
        if d.values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::config("density d(x) must be finite and nonnegative"));
        }
        let p = SRParams {
            gamma1: d.scaled(c.gamma1_scale, Unit::PerMPa),
            gamma2: c.gamma2,
            r_star: d.scaled(c.r_star_0, Unit::EventsPerKm3Year),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma2 > 0.0 && self.gamma2.is_finite()) {
            return Err(Error::config(format!("gamma2 must be positive, got {}", self.gamma2)));
        }
        if self.gamma1.len() != self.r_star.len() {
            return Err(Error::config("gamma1 and R* fields differ in length"));
        }
        if self.gamma1.values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::config("gamma1 must be nonnegative"));
        }
        if self.r_star.values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::config("R* must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SRState {
    pub rn: ScalarField,
    /// [hr]
    pub t: f64,
}

impl SRState {
    /// Background equilibrium Rn ≡ 1.
    pub fn background(grid: &ReservoirGrid) -> Self {
        SRState {
            rn: ScalarField::constant(grid.active_count(), 1.0, Unit::Dimensionless),
            t: 0.0,
        }
    }
}

/// Exact solution of Rn' = c·Rn − γ2·Rn² over `dt` from `rn0 > 0`.
#[inline]
pub fn logistic_step(rn0: f64, c: f64, gamma2: f64, dt: f64) -> f64 {
    let r = if c > 0.0 {
        let e = (-c * dt).exp();
        // (1 − e^{−c dt})/c
        let phi = -(-c * dt).exp_m1() / c;
        rn0 / (e + rn0 * gamma2 * phi)
    } else {
        let em1 = (c * dt).exp_m1();
        let phi = if c == 0.0 { dt } else { em1 / c };
        rn0 * (1.0 + em1) / (1.0 + rn0 * gamma2 * phi)
    };
    r.max(f64::MIN_POSITIVE)
}

/// Advance the normalized rate by one step with u_t frozen.
pub fn step_sr(state: &SRState, u_t: &ScalarField, dt: f64, params: &SRParams) -> Result<SRState> {
    let mut next = state.clone();
    step_sr_in_place(&mut next, u_t, dt, params)?;
    Ok(next)
}

pub fn step_sr_in_place(state: &mut SRState, u_t: &ScalarField, dt: f64, params: &SRParams) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config(format!("time step must be positive, got {dt}")));
    }
    let n = state.rn.len();
    if u_t.len() != n || params.gamma1.len() != n {
        return Err(Error::config(format!(
            "field length mismatch: Rn {}, u_t {}, gamma1 {}",
            n,
            u_t.len(),
            params.gamma1.len()
        )));
    }
    if let Some(k) = u_t.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::numerical(
            state.t,
            format!("non-finite pressure rate in cell {k}"),
        ));
    }
    let g2 = params.gamma2;
    for ((r, &ut), &g1) in state.rn.values.iter_mut().zip(&u_t.values).zip(&params.gamma1.values) {
        *r = logistic_step(*r, g2 - g1 * ut, g2, dt);
    }
    state.t += dt;
    Ok(())
}

/// R = Rn·R* [events/(km³·yr)].
pub fn unnormalized_sr(state: &SRState, params: &SRParams) -> ScalarField {
    let values = state
        .rn
        .values
        .iter()
        .zip(&params.r_star.values)
        .map(|(r, s)| r * s)
        .collect();
    ScalarField::new(values, Unit::EventsPerKm3Year)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: usize, g1: f64) -> SRParams {
        SRParams {
            gamma1: ScalarField::constant(n, g1, Unit::PerMPa),
            gamma2: 4.67e-8,
            r_star: ScalarField::constant(n, 4.11e-5, Unit::EventsPerKm3Year),
        }
    }

    fn state(v: &[f64]) -> SRState {
        SRState {
            rn: ScalarField::new(v.to_vec(), Unit::Dimensionless),
            t: 0.0,
        }
    }

    fn rates(v: f64, n: usize) -> ScalarField {
        ScalarField::constant(n, v, Unit::MPaPerHr)
    }

    #[test]
    fn background_is_a_fixed_point() {
        let p = params(3, 3.7);
        let mut s = state(&[1.0; 3]);
        for _ in 0..1000 {
            step_sr_in_place(&mut s, &rates(0.0, 3), 73.05, &p).unwrap();
        }
        assert!(s.rn.values.iter().all(|&r| r == 1.0));
    }

    #[test]
    fn relaxes_without_crossing_one() {
        let p = params(2, 3.7);
        let mut s = state(&[2.0, 0.3]);
        let mut prev = s.rn.values.clone();
        for _ in 0..200 {
            step_sr_in_place(&mut s, &rates(0.0, 2), 1e6, &p).unwrap();
            assert!(s.rn.values[0] >= 1.0 && s.rn.values[0] <= prev[0]);
            assert!(s.rn.values[1] <= 1.0 && s.rn.values[1] >= prev[1]);
            prev = s.rn.values.clone();
        }
    }

    #[test]
    fn logistic_steady_state_under_constant_extraction() {
        let g1 = 3.7 * 1.2;
        let p = params(1, g1);
        let pr = 1.5e-6;
        let target = 1.0 + g1 / p.gamma2 * pr;
        let mut s = state(&[1.0]);
        // c ≈ γ1 p ≈ 6.7e-6 /hr; 4e6 hr is ~27 e-folds
        for _ in 0..400 {
            step_sr_in_place(&mut s, &rates(-pr, 1), 1e4, &p).unwrap();
        }
        assert!((s.rn.values[0] - target).abs() / target < 1e-6);
    }

    #[test]
    fn exact_step_matches_fine_rk4() {
        // Time-varying forcing; the coarse step freezes u_t at the midpoint.
        let g1 = 3.7 * 2.0;
        let p = params(1, g1);
        let ut = |t: f64| -2e-6 * (1.0 + 0.5 * (2.0 * std::f64::consts::PI * t / 8766.0).sin());
        let f = |r: f64, t: f64| r * (p.gamma2 * (1.0 - r) - g1 * ut(t));
        let dt = 73.05;
        let steps = 3000;
        let mut coarse = state(&[1.0]);
        let mut r = 1.0f64;
        let h = dt / 100.0;
        let mut t = 0.0;
        for k in 0..steps {
            let tm = (k as f64 + 0.5) * dt;
            step_sr_in_place(&mut coarse, &rates(ut(tm), 1), dt, &p).unwrap();
            for _ in 0..100 {
                let k1 = f(r, t);
                let k2 = f(r + 0.5 * h * k1, t + 0.5 * h);
                let k3 = f(r + 0.5 * h * k2, t + 0.5 * h);
                let k4 = f(r + h * k3, t + h);
                r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            let rel = (coarse.rn.values[0] - r).abs() / r;
            assert!(rel <= 1e-4, "step {k}: rel err {rel:e}");
        }
        assert!(r > 10.0);
    }

    #[test]
    fn large_injection_rate_stays_positive() {
        let p = params(1, 1e3);
        let s = step_sr(&state(&[1.0]), &rates(1.0, 1), 1e4, &p).unwrap();
        assert!(s.rn.values[0] > 0.0);
    }

    #[test]
    fn rejects_non_finite_rate() {
        let p = params(2, 3.7);
        let e = step_sr(
            &state(&[1.0, 1.0]),
            &ScalarField::new(vec![0.0, f64::NAN], Unit::MPaPerHr),
            1.0,
            &p,
        );
        assert!(matches!(e, Err(Error::Numerical { .. })));
    }

    #[test]
    fn unnormalized_scales_background() {
        let p = params(2, 3.7);
        assert_eq!(unnormalized_sr(&state(&[1.0, 1.0]), &p).values, p.r_star.values);
        let half = unnormalized_sr(&state(&[0.5, 0.5]), &p);
        assert_eq!(half.values, vec![0.5 * 4.11e-5; 2]);
    }

    proptest! {
        #[test]
        fn positive_for_any_forcing(r0 in 1e-6f64..1e3, ut in -1e-2f64..1e-2, dt in 1e-3f64..1e6) {
            let p = params(1, 5.0);
            let s = step_sr(&state(&[r0]), &rates(ut, 1), dt, &p).unwrap();
            prop_assert!(s.rn.values[0] > 0.0 && s.rn.values[0].is_finite());
        }

        #[test]
        fn more_extraction_raises_rate(r0 in 1e-3f64..1e2, ut in -1e-4f64..1e-4, d in 1e-9f64..1e-5, dt in 1.0f64..1e4) {
            let p = params(1, 5.0);
            let a = step_sr(&state(&[r0]), &rates(ut, 1), dt, &p).unwrap().rn.values[0];
            let b = step_sr(&state(&[r0]), &rates(ut - d, 1), dt, &p).unwrap().rn.values[0];
            prop_assert!(b >= a);
        }
    }
}
