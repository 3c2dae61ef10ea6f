//! Production-constrained allocation.
//!
//! With a demand constraint W·Q = f, the command splits into a
//! constraint-invisible part in null(W) that carries the regulation and a
//! minimum-norm particular solution Wᵀ(WWᵀ)⁻¹f:
//! Q_c = W̄(B0·W̄)⁺·(−k1⌈σ⌋^{1/(1−l)} + ν) + Wᵀ(WWᵀ)⁻¹·f.

use nalgebra::{DMatrix, DVector};

use super::law::{law_output, nu_step, ControllerConfig, ControllerState};
use crate::error::{Error, Result};
use crate::units::km3_per_hr_to_m3_per_month;

/// Orthonormal basis of null(w) as the columns of an n×(n−1) matrix, taken
/// from the Householder reflector that maps w onto the first axis.
pub fn null_space_basis(w: &[f64]) -> Result<DMatrix<f64>> {
    let n = w.len();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n < 2 || !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::config(
            "constraint row W must be nonzero with at least two entries",
        ));
    }
    let mut h = DVector::from_iterator(n, w.iter().map(|v| v / norm));
    let s = if h[0] >= 0.0 { 1.0 } else { -1.0 };
    h[0] += s;
    let hh = h.dot(&h);
    let reflector = DMatrix::<f64>::identity(n, n) - (&h * h.transpose()) * (2.0 / hh);
    let basis = reflector.columns(1, n - 1).into_owned();
    let wv = DVector::from_column_slice(w);
    let resid = (wv.transpose() * &basis).amax();
    if resid > 1e-12 * norm.max(1.0) {
        return Err(Error::numerical(
            f64::NAN,
            format!("null-space residual {resid:e} too large"),
        ));
    }
    Ok(basis)
}

#[derive(Debug, Clone)]
pub struct ConstrainedAllocation {
    pub w: Vec<f64>,
    pub w_bar: DMatrix<f64>,
    /// W̄(B0·W̄)⁺ [km³/MPa].
    pub regulation: Vec<f64>,
    /// Wᵀ(WWᵀ)⁻¹.
    pub particular: Vec<f64>,
}

impl ConstrainedAllocation {
    pub fn new(w: Vec<f64>, cfg: &ControllerConfig) -> Result<Self> {
        let n = cfg.b0_pinv.len();
        if w.len() != n {
            return Err(Error::config(format!(
                "constraint row has {} entries for {n} wells",
                w.len()
            )));
        }
        let w_bar = null_space_basis(&w)?;
        let b0 = DVector::from_element(n, cfg.b0_entry());
        // (B0·W̄)ᵀ, length n − 1
        let bw = w_bar.transpose() * &b0;
        let bw2 = bw.dot(&bw);
        if !(bw2.sqrt() > 1e-10 * b0.norm()) {
            return Err(Error::config(
                "B0 has no component in null(W): the constraint removes every regulation direction \
                 (give at least one well a role outside the constraint)",
            ));
        }
        let regulation = (&w_bar * bw) / bw2;
        let ww: f64 = w.iter().map(|v| v * v).sum();
        let particular = w.iter().map(|v| v / ww).collect();
        Ok(ConstrainedAllocation {
            w,
            w_bar,
            regulation: regulation.iter().copied().collect(),
            particular,
        })
    }

    /// W·q.
    pub fn constraint_value(&self, q: &[f64]) -> f64 {
        self.w.iter().zip(q).map(|(a, b)| a * b).sum()
    }
}

/// Constrained command [m³/month] with W·Q_c = `f_t`, and the advanced state.
pub fn constrained_control_update(
    cfg: &ControllerConfig,
    alloc: &ConstrainedAllocation,
    state: &ControllerState,
    sigma: f64,
    f_t: f64,
    dt_c: f64,
) -> (Vec<f64>, ControllerState) {
    let u = law_output(&cfg.gains, sigma, state.nu);
    let q: Vec<f64> = alloc
        .regulation
        .iter()
        .zip(&alloc.particular)
        .map(|(r, p)| km3_per_hr_to_m3_per_month(r * u) + p * f_t)
        .collect();
    let next = ControllerState {
        nu: nu_step(&cfg.gains, sigma, state.nu, state.rho, dt_c),
        rho: state.rho,
        last_sigma: sigma,
        q_c_held: q.clone(),
    };
    (q, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::law::Gains;

    fn binary_w() -> Vec<f64> {
        (0..29).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect()
    }

    fn cfg() -> ControllerConfig {
        ControllerConfig::new(Gains::default(), 1.35e7, 4.11e-5, 0.8 * 5.7e-4, 0.9, 29).unwrap()
    }

    fn check_basis(w: &[f64], b: &DMatrix<f64>) {
        let wv = DVector::from_column_slice(w);
        assert!((wv.transpose() * b).amax() < 1e-12);
        let gram = b.transpose() * b;
        let eye = DMatrix::<f64>::identity(b.ncols(), b.ncols());
        assert!((gram - eye).amax() < 1e-12);
    }

    #[test]
    fn two_component_basis() {
        let b = null_space_basis(&[1.0, 0.0]).unwrap();
        assert_eq!(b.shape(), (2, 1));
        assert!(b[(0, 0)].abs() < 1e-15 && (b[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!(null_space_basis(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn ones_and_binary_rows() {
        let ones = [1.0; 4];
        check_basis(&ones, &null_space_basis(&ones).unwrap());
        let w = binary_w();
        assert_eq!(w.iter().sum::<f64>(), 15.0);
        let b = null_space_basis(&w).unwrap();
        assert_eq!(b.shape(), (29, 28));
        check_basis(&w, &b);
    }

    #[test]
    fn constraint_is_met_for_any_state() {
        let c = cfg();
        let a = ConstrainedAllocation::new(binary_w(), &c).unwrap();
        for (sigma, nu, f) in [
            (0.0, 0.0, -4.4e5),
            (3.7, -2e-6, -1e5),
            (-12.0, 5e-5, -7.5e5),
            (0.4, 1e-3, 0.0),
        ] {
            let st = ControllerState {
                nu,
                ..ControllerState::new(29)
            };
            let (q, _) = constrained_control_update(&c, &a, &st, sigma, f, 730.5);
            let err = (a.constraint_value(&q) - f).abs();
            assert!(err <= 1e-9 * f64::max(1.0, f.abs()), "σ={sigma}: err {err:e}");
        }
    }

    #[test]
    fn neutral_state_splits_demand_over_producers() {
        let c = cfg();
        let w = binary_w();
        let a = ConstrainedAllocation::new(w.clone(), &c).unwrap();
        let (q, _) = constrained_control_update(&c, &a, &ControllerState::new(29), 0.0, -3e5, 730.5);
        for (qi, wi) in q.iter().zip(&w) {
            let expected = if *wi == 1.0 { -3e5 / 15.0 } else { 0.0 };
            assert!((qi - expected).abs() < 1e-9);
        }
        let (z, _) = constrained_control_update(&c, &a, &ControllerState::new(29), 0.0, 0.0, 730.5);
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn regulation_moves_only_unconstrained_wells() {
        let c = cfg();
        let w = binary_w();
        let a = ConstrainedAllocation::new(w.clone(), &c).unwrap();
        for (r, wi) in a.regulation.iter().zip(&w) {
            if *wi == 1.0 {
                assert!(r.abs() < 1e-12 * a.regulation.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            }
        }
        // B0 · regulation = 1
        let s: f64 = a.regulation.iter().map(|r| r * c.b0_entry()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_producer_constraint_is_rejected() {
        let c = cfg();
        assert!(matches!(
            ConstrainedAllocation::new(vec![1.0; 29], &c),
            Err(Error::Config(_))
        ));
    }
}
