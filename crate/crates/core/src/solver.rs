//! Preconditioned conjugate gradients for the symmetric positive-definite
//! systems produced by implicit diffusion steps on the masked grid.

use crate::error::{Error, Result};

/// Sparse symmetric matrix stored as a diagonal plus, per row, the list of
/// off-diagonal entries. Rows are ordered so that every off-diagonal column
/// in `lower[k]` is smaller than `k`.
#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    diag: Vec<f64>,
    /// (column, value) pairs with column < row.
    lower: Vec<Vec<(usize, f64)>>,
    /// (column, value) pairs with column > row.
    upper: Vec<Vec<(usize, f64)>>,
}

impl SymmetricMatrix {
    pub fn from_diag(diag: Vec<f64>) -> Self {
        let n = diag.len();
        SymmetricMatrix {
            diag,
            lower: vec![Vec::new(); n],
            upper: vec![Vec::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Set the symmetric pair (r, c) and (c, r) to `v`. Each pair must be
    /// inserted exactly once.
    pub fn set_pair(&mut self, r: usize, c: usize, v: f64) {
        let (hi, lo) = if r > c { (r, c) } else { (c, r) };
        self.lower[hi].push((lo, v));
        self.upper[lo].push((hi, v));
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..self.diag.len() {
            let mut acc = self.diag[k] * x[k];
            for &(c, v) in &self.lower[k] {
                acc += v * x[c];
            }
            for &(c, v) in &self.upper[k] {
                acc += v * x[c];
            }
            y[k] = acc;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerKind {
    Jacobi,
    /// Zero fill-in incomplete Cholesky.
    IncompleteCholesky,
}

#[derive(Debug, Clone)]
enum Preconditioner {
    Jacobi(Vec<f64>),
    /// Lower factor of IC(0): diagonal and strictly-lower entries.
    Ic0 {
        diag: Vec<f64>,
        lower: Vec<Vec<(usize, f64)>>,
        upper: Vec<Vec<(usize, f64)>>,
    },
}

impl Preconditioner {
    fn build(a: &SymmetricMatrix, kind: PreconditionerKind) -> Result<Self> {
        match kind {
            PreconditionerKind::Jacobi => Ok(Preconditioner::Jacobi(a.diag.iter().map(|d| 1.0 / d).collect())),
            PreconditionerKind::IncompleteCholesky => {
                let n = a.dim();
                let mut diag = vec![0.0; n];
                let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
                for k in 0..n {
                    let mut entries = a.lower[k].clone();
                    entries.sort_unstable_by_key(|(c, _)| *c);
                    let mut row: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
                    for &(c, v) in &entries {
                        // Σ_{j<c} L_kj L_cj over the shared pattern
                        let mut s = v;
                        for &(j, lkj) in &row {
                            if let Some(&(_, lcj)) = lower[c].iter().find(|(jj, _)| *jj == j) {
                                s -= lkj * lcj;
                            }
                        }
                        row.push((c, s / diag[c]));
                    }
                    let sq: f64 = row.iter().map(|(_, l)| l * l).sum();
                    let d = a.diag[k] - sq;
                    if !(d > 0.0) {
                        return Err(Error::numerical(
                            f64::NAN,
                            format!("incomplete Cholesky breakdown at row {k}"),
                        ));
                    }
                    diag[k] = d.sqrt();
                    lower[k] = row;
                }
                let mut upper: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
                for (k, row) in lower.iter().enumerate() {
                    for &(c, v) in row {
                        upper[c].push((k, v));
                    }
                }
                Ok(Preconditioner::Ic0 { diag, lower, upper })
            }
        }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
            Preconditioner::Ic0 { diag, lower, upper } => {
                let n = diag.len();
                // L y = r
                for k in 0..n {
                    let mut s = r[k];
                    for &(c, v) in &lower[k] {
                        s -= v * z[c];
                    }
                    z[k] = s / diag[k];
                }
                // Lᵀ z = y
                for k in (0..n).rev() {
                    let mut s = z[k];
                    for &(c, v) in &upper[k] {
                        s -= v * z[c];
                    }
                    z[k] = s / diag[k];
                }
            }
        }
    }
}

/// Outcome of a converged solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// ‖b − A x‖ / ‖b‖ at exit.
    pub relative_residual: f64,
}

/// A fixed SPD system with its preconditioner, ready for repeated solves.
#[derive(Debug, Clone)]
pub struct PcgSolver {
    a: SymmetricMatrix,
    precond: Preconditioner,
    pub tolerance: f64,
    pub max_iterations: usize,
    work: [Vec<f64>; 4],
}

impl PcgSolver {
    /// Default tolerance 1e-10 relative, iteration cap 10·n.
    pub fn new(a: SymmetricMatrix, kind: PreconditionerKind) -> Result<Self> {
        let n = a.dim();
        let precond = Preconditioner::build(&a, kind)?;
        Ok(PcgSolver {
            a,
            precond,
            tolerance: 1e-10,
            max_iterations: 10 * n.max(1),
            work: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        })
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.a
    }

    /// Solve A x = b starting from the guess already in `x`.
    pub fn solve(&mut self, b: &[f64], x: &mut [f64]) -> Result<SolveStats> {
        let n = self.a.dim();
        let b_norm = norm(b);
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            });
        }
        let [r, z, p, q] = &mut self.work;
        self.a.mul_into(x, q);
        for k in 0..n {
            r[k] = b[k] - q[k];
        }
        let mut res = norm(r) / b_norm;
        if res <= self.tolerance {
            return Ok(SolveStats {
                iterations: 0,
                relative_residual: res,
            });
        }
        self.precond.apply(r, z);
        p.copy_from_slice(z);
        let mut rz = dot(r, z);
        for it in 1..=self.max_iterations {
            self.a.mul_into(p, q);
            let pq = dot(p, q);
            if !(pq > 0.0) {
                return Err(Error::numerical(
                    f64::NAN,
                    format!("conjugate gradient lost positive definiteness at iteration {it} (pᵀAp = {pq:e})"),
                ));
            }
            let alpha = rz / pq;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            res = norm(r) / b_norm;
            if res <= self.tolerance {
                return Ok(SolveStats {
                    iterations: it,
                    relative_residual: res,
                });
            }
            self.precond.apply(r, z);
            let rz_new = dot(r, z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        Err(Error::numerical(
            f64::NAN,
            format!(
                "conjugate gradient did not converge in {} iterations (relative residual {res:e}, tolerance {:e})",
                self.max_iterations, self.tolerance
            ),
        ))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian-like tridiagonal SPD matrix, diag 2 + eps, off -1.
    fn tridiag(n: usize, eps: f64) -> SymmetricMatrix {
        let mut a = SymmetricMatrix::from_diag(vec![2.0 + eps; n]);
        for k in 1..n {
            a.set_pair(k, k - 1, -1.0);
        }
        a
    }

    fn residual(a: &SymmetricMatrix, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        a.mul_into(x, &mut ax);
        norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>()) / norm(b)
    }

    #[test]
    fn solves_tridiagonal_with_both_preconditioners() {
        let n = 200;
        let b: Vec<f64> = (0..n).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        for kind in [PreconditionerKind::Jacobi, PreconditionerKind::IncompleteCholesky] {
            let mut s = PcgSolver::new(tridiag(n, 0.01), kind).unwrap();
            let mut x = vec![0.0; n];
            let st = s.solve(&b, &mut x).unwrap();
            assert!(st.relative_residual <= 1e-10);
            assert!(residual(s.matrix(), &x, &b) <= 1e-9);
        }
    }

    #[test]
    fn ic0_is_exact_for_tridiagonal() {
        // no fill-in is dropped for a tridiagonal matrix, so one iteration suffices
        let n = 50;
        let b = vec![1.0; n];
        let mut s = PcgSolver::new(tridiag(n, 0.5), PreconditionerKind::IncompleteCholesky).unwrap();
        let mut x = vec![0.0; n];
        let st = s.solve(&b, &mut x).unwrap();
        assert!(st.iterations <= 2, "{st:?}");
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let mut s = PcgSolver::new(tridiag(10, 1.0), PreconditionerKind::Jacobi).unwrap();
        let mut x = vec![3.0; 10];
        let st = s.solve(&[0.0; 10], &mut x).unwrap();
        assert_eq!(st.iterations, 0);
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reports_non_convergence() {
        let mut s = PcgSolver::new(tridiag(100, 1e-6), PreconditionerKind::Jacobi).unwrap();
        s.max_iterations = 3;
        let mut x = vec![0.0; 100];
        let err = s.solve(&vec![1.0; 100], &mut x).unwrap_err();
        assert!(matches!(err, Error::Numerical { .. }));
        assert!(err.to_string().contains("did not converge"));
    }
}
