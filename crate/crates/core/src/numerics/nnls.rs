//! Lawson-Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct NnlsProblem {
    pub matrix: DMatrix<f64>,
    pub target: DVector<f64>,
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NnlsSolution {
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl NnlsProblem {
    pub fn new(matrix: DMatrix<f64>, target: DVector<f64>) -> Result<Self> {
        let cols = matrix.ncols();
        let p = NnlsProblem {
            matrix,
            target,
            max_iter: 3 * cols.max(1) + 30,
            tol: 1e-12,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let (m, n) = self.matrix.shape();
        if m == 0 || n == 0 {
            return Err(Error::Malformed(
                "NNLS matrix must have at least one row and column".into(),
            ));
        }
        if self.target.len() != m {
            return Err(Error::Malformed(format!(
                "target has {} entries but the matrix has {m} rows",
                self.target.len()
            )));
        }
        if self
            .matrix
            .iter()
            .chain(self.target.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Malformed(
                "NNLS input contains non-finite entries".into(),
            ));
        }
        Ok(())
    }
}

/// Least-squares solution restricted to the columns in `passive`, via QR.
/// Returns `None` when the restricted matrix is numerically rank deficient.
fn restricted_lsq(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> Option<DVector<f64>> {
    let sub = a.select_columns(passive);
    let p = passive.len();
    let scale = sub.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let qr = sub.qr();
    let r = qr.r();
    if (0..p).any(|i| r[(i, i)].abs() <= 1e-13 * scale) {
        return None;
    }
    let mut qtb = b.clone();
    qr.q_tr_mul(&mut qtb);
    let rhs = qtb.rows(0, p).into_owned();
    r.solve_upper_triangular(&rhs)
}

/// Solve `min ||M c - f||` subject to `c >= 0`.
pub fn nnls_solve(problem: &NnlsProblem) -> Result<NnlsSolution> {
    problem.validate()?;
    let a = &problem.matrix;
    let b = &problem.target;
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut in_passive = vec![false; n];
    let mut rejected = vec![false; n];
    let mut iterations = 0;

    loop {
        let resid = b - a * &x;
        let w = a.tr_mul(&resid);
        let candidate = (0..n)
            .filter(|&j| !in_passive[j] && !rejected[j] && w[j] > problem.tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else { break };

        iterations += 1;
        if iterations > problem.max_iter {
            return Err(Error::IterationCap {
                cap: problem.max_iter,
            });
        }
        in_passive[t] = true;

        let mut first_pass = true;
        loop {
            let passive: Vec<usize> = (0..n).filter(|&j| in_passive[j]).collect();
            let z = restricted_lsq(a, b, &passive);
            let admissible = match &z {
                Some(z) if first_pass => z[passive.iter().position(|&j| j == t).unwrap_or(0)] > 0.0,
                Some(_) => true,
                None => false,
            };
            let Some(z) = z.filter(|_| admissible) else {
                // The new column cannot enter with a positive coefficient
                // (collinear or roundoff-dominated); skip it until x moves.
                in_passive[t] = false;
                x[t] = 0.0;
                rejected[t] = true;
                break;
            };
            first_pass = false;
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = z[k];
                }
                rejected.iter_mut().for_each(|r| *r = false);
                break;
            }
            let alpha = passive
                .iter()
                .enumerate()
                .filter(|&(k, _)| z[k] <= 0.0)
                .map(|(k, &j)| x[j] / (x[j] - z[k]))
                .fold(f64::INFINITY, f64::min);
            for (k, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] <= 0.0 || (z[k] <= 0.0 && x[j] <= 1e-15 * z.amax()) {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
            }
            rejected.iter_mut().for_each(|r| *r = false);
            iterations += 1;
            if iterations > problem.max_iter {
                return Err(Error::IterationCap {
                    cap: problem.max_iter,
                });
            }
        }
    }
    let residual_norm = (b - a * &x).norm();
    Ok(NnlsSolution {
        coefficients: x.iter().copied().collect(),
        residual_norm,
        iterations,
    })
}
