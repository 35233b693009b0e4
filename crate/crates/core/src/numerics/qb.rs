//! Blocked randomized QB factorization with an explicit residual.

use rand::Rng;

use super::matrix::{ComplexMatrix, C64};
use super::random::standard_complex_normal;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QbFactorization {
    /// Orthonormal basis, `rows × tau`.
    pub q: ComplexMatrix,
    /// Projection `Q^H A`, `tau × cols`.
    pub b: ComplexMatrix,
    pub tau: usize,
    /// `‖A − QB‖_F / ‖A‖_F` at exit (0 for the zero matrix).
    pub relative_residual: f64,
    /// Set when the tolerance could not be met before the basis stopped growing.
    pub saturated: bool,
}

/// Relative size below which a freshly orthogonalized sketch column is dropped.
const DROP_RATIO: f64 = 1e-10;

/// Grows `Q` block by block from Gaussian sketches of the current residual until
/// `‖A − QB‖_F ≤ tol·‖A‖_F`, or until a block adds nothing new.
pub fn randomized_qb<R: Rng + ?Sized>(
    a: &ComplexMatrix,
    block: usize,
    tol: f64,
    rng: &mut R,
) -> Result<QbFactorization> {
    if block == 0 {
        return Err(Error::invalid("QB block size must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("QB tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() {
        return Err(Error::invalid("QB input has non-finite entries"));
    }
    let (m, n) = a.shape();
    let a_norm = a.frobenius_norm();
    let kmax = m.min(n);
    if a_norm == 0.0 || kmax == 0 {
        return Ok(QbFactorization {
            q: ComplexMatrix::zeros(m, 0),
            b: ComplexMatrix::zeros(0, n),
            tau: 0,
            relative_residual: 0.0,
            saturated: false,
        });
    }

    // Residual stored row-major like `a`; Q kept as a list of columns.
    let mut res = a.clone();
    let mut q_cols: Vec<Vec<C64>> = Vec::new();
    let mut b_rows: Vec<Vec<C64>> = Vec::new();
    let mut rel = 1.0;

    while q_cols.len() < kmax && rel > tol {
        let k = block.min(kmax - q_cols.len());
        let omega: Vec<Vec<C64>> = (0..k)
            .map(|_| (0..n).map(|_| standard_complex_normal(rng)).collect())
            .collect();
        let mut accepted: Vec<Vec<C64>> = Vec::new();
        for w in &omega {
            let mut y = res.mul_vec(w)?;
            let y_norm0 = norm(&y);
            if y_norm0 == 0.0 {
                continue;
            }
            // Two rounds of Gram–Schmidt against the current basis.
            for _ in 0..2 {
                for qc in q_cols.iter().chain(accepted.iter()) {
                    let proj: C64 = qc.iter().zip(&y).map(|(q, v)| q.conj() * v).sum();
                    for (v, q) in y.iter_mut().zip(qc) {
                        *v -= proj * q;
                    }
                }
            }
            let y_norm = norm(&y);
            if y_norm <= DROP_RATIO * y_norm0 || y_norm <= f64::EPSILON * a_norm {
                continue;
            }
            for v in y.iter_mut() {
                *v /= y_norm;
            }
            accepted.push(y);
        }
        if accepted.is_empty() {
            break;
        }
        // B_new = Q_new^H R, then R <- R − Q_new B_new.
        for qc in accepted {
            let mut brow = vec![C64::new(0.0, 0.0); n];
            for (r, q) in qc.iter().enumerate() {
                let qc_conj = q.conj();
                for (b, x) in brow.iter_mut().zip(res.row(r)) {
                    *b += qc_conj * x;
                }
            }
            for (r, q) in qc.iter().enumerate() {
                for c in 0..n {
                    res[(r, c)] -= q * brow[c];
                }
            }
            q_cols.push(qc);
            b_rows.push(brow);
        }
        rel = res.frobenius_norm() / a_norm;
    }

    let tau = q_cols.len();
    let q = ComplexMatrix::from_fn(m, tau, |r, c| q_cols[c][r]);
    let b = ComplexMatrix::from_fn(tau, n, |r, c| b_rows[r][c]);
    Ok(QbFactorization {
        q,
        b,
        tau,
        relative_residual: rel,
        saturated: rel > tol,
    })
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
