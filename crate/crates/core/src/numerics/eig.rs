//! Hermitian eigendecomposition: Householder reduction to a real symmetric
//! tridiagonal, then implicit-shift QL iteration with accumulated rotations.

use super::householder::{apply_left, make_reflector};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenpairs of a Hermitian matrix, values descending; column `i` of `vectors`
/// belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub vectors: ComplexMatrix,
    pub values: Vec<f64>,
}

pub const HERMITIAN_TOL: f64 = 1e-9;

pub fn eig_hermitian(c: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = c.rows();
    if n == 0 || c.cols() != n {
        return Err(Error::invalid(format!(
            "eig_hermitian needs a non-empty square matrix, got {:?}",
            c.shape()
        )));
    }
    if !c.is_finite() {
        return Err(Error::invalid("eig_hermitian input has non-finite entries"));
    }
    let scale = c.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in i..n {
            if (c[(i, j)] - c[(j, i)].conj()).norm() > HERMITIAN_TOL * scale.max(1.0) {
                return Err(Error::invalid(format!(
                    "matrix is not Hermitian at ({i}, {j})"
                )));
            }
        }
    }

    let zero = C64::new(0.0, 0.0);
    // Column-major copy of the symmetrized input.
    let mut a: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| (c[(i, j)] + c[(j, i)].conj()) * 0.5).collect())
        .collect();
    let mut taus = vec![zero; n];
    let mut vs: Vec<Vec<C64>> = vec![Vec::new(); n];
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let (head, tail) = a[k][k + 1..].split_first_mut().unwrap();
        let r = make_reflector(*head, tail);
        let v_tail = tail.to_vec();
        taus[k] = r.tau;
        if r.tau != zero {
            // A <- H^H A on rows k+1.., then A <- A H on columns k+1..
            let t = r.tau.conj();
            for col in a.iter_mut().skip(k + 1) {
                let (h, rest) = col[k + 1..].split_first_mut().unwrap();
                apply_left(t, &v_tail, h, rest);
            }
            let mut y = a[k + 1][k + 1..].to_vec();
            for (j, vj) in v_tail.iter().enumerate() {
                for (yr, &ar) in y.iter_mut().zip(&a[k + 2 + j][k + 1..]) {
                    *yr += ar * vj;
                }
            }
            let ty: Vec<C64> = y.iter().map(|&z| r.tau * z).collect();
            for (ar, t) in a[k + 1][k + 1..].iter_mut().zip(&ty) {
                *ar -= t;
            }
            for (j, vj) in v_tail.iter().enumerate() {
                let cv = vj.conj();
                for (ar, t) in a[k + 2 + j][k + 1..].iter_mut().zip(&ty) {
                    *ar -= t * cv;
                }
            }
        }
        e[k] = r.beta;
        vs[k] = v_tail;
    }
    for i in 0..n {
        d[i] = a[i][i].re;
    }

    // Q = H_0 H_1 ... accumulated backwards.
    let mut z: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut col = vec![zero; n];
            col[j] = C64::new(1.0, 0.0);
            col
        })
        .collect();
    for k in (0..n.saturating_sub(1)).rev() {
        let tau = taus[k];
        if tau == zero {
            continue;
        }
        for col in z.iter_mut().skip(k + 1) {
            let (h, rest) = col[k + 1..].split_first_mut().unwrap();
            apply_left(tau, &vs[k], h, rest);
        }
    }

    tridiagonal_ql(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].total_cmp(&d[x]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| z[order[col]][r]);
    Ok(HermitianEigen { vectors, values })
}

/// Implicit-shift QL on the symmetric tridiagonal (d, e) with `e[i] = T[i, i+1]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [Vec<C64>]) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    let cap = 100 * n.max(1);
    let mut sweeps = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > cap {
                return Err(Error::numeric(
                    "eig_hermitian",
                    format!("tridiagonal QL did not converge within {cap} sweeps"),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = z.split_at_mut(i + 1);
                for (zi, zi1) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                    let f = *zi1;
                    *zi1 = *zi * s + f * c;
                    *zi = *zi * c - f * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_pairs(c: &ComplexMatrix, eig: &HermitianEigen) {
        for (i, &lambda) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(i);
            let cv = c.mul_vec(&v).unwrap();
            let err: f64 = cv.iter().zip(&v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-10, "pair {i}: {}", err.sqrt());
        }
    }

    #[test]
    fn diagonal_values_come_back_sorted() {
        let c = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        let eig = eig_hermitian(&c).unwrap();
        assert_eq!(eig.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let c = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = eig_hermitian(&c).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14 && (eig.values[1] + 1.0).abs() < 1e-14);
        check_pairs(&c, &eig);
    }

    #[test]
    fn complex_two_by_two_coupling() {
        let c = ComplexMatrix::from_fn(2, 2, |r, k| match (r, k) {
            (0, 0) => C64::new(2.0, 0.0),
            (1, 1) => C64::new(-1.0, 0.0),
            (0, 1) => C64::new(0.5, 1.5),
            _ => C64::new(0.5, -1.5),
        });
        check_pairs(&c, &eig_hermitian(&c).unwrap());
    }

    #[test]
    fn dense_complex_hermitian() {
        let n = 7;
        let b = ComplexMatrix::from_fn(n, n, |r, k| {
            let t = (3 * r + 5 * k) as f64;
            C64::new(t.sin(), (0.3 * t).cos())
        });
        let c = b.matmul(&b.adjoint()).unwrap();
        let eig = eig_hermitian(&c).unwrap();
        check_pairs(&c, &eig);
        let q = eig.vectors.adjoint_matmul(&eig.vectors).unwrap();
        assert!(q.sub(&ComplexMatrix::identity(n)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let c = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_hermitian(&c), Err(Error::InvalidInput(_))));
    }
}
