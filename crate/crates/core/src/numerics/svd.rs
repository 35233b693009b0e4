//! Golub–Kahan–Reinsch SVD: complex Householder bidiagonalization followed by
//! implicit-shift QR sweeps on the (real) bidiagonal.

use super::householder::{apply_left, make_reflector};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Thin SVD `A = U diag(s) V^H` with `k = min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left_vectors: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_vectors: ComplexMatrix,
}

/// Which singular vectors to form. Skipping one side saves roughly a third of the work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvdJob {
    pub left: bool,
    pub right: bool,
}

impl SvdJob {
    pub const FULL: SvdJob = SvdJob { left: true, right: true };
    pub const RIGHT_ONLY: SvdJob = SvdJob { left: false, right: true };
    pub const VALUES_ONLY: SvdJob = SvdJob { left: false, right: false };
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    svd_with(a, SvdJob::FULL)
}

/// SVD computing only the requested vectors; skipped sides come back as `0 × 0` matrices.
pub fn svd_with(a: &ComplexMatrix, job: SvdJob) -> Result<SvdResult> {
    if a.is_empty() {
        return Err(Error::invalid("svd of an empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("svd input has non-finite entries"));
    }
    let (m, n) = a.shape();
    if m >= n {
        let cols = (0..n).map(|c| a.column(c)).collect();
        let (u, s, v) = tall_svd(cols, m, n, job.left, job.right)?;
        Ok(SvdResult {
            left_vectors: u,
            singular_values: s,
            right_vectors: v,
        })
    } else {
        // A^H = V S U^H, so the roles of the two sides swap.
        let cols = (0..m).map(|r| a.row(r).iter().map(|z| z.conj()).collect()).collect();
        let (u, s, v) = tall_svd(cols, n, m, job.right, job.left)?;
        Ok(SvdResult {
            left_vectors: v,
            singular_values: s,
            right_vectors: u,
        })
    }
}

fn col_major_to_matrix(cols: &[Vec<C64>], rows: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// SVD of an `m × n` matrix with `m >= n`, given column-major.
fn tall_svd(
    mut a: Vec<Vec<C64>>,
    m: usize,
    n: usize,
    want_u: bool,
    want_v: bool,
) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let zero = C64::new(0.0, 0.0);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n]; // e[i] couples d[i] and d[i+1]
    let mut left_tau = vec![zero; n];
    let mut right_tau = vec![zero; n];
    let mut right_v: Vec<Vec<C64>> = vec![Vec::new(); n];

    for i in 0..n {
        // Left reflector zeroes column i below the diagonal.
        let (head, tail) = a[i][i..].split_first_mut().expect("non-empty column");
        let r = make_reflector(*head, tail);
        *head = C64::new(r.beta, 0.0);
        d[i] = r.beta;
        left_tau[i] = r.tau;
        if r.tau != zero {
            let t = r.tau.conj();
            let (done, rest) = a.split_at_mut(i + 1);
            let v_tail = &done[i][i + 1..];
            for col in rest.iter_mut() {
                let (h, rr) = col[i..].split_first_mut().unwrap();
                apply_left(t, v_tail, h, rr);
            }
        }

        if i + 1 < n {
            // Right reflector zeroes row i beyond the superdiagonal.
            let alpha = a[i + 1][i].conj();
            let mut x: Vec<C64> = (i + 2..n).map(|k| a[k][i].conj()).collect();
            let r = make_reflector(alpha, &mut x);
            e[i] = r.beta;
            right_tau[i] = r.tau;
            a[i + 1][i] = C64::new(r.beta, 0.0);
            for k in i + 2..n {
                a[k][i] = zero;
            }
            if r.tau != zero {
                // rows i+1..m:  A <- A (I - tau v v^H)
                let mut y = a[i + 1][i + 1..].to_vec();
                for (k, vk) in x.iter().enumerate() {
                    for (yr, &ar) in y.iter_mut().zip(&a[i + 2 + k][i + 1..]) {
                        *yr += ar * vk;
                    }
                }
                let ty: Vec<C64> = y.iter().map(|&z| r.tau * z).collect();
                for (ar, t) in a[i + 1][i + 1..].iter_mut().zip(&ty) {
                    *ar -= t;
                }
                for (k, vk) in x.iter().enumerate() {
                    let cv = vk.conj();
                    for (ar, t) in a[i + 2 + k][i + 1..].iter_mut().zip(&ty) {
                        *ar -= t * cv;
                    }
                }
            }
            right_v[i] = x;
        }
    }

    // Thin U = H_0 ... H_{n-1} [I; 0], accumulated backwards.
    let mut u: Vec<Vec<C64>> = Vec::new();
    if want_u {
        u = (0..n)
            .map(|j| {
                let mut c = vec![zero; m];
                c[j] = C64::new(1.0, 0.0);
                c
            })
            .collect();
        for i in (0..n).rev() {
            let tau = left_tau[i];
            if tau == zero {
                continue;
            }
            let v_tail = &a[i][i + 1..];
            for col in u.iter_mut().skip(i) {
                let (h, rest) = col[i..].split_first_mut().unwrap();
                apply_left(tau, v_tail, h, rest);
            }
        }
    }

    // V = G_0 ... G_{n-2}, each acting on coordinates i+1..n.
    let mut v: Vec<Vec<C64>> = Vec::new();
    if want_v {
        v = (0..n)
            .map(|j| {
                let mut c = vec![zero; n];
                c[j] = C64::new(1.0, 0.0);
                c
            })
            .collect();
        for i in (0..n.saturating_sub(1)).rev() {
            let tau = right_tau[i];
            if tau == zero {
                continue;
            }
            for col in v.iter_mut().skip(i + 1) {
                let (h, rest) = col[i + 1..].split_first_mut().unwrap();
                apply_left(tau, &right_v[i], h, rest);
            }
        }
    }

    bidiagonal_qr(&mut d, &mut e, &mut u, &mut v, n)?;

    // Sort descending, permuting vectors alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].total_cmp(&d[x]));
    let s: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let u_mat = if want_u {
        let cols: Vec<Vec<C64>> = order.iter().map(|&i| std::mem::take(&mut u[i])).collect();
        col_major_to_matrix(&cols, m)
    } else {
        ComplexMatrix::zeros(0, 0)
    };
    let v_mat = if want_v {
        let cols: Vec<Vec<C64>> = order.iter().map(|&i| std::mem::take(&mut v[i])).collect();
        col_major_to_matrix(&cols, n)
    } else {
        ComplexMatrix::zeros(0, 0)
    };
    Ok((u_mat, s, v_mat))
}

#[inline]
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64) {
    if cols.is_empty() {
        return;
    }
    let (lo, hi) = cols.split_at_mut(q);
    for (x, z) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let y = *x;
        let w = *z;
        *x = y * c + w * s;
        *z = w * c - y * s;
    }
}

/// Diagonalizes the upper bidiagonal (d, e) with Golub–Kahan implicit-shift
/// sweeps, rotating the columns of `u` and `v`; leaves `d` non-negative.
fn bidiagonal_qr(
    d: &mut [f64],
    e: &mut [f64],
    u: &mut [Vec<C64>],
    v: &mut [Vec<C64>],
    n: usize,
) -> Result<()> {
    // rv1[i] is the superdiagonal entry in column i (rv1[0] = 0).
    let mut rv1 = vec![0.0; n];
    for i in 1..n {
        rv1[i] = e[i - 1];
    }
    let w = d;
    let anorm = (0..n).map(|i| w[i].abs() + rv1[i].abs()).fold(0.0, f64::max);
    let negligible = |x: f64| x.abs() <= f64::EPSILON * anorm;
    let cap = 100 * n.max(1);
    let mut sweeps = 0usize;

    for k in (0..n).rev() {
        loop {
            // Find l such that rv1[l] is negligible, or w[l-1] is (then cancel rv1[l]).
            let mut l = k;
            let mut cancel = true;
            loop {
                if l == 0 || negligible(rv1[l]) {
                    cancel = false;
                    break;
                }
                if negligible(w[l - 1]) {
                    break;
                }
                l -= 1;
            }
            if cancel {
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if negligible(f) {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    c = g / h;
                    s = -f / h;
                    rotate(u, nm, i, c, s);
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for x in v.get_mut(k).into_iter().flatten() {
                        *x = -*x;
                    }
                }
                break;
            }
            sweeps += 1;
            if sweeps > cap {
                return Err(Error::numeric(
                    "svd",
                    format!("bidiagonal QR did not converge within {cap} sweeps"),
                ));
            }
            // Shift from the trailing 2x2 minor.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + g.copysign(f))) - h)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut zz = f.hypot(h);
                rv1[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                rotate(v, j, i, c, s);
                zz = f.hypot(h);
                w[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = h / zz;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                rotate(u, j, i, c, s);
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
    Ok(())
}
