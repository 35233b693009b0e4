//! Complex Householder reflectors with a real "beta", in the style of LAPACK's `zlarfg`.

use super::matrix::C64;

/// Reflector `H = I - tau v v^H` with `v[0] = 1` implied.
///
/// `H^H [alpha; x] = [beta; 0]` where `beta` is real.
pub(crate) struct Reflector {
    pub tau: C64,
    pub beta: f64,
}

/// Overwrites `x` with the tail of `v` and returns `(tau, beta)`.
pub(crate) fn make_reflector(alpha: C64, x: &mut [C64]) -> Reflector {
    let xnorm_sqr: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xnorm_sqr == 0.0 && alpha.im == 0.0 {
        return Reflector {
            tau: C64::new(0.0, 0.0),
            beta: alpha.re,
        };
    }
    let norm = (alpha.norm_sqr() + xnorm_sqr).sqrt();
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = C64::new(1.0, 0.0) / (alpha - beta);
    for z in x.iter_mut() {
        *z *= scale;
    }
    Reflector { tau, beta }
}

/// `y <- (I - t v v^H) y` with `v = [1; tail]`, where `t` is `tau` or `conj(tau)`.
#[inline]
pub(crate) fn apply_left(t: C64, tail: &[C64], head: &mut C64, rest: &mut [C64]) {
    let mut w = *head;
    for (v, y) in tail.iter().zip(rest.iter()) {
        w += v.conj() * y;
    }
    if w.re == 0.0 && w.im == 0.0 {
        return;
    }
    let tw = t * w;
    *head -= tw;
    for (v, y) in tail.iter().zip(rest.iter_mut()) {
        *y -= tw * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflector_annihilates_tail_with_real_beta() {
        let alpha = C64::new(0.3, -1.2);
        let orig = [C64::new(2.0, 0.5), C64::new(-0.7, 0.1), C64::new(0.0, 3.0)];
        let mut tail = orig;
        let r = make_reflector(alpha, &mut tail);
        // apply H^H = I - conj(tau) v v^H to the original vector
        let mut head = alpha;
        let mut rest = orig;
        apply_left(r.tau.conj(), &tail, &mut head, &mut rest);
        assert!((head - C64::new(r.beta, 0.0)).norm() < 1e-12);
        assert!(rest.iter().all(|z| z.norm() < 1e-12));
        let norm = (alpha.norm_sqr() + orig.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
        assert!((r.beta.abs() - norm).abs() < 1e-12);
    }

    #[test]
    fn real_vector_with_zero_tail_is_left_alone() {
        let mut tail = [C64::new(0.0, 0.0); 2];
        let r = make_reflector(C64::new(-4.0, 0.0), &mut tail);
        assert_eq!(r.tau, C64::new(0.0, 0.0));
        assert_eq!(r.beta, -4.0);
    }
}
