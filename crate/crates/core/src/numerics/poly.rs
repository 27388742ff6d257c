//! Characteristic polynomials and univariate root finding.
//!
//! Coefficient lists are monic-or-not, highest power first:
//! `[c_n, c_{n-1}, ..., c_0]` represents `c_n t^n + ... + c_0`.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const CHAR_POLY_MAX_DIM: usize = 16;
pub const ROOTS_MAX_DEGREE: usize = 32;

/// Characteristic polynomial `det(t I - M)` with an optional integer reading.
#[derive(Clone, Debug)]
pub struct CharPoly {
    /// Monic, descending powers.
    pub coefficients: Vec<C64>,
    /// Nearest integers and their rounding errors, present only when every
    /// coefficient lies within `1e-4` of an integer.
    pub integer: Option<Vec<(i64, f64)>>,
}

/// Faddeev-LeVerrier recurrence.
pub fn char_poly(m: &ComplexMatrix) -> Result<CharPoly> {
    if !m.is_square() {
        return Err(Error::Contract("char_poly needs a square matrix".into()));
    }
    let n = m.rows();
    if n > CHAR_POLY_MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "char_poly supports dimension <= {CHAR_POLY_MAX_DIM}, got {n}"
        )));
    }
    let mut coeffs = vec![ONE];
    let mut mk = ComplexMatrix::zeros(n, n);
    let mut prev = ONE;
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next[(i, i)] += prev;
        }
        mk = next;
        let ck = -m.matmul(&mk).trace() / (k as f64);
        coeffs.push(ck);
        prev = ck;
    }
    let integer = integer_reading(&coeffs, 1e-4);
    Ok(CharPoly {
        coefficients: coeffs,
        integer,
    })
}

fn integer_reading(coeffs: &[C64], tol: f64) -> Option<Vec<(i64, f64)>> {
    coeffs
        .iter()
        .map(|z| {
            let nearest = z.re.round();
            let err = ((z.re - nearest).powi(2) + z.im.powi(2)).sqrt();
            (err < tol && nearest.abs() < 9.0e15).then_some((nearest as i64, err))
        })
        .collect()
}

/// Horner evaluation.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(ZERO, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * ((n - i) as f64))
        .collect()
}

/// `|p(x)| / sum_i |c_i| |x|^i`, the backward-error style residual.
pub fn relative_residual(coeffs: &[C64], x: C64) -> f64 {
    let ax = x.norm();
    let scale = coeffs.iter().fold(0.0, |acc, c| acc * ax + c.norm());
    if scale == 0.0 {
        0.0
    } else {
        poly_eval(coeffs, x).norm() / scale
    }
}

/// Roots through the eigenvalues of the balanced companion matrix, each
/// followed by Newton polishing that is kept only when it lowers the residual.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let first = coeffs.iter().position(|c| c.norm() > 0.0);
    let Some(first) = first else {
        return Err(Error::InvalidParameter("zero polynomial has no roots".into()));
    };
    let p = &coeffs[first..];
    let degree = p.len() - 1;
    if degree > ROOTS_MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "poly_roots supports degree <= {ROOTS_MAX_DEGREE}, got {degree}"
        )));
    }
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = p[0];
    let monic: Vec<C64> = p.iter().map(|c| c / lead).collect();

    // Companion matrix in upper Hessenberg form: first row -c_{n-1..0}.
    let mut h = ComplexMatrix::zeros(degree, degree);
    for j in 0..degree {
        h[(0, j)] = -monic[j + 1];
    }
    for i in 1..degree {
        h[(i, i - 1)] = ONE;
    }
    balance(&mut h);
    let mut roots = hessenberg_eigenvalues(h)?;

    let dp = poly_derivative(&monic);
    for x in roots.iter_mut() {
        let mut best = *x;
        let mut best_res = relative_residual(&monic, best);
        for _ in 0..3 {
            let d = poly_eval(&dp, best);
            if d.norm() == 0.0 {
                break;
            }
            let cand = best - poly_eval(&monic, best) / d;
            let res = relative_residual(&monic, cand);
            if res < best_res {
                best = cand;
                best_res = res;
            } else {
                break;
            }
        }
        *x = best;
    }
    Ok(roots)
}

/// Parlett-Reinsch diagonal balancing with power-of-two scalings.
fn balance(h: &mut ComplexMatrix) {
    let n = h.rows();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += h[(j, i)].norm();
                    row += h[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    h[(i, j)] /= f;
                    h[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
/// Wilkinson shifts and deflation.
pub(crate) fn hessenberg_eigenvalues(mut h: ComplexMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    let eps = f64::EPSILON;
    while hi > 0 {
        if hi == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        // Deflation point.
        let mut l = hi - 1;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= eps * diag || sub < 1e-300 {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            out.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n.max(10) {
            return Err(Error::NoConvergence("Hessenberg QR iteration".into()));
        }
        let a = h[(hi - 2, hi - 2)];
        let b = h[(hi - 2, hi - 1)];
        let cc = h[(hi - 1, hi - 2)];
        let d = h[(hi - 1, hi - 1)];
        let mut mu = if iter.is_multiple_of(11) {
            // exceptional shift
            d + h[(hi - 1, hi - 2)].norm() * C64::new(0.75, 0.43)
        } else {
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * cc).sqrt();
            let e1 = half_tr + disc;
            let e2 = half_tr - disc;
            if (e1 - d).norm() < (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        if !mu.re.is_finite() || !mu.im.is_finite() {
            mu = d;
        }
        for i in l..hi {
            h[(i, i)] -= mu;
        }
        let mut rots: Vec<(C64, C64)> = Vec::with_capacity(hi - l);
        for k in l..hi - 1 {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let rr = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cg, sg) = if rr == 0.0 { (ONE, ZERO) } else { (x / rr, y / rr) };
            // G = [[conj(c), conj(s)], [-s, c]] on rows k, k+1.
            for j in k..hi {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = cg.conj() * u + sg.conj() * v;
                h[(k + 1, j)] = -sg * u + cg * v;
            }
            rots.push((cg, sg));
        }
        for (idx, k) in (l..hi - 1).enumerate() {
            let (cg, sg) = rots[idx];
            // H <- H G^dagger on columns k, k+1; G^dagger = [[c, -conj(s)], [s, conj(c)]].
            for i in l..(k + 2).min(hi) {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * cg + v * sg;
                h[(i, k + 1)] = -u * sg.conj() + v * cg.conj();
            }
        }
        for i in l..hi {
            h[(i, i)] += mu;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{c, r};

    fn contains(roots: &[C64], x: C64, tol: f64) -> bool {
        roots.iter().any(|z| (z - x).norm() < tol)
    }

    #[test]
    fn identity_two() {
        let p = char_poly(&ComplexMatrix::identity(2)).unwrap();
        let ints: Vec<i64> = p.integer.unwrap().iter().map(|x| x.0).collect();
        assert_eq!(ints, vec![1, -2, 1]);
    }

    #[test]
    fn diag_123() {
        let p = char_poly(&ComplexMatrix::diag_real(&[1.0, 2.0, 3.0])).unwrap();
        let ints: Vec<i64> = p.integer.unwrap().iter().map(|x| x.0).collect();
        assert_eq!(ints, vec![1, -6, 11, -6]);
    }

    #[test]
    fn char_poly_dimension_cap() {
        assert!(char_poly(&ComplexMatrix::identity(17)).is_err());
    }

    #[test]
    fn roots_of_t2_minus_1() {
        let roots = poly_roots(&[r(1.0), r(0.0), r(-1.0)]).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(contains(&roots, r(1.0), 1e-12));
        assert!(contains(&roots, r(-1.0), 1e-12));
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = poly_roots(&[r(1.0), r(0.0), r(0.0), r(-1.0)]).unwrap();
        let zeta = c(-0.5, 3f64.sqrt() / 2.0);
        assert!(contains(&roots, r(1.0), 1e-12));
        assert!(contains(&roots, zeta, 1e-12));
        assert!(contains(&roots, zeta.conj(), 1e-12));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(poly_roots(&[r(0.0), r(0.0)]).is_err());
    }

    #[test]
    fn leading_zeros_are_stripped() {
        let roots = poly_roots(&[r(0.0), r(2.0), r(-4.0)]).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - r(2.0)).norm() < 1e-14);
    }
}
