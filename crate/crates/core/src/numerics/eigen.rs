use super::jacobi::Rotation;
use super::matrix::{inner, norm, ComplexMatrix, CVector, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Eigendecomposition `H = U diag(values) U^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `U diag(f(lambda)) U^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += ui * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Eigenvectors whose eigenvalue magnitude exceeds `tau * max|lambda|`.
    pub fn range_vectors(&self, tau: f64) -> Vec<CVector> {
        let cut = tau * self.max_abs_value();
        (0..self.dim())
            .filter(|&k| self.values[k].abs() > cut && self.values[k] != 0.0)
            .map(|k| self.vector(k))
            .collect()
    }

    /// Complement of [`Spectrum::range_vectors`].
    pub fn kernel_vectors(&self, tau: f64) -> Vec<CVector> {
        let cut = tau * self.max_abs_value();
        (0..self.dim())
            .filter(|&k| !(self.values[k].abs() > cut && self.values[k] != 0.0))
            .map(|k| self.vector(k))
            .collect()
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be square and Hermitian within `1e-12 * max(1, max|H|)`;
/// only its Hermitian part is diagonalised.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::Contract(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_finite() {
        return Err(Error::Contract("eig_hermitian input has non-finite entries".into()));
    }
    if !h.is_hermitian() {
        return Err(Error::Contract(format!(
            "eig_hermitian input is not Hermitian (defect {:e})",
            h.hermiticity_defect()
        )));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut u = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n == 0 || scale == 0.0 {
        return Ok(Spectrum {
            values: vec![0.0; n],
            vectors: u,
        });
    }
    let skip = 1e-18 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                if g.norm() <= skip {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, g);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rot.apply_right(&mut u, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-12 * scale {
            return Err(Error::NoConvergence(format!(
                "Jacobi sweeps exhausted with off-diagonal norm {off:e}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = u.select_columns(&order);
    Ok(Spectrum { values, vectors })
}

/// Spectral pseudo-inverse of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues at or below `tau * lambda_max` are treated as exact zeros.
/// A negative eigenvalue below `-tau * tr(H)` is a domain error.
pub fn pseudo_inverse(h: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(h)?;
    pseudo_inverse_from(&spec, h.trace().re, tau)
}

pub(crate) fn pseudo_inverse_from(spec: &Spectrum, trace: f64, tau: f64) -> Result<ComplexMatrix> {
    check_tau(tau)?;
    let min = spec.min_value();
    if min < -tau * trace.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "pseudo_inverse expects a PSD matrix; smallest eigenvalue {min:e}"
        )));
    }
    let cut = tau * spec.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(spec.reconstruct_with(|x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 }))
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tau must lie in (0, 1), got {tau}")))
    }
}

/// `<v|A|v>` for Hermitian `A`, real part.
pub fn quadratic_form(a: &ComplexMatrix, v: &[C64]) -> f64 {
    inner(v, &a.mul_vec(v)).re
}

/// Relative residual of orthogonally projecting `v` onto the span of the
/// orthonormal `basis`: `|v - P v| / |v|`.
pub fn projection_residual(basis: &[CVector], v: &[C64]) -> f64 {
    let n0 = norm(v);
    if n0 == 0.0 {
        return 0.0;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= p * bi;
            }
        }
    }
    norm(&w) / n0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{c, r};

    #[test]
    fn identity_has_unit_spectrum() {
        let s = eig_hermitian(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let s = eig_hermitian(&ComplexMatrix::diag_real(&[2.0, -1.0])).unwrap();
        assert_eq!(s.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            eig_hermitian(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Contract(_))
        ));
        let m = ComplexMatrix::from_rows(&[vec![r(1.0), r(2.0)], vec![r(0.0), r(1.0)]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_and_zero_matrices() {
        let s = eig_hermitian(&ComplexMatrix::zeros(0, 0)).unwrap();
        assert!(s.values.is_empty());
        let s = eig_hermitian(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.values, vec![0.0; 3]);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = ComplexMatrix::from_rows(&[vec![r(2.0), c(0.0, 1.0)], vec![c(0.0, -1.0), r(2.0)]]);
        let s = eig_hermitian(&h).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] - 3.0).abs() < 1e-14);
        assert!(s.reconstruct().max_abs_diff(&h) < 1e-14);
    }

    #[test]
    fn pseudo_inverse_of_singular_diagonal() {
        let p = pseudo_inverse(&ComplexMatrix::diag_real(&[2.0, 0.0]), 1e-9).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn pseudo_inverse_rejects_negative() {
        let m = ComplexMatrix::diag_real(&[1.0, -0.5]);
        assert!(matches!(pseudo_inverse(&m, 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn pseudo_inverse_of_invertible_is_inverse() {
        let h = ComplexMatrix::from_rows(&[
            vec![r(4.0), c(1.0, 1.0), r(0.0)],
            vec![c(1.0, -1.0), r(3.0), c(0.0, 0.5)],
            vec![r(0.0), c(0.0, -0.5), r(2.0)],
        ]);
        let p = pseudo_inverse(&h, 1e-9).unwrap();
        assert!(p.matmul(&h).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-9);
    }
}
