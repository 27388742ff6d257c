use super::eigen::check_tau;
use super::jacobi::Rotation;
use super::matrix::{ComplexMatrix, CVector};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) and right singular vectors of a matrix.
#[derive(Clone, Debug)]
pub struct SingularValues {
    pub values: Vec<f64>,
    /// `n x n` unitary; column `j` pairs with `values[j]`.
    pub right: ComplexMatrix,
}

impl SingularValues {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tau: f64) -> usize {
        let cut = tau * self.largest();
        self.values.iter().filter(|&&s| s > cut && s > 0.0).count()
    }
}

/// One-sided Jacobi (Hestenes) SVD.
///
/// Columns of a working copy are orthogonalised pairwise; the accumulated
/// rotations are the right singular vectors. Small singular values come out
/// with absolute error of order `eps * |M|`, which is what the relative rank
/// cut needs.
pub fn svd(m: &ComplexMatrix) -> Result<SingularValues> {
    if !m.is_finite() {
        return Err(Error::Contract("svd input has non-finite entries".into()));
    }
    let n = m.cols();
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = 1e-15;
    // Columns below this squared norm are roundoff; rotating them only churns.
    let negligible = (1e-16 * m.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta) = (0.0, 0.0);
                let mut gamma = super::matrix::ZERO;
                for k in 0..w.rows() {
                    let (wp, wq) = (w[(k, p)], w[(k, q)]);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if alpha <= negligible || beta <= negligible || gamma.norm() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("one-sided Jacobi SVD".into()));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..w.rows()).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    Ok(SingularValues {
        values: order.iter().map(|&j| norms[j]).collect(),
        right: v.select_columns(&order),
    })
}

/// Number of singular values above `tau` times the largest; 0 for the zero matrix.
pub fn rank_tol(m: &ComplexMatrix, tau: f64) -> Result<usize> {
    check_tau(tau)?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0);
    }
    Ok(svd(m)?.rank(tau))
}

/// Orthonormal basis of the numerical null space, `cols - rank_tol` vectors.
pub fn kernel_basis(m: &ComplexMatrix, tau: f64) -> Result<Vec<CVector>> {
    check_tau(tau)?;
    if m.rows() == 0 {
        return Ok(ComplexMatrix::identity(m.cols()).columns());
    }
    let s = svd(m)?;
    let rank = s.rank(tau);
    Ok((rank..m.cols()).map(|j| s.right.column(j)).collect())
}
