//! Jacobi rotations shared by the two-sided Hermitian eigensolver and the
//! one-sided (Hestenes) SVD.

use super::matrix::{ComplexMatrix, C64};

/// Unitary plane rotation `J = [[c, s], [-conj(s), c]]` with real `c`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation {
    pub c: f64,
    pub s: C64,
}

impl Rotation {
    /// Rotation diagonalising the Hermitian 2x2 block `[[a, g], [conj(g), b]]`
    /// under `J^dagger G J`; the smaller of the two admissible angles is taken.
    pub fn annihilating(a: f64, b: f64, g: C64) -> Self {
        let abs_g = g.norm();
        let theta = (a - b) / (2.0 * abs_g);
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        let t = -sign / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (1.0 + t * t).sqrt();
        let phase = g / abs_g;
        Rotation { c, s: phase * (t * c) }
    }

    /// `M <- M J` on columns `p`, `q`.
    pub fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let (c, s) = (self.c, self.s);
        for k in 0..m.rows() {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            m[(k, p)] = mp * c - mq * s.conj();
            m[(k, q)] = mp * s + mq * c;
        }
    }

    /// `M <- J^dagger M` on rows `p`, `q`.
    pub fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let (c, s) = (self.c, self.s);
        for k in 0..m.cols() {
            let mp = m[(p, k)];
            let mq = m[(q, k)];
            m[(p, k)] = mp * c - mq * s;
            m[(q, k)] = mp * s.conj() + mq * c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::c;

    #[test]
    fn rotation_annihilates_off_diagonal() {
        for &(a, b, g) in &[
            (1.0, 2.0, c(0.3, -0.7)),
            (5.0, 5.0, c(0.0, 1.0)),
            (-1.0, 3.0, c(-2.0, 0.5)),
        ] {
            let mut h = ComplexMatrix::from_rows(&[vec![c(a, 0.0), g], vec![g.conj(), c(b, 0.0)]]);
            let rot = Rotation::annihilating(a, b, g);
            rot.apply_right(&mut h, 0, 1);
            rot.apply_left_adjoint(&mut h, 0, 1);
            assert!(h[(0, 1)].norm() < 1e-14, "{:?}", h);
            assert!(h[(1, 0)].norm() < 1e-14);
            assert!((h[(0, 0)].re + h[(1, 1)].re - a - b).abs() < 1e-13);
        }
    }
}
