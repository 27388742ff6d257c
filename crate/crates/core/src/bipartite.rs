//! Bipartite states on `C^M (x) C^N` and their partial transposes.
//!
//! Basis ordering is fixed: `|i>_A (x) |j>_B` is row `i * N + j`. Under this
//! ordering the partial transpose swaps the `A`-indexed `N x N` blocks:
//! block `(i, k)` of `rho^G` is block `(k, i)` of `rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    self, conj_vec, eig_hermitian, kron_vec, norm, normalized, rank_tol, svd, CVector,
    ComplexMatrix, C64, ZERO,
};

/// Hermitian operator on `C^M (x) C^N`, not normalised.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl BipartiteState {
    /// Validates shape and Hermiticity (within `1e-12` relative).
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("local dimensions must be positive".into()));
        }
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::Dimension(format!(
                "a {dim_a}x{dim_b} state needs a {d}x{d} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::Contract("state matrix has non-finite entries".into()));
        }
        if !matrix.is_hermitian() {
            return Err(Error::Contract(format!(
                "state matrix is not Hermitian (defect {:e})",
                matrix.hermiticity_defect()
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    /// Skips the Hermiticity check; the matrix is symmetrised instead.
    pub(crate) fn from_hermitian(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), dim_a * dim_b);
        Self {
            dim_a,
            dim_b,
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn zero(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            matrix: ComplexMatrix::zeros(d, d),
        }
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            matrix: ComplexMatrix::identity(dim_a * dim_b),
        }
    }

    #[inline]
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[inline]
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Row of `|i>_A (x) |j>_B`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }

    /// `|i, j>` as a vector.
    pub fn basis_ket(&self, i: usize, j: usize) -> CVector {
        ket(self.dim_a, self.dim_b, i, j)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim_a == other.dim_a && self.dim_b == other.dim_b
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{}x{} state combined with {}x{} state",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self::from_hermitian(self.dim_a, self.dim_b, self.matrix.add(&other.matrix)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self::from_hermitian(self.dim_a, self.dim_b, self.matrix.sub(&other.matrix)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_hermitian(self.dim_a, self.dim_b, self.matrix.scale_real(s))
    }

    /// `self + w |v><v|`
    pub fn plus_projector(&self, w: f64, v: &[C64]) -> Self {
        let mut m = self.matrix.clone();
        m.add_scaled(&ComplexMatrix::outer(v), numerics::r(w));
        Self::from_hermitian(self.dim_a, self.dim_b, m)
    }

    /// Same operator viewed in `C^M (x) C^new_dim_b`, with `|j>_B` kept in place.
    pub fn extend_b(&self, new_dim_b: usize) -> Result<Self> {
        if new_dim_b < self.dim_b {
            return Err(Error::Dimension("extend_b cannot shrink the B system".into()));
        }
        let d = self.dim_a * new_dim_b;
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..self.dim_a {
            for j in 0..self.dim_b {
                for k in 0..self.dim_a {
                    for l in 0..self.dim_b {
                        m[(i * new_dim_b + j, k * new_dim_b + l)] =
                            self.matrix[(self.index(i, j), self.index(k, l))];
                    }
                }
            }
        }
        Ok(Self::from_hermitian(self.dim_a, new_dim_b, m))
    }

    /// Eigenvalues bounded below by `-tau * tr`.
    pub fn is_psd(&self, tau: f64) -> Result<bool> {
        let spec = eig_hermitian(&self.matrix)?;
        Ok(spec.min_value() >= -tau * self.trace().abs())
    }
}

/// `|i>_A (x) |j>_B` in `C^M (x) C^N`.
pub fn ket(dim_a: usize, dim_b: usize, i: usize, j: usize) -> CVector {
    let mut v = vec![ZERO; dim_a * dim_b];
    v[i * dim_b + j] = numerics::ONE;
    v
}

/// Nonzero product vector `|a> (x) |b>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    #[serde(with = "crate::io::complex_vec")]
    pub a: CVector,
    #[serde(with = "crate::io::complex_vec")]
    pub b: CVector,
}

impl ProductVector {
    pub fn new(a: CVector, b: CVector) -> Result<Self> {
        if a.is_empty() || b.is_empty() || norm(&a) == 0.0 || norm(&b) == 0.0 {
            return Err(Error::InvalidParameter("product vector factors must be nonzero".into()));
        }
        Ok(Self { a, b })
    }

    pub fn from_real(a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(numerics::real_vec(a), numerics::real_vec(b))
    }

    pub fn tensor(&self) -> CVector {
        kron_vec(&self.a, &self.b)
    }

    /// `|a*, b>`
    pub fn partial_conjugate(&self) -> Self {
        Self {
            a: conj_vec(&self.a),
            b: self.b.clone(),
        }
    }

    /// Unit factors with the phase of `a` fixed (largest entry real positive);
    /// the overall scale is dropped.
    pub fn normalized(&self) -> Self {
        let a = numerics::phase_fixed(&normalized(&self.a));
        let b = numerics::phase_fixed(&normalized(&self.b));
        Self { a, b }
    }

    pub fn norm_sqr(&self) -> f64 {
        (norm(&self.a) * norm(&self.b)).powi(2)
    }

    /// `|<u|v>| / (|u||v|)` of the tensors, 1 for parallel vectors.
    pub fn overlap(&self, other: &Self) -> f64 {
        let fa = numerics::inner(&self.a, &other.a).norm() / (norm(&self.a) * norm(&other.a));
        let fb = numerics::inner(&self.b, &other.b).norm() / (norm(&self.b) * norm(&other.b));
        fa * fb
    }

    /// Parallel up to a scalar, within `tol` on the overlap.
    pub fn parallel_to(&self, other: &Self, tol: f64) -> bool {
        self.a.len() == other.a.len()
            && self.b.len() == other.b.len()
            && self.overlap(other) >= 1.0 - tol
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.tensor())
    }
}

/// One weighted term `weight |a,b><a,b|` of a separable decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub vector: ProductVector,
}

impl ProductTerm {
    pub fn new(weight: f64, vector: ProductVector) -> Self {
        Self { weight, vector }
    }

    pub fn unit(vector: ProductVector) -> Self {
        Self { weight: 1.0, vector }
    }
}

/// `(rank rho, rank rho^G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Birank {
    pub r: usize,
    pub s: usize,
}

impl Birank {
    pub fn new(r: usize, s: usize) -> Self {
        Self { r, s }
    }

    pub fn max(&self) -> usize {
        self.r.max(self.s)
    }
}

impl std::fmt::Display for Birank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.r, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PPT")]
    Ppt,
    #[serde(rename = "NPT")]
    Npt,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Ppt => "PPT",
            Verdict::Npt => "NPT",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub negative_count: usize,
    pub min_eigenvalue: f64,
    pub tau_used: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Transpose on the `A` indices.
pub fn partial_transpose(rho: &BipartiteState) -> BipartiteState {
    let (m, n) = (rho.dim_a, rho.dim_b);
    let src = &rho.matrix;
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for k in 0..m {
            for j in 0..n {
                for l in 0..n {
                    out[(k * n + j, i * n + l)] = src[(i * n + j, k * n + l)];
                }
            }
        }
    }
    BipartiteState {
        dim_a: m,
        dim_b: n,
        matrix: out,
    }
}

/// Reduced matrix of the named side: `Side::A` gives `Tr_B rho`.
pub fn partial_trace(rho: &BipartiteState, side: Side) -> ComplexMatrix {
    let (m, n) = (rho.dim_a, rho.dim_b);
    let src = &rho.matrix;
    match side {
        Side::A => ComplexMatrix::from_fn(m, m, |i, k| {
            (0..n).map(|j| src[(i * n + j, k * n + j)]).sum()
        }),
        Side::B => ComplexMatrix::from_fn(n, n, |j, l| {
            (0..m).map(|i| src[(i * n + j, i * n + l)]).sum()
        }),
    }
}

pub fn birank(rho: &BipartiteState, tau: f64) -> Result<Birank> {
    let r = rank_tol(&rho.matrix, tau)?;
    let s = rank_tol(&partial_transpose(rho).matrix, tau)?;
    Ok(Birank { r, s })
}

/// Counts eigenvalues of `rho^G` below `-tau * tr(rho)`.
pub fn classify(rho: &BipartiteState, tau: f64) -> Result<Classification> {
    numerics::check_tau(tau)?;
    let spec = eig_hermitian(&partial_transpose(rho).matrix)?;
    let cut = -tau * rho.trace().abs();
    let negative_count = spec.values.iter().filter(|&&x| x < cut).count();
    Ok(Classification {
        verdict: if negative_count == 0 {
            Verdict::Ppt
        } else {
            Verdict::Npt
        },
        negative_count,
        min_eigenvalue: spec.min_value(),
        tau_used: tau,
    })
}

/// `(rank rho_A, rank rho_B)`.
pub fn local_ranks(rho: &BipartiteState, tau: f64) -> Result<(usize, usize)> {
    Ok((
        rank_tol(&partial_trace(rho, Side::A), tau)?,
        rank_tol(&partial_trace(rho, Side::B), tau)?,
    ))
}

/// Result of an invertible local operation, with the factors' condition numbers.
#[derive(Clone, Debug)]
pub struct IloImage {
    pub state: BipartiteState,
    pub condition_a: f64,
    pub condition_b: f64,
}

fn condition_number(m: &ComplexMatrix, what: &str) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{what} factor must be square")));
    }
    let s = svd(m)?;
    let n = s.values.len();
    if s.rank(numerics::DEFAULT_TAU) < n {
        return Err(Error::Domain(format!("{what} factor is singular")));
    }
    Ok(s.largest() / s.values[n - 1])
}

/// `(A (x) B) rho (A (x) B)^dagger`.
pub fn apply_ilo(rho: &BipartiteState, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<IloImage> {
    if a.rows() != rho.dim_a || b.rows() != rho.dim_b {
        return Err(Error::Dimension(format!(
            "ILO factors {}x{} and {}x{} do not act on a {}x{} state",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            rho.dim_a,
            rho.dim_b
        )));
    }
    let condition_a = condition_number(a, "A")?;
    let condition_b = condition_number(b, "B")?;
    let v = a.kron(b);
    let m = v.matmul(&rho.matrix).matmul(&v.adjoint());
    Ok(IloImage {
        state: BipartiteState::from_hermitian(rho.dim_a, rho.dim_b, m),
        condition_a,
        condition_b,
    })
}

/// `sum_i w_i |a_i, b_i><a_i, b_i|`.
pub fn mixture(terms: &[ProductTerm]) -> Result<BipartiteState> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("mixture needs at least one term".into()))?;
    let (m, n) = (first.vector.a.len(), first.vector.b.len());
    let mut acc = ComplexMatrix::zeros(m * n, m * n);
    for t in terms {
        if !t.weight.is_finite() || t.weight <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be positive, got {}",
                t.weight
            )));
        }
        if t.vector.a.len() != m || t.vector.b.len() != n {
            return Err(Error::Dimension("mixture terms have different shapes".into()));
        }
        if norm(&t.vector.a) == 0.0 || norm(&t.vector.b) == 0.0 {
            return Err(Error::InvalidParameter("zero factor vector in mixture".into()));
        }
        acc.add_scaled(&t.vector.projector(), numerics::r(t.weight));
    }
    Ok(BipartiteState::from_hermitian(m, n, acc))
}

/// Checks a claimed direct-sum decomposition: the parts add up to `rho`
/// within `tau * tr(rho)` and the ranges of their reduced matrices on `side`
/// are linearly independent.
pub fn verify_direct_sum(
    rho: &BipartiteState,
    parts: &[BipartiteState],
    side: Side,
    tau: f64,
) -> Result<bool> {
    numerics::check_tau(tau)?;
    let mut total = BipartiteState::zero(rho.dim_a, rho.dim_b);
    for p in parts {
        total = total.add(p)?;
    }
    if total.matrix.max_abs_diff(&rho.matrix) > tau * rho.trace().abs().max(f64::MIN_POSITIVE) {
        return Ok(false);
    }
    let mut stacked: Vec<CVector> = Vec::new();
    let mut rank_sum = 0;
    for p in parts {
        let reduced = partial_trace(p, side);
        let range = eig_hermitian(&reduced.hermitian_part())?.range_vectors(tau);
        rank_sum += range.len();
        stacked.extend(range);
    }
    if rank_sum == 0 {
        return Ok(true);
    }
    let local = match side {
        Side::A => rho.dim_a,
        Side::B => rho.dim_b,
    };
    if rank_sum > local {
        return Ok(false);
    }
    let basis = ComplexMatrix::from_columns(local, &stacked);
    Ok(rank_tol(&basis, tau)? == rank_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{r, DEFAULT_TAU};

    fn bell(n: usize) -> BipartiteState {
        let mut v = ket(2, n, 0, 0);
        v[n + 1] = r(1.0);
        BipartiteState::zero(2, n).plus_projector(1.0, &v)
    }

    #[test]
    fn diagonal_state_is_its_own_partial_transpose() {
        let rho = BipartiteState::new(2, 3, ComplexMatrix::diag_real(&[1., 2., 3., 4., 5., 6.])).unwrap();
        assert_eq!(partial_transpose(&rho), rho);
    }

    #[test]
    fn bell_partial_transpose_is_swap() {
        let pt = partial_transpose(&bell(2));
        let spec = eig_hermitian(pt.matrix()).unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (x, y) in spec.values.iter().zip(expected) {
            assert!((x - y).abs() < 1e-14);
        }
        let cls = classify(&bell(2), DEFAULT_TAU).unwrap();
        assert_eq!(cls.verdict, Verdict::Npt);
        assert_eq!(cls.negative_count, 1);
    }

    #[test]
    fn reduced_matrices_of_product_ket() {
        let rho = BipartiteState::zero(2, 2).plus_projector(1.0, &ket(2, 2, 0, 0));
        let e00 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert_eq!(partial_trace(&rho, Side::A), e00);
        assert_eq!(partial_trace(&rho, Side::B), e00);
        assert_eq!(local_ranks(&rho, DEFAULT_TAU).unwrap(), (1, 1));
    }

    #[test]
    fn rejects_bad_shapes_and_non_hermitian() {
        assert!(BipartiteState::new(2, 2, ComplexMatrix::identity(3)).is_err());
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = r(1.0);
        assert!(matches!(BipartiteState::new(2, 2, m), Err(Error::Contract(_))));
    }

    #[test]
    fn identity_birank() {
        let b = birank(&BipartiteState::identity(2, 3), DEFAULT_TAU).unwrap();
        assert_eq!(b, Birank::new(6, 6));
    }

    #[test]
    fn mixture_single_term_is_projector() {
        let pv = ProductVector::from_real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let rho = mixture(&[ProductTerm::unit(pv)]).unwrap();
        assert_eq!(birank(&rho, DEFAULT_TAU).unwrap(), Birank::new(1, 1));
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_rejects_bad_terms() {
        let pv = ProductVector::from_real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(mixture(&[]).is_err());
        assert!(mixture(&[ProductTerm::new(-1.0, pv.clone())]).is_err());
        assert!(ProductVector::from_real(&[0.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn singular_ilo_rejected() {
        let rho = BipartiteState::identity(2, 2);
        let sing = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(apply_ilo(&rho, &sing, &ComplexMatrix::identity(2)).is_err());
        let same = apply_ilo(&rho, &ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(same.state, rho);
        assert!((same.condition_a - 1.0).abs() < 1e-15);
    }

    #[test]
    fn direct_sum_on_disjoint_b_blocks() {
        let p1 = BipartiteState::zero(2, 2).plus_projector(1.0, &ket(2, 2, 0, 0));
        let p2 = BipartiteState::zero(2, 2).plus_projector(1.0, &ket(2, 2, 1, 1));
        let rho = p1.add(&p2).unwrap();
        assert!(verify_direct_sum(&rho, &[p1.clone(), p2.clone()], Side::B, DEFAULT_TAU).unwrap());
        // Both parts supported on |0>_B.
        let q2 = BipartiteState::zero(2, 2).plus_projector(1.0, &ket(2, 2, 1, 0));
        let rho2 = p1.add(&q2).unwrap();
        assert!(!verify_direct_sum(&rho2, &[p1.clone(), q2], Side::B, DEFAULT_TAU).unwrap());
        // Parts that do not add up.
        assert!(!verify_direct_sum(&rho, &[p1], Side::B, DEFAULT_TAU).unwrap());
    }

    #[test]
    fn extend_b_keeps_entries() {
        let rho = bell(2);
        let big = rho.extend_b(3).unwrap();
        assert_eq!(big.dim_b(), 3);
        assert_eq!(birank(&big, DEFAULT_TAU).unwrap(), birank(&rho, DEFAULT_TAU).unwrap());
        assert_eq!(big.matrix()[(big.index(1, 1), big.index(0, 0))], r(1.0));
    }
}
