//! Matrix pencils attached to subspaces of `C^2 (x) C^N`.
//!
//! For a subspace `V` spanned by `|0>|a_i> + |1>|b_i>` the product vector
//! `(z|0> + w|1>) (x) |f>` is orthogonal to `V` exactly when
//! `C(z, w) f = (A z + B w) f = 0` with `A = conj(a)`, `B = conj(b)` (rows
//! indexed by `i`). `V` contains no product vector iff `C(z, w)` has full row
//! rank `k` at every nonzero `(z, w)`; in that case the Kronecker form of the
//! pencil consists of `N - k` blocks `L_m` only and the minimal indices add
//! up to `k`.
//!
//! Polynomial vectors are stored by powers of `z`: `f(z, w) = sum_i z^i w^(d-i) f_i`.

mod subspace3x3;

pub use subspace3x3::product_vectors_in_subspace_3x3;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bipartite::ProductVector;
use crate::error::{Error, Result};
use crate::numerics::{
    self, kernel_basis, norm, orthonormalize, rank_tol, svd, CVector, ComplexMatrix, C64, ONE,
    ZERO,
};

/// Point of the projective line, stored as a unit vector in `C^2` with `w`
/// real and nonnegative (or `w = 0`, `z = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub z: C64,
    pub w: C64,
}

impl ProjectivePoint {
    pub fn new(z: C64, w: C64) -> Result<Self> {
        let n = (z.norm_sqr() + w.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("(z, w) must be nonzero".into()));
        }
        let (mut z, mut w) = (z / n, w / n);
        if w.norm() > 1e-300 {
            let phase = w.conj() / w.norm();
            z *= phase;
            w = C64::new(w.norm(), 0.0);
        } else {
            z = C64::new(1.0, 0.0);
            w = ZERO;
        }
        Ok(Self { z, w })
    }

    /// The vector `z|0> + w|1>`.
    pub fn ket(&self) -> CVector {
        vec![self.z, self.w]
    }

    pub fn conj(&self) -> Self {
        Self {
            z: self.z.conj(),
            w: self.w,
        }
    }
}

/// Fibonacci lattice on the Bloch sphere, deterministic for each `count`.
pub fn fibonacci_points(count: usize) -> Vec<ProjectivePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|j| {
            let cos_t = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
            let theta = cos_t.clamp(-1.0, 1.0).acos();
            let phi = golden * j as f64;
            ProjectivePoint {
                z: C64::from_polar((theta / 2.0).sin(), phi),
                w: C64::new((theta / 2.0).cos(), 0.0),
            }
        })
        .collect()
}

/// Homogeneous polynomial vector `sum_i z^i w^(degree - i) coeffs[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVector {
    pub degree: usize,
    pub coeffs: Vec<CVector>,
}

impl PolyVector {
    pub fn eval(&self, z: C64, w: C64) -> CVector {
        let n = self.coeffs[0].len();
        let mut out = vec![ZERO; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = z.powu(i as u32) * w.powu((self.degree - i) as u32);
            for (o, x) in out.iter_mut().zip(c) {
                *o += m * x;
            }
        }
        out
    }

    pub fn at(&self, p: &ProjectivePoint) -> CVector {
        self.eval(p.z, p.w)
    }


    fn from_flat(degree: usize, n: usize, v: &[C64]) -> Self {
        Self {
            degree,
            coeffs: v.chunks(n).map(|c| c.to_vec()).collect(),
        }
    }

    /// Coefficients of `z^a w^b f` as a flat vector of degree `degree + a + b`.
    fn shifted_flat(&self, a: usize, b: usize) -> CVector {
        let n = self.coeffs[0].len();
        let d = self.degree + a + b;
        let mut out = vec![ZERO; (d + 1) * n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[(i + a) * n..(i + a + 1) * n].copy_from_slice(c);
        }
        out
    }
}

/// Monomial multipliers `z^u_i w^v_i` that lift all basic solutions to the
/// common degree `delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponents {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub delta: usize,
}

/// The pencil `C(z, w) = A z + B w` of a subspace of `C^2 (x) C^N`.
#[derive(Clone, Debug)]
pub struct PencilForm {
    pub k: usize,
    pub n: usize,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// The subspace contains no product vector.
    pub ces: bool,
    pub normal_rank: usize,
    pub tau: f64,
    indices: Vec<usize>,
    solutions: Vec<PolyVector>,
}

/// Nullspace of `C(z, w)` at one point.
#[derive(Clone, Debug)]
pub struct BundleFiber {
    pub point: ProjectivePoint,
    pub basis: Vec<CVector>,
}

fn sample_points() -> [ProjectivePoint; 3] {
    [
        ProjectivePoint::new(C64::new(0.613, 0.271), C64::new(0.742, 0.0)).unwrap(),
        ProjectivePoint::new(C64::new(-0.358, 0.905), C64::new(0.227, 0.0)).unwrap(),
        ProjectivePoint::new(C64::new(1.0, -0.0712), C64::new(0.0431, 0.0)).unwrap(),
    ]
}

/// Builds the pencil, decides the CES condition and computes a minimal
/// polynomial basis of the kernel.
///
/// `basis` holds vectors of length `2n` in the `|i>_A (x) |j>_B` ordering.
pub fn pencil_from_subspace(n: usize, basis: &[CVector], tau: f64) -> Result<PencilForm> {
    numerics::check_tau(tau)?;
    let k = basis.len();
    if n == 0 {
        return Err(Error::Dimension("N must be positive".into()));
    }
    if basis.iter().any(|v| v.len() != 2 * n) {
        return Err(Error::Dimension(format!("subspace vectors must have length {}", 2 * n)));
    }
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "pencil needs dim V = {k} < N = {n}"
        )));
    }
    if k > 0 && rank_tol(&ComplexMatrix::from_columns(2 * n, basis), tau)? < k {
        return Err(Error::Contract("subspace basis is linearly dependent".into()));
    }
    let a = ComplexMatrix::from_fn(k, n, |i, j| basis[i][j].conj());
    let b = ComplexMatrix::from_fn(k, n, |i, j| basis[i][n + j].conj());
    let mut p = PencilForm {
        k,
        n,
        a,
        b,
        ces: false,
        normal_rank: 0,
        tau,
        indices: Vec::new(),
        solutions: Vec::new(),
    };
    p.normal_rank = sample_points()
        .iter()
        .map(|q| rank_tol(&p.at(q.z, q.w), tau))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    p.solutions = minimal_basis(&p)?;
    p.indices = p.solutions.iter().map(|s| s.degree).collect();
    p.ces = p.normal_rank == k && p.indices.iter().sum::<usize>() == k;
    Ok(p)
}

/// Block-convolution matrix of `C` on polynomial vectors of degree `d`:
/// block row `t` is `A f_{t-1} + B f_t`.
fn convolution(p: &PencilForm, d: usize) -> ComplexMatrix {
    let (k, n) = (p.k, p.n);
    let mut m = ComplexMatrix::zeros((d + 2) * k, (d + 1) * n);
    for t in 0..=d + 1 {
        for i in 0..k {
            for j in 0..n {
                if t >= 1 {
                    m[(t * k + i, (t - 1) * n + j)] = p.a[(i, j)];
                }
                if t <= d {
                    m[(t * k + i, t * n + j)] = p.b[(i, j)];
                }
            }
        }
    }
    m
}

/// Rank with a check that the singular values separate cleanly at `tau`.
fn staircase_rank(m: &ComplexMatrix, tau: f64, d: usize) -> Result<usize> {
    if m.rows() == 0 {
        return Ok(0);
    }
    let s = svd(m)?;
    let r = s.rank(tau);
    let top = s.largest();
    let kept = if r > 0 { s.values[r - 1] } else { top };
    let dropped = s.values.get(r).copied().unwrap_or(0.0);
    if r > 0 && kept < 100.0 * tau * top {
        return Err(Error::Degenerate(format!(
            "degree-{d} convolution matrix has a singular value {kept:e} within a factor 100 of the cut"
        )));
    }
    if dropped > 0.01 * tau * top {
        return Err(Error::Degenerate(format!(
            "degree-{d} convolution matrix has a singular value {dropped:e} just below the cut"
        )));
    }
    Ok(r)
}

/// Greedy minimal basis: at each degree, the kernel of the convolution
/// matrix modulo the monomial multiples of lower-degree solutions.
fn minimal_basis(p: &PencilForm) -> Result<Vec<PolyVector>> {
    let n = p.n;
    let target = n - p.normal_rank;
    let mut found: Vec<PolyVector> = Vec::new();
    let mut prev_kernel = 0usize;
    let mut prev_delta = 0usize;
    for d in 0..=p.k {
        if found.len() >= target {
            break;
        }
        let conv = convolution(p, d);
        let rank = staircase_rank(&conv, p.tau, d)?;
        let n_d = (d + 1) * n - rank;
        let delta = n_d.saturating_sub(prev_kernel);
        if d > 0 && delta < prev_delta {
            return Err(Error::Degenerate(format!(
                "kernel dimensions are not convex at degree {d}"
            )));
        }
        let new_count = delta - if d > 0 { prev_delta } else { 0 };
        prev_kernel = n_d;
        prev_delta = delta;
        if new_count == 0 {
            continue;
        }
        let kernel = kernel_basis(&conv, p.tau)?;
        let mut shifted: Vec<CVector> = Vec::new();
        for g in &found {
            let extra = d - g.degree;
            for a in 0..=extra {
                shifted.push(g.shifted_flat(a, extra - a));
            }
        }
        let fresh = complement_in(&kernel, &shifted, p.tau)?;
        if fresh.len() != new_count {
            return Err(Error::Degenerate(format!(
                "degree {d}: staircase predicts {new_count} new solutions, found {}",
                fresh.len()
            )));
        }
        found.extend(fresh.iter().map(|v| PolyVector::from_flat(d, n, v)));
    }
    if found.len() != target {
        return Err(Error::Degenerate(format!(
            "found {} minimal indices, expected N - rank = {target}",
            found.len()
        )));
    }
    Ok(found)
}

/// Orthonormal basis of `span(kernel)` orthogonal to `span(sub)`.
fn complement_in(kernel: &[CVector], sub: &[CVector], tau: f64) -> Result<Vec<CVector>> {
    if sub.is_empty() {
        return Ok(kernel.to_vec());
    }
    let q = orthonormalize(sub, 1e-10);
    // Rows: <q_j| K, so the complement is the kernel of Q^dagger K.
    let m = ComplexMatrix::from_fn(q.len(), kernel.len(), |i, j| numerics::inner(&q[i], &kernel[j]));
    let coords = kernel_basis(&m, tau.max(1e-8))?;
    let len = kernel[0].len();
    Ok(coords
        .iter()
        .map(|c| {
            let mut v = vec![ZERO; len];
            for (cj, kj) in c.iter().zip(kernel) {
                for (o, x) in v.iter_mut().zip(kj) {
                    *o += cj * x;
                }
            }
            v
        })
        .collect())
}

impl PencilForm {
    /// `C(z, w)`, a `k x N` matrix.
    pub fn at(&self, z: C64, w: C64) -> ComplexMatrix {
        let mut m = self.a.scale(z);
        m.add_scaled(&self.b, w);
        m
    }

    pub fn norm(&self) -> f64 {
        (self.a.frobenius_norm().powi(2) + self.b.frobenius_norm().powi(2)).sqrt()
    }

    fn require_ces(&self, what: &str) -> Result<()> {
        if self.ces {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "{what} needs a completely entangled subspace"
            )))
        }
    }

    /// Monomial exponents with `u_1 = 0`, `u_{i+1} = u_i + m_i + 2` and
    /// common degree `delta = 2N - k - 2`, which makes the `2N - k`
    /// coordinate monomials of the lifted bundle section distinct.
    pub fn exponents(&self) -> Result<Exponents> {
        self.require_ces("exponents")?;
        let total: usize = self.indices.iter().map(|m| m + 2).sum();
        let delta = total - 2;
        let mut u = Vec::with_capacity(self.indices.len());
        let mut acc = 0;
        for m in &self.indices {
            u.push(acc);
            acc += m + 2;
        }
        let v = u.iter().zip(&self.indices).map(|(ui, m)| delta - m - ui).collect();
        Ok(Exponents { u, v, delta })
    }
}

/// Kronecker column minimal indices, ascending.
pub fn minimal_indices(p: &PencilForm) -> Result<Vec<usize>> {
    p.require_ces("minimal_indices")?;
    Ok(p.indices.clone())
}

/// Orthonormal basis of `ker C(z, w)`.
pub fn fiber_at(p: &PencilForm, point: ProjectivePoint) -> Result<BundleFiber> {
    let c = p.at(point.z, point.w);
    let basis = if p.k == 0 {
        ComplexMatrix::identity(p.n).columns()
    } else {
        kernel_basis(&c, p.tau)?
    };
    Ok(BundleFiber { point, basis })
}

/// Minimal polynomial basis of the kernel, one solution per `L_m` block,
/// sorted by degree.
pub fn basic_solutions(p: &PencilForm) -> Result<Vec<PolyVector>> {
    p.require_ces("basic_solutions")?;
    Ok(p.solutions.clone())
}

/// `N x N` matrix whose columns are all coefficient vectors of the basic
/// solutions in order. In the coordinates `Q^{-1}`, the `i`-th solution is
/// the monomial vector `(w^m, z w^(m-1), ..., z^m)` on its own block.
pub fn canonical_change(p: &PencilForm) -> Result<ComplexMatrix> {
    p.require_ces("canonical_change")?;
    let cols: Vec<CVector> = p.solutions.iter().flat_map(|s| s.coeffs.clone()).collect();
    Ok(ComplexMatrix::from_columns(p.n, &cols))
}

/// Sine of the angle between `Q^{-1} f` and the stacked monomial vector for
/// the single-block case `k = N - 1`, where every fiber vector should lie on
/// the rational normal curve.
pub fn rational_normal_curve_defect(p: &PencilForm, point: ProjectivePoint) -> Result<f64> {
    p.require_ces("rational_normal_curve_defect")?;
    if p.indices.len() != 1 {
        return Err(Error::Contract("rational normal curve needs k = N - 1".into()));
    }
    let fiber = fiber_at(p, point)?;
    let f = fiber
        .basis
        .first()
        .ok_or_else(|| Error::Degenerate("empty fiber".into()))?;
    let x = canonical_change(p)?.solve(f)?;
    let m = p.n - 1;
    let mono: CVector = (0..=m)
        .map(|i| point.z.powu(i as u32) * point.w.powu((m - i) as u32))
        .collect();
    let xh = numerics::normalized(&x);
    let mh = numerics::normalized(&mono);
    let along = numerics::inner(&mh, &xh);
    let perp: CVector = xh.iter().zip(&mh).map(|(a, b)| a - along * b).collect();
    Ok(norm(&perp))
}

/// Lifted section `sum_i z^u_i w^v_i g_i(z, w)` at a point.
fn lifted_section(p: &PencilForm, ex: &Exponents, z: C64, w: C64) -> CVector {
    let mut f = vec![ZERO; p.n];
    for ((g, &u), &v) in p.solutions.iter().zip(&ex.u).zip(&ex.v) {
        let m = z.powu(u as u32) * w.powu(v as u32);
        for (o, x) in f.iter_mut().zip(g.eval(z, w)) {
            *o += m * x;
        }
    }
    f
}

/// `2N - k` product vectors spanning `V^perp`, obtained by evaluating the
/// lifted section at equally spaced points of the unit circle `w = 1`.
pub fn spanning_product_vectors(p: &PencilForm) -> Result<Vec<ProductVector>> {
    p.require_ces("spanning_product_vectors")?;
    let ex = p.exponents()?;
    let count = 2 * p.n - p.k;
    let scale = p.norm().max(f64::MIN_POSITIVE);
    for attempt in 0..4 {
        let offset = 0.3819660112501051 * attempt as f64 * 2.0 * PI / count as f64;
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let theta = 2.0 * PI * j as f64 / count as f64 + offset;
            let pt = ProjectivePoint::new(C64::from_polar(1.0, theta), ONE)?;
            let f = lifted_section(p, &ex, pt.z, pt.w);
            let nf = norm(&f);
            if nf == 0.0 {
                break;
            }
            let f: CVector = f.iter().map(|x| x / nf).collect();
            let res = if p.k == 0 { 0.0 } else { norm(&p.at(pt.z, pt.w).mul_vec(&f)) };
            if res > 1e-9 * scale {
                return Err(Error::Degenerate(format!(
                    "bundle section leaves the kernel (residual {res:e})"
                )));
            }
            out.push(ProductVector::new(pt.ket(), f)?);
        }
        if out.len() == count && span_dimension(&out, false, p.tau)? == count {
            return Ok(out);
        }
    }
    Err(Error::Degenerate(format!(
        "spanning set did not reach dimension {count} after 4 point sets"
    )))
}

/// All basic-solution evaluations at the given points.
pub fn bundle_members(p: &PencilForm, points: &[ProjectivePoint]) -> Result<Vec<ProductVector>> {
    p.require_ces("bundle_members")?;
    let mut out = Vec::new();
    for pt in points {
        for g in &p.solutions {
            let f = g.at(pt);
            if norm(&f) > 0.0 {
                out.push(ProductVector::new(pt.ket(), f)?);
            }
        }
    }
    Ok(out)
}

/// Dimension of the span of the tensors, or of their partial conjugates.
pub fn span_dimension(vectors: &[ProductVector], partial_conjugate: bool, tau: f64) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let cols: Vec<CVector> = vectors
        .iter()
        .map(|v| {
            let t = if partial_conjugate { v.partial_conjugate().tensor() } else { v.tensor() };
            numerics::normalized(&t)
        })
        .collect();
    rank_tol(&ComplexMatrix::from_columns(cols[0].len(), &cols), tau)
}

/// `span{|0,i> + |1,i+1> : i < k}` in `C^2 (x) C^N`.
pub fn ces_standard(n: usize, k: usize) -> Result<Vec<CVector>> {
    if k >= n {
        return Err(Error::InvalidParameter(format!("ces_standard needs k < N, got k = {k}, N = {n}")));
    }
    Ok((0..k)
        .map(|i| {
            let mut v = vec![ZERO; 2 * n];
            v[i] = ONE;
            v[n + i + 1] = ONE;
            v
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, DEFAULT_TAU};

    fn pencil(n: usize, basis: &[CVector]) -> PencilForm {
        pencil_from_subspace(n, basis, DEFAULT_TAU).unwrap()
    }

    #[test]
    fn bell_vector_pencil() {
        let p = pencil(2, &ces_standard(2, 1).unwrap());
        assert!(p.ces);
        assert_eq!(p.a, ComplexMatrix::from_rows(&[vec![ONE, ZERO]]));
        assert_eq!(p.b, ComplexMatrix::from_rows(&[vec![ZERO, ONE]]));
        assert_eq!(minimal_indices(&p).unwrap(), vec![1]);
    }

    #[test]
    fn product_vector_breaks_ces() {
        let mut v = vec![ZERO; 6];
        v[1] = ONE; // |0,1>
        let p = pencil(3, &[v]);
        assert!(!p.ces);
        assert!(minimal_indices(&p).is_err());
    }

    #[test]
    fn empty_pencil() {
        let p = pencil(4, &[]);
        assert!(p.ces);
        assert_eq!(minimal_indices(&p).unwrap(), vec![0; 4]);
        let pt = ProjectivePoint::new(c(0.3, 0.1), ONE).unwrap();
        assert_eq!(fiber_at(&p, pt).unwrap().basis.len(), 4);
        let span = spanning_product_vectors(&p).unwrap();
        assert_eq!(span.len(), 8);
    }

    #[test]
    fn maximal_shift_subspace_is_one_block() {
        for n in 2..7 {
            let p = pencil(n, &ces_standard(n, n - 1).unwrap());
            assert_eq!(minimal_indices(&p).unwrap(), vec![n - 1]);
            let pt = ProjectivePoint::new(c(0.4, -0.9), c(0.7, 0.0)).unwrap();
            let d = rational_normal_curve_defect(&p, pt).unwrap();
            assert!(d < 1e-12, "n = {n}: {d}");
        }
    }

    #[test]
    fn fiber_at_infinity_of_shift_subspace() {
        // At [1 : 0] the equations read f_0 = ... = f_{N-2} = 0.
        let p = pencil(4, &ces_standard(4, 3).unwrap());
        let fiber = fiber_at(&p, ProjectivePoint::new(ONE, ZERO).unwrap()).unwrap();
        assert_eq!(fiber.basis.len(), 1);
        assert!((fiber.basis[0][3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spanning_set_lies_in_complement() {
        let basis = ces_standard(4, 2).unwrap();
        let p = pencil(4, &basis);
        let span = spanning_product_vectors(&p).unwrap();
        assert_eq!(span.len(), 6);
        for pv in &span {
            let t = pv.tensor();
            for v in &basis {
                assert!(numerics::inner(v, &t).norm() < 1e-12);
            }
        }
        assert_eq!(span_dimension(&span, false, DEFAULT_TAU).unwrap(), 6);
    }

    #[test]
    fn projective_gauge() {
        let p = ProjectivePoint::new(c(0.0, 2.0), c(0.0, 2.0)).unwrap();
        assert!((p.w.im).abs() < 1e-15 && p.w.re > 0.0);
        assert!((p.z - c(1.0, 0.0) / 2f64.sqrt()).norm() < 1e-15);
        assert!(ProjectivePoint::new(ZERO, ZERO).is_err());
    }

    #[test]
    fn dependent_basis_rejected() {
        let b = ces_standard(3, 1).unwrap();
        let twice = vec![b[0].clone(), b[0].clone()];
        assert!(matches!(pencil_from_subspace(3, &twice, DEFAULT_TAU), Err(Error::Contract(_))));
    }
}
