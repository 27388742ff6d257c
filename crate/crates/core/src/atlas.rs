//! Explicit states with their expected certificates.
//!
//! Every constructor returns the state as written down (unnormalized) and
//! the birank, PPT status and, where known, length and negative-eigenvalue
//! count it is expected to have. [`ExpectedCertificate::check`] compares a
//! state against its certificate.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bipartite::{
    birank, classify, ket, local_ranks, mixture, partial_transpose, BipartiteState, Birank,
    ProductTerm, ProductVector, Verdict,
};
use crate::error::{Error, Result};
use crate::numerics::{
    self as numerics, c, kernel_basis, kron_vec, orthonormalize, projection_residual, r, rank_tol,
    CVector, ComplexMatrix, C64, DEFAULT_TAU, ONE, ZERO,
};
use crate::pencil::{
    bundle_members, ces_standard, fibonacci_points, pencil_from_subspace,
    product_vectors_in_subspace_3x3, span_dimension, spanning_product_vectors,
};
use crate::surgery::subtraction_analysis;

/// Identifiers accepted by [`fixed_example`].
pub const FIXED_IDS: [&str; 15] = [
    "table1-(2,2)",
    "table1-(3,3)",
    "table1-(3,4)",
    "table1-(4,4)",
    "table2-(3,3)",
    "table2-(4,4)",
    "table2-(4,5)",
    "table2-(4,6)",
    "table2-(5,5)",
    "table2-(5,6)",
    "table2-(6,6)",
    "example13",
    "example13-ext",
    "example20",
    "example26",
];

/// Primitive cube root of unity `(-1 + i sqrt 3) / 2`.
pub fn zeta() -> C64 {
    c(-0.5, 3f64.sqrt() / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCertificate {
    pub birank: Birank,
    pub ppt: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entangled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_count: Option<usize>,
}

impl ExpectedCertificate {
    fn new(r: usize, s: usize, ppt: bool) -> Self {
        Self {
            birank: Birank::new(r, s),
            ppt,
            entangled: None,
            length: None,
            negative_count: None,
        }
    }

    fn separable(r: usize, s: usize, length: usize) -> Self {
        Self {
            entangled: Some(false),
            length: Some(length),
            ..Self::new(r, s, true)
        }
    }

    fn entangled(r: usize, s: usize) -> Self {
        Self {
            entangled: Some(true),
            ..Self::new(r, s, true)
        }
    }

    /// Recomputes birank, PPT status and negative count.
    pub fn check(&self, rho: &BipartiteState, tau: f64) -> Result<CertificateCheck> {
        let b = birank(rho, tau)?;
        let cls = classify(rho, tau)?;
        let ppt = cls.verdict == Verdict::Ppt;
        let pass = b == self.birank
            && ppt == self.ppt
            && self.negative_count.is_none_or(|n| n == cls.negative_count);
        Ok(CertificateCheck {
            birank: b,
            ppt,
            negative_count: cls.negative_count,
            pass,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub birank: Birank,
    pub ppt: bool,
    pub negative_count: usize,
    pub pass: bool,
}

/// A fixed example, with a product decomposition when one is written down.
#[derive(Clone, Debug)]
pub struct Example {
    pub id: String,
    pub state: BipartiteState,
    pub certificate: ExpectedCertificate,
    pub decomposition: Option<Vec<ProductTerm>>,
    /// Set when the printed state failed its certificate and was replaced.
    pub note: Option<String>,
}

fn rv(x: &[f64]) -> CVector {
    x.iter().map(|&v| r(v)).collect()
}

fn pv(a: &[f64], b: &[f64]) -> ProductVector {
    ProductVector::new(rv(a), rv(b)).expect("nonzero factors")
}

fn basis_terms(n: usize, entries: &[(usize, usize, f64)]) -> Vec<ProductTerm> {
    entries
        .iter()
        .map(|&(i, j, w)| {
            let mut a = vec![0.0; 2];
            a[i] = 1.0;
            let mut b = vec![0.0; n];
            b[j] = 1.0;
            ProductTerm::new(w, pv(&a, &b))
        })
        .collect()
}

fn from_vectors(m: usize, n: usize, vs: &[CVector]) -> BipartiteState {
    vs.iter()
        .fold(BipartiteState::zero(m, n), |acc, v| acc.plus_projector(1.0, v))
}

/// `(1, x) (x) (1, x)` padded to `C^n` on the `B` side, weighted 1/3.
fn cube_root_terms(n: usize, reversed: bool) -> Vec<ProductTerm> {
    (0..3)
        .map(|k| {
            let x = zeta().powu(k);
            let two = if reversed { vec![x, ONE] } else { vec![ONE, x] };
            let mut b = two.clone();
            b.resize(n, ZERO);
            ProductTerm::new(1.0 / 3.0, ProductVector::new(two, b).expect("nonzero"))
        })
        .collect()
}

fn example20_terms() -> Vec<ProductTerm> {
    let mut t = basis_terms(2, &[(0, 0, 1.0)]);
    t.extend(cube_root_terms(2, false));
    t
}

fn example13_terms() -> Vec<ProductTerm> {
    let mut t = basis_terms(3, &[(0, 2, 1.0), (1, 1, 1.0)]);
    t.extend(cube_root_terms(3, true));
    t
}

fn table2_46_terms() -> Vec<ProductTerm> {
    let i = c(0.0, 1.0);
    let f = |x: C64| {
        ProductVector::new(vec![(ONE + x) / (x - ONE), ONE], vec![-ONE, (x - ONE) / (x + ONE), x - ONE])
            .expect("nonzero")
    };
    let mut t = basis_terms(3, &[(0, 0, 1.0), (1, 1, 1.0)]);
    t.push(ProductTerm::unit(pv(&[1.0, 1.0], &[0.0, 0.0, 1.0])));
    t.push(ProductTerm::unit(pv(&[1.0, -1.0], &[1.0, 1.0, 1.0])));
    t.push(ProductTerm::unit(f(i)));
    t.push(ProductTerm::unit(f(-i)));
    t
}

/// The four non-product vectors whose projectors sum to the `(4, 6)`
/// state of the `2 (x) 3` construction with characteristic polynomial
/// `t^6 - 19t^5 + 133t^4 - 413t^3 + 520t^2 - 148t + 4` for its partial
/// transpose.
pub fn example26_vectors() -> Vec<CVector> {
    let k = |i, j| ket(2, 3, i, j);
    let comb = |parts: &[(f64, CVector)]| -> CVector {
        let mut v = vec![ZERO; 6];
        for (w, x) in parts {
            for (o, y) in v.iter_mut().zip(x) {
                *o += y * *w;
            }
        }
        v
    };
    vec![
        comb(&[(2.0, k(0, 0))]),
        comb(&[(1.0, k(1, 0)), (2.0, k(1, 1))]),
        comb(&[(2.0, k(0, 1)), (1.0, k(0, 2)), (1.0, k(1, 2))]),
        comb(&[(1.0, k(0, 2)), (1.0, k(1, 0)), (-1.0, k(1, 1)), (-1.0, k(1, 2))]),
    ]
}

/// Printed characteristic polynomial of the partial transpose of the
/// `example26` state, highest degree first.
pub const EXAMPLE26_CHAR_POLY: [f64; 7] = [1.0, -19.0, 133.0, -413.0, 520.0, -148.0, 4.0];

/// One of the fixed states in [`FIXED_IDS`].
pub fn fixed_example(id: &str) -> Result<Example> {
    let ex = |state, certificate, decomposition| Example {
        id: id.to_string(),
        state,
        certificate,
        decomposition,
        note: None,
    };
    let diag = |n: usize, entries: &[(usize, usize, f64)], r: usize, s: usize| -> Result<Example> {
        let terms = basis_terms(n, entries);
        Ok(ex(mixture(&terms)?, ExpectedCertificate::separable(r, s, r.max(s)), Some(terms)))
    };
    let ones = |n: usize| -> Vec<(usize, usize, f64)> {
        (0..2).flat_map(|i| (0..n).map(move |j| (i, j, 1.0))).collect()
    };
    match id {
        "table1-(2,2)" => diag(2, &[(0, 0, 1.0), (1, 1, 1.0)], 2, 2),
        "table1-(3,3)" => {
            let mut t = basis_terms(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
            t.push(ProductTerm::unit(pv(&[1.0, 1.0], &[1.0, 1.0])));
            Ok(ex(mixture(&t)?, ExpectedCertificate::separable(3, 3, 3), Some(t)))
        }
        "table1-(3,4)" | "example20" => {
            let k = |i, j| ket(2, 2, i, j);
            let sym: CVector = k(0, 1).iter().zip(&k(1, 0)).map(|(x, y)| x + y).collect();
            let state = BipartiteState::zero(2, 2)
                .plus_projector(2.0, &k(0, 0))
                .plus_projector(1.0, &k(1, 1))
                .plus_projector(1.0, &sym);
            Ok(ex(state, ExpectedCertificate::separable(3, 4, 4), Some(example20_terms())))
        }
        "table1-(4,4)" => diag(2, &ones(2), 4, 4),
        "table2-(3,3)" => diag(3, &[(0, 0, 1.0), (1, 1, 1.0), (1, 2, 1.0)], 3, 3),
        "table2-(4,4)" => diag(3, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0), (1, 2, 1.0)], 4, 4),
        "table2-(4,5)" | "example13" => {
            let state = example13_state();
            Ok(ex(state, ExpectedCertificate::separable(4, 5, 5), Some(example13_terms())))
        }
        "table2-(4,6)" => {
            let t = table2_46_terms();
            let state = mixture(&t)?;
            let cert = ExpectedCertificate::separable(4, 6, 6);
            if cert.check(&state, DEFAULT_TAU)?.pass {
                Ok(ex(state, cert, Some(t)))
            } else {
                let b = birank(&state, DEFAULT_TAU)?;
                let mut e = fixed_example("example26")?;
                e.id = id.to_string();
                e.note = Some(format!("printed state has birank {b}; replaced by example26"));
                Ok(e)
            }
        }
        "table2-(5,5)" => diag(
            3,
            &[(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (1, 1, 1.0), (1, 2, 1.0)],
            5,
            5,
        ),
        "table2-(5,6)" | "example13-ext" => {
            let state = example13_state().plus_projector(1.0, &ket(2, 3, 1, 2));
            let mut t = example13_terms();
            t.extend(basis_terms(3, &[(1, 2, 1.0)]));
            Ok(ex(state, ExpectedCertificate::separable(5, 6, 6), Some(t)))
        }
        "table2-(6,6)" => diag(3, &ones(3), 6, 6),
        "example26" => Ok(ex(
            from_vectors(2, 3, &example26_vectors()),
            ExpectedCertificate::separable(4, 6, 6),
            None,
        )),
        _ => Err(Error::InvalidParameter(format!(
            "unknown example id {id:?}; expected one of {}",
            FIXED_IDS.join(", ")
        ))),
    }
}

fn example13_state() -> BipartiteState {
    let k = |i, j| ket(2, 3, i, j);
    let sym: CVector = k(0, 1).iter().zip(&k(1, 0)).map(|(x, y)| x + y).collect();
    BipartiteState::zero(2, 3)
        .plus_projector(1.0, &k(0, 0))
        .plus_projector(1.0, &k(0, 2))
        .plus_projector(2.0, &k(1, 1))
        .plus_projector(1.0, &sym)
}

/// `C = [C0 C1 C2]`, each block `4 x 3`.
fn prop2_blocks(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
    let rows: [[f64; 9]; 4] = [
        [0.0, a, b, 0.0, 0.0, 0.0, 0.0, -1.0 / b, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, c, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, -c, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, -1.0 / d, d, 0.0, 0.0],
    ];
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    ComplexMatrix::from_real_rows(&refs)
}

/// `C^dagger C` for the `3 (x) 3` rank-four family invariant under partial
/// transpose. `c = 0` is admitted as the boundary family of
/// [`lemma14_family`].
pub fn prop2_sigma(a: f64, b: f64, c: f64, d: f64) -> Result<BipartiteState> {
    if !(a > 0.0 && b > 0.0 && d > 0.0 && c >= 0.0) || ![a, b, c, d].iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need a, b, d > 0 and c >= 0, got ({a}, {b}, {c}, {d})"
        )));
    }
    let cm = prop2_blocks(a, b, c, d);
    BipartiteState::new(3, 3, cm.adjoint().matmul(&cm))
}

/// Boundary member `c = 0` of the [`prop2_sigma`] family.
pub fn lemma14_family(a: f64, b: f64, d: f64) -> Result<BipartiteState> {
    prop2_sigma(a, b, 0.0, d)
}

/// The four weighted product vectors summing to [`lemma14_family`].
pub fn lemma14_decomposition(a: f64, b: f64, d: f64) -> Vec<ProductTerm> {
    let (b2, d2) = (b * b, d * d);
    vec![
        ProductTerm::new(1.0 / (1.0 + b2), pv(&[1.0, 0.0, 0.0], &[0.0, a * b, 1.0 + b2])),
        ProductTerm::new(1.0 / (1.0 + d2), pv(&[0.0, d, 1.0 + d2], &[1.0, 0.0, 0.0])),
        ProductTerm::new(1.0 / (d2 * (1.0 + d2)), pv(&[0.0, 1.0, 0.0], &[d, 0.0, -(1.0 + d2)])),
        ProductTerm::new(1.0 / (b2 * (1.0 + b2)), pv(&[a * b, 0.0, -(1.0 + b2)], &[0.0, 1.0, 0.0])),
    ]
}

/// `sum_i p_i |ii><ii| + |e,e><e,e|` with `|e> = |0> + |1> + |2>`.
pub fn lemma14_target(p0: f64, p1: f64, p2: f64) -> Result<BipartiteState> {
    check_positive(&[p0, p1, p2])?;
    let e = rv(&[1.0, 1.0, 1.0]);
    let mut s = BipartiteState::zero(3, 3).plus_projector(1.0, &kron_vec(&e, &e));
    for (i, p) in [p0, p1, p2].into_iter().enumerate() {
        s = s.plus_projector(p, &ket(3, 3, i, i));
    }
    Ok(s)
}

fn check_positive(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("parameters must be positive, got {xs:?}")))
    }
}

/// Parameters and local operator carrying [`lemma14_family`] onto
/// [`lemma14_target`].
#[derive(Clone, Debug)]
pub struct Lemma14Match {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub va: ComplexMatrix,
    pub vb: ComplexMatrix,
    /// `b (1 + b^2)^(-3/2) V_A (x) V_B`
    pub v: ComplexMatrix,
}

pub fn lemma14_match(p0: f64, p1: f64, p2: f64) -> Result<Lemma14Match> {
    check_positive(&[p0, p1, p2])?;
    let b = p0.sqrt();
    let d = (p1 / p2).sqrt();
    let (b2, d2) = (b * b, d * d);
    let a = (p1 * d2 / (b2 * b2) * ((1.0 + b2) / (1.0 + d2)).powi(3)).sqrt();
    let va = ComplexMatrix::from_real_rows(&[
        &[(1.0 + b2) / (a * b), 0.0, 0.0],
        &[0.0, 0.0, -1.0],
        &[0.0, (1.0 + d2) / d, -1.0],
    ]);
    let vb = ComplexMatrix::from_real_rows(&[
        &[0.0, 1.0 + b2, 0.0],
        &[-a * b * (1.0 + d2) / d, 1.0 + b2, -a * b],
        &[0.0, 1.0 + b2, -a * b],
    ]);
    let v = va.kron(&vb).scale_real(b * (1.0 + b2).powf(-1.5));
    Ok(Lemma14Match { a, b, d, va, vb, v })
}

/// The six kernel product vectors of `prop2_sigma(1, 1, 1, 1)` and the
/// rank-five separable state built from them.
#[derive(Clone, Debug)]
pub struct Example21 {
    pub sigma: BipartiteState,
    pub vectors: Vec<ProductVector>,
}

pub fn example21_sigma() -> Result<Example21> {
    let rho = prop2_sigma(1.0, 1.0, 1.0, 1.0)?;
    let kernel = kernel_basis(rho.matrix(), DEFAULT_TAU)?;
    let found = product_vectors_in_subspace_3x3(&kernel, DEFAULT_TAU)?;
    if found.len() != 6 {
        return Err(Error::NonGeneric(format!(
            "kernel holds {} product vectors instead of six",
            found.len()
        )));
    }
    let vectors: Vec<ProductVector> = found.iter().map(|v| v.normalized()).collect();
    let sigma = from_vectors(3, 3, &vectors.iter().map(|v| v.tensor()).collect::<Vec<_>>());
    Ok(Example21 { sigma, vectors })
}

/// Threshold subtraction of the first kernel vector and the expansion of
/// the remainder in the six (linearly independent) projectors.
#[derive(Clone, Debug, Serialize)]
pub struct Example21Certificate {
    /// Weight `c` removed from `|psi_1><psi_1|`.
    pub threshold: f64,
    pub birank_after: Birank,
    pub ppt_after: bool,
    /// Expansion of `sigma - c |psi_1><psi_1|` in the six projectors.
    pub coefficients: Vec<f64>,
    /// Relative residual of the expansion.
    pub expansion_residual: f64,
    /// Smallest singular value of the projector Gram matrix over the largest.
    pub projector_independence: f64,
}

impl Example21Certificate {
    /// `c_1 = 1 - c < 0` forbids a separable remainder.
    pub fn certifies_entanglement(&self) -> bool {
        self.coefficients[0] < 0.0
            && self.expansion_residual < 1e-8
            && self.ppt_after
            && self.projector_independence > 1e-10
    }
}

pub fn example21_certificate(ex: &Example21, tau: f64) -> Result<Example21Certificate> {
    let psi = &ex.vectors[0];
    let an = subtraction_analysis(&ex.sigma, psi, tau)?;
    let c_thr = an.threshold();
    if !c_thr.is_finite() {
        return Err(Error::Inconsistent("kernel vector is outside the joint range".into()));
    }
    let after = ex.sigma.plus_projector(-c_thr, &psi.tensor());
    let b = birank(&after, tau)?;
    let ppt = classify(&after, tau)?.verdict == Verdict::Ppt && after.is_psd(tau)?;
    let projectors: Vec<CVector> = ex.vectors.iter().map(|v| v.projector().vectorize()).collect();
    let n = projectors.len();
    let gram = ComplexMatrix::from_fn(n, n, |i, j| crate::numerics::inner(&projectors[i], &projectors[j]));
    let target = after.matrix().vectorize();
    let rhs: Vec<C64> = projectors.iter().map(|p| crate::numerics::inner(p, &target)).collect();
    let sol = gram.solve(&rhs)?;
    let coefficients: Vec<f64> = sol.iter().map(|x| x.re).collect();
    let mut rebuilt = ComplexMatrix::zeros(9, 9);
    for (w, v) in coefficients.iter().zip(&ex.vectors) {
        rebuilt.add_scaled(&v.projector(), r(*w));
    }
    let residual = rebuilt.max_abs_diff(after.matrix()) / ex.sigma.matrix().max_abs();
    let sv = crate::numerics::svd(&gram)?;
    let independence = sv.values.last().copied().unwrap_or(0.0) / sv.largest();
    Ok(Example21Certificate {
        threshold: c_thr,
        birank_after: b,
        ppt_after: ppt,
        coefficients,
        expansion_residual: residual,
        projector_independence: independence,
    })
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need N >= 3, got {n}")));
    }
    Ok(())
}

/// `2 (x) N` PPT entangled state of birank `(N + 1, N + 1)`.
pub fn tura_state(n: usize) -> Result<BipartiteState> {
    check_n(n)?;
    let k = |i, j| ket(2, n, i, j);
    let s3 = 3f64.sqrt();
    let mut rho = BipartiteState::zero(2, n);
    for i in 0..n - 1 {
        let v: CVector = k(0, i).iter().zip(&k(1, i + 1)).map(|(x, y)| x + y).collect();
        rho = rho.plus_projector(1.0, &v);
    }
    rho = rho.plus_projector(1.0, &k(1, 0));
    let v: CVector = k(0, 0).iter().zip(&k(0, n - 1)).map(|(x, y)| x + y * s3).collect();
    Ok(rho.plus_projector(0.5, &v))
}

/// Whether [`tura_state`] is entangled: the `N = 3` member has a four-term
/// product decomposition, so it and everything built from it by adding
/// product projectors is separable.
pub fn tura_entangled(n: usize) -> bool {
    n >= 4
}

/// The partial transpose of [`tura_state`] written out term by term.
pub fn tura_partial_transpose(n: usize) -> Result<BipartiteState> {
    check_n(n)?;
    let k = |i, j| ket(2, n, i, j);
    let s3 = 3f64.sqrt();
    let mut rho = BipartiteState::zero(2, n);
    for i in 0..n - 1 {
        let v: CVector = k(0, i + 1).iter().zip(&k(1, i)).map(|(x, y)| x + y).collect();
        rho = rho.plus_projector(1.0, &v);
    }
    rho = rho.plus_projector(1.0, &k(1, n - 1));
    let v: CVector = k(0, 0).iter().zip(&k(0, n - 1)).map(|(x, y)| x * s3 + y).collect();
    Ok(rho.plus_projector(0.5, &v))
}

/// `(|0> + a|1>) ((a^(N-1) + 1/sqrt 3)|0> + a^(N-2)|1> + ... + |N-1>)`,
/// a product vector in the range of [`tura_state`].
pub fn phi(n: usize, a: C64) -> Result<ProductVector> {
    check_n(n)?;
    let mut y: CVector = (0..n).map(|j| a.powu((n - 1 - j) as u32)).collect();
    y[0] += 1.0 / 3f64.sqrt();
    ProductVector::new(vec![ONE, a], y)
}

/// `(I (x) V) phi(a)` with `V` the anti-diagonal permutation.
pub fn psi(n: usize, a: C64) -> Result<ProductVector> {
    let p = phi(n, a)?;
    let b: CVector = p.b.iter().rev().copied().collect();
    ProductVector::new(p.a, b)
}

/// A constructed state with the parameters actually used.
#[derive(Clone, Debug)]
pub struct Construction {
    pub state: BipartiteState,
    pub certificate: ExpectedCertificate,
    pub params: Value,
}

const EPS_DEFAULT: f64 = 1e-2;
const EPS_FLOOR: f64 = 1e-8;

/// Parameter sets to try, in order: the given list, or `1, ..., k`, then
/// `1 + i/7`, then a greedy pick from a grid on `[-3, 3]` maximizing the
/// distance of each new unit vector from the span so far.
fn parameter_sets(
    n: usize,
    count: usize,
    given: Option<&[f64]>,
    base: &[CVector],
    make: fn(usize, C64) -> Result<ProductVector>,
) -> Result<Vec<Vec<f64>>> {
    if let Some(xs) = given {
        if xs.len() != count {
            return Err(Error::InvalidParameter(format!("expected {count} parameters, got {}", xs.len())));
        }
        return Ok(vec![xs.to_vec()]);
    }
    let mut span = orthonormalize(base, 1e-12);
    let mut greedy = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, f64, CVector)> = None;
        for step in -24..=24 {
            let x = step as f64 / 8.0;
            if greedy.contains(&x) {
                continue;
            }
            let v = numerics::normalized(&make(n, r(x))?.tensor());
            let dist = projection_residual(&span, &v);
            if best.as_ref().is_none_or(|b| dist > b.0) {
                best = Some((dist, x, v));
            }
        }
        let (_, x, v) = best.expect("grid is nonempty");
        greedy.push(x);
        span.push(v);
        span = orthonormalize(&span, 1e-12);
    }
    Ok(vec![
        (1..=count).map(|i| i as f64).collect(),
        (1..=count).map(|i| 1.0 + i as f64 / 7.0).collect(),
        greedy,
    ])
}

/// `base + eps sum_i |v(x_i)><v(x_i)| / ||v(x_i)||^2` for the first parameter
/// set and epsilon that meet the certificate.
fn add_rank_one(
    n: usize,
    base: &BipartiteState,
    sets: &[Vec<f64>],
    make: fn(usize, C64) -> Result<ProductVector>,
    epsilon: f64,
    cert: &ExpectedCertificate,
) -> Result<(BipartiteState, f64, Vec<f64>)> {
    for xs in sets {
        let vs: Vec<CVector> = xs
            .iter()
            .map(|&x| Ok(numerics::normalized(&make(n, r(x))?.tensor())))
            .collect::<Result<_>>()?;
        let mut eps = epsilon;
        while eps >= EPS_FLOOR {
            let s = vs.iter().fold(base.clone(), |acc, v| acc.plus_projector(eps, v));
            if cert.check(&s, DEFAULT_TAU)?.pass {
                return Ok((s, eps, xs.clone()));
            }
            eps *= 0.5;
        }
    }
    Err(Error::Construction(format!(
        "no parameter set and epsilon in [{EPS_FLOOR:e}, {epsilon:e}] gives birank {}",
        cert.birank
    )))
}

/// `rho + eps sum_i |phi(a_i)><phi(a_i)|` of birank `(N + 1, N + 1 + k)`.
pub fn lemma27_state(n: usize, k: usize, epsilon: Option<f64>, a_list: Option<&[f64]>) -> Result<Construction> {
    check_n(n)?;
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= N - 1, got k = {k}")));
    }
    lemma27_inner(n, k, epsilon, a_list)
}

fn lemma27_inner(n: usize, k: usize, epsilon: Option<f64>, a_list: Option<&[f64]>) -> Result<Construction> {
    let rho = tura_state(n)?;
    let range_pt = crate::numerics::eig_hermitian(partial_transpose(&rho).matrix())?.range_vectors(DEFAULT_TAU);
    let sets = parameter_sets(n, k, a_list, &range_pt, phi)?;
    let cert = ExpectedCertificate {
        entangled: Some(tura_entangled(n)),
        ..ExpectedCertificate::new(n + 1, n + 1 + k, true)
    };
    let (state, eps, a) = add_rank_one(n, &rho, &sets, phi, epsilon.unwrap_or(EPS_DEFAULT), &cert)?;
    Ok(Construction {
        state,
        certificate: cert,
        params: json!({ "N": n, "k": k, "epsilon": eps, "a": a }),
    })
}

/// Adds `eps' sum_j |psi(a'_j)><psi(a'_j)|` to the [`lemma27_state`]
/// (or to [`tura_state`] when `k = 0`), giving birank `(N+1+p, N+1+k)`.
pub fn prop28_state(
    n: usize,
    k: usize,
    p: usize,
    epsilon: Option<f64>,
    epsilon_prime: Option<f64>,
) -> Result<Construction> {
    check_n(n)?;
    if k >= n || p >= n {
        return Err(Error::InvalidParameter(format!("need 0 <= k, p <= N - 1, got k = {k}, p = {p}")));
    }
    let (base, mut params) = if k == 0 {
        (tura_state(n)?, json!({ "N": n, "k": 0 }))
    } else {
        let c = lemma27_inner(n, k, epsilon, None)?;
        (c.state, c.params)
    };
    let cert = ExpectedCertificate {
        entangled: Some(tura_entangled(n)),
        ..ExpectedCertificate::new(n + 1 + p, n + 1 + k, true)
    };
    if p == 0 {
        params["p"] = json!(0);
        return Ok(Construction { state: base, certificate: cert, params });
    }
    let range = crate::numerics::eig_hermitian(base.matrix())?.range_vectors(DEFAULT_TAU);
    let sets = parameter_sets(n, p, None, &range, psi)?;
    let (state, eps, a) = add_rank_one(n, &base, &sets, psi, epsilon_prime.unwrap_or(EPS_DEFAULT), &cert)?;
    params["p"] = json!(p);
    params["epsilon_prime"] = json!(eps);
    params["a_prime"] = json!(a);
    Ok(Construction { state, certificate: cert, params })
}

/// Separable `2 (x) N` mixture of birank `(N + j, N + k)` built from product
/// vectors orthogonal to a completely entangled subspace of dimension
/// `N - j`.
pub fn prop25_separable(n: usize, j: usize, k: usize) -> Result<Construction> {
    if n < 2 || j == 0 || k == 0 || j > n || k > n {
        return Err(Error::InvalidParameter(format!(
            "need N >= 2 and 1 <= j, k <= N, got N = {n}, j = {j}, k = {k}"
        )));
    }
    let params = json!({ "N": n, "j": j, "k": k });
    let cert = ExpectedCertificate {
        entangled: Some(false),
        ..ExpectedCertificate::new(n + j, n + k, true)
    };
    if j > k {
        let c = prop25_separable(n, k, j)?;
        return Ok(Construction {
            state: partial_transpose(&c.state),
            certificate: cert,
            params,
        });
    }
    if j == n {
        return Ok(Construction {
            state: BipartiteState::identity(2, n),
            certificate: cert,
            params,
        });
    }
    let terms = prop25_terms(n, j, k)?;
    let state = mixture(&terms)?;
    if !cert.check(&state, DEFAULT_TAU)?.pass {
        return Err(Error::Construction(format!(
            "mixture has birank {} instead of {}",
            birank(&state, DEFAULT_TAU)?,
            cert.birank
        )));
    }
    Ok(Construction { state, certificate: cert, params })
}

/// Unit-weight product terms of the [`prop25_separable`] mixture (`j <= k`, `j < N`).
pub fn prop25_terms(n: usize, j: usize, k: usize) -> Result<Vec<ProductTerm>> {
    let ces = ces_standard(n, n - j)?;
    let p = pencil_from_subspace(n, &ces, DEFAULT_TAU)?;
    let mut chosen: Vec<ProductVector> = spanning_product_vectors(&p)?.iter().map(|v| v.normalized()).collect();
    let target = n + k;
    let mut dim = span_dimension(&chosen, true, DEFAULT_TAU)?;
    for count in [64, 256, 1024] {
        if dim >= target {
            break;
        }
        for m in bundle_members(&p, &fibonacci_points(count))? {
            if dim >= target {
                break;
            }
            let m = m.normalized();
            chosen.push(m);
            let d = span_dimension(&chosen, true, DEFAULT_TAU)?;
            if d > dim {
                dim = d;
            } else {
                chosen.pop();
            }
        }
    }
    if dim != target {
        return Err(Error::Construction(format!(
            "partial-conjugate span stopped at {dim}, target {target}"
        )));
    }
    Ok(chosen.into_iter().map(ProductTerm::unit).collect())
}

/// Chain state with weights `c_1, ..., c_(N-1)` and the mutually
/// annihilating Hermitian parts of its partial transpose.
#[derive(Clone, Debug)]
pub struct Example29 {
    pub state: BipartiteState,
    /// Parts `0..N-1` act on `span{|1,i>, |0,i+1>}`; the last part is
    /// `|00><00| + |1,N-1><1,N-1|`.
    pub parts: Vec<ComplexMatrix>,
    pub c: Vec<f64>,
    pub certificate: ExpectedCertificate,
}

/// Default weights: `0.5` up to `c_k`, then rising linearly below `0.9`,
/// and `c_(N-1) = 1`.
pub fn example29_default_c(n: usize, k: usize) -> Vec<f64> {
    (1..n)
        .map(|i| {
            if i == n - 1 {
                1.0
            } else if i <= k {
                0.5
            } else {
                0.5 + 0.4 * (i - k) as f64 / (n - 1 - k) as f64
            }
        })
        .collect()
}

pub fn example29_state(n: usize, k: usize, c_list: Option<&[f64]>) -> Result<Example29> {
    check_n(n)?;
    if k == 0 || k + 1 >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < N - 1, got k = {k} for N = {n}")));
    }
    let cs = c_list.map(<[f64]>::to_vec).unwrap_or_else(|| example29_default_c(n, k));
    let ok = cs.len() == n - 1
        && cs.iter().all(|&x| x > 0.0 && x.is_finite())
        && cs[n - 2] == 1.0
        && cs[..k].iter().all(|&x| x == cs[0])
        && cs[k - 1..n - 2].windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "need 0 < c_1 = ... = c_k < ... < c_(N-2) and c_(N-1) = 1 (length N - 1), got {cs:?}"
        )));
    }
    // c_0 = 0 pads the first block.
    let cc = |i: usize| if i == 0 { 0.0 } else { cs[i - 1] };
    let kk = |i, j| ket(2, n, i, j);
    let mut state = BipartiteState::zero(2, n);
    for i in 0..n - 1 {
        let v: CVector = kk(0, i).iter().zip(&kk(1, i + 1)).map(|(x, y)| x + y * cc(i + 1)).collect();
        state = state.plus_projector(1.0, &v);
    }
    let dim = 2 * n;
    let idx = |a: usize, j: usize| a * n + j;
    let mut parts = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let (p, q) = (idx(1, i), idx(0, i + 1));
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(p, p)] = r(cc(i) * cc(i));
        m[(q, q)] = r(if i + 1 < n - 1 { 1.0 } else { 0.0 });
        m[(p, q)] = r(cc(i + 1));
        m[(q, p)] = r(cc(i + 1));
        parts.push(m);
    }
    let mut last = ComplexMatrix::zeros(dim, dim);
    last[(idx(0, 0), idx(0, 0))] = ONE;
    last[(idx(1, n - 1), idx(1, n - 1))] = r(cc(n - 1) * cc(n - 1));
    parts.push(last);
    let neg = n - k;
    let b = birank(&state, DEFAULT_TAU)?;
    Ok(Example29 {
        certificate: ExpectedCertificate {
            birank: b,
            ppt: false,
            entangled: Some(true),
            length: None,
            negative_count: Some(neg),
        },
        state,
        parts,
        c: cs,
    })
}

/// `(|00> + |11>)(<00| + <11|) + |0><0| (x) I_N`, whose partial transpose
/// has exactly one negative eigenvalue.
pub fn example29_single(n: usize) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
    }
    let v: CVector = ket(2, n, 0, 0).iter().zip(&ket(2, n, 1, 1)).map(|(x, y)| x + y).collect();
    Ok((0..n).fold(BipartiteState::zero(2, n).plus_projector(1.0, &v), |acc, j| {
        acc.plus_projector(1.0, &ket(2, n, 0, j))
    }))
}

/// `max_(i != j) ||M_i M_j||` over the largest `||M_i||^2` (max-abs norms).
pub fn parts_cross_defect(parts: &[ComplexMatrix]) -> f64 {
    let scale = parts.iter().map(|m| m.max_abs().powi(2)).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (i, x) in parts.iter().enumerate() {
        for (j, y) in parts.iter().enumerate() {
            if i != j {
                worst = worst.max(x.matmul(y).max_abs());
            }
        }
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// `rank rho > max(rank rho_A, rank rho_B)`, which every PPT entangled
/// state satisfies.
pub fn rank_exceeds_local_ranks(rho: &BipartiteState, tau: f64) -> Result<bool> {
    let r = rank_tol(rho.matrix(), tau)?;
    let (ra, rb) = local_ranks(rho, tau)?;
    Ok(r > ra.max(rb))
}

/// Named-family parameters used by the command line.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub family: String,
    pub id: Option<String>,
    pub n: Option<usize>,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub p0: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_prime: Option<f64>,
    pub a_list: Option<Vec<f64>>,
    pub c_list: Option<Vec<f64>>,
}

/// Families accepted by [`construct`].
pub const FAMILIES: [&str; 11] = [
    "fixed", "prop2", "lemma14", "lemma14-target", "example21", "tura", "lemma27", "prop28", "prop25",
    "example29", "example29-single",
];

fn need<T: Copy>(x: Option<T>, name: &str, family: &str) -> Result<T> {
    x.ok_or_else(|| Error::InvalidParameter(format!("family {family} needs --{name}")))
}

/// Builds a named family; returns the state, its certificate when one is
/// known, and the parameters used.
pub fn construct(p: &ConstructionParams) -> Result<(BipartiteState, Option<ExpectedCertificate>, Value)> {
    let f = p.family.as_str();
    let one = |x: f64| p.a.unwrap_or(x);
    match f {
        "fixed" => {
            let id = p.id.clone().ok_or_else(|| Error::InvalidParameter("family fixed needs --id".into()))?;
            let e = fixed_example(&id)?;
            Ok((e.state, Some(e.certificate), json!({ "id": id })))
        }
        "prop2" => {
            let (a, b, c, d) = (one(1.0), p.b.unwrap_or(1.0), p.c.unwrap_or(1.0), p.d.unwrap_or(1.0));
            let s = prop2_sigma(a, b, c, d)?;
            let cert = (c > 0.0).then(|| ExpectedCertificate::entangled(4, 4));
            Ok((s, cert, json!({ "a": a, "b": b, "c": c, "d": d })))
        }
        "lemma14" => {
            let (a, b, d) = (one(1.0), p.b.unwrap_or(1.0), p.d.unwrap_or(1.0));
            let cert = ExpectedCertificate::separable(4, 4, 4);
            Ok((lemma14_family(a, b, d)?, Some(cert), json!({ "a": a, "b": b, "d": d })))
        }
        "lemma14-target" => {
            let (p0, p1, p2) = (p.p0.unwrap_or(1.0), p.p1.unwrap_or(1.0), p.p2.unwrap_or(1.0));
            let cert = ExpectedCertificate::separable(4, 4, 4);
            Ok((lemma14_target(p0, p1, p2)?, Some(cert), json!({ "p0": p0, "p1": p1, "p2": p2 })))
        }
        "example21" => {
            let e = example21_sigma()?;
            let vs: Vec<&ProductVector> = e.vectors.iter().collect();
            let cert = ExpectedCertificate::separable(5, 5, 6);
            Ok((e.sigma, Some(cert), json!({ "kernel_vectors": vs })))
        }
        "tura" => {
            let n = need(p.n, "N", f)?;
            let cert = ExpectedCertificate {
                entangled: Some(tura_entangled(n)),
                ..ExpectedCertificate::new(n + 1, n + 1, true)
            };
            Ok((tura_state(n)?, Some(cert), json!({ "N": n })))
        }
        "lemma27" => {
            let c = lemma27_state(need(p.n, "N", f)?, need(p.k, "k", f)?, p.epsilon, p.a_list.as_deref())?;
            Ok((c.state, Some(c.certificate), c.params))
        }
        "prop28" => {
            let c = prop28_state(
                need(p.n, "N", f)?,
                need(p.k, "k", f)?,
                need(p.p, "p", f)?,
                p.epsilon,
                p.epsilon_prime,
            )?;
            Ok((c.state, Some(c.certificate), c.params))
        }
        "prop25" => {
            let c = prop25_separable(need(p.n, "N", f)?, need(p.j, "j", f)?, need(p.k, "k", f)?)?;
            Ok((c.state, Some(c.certificate), c.params))
        }
        "example29" => {
            let (n, k) = (need(p.n, "N", f)?, need(p.k, "k", f)?);
            let e = example29_state(n, k, p.c_list.as_deref())?;
            Ok((e.state, Some(e.certificate), json!({ "N": n, "k": k, "c": e.c })))
        }
        "example29-single" => {
            let n = need(p.n, "N", f)?;
            let s = example29_single(n)?;
            let cert = ExpectedCertificate {
                birank: birank(&s, DEFAULT_TAU)?,
                ppt: false,
                entangled: Some(true),
                length: None,
                negative_count: Some(1),
            };
            Ok((s, Some(cert), json!({ "N": n })))
        }
        _ => Err(Error::InvalidParameter(format!(
            "unknown family {f:?}; expected one of {}",
            FAMILIES.join(", ")
        ))),
    }
}
