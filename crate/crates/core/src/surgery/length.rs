//! Lengths and decompositions of separable `2 (x) N` states by repeated
//! threshold subtraction.
//!
//! Each step removes one product term `lambda |e,f><e,f|` chosen so that
//! `max(r, s)` drops by one: a vector with `g < 0` subtracted at `lambda1`
//! while `r < s`, `g > 0` at `lambda0` while `r > s`, and `g = 0` at the
//! common threshold when `r = s`. The last case uses a sign change of `g`
//! along a continuous path of joint-range product vectors.

use serde::{Deserialize, Serialize};

use super::search::{is_edge_state, sweep, EdgeKind, EdgeVerdict, JointRange};
use super::thresholds::{subtract_with, StateGeometry, SubtractionAnalysis};
use crate::bipartite::{
    birank, local_ranks, mixture, partial_trace, verify_direct_sum, BipartiteState, Birank,
    ProductTerm, ProductVector, Side,
};
use crate::error::{Error, Result};
use crate::numerics::{self, eig_hermitian, norm, rank_tol, CVector, C64, ZERO};
use crate::pencil::{fibonacci_points, ProjectivePoint};

/// `|g|` relative to `<rho^+> + <(rho^G)^+>` accepted as balanced.
const BALANCED: f64 = 1e-12;
const CANDIDATE_POINTS: usize = 96;
const PATH_START: usize = 64;
const PATH_MAX: usize = 4096;
const SEARCH_GRID: usize = 4096;

fn unit(pv: &ProductVector) -> ProductVector {
    pv.normalized()
}

/// `sum_i g(|a_i, b_i>)` with weights; equals `r - s` for any decomposition.
pub fn g_sum(rho: &BipartiteState, decomposition: &[ProductTerm], tau: f64) -> Result<f64> {
    let geom = StateGeometry::new(rho, tau)?;
    Ok(decomposition
        .iter()
        .map(|t| {
            let (q0, q1) = geom.quadratic_forms(&t.vector);
            t.weight * (q0 - q1)
        })
        .sum())
}

#[derive(Clone)]
struct Candidate {
    pv: ProductVector,
    analysis: SubtractionAnalysis,
}

fn candidate(geom: &StateGeometry, pv: &ProductVector) -> Option<Candidate> {
    let pv = unit(pv);
    let analysis = geom.analyze(&pv);
    analysis.both_in_range().then_some(Candidate { pv, analysis })
}

/// Continuous section of the joint-range fiber along a path of `e`.
struct Path<'a> {
    geom: &'a StateGeometry,
    jr: JointRange,
    start: ProductVector,
    end: ProductVector,
    /// `end.a` with its phase aligned to `start.a`.
    end_a: [C64; 2],
    omega: f64,
}

struct PathPoint {
    t: f64,
    pv: ProductVector,
    g: f64,
}

impl<'a> Path<'a> {
    fn new(geom: &'a StateGeometry, start: &ProductVector, end: &ProductVector) -> Result<Self> {
        let jr = JointRange::new(geom)?;
        let (s, e) = (unit(start), unit(end));
        let ov = numerics::inner(&s.a, &e.a);
        let phase = if ov.norm() > 0.0 { ov.conj() / ov.norm() } else { numerics::ONE };
        let end_a = [e.a[0] * phase, e.a[1] * phase];
        let cos = (numerics::inner(&s.a, &end_a).re).clamp(-1.0, 1.0);
        Ok(Self {
            geom,
            jr,
            start: s,
            end: e,
            end_a,
            omega: cos.acos(),
        })
    }

    fn a_at(&self, t: f64) -> [C64; 2] {
        if self.omega < 1e-14 {
            return [self.start.a[0], self.start.a[1]];
        }
        let (w0, w1) = (((1.0 - t) * self.omega).sin(), (t * self.omega).sin());
        let d = self.omega.sin();
        [
            (self.start.a[0] * w0 + self.end_a[0] * w1) / d,
            (self.start.a[1] * w0 + self.end_a[1] * w1) / d,
        ]
    }

    /// Projection of `prev` onto the fiber at `a`; `None` on a jump.
    fn continue_from(&self, a: [C64; 2], prev: &[C64]) -> Result<Option<CVector>> {
        let p = ProjectivePoint::new(a[0], a[1])?;
        // The projective gauge rotates `a`; undo it on the returned vector.
        let fiber = self.jr.fiber(&p)?;
        let mut f = vec![ZERO; prev.len()];
        for b in &fiber {
            let c = numerics::inner(b, prev);
            for (o, x) in f.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        let nf = norm(&f);
        if nf < 0.7 * norm(prev) {
            return Ok(None);
        }
        Ok(Some(f.iter().map(|x| x / nf).collect()))
    }

    fn make(&self, a: [C64; 2], f: CVector, t: f64) -> Result<PathPoint> {
        let pv = ProductVector::new(vec![a[0], a[1]], f)?;
        let an = self.geom.analyze(&pv);
        Ok(PathPoint {
            t,
            pv,
            g: an.relative_g(),
        })
    }

    /// Point at `t` on the second leg: inside the fiber at `end.a`, from the
    /// transported vector `from` to `end.b`.
    fn second_leg(&self, from: &[C64], s: f64) -> Result<PathPoint> {
        let ov = numerics::inner(&self.end.b, from);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { numerics::ONE };
        let f: CVector = from
            .iter()
            .zip(&self.end.b)
            .map(|(x, y)| x * (1.0 - s) + y * phase * s)
            .collect();
        let nf = norm(&f);
        self.make(self.end_a, f.iter().map(|x| x / nf).collect(), 1.0 + s)
    }

    /// Samples `t = 0 ..= 2` at the given resolution per leg.
    fn sample(&self, resolution: usize) -> Result<Option<Vec<PathPoint>>> {
        let mut pts = vec![self.make(
            [self.start.a[0], self.start.a[1]],
            self.start.b.clone(),
            0.0,
        )?];
        let mut f = self.start.b.clone();
        for k in 1..=resolution {
            let t = k as f64 / resolution as f64;
            let a = self.a_at(t);
            match self.continue_from(a, &f)? {
                Some(nf) => {
                    f = nf;
                    pts.push(self.make(a, f.clone(), t)?);
                }
                None => return Ok(None),
            }
        }
        for k in 1..=resolution {
            pts.push(self.second_leg(&f, k as f64 / resolution as f64)?);
        }
        Ok(Some(pts))
    }

    /// Bisects `g` on the sign change between two consecutive samples.
    fn bisect(&self, lo: &PathPoint, hi: &PathPoint, transported: &CVector) -> Result<ProductVector> {
        let (mut lo_t, mut hi_t) = (lo.t, hi.t);
        let lo_sign = lo.g.signum();
        let mut best = if lo.g.abs() < hi.g.abs() { lo.pv.clone() } else { hi.pv.clone() };
        let mut best_g = lo.g.abs().min(hi.g.abs());
        let mut f_lo = lo.pv.b.clone();
        for _ in 0..80 {
            if best_g <= BALANCED {
                break;
            }
            let mid = 0.5 * (lo_t + hi_t);
            let p = if mid <= 1.0 {
                let a = self.a_at(mid);
                match self.continue_from(a, &f_lo)? {
                    Some(f) => self.make(a, f, mid)?,
                    None => break,
                }
            } else {
                self.second_leg(transported, mid - 1.0)?
            };
            if p.g.abs() < best_g {
                best_g = p.g.abs();
                best = p.pv.clone();
            }
            if p.g.signum() == lo_sign {
                lo_t = mid;
                f_lo = p.pv.b.clone();
            } else {
                hi_t = mid;
            }
            if hi_t - lo_t < 1e-16 {
                break;
            }
        }
        Ok(best)
    }

    /// A vector with `g` as close to zero as bisection reaches.
    fn balance(&self) -> Result<Option<ProductVector>> {
        let mut resolution = PATH_START;
        while resolution <= PATH_MAX {
            if let Some(pts) = self.sample(resolution)? {
                let transported = pts[resolution].pv.b.clone();
                for w in pts.windows(2) {
                    if w[0].g.abs() <= BALANCED {
                        return Ok(Some(w[0].pv.clone()));
                    }
                    if w[0].g.signum() != w[1].g.signum() {
                        return self.bisect(&w[0], &w[1], &transported).map(Some);
                    }
                }
                return Ok(None);
            }
            resolution *= 2;
        }
        Ok(None)
    }
}

/// Product vector with `g = 0` for a state of birank `(r, r)`, `2r > 3N`,
/// reached by bisecting `g` between decomposition vectors of opposite sign.
pub fn find_balanced_vector(rho: &BipartiteState, decomposition: &[ProductTerm], tau: f64) -> Result<ProductVector> {
    let geom = StateGeometry::new(rho, tau)?;
    let b = geom.birank();
    let n = rho.dim_b();
    if rho.dim_a() != 2 || b.r != b.s || 2 * b.r <= 3 * n {
        return Err(Error::Contract(format!(
            "balanced vector search needs a 2 x N state of birank (r, r) with 2r > 3N, got {b} for N = {n}"
        )));
    }
    let cands: Vec<Candidate> = decomposition.iter().filter_map(|t| candidate(&geom, &t.vector)).collect();
    if cands.is_empty() {
        return Err(Error::Contract("no decomposition vector lies in the joint range".into()));
    }
    if let Some(c) = cands.iter().min_by(|x, y| x.analysis.relative_g().abs().total_cmp(&y.analysis.relative_g().abs())) {
        if c.analysis.relative_g().abs() <= 1e-7 {
            return Ok(c.pv.clone());
        }
    }
    balance_from(&geom, &cands)?.ok_or_else(|| Error::Stalled {
        birank: b,
        reason: "no sign change of g along any path between decomposition vectors".into(),
    })
}

fn balance_from(geom: &StateGeometry, cands: &[Candidate]) -> Result<Option<ProductVector>> {
    let mut pos: Vec<&Candidate> = cands.iter().filter(|c| c.analysis.relative_g() > 0.0).collect();
    let mut neg: Vec<&Candidate> = cands.iter().filter(|c| c.analysis.relative_g() < 0.0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Inconsistent(format!(
            "all {} candidates have g of one sign, but g sums to r - s = 0 over a decomposition",
            cands.len()
        )));
    }
    pos.sort_by(|x, y| y.analysis.relative_g().total_cmp(&x.analysis.relative_g()));
    neg.sort_by(|x, y| x.analysis.relative_g().total_cmp(&y.analysis.relative_g()));
    for p in pos.iter().take(4) {
        for q in neg.iter().take(4) {
            let path = Path::new(geom, &p.pv, &q.pv)?;
            if let Some(v) = path.balance()? {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Decomposition with one step per unit of `max(r, s)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthResult {
    pub length: usize,
    pub terms: Vec<ProductTerm>,
    /// Biranks visited, starting with the input's.
    pub chain: Vec<Birank>,
    /// `max |sum terms - rho| / tr(rho)`
    pub reconstruction_error: f64,
}

fn gather(geom: &StateGeometry, hints: &[ProductVector]) -> Result<Vec<Candidate>> {
    let mut out: Vec<Candidate> = hints.iter().filter_map(|h| candidate(geom, h)).collect();
    let jr = JointRange::new(geom)?;
    if jr.constraint_count() < jr.n {
        for p in fibonacci_points(CANDIDATE_POINTS) {
            for f in jr.fiber(&p)? {
                if let Some(c) = candidate(geom, &ProductVector::new(p.ket(), f)?) {
                    out.push(c);
                }
            }
        }
    } else {
        for v in sweep(geom, SEARCH_GRID)?.vectors {
            if let Some(c) = candidate(geom, &v) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Factorises the top eigenvector of a rank-one product state.
fn last_term(geom: &StateGeometry) -> Result<ProductTerm> {
    let spec = &geom.spectrum;
    let d = spec.dim();
    let v = spec.vector(d - 1);
    let n = geom.state.dim_b();
    let m = geom.state.dim_a();
    let rows: Vec<&[C64]> = (0..m).map(|i| &v[i * n..(i + 1) * n]).collect();
    let k = (0..m)
        .max_by(|&x, &y| norm(rows[x]).total_cmp(&norm(rows[y])))
        .unwrap_or(0);
    let b = rows[k].to_vec();
    let nb = norm(&b).powi(2);
    let a: CVector = rows.iter().map(|r| numerics::inner(&b, r) / nb).collect();
    let pv = ProductVector::new(a, b)?;
    let scale = norm(&pv.tensor()).powi(2);
    Ok(ProductTerm::new(spec.values[d - 1] * scale, unit(&pv)))
}

fn step(geom: &StateGeometry, hints: &[ProductVector]) -> Result<Option<(ProductTerm, BipartiteState, Birank)>> {
    let b = geom.birank();
    let cands = gather(geom, hints)?;
    let want = Birank::new(
        if b.r >= b.s { b.r - 1 } else { b.r },
        if b.s >= b.r { b.s - 1 } else { b.s },
    );
    let mut ordered: Vec<Candidate> = match b.r.cmp(&b.s) {
        std::cmp::Ordering::Less => {
            let mut v: Vec<Candidate> = cands.into_iter().filter(|c| c.analysis.relative_g() < -1e-6).collect();
            v.sort_by(|x, y| x.analysis.relative_g().total_cmp(&y.analysis.relative_g()));
            v
        }
        std::cmp::Ordering::Greater => {
            let mut v: Vec<Candidate> = cands.into_iter().filter(|c| c.analysis.relative_g() > 1e-6).collect();
            v.sort_by(|x, y| y.analysis.relative_g().total_cmp(&x.analysis.relative_g()));
            v
        }
        std::cmp::Ordering::Equal => {
            let mut v = cands;
            v.sort_by(|x, y| x.analysis.relative_g().abs().total_cmp(&y.analysis.relative_g().abs()));
            let balanced = v.iter().take_while(|c| c.analysis.relative_g().abs() <= 1e-9).count();
            if balanced == 0 && !v.is_empty() && JointRange::new(geom)?.constraint_count() < geom.state.dim_b() {
                if let Some(pv) = balance_from(geom, &v)? {
                    if let Some(c) = candidate(geom, &pv) {
                        v.insert(0, c);
                    }
                }
            }
            v
        }
    };
    ordered.truncate(24);
    for c in ordered {
        let lambda = c.analysis.threshold();
        let Ok(sub) = subtract_with(geom, &c.pv, lambda) else { continue };
        if sub.observed == want {
            return Ok(Some((ProductTerm::new(lambda, c.pv), sub.state, sub.observed)));
        }
    }
    Ok(None)
}

/// Greedy decomposition of a separable `2 (x) N` state into `max(r, s)`
/// product terms. `hints` (for example a known decomposition) seed the
/// candidate set; the rest comes from joint-range searches.
pub fn greedy_decomposition(rho: &BipartiteState, hints: &[ProductVector], tau: f64) -> Result<LengthResult> {
    if rho.dim_a() != 2 {
        return Err(Error::Dimension("greedy decomposition needs a 2 x N state".into()));
    }
    let tr = rho.trace();
    let mut cur = rho.clone();
    let mut terms = Vec::new();
    let mut chain = vec![birank(rho, tau)?];
    loop {
        if cur.matrix().max_abs() <= 1e-11 * tr {
            break;
        }
        let geom = StateGeometry::new(&cur, tau)?;
        let b = geom.birank();
        if b.r == 1 && b.s == 1 {
            terms.push(last_term(&geom)?);
            chain.push(Birank::new(0, 0));
            break;
        }
        match step(&geom, hints)? {
            Some((term, next, nb)) => {
                terms.push(term);
                chain.push(nb);
                cur = next;
            }
            None => {
                return Err(Error::Stalled {
                    birank: b,
                    reason: "no joint-range product vector lowers max(r, s)".into(),
                })
            }
        }
    }
    let rebuilt = if terms.is_empty() { BipartiteState::zero(2, rho.dim_b()) } else { mixture(&terms)? };
    let err = rebuilt.matrix().max_abs_diff(rho.matrix()) / tr;
    Ok(LengthResult {
        length: terms.len(),
        terms,
        chain,
        reconstruction_error: err,
    })
}

/// Length of a separable `2 (x) 3` state with a decomposition of exactly
/// `max(r, s)` terms. The decomposition witness is optional, since every
/// PPT `2 (x) 3` state is separable; when given it seeds the search.
pub fn length_2x3(rho: &BipartiteState, witness: Option<&[ProductTerm]>, tau: f64) -> Result<LengthResult> {
    if (rho.dim_a(), rho.dim_b()) != (2, 3) {
        return Err(Error::Dimension("length_2x3 needs a 2 x 3 state".into()));
    }
    let hints: Vec<ProductVector> = witness.unwrap_or(&[]).iter().map(|t| t.vector.clone()).collect();
    let res = greedy_decomposition(rho, &hints, tau)?;
    let b = res.chain[0];
    if res.length != b.max() {
        return Err(Error::Inconsistent(format!(
            "decomposition has {} terms for birank {b}",
            res.length
        )));
    }
    if res.reconstruction_error > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "decomposition misses the state by {:e} of its trace",
            res.reconstruction_error
        )));
    }
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreKind {
    Zero,
    Edge,
    Separable,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct EdgeDecomposition {
    pub core: BipartiteState,
    /// Pure product summands split off as `B`-direct summands.
    pub summands: Vec<ProductTerm>,
    pub core_kind: CoreKind,
    pub edge: Option<EdgeVerdict>,
    /// A decomposition of the core when it is separable.
    pub core_terms: Vec<ProductTerm>,
    pub direct_sum_verified: bool,
}

impl EdgeDecomposition {
    /// All product terms when the input is separable.
    pub fn separable_terms(&self) -> Option<Vec<ProductTerm>> {
        match self.core_kind {
            CoreKind::Zero | CoreKind::Separable => {
                Some(self.summands.iter().chain(&self.core_terms).cloned().collect())
            }
            _ => None,
        }
    }
}

/// Splits a `2 (x) N` PPT state of birank `(N+1, N+1)` into pure product
/// `B`-direct summands and a core that is then tested for being an edge
/// state (or decomposed when separable).
pub fn theorem23_decompose(rho: &BipartiteState, grid: usize, tau: f64) -> Result<EdgeDecomposition> {
    let n = rho.dim_b();
    let b0 = birank(rho, tau)?;
    if rho.dim_a() != 2 || b0 != Birank::new(n + 1, n + 1) {
        return Err(Error::Contract(format!(
            "edge decomposition needs a 2 x {n} state of birank ({0}, {0}), got {b0}",
            n + 1
        )));
    }
    let tr = rho.trace();
    let mut cur = rho.clone();
    let mut summands: Vec<ProductTerm> = Vec::new();
    let mut seen: Vec<ProductVector> = Vec::new();
    'split: loop {
        if cur.matrix().max_abs() <= 1e-11 * tr {
            break;
        }
        let geom = StateGeometry::new(&cur, tau)?;
        let b = geom.birank();
        let rb = rank_tol(&partial_trace(&cur, Side::B), tau)?;
        let found = sweep(&geom, grid)?.vectors;
        seen.extend(found.iter().cloned());
        for v in found {
            let Some(c) = candidate(&geom, &v) else { continue };
            let lambda = c.analysis.threshold();
            let Ok(sub) = subtract_with(&geom, &c.pv, lambda) else { continue };
            if sub.observed != Birank::new(b.r.saturating_sub(1), b.s.saturating_sub(1)) {
                continue;
            }
            if local_ranks(&sub.state, tau)?.1 + 1 != rb {
                continue;
            }
            summands.push(ProductTerm::new(lambda, c.pv));
            cur = sub.state;
            continue 'split;
        }
        break;
    }
    let mut parts: Vec<BipartiteState> = summands
        .iter()
        .map(|t| mixture(std::slice::from_ref(t)))
        .collect::<Result<_>>()?;
    let is_zero = cur.matrix().max_abs() <= 1e-11 * tr;
    if !is_zero {
        parts.push(cur.clone());
    }
    let direct_sum_verified = verify_direct_sum(rho, &parts, Side::B, tau.max(1e-9))?;
    if is_zero {
        return Ok(EdgeDecomposition {
            core: BipartiteState::zero(2, n),
            summands,
            core_kind: CoreKind::Zero,
            edge: None,
            core_terms: Vec::new(),
            direct_sum_verified,
        });
    }
    let verdict = is_edge_state(&cur, grid, tau)?;
    let (core_kind, core_terms) = match verdict.verdict {
        EdgeKind::Edge => (CoreKind::Edge, Vec::new()),
        EdgeKind::Inconclusive => (CoreKind::Inconclusive, Vec::new()),
        EdgeKind::NotEdge => match greedy_decomposition(&cur, &seen, tau) {
            Ok(res) if res.reconstruction_error <= 1e-8 => (CoreKind::Separable, res.terms),
            Ok(res) => {
                return Err(Error::Inconsistent(format!(
                    "core decomposition misses by {:e}",
                    res.reconstruction_error
                )))
            }
            Err(e) => {
                return Err(Error::Inconsistent(format!(
                    "core has joint-range product vectors but none splits it: {e}"
                )))
            }
        },
    };
    Ok(EdgeDecomposition {
        core: cur,
        summands,
        core_kind,
        edge: Some(verdict),
        core_terms,
        direct_sum_verified,
    })
}

/// One removed term together with what remains.
#[derive(Clone, Debug)]
pub struct Peel {
    pub sigma: BipartiteState,
    pub removed: ProductTerm,
    pub remaining: Vec<ProductTerm>,
}

/// Removes a decomposition term whose removal lowers the rank by one. The
/// decomposition must have exactly `rank rho` terms.
pub fn lemma22_peel(rho: &BipartiteState, decomposition: &[ProductTerm], tau: f64) -> Result<Peel> {
    let r = rank_tol(rho.matrix(), tau)?;
    if decomposition.len() != r {
        return Err(Error::Contract(format!(
            "peeling needs a decomposition with rank = {r} terms, got {}",
            decomposition.len()
        )));
    }
    let rebuilt = mixture(decomposition)?;
    if rebuilt.matrix().max_abs_diff(rho.matrix()) > 1e-8 * rho.trace() {
        return Err(Error::Contract("decomposition does not sum to the state".into()));
    }
    for i in 0..decomposition.len() {
        let remaining: Vec<ProductTerm> = decomposition
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, t)| t.clone())
            .collect();
        let sigma = if remaining.is_empty() {
            BipartiteState::zero(rho.dim_a(), rho.dim_b())
        } else {
            mixture(&remaining)?
        };
        let rs = if remaining.is_empty() { 0 } else { rank_tol(sigma.matrix(), tau)? };
        if rs + 1 == r {
            return Ok(Peel {
                sigma,
                removed: decomposition[i].clone(),
                remaining,
            });
        }
    }
    Err(Error::Inconsistent("no term lowers the rank when removed".into()))
}

/// Smallest eigenvalue of a state relative to its trace.
pub fn relative_min_eigenvalue(rho: &BipartiteState) -> Result<f64> {
    Ok(eig_hermitian(rho.matrix())?.min_value() / rho.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::ket;
    use crate::numerics::DEFAULT_TAU;
    use crate::sampling;

    #[test]
    fn g_sum_is_r_minus_s() {
        let mut rng = sampling::rng(4);
        for count in [2, 4, 5, 7] {
            let (rho, terms) = sampling::separable(&mut rng, 2, 4, count).unwrap();
            let b = birank(&rho, DEFAULT_TAU).unwrap();
            let s = g_sum(&rho, &terms, DEFAULT_TAU).unwrap();
            assert!((s - (b.r as f64 - b.s as f64)).abs() < 1e-8, "{s} vs {b}");
        }
    }

    #[test]
    fn peel_independent_terms() {
        let terms: Vec<ProductTerm> = [(0, 0), (1, 1), (0, 2)]
            .iter()
            .map(|&(i, j)| {
                let mut a = vec![0.0; 2];
                a[i] = 1.0;
                let mut b = vec![0.0; 3];
                b[j] = 1.0;
                ProductTerm::unit(ProductVector::from_real(&a, &b).unwrap())
            })
            .collect();
        let rho = mixture(&terms).unwrap();
        let p = lemma22_peel(&rho, &terms, DEFAULT_TAU).unwrap();
        assert_eq!(rank_tol(p.sigma.matrix(), DEFAULT_TAU).unwrap(), 2);
        assert!(lemma22_peel(&rho, &terms[..2], DEFAULT_TAU).is_err());
    }

    #[test]
    fn length_of_random_full_rank_2x3() {
        let mut rng = sampling::rng(8);
        let (rho, terms) = sampling::separable(&mut rng, 2, 3, 8).unwrap();
        let res = length_2x3(&rho, Some(&terms), DEFAULT_TAU).unwrap();
        assert_eq!(res.length, 6);
        assert!(res.reconstruction_error < 1e-8);
    }

    #[test]
    fn diagonal_44_length_four() {
        let mut rho = BipartiteState::zero(2, 3);
        for (i, j) in [(0, 0), (1, 1), (1, 2), (0, 2)] {
            rho = rho.plus_projector(1.0, &ket(2, 3, i, j));
        }
        let res = length_2x3(&rho, None, DEFAULT_TAU).unwrap();
        assert_eq!(res.length, 4);
    }
}
