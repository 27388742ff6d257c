//! Product vectors inside a subspace `W` of `C^3 (x) C^3`.
//!
//! With `p_l` an orthonormal basis of `W^perp`, `|a, b>` lies in `W` iff
//! `M(a) b = 0` for the `(9 - dim W) x 3` matrix `M(a)_{l j} = sum_i
//! conj(p_l[3i + j]) a_i`. So `a` runs over the common zeros of the `3 x 3`
//! minors of `M(a)`: cubics on the projective plane. After a seeded unitary
//! change of coordinates and setting the last coordinate to one, two minors
//! are intersected through their Sylvester resultant.

use crate::bipartite::ProductVector;
use crate::error::{Error, Result};
use crate::numerics::{
    self, kernel_basis, poly_roots, svd, CVector, ComplexMatrix, C64, ONE, ZERO,
};
use crate::sampling;

const COORDINATE_SEED: u64 = 0x5eed_3333;
/// Number of sample points for interpolating the resultant (degree <= 9).
const SAMPLES: usize = 16;

/// Polynomial in `(x, y)` of total degree at most 3: `c[i][j] x^i y^j`.
#[derive(Clone, Copy, Debug)]
struct Cubic {
    c: [[C64; 4]; 4],
}

impl Cubic {
    fn zero() -> Self {
        Self { c: [[ZERO; 4]; 4] }
    }

    fn linear(c0: C64, cx: C64, cy: C64) -> Self {
        let mut p = Self::zero();
        p.c[0][0] = c0;
        p.c[1][0] = cx;
        p.c[0][1] = cy;
        p
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 - i {
                if self.c[i][j] == ZERO {
                    continue;
                }
                for k in 0..4 - i - j {
                    for l in 0..4 - i - j - k {
                        out.c[i + k][j + l] += self.c[i][j] * o.c[k][l];
                    }
                }
            }
        }
        out
    }

    fn add(&self, o: &Self, s: C64) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.c[i][j] += s * o.c[i][j];
            }
        }
        out
    }

    fn swapped(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.c[j][i] = self.c[i][j];
            }
        }
        out
    }

    fn eval(&self, x: C64, y: C64) -> C64 {
        let mut acc = ZERO;
        for i in (0..4).rev() {
            let mut row = ZERO;
            for j in (0..4).rev() {
                row = row * y + self.c[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    fn grad(&self, x: C64, y: C64) -> (C64, C64) {
        let (mut dx, mut dy) = (ZERO, ZERO);
        for i in 0..4 {
            for j in 0..4 {
                let c = self.c[i][j];
                if c == ZERO {
                    continue;
                }
                if i > 0 {
                    dx += c * (i as f64) * x.powu(i as u32 - 1) * y.powu(j as u32);
                }
                if j > 0 {
                    dy += c * (j as f64) * x.powu(i as u32) * y.powu(j as u32 - 1);
                }
            }
        }
        (dx, dy)
    }

    /// Coefficients in `y` (descending, `y^3` first) at a fixed `x`.
    fn in_y(&self, x: C64) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for j in 0..4 {
            let mut v = ZERO;
            for i in (0..4).rev() {
                v = v * x + self.c[i][j];
            }
            out[3 - j] = v;
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.c.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn det3(m: &[[Cubic; 3]; 3]) -> Cubic {
    let t0 = m[1][1].mul(&m[2][2]).add(&m[1][2].mul(&m[2][1]), -ONE);
    let t1 = m[1][0].mul(&m[2][2]).add(&m[1][2].mul(&m[2][0]), -ONE);
    let t2 = m[1][0].mul(&m[2][1]).add(&m[1][1].mul(&m[2][0]), -ONE);
    m[0][0]
        .mul(&t0)
        .add(&m[0][1].mul(&t1), -ONE)
        .add(&m[0][2].mul(&t2), ONE)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: ComplexMatrix) -> C64 {
    let n = a.rows();
    let mut d = ONE;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| a[(p, col)].norm().total_cmp(&a[(q, col)].norm()))
            .unwrap_or(col);
        if a[(piv, col)] == ZERO {
            return ZERO;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            d = -d;
        }
        let p = a[(col, col)];
        d *= p;
        for i in col + 1..n {
            let f = a[(i, col)] / p;
            for j in col..n {
                let t = a[(col, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    d
}

fn sylvester(p: &[C64; 4], q: &[C64; 4]) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(6, 6);
    for r in 0..3 {
        for j in 0..4 {
            s[(r, r + j)] = p[j];
            s[(r + 3, r + j)] = q[j];
        }
    }
    s
}

fn row_norm_product(m: &ComplexMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

struct Problem {
    /// Rows `conj(p_l)` of `W^perp`.
    perp: Vec<CVector>,
    /// Coordinates: `a = U (x, y, 1)`.
    u: ComplexMatrix,
    /// Entries of `M` as linear polynomials in `(x, y)`.
    entries: Vec<[Cubic; 3]>,
    minors: Vec<Cubic>,
    rows_of_minor: Vec<[usize; 3]>,
}

impl Problem {
    fn new(perp: Vec<CVector>, u: ComplexMatrix) -> Self {
        let t = perp.len();
        let entries: Vec<[Cubic; 3]> = perp
            .iter()
            .map(|p| {
                let mut row = [Cubic::zero(); 3];
                for (j, slot) in row.iter_mut().enumerate() {
                    let mut coef = [ZERO; 3];
                    for i in 0..3 {
                        let pc = p[3 * i + j].conj();
                        for (c, cf) in coef.iter_mut().enumerate() {
                            *cf += pc * u[(i, c)];
                        }
                    }
                    *slot = Cubic::linear(coef[2], coef[0], coef[1]);
                }
                row
            })
            .collect();
        let mut minors = Vec::new();
        let mut rows_of_minor = Vec::new();
        for r0 in 0..t {
            for r1 in r0 + 1..t {
                for r2 in r1 + 1..t {
                    minors.push(det3(&[entries[r0], entries[r1], entries[r2]]));
                    rows_of_minor.push([r0, r1, r2]);
                }
            }
        }
        Self {
            perp,
            u,
            entries,
            minors,
            rows_of_minor,
        }
    }

    fn a_of(&self, x: C64, y: C64) -> CVector {
        self.u.mul_vec(&[x, y, ONE])
    }

    fn m_of(&self, x: C64, y: C64) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.entries.len(), 3, |l, j| self.entries[l][j].eval(x, y))
    }

    /// Largest `|minor| / prod(row norms)` over all minors: zero exactly at
    /// rank-deficient `M(a)`.
    fn minor_defect(&self, x: C64, y: C64) -> f64 {
        let m = self.m_of(x, y);
        let norms: Vec<f64> = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        self.minors
            .iter()
            .zip(&self.rows_of_minor)
            .map(|(mi, rows)| {
                let s: f64 = rows.iter().map(|&r| norms[r]).product();
                if s == 0.0 {
                    0.0
                } else {
                    mi.eval(x, y).norm() / s
                }
            })
            .fold(0.0, f64::max)
    }

    /// Gauss-Newton on all minors.
    fn polish(&self, mut x: C64, mut y: C64) -> (C64, C64) {
        for _ in 0..8 {
            let mut jtj = [[ZERO; 2]; 2];
            let mut jtf = [ZERO; 2];
            for m in &self.minors {
                let f = m.eval(x, y);
                let (dx, dy) = m.grad(x, y);
                let g = [dx, dy];
                for r in 0..2 {
                    jtf[r] += g[r].conj() * f;
                    for c in 0..2 {
                        jtj[r][c] += g[r].conj() * g[c];
                    }
                }
            }
            let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
            if det.norm() < 1e-300 {
                break;
            }
            let sx = (jtj[1][1] * jtf[0] - jtj[0][1] * jtf[1]) / det;
            let sy = (jtj[0][0] * jtf[1] - jtj[1][0] * jtf[0]) / det;
            let (nx, ny) = (x - sx, y - sy);
            if !(nx.re.is_finite() && nx.im.is_finite() && ny.re.is_finite() && ny.im.is_finite()) {
                break;
            }
            if self.minor_defect(nx, ny) > self.minor_defect(x, y) {
                break;
            }
            x = nx;
            y = ny;
            if sx.norm() + sy.norm() < 1e-15 * (1.0 + x.norm() + y.norm()) {
                break;
            }
        }
        (x, y)
    }

    /// `||P_{W^perp} (a (x) b)|| / ||a (x) b||`
    fn membership_residual(&self, pv: &ProductVector) -> f64 {
        let t = pv.tensor();
        let n = numerics::norm(&t);
        self.perp
            .iter()
            .map(|p| numerics::inner(p, &t).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / n
    }

    /// Coefficients (descending) of the resultant of two minors with respect
    /// to `y`, or `None` when it vanishes identically.
    fn resultant(&self, p: &Cubic, q: &Cubic) -> Option<Vec<C64>> {
        let mut values = Vec::with_capacity(SAMPLES);
        let mut scale: f64 = 0.0;
        for s in 0..SAMPLES {
            let x = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / SAMPLES as f64);
            let syl = sylvester(&p.in_y(x), &q.in_y(x));
            scale = scale.max(row_norm_product(&syl));
            values.push(det(syl));
        }
        let biggest = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 || biggest <= 1e-10 * scale {
            return None;
        }
        // Inverse DFT: r_i = (1/S) sum_s R(x_s) omega^{-i s}.
        let mut ascending: Vec<C64> = (0..SAMPLES)
            .map(|i| {
                values
                    .iter()
                    .enumerate()
                    .map(|(s, v)| {
                        v * C64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * (i * s) as f64 / SAMPLES as f64,
                        )
                    })
                    .sum::<C64>()
                    / SAMPLES as f64
            })
            .collect();
        let cmax = ascending.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in ascending.iter_mut() {
            if z.norm() <= 1e-11 * cmax {
                *z = ZERO;
            }
        }
        ascending.truncate(10);
        ascending.reverse();
        Some(ascending)
    }
}

/// All product vectors of a 4- or 5-dimensional subspace of `C^3 (x) C^3`,
/// up to scalars.
///
/// Returns [`Error::NonGeneric`] when the solution set is positive
/// dimensional (every resultant vanishes identically).
pub fn product_vectors_in_subspace_3x3(w_basis: &[CVector], tau: f64) -> Result<Vec<ProductVector>> {
    numerics::check_tau(tau)?;
    let dim = w_basis.len();
    if !(4..=5).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "3x3 product-vector finder needs dim W in {{4, 5}}, got {dim}"
        )));
    }
    if w_basis.iter().any(|v| v.len() != 9) {
        return Err(Error::Dimension("W must be a subspace of C^9".into()));
    }
    let rows = ComplexMatrix::from_fn(dim, 9, |i, j| w_basis[i][j].conj());
    let perp = kernel_basis(&rows, tau)?;
    if perp.len() != 9 - dim {
        return Err(Error::Contract("basis of W is linearly dependent".into()));
    }
    let u = sampling::unitary(&mut sampling::rng(COORDINATE_SEED), 3);
    let problem = Problem::new(perp, u);

    let nm = problem.minors.len();
    let mut pair = None;
    'outer: for i in 0..nm {
        for j in i + 1..nm {
            let (mut p, mut q) = (problem.minors[i], problem.minors[j]);
            let lead_y = p.c[0][3].norm() * q.c[0][3].norm();
            let lead_x = p.c[3][0].norm() * q.c[3][0].norm();
            // Eliminate the coordinate with the larger leading coefficient.
            let swap = lead_x > lead_y;
            if swap {
                p = p.swapped();
                q = q.swapped();
            }
            if p.max_abs() == 0.0 || q.max_abs() == 0.0 {
                continue;
            }
            if let Some(res) = problem.resultant(&p, &q) {
                pair = Some((p, res, swap));
                break 'outer;
            }
        }
    }
    let Some((p, res, swap)) = pair else {
        return Err(Error::NonGeneric(
            "every resultant of two minors vanishes: the subspace contains a curve of product vectors"
                .into(),
        ));
    };

    let mut found: Vec<ProductVector> = Vec::new();
    let xs = if res.iter().any(|z| z.norm() > 0.0) { poly_roots(&res)? } else { Vec::new() };
    for x in xs {
        let ycoef = p.in_y(x);
        let ys = match poly_roots(&ycoef) {
            Ok(ys) => ys,
            Err(_) => continue,
        };
        for y in ys {
            let (mut xx, mut yy) = if swap { (y, x) } else { (x, y) };
            if problem.minor_defect(xx, yy) > 1e-3 {
                continue;
            }
            (xx, yy) = problem.polish(xx, yy);
            if problem.minor_defect(xx, yy) > 1e-7 {
                continue;
            }
            let a = numerics::normalized(&problem.a_of(xx, yy));
            let m = ComplexMatrix::from_fn(problem.perp.len(), 3, |l, j| {
                (0..3).map(|i| problem.perp[l][3 * i + j].conj() * a[i]).sum()
            });
            let s = svd(&m)?;
            let b = s.right.column(2);
            let Ok(pv) = ProductVector::new(a, b) else { continue };
            if problem.membership_residual(&pv) > 1e-8 {
                continue;
            }
            let pv = pv.normalized();
            if !found.iter().any(|q| q.parallel_to(&pv, 1e-8)) {
                found.push(pv);
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::ket;
    use crate::numerics::DEFAULT_TAU;

    #[test]
    fn cubic_products_and_eval() {
        let l = Cubic::linear(ONE, C64::new(2.0, 0.0), C64::new(0.0, 1.0));
        let p = l.mul(&l).mul(&l);
        let (x, y) = (C64::new(0.3, -0.2), C64::new(-1.1, 0.4));
        let direct = l.eval(x, y).powu(3);
        assert!((p.eval(x, y) - direct).norm() < 1e-12);
        let (dx, _) = p.grad(x, y);
        assert!((dx - 3.0 * l.eval(x, y).powu(2) * 2.0).norm() < 1e-12);
    }

    #[test]
    fn coordinate_plane_is_non_generic() {
        let w: Vec<CVector> = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]
            .iter()
            .map(|&(i, j)| ket(3, 3, i, j))
            .collect();
        assert!(matches!(
            product_vectors_in_subspace_3x3(&w, DEFAULT_TAU),
            Err(Error::NonGeneric(_))
        ));
    }

    #[test]
    fn random_four_dimensional_subspace_has_none() {
        let mut rng = sampling::rng(17);
        let w: Vec<CVector> = (0..4).map(|_| sampling::vector(&mut rng, 9)).collect();
        assert!(product_vectors_in_subspace_3x3(&w, DEFAULT_TAU).unwrap().is_empty());
    }

    #[test]
    fn planted_product_vectors_are_found() {
        // Five random product vectors span a 5-dim W; generically W holds
        // exactly six product vectors, the five planted ones among them.
        let mut rng = sampling::rng(5);
        let planted: Vec<ProductVector> =
            (0..5).map(|_| sampling::product_vector(&mut rng, 3, 3)).collect();
        let w: Vec<CVector> = planted.iter().map(|p| p.tensor()).collect();
        let found = product_vectors_in_subspace_3x3(&w, DEFAULT_TAU).unwrap();
        assert_eq!(found.len(), 6);
        for p in &planted {
            assert!(found.iter().any(|q| q.parallel_to(p, 1e-8)));
        }
    }
}
