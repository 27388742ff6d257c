use serde::{Deserialize, Serialize};

use crate::bipartite::{birank, partial_transpose, BipartiteState, Birank, ProductVector};
use crate::error::{Error, Result, ViolatedSide};
use crate::numerics::{
    self, eig_hermitian, projection_residual, pseudo_inverse_from, quadratic_form, CVector,
    ComplexMatrix, Spectrum,
};

/// Relative projection residual below which a vector counts as in a range.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Relative gap below which the two thresholds are declared equal.
pub const TIE_TOL: f64 = 1e-7;

/// Spectral data of `rho` and `rho^G` shared by every subtraction query.
#[derive(Clone, Debug)]
pub struct StateGeometry {
    pub state: BipartiteState,
    pub partial_transpose: BipartiteState,
    pub tau: f64,
    pub spectrum: Spectrum,
    pub spectrum_pt: Spectrum,
    pub pinv: ComplexMatrix,
    pub pinv_pt: ComplexMatrix,
    pub range: Vec<CVector>,
    pub range_pt: Vec<CVector>,
    pub kernel: Vec<CVector>,
    pub kernel_pt: Vec<CVector>,
}

impl StateGeometry {
    /// Fails with a domain error when `rho` or `rho^G` has an eigenvalue
    /// below `-tau * tr(rho)`.
    pub fn new(rho: &BipartiteState, tau: f64) -> Result<Self> {
        numerics::check_tau(tau)?;
        let pt = partial_transpose(rho);
        let spectrum = eig_hermitian(rho.matrix())?;
        let spectrum_pt = eig_hermitian(pt.matrix())?;
        let tr = rho.trace();
        let pinv = pseudo_inverse_from(&spectrum, tr, tau)?;
        let pinv_pt = pseudo_inverse_from(&spectrum_pt, tr, tau).map_err(|_| {
            Error::Domain(format!(
                "state is NPT (smallest eigenvalue of the partial transpose {:e})",
                spectrum_pt.min_value()
            ))
        })?;
        Ok(Self {
            range: spectrum.range_vectors(tau),
            range_pt: spectrum_pt.range_vectors(tau),
            kernel: spectrum.kernel_vectors(tau),
            kernel_pt: spectrum_pt.kernel_vectors(tau),
            state: rho.clone(),
            partial_transpose: pt,
            tau,
            spectrum,
            spectrum_pt,
            pinv,
            pinv_pt,
        })
    }

    pub fn birank(&self) -> Birank {
        Birank::new(self.range.len(), self.range_pt.len())
    }

    /// `(||P_ker e,f|| / ||e,f||, ||P_ker' e*,f|| / ||e*,f||)`
    pub fn membership_residuals(&self, pv: &ProductVector) -> (f64, f64) {
        (
            projection_residual(&self.range, &pv.tensor()),
            projection_residual(&self.range_pt, &pv.partial_conjugate().tensor()),
        )
    }

    /// `(<e,f|rho^+|e,f>, <e*,f|(rho^G)^+|e*,f>)`
    pub fn quadratic_forms(&self, pv: &ProductVector) -> (f64, f64) {
        (
            quadratic_form(&self.pinv, &pv.tensor()),
            quadratic_form(&self.pinv_pt, &pv.partial_conjugate().tensor()),
        )
    }

    pub fn analyze(&self, pv: &ProductVector) -> SubtractionAnalysis {
        let (res0, res1) = self.membership_residuals(pv);
        let (q0, q1) = self.quadratic_forms(pv);
        let in_range_rho = res0 <= MEMBERSHIP_TOL;
        let in_range_gamma = res1 <= MEMBERSHIP_TOL;
        let inv = |q: f64, ok: bool| if ok && q > 0.0 { 1.0 / q } else { f64::INFINITY };
        SubtractionAnalysis {
            lambda0: inv(q0, in_range_rho),
            lambda1: inv(q1, in_range_gamma),
            in_range_rho,
            in_range_gamma,
            g: q0 - q1,
            residual_rho: res0,
            residual_gamma: res1,
        }
    }
}

/// Largest weights that keep `rho - lambda |e,f><e,f|` and its partial
/// transpose positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtractionAnalysis {
    /// `1 / <e,f|rho^+|e,f>`, infinite when `|e,f>` is outside the range.
    pub lambda0: f64,
    /// `1 / <e*,f|(rho^G)^+|e*,f>`, infinite when `|e*,f>` is outside the range.
    pub lambda1: f64,
    pub in_range_rho: bool,
    pub in_range_gamma: bool,
    /// `<e,f|rho^+|e,f> - <e*,f|(rho^G)^+|e*,f>`
    pub g: f64,
    pub residual_rho: f64,
    pub residual_gamma: f64,
}

impl SubtractionAnalysis {
    pub fn threshold(&self) -> f64 {
        self.lambda0.min(self.lambda1)
    }

    pub fn both_in_range(&self) -> bool {
        self.in_range_rho && self.in_range_gamma
    }

    /// `g` divided by the sum of the two quadratic forms, in `[-1, 1]`.
    pub fn relative_g(&self) -> f64 {
        let s = 1.0 / self.lambda0 + 1.0 / self.lambda1;
        if s > 0.0 && s.is_finite() {
            self.g / s
        } else {
            0.0
        }
    }

    pub fn thresholds_tied(&self) -> bool {
        tied(self.lambda0, self.lambda1)
    }
}

fn tied(x: f64, y: f64) -> bool {
    x.is_finite() && y.is_finite() && (x - y).abs() <= TIE_TOL * x.max(y)
}

/// Analysis of subtracting multiples of `|e,f><e,f|` from a PPT state.
pub fn subtraction_analysis(rho: &BipartiteState, pv: &ProductVector, tau: f64) -> Result<SubtractionAnalysis> {
    check_shape(rho, pv)?;
    Ok(StateGeometry::new(rho, tau)?.analyze(pv))
}

fn check_shape(rho: &BipartiteState, pv: &ProductVector) -> Result<()> {
    if pv.a.len() != rho.dim_a() || pv.b.len() != rho.dim_b() {
        return Err(Error::Dimension(format!(
            "product vector of shape {}x{} against a {}x{} state",
            pv.a.len(),
            pv.b.len(),
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    Ok(())
}

/// Outcome of one subtraction.
#[derive(Clone, Debug)]
pub struct Subtraction {
    pub state: BipartiteState,
    pub before: Birank,
    /// Birank predicted from comparing `lambda` with the thresholds.
    pub predicted: Birank,
    /// Birank recomputed from the subtracted state.
    pub observed: Birank,
    pub analysis: SubtractionAnalysis,
}

impl Subtraction {
    pub fn confirmed(&self) -> bool {
        self.predicted == self.observed
    }
}

/// `rho - lambda |e,f><e,f|`, with the four-way birank drop predicted from
/// the thresholds (tie rule [`TIE_TOL`]) and confirmed by recomputation.
pub fn subtract(rho: &BipartiteState, pv: &ProductVector, lambda: f64, tau: f64) -> Result<Subtraction> {
    check_shape(rho, pv)?;
    let geom = StateGeometry::new(rho, tau)?;
    subtract_with(&geom, pv, lambda)
}

pub(crate) fn subtract_with(geom: &StateGeometry, pv: &ProductVector, lambda: f64) -> Result<Subtraction> {
    let analysis = geom.analyze(pv);
    if !analysis.both_in_range() {
        return Err(Error::Contract(format!(
            "product vector is not in the ranges (residuals {:e}, {:e})",
            analysis.residual_rho, analysis.residual_gamma
        )));
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let tau = geom.tau;
    if lambda > analysis.lambda0 * (1.0 + tau) && !tied(lambda, analysis.lambda0) {
        return Err(Error::WouldBeNpt {
            side: ViolatedSide::State,
            lambda,
            threshold: analysis.lambda0,
        });
    }
    if lambda > analysis.lambda1 * (1.0 + tau) && !tied(lambda, analysis.lambda1) {
        return Err(Error::WouldBeNpt {
            side: ViolatedSide::PartialTranspose,
            lambda,
            threshold: analysis.lambda1,
        });
    }
    let before = geom.birank();
    let predicted = Birank::new(
        before.r - usize::from(tied(lambda, analysis.lambda0)),
        before.s - usize::from(tied(lambda, analysis.lambda1)),
    );
    let state = geom.state.plus_projector(-lambda, &pv.tensor());
    let observed = birank(&state, tau)?;
    Ok(Subtraction {
        state,
        before,
        predicted,
        observed,
        analysis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::ket;
    use crate::numerics::DEFAULT_TAU;

    fn e(i: usize, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn table2_44() -> BipartiteState {
        // |00> + |11> + |12> + |02> projectors: diagonal, birank (4, 4).
        let mut rho = BipartiteState::zero(2, 3);
        for (i, j) in [(0, 0), (1, 1), (1, 2), (0, 2)] {
            rho = rho.plus_projector(1.0, &ket(2, 3, i, j));
        }
        rho
    }

    #[test]
    fn rank_one_thresholds() {
        let rho = BipartiteState::zero(2, 2).plus_projector(1.0, &ket(2, 2, 0, 0));
        let pv = ProductVector::from_real(&e(0, 2), &e(0, 2)).unwrap();
        let a = subtraction_analysis(&rho, &pv, DEFAULT_TAU).unwrap();
        assert!((a.lambda0 - 1.0).abs() < 1e-12 && (a.lambda1 - 1.0).abs() < 1e-12);
        assert!(a.g.abs() < 1e-12);
    }

    #[test]
    fn diagonal_state_full_and_half_threshold() {
        let rho = table2_44();
        let pv = ProductVector::from_real(&e(0, 2), &e(0, 3)).unwrap();
        let full = subtract(&rho, &pv, 1.0, DEFAULT_TAU).unwrap();
        assert_eq!(full.observed, Birank::new(3, 3));
        assert!(full.confirmed());
        let half = subtract(&rho, &pv, 0.5, DEFAULT_TAU).unwrap();
        assert_eq!(half.observed, Birank::new(4, 4));
        assert!(half.confirmed());
    }

    #[test]
    fn over_threshold_is_rejected() {
        let rho = table2_44();
        let pv = ProductVector::from_real(&e(0, 2), &e(0, 3)).unwrap();
        assert!(matches!(
            subtract(&rho, &pv, 1.5, DEFAULT_TAU),
            Err(Error::WouldBeNpt { side: ViolatedSide::State, .. })
        ));
    }

    #[test]
    fn out_of_range_vector_gets_infinite_threshold() {
        let rho = table2_44();
        let pv = ProductVector::from_real(&e(1, 2), &e(0, 3)).unwrap();
        let a = subtraction_analysis(&rho, &pv, DEFAULT_TAU).unwrap();
        assert!(!a.in_range_rho && a.lambda0.is_infinite());
        assert!(subtract(&rho, &pv, 0.1, DEFAULT_TAU).is_err());
    }

    #[test]
    fn npt_state_rejected() {
        let mut v = ket(2, 2, 0, 0);
        v[3] = numerics::ONE;
        let bell = BipartiteState::zero(2, 2).plus_projector(1.0, &v);
        let pv = ProductVector::from_real(&e(0, 2), &e(0, 2)).unwrap();
        assert!(matches!(subtraction_analysis(&bell, &pv, DEFAULT_TAU), Err(Error::Domain(_))));
    }
}
