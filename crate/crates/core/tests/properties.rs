use birank::bipartite::{
    apply_ilo, birank, classify, mixture, partial_trace, partial_transpose, verify_direct_sum,
    BipartiteState, Side, Verdict,
};
use birank::numerics::{
    char_poly, eig_hermitian, poly_eval, pseudo_inverse, rank_tol, ComplexMatrix, C64, ONE,
};
use birank::sampling;
use proptest::prelude::*;

fn hermitian(seed: u64, n: usize) -> ComplexMatrix {
    sampling::matrix(&mut sampling::rng(seed), n, n).hermitian_part()
}

fn state(seed: u64, da: usize, db: usize, rank: usize) -> BipartiteState {
    sampling::state(&mut sampling::rng(seed), da, db, rank.min(da * db))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 2usize..=16) {
        let h = hermitian(seed, n);
        let sp = eig_hermitian(&h).unwrap();
        let scale = h.max_abs().max(1.0);
        prop_assert!(sp.reconstruct().max_abs_diff(&h) <= 1e-10 * scale);
        let u = &sp.vectors;
        prop_assert!(u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
        prop_assert!(sp.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_unitarily_invariant(seed in any::<u64>(), n in 2usize..=8, rank in 1usize..=8) {
        let mut rng = sampling::rng(seed);
        let rank = rank.min(n);
        let a = sampling::matrix(&mut rng, n, rank);
        let m = a.matmul(&sampling::matrix(&mut rng, rank, n));
        let u = sampling::unitary(&mut rng, n);
        let v = sampling::unitary(&mut rng, n);
        let r = rank_tol(&m, 1e-9).unwrap();
        prop_assert_eq!(r, rank);
        prop_assert_eq!(rank_tol(&m.adjoint(), 1e-9).unwrap(), r);
        prop_assert_eq!(rank_tol(&u.matmul(&m).matmul(&v), 1e-9).unwrap(), r);
    }

    #[test]
    fn pseudo_inverse_is_an_involution(seed in any::<u64>(), n in 2usize..=8, rank in 1usize..=8) {
        let rho = state(seed, 1, n, rank);
        let m = rho.matrix();
        let p = pseudo_inverse(m, 1e-9).unwrap();
        let back = pseudo_inverse(&p, 1e-9).unwrap();
        prop_assert!(back.max_abs_diff(m) <= 1e-8 * m.max_abs());
        prop_assert!(m.matmul(&p).matmul(m).max_abs_diff(m) <= 1e-8 * m.max_abs());
    }

    #[test]
    fn characteristic_polynomial_vanishes_at_eigenvalues(seed in any::<u64>(), n in 2usize..=8) {
        let h = hermitian(seed, n);
        let cp = char_poly(&h).unwrap();
        prop_assert_eq!(cp.coefficients.len(), n + 1);
        let sp = eig_hermitian(&h).unwrap();
        let scale: f64 = cp.coefficients.iter().map(|c| c.norm()).sum();
        for &l in &sp.values {
            let v = poly_eval(&cp.coefficients, C64::new(l, 0.0)).norm();
            prop_assert!(v <= 1e-9 * scale * (1.0 + l.abs()).powi(n as i32));
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=6, rank in 1usize..=18) {
        let rho = state(seed, da, db, rank);
        let twice = partial_transpose(&partial_transpose(&rho));
        prop_assert!(twice.matrix().max_abs_diff(rho.matrix()) <= 1e-13 * rho.matrix().max_abs());
    }

    #[test]
    fn reduced_matrices_of_the_partial_transpose(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=6, rank in 1usize..=18) {
        let rho = state(seed, da, db, rank);
        let pt = partial_transpose(&rho);
        let tol = 1e-12 * rho.trace();
        prop_assert!(partial_trace(&pt, Side::B).max_abs_diff(&partial_trace(&rho, Side::B)) <= tol);
        prop_assert!(partial_trace(&pt, Side::A).max_abs_diff(&partial_trace(&rho, Side::A).transpose()) <= tol);
    }

    #[test]
    fn birank_is_invariant_under_local_operators(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=6, rank in 1usize..=18) {
        let rho = state(seed, da, db, rank);
        let mut rng = sampling::rng(seed ^ 0x5bd1e995);
        let a = sampling::invertible(&mut rng, da, 1e3);
        let b = sampling::invertible(&mut rng, db, 1e3);
        let image = apply_ilo(&rho, &a, &b).unwrap();
        prop_assert_eq!(birank(&image.state, 1e-9).unwrap(), birank(&rho, 1e-9).unwrap());
    }

    #[test]
    fn block_sums_commute_with_partial_transpose(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=6) {
        let mut rng = sampling::rng(seed);
        let split = 1 + (seed as usize) % (db - 1);
        let block = |rng: &mut sampling::SeededRng, lo: usize, hi: usize| {
            let mut m = ComplexMatrix::zeros(da * db, da * db);
            for _ in 0..da * (hi - lo) {
                let mut v = vec![C64::new(0.0, 0.0); da * db];
                for i in 0..da {
                    for j in lo..hi {
                        v[i * db + j] = sampling::complex(rng);
                    }
                }
                m.add_scaled(&ComplexMatrix::outer(&v), ONE);
            }
            BipartiteState::new(da, db, m.hermitian_part()).unwrap()
        };
        let r1 = block(&mut rng, 0, split);
        let r2 = block(&mut rng, split, db);
        let rho = r1.add(&r2).unwrap();
        let parts = [partial_transpose(&r1), partial_transpose(&r2)];
        prop_assert!(verify_direct_sum(&partial_transpose(&rho), &parts, Side::B, 1e-9).unwrap());
    }

    #[test]
    fn block_sums_of_ppt_states_are_ppt(seed in any::<u64>(), db in 2usize..=5) {
        let mut rng = sampling::rng(seed);
        let mut terms1 = sampling::product_terms(&mut rng, 2, db, 3);
        let mut terms2 = sampling::product_terms(&mut rng, 2, 2, 3);
        // Put the second block on two fresh B levels.
        for t in &mut terms2 {
            let mut b = vec![C64::new(0.0, 0.0); db + 2];
            b[db] = t.vector.b[0];
            b[db + 1] = t.vector.b[1];
            t.vector.b = b;
        }
        for t in &mut terms1 {
            t.vector.b.extend([C64::new(0.0, 0.0); 2]);
        }
        let r1 = mixture(&terms1).unwrap();
        let r2 = mixture(&terms2).unwrap();
        let rho = r1.add(&r2).unwrap();
        prop_assert!(verify_direct_sum(&rho, &[r1, r2], Side::B, 1e-9).unwrap());
        prop_assert_eq!(classify(&rho, 1e-9).unwrap().verdict, Verdict::Ppt);
    }
}
