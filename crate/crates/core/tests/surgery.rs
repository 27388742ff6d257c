use birank::atlas;
use birank::bipartite::{birank, classify, mixture, Birank, ProductVector, Verdict};
use birank::numerics::{c, ComplexMatrix};
use birank::sampling;
use birank::surgery::{
    g_sum, greedy_decomposition, is_edge_state, lemma22_peel, length_2x3, subtract,
    subtraction_analysis, theorem23_decompose, CoreKind, EdgeKind,
};

const TAU: f64 = 1e-9;

#[test]
fn edge_family_members_are_their_own_cores() {
    for n in 4..=5 {
        let rho = atlas::tura_state(n).unwrap();
        let d = theorem23_decompose(&rho, 1024, TAU).unwrap();
        assert_eq!(d.core_kind, CoreKind::Edge, "N = {n}");
        assert!(d.summands.is_empty());
        assert_eq!(d.core.matrix().max_abs_diff(rho.matrix()), 0.0);
    }
}

#[test]
fn smallest_edge_family_member_has_a_product_decomposition() {
    let rho = atlas::tura_state(3).unwrap();
    let v = is_edge_state(&rho, 1024, TAU).unwrap();
    assert_eq!(v.verdict, EdgeKind::NotEdge);
    let res = greedy_decomposition(&rho, &[], TAU).unwrap();
    assert_eq!(res.length, 4);
    assert!(res.reconstruction_error < 1e-8);
    assert!(res.terms.iter().all(|t| t.weight > 0.0));
}

#[test]
fn product_summand_is_split_off_an_edge_core() {
    // Edge state on B levels 0..3 plus a product term on the fresh level 4.
    let core = atlas::tura_state(4).unwrap().extend_b(5).unwrap();
    let extra = ProductVector::new(vec![c(1.0, 0.0), c(0.5, -0.5)], {
        let mut b = vec![c(0.0, 0.0); 5];
        b[4] = c(1.0, 0.0);
        b
    })
    .unwrap();
    let rho = core.plus_projector(0.7, &extra.tensor());
    assert_eq!(birank(&rho, TAU).unwrap(), Birank::new(6, 6));
    let d = theorem23_decompose(&rho, 1024, TAU).unwrap();
    assert_eq!(d.summands.len(), 1);
    assert!(d.summands[0].vector.parallel_to(&extra, 1e-8));
    assert!((d.summands[0].weight * d.summands[0].vector.norm_sqr() - 0.7 * extra.norm_sqr()).abs() < 1e-8);
    assert!(d.direct_sum_verified);
    assert_eq!(d.core_kind, CoreKind::Edge);
    assert!(d.core.matrix().max_abs_diff(core.matrix()) < 1e-9);
}

#[test]
fn separable_state_of_critical_birank_decomposes_fully() {
    let c = atlas::prop25_separable(4, 1, 1).unwrap();
    let d = theorem23_decompose(&c.state, 1024, TAU).unwrap();
    let terms = d.separable_terms().expect("separable");
    let rebuilt = mixture(&terms).unwrap();
    assert!(rebuilt.matrix().max_abs_diff(c.state.matrix()) < 1e-8 * c.state.trace());
}

#[test]
fn random_full_rank_qubit_qutrit_state_has_length_six() {
    let mut rng = sampling::rng(77);
    for _ in 0..5 {
        let (rho, _) = sampling::separable(&mut rng, 2, 3, 9).unwrap();
        let res = length_2x3(&rho, None, TAU).unwrap();
        assert_eq!(res.length, 6);
        assert_eq!(res.chain.first(), Some(&Birank::new(6, 6)));
        assert_eq!(res.chain.last(), Some(&Birank::new(0, 0)));
    }
}

#[test]
fn peeling_keeps_the_rest_of_the_decomposition() {
    let mut rng = sampling::rng(5);
    let (rho, terms) = sampling::separable(&mut rng, 2, 3, 4).unwrap();
    let peel = lemma22_peel(&rho, &terms, TAU).unwrap();
    assert_eq!(peel.remaining.len(), 3);
    let back = peel.sigma.plus_projector(peel.removed.weight, &peel.removed.vector.tensor());
    assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9 * rho.trace());
    assert_eq!(birank(&peel.sigma, TAU).unwrap(), Birank::new(3, 3));
}

#[test]
fn g_sum_matches_birank_difference_for_unbalanced_states() {
    let c = atlas::prop25_separable(4, 1, 3).unwrap();
    let terms = atlas::prop25_terms(4, 1, 3).unwrap();
    let s = g_sum(&c.state, &terms, TAU).unwrap();
    assert!((s - (5.0 - 7.0)).abs() < 1e-6, "{s}");
}

#[test]
fn subtraction_below_threshold_keeps_positivity() {
    let mut rng = sampling::rng(19);
    let (rho, terms) = sampling::separable(&mut rng, 2, 4, 10).unwrap();
    let pv = &terms[3].vector;
    let an = subtraction_analysis(&rho, pv, TAU).unwrap();
    let sub = subtract(&rho, pv, 0.9 * an.threshold(), TAU).unwrap();
    assert!(sub.confirmed());
    assert_eq!(sub.observed, sub.before);
    assert_eq!(classify(&sub.state, TAU).unwrap().verdict, Verdict::Ppt);
    assert!(subtract(&rho, pv, 1.5 * an.threshold(), TAU).is_err());
}

#[test]
fn every_fixed_example_passes_its_certificate() {
    for id in atlas::FIXED_IDS {
        let ex = atlas::fixed_example(id).unwrap();
        assert!(ex.certificate.check(&ex.state, TAU).unwrap().pass, "{id}");
        assert!(ex.note.is_none(), "{id}: {:?}", ex.note);
    }
}

#[test]
fn constructed_entangled_states_exceed_their_local_ranks() {
    for n in 4..=5 {
        for k in 0..n {
            let c = atlas::prop28_state(n, k, 0, None, None).unwrap();
            assert!(atlas::rank_exceeds_local_ranks(&c.state, TAU).unwrap());
        }
    }
}

#[test]
fn local_operators_preserve_table_birank() {
    let ex = atlas::fixed_example("table2-(4,5)").unwrap();
    let mut rng = sampling::rng(3);
    let a: ComplexMatrix = sampling::invertible(&mut rng, 2, 1e3);
    let b = sampling::invertible(&mut rng, 3, 1e3);
    let image = birank::bipartite::apply_ilo(&ex.state, &a, &b).unwrap();
    assert_eq!(birank(&image.state, TAU).unwrap(), Birank::new(4, 5));
}
