//! Seeded random matrices, vectors and states.
//!
//! Entries are drawn uniformly from the unit box of `C`; this is not Haar
//! measure, only a reproducible source of generic inputs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bipartite::{mixture, BipartiteState, ProductTerm, ProductVector};
use crate::error::Result;
use crate::numerics::{self, orthonormalize, svd, CVector, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v: CVector = (0..n).map(|_| complex(rng)).collect();
        if numerics::norm(&v) > 1e-3 {
            return v;
        }
    }
}

pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

/// Unitary from Gram-Schmidt on random columns.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let cols: Vec<CVector> = (0..n).map(|_| vector(rng, n)).collect();
        let q = orthonormalize(&cols, 1e-6);
        if q.len() == n {
            return ComplexMatrix::from_columns(n, &q);
        }
    }
}

/// Invertible matrix with condition number at most `max_condition`.
pub fn invertible<R: Rng>(rng: &mut R, n: usize, max_condition: f64) -> ComplexMatrix {
    loop {
        let m = matrix(rng, n, n);
        if let Ok(s) = svd(&m) {
            let small = s.values[n - 1];
            if small > 0.0 && s.largest() / small <= max_condition {
                return m;
            }
        }
    }
}

/// `sum_i |v_i><v_i|` over `rank` random vectors.
pub fn state<R: Rng>(rng: &mut R, dim_a: usize, dim_b: usize, rank: usize) -> BipartiteState {
    let d = dim_a * dim_b;
    let mut m = ComplexMatrix::zeros(d, d);
    for _ in 0..rank {
        m.add_scaled(&ComplexMatrix::outer(&vector(rng, d)), numerics::ONE);
    }
    BipartiteState::new(dim_a, dim_b, m.hermitian_part()).expect("sum of projectors is Hermitian")
}

pub fn product_vector<R: Rng>(rng: &mut R, dim_a: usize, dim_b: usize) -> ProductVector {
    ProductVector::new(vector(rng, dim_a), vector(rng, dim_b)).expect("nonzero factors")
}

/// Random product terms with weights in `[0.5, 2)`.
pub fn product_terms<R: Rng>(rng: &mut R, dim_a: usize, dim_b: usize, count: usize) -> Vec<ProductTerm> {
    (0..count)
        .map(|_| ProductTerm::new(rng.gen_range(0.5..2.0), product_vector(rng, dim_a, dim_b)))
        .collect()
}

/// Separable state together with the decomposition that built it.
pub fn separable<R: Rng>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
    count: usize,
) -> Result<(BipartiteState, Vec<ProductTerm>)> {
    let terms = product_terms(rng, dim_a, dim_b, count);
    Ok((mixture(&terms)?, terms))
}
