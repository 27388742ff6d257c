//! Subtraction of product states from PPT states and the searches built on
//! it: joint-range product vectors, edge tests, lengths and edge-state
//! decompositions.

mod length;
mod search;
mod thresholds;

pub use length::{
    find_balanced_vector, g_sum, greedy_decomposition, lemma22_peel, length_2x3,
    relative_min_eigenvalue, theorem23_decompose, CoreKind, EdgeDecomposition, LengthResult, Peel,
};
pub use search::{
    is_edge_state, lemma10_fiber, range_product_vectors_2xn, subtraction_margins, EdgeKind,
    EdgeVerdict, JointRange, SweepResult, DEFAULT_GRID,
};
pub use thresholds::{
    subtract, subtraction_analysis, StateGeometry, Subtraction, SubtractionAnalysis,
    MEMBERSHIP_TOL, TIE_TOL,
};
