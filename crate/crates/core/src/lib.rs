//! Qubit-qudit and two-qutrit states under partial transpose.
//!
//! The crate builds, analyses and modifies bipartite states `rho` on
//! `C^M (x) C^N`, with the `2 (x) N` case as the main target:
//!
//! - [`numerics`]: dense complex linear algebra (Jacobi eigensolver, ranks,
//!   pseudo-inverses, kernels, characteristic polynomials, polynomial roots).
//! - [`bipartite`]: the state model, partial transpose and traces, birank,
//!   PPT/NPT classification, local operators and direct-sum verification.
//! - [`pencil`]: the matrix pencil of a subspace of `2 (x) N`, its Kronecker
//!   minimal indices, the product-vector bundle of the orthogonal complement,
//!   and product vectors inside subspaces of `3 (x) 3`.
//! - [`surgery`]: subtraction thresholds for product states, range product
//!   vector searches, edge-state tests, length computations and the
//!   edge-state decomposition of birank `(N+1, N+1)` states.
//! - [`atlas`]: constructors for every explicit state family together with
//!   the certificate each one is expected to satisfy.
//! - [`io`], [`report`] and [`cli`]: the state file format, verification
//!   reports and the command-line front end.
//!
//! States are never normalised. The product basis is ordered
//! `|i>_A (x) |j>_B -> i * N + j`.
//!
//! ```
//! use birank::atlas;
//! use birank::bipartite::birank;
//!
//! let rho = atlas::tura_state(3).unwrap();
//! let b = birank(&rho, 1e-9).unwrap();
//! assert_eq!((b.r, b.s), (4, 4));
//! ```

pub mod atlas;
pub mod bipartite;
pub mod cli;
pub mod error;
pub mod io;
pub mod numerics;
pub mod pencil;
pub mod report;
pub mod sampling;
pub mod surgery;

pub use error::{Error, Result};
