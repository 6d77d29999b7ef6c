//! Exact linear algebra over the rationals.
//!
//! Sparse matrices, fraction-free ranks, kernels, image membership and
//! Betti numbers of finite cochain complexes. Nothing here touches floating
//! point.

mod complex;
mod echelon;
mod elim;
mod error;
mod matrix;
mod rational;

pub use complex::{betti_from_ranks, betti_of_complex, induced_rank, induced_rank_with, BettiTable, Boundary, CochainComplex};
pub use echelon::{in_image, kernel_basis};
pub use elim::{rank, rank_mod_p};
pub use error::LinalgError;
pub use matrix::SparseMatrix;
pub use rational::{format_rational, parse_rational, Rational};
