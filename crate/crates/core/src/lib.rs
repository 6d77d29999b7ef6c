//! Graph complexes modeling configuration spaces of points on closed
//! manifolds, with exact rational cohomology.

pub mod algebra;
pub mod bv;
pub mod complex;
pub mod diff;
pub mod gc;
pub mod error;
pub mod graph;
pub mod ls;
pub mod operad;

pub use algebra::{BasisElement, DiagonalClass, PDAlgebra, Violation};
pub use confgraph_linalg::Rational;
pub use error::Error;
pub use graph::{enumerate_graphs, Constraints, Dec, Graph, GraphSum};

pub fn format_q(q: &Rational) -> String {
    confgraph_linalg::format_rational(q)
}

pub fn parse_q(s: &str) -> Result<Rational, String> {
    confgraph_linalg::parse_rational(s)
}
