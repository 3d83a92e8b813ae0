//! Invariants of virtual knots and links given in extended Conway notation.
//!
//! The crate computes reduced relative Tutte, Kauffman bracket and Jones
//! polynomials of virtual link families, parity brackets with
//! non-triviality certificates, and complex-zero portraits of Jones
//! polynomials over two-parameter link families.

pub mod conway;
pub mod diagram;
pub mod error;
pub mod families;
pub mod laurent;
pub mod parity;
pub mod portrait;
pub mod selftest;
pub mod tuttegraph;

pub use conway::ConwayExpr;
pub use diagram::VirtualDiagram;
pub use error::Error;
pub use laurent::{LaurentPolynomial, Variable};
pub use tuttegraph::LabeledGraph;
