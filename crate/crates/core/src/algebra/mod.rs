//! Exact scalars, sparse multivariate polynomials, graph-type ideal
//! presentations and graded bookkeeping.

pub mod grading;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod presentation;
pub mod scalar;

pub use monomial::Monomial;
pub use poly::{MultiPoly, VarTable};
pub use presentation::SubvarietyPresentation;
pub use scalar::{FieldSpec, Scalar};
