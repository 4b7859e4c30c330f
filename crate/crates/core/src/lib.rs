//! Exact construction and verification of conformal symmetry breaking
//! operators on differential forms between `R^n` and `R^{n-1}`.
//!
//! All arithmetic is exact over the Gaussian rationals, with the spectral
//! parameter `lambda` kept as a polynomial variable.

pub mod error;
pub mod coeffs;
pub mod dsl;
pub mod exterior;
pub mod operators;
pub mod linalg;
pub mod rep;
pub mod singular;
pub mod verify;
pub mod scalars;

pub use dsl::{parse_op, pretty_print, Bindings};
pub use error::{Error, Result};
pub use exterior::{monomial_basis, MultiIndex, Mono, Poly, PolyForm};
pub use operators::families::{
    family, family_first, family_fourth, family_second, family_third, middle_degree, FamilySpec, MiddleCase,
    MiddleVariant, Presentation,
};
pub use operators::{op_equal, ops_equal, Atom, OpExpr, Side, Sig, Witness};
pub use scalars::{GaussianRational, Rational, Scalar};
pub use verify::{run_all, run_suite, CaseResult, Config, SuiteReport, SUITES};
