//! Graded-commutative formal power series over Z2^n sign rules.
//!
//! The coefficient ring is the ring of jets: truncated polynomials in the
//! base variables over exact rationals. On top of it sit formal power
//! series in graded formal variables, computed in the quotient by the
//! (T+1)-st power of the maximal homogeneous ideal at the center, for a
//! truncation order T fixed per signature. Morphisms act by formal Taylor
//! substitution, and atlas-level checks verify coordinate transformations,
//! cocycle conditions and the gluing of candidate global sections.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod atlas;
pub mod display;
pub mod error;
pub mod grading;
pub mod jet;
pub mod morphism;
pub mod oracle;
pub mod parse;
pub mod series;
pub mod session;

pub use error::{Error, ParseError, Result};
pub use grading::{
    compare_conventions, realize_sign_rule, validate_commutation_factor, DegreeAssignment,
    DegreeVector, SignTable,
};
pub use jet::{Jet, Valuation};
pub use morphism::{check_inverse_pair, DomainBox, Morphism, SuperdomainSignature};
pub use series::{FormalSignature, Monomial, Series};

/// Exact scalar type used everywhere: arbitrary-precision rationals.
pub type Rational = num::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// The rational n/d. Panics if d = 0.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
