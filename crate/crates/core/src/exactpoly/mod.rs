//! Exact polynomial and rational-function arithmetic, the expression parser,
//! and reduction of generating triples to standard form.

mod parse;
mod poly;
mod ratfunc;
mod triple;

pub use parse::parse_expression;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use triple::{class_invariant, to_standard_form, GenTriple};

use crate::error::Result;
use crate::scalar::GaussianRational;

/// Polynomial over ℚ(i).
pub type GPoly = Poly<GaussianRational>;
/// Rational function over ℚ(i).
pub type GRatFunc = RatFunc<GaussianRational>;

/// Monic gcd; errors when both inputs are zero.
pub fn poly_gcd(p: &GPoly, q: &GPoly) -> Result<GPoly> {
    Poly::gcd(p, q)
}

/// True iff `gcd(P, P′)` is constant; errors on the zero polynomial.
pub fn is_square_free(p: &GPoly) -> Result<bool> {
    p.is_square_free()
}
