//! Root distributions of polynomial sequences with a quadratic generating
//! denominator, `Σ H_m(z) tᵐ = 1/(A(z)t² + B(z)t + C(z))`, and the pair
//! correlation of those roots along arcs of the curve that carries them.
//!
//! Exact algebra ([`exactpoly`], [`genseq`]) is generic over a [`scalar::Field`];
//! the float layers are generic over [`scalar::Real`] where the algorithm
//! allows it. The aliases below fix the concrete types used by the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arcmap;
pub mod closedform;
pub mod error;
pub mod exactpoly;
pub mod export;
pub mod genseq;
pub mod numpoly;
pub mod paircorr;
pub mod quad;
pub mod rootfind;
pub mod scalar;

pub use error::{Error, Result};

/// Exact Gaussian rational `p + q·i`.
pub type Scalar = scalar::GaussianRational;
/// Polynomial over the Gaussian rationals.
pub type Poly = exactpoly::GPoly;
/// Reduced rational function over the Gaussian rationals.
pub type RatFunc = exactpoly::GRatFunc;
/// Polynomial over ℚ.
pub type RationalPoly = exactpoly::Poly<scalar::Rational>;
/// Complex double-precision polynomial.
pub type ComplexPoly = numpoly::CPoly<f64>;
/// Double-precision point set for the interval statistic.
pub type PointSet = paircorr::PointSet1D<f64>;
/// Double-precision pair-correlation curve.
pub type PairCorrCurve = paircorr::PairCorrCurve<f64>;
