use std::fmt;

use super::{parse_expression, GPoly, GRatFunc, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Generating triple `(A, B, C)` for `Σ H_m(z) tᵐ = 1/(A t² + B t + C)`.
///
/// `A` and `C` are never identically zero. `standard` is set only by
/// [`GenTriple::new`] after checking the standard-form conditions, so it is
/// always accurate.
#[derive(Clone, PartialEq, Debug)]
pub struct GenTriple {
    a: GRatFunc,
    b: GRatFunc,
    c: GRatFunc,
    standard: bool,
}

impl GenTriple {
    pub fn new(a: GRatFunc, b: GRatFunc, c: GRatFunc) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidTriple("A is identically zero".into()));
        }
        if c.is_zero() {
            return Err(Error::InvalidTriple("C is identically zero".into()));
        }
        let standard = is_standard(&a, &b, &c)?;
        Ok(Self { a, b, c, standard })
    }

    pub fn from_polys(a: GPoly, b: GPoly, c: GPoly) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    /// Parses `"A ; B ; C"`; each component uses the expression grammar.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                pos: text.len(),
                message: format!("expected 'A ; B ; C', found {} component(s)", parts.len()),
            });
        }
        let mut offset = 0;
        let mut comps = Vec::with_capacity(3);
        for part in parts {
            let r = parse_expression(part).map_err(|e| match e {
                Error::Parse { pos, message } => Error::Parse {
                    pos: pos + offset,
                    message,
                },
                other => other,
            })?;
            comps.push(r);
            offset += part.len() + 1;
        }
        let c = comps.pop().expect("three components");
        let b = comps.pop().expect("three components");
        let a = comps.pop().expect("three components");
        Self::new(a, b, c)
    }

    pub fn a(&self) -> &GRatFunc {
        &self.a
    }

    pub fn b(&self) -> &GRatFunc {
        &self.b
    }

    pub fn c(&self) -> &GRatFunc {
        &self.c
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `(A, B)` as polynomials when `C = 1` and both are polynomial.
    pub fn polys(&self) -> Option<(&GPoly, &GPoly)> {
        if self.c != RatFunc::one() {
            return None;
        }
        Some((self.a.as_polynomial()?, self.b.as_polynomial()?))
    }

    /// `(A, B)` of a standard triple, or [`Error::NotStandard`].
    pub fn standard_polys(&self) -> Result<(&GPoly, &GPoly)> {
        if !self.standard {
            return Err(Error::NotStandard);
        }
        Ok(self.polys().expect("standard triples are polynomial with C = 1"))
    }
}

fn is_standard(a: &GRatFunc, b: &GRatFunc, c: &GRatFunc) -> Result<bool> {
    if *c != RatFunc::one() {
        return Ok(false);
    }
    let (Some(a), Some(b)) = (a.as_polynomial(), b.as_polynomial()) else {
        return Ok(false);
    };
    Poly::gcd(&b.pow(2), a)?.is_square_free()
}

impl fmt::Display for GenTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {} ; {}", self.a, self.b, self.c)
    }
}

/// `B² / (A·C)`, the quantity shared by every triple in an equivalence class.
pub fn class_invariant(t: &GenTriple) -> GRatFunc {
    (&t.b * &t.b)
        .checked_div(&(&t.a * &t.c))
        .expect("A and C are nonzero")
}

/// Reduces a triple to the standard representative of its class.
///
/// Returns the standard triple and the multiplier `E` with
/// `(E²A/C, E·B/C, 1)` equal to the output. Starting from a polynomial `E`
/// that clears all denominators, the loop removes every common root of the
/// current `B` and multiple root of the current `A` in one exact division per
/// round: `S` is the square-free part of `gcd(B, gcd(A, A′))`, and
/// `(A, B, E) ← (A/S², B/S, E/S)`. When `B ≠ 0` the constant left free by the
/// class is fixed by making `B` monic.
///
/// For `B ≡ 0` every triple with `B = 0` shares the invariant `0`; the
/// output is then only the stripped `A` and is not unique within the class.
pub fn to_standard_form(t: &GenTriple) -> Result<(GenTriple, GRatFunc)> {
    let a1 = t.a.checked_div(&t.c)?;
    let b1 = t.b.checked_div(&t.c)?;
    let e0: GPoly = a1.den() * b1.den();
    let mut a = polynomial_part(&(&a1 * &RatFunc::from_poly(e0.pow(2))))?;
    let mut b = polynomial_part(&(&b1 * &RatFunc::from_poly(e0.clone())))?;
    let mut e = RatFunc::from_poly(e0);

    loop {
        let multiple = Poly::gcd(&a, &a.derivative())?;
        let d = Poly::gcd(&b, &multiple)?;
        if d.is_constant() {
            break;
        }
        let s = d.square_free_part()?;
        a = a.exact_div(&s.pow(2))?;
        b = b.exact_div(&s)?;
        e = e.checked_div(&RatFunc::from_poly(s))?;
    }

    if let Some(lc) = b.leading().cloned() {
        let u = lc.inv().expect("nonzero leading coefficient");
        b = b.scale(&u);
        a = a.scale(&(u.clone() * u.clone()));
        e = e.scale(&u);
    }

    let out = GenTriple::new(a.into(), b.into(), RatFunc::one())?;
    debug_assert!(out.standard);
    Ok((out, e))
}

fn polynomial_part(r: &GRatFunc) -> Result<GPoly> {
    r.as_polynomial()
        .cloned()
        .ok_or_else(|| Error::Numeric("denominator clearing left a pole".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::parse_expression as px;

    #[test]
    fn unreduced_triple_reduces_to_chebyshev_class() {
        let t = GenTriple::parse("z^2 ; z^2-2*z ; 1").unwrap();
        assert!(!t.is_standard());
        let (s, e) = to_standard_form(&t).unwrap();
        assert_eq!(s, GenTriple::parse("1 ; z-2 ; 1").unwrap());
        assert!(s.is_standard());
        assert_eq!(e, px("1/z").unwrap());
        assert_eq!(class_invariant(&s), class_invariant(&t));
        assert_eq!(class_invariant(&t), px("(z-2)^2").unwrap());
    }

    #[test]
    fn shifted_triple_is_already_standard() {
        let t = GenTriple::parse("z^2 ; z^2-2*z+3 ; 1").unwrap();
        assert!(t.is_standard());
        let (s, e) = to_standard_form(&t).unwrap();
        assert_eq!(s, t);
        assert_eq!(e, RatFunc::one());
    }

    #[test]
    fn output_has_unit_c_and_matches_multiplier() {
        let t = GenTriple::parse("z^3/(z+1) ; (2*z^2+2*z)/(z-1) ; 3*z/(z-1)").unwrap();
        let (s, e) = to_standard_form(&t).unwrap();
        assert_eq!(s.c(), &RatFunc::one());
        let ea = (&(&e * &e) * t.a()).checked_div(t.c()).unwrap();
        let eb = (&e * t.b()).checked_div(t.c()).unwrap();
        assert_eq!(s.a(), &ea);
        assert_eq!(s.b(), &eb);
        assert_eq!(class_invariant(&s), class_invariant(&t));
    }

    #[test]
    fn rejects_zero_a_or_c() {
        assert!(matches!(GenTriple::parse("0 ; z ; 1"), Err(Error::InvalidTriple(_))));
        assert!(matches!(GenTriple::parse("1 ; z ; 0"), Err(Error::InvalidTriple(_))));
        assert!(matches!(GenTriple::parse("1 ; z"), Err(Error::Parse { .. })));
    }

    #[test]
    fn invariant_under_division_by_c() {
        let t = GenTriple::parse("z^2+1 ; z-3 ; z+2").unwrap();
        let u = GenTriple::new(
            t.a().checked_div(t.c()).unwrap(),
            t.b().checked_div(t.c()).unwrap(),
            RatFunc::one(),
        )
        .unwrap();
        assert_eq!(class_invariant(&t), class_invariant(&u));
    }

    #[test]
    fn zero_b_strips_multiple_roots_of_a() {
        let t = GenTriple::parse("z^3*(z-1) ; 0 ; 1").unwrap();
        let (s, e) = to_standard_form(&t).unwrap();
        assert!(s.is_standard());
        assert_eq!(s.a(), &px("z*(z-1)").unwrap());
        assert_eq!(e, px("1/z").unwrap());
    }
}
