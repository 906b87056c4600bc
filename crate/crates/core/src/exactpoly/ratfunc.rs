use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use super::Poly;
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Reduced rational function `num/den`: `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc<K> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: Field> RatFunc<K> {
    pub fn new(num: Poly<K>, den: Poly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = Poly::gcd(&num, &den)?;
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let lc = den.leading().and_then(Field::inv).expect("nonzero denominator");
        Ok(Self {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The numerator when the denominator is 1.
    pub fn as_polynomial(&self) -> Option<&Poly<K>> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: u32) -> Self {
        // Powers of coprime polynomials stay coprime.
        Self {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

impl<K: Field> Add<&RatFunc<K>> for &RatFunc<K> {
    type Output = RatFunc<K>;
    fn add(self, rhs: &RatFunc<K>) -> RatFunc<K> {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("product of nonzero denominators")
    }
}

impl<K: Field> Sub<&RatFunc<K>> for &RatFunc<K> {
    type Output = RatFunc<K>;
    fn sub(self, rhs: &RatFunc<K>) -> RatFunc<K> {
        self + &(-rhs)
    }
}

impl<K: Field> Mul<&RatFunc<K>> for &RatFunc<K> {
    type Output = RatFunc<K>;
    fn mul(self, rhs: &RatFunc<K>) -> RatFunc<K> {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators")
    }
}

impl<K: Field> Neg for &RatFunc<K> {
    type Output = RatFunc<K>;
    fn neg(self) -> RatFunc<K> {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<K: Field> From<Poly<K>> for RatFunc<K> {
    fn from(p: Poly<K>) -> Self {
        Self::from_poly(p)
    }
}

/// `num` alone for polynomials, otherwise `num/den` with each side
/// parenthesized unless it is a single term. The denominator is monic, so a
/// single-term denominator prints as a bare `z^k`.
impl<K: Field + fmt::Display> fmt::Display for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        write!(f, "{}/{}", as_factor(&self.num), as_factor(&self.den))
    }
}

fn as_factor<K: Field + fmt::Display>(p: &Poly<K>) -> String {
    let terms = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    if terms == 1 {
        p.to_string()
    } else {
        format!("({p})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn p(c: &[i64]) -> Poly<G> {
        Poly::from_coeffs(c.iter().map(|&x| G::from_integer(x)).collect())
    }

    #[test]
    fn reduces_and_normalizes() {
        // (2z^2 - 4z) / (2z) = z - 2
        let r = RatFunc::new(p(&[0, -4, 2]), p(&[0, 2])).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.num(), &p(&[-2, 1]));
        // 1 / (3z) -> (1/3) / z
        let r = RatFunc::new(p(&[1]), p(&[0, 3])).unwrap();
        assert!(r.den().is_monic());
        assert_eq!(r.to_string(), "(1/3)/z");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RatFunc::new(p(&[1]), Poly::zero()), Err(Error::DivisionByZero));
        let one = RatFunc::<G>::one();
        assert_eq!(one.checked_div(&RatFunc::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_ops() {
        let a = RatFunc::new(p(&[1]), p(&[0, 1])).unwrap();
        let b = RatFunc::new(p(&[1]), p(&[-1, 1])).unwrap();
        let s = &a + &b;
        // 1/z + 1/(z-1) = (2z-1)/(z^2-z)
        assert_eq!(s, RatFunc::new(p(&[-1, 2]), p(&[0, -1, 1])).unwrap());
        assert_eq!(&(&s - &b), &a);
        assert_eq!((&a * &a), a.pow(2));
        assert_eq!(a.checked_div(&a).unwrap(), RatFunc::one());
        assert_eq!(a.to_string(), "1/z");
    }
}
