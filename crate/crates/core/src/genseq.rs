//! The sequence `H_m` of a standard triple.
//!
//! Multiplying `Σ H_m tᵐ = 1/(A t² + B t + 1)` through by the denominator
//! gives `H_0 = 1`, `H_1 = −B` and `H_m = −B·H_{m−1} − A·H_{m−2}`.

use crate::error::Result;
use crate::exactpoly::{GPoly, GenTriple, Poly};
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, PartialEq)]
pub struct PolySequence {
    triple: GenTriple,
    items: Vec<GPoly>,
}

impl PolySequence {
    pub fn triple(&self) -> &GenTriple {
        &self.triple
    }

    pub fn items(&self) -> &[GPoly] {
        &self.items
    }

    pub fn get(&self, m: usize) -> Option<&GPoly> {
        self.items.get(m)
    }

    pub fn m_max(&self) -> usize {
        self.items.len() - 1
    }

    /// Mutable access for fault-injection in tests of the oracle.
    #[doc(hidden)]
    pub fn items_mut(&mut self) -> &mut Vec<GPoly> {
        &mut self.items
    }

    /// Compares every item against the truncated power-series expansion of
    /// `1/(1 + B t + A t²)`.
    pub fn matches_series_oracle(&self) -> bool {
        let (a, b) = self.triple.standard_polys().expect("sequence built from standard triple");
        series_expansion(a, b, self.m_max()) == self.items
    }

    /// CSV rows `m,k,re,im` with exact rationals rendered as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,k,re,im\n");
        for (m, h) in self.items.iter().enumerate() {
            for (k, c) in h.coeffs().iter().enumerate() {
                out.push_str(&format!(
                    "{m},{k},{}/{},{}/{}\n",
                    c.re.numer(),
                    c.re.denom(),
                    c.im.numer(),
                    c.im.denom()
                ));
            }
        }
        out
    }
}

/// Exact `H_0..=H_{m_max}` for a standard triple.
pub fn generate(t: &GenTriple, m_max: usize) -> Result<PolySequence> {
    let items = Recurrence::new(t)?.take(m_max + 1).collect();
    Ok(PolySequence {
        triple: t.clone(),
        items,
    })
}

/// Runs the independent power-series check through `m_max`.
pub fn series_oracle_check(t: &GenTriple, m_max: usize) -> Result<bool> {
    Ok(generate(t, m_max)?.matches_series_oracle())
}

/// Streaming form of [`generate`]; keeps only the two previous terms.
#[derive(Clone, Debug)]
pub struct Recurrence {
    a: GPoly,
    neg_b: GPoly,
    prev: Option<GPoly>,
    cur: Option<GPoly>,
}

impl Recurrence {
    pub fn new(t: &GenTriple) -> Result<Self> {
        let (a, b) = t.standard_polys()?;
        Ok(Self {
            a: a.clone(),
            neg_b: -b,
            prev: None,
            cur: None,
        })
    }
}

impl Iterator for Recurrence {
    type Item = GPoly;

    fn next(&mut self) -> Option<GPoly> {
        let next = match (&self.prev, &self.cur) {
            (_, None) => Poly::one(),
            (None, Some(_)) => self.neg_b.clone(),
            (Some(p), Some(c)) => &(&self.neg_b * c) - &(&self.a * p),
        };
        self.prev = self.cur.take();
        self.cur = Some(next.clone());
        Some(next)
    }
}

/// Coefficients of `t⁰..t^{m_max}` in `Σ_k (−u)^k` with `u = B t + A t²`,
/// i.e. the geometric-series inverse of `1 + u`, computed by truncated
/// series products rather than the three-term recurrence.
fn series_expansion(a: &GPoly, b: &GPoly, m_max: usize) -> Vec<GPoly> {
    let n = m_max + 1;
    let mut neg_u = vec![GPoly::zero(); n];
    if n > 1 {
        neg_u[1] = -b;
    }
    if n > 2 {
        neg_u[2] = -a;
    }
    let mut total = vec![GPoly::zero(); n];
    let mut power = vec![GPoly::zero(); n];
    power[0] = Poly::one();
    for _ in 0..n {
        for (t, p) in total.iter_mut().zip(&power) {
            *t = &*t + p;
        }
        power = truncated_product(&power, &neg_u, n);
    }
    total
}

fn truncated_product(x: &[GPoly], y: &[GPoly], n: usize) -> Vec<GPoly> {
    let mut out = vec![GPoly::zero(); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate().take(n - i) {
            if !yj.is_zero() {
                out[i + j] = &out[i + j] + &(xi * yj);
            }
        }
    }
    out
}

/// `H_m(z₀)` by the recurrence, exactly.
pub fn eval_at(t: &GenTriple, m: usize, z0: &GaussianRational) -> Result<GaussianRational> {
    let (a, b) = t.standard_polys()?;
    let (av, bv) = (a.eval(z0), b.eval(z0));
    let mut prev = GaussianRational::from_integer(0);
    let mut cur = GaussianRational::from_integer(1);
    if m == 0 {
        return Ok(cur);
    }
    for k in 1..=m {
        let next = if k == 1 {
            -bv.clone()
        } else {
            -(bv.clone() * cur.clone()) - av.clone() * prev.clone()
        };
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exactpoly::parse_expression;

    fn poly(s: &str) -> GPoly {
        parse_expression(s).unwrap().as_polynomial().unwrap().clone()
    }

    #[test]
    fn low_order_terms() {
        let t = GenTriple::parse("1 ; z-2 ; 1").unwrap();
        let s = generate(&t, 3).unwrap();
        assert_eq!(s.get(0).unwrap(), &GPoly::one());
        assert_eq!(s.get(1).unwrap(), &poly("2-z"));
        assert_eq!(s.get(2).unwrap(), &poly("(z-1)*(z-3)"));
        assert_eq!(s.get(3).unwrap(), &poly("-(z-2)*(z^2-4*z+2)"));
    }

    #[test]
    fn rejects_non_standard() {
        let t = GenTriple::parse("z^2 ; z^2-2*z ; 1").unwrap();
        assert_eq!(generate(&t, 3), Err(Error::NotStandard));
    }

    #[test]
    fn oracle_agrees_and_detects_perturbation() {
        for text in ["1 ; z-2 ; 1", "z^2 ; z^2-2*z+3 ; 1"] {
            let t = GenTriple::parse(text).unwrap();
            assert!(series_oracle_check(&t, 20).unwrap());
        }
        let t = GenTriple::parse("1 ; z-2 ; 1").unwrap();
        let mut s = generate(&t, 20).unwrap();
        s.items_mut()[5] = &s.items()[5] + &GPoly::one();
        assert!(!s.matches_series_oracle());
    }

    #[test]
    fn shifted_triple_degrees() {
        let t = GenTriple::parse("z^2 ; z^2-2*z+3 ; 1").unwrap();
        let s = generate(&t, 30).unwrap();
        for (m, h) in s.items().iter().enumerate() {
            assert_eq!(h.degree(), Some(2 * m));
        }
    }

    #[test]
    fn streaming_matches_full() {
        let t = GenTriple::parse("z^2 ; z^2-2*z+5 ; 1").unwrap();
        let s = generate(&t, 12).unwrap();
        let streamed: Vec<_> = Recurrence::new(&t).unwrap().take(13).collect();
        assert_eq!(streamed, s.items());
    }

    #[test]
    fn value_at_zero_of_a() {
        // A(0) = 0 forces H_m(0) = (-B(0))^m
        let t = GenTriple::parse("z*(z-1) ; z+3 ; 1").unwrap();
        let z0 = GaussianRational::from_integer(0);
        let s = generate(&t, 10).unwrap();
        for m in 0..=10 {
            let expect = GaussianRational::from_integer((-3i64).pow(m as u32));
            assert_eq!(eval_at(&t, m, &z0).unwrap(), expect);
            assert_eq!(s.get(m).unwrap().eval(&z0), expect);
        }
    }

    #[test]
    fn csv_layout() {
        let t = GenTriple::parse("1 ; z-2 ; 1").unwrap();
        let csv = generate(&t, 1).unwrap().to_csv();
        assert_eq!(csv, "m,k,re,im\n0,0,1/1,0/1\n1,0,2/1,0/1\n1,1,-1/1,0/1\n");
    }
}
