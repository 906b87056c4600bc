//! Floating-point complex polynomials and the Aberth–Ehrlich solver.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::GPoly;
use crate::scalar::{Field, Real};

/// Dense polynomial with `Complex<T>` coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> CPoly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Rounds an exact polynomial; fails if any coefficient overflows.
    pub fn from_exact(p: &GPoly) -> Result<Self> {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| {
                let z = c.to_complex();
                match (T::from_f64(z.re), T::from_f64(z.im)) {
                    (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok(Complex::new(re, im)),
                    _ => Err(Error::Numeric(format!("coefficient {c} overflows"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// `(p(z), p′(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = Complex::zero();
        let mut d = Complex::zero();
        for &c in self.coeffs.iter().rev() {
            d = d * z + p;
            p = p * z + c;
        }
        (p, d)
    }

    /// `Σ |c_k| |z|^k`, the scale against which `|p(z)|` is judged.
    pub fn abs_scale(&self, z: Complex<T>) -> T {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    /// `self − c·other`.
    pub fn sub_scaled(&self, c: Complex<T>, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                let b = other.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                a - c * b
            })
            .collect();
        Self::new(coeffs)
    }

    /// Cauchy upper bound on the modulus of every root.
    pub fn root_bound(&self) -> T {
        let lead = self.coeffs.last().expect("nonzero polynomial").norm();
        let n = self.coeffs.len() - 1;
        self.coeffs[..n]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(T::zero(), T::max)
            + T::one()
    }
}

/// Exact Newton corrections `p(z)/p′(z)` of an exact polynomial at `f64` points.
///
/// Coefficients are cleared to Gaussian integers; a point is taken exactly as
/// the dyadic `w/2^e`, so the Horner pass runs in integers with shifts. The only
/// rounding is the final conversion of the ratio, which keeps roots of
/// ill-conditioned polynomials accurate to `f64` resolution.
#[derive(Clone, Debug)]
pub struct ExactNewton {
    coeffs: Vec<Complex<BigInt>>,
}

impl ExactNewton {
    pub fn new(p: &GPoly) -> Self {
        let den = p
            .coeffs()
            .iter()
            .flat_map(|c| [c.re.denom(), c.im.denom()])
            .fold(BigInt::one(), |acc, d| acc.lcm(d));
        let scaled = |r: &BigRational| r.numer() * (&den / r.denom());
        let coeffs = p.coeffs().iter().map(|c| Complex::new(scaled(&c.re), scaled(&c.im))).collect();
        Self { coeffs }
    }

    /// `p(z)/p′(z)` rounded once, or `None` when `p′(z) = 0` exactly.
    pub fn ratio(&self, z: Complex<f64>) -> Option<Complex<f64>> {
        let d = self.coeffs.len().checked_sub(1)?;
        let (w, e) = dyadic(z)?;
        let shift = |x: &Complex<BigInt>, k: usize| Complex::new(&x.re << k, &x.im << k);
        // P̃_k = P̃_{k+1}·w + c_k·2^{e(d−k)},  Q̃_k = Q̃_{k+1}·w + P̃_{k+1}·2^e
        let mut pk = self.coeffs[d].clone();
        let mut qk: Complex<BigInt> = Complex::zero();
        for k in (0..d).rev() {
            qk = &qk * &w + shift(&pk, e);
            pk = &pk * &w + shift(&self.coeffs[k], e * (d - k));
        }
        if qk.is_zero() {
            return None;
        }
        let num = &pk * qk.conj();
        let norm = &qk.re * &qk.re + &qk.im * &qk.im;
        let part = |x: &BigInt| BigRational::new(x.clone(), norm.clone()).to_f64().unwrap_or(f64::NAN);
        Some(Complex::new(part(&num.re), part(&num.im)))
    }
}

/// `z = w / 2^e` exactly, with a shared exponent for both parts.
fn dyadic(z: Complex<f64>) -> Option<(Complex<BigInt>, usize)> {
    let re = BigRational::from_float(z.re)?;
    let im = BigRational::from_float(z.im)?;
    let den = re.denom().max(im.denom()).clone();
    let e = (den.bits() - 1) as usize;
    let lift = |r: &BigRational| r.numer() * (&den / r.denom());
    Some((Complex::new(lift(&re), lift(&im)), e))
}

/// Settings for [`aberth`].
#[derive(Clone, Copy, Debug)]
pub struct AberthOptions {
    pub max_iter: usize,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self { max_iter: 800 }
    }
}

/// Simultaneous Aberth–Ehrlich iteration for all `init.len()` roots of the
/// polynomial behind `eval`, which returns `(p(z), p′(z))`.
///
/// Roots stop when their correction reaches rounding level or stops
/// contracting near it. `small(z, p)` may also declare a residual to be at
/// rounding level; past that
/// point a root gets up to three short Newton steps, which recovers forward
/// accuracy when the rounding scale is pessimistic, and is then frozen. Returns the approximations and whether
/// every root converged.
pub fn aberth<T, E, S>(eval: E, small: S, mut z: Vec<Complex<T>>, opts: AberthOptions) -> (Vec<Complex<T>>, bool)
where
    T: Real,
    E: Fn(Complex<T>) -> (Complex<T>, Complex<T>),
    S: Fn(Complex<T>, Complex<T>) -> bool,
{
    let n = z.len();
    let mut done = vec![false; n];
    let mut settled = vec![0u8; n];
    let mut last = vec![T::infinity(); n];
    let eps = T::epsilon();
    for _ in 0..opts.max_iter {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval(z[k]);
            if small(z[k], p) {
                // Plain Newton polish; a large step means rounding noise, not progress.
                settled[k] += 1;
                let step = if dp.is_zero() { None } else { Some(p / dp) };
                match step {
                    Some(w) if settled[k] <= 3 && w.norm() <= T::lit(1e-6) * (T::one() + z[k].norm()) => {
                        z[k] = z[k] - w;
                    }
                    _ => done[k] = true,
                }
                continue;
            }
            all = false;
            let newton = if dp.is_zero() { Complex::new(eps, eps) } else { p / dp };
            let mut repulse = Complex::zero();
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let d = z[k] - zj;
                    if !d.is_zero() {
                        repulse = repulse + d.inv();
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - newton * repulse;
            let w = if denom.is_zero() { newton } else { newton / denom };
            if !(w.re.is_finite() && w.im.is_finite()) {
                return (z, false);
            }
            z[k] = z[k] - w;
            let size = w.norm();
            let unit = T::one() + z[k].norm();
            // Stop at rounding level, or once steps stop contracting near it.
            if size <= T::lit(4.0) * eps * unit || (size <= T::lit(1e-9) * unit && size >= T::lit(0.5) * last[k]) {
                done[k] = true;
            }
            last[k] = size;
        }
        if all {
            return (z, true);
        }
    }
    let ok = done.iter().all(|&d| d);
    (z, ok)
}

/// Starting points on a circle, rotated off the axes to avoid symmetric stalls.
pub fn initial_circle<T: Real>(n: usize, radius: T) -> Vec<Complex<T>> {
    let tau = T::TAU();
    let offset = T::lit(0.4);
    (0..n)
        .map(|k| {
            let theta = tau * T::from_usize(k).expect("index fits") / T::from_usize(n).expect("count fits") + offset;
            Complex::from_polar(radius, theta)
        })
        .collect()
}

/// Roots of `p` with multiplicity by Aberth iteration on Horner evaluation.
///
/// Residuals are accepted when `|p(z)| ≤ tol·Σ|c_k||z|^k`; fails otherwise.
pub fn roots_horner<T: Real>(p: &CPoly<T>, tol: T) -> Result<Vec<Complex<T>>> {
    let n = match p.degree() {
        None | Some(0) => return Err(Error::InvalidArgument("root finding needs degree >= 1".into())),
        Some(n) => n,
    };
    // Exact zeros at the origin are split off so clustered roots there do not slow the iteration.
    let zeros = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let q = CPoly::new(p.coeffs[zeros..].to_vec());
    let mut out = vec![Complex::zero(); zeros];
    if n > zeros {
        let eps = T::epsilon();
        let small = |z: Complex<T>, v: Complex<T>| v.norm() <= T::lit(8.0) * eps * q.abs_scale(z);
        // geometric mean of the root moduli; the Cauchy bound overshoots by
        // orders of magnitude when the leading coefficient is relatively small
        let k = T::from_usize(n - zeros).expect("degree fits");
        let mean = (q.coeffs[0].norm() / q.coeffs[n - zeros].norm()).powf(T::one() / k);
        let init = initial_circle(n - zeros, mean.min(q.root_bound()));
        let (z, _) = aberth(|z| q.eval_with_derivative(z), small, init, AberthOptions::default());
        out.extend(z);
    }
    for &z in &out {
        let r = p.eval(z).norm();
        let scale = p.abs_scale(z);
        if !(r <= tol * scale) {
            return Err(Error::Numeric(format!(
                "root {z} fails backward-error check: |p(z)| = {r}, scale {scale}"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::parse_expression;

    fn exact(s: &str) -> GPoly {
        parse_expression(s).unwrap().as_polynomial().unwrap().clone()
    }

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn horner_and_derivative() {
        let p: CPoly<f64> = CPoly::from_exact(&exact("z^3 - 2*z + i")).unwrap();
        let z = Complex::new(0.5, -1.25);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - (z * z * z - 2.0 * z + Complex::i())).norm() < 1e-14);
        assert!((d - (3.0 * z * z - 2.0)).norm() < 1e-14);
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn simple_roots() {
        let p = CPoly::from_exact(&exact("(z-1)*(z-3)")).unwrap();
        let r = sorted(roots_horner(&p, 1e-10).unwrap());
        assert!((r[0] - 1.0).norm() < 1e-12 && (r[1] - 3.0).norm() < 1e-12);
    }

    #[test]
    fn double_root_at_origin_and_elsewhere() {
        let p = CPoly::<f64>::from_exact(&exact("z^2")).unwrap();
        assert_eq!(roots_horner(&p, 1e-10).unwrap(), vec![Complex::zero(); 2]);
        let p = CPoly::from_exact(&exact("(z-2)^2*(z+i)")).unwrap();
        let r = roots_horner(&p, 1e-10).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|z| (**z - 2.0).norm() < 1e-6).count(), 2);
    }

    #[test]
    fn unit_roots_of_high_degree() {
        let p = CPoly::from_exact(&exact("z^40 - 1")).unwrap();
        let r = roots_horner(&p, 1e-10).unwrap();
        for z in &r {
            assert!((z.norm() - 1.0f64).abs() < 1e-12);
        }
        let mut angles: Vec<f64> = r.iter().map(|z| z.arg()).collect();
        angles.sort_by(f64::total_cmp);
        for w in angles.windows(2) {
            assert!(w[1] - w[0] > 0.1);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let p = CPoly::<f32>::from_exact(&exact("(z-1)*(z+2)*(z-i)")).unwrap();
        let r = roots_horner(&p, 1e-4).unwrap();
        for target in [Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0), Complex::new(0.0, 1.0)] {
            assert!(r.iter().any(|z| (z - target).norm() < 1e-4));
        }
    }

    #[test]
    fn rejects_constants() {
        let p = CPoly::<f64>::from_exact(&exact("5")).unwrap();
        assert!(roots_horner(&p, 1e-10).is_err());
    }
}
