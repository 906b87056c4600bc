//! Limiting pair-correlation formulas.
//!
//! * [`g_interval`]: `g_I(x) = 6/(π²x²) Σ_{k≤2x} σ(k) log(2x/k)`, the density for
//!   the Farey-like sets on any subinterval of (0, 1).
//! * [`g_arc`]: the density on an arc `J = f(I)`, obtained by pushing `g_I`
//!   through the parametrization with local rescaling by `|f′|`.
//! * [`example_g`]: the closed form of [`g_arc`] for the class of
//!   `(1, z−2, 1)` where `f(t) = 2 + 2cos πt`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// `σ(k)` for `1 ≤ k ≤ k_max`, built with a linear sieve.
#[derive(Clone, Debug)]
pub struct DivisorTable {
    sigma: Vec<u64>,
}

impl DivisorTable {
    pub fn new(k_max: usize) -> Self {
        let n = k_max.max(1);
        let mut sigma = vec![0u64; n + 1];
        // pw[k]: the full power of the smallest prime dividing k;
        // sp[k]: 1 + p + ... + pw[k], i.e. σ(pw[k]).
        let mut pw = vec![0u64; n + 1];
        let mut sp = vec![0u64; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        sigma[1] = 1;
        for i in 2..=n {
            if sigma[i] == 0 {
                primes.push(i);
                pw[i] = i as u64;
                sp[i] = 1 + i as u64;
                sigma[i] = 1 + i as u64;
            }
            for &p in &primes {
                let ip = i * p;
                if ip > n {
                    break;
                }
                if i % p == 0 {
                    pw[ip] = pw[i] * p as u64;
                    sp[ip] = sp[i] + pw[ip];
                    let rest = (ip as u64 / pw[ip]) as usize;
                    sigma[ip] = sigma[rest] * sp[ip];
                    break;
                }
                pw[ip] = p as u64;
                sp[ip] = 1 + p as u64;
                sigma[ip] = sigma[i] * sp[ip];
            }
        }
        Self { sigma }
    }

    pub fn k_max(&self) -> usize {
        self.sigma.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<u64> {
        (k >= 1).then(|| self.sigma.get(k).copied()).flatten()
    }

    /// σ(1..=k) as a slice (index 0 holds σ(1)).
    pub fn prefix(&self, k: usize) -> &[u64] {
        &self.sigma[1..=k]
    }
}

fn shared_table(k: usize) -> Arc<DivisorTable> {
    static TABLE: OnceLock<RwLock<Arc<DivisorTable>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(DivisorTable::new(1024))));
    {
        let t = lock.read().expect("divisor table lock");
        if t.k_max() >= k {
            return Arc::clone(&t);
        }
    }
    let mut t = lock.write().expect("divisor table lock");
    if t.k_max() < k {
        *t = Arc::new(DivisorTable::new(k.next_power_of_two().max(2 * t.k_max())));
    }
    Arc::clone(&t)
}

/// Sum of the positive divisors of `k`.
pub fn sigma(k: u64) -> Result<u64> {
    if k < 1 {
        return Err(Error::InvalidArgument("sigma requires k >= 1".into()));
    }
    let k = usize::try_from(k).map_err(|_| Error::InvalidArgument("k too large".into()))?;
    Ok(shared_table(k).get(k).expect("table covers k"))
}

/// Pair-correlation density of the Farey-like sets; zero for `x < 1/2`.
pub fn g_interval(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("g_I needs x > 0, got {x}")));
    }
    let kmax = (2.0 * x).floor() as usize;
    if kmax == 0 {
        return Ok(0.0);
    }
    let table = shared_table(kmax);
    let two_x = 2.0 * x;
    let sum: f64 = table
        .prefix(kmax)
        .iter()
        .enumerate()
        .map(|(i, &s)| s as f64 * (two_x / (i + 1) as f64).ln())
        .sum();
    Ok(6.0 / (PI * PI * x * x) * sum)
}

/// `R_I(λ) = ∫₀^λ g_I`, with panel boundaries at the kinks `k/2`.
pub fn r_interval(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("R_I needs λ > 0, got {lambda}")));
    }
    if lambda <= 0.5 {
        return Ok(0.0);
    }
    let breaks: Vec<f64> = (1..=(2.0 * lambda).floor() as usize).map(|k| k as f64 / 2.0).collect();
    let opts = QuadOptions {
        rel_tol: 1e-11,
        ..QuadOptions::default()
    };
    Ok(integrate(g_interval, 0.5, lambda, &breaks, opts)?.value)
}

/// A parametrized arc `f: I → J` as seen by [`g_arc`].
pub trait Parametrization {
    /// Parameter interval `I = [t0, t1]`.
    fn interval(&self) -> (f64, f64);
    /// `|f′(t)|`.
    fn speed(&self, t: f64) -> Result<f64>;
    /// `l(J) = ∫_I |f′|`.
    fn length(&self) -> f64;
    /// Parameters at which `speed` is sampled to bracket level crossings.
    fn sample_points(&self) -> Vec<f64> {
        let (t0, t1) = self.interval();
        (0..=1024).map(|i| t0 + (t1 - t0) * i as f64 / 1024.0).collect()
    }
}

/// `g_J(x) = l(J)/|I|² ∫_I g_I(l(J)·x / (|I|·|f′(t)|)) dt/|f′(t)|`.
///
/// The integrand has a derivative jump wherever the argument of `g_I` passes
/// a half-integer; those parameters are located by bisection on the sampled
/// speed and passed to the quadrature as breakpoints.
pub fn g_arc<P: Parametrization + ?Sized>(arc: &P, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("g_J needs x > 0, got {x}")));
    }
    let (t0, t1) = arc.interval();
    let width = t1 - t0;
    let len = arc.length();
    let scale = len * x / width;

    let samples = arc.sample_points();
    let speeds = samples
        .iter()
        .map(|&t| arc.speed(t))
        .collect::<Result<Vec<_>>>()?;
    let min_speed = speeds.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_speed > 0.0) {
        return Err(Error::Arc("vanishing |f′| on the arc".into()));
    }
    let k_top = (2.0 * scale / min_speed).floor() as usize;
    let mut breaks = Vec::new();
    for k in 1..=k_top {
        // g_I argument equals k/2 where |f′| = 2·scale/k
        let level = 2.0 * scale / k as f64;
        for i in 0..samples.len() - 1 {
            let (s0, s1) = (speeds[i] - level, speeds[i + 1] - level);
            if s0 == 0.0 {
                breaks.push(samples[i]);
            } else if s0 * s1 < 0.0 {
                breaks.push(bisect(|t| Ok(arc.speed(t)? - level), samples[i], samples[i + 1], s0)?);
            }
        }
    }

    let opts = QuadOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        ..QuadOptions::default()
    };
    let integral = integrate(
        |t| {
            let s = arc.speed(t)?;
            Ok(g_interval(scale / s)? / s)
        },
        t0,
        t1,
        &breaks,
        opts,
    )?;
    Ok(len / (width * width) * integral.value)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Which sine enters the summation bounds of the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SineBound {
    /// `sin(πa)`, matching the `sin πt` of the integrand.
    SinPiA,
    /// `sin(a)`, the literal variant; kept for comparison, it does not match the quadrature.
    SinA,
}

/// Overall constant in front of both sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefactor {
    /// `6/(π²λ² cos πa)`; includes the `1/π` from `∫ sin πt dt`.
    Derived,
    /// `6/(πλ² cos πa)`, missing that `1/π`; larger by a factor `π`.
    NoInvPi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExampleVariant {
    pub bound: SineBound,
    pub prefactor: Prefactor,
}

impl Default for ExampleVariant {
    fn default() -> Self {
        Self {
            bound: SineBound::SinPiA,
            prefactor: Prefactor::Derived,
        }
    }
}

/// Closed-form pair correlation on `J = [2 − 2cos πa, 2 + 2cos πa]` for the
/// class of `(1, z−2, 1)`, with `I = (a, 1−a)`.
///
/// With `L = 4λ cos πa / (π(1−2a))`, `s` the selected sine of `a` and
/// `X_k = L/k`:
///
/// ```text
/// g = C/λ²cos πa · [ Σ_{L<k≤L/s} σ(k)(−√(1−X_k²) + log(1+√(1−X_k²)) − log X_k)
///                  + Σ_{1≤k≤L/s} σ(k)((1 + log X_k) cos πa
///                                     − ½ log((1+cos πa)/(1−cos πa))
///                                     − cos πa · log sin πa) ]
/// ```
pub fn example_g(a: f64, lambda: f64, variant: ExampleVariant) -> Result<f64> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::InvalidArgument(format!("a must lie in (0, 1/2), got {a}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
    }
    let ca = (PI * a).cos();
    let sin_pi_a = (PI * a).sin();
    let s = match variant.bound {
        SineBound::SinPiA => sin_pi_a,
        SineBound::SinA => a.sin(),
    };
    let l = 4.0 * lambda * ca / (PI * (1.0 - 2.0 * a));
    let k_top = (l / s).floor() as usize;
    if k_top == 0 {
        return Ok(0.0);
    }
    let table = shared_table(k_top);
    let endpoint = -0.5 * ((1.0 + ca) / (1.0 - ca)).ln() - ca * sin_pi_a.ln();
    let mut total = 0.0;
    for k in 1..=k_top {
        let sk = table.get(k).expect("table covers k") as f64;
        let x = l / k as f64;
        if (k as f64) > l {
            let r = (1.0 - x * x).max(0.0).sqrt();
            total += sk * (-r + (1.0 + r).ln() - x.ln());
        }
        total += sk * ((1.0 + x.ln()) * ca + endpoint);
    }
    let c = match variant.prefactor {
        Prefactor::Derived => 6.0 / (PI * PI),
        Prefactor::NoInvPi => 6.0 / PI,
    };
    Ok(c / (lambda * lambda * ca) * total)
}

/// `Σ_{k≤K} σ(k)/k²`.
pub fn divergence_partial(k_max: u64) -> Result<f64> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("K must be >= 1".into()));
    }
    let k_max = k_max as usize;
    let table = shared_table(k_max);
    Ok(table
        .prefix(k_max)
        .iter()
        .enumerate()
        .map(|(i, &s)| s as f64 / ((i + 1) as f64).powi(2))
        .sum())
}

/// Straight segment with constant speed, handy as a reference parametrization.
#[derive(Clone, Copy, Debug)]
pub struct LinearArc {
    pub t0: f64,
    pub t1: f64,
    pub length: f64,
}

impl Parametrization for LinearArc {
    fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }
    fn speed(&self, _t: f64) -> Result<f64> {
        Ok(self.length / (self.t1 - self.t0))
    }
    fn length(&self) -> f64 {
        self.length
    }
}

/// The arc `f(t) = 2 + 2cos πt` on `(a, 1−a)`, evaluated analytically.
#[derive(Clone, Copy, Debug)]
pub struct ChebyshevArc {
    pub a: f64,
}

impl Parametrization for ChebyshevArc {
    fn interval(&self) -> (f64, f64) {
        (self.a, 1.0 - self.a)
    }
    fn speed(&self, t: f64) -> Result<f64> {
        Ok(2.0 * PI * (PI * t).sin())
    }
    fn length(&self) -> f64 {
        4.0 * (PI * self.a).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_brute(k: u64) -> u64 {
        (1..=k).filter(|d| k.is_multiple_of(*d)).sum()
    }

    #[test]
    fn sieve_matches_brute_force() {
        let t = DivisorTable::new(2000);
        for k in 1..=2000u64 {
            assert_eq!(t.get(k as usize), Some(sigma_brute(k)), "k = {k}");
        }
        assert_eq!(t.get(0), None);
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1).unwrap(), 1);
        assert_eq!(sigma(6).unwrap(), 12);
        assert_eq!(sigma(12).unwrap(), 28);
        assert_eq!(sigma(7919).unwrap(), 7920);
        assert!(sigma(0).is_err());
        // multiplicativity spot check
        assert_eq!(sigma(9 * 16).unwrap(), sigma(9).unwrap() * sigma(16).unwrap());
    }

    #[test]
    fn g_interval_values() {
        assert_eq!(g_interval(0.4).unwrap(), 0.0);
        let g1 = 6.0 / (PI * PI) * 2f64.ln();
        assert!((g_interval(1.0).unwrap() - g1).abs() < 1e-15);
        let g2 = 6.0 / (4.0 * PI * PI)
            * (4f64.ln() + 3.0 * 2f64.ln() + 4.0 * (4.0f64 / 3.0).ln() + 7.0 * 1f64.ln());
        assert!((g_interval(2.0).unwrap() - g2).abs() < 1e-15);
        assert!(g_interval(0.0).is_err());
        assert!(g_interval(-1.0).is_err());
    }

    #[test]
    fn g_interval_is_continuous_at_kinks() {
        for k in 1..=20 {
            let x = k as f64 / 2.0;
            let lo = g_interval(x - 1e-10).unwrap();
            let hi = g_interval(x + 1e-10).unwrap();
            assert!((lo - hi).abs() < 1e-8, "jump at {x}: {lo} vs {hi}");
        }
    }

    #[test]
    fn r_interval_against_antiderivative() {
        // ∫_{k/2}^{λ} log(2x/k)/x² dx = 2/k − (log(2λ/k) + 1)/λ
        let closed = |lambda: f64| {
            let mut s = 0.0;
            for k in 1..=(2.0 * lambda).floor() as u64 {
                let kf = k as f64;
                s += sigma_brute(k) as f64 * (2.0 / kf - ((2.0 * lambda / kf).ln() + 1.0) / lambda);
            }
            6.0 / (PI * PI) * s
        };
        assert_eq!(r_interval(0.5).unwrap(), 0.0);
        assert_eq!(r_interval(0.2).unwrap(), 0.0);
        let r1 = r_interval(1.0).unwrap();
        assert!((r1 - 6.0 / (PI * PI) * (1.0 - 2f64.ln())).abs() < 1e-8 * r1);
        for lambda in [0.75, 1.3, 2.0, 3.7, 10.25] {
            let q = r_interval(lambda).unwrap();
            let c = closed(lambda);
            assert!((q - c).abs() <= 1e-8 * c, "λ={lambda}: {q} vs {c}");
        }
        let mut prev = 0.0;
        for i in 1..80 {
            let r = r_interval(i as f64 * 0.05).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn constant_speed_reduces_to_g_interval() {
        let arc = LinearArc { t0: 0.2, t1: 0.7, length: 3.0 };
        for x in [0.3, 0.75, 1.0, 2.2, 4.0] {
            let a = g_arc(&arc, x).unwrap();
            let b = g_interval(x).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.max(1e-300), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn g_arc_vanishes_below_threshold() {
        let arc = ChebyshevArc { a: 0.25 };
        let (t0, t1) = arc.interval();
        let min_speed = arc.speed(t0).unwrap();
        let x = 0.99 * (t1 - t0) * min_speed / (2.0 * arc.length());
        assert_eq!(g_arc(&arc, x).unwrap(), 0.0);
    }

    #[test]
    fn example_matches_quadrature() {
        for a in [0.1, 0.25, 0.4] {
            for lambda in [0.75, 1.0, 2.0, 4.0] {
                let q = g_arc(&ChebyshevArc { a }, lambda).unwrap();
                let e = example_g(a, lambda, ExampleVariant::default()).unwrap();
                assert!((e - q).abs() <= 1e-6 * q, "a={a} λ={lambda}: {e} vs {q}");
            }
        }
    }

    #[test]
    fn example_empty_sums() {
        let a: f64 = 0.25;
        let ca = (PI * a).cos();
        let lambda = 0.9 * PI * (1.0 - 2.0 * a) * (PI * a).sin() / (4.0 * ca);
        assert_eq!(example_g(a, lambda, ExampleVariant::default()).unwrap(), 0.0);
        assert!(example_g(0.5, 1.0, ExampleVariant::default()).is_err());
        assert!(example_g(0.0, 1.0, ExampleVariant::default()).is_err());
    }

    #[test]
    fn divergence_partials() {
        assert_eq!(divergence_partial(1).unwrap(), 1.0);
        assert_eq!(divergence_partial(2).unwrap(), 1.75);
        let small = divergence_partial(1000).unwrap();
        let large = divergence_partial(1_000_000).unwrap();
        assert!(large - small > 1.0);
    }
}
