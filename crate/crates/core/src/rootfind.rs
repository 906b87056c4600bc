//! Roots of `H_m` and of `∏ H_k`, by direct solution and through the curve.
//!
//! The curve method uses the factorization
//!
//! ```text
//! H_m = const · ∏_{j=1}^{⌊m/2⌋} (B² − c_j A) · B^{[m odd]},   c_j = 2 + 2cos(2πj/(m+1)),
//! ```
//!
//! so every root of `H_m` solves `B² = cA` for a `c` in `[0, 4]`. Common roots
//! of `A` and `B` divide every `H_m` with `m ≥ 1`; they are returned apart
//! from the curve roots as degenerate records.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arcmap::ArcSpec;
use crate::error::{Error, Result};
use crate::exactpoly::{GPoly, GenTriple, Poly};
use crate::genseq;
use crate::numpoly::{aberth, initial_circle, roots_horner, AberthOptions, CPoly, ExactNewton};

type C64 = Complex<f64>;

/// Backward-error tolerance for accepted roots.
pub const TAU_ROOT: f64 = 1e-10;
/// Largest degree handed to the companion-matrix fallback.
pub const COMPANION_MAX_DEGREE: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct RootRecord {
    pub z: C64,
    /// Index of the sequence member this is a root of.
    pub m: usize,
    /// `(p, q)` with `q = m + 1`, when the root has been placed on an arc.
    pub label: Option<(usize, usize)>,
    pub mult: usize,
}

impl RootRecord {
    fn unlabeled(z: C64, m: usize) -> Self {
        Self { z, m, label: None, mult: 1 }
    }
}

/// Curve roots together with the common zeros of `A` and `B`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<RootRecord>,
    pub degenerate: Vec<RootRecord>,
}

/// Orders records by `(m, p, re, im)`; unlabeled records sort as `p = 0`.
pub fn canonical_sort(records: &mut [RootRecord]) {
    records.sort_by(|a, b| {
        a.m.cmp(&b.m)
            .then(a.label.map_or(0, |l| l.0).cmp(&b.label.map_or(0, |l| l.0)))
            .then(a.z.re.total_cmp(&b.z.re))
            .then(a.z.im.total_cmp(&b.z.im))
    });
}

/// All roots of `p` with multiplicity, backward-error certified against
/// `TAU_ROOT`.
///
/// Float Aberth iteration (or companion-matrix eigenvalues for small degree,
/// or a circle when both fail) only supplies starting points: the roots are
/// then refined by Aberth steps whose Newton corrections are evaluated exactly
/// from the rational coefficients. Float evaluation alone loses all forward
/// accuracy on the sequence members beyond m ≈ 15.
pub fn roots_direct(p: &GPoly) -> Result<Vec<C64>> {
    let cp = CPoly::<f64>::from_exact(p)?;
    let n = match cp.degree() {
        None | Some(0) => return Err(Error::InvalidArgument("root finding needs degree >= 1".into())),
        Some(n) => n,
    };
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let reduced = Poly::from_coeffs(p.coeffs()[zeros..].to_vec());
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    if n > zeros {
        let rc = CPoly::<f64>::from_exact(&reduced)?;
        let init = match roots_horner(&rc, TAU_ROOT) {
            Ok(r) => r,
            Err(_) if n - zeros <= COMPANION_MAX_DEGREE => companion_roots(&rc).unwrap_or_else(|_| fallback_circle(&rc)),
            Err(_) => fallback_circle(&rc),
        };
        let exact = ExactNewton::new(&reduced);
        let eval = |z: C64| match exact.ratio(z) {
            Some(r) => (r, C64::new(1.0, 0.0)),
            None => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        };
        let (z, _) = aberth(eval, |_, _| false, init, AberthOptions::default());
        out.extend(z);
    }
    for &z in &out {
        let r = cp.eval(z).norm();
        if !(r <= TAU_ROOT * cp.abs_scale(z)) {
            return Err(Error::Numeric(format!("root {z} fails backward-error check")));
        }
    }
    Ok(out)
}

fn fallback_circle(p: &CPoly<f64>) -> Vec<C64> {
    let n = p.degree().expect("nonzero");
    let c = p.coeffs();
    let mean = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64);
    initial_circle(n, mean.min(p.root_bound()))
}

fn companion_roots(p: &CPoly<f64>) -> Result<Vec<C64>> {
    let n = p.degree().expect("nonzero");
    let c = p.coeffs();
    let lead = c[n];
    let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Numeric("companion eigenvalues did not converge".into()))?;
    let mut out = Vec::with_capacity(n);
    for &z0 in eig.iter() {
        let mut z = z0;
        for _ in 0..5 {
            let (v, d) = p.eval_with_derivative(z);
            if d.norm() == 0.0 {
                break;
            }
            z -= v / d;
        }
        let r = p.eval(z).norm();
        if !(r <= TAU_ROOT * p.abs_scale(z)) {
            return Err(Error::Numeric(format!("companion root {z} fails backward-error check")));
        }
        out.push(z);
    }
    Ok(out)
}

/// Float copies of the pieces the sequence factorization is built from.
struct Factors {
    a: CPoly<f64>,
    b: CPoly<f64>,
    /// `A/G` and `B/G` with `G = gcd(A, B)`.
    a_red: CPoly<f64>,
    b_red: CPoly<f64>,
    g: GPoly,
}

impl Factors {
    fn new(t: &GenTriple) -> Result<Self> {
        let (a, b) = t.standard_polys()?;
        let g = if b.is_zero() { a.monic() } else { Poly::gcd(a, b)? };
        Ok(Self {
            a: CPoly::from_exact(a)?,
            b: CPoly::from_exact(b)?,
            a_red: CPoly::from_exact(&a.exact_div(&g)?)?,
            b_red: CPoly::from_exact(&b.exact_div(&g)?)?,
            g,
        })
    }

    /// `(B² − cA)/G = B·(B/G) − c·(A/G)`.
    fn level(&self, c: f64) -> CPoly<f64> {
        let prod = mul(&self.b, &self.b_red);
        prod.sub_scaled(C64::new(c, 0.0), &self.a_red)
    }
}

fn mul(p: &CPoly<f64>, q: &CPoly<f64>) -> CPoly<f64> {
    let (x, y) = (p.coeffs(), q.coeffs());
    if x.is_empty() || y.is_empty() {
        return CPoly::new(Vec::new());
    }
    let mut out = vec![C64::new(0.0, 0.0); x.len() + y.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            out[i + j] += xi * yj;
        }
    }
    CPoly::new(out)
}

/// `c_j = 2 + 2cos(2πj/(m+1))`.
pub fn level_value(j: usize, m: usize) -> f64 {
    2.0 + 2.0 * (2.0 * PI * j as f64 / (m + 1) as f64).cos()
}

fn solve_level(f: &Factors, c: f64) -> Result<Vec<C64>> {
    let p = f.level(c);
    match p.degree() {
        None => Err(Error::Numeric(format!("B² − cA vanishes identically at c = {c}"))),
        Some(0) => Ok(Vec::new()),
        Some(_) => roots_horner(&p, TAU_ROOT),
    }
}

fn roots_of_exact(p: &GPoly) -> Result<Vec<C64>> {
    if p.degree().unwrap_or(0) == 0 {
        Ok(Vec::new())
    } else {
        roots_direct(p)
    }
}

/// Roots of `H_m` through the curve: one solve of `B² = c_j A` per `j`,
/// plus the roots of `B` (with multiplicity) when `m + 1` is even.
///
/// With `spec`, roots equal to `f(p/(m+1))` for `p/(m+1)` in the arc's
/// parameter interval receive the label `(p, m+1)`.
pub fn roots_curve(t: &GenTriple, m: usize, spec: Option<&ArcSpec>) -> Result<RootSet> {
    let f = Factors::new(t)?;
    if m == 0 {
        return Ok(RootSet::default());
    }
    let mut roots: Vec<RootRecord> = (1..=m / 2)
        .into_par_iter()
        .map(|j| solve_level(&f, level_value(j, m)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(|z| RootRecord::unlabeled(z, m))
        .collect();
    if (m + 1).is_multiple_of(2) && f.b_red.degree().is_some_and(|d| d > 0) {
        roots.extend(roots_horner(&f.b_red, TAU_ROOT)?.into_iter().map(|z| RootRecord::unlabeled(z, m)));
    }
    let degenerate = roots_of_exact(&f.g)?
        .into_iter()
        .map(|z| RootRecord { z, m, label: None, mult: m.div_ceil(2) })
        .collect();
    if let Some(spec) = spec {
        label_by_arc(&mut roots, m, spec)?;
    }
    canonical_sort(&mut roots);
    Ok(RootSet { roots, degenerate })
}

/// Assigns `(p, m+1)` to the root nearest `f(p/(m+1))` for each fraction in
/// the arc's interval; a match must lie within `1e-7·(1 + |z|)`.
fn label_by_arc(records: &mut [RootRecord], m: usize, spec: &ArcSpec) -> Result<()> {
    let (t0, t1) = spec.interval();
    let q = m + 1;
    for p in 1..q {
        let tp = p as f64 / q as f64;
        if tp < t0 || tp > t1 {
            continue;
        }
        let target = spec.point(tp)?;
        let best = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label.is_none())
            .min_by(|(_, a), (_, b)| (a.z - target).norm().total_cmp(&(b.z - target).norm()));
        if let Some((k, r)) = best {
            if (r.z - target).norm() <= 1e-7 * (1.0 + target.norm()) {
                records[k].label = Some((p, q));
            }
        }
    }
    Ok(())
}

/// Labels records by pulling each root back to the arc's parameter and
/// rounding `t·(m+1)` to an integer; roots off the arc stay unlabeled.
pub fn label_records(records: &mut [RootRecord], spec: &ArcSpec) {
    let scale = spec.arc_length().max(1.0);
    for r in records.iter_mut() {
        let Ok(t) = spec.pullback(r.z, 1e-8 * scale) else {
            continue;
        };
        let q = r.m + 1;
        let x = t * q as f64;
        let p = x.round();
        if (x - p).abs() <= 1e-6 && p >= 1.0 && (p as usize) < q {
            r.label = Some((p as usize, q));
        }
    }
}

/// Roots of `H_m` found directly: Aberth iteration on the float three-term
/// recurrence, which is far better conditioned than the monomial expansion.
///
/// Common zeros of `A` and `B` are divided out exactly beforehand and
/// returned as the degenerate part.
pub fn roots_direct_member(t: &GenTriple, m: usize) -> Result<RootSet> {
    let f = Factors::new(t)?;
    if m == 0 {
        return Ok(RootSet::default());
    }
    let h = genseq::generate(t, m)?.items()[m].clone();
    if h.is_zero() {
        return Err(Error::Numeric(format!("H_{m} vanishes identically")));
    }
    let mut reduced = h;
    let mut k = 0;
    while !f.g.is_constant() && f.g.divides(&reduced) {
        reduced = reduced.exact_div(&f.g)?;
        k += 1;
    }
    let n = reduced.degree().unwrap_or(0);
    let degenerate: Vec<RootRecord> = roots_of_exact(&f.g)?
        .into_iter()
        .map(|z| RootRecord { z, m, label: None, mult: k })
        .collect();
    if n == 0 {
        return Ok(RootSet { roots: Vec::new(), degenerate });
    }

    let g = CPoly::<f64>::from_exact(&f.g)?;
    let eval = |z: C64| -> (C64, C64, f64) {
        let (v, dv, scale) = recurrence_eval(&f.a, &f.b, m, z);
        if k == 0 {
            return (v, dv, scale);
        }
        let (gz, dg) = g.eval_with_derivative(z);
        let gk = gz.powu(k as u32);
        let q = v / gk;
        let dq = (dv - v * (k as f64) * dg / gz) / gk;
        (q, dq, scale / gk.norm())
    };
    // The absolute-value scale grows exponentially off the curve and is far too
    // pessimistic as a stopping rule; convergence is judged by step size alone.
    let small = |_: C64, v: C64| v.norm() == 0.0;
    // All roots lie on the curve, so its extent bounds them; the Cauchy bound
    // of the monomial form is far too large and starts the iteration where
    // the recurrence overflows.
    let radius = curve_radius(&f)?;
    let (z, _) = aberth(
        |z| {
            let (v, d, _) = eval(z);
            (v, d)
        },
        small,
        initial_circle(n, radius),
        AberthOptions::default(),
    );
    for &zi in &z {
        let (v, _, scale) = eval(zi);
        if !(v.norm() <= TAU_ROOT * scale) {
            return Err(Error::Numeric(format!(
                "root {zi} of H_{m} fails backward-error check ({:e} vs scale {scale:e})",
                v.norm()
            )));
        }
    }
    let mut roots: Vec<RootRecord> = z.into_iter().map(|z| RootRecord::unlabeled(z, m)).collect();
    canonical_sort(&mut roots);
    Ok(RootSet { roots, degenerate })
}

/// Largest modulus over the roots of `(B² − cA)/G` for 33 levels `c ∈ [0, 4]`.
fn curve_radius(f: &Factors) -> Result<f64> {
    let mut r: f64 = 0.0;
    for i in 0..=32 {
        for z in solve_level(f, i as f64 / 8.0)? {
            r = r.max(z.norm());
        }
    }
    Ok(if r > 0.0 { 1.05 * r } else { 1.0 })
}

/// `(H_m(z), H_m′(z), S_m(z))` where `S_m` runs the recurrence on absolute
/// values and bounds the rounding scale of the evaluation.
fn recurrence_eval(a: &CPoly<f64>, b: &CPoly<f64>, m: usize, z: C64) -> (C64, C64, f64) {
    let (av, da) = a.eval_with_derivative(z);
    let (bv, db) = b.eval_with_derivative(z);
    let (aa, ba) = (a.abs_scale(z), b.abs_scale(z));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (mut h0, mut d0, mut s0) = (one, zero, 1.0);
    let (mut h1, mut d1, mut s1) = (-bv, -db, ba);
    for _ in 2..=m {
        let h2 = -bv * h1 - av * h0;
        let d2 = -db * h1 - bv * d1 - da * h0 - av * d0;
        let s2 = ba * s1 + aa * s0;
        (h0, d0, s0) = (h1, d1, s1);
        (h1, d1, s1) = (h2, d2, s2);
    }
    (h1, d1, s1)
}

/// Roots of `H_1 ⋯ H_n`.
///
/// Without `spec`: the curve roots of every factor (degenerate roots are
/// dropped). With `spec`: one record `f(p/(k+1))` for every fraction strictly
/// inside the arc's interval, evaluated from the arc and polished by Newton
/// on the sheet's factor of `B² − cA`.
pub fn product_roots(t: &GenTriple, n: usize, spec: Option<&ArcSpec>) -> Result<Vec<RootRecord>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let per_k: Vec<Vec<RootRecord>> = match spec {
        None => (1..=n)
            .into_par_iter()
            .map(|k| roots_curve(t, k, None).map(|s| s.roots))
            .collect::<Result<_>>()?,
        Some(spec) => {
            let (t0, t1) = spec.interval();
            (1..=n)
                .into_par_iter()
                .map(|k| {
                    let q = k + 1;
                    let p_lo = (t0 * q as f64).floor() as usize;
                    let p_hi = ((t1 * q as f64).ceil() as usize).min(k);
                    (p_lo.max(1)..=p_hi)
                        .filter(|&p| {
                            let x = p as f64 / q as f64;
                            x > t0 && x < t1
                        })
                        .map(|p| {
                            Ok(RootRecord {
                                z: spec.point(p as f64 / q as f64)?,
                                m: k,
                                label: Some((p, q)),
                                mult: 1,
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        }
    };
    let mut out: Vec<RootRecord> = per_k.into_iter().flatten().collect();
    canonical_sort(&mut out);
    Ok(out)
}

/// Roots of `B² − cA` for one level `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSample {
    pub c: f64,
    pub points: Vec<C64>,
}

/// Samples the carrier curve at `n_c` equally spaced levels in `[0, 4]`.
///
/// Accepts any triple with `C = 1` and polynomial `A`, `B`, so non-standard
/// representatives can be plotted as well.
pub fn sample_curve(t: &GenTriple, n_c: usize) -> Result<Vec<CurveSample>> {
    if n_c < 2 {
        return Err(Error::InvalidArgument("need at least 2 levels".into()));
    }
    let (a, b) = t
        .polys()
        .ok_or_else(|| Error::InvalidArgument("sample_curve needs C = 1 and polynomial A, B".into()))?;
    let a = CPoly::<f64>::from_exact(a)?;
    let b2 = CPoly::<f64>::from_exact(&b.pow(2))?;
    let b = CPoly::<f64>::from_exact(b)?;
    (0..n_c)
        .into_par_iter()
        .map(|i| {
            let c = 4.0 * i as f64 / (n_c - 1) as f64;
            let p = b2.sub_scaled(C64::new(c, 0.0), &a);
            let points = match p.degree() {
                None => return Err(Error::Numeric(format!("B² − cA vanishes identically at c = {c}"))),
                Some(0) => Vec::new(),
                // B² itself: solve B and double, keeping full accuracy at the double roots
                Some(_) if c == 0.0 => roots_horner(&b, TAU_ROOT)?.into_iter().flat_map(|z| [z, z]).collect(),
                Some(_) => roots_horner(&p, TAU_ROOT)?,
            };
            Ok(CurveSample { c, points })
        })
        .collect()
}

/// Greedy multiset matching: the largest nearest-neighbour distance after
/// pairing every element of `x` with a distinct element of `y`, or `None`
/// when the sizes differ.
pub fn multiset_distance(x: &[C64], y: &[C64]) -> Option<f64> {
    if x.len() != y.len() {
        return None;
    }
    let mut used = vec![false; y.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].re.total_cmp(&x[j].re).then(x[i].im.total_cmp(&x[j].im)));
    for i in order {
        let (k, d) = y
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, w)| (k, (w - x[i]).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        used[k] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
