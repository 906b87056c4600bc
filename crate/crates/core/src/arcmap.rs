//! Parametrization `f(t) = h⁻¹(4cos²πt)` of a subarc of the carrier curve.
//!
//! Writing `s = cos πt` and `σ(z)` for a branch of `√A(z)` chosen continuously
//! along the arc, the tracked root solves
//!
//! ```text
//! Φ(z, s) = B(z) − 2s·σ(z) = 0,
//! ```
//!
//! one of the two factors of `B² − 4s²A`. Unlike `B² − 4cos²(πt)·A`, `Φ` keeps a
//! simple root as `s` crosses 0, so the arc passes through `t = 1/2` without
//! switching branches. The tangent is `f′(t) = −2πσ sin(πt) / Φ_z` with
//! `Φ_z = B′ − s·A′/σ`.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::closedform::Parametrization;
use crate::error::{Error, Result};
use crate::exactpoly::GenTriple;
use crate::numpoly::CPoly;
use crate::quad::{integrate, QuadOptions};

type C64 = Complex<f64>;

/// Numerical tolerances for arc construction and evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcTolerances {
    /// Allowed `|h(f(t)) − 4cos²πt|` and off-curve `|Im h|` at grid nodes.
    pub tau_curve: f64,
    /// Allowed `|h(seed) − 4cos²πt₀|`.
    pub tau_seed: f64,
    /// Lower bound on `|f′|` at grid nodes.
    pub eps_deriv: f64,
    /// `|A(z)|` below this is a pole of `h`.
    pub tau_pole: f64,
    /// Minimum distance between non-adjacent grid nodes.
    pub tau_sep: f64,
}

impl Default for ArcTolerances {
    fn default() -> Self {
        Self {
            tau_curve: 1e-8,
            tau_seed: 1e-6,
            eps_deriv: 1e-6,
            tau_pole: 1e-12,
            tau_sep: 1e-9,
        }
    }
}

pub const DEFAULT_N_GRID: usize = 2048;

/// Float copies of the standard-form `A` and `B`.
#[derive(Clone, Debug)]
struct CurvePolys {
    a: CPoly<f64>,
    b: CPoly<f64>,
}

impl CurvePolys {
    fn new(t: &GenTriple) -> Result<Self> {
        let (a, b) = t.standard_polys()?;
        Ok(Self {
            a: CPoly::from_exact(a)?,
            b: CPoly::from_exact(b)?,
        })
    }
}

/// `h(z) = B(z)²/A(z)` in floating point.
pub fn h_eval(t: &GenTriple, z: C64) -> Result<C64> {
    h_eval_with(t, z, ArcTolerances::default().tau_pole)
}

pub fn h_eval_with(t: &GenTriple, z: C64, tau_pole: f64) -> Result<C64> {
    let p = CurvePolys::new(t)?;
    h_float(&p, z, tau_pole)
}

fn h_float(p: &CurvePolys, z: C64, tau_pole: f64) -> Result<C64> {
    let a = p.a.eval(z);
    if a.norm() < tau_pole {
        return Err(Error::Numeric(format!("pole of h at {z}")));
    }
    let b = p.b.eval(z);
    Ok(b * b / a)
}

/// One grid node of an arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcNode {
    pub t: f64,
    pub z: C64,
    /// Complex derivative `f′(t)`.
    pub dz: C64,
    /// Branch of `√A(z)` in use at this node.
    pub sigma: C64,
}

impl ArcNode {
    pub fn fprime_mag(&self) -> f64 {
        self.dz.norm()
    }
}

/// A single-sheet parametrization of a subarc of the carrier curve.
#[derive(Clone, Debug)]
pub struct ArcSpec {
    triple: GenTriple,
    polys: CurvePolys,
    interval: (f64, f64),
    seed: C64,
    nodes: Vec<ArcNode>,
    cumulative: Vec<f64>,
    tol: ArcTolerances,
}

/// Newton on `Φ(·, s)` from `z`, tracking the `√A` branch nearest `sigma`.
/// Returns `(z, σ, Φ_z)`.
fn newton_phi(p: &CurvePolys, s: f64, mut z: C64, mut sigma: C64, tol: &ArcTolerances) -> Option<(C64, C64, C64)> {
    for _ in 0..60 {
        let (a, da) = p.a.eval_with_derivative(z);
        if a.norm() < tol.tau_pole {
            return None;
        }
        let root = a.sqrt();
        sigma = if (root - sigma).norm() <= (root + sigma).norm() { root } else { -root };
        let (b, db) = p.b.eval_with_derivative(z);
        let phi = b - 2.0 * s * sigma;
        let phi_z = db - s * da / sigma;
        if phi_z.norm() == 0.0 || !phi_z.re.is_finite() {
            return None;
        }
        let step = phi / phi_z;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            let a = p.a.eval(z);
            let root = a.sqrt();
            sigma = if (root - sigma).norm() <= (root + sigma).norm() { root } else { -root };
            let (_, db) = p.b.eval_with_derivative(z);
            let da = p.a.eval_with_derivative(z).1;
            return Some((z, sigma, db - s * da / sigma));
        }
    }
    None
}

fn tangent(t: f64, sigma: C64, phi_z: C64) -> C64 {
    -2.0 * PI * (PI * t).sin() * sigma / phi_z
}

impl ArcSpec {
    /// Builds the arc over `[t0, t1]` by predictor–corrector continuation
    /// from `seed`, sampled at `n_grid` equally spaced parameters.
    pub fn build(triple: &GenTriple, interval: (f64, f64), seed: C64, n_grid: usize) -> Result<Self> {
        Self::build_with(triple, interval, seed, n_grid, ArcTolerances::default())
    }

    pub fn build_with(
        triple: &GenTriple,
        interval: (f64, f64),
        seed: C64,
        n_grid: usize,
        tol: ArcTolerances,
    ) -> Result<Self> {
        let (t0, t1) = interval;
        if !(0.0 < t0 && t0 < t1 && t1 < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "parameter interval must satisfy 0 < t0 < t1 < 1, got [{t0}, {t1}]"
            )));
        }
        if n_grid < 2 {
            return Err(Error::InvalidArgument("n_grid must be at least 2".into()));
        }
        let polys = CurvePolys::new(triple)?;
        let target = 4.0 * (PI * t0).cos().powi(2);
        let h_seed = h_float(&polys, seed, tol.tau_pole).map_err(|e| Error::Arc(e.to_string()))?;
        if (h_seed - target).norm() > tol.tau_seed {
            return Err(Error::Arc(format!(
                "seed {seed} is off the curve: |h(seed) − 4cos²(πt0)| = {:e}",
                (h_seed - target).norm()
            )));
        }

        let s0 = (PI * t0).cos();
        let a0 = polys.a.eval(seed).sqrt();
        let b0 = polys.b.eval(seed);
        let sigma0 = if (b0 - 2.0 * s0 * a0).norm() <= (b0 + 2.0 * s0 * a0).norm() { a0 } else { -a0 };
        let (z0, sigma0, phi_z0) = newton_phi(&polys, s0, seed, sigma0, &tol)
            .ok_or_else(|| Error::Arc("Newton failed to settle the seed".into()))?;

        let mut nodes = Vec::with_capacity(n_grid);
        nodes.push(ArcNode { t: t0, z: z0, dz: tangent(t0, sigma0, phi_z0), sigma: sigma0 });
        let h = (t1 - t0) / (n_grid - 1) as f64;
        for i in 1..n_grid {
            let target_t = if i == n_grid - 1 { t1 } else { t0 + h * i as f64 };
            let prev = *nodes.last().expect("nonempty");
            nodes.push(Self::advance(&polys, prev, target_t, &tol)?);
        }

        let mut spec = Self {
            triple: triple.clone(),
            polys,
            interval,
            seed,
            nodes,
            cumulative: Vec::new(),
            tol,
        };
        spec.validate()?;
        spec.cumulative = spec.accumulate_length()?;
        Ok(spec)
    }

    /// Continues from `prev` to parameter `t`, halving substeps whenever the
    /// corrector fails or lands implausibly far from the predictor.
    fn advance(p: &CurvePolys, prev: ArcNode, t: f64, tol: &ArcTolerances) -> Result<ArcNode> {
        let mut cur = prev;
        let mut step = t - prev.t;
        let min_step = (t - prev.t).abs() * 1e-9;
        while cur.t < t {
            let next_t = (cur.t + step).min(t);
            let dt = next_t - cur.t;
            let predicted = cur.z + cur.dz * dt;
            let s = (PI * next_t).cos();
            let accepted = newton_phi(p, s, predicted, cur.sigma, tol).filter(|(z, _, _)| {
                let drift = (*z - predicted).norm();
                drift <= 0.25 * (cur.dz.norm() * dt).max(1e-12) + 1e-12
            });
            match accepted {
                Some((z, sigma, phi_z)) => {
                    cur = ArcNode { t: next_t, z, dz: tangent(next_t, sigma, phi_z), sigma };
                    step *= 1.5;
                }
                None => {
                    step *= 0.5;
                    if step < min_step {
                        return Err(Error::Arc(format!(
                            "continuation stalled near t = {:.12} (z = {}); branch point or root collision",
                            cur.t, cur.z
                        )));
                    }
                }
            }
        }
        Ok(cur)
    }

    fn validate(&self) -> Result<()> {
        for n in &self.nodes {
            let h = h_float(&self.polys, n.z, self.tol.tau_pole).map_err(|e| Error::Arc(e.to_string()))?;
            let c = 4.0 * (PI * n.t).cos().powi(2);
            if (h - c).norm() > self.tol.tau_curve
                || h.im.abs() > self.tol.tau_curve
                || h.re < -self.tol.tau_curve
                || h.re > 4.0 + self.tol.tau_curve
            {
                return Err(Error::Arc(format!("node at t = {} is off the curve (h = {h})", n.t)));
            }
            if !(n.fprime_mag() >= self.tol.eps_deriv) {
                return Err(Error::Arc(format!(
                    "|f′({})| = {:e} is below the derivative floor",
                    n.t,
                    n.fprime_mag()
                )));
            }
        }
        // Injectivity: sort by real part so only a narrow band is compared.
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&i, &j| self.nodes[i].z.re.total_cmp(&self.nodes[j].z.re));
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[oi + 1..] {
                if self.nodes[j].z.re - self.nodes[i].z.re > self.tol.tau_sep {
                    break;
                }
                if i.abs_diff(j) > 1 && (self.nodes[i].z - self.nodes[j].z).norm() <= self.tol.tau_sep {
                    return Err(Error::Arc(format!(
                        "arc is not injective: t = {} and t = {} meet",
                        self.nodes[i].t, self.nodes[j].t
                    )));
                }
            }
        }
        Ok(())
    }

    fn accumulate_length(&self) -> Result<Vec<f64>> {
        let mut cum = Vec::with_capacity(self.nodes.len());
        let mut total = 0.0;
        cum.push(0.0);
        for w in self.nodes.windows(2) {
            total += self.panel_length(w[0].t, w[1].t)?;
            cum.push(total);
        }
        Ok(cum)
    }

    fn panel_length(&self, ta: f64, tb: f64) -> Result<f64> {
        let opts = QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-16,
            ..QuadOptions::default()
        };
        Ok(integrate(|t| self.f_prime_mag(t), ta, tb, &[], opts)?.value)
    }

    pub fn triple(&self) -> &GenTriple {
        &self.triple
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn seed(&self) -> C64 {
        self.seed
    }

    pub fn nodes(&self) -> &[ArcNode] {
        &self.nodes
    }

    pub fn tolerances(&self) -> &ArcTolerances {
        &self.tol
    }

    /// `l(J)`.
    pub fn arc_length(&self) -> f64 {
        *self.cumulative.last().expect("built arc")
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (t0, t1) = self.interval;
        if !(t >= t0 && t <= t1) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [{t0}, {t1}]")));
        }
        let h = (t1 - t0) / (self.nodes.len() - 1) as f64;
        let i = (((t - t0) / h).floor() as usize).min(self.nodes.len() - 2);
        Ok(i)
    }

    /// `(f(t), σ, Φ_z)` from Hermite interpolation on the grid and a Newton
    /// correction on `Φ`.
    fn solve_at(&self, t: f64) -> Result<(C64, C64, C64)> {
        let i = self.locate(t)?;
        let (n0, n1) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = n1.t - n0.t;
        let u = (t - n0.t) / h;
        let (u2, u3) = (u * u, u * u * u);
        let guess = n0.z * (2.0 * u3 - 3.0 * u2 + 1.0)
            + n0.dz * (h * (u3 - 2.0 * u2 + u))
            + n1.z * (-2.0 * u3 + 3.0 * u2)
            + n1.dz * (h * (u3 - u2));
        let sigma = if u < 0.5 { n0.sigma } else { n1.sigma };
        newton_phi(&self.polys, (PI * t).cos(), guess, sigma, &self.tol)
            .ok_or_else(|| Error::Numeric(format!("Newton failed evaluating the arc at t = {t}")))
    }

    /// `f(t)` for `t ∈ I`.
    pub fn point(&self, t: f64) -> Result<C64> {
        Ok(self.solve_at(t)?.0)
    }

    /// Complex `f′(t)`.
    pub fn f_prime(&self, t: f64) -> Result<C64> {
        let (_, sigma, phi_z) = self.solve_at(t)?;
        if phi_z.norm() < self.tol.tau_pole {
            return Err(Error::Numeric(format!("branch point at t = {t}")));
        }
        Ok(tangent(t, sigma, phi_z))
    }

    /// `|f′(t)|`.
    pub fn f_prime_mag(&self, t: f64) -> Result<f64> {
        Ok(self.f_prime(t)?.norm())
    }

    /// Arclength from `t0` to `t`.
    pub fn arc_length_to(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        Ok(self.cumulative[i] + self.panel_length(self.nodes[i].t, t)?)
    }

    /// Arclength between two parameters (nonnegative).
    pub fn arc_length_between(&self, ta: f64, tb: f64) -> Result<f64> {
        Ok((self.arc_length_to(tb)? - self.arc_length_to(ta)?).abs())
    }

    /// Parameter `t ∈ I` with `f(t) = z`, or an error if `z` is not on the arc
    /// within `tol_dist`.
    pub fn pullback(&self, z: C64, tol_dist: f64) -> Result<f64> {
        let (t0, t1) = self.interval;
        let nearest = self
            .nodes
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.z - z).norm().total_cmp(&(b.z - z).norm()))
            .map(|(i, _)| i)
            .expect("nonempty grid");
        let mut t = self.nodes[nearest].t;
        for _ in 0..50 {
            let (fz, sigma, phi_z) = self.solve_at(t)?;
            let d = tangent(t, sigma, phi_z);
            let step = ((fz - z) * d.conj()).re / d.norm_sqr();
            let next = (t - step).clamp(t0, t1);
            let moved = (next - t).abs();
            t = next;
            if moved <= 1e-15 {
                break;
            }
        }
        let miss = (self.point(t)? - z).norm();
        if miss > tol_dist {
            return Err(Error::Arc(format!("{z} is not on the arc (distance {miss:e})")));
        }
        Ok(t)
    }

    /// CSV rows `t,re_f,im_f,fprime_mag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_f,im_f,fprime_mag\n");
        for n in &self.nodes {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", n.t, n.z.re, n.z.im, n.fprime_mag()));
        }
        out
    }
}

impl Parametrization for ArcSpec {
    fn interval(&self) -> (f64, f64) {
        self.interval
    }

    fn speed(&self, t: f64) -> Result<f64> {
        self.f_prime_mag(t)
    }

    fn length(&self) -> f64 {
        self.arc_length()
    }

    fn sample_points(&self) -> Vec<f64> {
        let stride = (self.nodes.len() / 512).max(1);
        let mut ts: Vec<f64> = self.nodes.iter().step_by(stride).map(|n| n.t).collect();
        if ts.last() != Some(&self.interval.1) {
            ts.push(self.interval.1);
        }
        ts
    }
}
