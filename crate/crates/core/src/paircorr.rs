//! Empirical pair-correlation statistics.
//!
//! For points in a window of length `w` drawn from an ambient set of size
//! `N`, the statistic is
//!
//! ```text
//! R(λ) = #{ordered pairs i ≠ j : 0 < |x_i − x_j| ≤ λ/N} / (2 N w).
//! ```
//!
//! On an arc the window is measured in arclength and normalized by its own
//! point count `N_J`: the threshold is `λ·l(J)/N_J` and the prefactor
//! `1/(2N_J)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arcmap::ArcSpec;
use crate::error::{Error, Result};
use crate::rootfind::RootRecord;
use crate::scalar::Real;

/// Multiset of reals in `(0, 1)` drawn from an ambient set of `n_total` points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet1D<T: Real> {
    points: Vec<T>,
    n_total: usize,
}

impl<T: Real> PointSet1D<T> {
    pub fn new(points: Vec<T>, n_total: usize) -> Result<Self> {
        if n_total < points.len() {
            return Err(Error::InvalidArgument(format!(
                "ambient size {n_total} is smaller than the {} points given",
                points.len()
            )));
        }
        if let Some(x) = points.iter().find(|&&x| !(x > T::zero() && x < T::one())) {
            return Err(Error::InvalidArgument(format!("point {x} outside (0, 1)")));
        }
        Ok(Self { points, n_total })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Sorted points lying in `[a, b]`.
    pub fn window(&self, a: T, b: T) -> Vec<T> {
        let mut w: Vec<T> = self.points.iter().copied().filter(|&x| x >= a && x <= b).collect();
        w.sort_by(|x, y| x.partial_cmp(y).expect("finite points"));
        w
    }
}

/// `{p/q : 1 ≤ p < q ≤ Q}` with non-reduced fractions kept.
pub fn farey_like<T: Real>(q_max: u32) -> Result<PointSet1D<T>> {
    if q_max < 2 {
        return Err(Error::InvalidArgument("Q must be at least 2".into()));
    }
    let n = (q_max as usize) * (q_max as usize - 1) / 2;
    let mut points = Vec::with_capacity(n);
    for q in 2..=q_max {
        let qt = T::from_u32(q).expect("small integer");
        for p in 1..q {
            points.push(T::from_u32(p).expect("small integer") / qt);
        }
    }
    Ok(PointSet1D { points, n_total: n })
}

/// Relative slack on the threshold so that differences of exactly
/// representable rationals equal to it are not lost to rounding.
fn slack<T: Real>() -> T {
    T::one() + T::lit(8.0) * T::epsilon()
}

/// Ordered pairs `(i, j)`, `i ≠ j`, of sorted `xs` with
/// `zero_tol < x_j − x_i ≤ thr` in absolute value.
///
/// The threshold is widened by the rounding error of `x_j − x_i`, which is
/// relative to `|x|` rather than to `thr`; exact ties such as
/// `4/15 − 1/4 = λ/N` are then counted as in exact arithmetic.
pub fn count_pairs_sorted<T: Real>(xs: &[T], thr: T, zero_tol: T) -> u64 {
    let thr_s = thr * slack::<T>();
    let four_eps = T::lit(4.0) * T::epsilon();
    let mut lo = 0;
    let mut hi = 0;
    let mut count = 0u64;
    for i in 0..xs.len() {
        // x_i + thr_i is nondecreasing in i, so both pointers only advance
        let thr_i = thr_s + four_eps * (xs[i].abs() + thr);
        // lo: first index with x − x_i > zero_tol; hi: first with x − x_i > thr_i
        lo = lo.max(i + 1);
        while lo < xs.len() && xs[lo] - xs[i] <= zero_tol {
            lo += 1;
        }
        hi = hi.max(lo);
        while hi < xs.len() && xs[hi] - xs[i] <= thr_i {
            hi += 1;
        }
        count += (hi - lo) as u64;
    }
    2 * count
}

/// Which normalization a [`PairCorrCurve`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "empirical_R")]
    EmpiricalR,
    #[serde(rename = "closed_R")]
    ClosedR,
    #[serde(rename = "empirical_g")]
    EmpiricalG,
    #[serde(rename = "closed_g")]
    ClosedG,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::EmpiricalR => "empirical_R",
            Kind::ClosedR => "closed_R",
            Kind::EmpiricalG => "empirical_g",
            Kind::ClosedG => "closed_g",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Kind::EmpiricalR, Kind::ClosedR, Kind::EmpiricalG, Kind::ClosedG]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

/// Normalization record attached to a curve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Ambient count used in the threshold.
    pub n: Option<usize>,
    /// Points inside the window.
    pub n_window: Option<usize>,
    /// Window in parameter space.
    pub window: Option<(f64, f64)>,
    /// Threshold unit: `1/N` on intervals, `l(J)/N_J` on arcs.
    pub mean_spacing: Option<f64>,
    pub q: Option<u32>,
    pub n_product: Option<usize>,
    pub l_j: Option<f64>,
    /// Prefactor actually applied to the pair count.
    pub prefactor: Option<f64>,
    /// `1/(2·N_window)`, the window-local alternative.
    pub prefactor_local: Option<f64>,
    /// Width of the finite-difference stencil, for density estimates.
    pub bin_width: Option<f64>,
    pub normalization: String,
}

/// Values of `R` or `g` on a grid of `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorrCurve<T: Real> {
    pub lambdas: Vec<T>,
    pub values: Vec<T>,
    pub kind: Kind,
    pub meta: Normalization,
}

impl<T: Real> PairCorrCurve<T> {
    pub fn new(lambdas: Vec<T>, values: Vec<T>, kind: Kind, meta: Normalization) -> Result<Self> {
        if lambdas.len() != values.len() {
            return Err(Error::InvalidArgument("λ grid and values differ in length".into()));
        }
        if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("λ grid must be strictly increasing".into()));
        }
        Ok(Self { lambdas, values, kind, meta })
    }

    /// CSV rows `lambda,value,kind`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,value,kind\n");
        for (l, v) in self.lambdas.iter().zip(&self.values) {
            out.push_str(&format!("{:.16e},{:.16e},{}\n", l.to_f64().unwrap_or(f64::NAN), v.to_f64().unwrap_or(f64::NAN), self.kind.as_str()));
        }
        out
    }

    /// Parses the CSV written by [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lambdas = Vec::new();
        let mut values = Vec::new();
        let mut kind = None;
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || Error::Parse { pos: i, message: format!("bad CSV row '{line}'") };
            if fields.len() != 3 {
                return Err(bad());
            }
            let l: f64 = fields[0].trim().parse().map_err(|_| bad())?;
            let v: f64 = fields[1].trim().parse().map_err(|_| bad())?;
            let k = Kind::parse(fields[2].trim()).ok_or_else(bad)?;
            if kind.is_some_and(|prev| prev != k) {
                return Err(bad());
            }
            kind = Some(k);
            lambdas.push(T::lit(l));
            values.push(T::lit(v));
        }
        let kind = kind.ok_or_else(|| Error::Parse { pos: 0, message: "empty curve".into() })?;
        Self::new(lambdas, values, kind, Normalization::default())
    }
}

/// `0.05, 0.10, …, 4.00`.
pub fn default_lambda_grid<T: Real>() -> Vec<T> {
    lambda_grid(T::lit(0.05), T::lit(4.0))
}

/// `step, 2·step, …` up to `max` inclusive (within rounding).
pub fn lambda_grid<T: Real>(step: T, max: T) -> Vec<T> {
    let n = (max / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    (1..=n).map(|k| step * T::from_usize(k).expect("grid index")).collect()
}

/// Interval statistic at one `λ`, normalized by the ambient `N`.
pub fn empirical_r_interval<T: Real>(s: &PointSet1D<T>, window: (T, T), lambda: T) -> Result<T> {
    Ok(empirical_r_interval_curve(s, window, &[lambda])?.values[0])
}

/// Interval statistic on a `λ` grid.
pub fn empirical_r_interval_curve<T: Real>(s: &PointSet1D<T>, window: (T, T), lambdas: &[T]) -> Result<PairCorrCurve<T>> {
    let (a, b) = window;
    if !(T::zero() < a && a < b && b < T::one()) {
        return Err(Error::InvalidArgument(format!("window [{a}, {b}] must satisfy 0 < a < b < 1")));
    }
    if lambdas.iter().any(|&l| !(l > T::zero())) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let xs = s.window(a, b);
    if xs.is_empty() {
        return Err(Error::InvalidArgument("no points in the window".into()));
    }
    let n = T::from_usize(s.n_total).expect("count fits");
    let width = b - a;
    let prefactor = T::one() / (T::lit(2.0) * n * width);
    let values = lambdas
        .iter()
        .map(|&l| prefactor * T::from_u64(count_pairs_sorted(&xs, l / n, T::zero())).expect("count fits"))
        .collect();
    let meta = Normalization {
        n: Some(s.n_total),
        n_window: Some(xs.len()),
        window: Some((a.to_f64().unwrap_or(f64::NAN), b.to_f64().unwrap_or(f64::NAN))),
        mean_spacing: Some(1.0 / s.n_total as f64),
        prefactor: prefactor.to_f64(),
        prefactor_local: Some(1.0 / (2.0 * xs.len() as f64)),
        normalization: "1/(2 N (b-a)), threshold lambda/N".into(),
        ..Normalization::default()
    };
    PairCorrCurve::new(lambdas.to_vec(), values, Kind::EmpiricalR, meta)
}

/// How distances along an arc are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcDistance {
    /// Arclength between parameters.
    Arclength,
    /// Euclidean distance in the plane.
    Chord,
}

/// Points on an arc, ordered by arclength position.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcPoints {
    positions: Vec<f64>,
    z: Vec<Complex<f64>>,
    length: f64,
}

impl ArcPoints {
    /// From arclength positions and planar points; both are sorted together.
    pub fn new(positions: Vec<f64>, z: Vec<Complex<f64>>, length: f64) -> Result<Self> {
        if positions.len() != z.len() {
            return Err(Error::InvalidArgument("positions and points differ in length".into()));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidArgument("arc length must be positive".into()));
        }
        let mut idx: Vec<usize> = (0..positions.len()).collect();
        idx.sort_by(|&i, &j| positions[i].total_cmp(&positions[j]));
        Ok(Self {
            positions: idx.iter().map(|&i| positions[i]).collect(),
            z: idx.iter().map(|&i| z[i]).collect(),
            length,
        })
    }

    /// Places records on `spec`: labeled records use `t = p/q`, others are
    /// pulled back to the arc. Every record is repeated `mult` times.
    pub fn from_records(records: &[RootRecord], spec: &ArcSpec) -> Result<Self> {
        let mut positions = Vec::with_capacity(records.len());
        let mut z = Vec::with_capacity(records.len());
        let scale = spec.arc_length().max(1.0);
        for r in records {
            let t = match r.label {
                Some((p, q)) => p as f64 / q as f64,
                None => spec.pullback(r.z, 1e-8 * scale)?,
            };
            let s = spec.arc_length_to(t)?;
            for _ in 0..r.mult.max(1) {
                positions.push(s);
                z.push(r.z);
            }
        }
        Self::new(positions, z, spec.arc_length())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
}

/// Distances below this fraction of `l(J)` count as coincident points.
pub const COINCIDENCE_TOL: f64 = 1e-10;

/// Arc statistic on a `λ` grid.
pub fn empirical_r_arc_curve(pts: &ArcPoints, lambdas: &[f64], distance: ArcDistance) -> Result<PairCorrCurve<f64>> {
    let n = pts.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two points on the arc".into()));
    }
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let spacing = pts.length / n as f64;
    let zero_tol = COINCIDENCE_TOL * pts.length;
    let prefactor = 1.0 / (2.0 * n as f64);
    let values = lambdas
        .iter()
        .map(|&l| {
            let thr = l * spacing;
            let count = match distance {
                ArcDistance::Arclength => count_pairs_sorted(&pts.positions, thr, zero_tol),
                ArcDistance::Chord => count_chord_pairs(pts, thr, zero_tol),
            };
            prefactor * count as f64
        })
        .collect();
    let meta = Normalization {
        n: Some(n),
        n_window: Some(n),
        mean_spacing: Some(spacing),
        l_j: Some(pts.length),
        prefactor: Some(prefactor),
        prefactor_local: Some(prefactor),
        normalization: match distance {
            ArcDistance::Arclength => "1/(2 N_J), threshold lambda l(J)/N_J, arclength".into(),
            ArcDistance::Chord => "1/(2 N_J), threshold lambda l(J)/N_J, chord".into(),
        },
        ..Normalization::default()
    };
    PairCorrCurve::new(lambdas.to_vec(), values, Kind::EmpiricalR, meta)
}

/// Arc statistic at one `λ`.
pub fn empirical_r_arc(pts: &ArcPoints, lambda: f64, distance: ArcDistance) -> Result<f64> {
    Ok(empirical_r_arc_curve(pts, &[lambda], distance)?.values[0])
}

/// Chord distance never exceeds arclength, so candidates are scanned up to
/// twice the threshold in arclength and filtered by chord.
fn count_chord_pairs(pts: &ArcPoints, thr: f64, zero_tol: f64) -> u64 {
    let thr_s = thr * slack::<f64>();
    let mut count = 0u64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts.positions[j] - pts.positions[i] > 2.0 * thr_s {
                break;
            }
            let d = (pts.z[j] - pts.z[i]).norm();
            if d > zero_tol && d <= thr_s {
                count += 1;
            }
        }
    }
    2 * count
}

/// Centered finite differences of `R`, one-sided at the ends.
pub fn estimate_g<T: Real>(r: &PairCorrCurve<T>) -> Result<PairCorrCurve<T>> {
    if r.kind != Kind::EmpiricalR && r.kind != Kind::ClosedR {
        return Err(Error::InvalidArgument("estimate_g needs an R curve".into()));
    }
    let n = r.lambdas.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two λ nodes".into()));
    }
    if r.values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("R is not nondecreasing".into()));
    }
    let (l, v) = (&r.lambdas, &r.values);
    let values = (0..n)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (v[hi] - v[lo]) / (l[hi] - l[lo])
        })
        .collect();
    let mut meta = r.meta.clone();
    let width = if n >= 3 { l[2] - l[0] } else { l[1] - l[0] };
    meta.bin_width = width.to_f64();
    let kind = if r.kind == Kind::EmpiricalR { Kind::EmpiricalG } else { Kind::ClosedG };
    PairCorrCurve::new(l.clone(), values, kind, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farey_sizes() {
        let s = farey_like::<f64>(3).unwrap();
        assert_eq!(s.points(), &[0.5, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(s.n_total(), 3);
        let s = farey_like::<f64>(4).unwrap();
        assert_eq!(s.points().iter().filter(|&&x| x == 0.5).count(), 2);
        assert_eq!(farey_like::<f64>(5).unwrap().n_total(), 10);
        assert!(farey_like::<f64>(1).is_err());
    }

    #[test]
    fn worked_examples() {
        let s = farey_like::<f64>(3).unwrap();
        let r = empirical_r_interval(&s, (0.1, 0.9), 0.5).unwrap();
        assert!((r - 5.0 / 6.0).abs() < 1e-15);
        let r = empirical_r_interval(&s, (0.1, 0.9), 1.0).unwrap();
        assert!((r - 1.25).abs() < 1e-15);
        assert_eq!(empirical_r_interval(&s, (0.1, 0.9), 0.1).unwrap(), 0.0);
        assert!(empirical_r_interval(&s, (0.7, 0.9), 1.0).is_err());
        assert!(empirical_r_interval(&s, (0.0, 0.9), 1.0).is_err());
    }

    #[test]
    fn sweep_matches_exact_count() {
        let q_max = 30i64;
        let s = farey_like::<f64>(q_max as u32).unwrap();
        let xs = s.window(0.2, 0.8);
        let n = s.n_total() as i64;
        let fr: Vec<(i64, i64)> =
            (2..=q_max).flat_map(|q| (1..q).map(move |p| (p, q))).filter(|&(p, q)| 5 * p >= q && 5 * p <= 4 * q).collect();
        for tenths in [3i64, 5, 10, 17, 30] {
            // |p/q − r/s| ≤ λ/N with λ = tenths/10, in integers
            let exact = fr
                .iter()
                .flat_map(|&(p, q)| fr.iter().map(move |&(r, t)| ((p * t - r * q).abs(), q * t)))
                .filter(|&(d, qt)| d > 0 && 10 * d * n <= tenths * qt)
                .count() as u64;
            let thr = tenths as f64 / 10.0 / n as f64;
            assert_eq!(count_pairs_sorted(&xs, thr, 0.0), exact, "λ = {}", tenths as f64 / 10.0);
        }
    }

    #[test]
    fn arc_threshold_is_inclusive() {
        let pts = ArcPoints::new(vec![0.0, 1.0, 3.0], vec![Complex::new(0.0, 0.0); 3], 3.0).unwrap();
        // spacing 1, λ = 1: only the pair at distance exactly 1 counts
        assert_eq!(empirical_r_arc(&pts, 1.0, ArcDistance::Arclength).unwrap(), 2.0 / 6.0);
        assert!(ArcPoints::new(vec![0.0], vec![], 1.0).is_err());
    }

    #[test]
    fn coincident_points_pair_with_others_only() {
        let pts = ArcPoints::new(vec![0.5, 0.5, 0.7], vec![Complex::new(0.0, 0.0); 3], 1.0).unwrap();
        // spacing 1/3; λ = 1 → threshold 1/3: the two copies at 0.5 each pair with 0.7
        assert_eq!(empirical_r_arc(&pts, 1.0, ArcDistance::Arclength).unwrap(), 4.0 / 6.0);
    }

    #[test]
    fn g_of_linear_r_is_one() {
        let l: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
        let r = PairCorrCurve::new(l.clone(), l.clone(), Kind::EmpiricalR, Normalization::default()).unwrap();
        let g = estimate_g(&r).unwrap();
        assert!(g.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!((g.meta.bin_width.unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(g.kind, Kind::EmpiricalG);
        let zero = PairCorrCurve::new(l.clone(), vec![0.0; 20], Kind::EmpiricalR, Normalization::default()).unwrap();
        assert!(estimate_g(&zero).unwrap().values.iter().all(|&v| v == 0.0));
        let mut bad = l.clone();
        bad[3] = 0.0;
        let bad = PairCorrCurve::new(l, bad, Kind::EmpiricalR, Normalization::default()).unwrap();
        assert!(estimate_g(&bad).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = PairCorrCurve::new(vec![0.5, 1.0], vec![0.0, 0.125], Kind::ClosedR, Normalization::default()).unwrap();
        let back = PairCorrCurve::<f64>::from_csv(&c.to_csv()).unwrap();
        assert_eq!(back.lambdas, c.lambdas);
        assert_eq!(back.values, c.values);
        assert_eq!(back.kind, Kind::ClosedR);
    }

    #[test]
    fn default_grid() {
        let g = default_lambda_grid::<f64>();
        assert_eq!(g.len(), 80);
        assert!((g[79] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_statistic() {
        let s = farey_like::<f32>(40).unwrap();
        let r32 = empirical_r_interval(&s, (0.2, 0.8), 2.0).unwrap();
        let r64 = empirical_r_interval(&farey_like::<f64>(40).unwrap(), (0.2, 0.8), 2.0).unwrap();
        assert!((r32 as f64 - r64).abs() < 0.02 * r64);
    }
}
