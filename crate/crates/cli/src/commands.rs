use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;

use num_complex::Complex;
use serde_json::json;

use rootcorr::arcmap::{ArcSpec, ArcTolerances};
use rootcorr::closedform::{divergence_partial, example_g, g_arc, g_interval, r_interval, ExampleVariant, Prefactor, SineBound};
use rootcorr::exactpoly::{class_invariant, to_standard_form, GenTriple};
use rootcorr::export::{fmt_f64, svg_scatter, ScatterStyle};
use rootcorr::genseq;
use rootcorr::paircorr::{
    empirical_r_arc, empirical_r_arc_curve, empirical_r_interval_curve, estimate_g, farey_like, lambda_grid, ArcDistance,
    ArcPoints, Kind, Normalization,
};
use rootcorr::quad::{integrate, QuadOptions};
use rootcorr::rootfind::{
    label_records, product_roots, roots_curve, roots_direct_member, sample_curve, RootRecord, RootSet,
};
use rootcorr::{Error, PairCorrCurve, RatFunc};

use crate::args::{Cli, Command, CurveKind, Distance, Format, Global, LambdaGrid, Method, Paircorr};
use crate::output::{emit, Meta, Tolerances};
use crate::Failure;

type C64 = Complex<f64>;

/// The Chebyshev class, used by the endpoint experiment.
const CHEBYSHEV_CLASS: &str = "1 ; z-2 ; 1";

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Reduce { triple } => reduce(g, triple),
        Command::Gen { triple, m } => gen(g, triple, *m),
        Command::Roots { triple, m, method, product, interval, seed } => {
            roots(g, triple, *m, *method, *product, *interval, *seed)
        }
        Command::Curve { triple, levels } => curve(g, triple, *levels),
        Command::Arc { triple, interval, seed } => arc(g, triple, *interval, *seed),
        Command::Paircorr { which } => paircorr(g, which),
        Command::Divergence { k, a_sequence, q_values, lambda } => {
            divergence(g, *k, a_sequence.as_deref(), q_values, *lambda)
        }
    }
}

fn read_triple_text(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

/// Parsed input, and the standard triple used for computation.
struct Loaded {
    input: GenTriple,
    standard: GenTriple,
    multiplier: Option<RatFunc>,
}

fn load(global: &Global, arg: &str) -> Result<Loaded, Failure> {
    let text = read_triple_text(arg)?;
    let input = GenTriple::parse(&text)?;
    if input.is_standard() {
        return Ok(Loaded { standard: input.clone(), input, multiplier: None });
    }
    if !global.auto_reduce {
        return Err(Error::NotStandard.into());
    }
    let (standard, e) = to_standard_form(&input)?;
    eprintln!("note: reduced to standard form {standard} (E = {e})");
    Ok(Loaded { input, standard, multiplier: Some(e) })
}

fn arc_tolerances(g: &Global) -> ArcTolerances {
    ArcTolerances {
        tau_curve: g.tau_curve,
        tau_seed: g.tau_seed,
        eps_deriv: g.eps_deriv,
        tau_pole: g.tau_pole,
        ..ArcTolerances::default()
    }
}

fn check_interval((a, b): (f64, f64)) -> Result<(), Failure> {
    if !(0.0 < a && a < b && b < 1.0) {
        return Err(Error::InvalidArgument(format!("interval {a},{b} must satisfy 0 < a < b < 1")).into());
    }
    Ok(())
}

/// Root of `B² = 4cos²(πt0)·A` with the largest real part (then imaginary part).
fn default_seed(t: &GenTriple, t0: f64) -> Result<C64, Failure> {
    let (a, b) = t.standard_polys()?;
    let a = rootcorr::ComplexPoly::from_exact(a)?;
    let b2 = rootcorr::ComplexPoly::from_exact(&b.pow(2))?;
    let c = 4.0 * (PI * t0).cos().powi(2);
    let p = b2.sub_scaled(C64::new(c, 0.0), &a);
    let roots = rootcorr::numpoly::roots_horner(&p, rootcorr::rootfind::TAU_ROOT)?;
    roots
        .into_iter()
        .max_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .ok_or_else(|| Error::Arc("no point of the curve over the interval start".into()).into())
}

fn build_arc(g: &Global, t: &GenTriple, interval: (f64, f64), seed: Option<(f64, f64)>) -> Result<ArcSpec, Failure> {
    check_interval(interval)?;
    let seed = match seed {
        Some((re, im)) => C64::new(re, im),
        None => default_seed(t, interval.0)?,
    };
    Ok(ArcSpec::build_with(t, interval, seed, g.n_grid, arc_tolerances(g))?)
}

fn grid(l: &LambdaGrid) -> Result<Vec<f64>, Failure> {
    if !(l.lambda_step > 0.0 && l.lambda_max >= l.lambda_step) {
        return Err(Error::InvalidArgument("need 0 < lambda-step <= lambda-max".into()).into());
    }
    Ok(lambda_grid(l.lambda_step, l.lambda_max))
}

fn meta(g: &Global, command: &str, triple: Option<&GenTriple>, params: serde_json::Value, counts: serde_json::Value) -> Meta {
    Meta {
        command: command.into(),
        triple: triple.map(|t| t.to_string()),
        params,
        tolerances: Tolerances::from_global(g),
        counts,
    }
}

fn unsupported(format: Format, command: &str) -> Failure {
    Error::InvalidArgument(format!("format {format:?} is not available for {command}")).into()
}

fn reduce(g: &Global, arg: &str) -> Result<(), Failure> {
    let input = GenTriple::parse(&read_triple_text(arg)?)?;
    let (standard, e) = to_standard_form(&input)?;
    let inv = class_invariant(&input);
    let body = match g.format.unwrap_or(Format::Text) {
        Format::Text => format!("standard: {standard}\nE: {e}\ninvariant: {inv}\n"),
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "input": input.to_string(),
                "input_is_standard": input.is_standard(),
                "standard": standard.to_string(),
                "E": e.to_string(),
                "invariant": inv.to_string(),
            }))
            .expect("json")
                + "\n"
        }
        f => return Err(unsupported(f, "reduce")),
    };
    let m = meta(g, "reduce", Some(&input), json!({}), json!({}));
    emit(g, &body, &m)
}

fn gen(g: &Global, arg: &str, m: usize) -> Result<(), Failure> {
    let l = load(g, arg)?;
    let seq = genseq::generate(&l.standard, m)?;
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => seq.to_csv(),
        Format::Json => {
            let items: Vec<_> = seq
                .items()
                .iter()
                .enumerate()
                .map(|(m, h)| json!({"m": m, "poly": h.to_string()}))
                .collect();
            serde_json::to_string_pretty(&json!({"triple": l.standard.to_string(), "items": items})).expect("json") + "\n"
        }
        f => return Err(unsupported(f, "gen")),
    };
    let total: usize = seq.items().iter().map(|h| h.coeffs().len()).sum();
    let md = meta(g, "gen", Some(&l.standard), json!({"m": m}), json!({"coefficients": total}));
    emit(g, &body, &md)
}

fn roots_csv(rows: &[(RootRecord, &str)]) -> String {
    let mut out = String::from("m,p,q,re,im,mult,method\n");
    for (r, method) in rows {
        let (p, q) = r.label.map_or((String::new(), String::new()), |(p, q)| (p.to_string(), q.to_string()));
        let _ = writeln!(out, "{},{p},{q},{},{},{},{method}", r.m, fmt_f64(r.z.re), fmt_f64(r.z.im), r.mult);
    }
    out
}

fn roots(
    g: &Global,
    arg: &str,
    m: usize,
    method: Method,
    product: bool,
    interval: Option<(f64, f64)>,
    seed: Option<(f64, f64)>,
) -> Result<(), Failure> {
    let l = load(g, arg)?;
    let t = &l.standard;
    let spec = match interval {
        Some(iv) => Some(build_arc(g, t, iv, seed)?),
        None => None,
    };
    let method_name = match method {
        Method::Direct => "direct",
        Method::Curve => "curve",
    };
    let mut sets: Vec<RootSet> = Vec::new();
    if m > 0 {
        match (method, product) {
            (Method::Curve, true) => sets.push(RootSet { roots: product_roots(t, m, spec.as_ref())?, degenerate: Vec::new() }),
            (Method::Curve, false) => sets.push(roots_curve(t, m, spec.as_ref())?),
            (Method::Direct, true) => {
                for k in 1..=m {
                    let mut s = roots_direct_member(t, k)?;
                    s.degenerate.clear();
                    sets.push(s);
                }
            }
            (Method::Direct, false) => sets.push(roots_direct_member(t, m)?),
        }
    }
    let mut rows: Vec<(RootRecord, &str)> = Vec::new();
    for s in sets {
        let mut rs = s.roots;
        if let (Method::Direct, Some(spec)) = (method, spec.as_ref()) {
            label_records(&mut rs, spec);
        }
        rows.extend(rs.into_iter().map(|r| (r, method_name)));
        if !s.degenerate.is_empty() {
            eprintln!(
                "warning: {} common zero(s) of A and B divide every H_m; reported as degenerate and excluded from statistics",
                s.degenerate.len()
            );
        }
        rows.extend(s.degenerate.into_iter().map(|r| (r, "degenerate")));
    }
    let count = rows.len();
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => roots_csv(&rows),
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(r, method)| {
                    json!({"m": r.m, "label": r.label, "re": r.z.re, "im": r.z.im, "mult": r.mult, "method": method})
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Svg => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|(r, _)| (r.z.re, r.z.im)).collect();
            let caption = if product {
                format!("Roots of H_1⋯H_{m} for {}", l.input)
            } else {
                format!("Roots of H_{m} for {}", l.input)
            };
            svg_scatter(&pts, &caption, &ScatterStyle::default())
        }
        f => return Err(unsupported(f, "roots")),
    };
    let md = meta(
        g,
        "roots",
        Some(t),
        json!({"m": m, "method": method_name, "product": product, "interval": interval, "seed": seed,
               "reduced_from": l.multiplier.as_ref().map(|_| l.input.to_string())}),
        json!({"records": count}),
    );
    emit(g, &body, &md)
}

fn curve(g: &Global, arg: &str, levels: usize) -> Result<(), Failure> {
    let l = load(g, arg)?;
    let samples = sample_curve(&l.standard, levels)?;
    let count: usize = samples.iter().map(|s| s.points.len()).sum();
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("c,re,im\n");
            for s in &samples {
                for z in &s.points {
                    let _ = writeln!(out, "{},{},{}", fmt_f64(s.c), fmt_f64(z.re), fmt_f64(z.im));
                }
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = samples
                .iter()
                .map(|s| json!({"c": s.c, "points": s.points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()}))
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Svg => {
            let pts: Vec<(f64, f64)> = samples.iter().flat_map(|s| s.points.iter().map(|z| (z.re, z.im))).collect();
            svg_scatter(&pts, &format!("Curve B² = cA, 0 ≤ c ≤ 4, for {}", l.input), &ScatterStyle::default())
        }
        f => return Err(unsupported(f, "curve")),
    };
    let md = meta(g, "curve", Some(&l.standard), json!({"levels": levels}), json!({"points": count}));
    emit(g, &body, &md)
}

fn arc(g: &Global, arg: &str, interval: (f64, f64), seed: Option<(f64, f64)>) -> Result<(), Failure> {
    let l = load(g, arg)?;
    let spec = build_arc(g, &l.standard, interval, seed)?;
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => spec.to_csv(),
        Format::Json => {
            let nodes: Vec<_> = spec
                .nodes()
                .iter()
                .map(|n| json!({"t": n.t, "re_f": n.z.re, "im_f": n.z.im, "fprime_mag": n.fprime_mag()}))
                .collect();
            serde_json::to_string_pretty(&json!({"arc_length": spec.arc_length(), "nodes": nodes})).expect("json") + "\n"
        }
        Format::Svg => {
            let pts: Vec<(f64, f64)> = spec.nodes().iter().map(|n| (n.z.re, n.z.im)).collect();
            svg_scatter(&pts, &format!("Arc f([{}, {}]) for {}", interval.0, interval.1, l.input), &ScatterStyle::default())
        }
        f => return Err(unsupported(f, "arc")),
    };
    let s = spec.seed();
    let md = meta(
        g,
        "arc",
        Some(&l.standard),
        json!({"interval": interval, "seed": [s.re, s.im]}),
        json!({"nodes": spec.nodes().len(), "arc_length": spec.arc_length()}),
    );
    emit(g, &body, &md)
}

fn curve_body(g: &Global, c: &PairCorrCurve, caption: &str) -> Result<String, Failure> {
    Ok(match g.format.unwrap_or(Format::Csv) {
        Format::Csv => c.to_csv(),
        Format::Json => serde_json::to_string_pretty(c).expect("json") + "\n",
        Format::Svg => {
            let pts: Vec<(f64, f64)> = c.lambdas.iter().copied().zip(c.values.iter().copied()).collect();
            let style = ScatterStyle {
                equal_aspect: false,
                x_label: "lambda".into(),
                y_label: c.kind.as_str().into(),
                ..ScatterStyle::default()
            };
            svg_scatter(&pts, caption, &style)
        }
        f => return Err(unsupported(f, "paircorr")),
    })
}

fn paircorr(g: &Global, which: &Paircorr) -> Result<(), Failure> {
    match which {
        Paircorr::Farey { q, window, density, grid: lg } => {
            check_interval(*window)?;
            let lambdas = grid(lg)?;
            let s = farey_like::<f64>(*q)?;
            let mut c = empirical_r_interval_curve(&s, *window, &lambdas)?;
            c.meta.q = Some(*q);
            if *density {
                c = estimate_g(&c)?;
            }
            let body = curve_body(g, &c, &format!("Farey-like set, Q = {q}, window [{}, {}]", window.0, window.1))?;
            let md = meta(
                g,
                "paircorr farey",
                None,
                json!({"Q": q, "window": window, "density": density, "lambda_step": lg.lambda_step, "lambda_max": lg.lambda_max}),
                json!({"N": c.meta.n, "n_window": c.meta.n_window, "normalization": c.meta}),
            );
            emit(g, &body, &md)
        }
        Paircorr::Empirical { triple, n, interval, seed, distance, density, grid: lg } => {
            let l = load(g, triple)?;
            check_interval(*interval)?;
            if interval.0.min(1.0 - interval.1) < 0.05 {
                eprintln!(
                    "warning: interval approaches an endpoint of the curve; the limiting pair correlation \
                     does not exist on the whole curve because Σσ(k)/k² diverges"
                );
            }
            let lambdas = grid(lg)?;
            let spec = build_arc(g, &l.standard, *interval, *seed)?;
            let recs = product_roots(&l.standard, *n, Some(&spec))?;
            let pts = ArcPoints::from_records(&recs, &spec)?;
            let dist = match distance {
                Distance::Arclength => ArcDistance::Arclength,
                Distance::Chord => ArcDistance::Chord,
            };
            let mut c = empirical_r_arc_curve(&pts, &lambdas, dist)?;
            c.meta.n_product = Some(*n);
            c.meta.window = Some(*interval);
            if *density {
                c = estimate_g(&c)?;
            }
            let body = curve_body(g, &c, &format!("Roots of H_1⋯H_{n} on f([{}, {}])", interval.0, interval.1))?;
            let md = meta(
                g,
                "paircorr empirical",
                Some(&l.standard),
                json!({"n": n, "interval": interval, "seed": [spec.seed().re, spec.seed().im],
                       "distance": format!("{distance:?}").to_lowercase(), "density": density,
                       "lambda_step": lg.lambda_step, "lambda_max": lg.lambda_max}),
                json!({"N_J": pts.len(), "l_J": spec.arc_length(), "normalization": c.meta}),
            );
            emit(g, &body, &md)
        }
        Paircorr::Closed { triple, interval, seed, kind, grid: lg } => {
            let lambdas = grid(lg)?;
            let (values, triple_used, l_j) = match triple {
                None => {
                    let f = match kind {
                        CurveKind::G => g_interval,
                        CurveKind::R => r_interval,
                    };
                    (lambdas.iter().map(|&x| f(x)).collect::<rootcorr::Result<Vec<_>>>()?, None, None)
                }
                Some(text) => {
                    let l = load(g, text)?;
                    let iv = interval.ok_or_else(|| Error::InvalidArgument("--triple needs --interval".into()))?;
                    let spec = build_arc(g, &l.standard, iv, *seed)?;
                    let gs = lambdas.iter().map(|&x| g_arc(&spec, x)).collect::<rootcorr::Result<Vec<_>>>()?;
                    let values = match kind {
                        CurveKind::G => gs,
                        CurveKind::R => cumulative_integral(|x| g_arc(&spec, x), &lambdas)?,
                    };
                    (values, Some(l.standard), Some(spec.arc_length()))
                }
            };
            let kind_tag = match kind {
                CurveKind::G => Kind::ClosedG,
                CurveKind::R => Kind::ClosedR,
            };
            let c = PairCorrCurve::new(
                lambdas,
                values,
                kind_tag,
                Normalization { window: *interval, l_j, normalization: "limit".into(), ..Normalization::default() },
            )?;
            let body = curve_body(g, &c, "Limiting pair correlation")?;
            let md = meta(
                g,
                "paircorr closed",
                triple_used.as_ref(),
                json!({"interval": interval, "kind": kind_tag.as_str(), "lambda_step": lg.lambda_step, "lambda_max": lg.lambda_max}),
                json!({"points": c.lambdas.len()}),
            );
            emit(g, &body, &md)
        }
        Paircorr::Example4 { a, literal_sina, no_inv_pi, grid: lg } => {
            let lambdas = grid(lg)?;
            let variant = ExampleVariant {
                bound: if *literal_sina { SineBound::SinA } else { SineBound::SinPiA },
                prefactor: if *no_inv_pi { Prefactor::NoInvPi } else { Prefactor::Derived },
            };
            let values = lambdas.iter().map(|&x| example_g(*a, x, variant)).collect::<rootcorr::Result<Vec<_>>>()?;
            let c = PairCorrCurve::new(
                lambdas,
                values,
                Kind::ClosedG,
                Normalization {
                    window: Some((*a, 1.0 - a)),
                    l_j: Some(4.0 * (PI * a).cos()),
                    normalization: "limit".into(),
                    ..Normalization::default()
                },
            )?;
            let body = curve_body(g, &c, &format!("Closed form on J = f([{a}, {}])", 1.0 - a))?;
            let md = meta(
                g,
                "paircorr example4",
                None,
                json!({"a": a, "literal_sina": literal_sina, "no_inv_pi": no_inv_pi,
                       "lambda_step": lg.lambda_step, "lambda_max": lg.lambda_max}),
                json!({"points": c.lambdas.len()}),
            );
            emit(g, &body, &md)
        }
        Paircorr::Compare { first, reference, range } => compare(g, first, reference, *range),
    }
}

/// `∫₀^λ f` at each grid node, accumulated panel by panel.
fn cumulative_integral<F: Fn(f64) -> rootcorr::Result<f64>>(f: F, lambdas: &[f64]) -> rootcorr::Result<Vec<f64>> {
    let opts = QuadOptions { rel_tol: 1e-9, abs_tol: 1e-13, ..QuadOptions::default() };
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        acc += integrate(|x| if x > 0.0 { f(x) } else { Ok(0.0) }, prev, l, &[], opts)?.value;
        out.push(acc);
        prev = l;
    }
    Ok(out)
}

fn compare(g: &Global, first: &std::path::Path, reference: &std::path::Path, range: Option<(f64, f64)>) -> Result<(), Failure> {
    let a = PairCorrCurve::from_csv(&fs::read_to_string(first)?)?;
    let b = PairCorrCurve::from_csv(&fs::read_to_string(reference)?)?;
    if a.lambdas.len() != b.lambdas.len() || a.lambdas.iter().zip(&b.lambdas).any(|(x, y)| (x - y).abs() > 1e-9) {
        return Err(Error::InvalidArgument("the two curves use different λ grids".into()).into());
    }
    let (lo, hi) = range.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut rows = Vec::new();
    let mut max_rel: f64 = 0.0;
    for ((&l, &x), &y) in a.lambdas.iter().zip(&a.values).zip(&b.values) {
        let abs = (x - y).abs();
        // a zero reference is judged by absolute deviation
        let rel = if y != 0.0 { abs / y.abs() } else { abs };
        if l >= lo - 1e-12 && l <= hi + 1e-12 {
            max_rel = max_rel.max(rel);
        }
        rows.push((l, x, y, abs, rel));
    }
    eprintln!("max relative deviation: {max_rel:.6e}");
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("lambda,value,reference,abs_dev,rel_dev\n");
            for (l, x, y, abs, rel) in &rows {
                let _ = writeln!(out, "{},{},{},{},{}", fmt_f64(*l), fmt_f64(*x), fmt_f64(*y), fmt_f64(*abs), fmt_f64(*rel));
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(l, x, y, abs, rel)| json!({"lambda": l, "value": x, "reference": y, "abs_dev": abs, "rel_dev": rel}))
                .collect();
            serde_json::to_string_pretty(&json!({"rows": v, "max_rel_dev": max_rel})).expect("json") + "\n"
        }
        f => return Err(unsupported(f, "paircorr compare")),
    };
    let md = meta(
        g,
        "paircorr compare",
        None,
        json!({"first": first.display().to_string(), "reference": reference.display().to_string(), "range": range}),
        json!({"rows": rows.len(), "max_rel_dev": max_rel}),
    );
    emit(g, &body, &md)
}

fn divergence(g: &Global, k: u64, a_seq: Option<&[f64]>, q_values: &[usize], lambda: f64) -> Result<(), Failure> {
    if k < 1 {
        return Err(Error::InvalidArgument("K must be at least 1".into()).into());
    }
    let mut ks: Vec<u64> = std::iter::successors(Some(1u64), |&x| x.checked_mul(10)).take_while(|&x| x <= k).collect();
    if ks.last() != Some(&k) {
        ks.push(k);
    }
    let sums = ks.iter().map(|&x| divergence_partial(x).map(|s| (x, s))).collect::<rootcorr::Result<Vec<_>>>()?;

    let mut table: Vec<(f64, usize, f64)> = Vec::new();
    if let Some(a_seq) = a_seq {
        let t = GenTriple::parse(CHEBYSHEV_CLASS)?;
        for &a in a_seq {
            if !(a > 0.0 && a < 0.5) {
                return Err(Error::InvalidArgument(format!("a = {a} must lie in (0, 1/2)")).into());
            }
            let spec = build_arc(g, &t, (a, 1.0 - a), None)?;
            for &q in q_values {
                if q < 2 {
                    return Err(Error::InvalidArgument("Q must be at least 2".into()).into());
                }
                let recs = product_roots(&t, q - 1, Some(&spec))?;
                let pts = ArcPoints::from_records(&recs, &spec)?;
                table.push((a, q, empirical_r_arc(&pts, lambda, ArcDistance::Arclength)?));
            }
        }
    }

    let body = match g.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::from("K\tpartial_sum\n");
            for (x, s) in &sums {
                let _ = writeln!(out, "{x}\t{s:.12}");
            }
            if !table.is_empty() {
                let _ = writeln!(out, "\na\tQ\tR(lambda={lambda})");
                for (a, q, r) in &table {
                    let _ = writeln!(out, "{a}\t{q}\t{r:.6}");
                }
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("table,x,y,value\n");
            for (x, s) in &sums {
                let _ = writeln!(out, "partial_sum,{x},,{}", fmt_f64(*s));
            }
            for (a, q, r) in &table {
                let _ = writeln!(out, "empirical_R,{},{q},{}", fmt_f64(*a), fmt_f64(*r));
            }
            out
        }
        Format::Json => {
            let s: Vec<_> = sums.iter().map(|(x, s)| json!({"K": x, "partial_sum": s})).collect();
            let r: Vec<_> = table.iter().map(|(a, q, r)| json!({"a": a, "Q": q, "R": r})).collect();
            serde_json::to_string_pretty(&json!({"partial_sums": s, "lambda": lambda, "endpoint_table": r})).expect("json") + "\n"
        }
        f => return Err(unsupported(f, "divergence")),
    };
    let md = meta(
        g,
        "divergence",
        None,
        json!({"K": k, "a_sequence": a_seq, "Q_values": q_values, "lambda": lambda}),
        json!({"partial_sums": sums.len(), "table_rows": table.len()}),
    );
    emit(g, &body, &md)
}
