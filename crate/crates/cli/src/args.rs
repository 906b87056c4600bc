use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rootcorr", version, about = "Roots and pair correlation of polynomial sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout; a `.meta.json` sidecar is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Reduce non-standard triples instead of failing.
    #[arg(long, global = true)]
    pub auto_reduce: bool,

    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tau_curve: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tau_seed: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub eps_deriv: f64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tau_pole: f64,
    #[arg(long, global = true, default_value_t = 2048)]
    pub n_grid: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Curve,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Arclength,
    Chord,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    #[value(name = "g")]
    G,
    #[value(name = "R")]
    R,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduce a triple "A ; B ; C" to standard form.
    Reduce {
        /// Triple text, or @path to read it from a file.
        #[arg(allow_hyphen_values = true)]
        triple: String,
    },
    /// Exact coefficients of H_0..H_m.
    Gen {
        #[arg(allow_hyphen_values = true)]
        triple: String,
        #[arg(long)]
        m: usize,
    },
    /// Roots of H_m, or of H_1⋯H_m with --product.
    Roots {
        #[arg(allow_hyphen_values = true)]
        triple: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "curve")]
        method: Method,
        #[arg(long)]
        product: bool,
        /// Label roots on the arc over this parameter interval.
        #[arg(long, value_parser = parse_pair)]
        interval: Option<(f64, f64)>,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        seed: Option<(f64, f64)>,
    },
    /// Sample the carrier curve B² = cA for c in [0, 4].
    Curve {
        #[arg(allow_hyphen_values = true)]
        triple: String,
        #[arg(long, default_value_t = 401)]
        levels: usize,
    },
    /// Tabulate the arc parametrization f(t) = h⁻¹(4cos²πt).
    Arc {
        #[arg(allow_hyphen_values = true)]
        triple: String,
        #[arg(long, value_parser = parse_pair)]
        interval: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        seed: Option<(f64, f64)>,
    },
    /// Pair-correlation statistics and limits.
    Paircorr {
        #[command(subcommand)]
        which: Paircorr,
    },
    /// Partial sums of Σσ(k)/k² and the endpoint experiment.
    Divergence {
        #[arg(long = "K", alias = "k", default_value_t = 1_000_000)]
        k: u64,
        /// Comma-separated interval margins a; J(a) = f([a, 1-a]).
        #[arg(long, value_delimiter = ',')]
        a_sequence: Option<Vec<f64>>,
        #[arg(long = "Q-values", alias = "q-values", value_delimiter = ',', default_value = "100,200,400,800")]
        q_values: Vec<usize>,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LambdaGrid {
    #[arg(long, default_value_t = 0.05)]
    pub lambda_step: f64,
    #[arg(long, default_value_t = 4.0)]
    pub lambda_max: f64,
}

#[derive(Subcommand, Debug)]
pub enum Paircorr {
    /// Interval statistic of the Farey-like set p/q, q ≤ Q.
    Farey {
        #[arg(long = "Q", alias = "q")]
        q: u32,
        #[arg(long, value_parser = parse_pair)]
        window: (f64, f64),
        /// Emit the finite-difference density instead of R.
        #[arg(long)]
        density: bool,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Arc statistic of the roots of H_1⋯H_n on J = f(I).
    Empirical {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_pair)]
        interval: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        seed: Option<(f64, f64)>,
        #[arg(long, value_enum, default_value = "arclength")]
        distance: Distance,
        #[arg(long)]
        density: bool,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Limiting density g (or R) on an interval, or on an arc with --triple.
    Closed {
        #[arg(long)]
        triple: Option<String>,
        #[arg(long, value_parser = parse_pair)]
        interval: Option<(f64, f64)>,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        seed: Option<(f64, f64)>,
        #[arg(long, value_enum, default_value = "g")]
        kind: CurveKind,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Closed-form g on J = [2-2cos πa, 2+2cos πa] for the class of (1, z-2, 1).
    Example4 {
        #[arg(long)]
        a: f64,
        /// Use sin(a) instead of sin(πa) in the summation bounds.
        #[arg(long)]
        literal_sina: bool,
        /// Use the prefactor 6/(πλ²cos πa) without the 1/π factor.
        #[arg(long)]
        no_inv_pi: bool,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Per-λ deviation between two curve CSV files (the second is the reference).
    Compare {
        first: PathBuf,
        reference: PathBuf,
        /// Restrict the maximum to λ in [lo, hi].
        #[arg(long, value_parser = parse_pair)]
        range: Option<(f64, f64)>,
    },
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'x,y', got '{s}'"))?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}
