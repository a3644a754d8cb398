//! Command-line surface: emits CSV or JSON datasets for curves, spectra,
//! scaling functions, pointwise exponents, interval masses, and Monte-Carlo
//! reports.
//!
//! Exit codes: 0 success, 2 argument validation, 3 convergence or resource
//! limits.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use koch_core::{curve, dynamics, estimators, measure, Digit, Rational, SymbolicPoint};
use output::{num, rational_decimal, Format, Table};

const LAMBDA_RANGE: &str = "(1/6, 5/6)";

#[derive(Parser)]
#[command(name = "koch", version, about = "Generalized von Koch curves, measures, and spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Breakpoints of one construction generation
    Curve(CurveArgs),
    /// Multifractal spectrum of the limit function
    Spectrum(SpectrumArgs),
    /// Moment scaling function, its derivative, and its transform
    Tau(TauArgs),
    /// Pointwise exponent of an eventually periodic point
    Holder(HolderArgs),
    /// Measure of an interval
    Mass(MassArgs),
    /// Monte-Carlo digit and exponent statistics
    Mc(McArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Height parameter, strictly between 1/6 and 5/6
    #[arg(long, default_value_t = koch_core::CLASSIC_LAMBDA)]
    lambda: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the dataset to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Generation to emit (cap 13 unless KOCH_MAX_GEN overrides it)
    #[arg(long, default_value_t = 1)]
    gen: u32,
    /// Emit x as num/den instead of a decimal string
    #[arg(long)]
    exact: bool,
    /// Significant digits of the decimal x column
    #[arg(long, default_value_t = 17)]
    precision: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Exponent grid lo:hi:points; defaults to the spectrum support
    #[arg(long)]
    alpha_range: Option<RangeSpec>,
}

#[derive(Args)]
struct TauArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Single moment order
    #[arg(long, conflicts_with = "q_range")]
    q: Option<f64>,
    /// Moment grid lo:hi:points
    #[arg(long)]
    q_range: Option<RangeSpec>,
}

#[derive(Args)]
struct HolderArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Digit word as "pre:<digits>,per:<digits>", digits over 0123
    #[arg(long)]
    point: String,
    /// Depth of the finite slope-walk estimate
    #[arg(long, default_value_t = 400)]
    depth: usize,
}

#[derive(Args)]
struct MassArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Left endpoint, as num/den or a decimal
    #[arg(long)]
    a: String,
    /// Right endpoint, as num/den or a decimal
    #[arg(long)]
    b: String,
    /// Unresolved-mass tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1000)]
    depth: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Inclusive grid "lo:hi:points" with at least two points.
#[derive(Clone)]
struct RangeSpec {
    lo: f64,
    hi: f64,
    points: usize,
}

impl RangeSpec {
    fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64).collect()
    }
}

impl FromStr for RangeSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:points, got {s:?}"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad lower bound {:?}", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad upper bound {:?}", parts[1]))?;
        let points: usize =
            parts[2].parse().map_err(|_| format!("bad point count {:?}", parts[2]))?;
        if !(hi > lo) {
            return Err(format!("need lo < hi, got {lo} and {hi}"));
        }
        if points < 2 {
            return Err(format!("need at least 2 points, got {points}"));
        }
        Ok(RangeSpec { lo, hi, points })
    }
}

struct CmdError {
    message: String,
    code: u8,
}

fn validation(message: impl Into<String>) -> CmdError {
    CmdError { message: message.into(), code: 2 }
}

impl From<koch_core::Error> for CmdError {
    fn from(e: koch_core::Error) -> CmdError {
        let code = match e.class() {
            koch_core::ErrorClass::Validation => 2,
            _ => 3,
        };
        CmdError { message: e.to_string(), code }
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> CmdError {
        CmdError { message: e.to_string(), code: 3 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn writer(common: &CommonArgs) -> Result<Box<dyn Write>, CmdError> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn check_lambda(lambda: f64) -> Result<(), CmdError> {
    if lambda > 1.0 / 6.0 && lambda < 5.0 / 6.0 {
        Ok(())
    } else {
        Err(validation(format!("--lambda out of range {LAMBDA_RANGE}: {lambda}")))
    }
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Curve(args) => cmd_curve(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Tau(args) => cmd_tau(args),
        Command::Holder(args) => cmd_holder(args),
        Command::Mass(args) => cmd_mass(args),
        Command::Mc(args) => cmd_mc(args),
    }
}

fn generation_cap() -> Result<u32, CmdError> {
    match std::env::var("KOCH_MAX_GEN") {
        Ok(raw) => raw
            .parse::<u32>()
            .map_err(|_| validation(format!("KOCH_MAX_GEN must be a nonnegative integer, got {raw:?}"))),
        Err(_) => Ok(curve::DEFAULT_GENERATION_CAP),
    }
}

fn cmd_curve(args: CurveArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    if args.precision == 0 {
        return Err(validation("--precision must be at least 1"));
    }
    let cap = generation_cap()?;
    let mut w = writer(&args.common)?;
    let fmt_x = |x: &Rational| -> String {
        if args.exact {
            x.to_string()
        } else {
            rational_decimal(x, args.precision)
        }
    };
    // breakpoints stream straight to the writer; generation 13 is tens of
    // millions of rows
    let mut io_err: Option<io::Error> = None;
    match args.common.format {
        Format::Csv => {
            writeln!(w, "x,y")?;
            curve::walk_breakpoints(args.common.lambda, args.gen, cap, |x, y| {
                if io_err.is_none() {
                    if let Err(e) = writeln!(w, "{},{}", fmt_x(x), y) {
                        io_err = Some(e);
                    }
                }
            })?;
        }
        Format::Json => {
            write!(
                w,
                "{{\"command\":\"curve\",\"meta\":{{\"lambda\":{},\"generation\":{}}},\"columns\":[\"x\",\"y\"],\"rows\":[",
                args.common.lambda, args.gen
            )?;
            let mut first = true;
            curve::walk_breakpoints(args.common.lambda, args.gen, cap, |x, y| {
                if io_err.is_none() {
                    let sep = if first { "" } else { "," };
                    first = false;
                    let row = json!([fmt_x(x), y]);
                    if let Err(e) = write!(w, "{sep}{row}") {
                        io_err = Some(e);
                    }
                }
            })?;
            writeln!(w, "]}}")?;
        }
    }
    if let Some(e) = io_err {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    let params = measure::ModelParams::solve(args.common.lambda)?;
    let amin = params.alpha_min();
    let flag = measure::spectrum_validity(args.common.lambda).to_string();
    let alphas = match &args.alpha_range {
        Some(range) => range.values(),
        None => RangeSpec { lo: amin, hi: 1.0, points: 201 }.values(),
    };
    let mut rows = Vec::new();
    for alpha in alphas {
        if let Some(d) = measure::spectrum(&params, alpha) {
            rows.push(vec![num(alpha), num(d), Value::from(flag.as_str())]);
        }
    }
    let table = Table {
        command: "spectrum",
        meta: vec![
            ("lambda", num(args.common.lambda)),
            ("gamma", num(params.gamma)),
            ("alpha_min", num(amin)),
            ("alpha_lebesgue", num(params.alpha_lebesgue())),
        ],
        columns: vec!["alpha", "d_f", "flag"],
        rows,
    };
    let mut w = writer(&args.common)?;
    table.write(args.common.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_tau(args: TauArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    let params = measure::ModelParams::solve(args.common.lambda)?;
    let qs = match (&args.q, &args.q_range) {
        (Some(q), None) => vec![*q],
        (None, Some(range)) => range.values(),
        (None, None) => RangeSpec { lo: -10.0, hi: 10.0, points: 81 }.values(),
        (Some(_), Some(_)) => unreachable!("clap forbids the combination"),
    };
    let rows = qs
        .iter()
        .map(|&q| {
            let s = measure::SpectrumSample::at(&params, q);
            vec![num(s.q), num(s.tau), num(s.alpha), num(s.tau_star)]
        })
        .collect();
    let table = Table {
        command: "tau",
        meta: vec![("lambda", num(args.common.lambda)), ("gamma", num(params.gamma))],
        columns: vec!["q", "tau", "alpha", "tau_star"],
        rows,
    };
    let mut w = writer(&args.common)?;
    table.write(args.common.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_point(raw: &str) -> Result<SymbolicPoint, CmdError> {
    let mut pre: Option<Vec<Digit>> = None;
    let mut per: Option<Vec<Digit>> = None;
    for part in raw.split(',') {
        let (key, val) = part
            .split_once(':')
            .ok_or_else(|| validation(format!("--point segment {part:?} is not key:digits")))?;
        let digits = val
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .and_then(|d| Digit::from_index(d as usize))
                    .ok_or_else(|| validation(format!("--point has invalid digit {c:?}")))
            })
            .collect::<Result<Vec<Digit>, CmdError>>()?;
        match key {
            "pre" => pre = Some(digits),
            "per" => per = Some(digits),
            other => return Err(validation(format!("--point has unknown key {other:?}"))),
        }
    }
    let per = per.ok_or_else(|| validation("--point needs a per: segment"))?;
    if per.is_empty() {
        return Err(validation("--point period must be nonempty"));
    }
    Ok(SymbolicPoint::new(pre.unwrap_or_default(), per))
}

fn cmd_holder(args: HolderArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    if args.depth < 10 {
        return Err(validation("--depth must be at least 10"));
    }
    let point = parse_point(&args.point)?;
    let (h, validity) = curve::holder_frequency(args.common.lambda, &point)?;
    let digits = point.digits(args.depth)?;
    let estimate = curve::holder_slope_estimate(args.common.lambda, &digits);
    let value = point.value()?;
    let class = format!("{:?}", dynamics::classify(&point)?);
    let table = Table {
        command: "holder",
        meta: vec![("lambda", num(args.common.lambda)), ("depth", Value::from(args.depth))],
        columns: vec!["point", "x", "h", "validity", "slope_estimate", "class"],
        rows: vec![vec![
            Value::from(args.point.as_str()),
            Value::from(value.to_string()),
            num(h),
            Value::from(validity.to_string()),
            num(estimate),
            Value::from(class),
        ]],
    };
    let mut w = writer(&args.common)?;
    table.write(args.common.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_rational(raw: &str, flag: &str) -> Result<Rational, CmdError> {
    let bad = |_| validation(format!("{flag} is not a rational or decimal: {raw:?}"));
    if let Some((n, d)) = raw.split_once('/') {
        let n: i64 = n.parse().map_err(bad)?;
        let d: i64 = d.parse().map_err(bad)?;
        return Rational::new(n, d).map_err(|e| validation(format!("{flag}: {e}")));
    }
    if let Some((int, frac)) = raw.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 18 {
            return Err(validation(format!("{flag} has too many decimals: {raw:?}")));
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(bad)? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(bad)? };
        let den = 10i64.pow(digits);
        return Rational::new(int * den + frac, den).map_err(|e| validation(format!("{flag}: {e}")));
    }
    let n: i64 = raw.parse().map_err(bad)?;
    Ok(Rational::from_int(n))
}

fn cmd_mass(args: MassArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    let a = parse_rational(&args.a, "--a")?;
    let b = parse_rational(&args.b, "--b")?;
    let params = measure::ModelParams::solve(args.common.lambda)?;
    let (mass, err) = measure::mass_of_interval(&params, &a, &b, args.tol)?;
    let table = Table {
        command: "mass",
        meta: vec![("lambda", num(args.common.lambda)), ("tol", num(args.tol))],
        columns: vec!["a", "b", "mass", "err"],
        rows: vec![vec![
            Value::from(a.to_string()),
            Value::from(b.to_string()),
            num(mass),
            num(err),
        ]],
    };
    let mut w = writer(&args.common)?;
    table.write(args.common.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_mc(args: McArgs) -> Result<(), CmdError> {
    check_lambda(args.common.lambda)?;
    if args.samples < 1 {
        return Err(validation("--samples must be at least 1"));
    }
    if args.depth < 1 {
        return Err(validation("--depth must be at least 1"));
    }
    let params = measure::ModelParams::solve(args.common.lambda)?;
    let r = estimators::monte_carlo_typical(&params, args.samples, args.depth, args.seed);
    let table = Table {
        command: "mc",
        meta: vec![
            ("lambda", num(args.common.lambda)),
            ("alpha_lebesgue", num(params.alpha_lebesgue())),
        ],
        columns: vec![
            "samples",
            "depth",
            "seed",
            "outer_mean",
            "outer_stddev",
            "inner_mean",
            "inner_stddev",
            "one_mean",
            "one_stddev",
            "two_mean",
            "two_stddev",
            "exponent_mean",
            "exponent_stddev",
        ],
        rows: vec![vec![
            Value::from(r.sample_count),
            Value::from(r.depth),
            Value::from(r.seed),
            num(r.outer_pair.mean),
            num(r.outer_pair.stddev),
            num(r.inner_pair.mean),
            num(r.inner_pair.stddev),
            num(r.digit_one.mean),
            num(r.digit_one.stddev),
            num(r.digit_two.mean),
            num(r.digit_two.stddev),
            num(r.exponent.mean),
            num(r.exponent.stddev),
        ]],
    };
    let mut w = writer(&args.common)?;
    table.write(args.common.format, &mut w)?;
    w.flush()?;
    Ok(())
}
