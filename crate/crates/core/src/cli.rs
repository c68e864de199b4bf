//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::basis::{BasisSpec, DenominatorFamily, NumeratorFamily};
use crate::equioscillation::{analyze, DEFAULT_PEAK_TOL};
use crate::grid::{chebyshev_nodes, uniform_nodes, Grid};
use crate::minimax::{solve_minimax, ApproximationProblem, BisectionConfig};
use crate::poly_minimax::solve_poly_minimax;
use crate::signal_pipeline::{
    extract_features, load_segments, parse_samples, read_features_csv, separability_smoke_check, split,
    write_features_csv, Model, SplitSpec,
};
use crate::sine_model::{fit_sine_model, SineSearchSpace, TimeAxis};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  internal error
  2  usage error (unknown command or flag, bad flag value)
  3  I/O error (missing or unreadable file, unwritable output)
  4  invalid input data (unparseable samples, malformed JSON/CSV)
  5  solver failure (LP breakdown, no feasible start, iteration cap)

On failure a single line `error[<category>]: <message>` is written to
stderr, with category one of usage, io, input, solver, internal.";

#[derive(Parser, Debug)]
#[command(name = "ratmin", version, about = "Best uniform rational approximation by quasiconvex bisection")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// Seed for every random choice (currently the train/test shuffle).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress warnings and progress summaries.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rational minimax fit of type (n, m).
    Approx(ApproxArgs),
    /// Polynomial minimax fit of a given degree.
    Poly(PolyArgs),
    /// Alternation check of an error curve against a result file.
    Check(CheckArgs),
    /// Rational amplitude times sin(ωt + τ), brute force over (ω, τ).
    SineFit(SineArgs),
    /// Feature vectors for directories of segments, split into train/test.
    Features(FeatureArgs),
    /// Nearest-centroid accuracy of a train/test pair of feature files.
    Smoke(SmokeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum BuiltinFn {
    /// sqrt(|x - 0.25|)
    SqrtAbsShift,
    /// |x|
    Abs,
    /// exp(x)
    Exp,
    /// 0 for x < 0, 1 for x >= 0
    Step,
}

impl BuiltinFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            BuiltinFn::SqrtAbsShift => (x - 0.25).abs().sqrt(),
            BuiltinFn::Abs => x.abs(),
            BuiltinFn::Exp => x.exp(),
            BuiltinFn::Step => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum GridKind {
    Chebyshev,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum BasisKind {
    Monomial,
    Chebyshev,
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// Built-in target function.
    #[arg(long = "fn", value_enum, conflicts_with = "input", required_unless_present = "input")]
    function: Option<BuiltinFn>,
    /// Samples, one per line, placed on a uniform grid over the interval.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Interval c,d. Defaults to -1,1 for --fn and 0,len-1 for --input.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
    interval: Option<(f64, f64)>,
    /// Grid for --fn targets.
    #[arg(long, value_enum, default_value = "chebyshev")]
    grid: GridKind,
    /// Node count for --fn targets; default max(2000, 10(n+m+2)).
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Result file.
    #[arg(long, default_value = "result.json")]
    out: PathBuf,
    /// Per-node error curve, CSV with columns t,error.
    #[arg(long)]
    error_curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "monomial")]
    basis: BasisKind,
    /// Bisection tolerance on the deviation.
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    /// Denominator floor; default 1e-6·max|f| (at least 1e-12).
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long)]
    degree: usize,
    #[arg(long, value_enum, default_value = "monomial")]
    basis: BasisKind,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Result file from `approx` or `poly`.
    #[arg(long)]
    result: PathBuf,
    /// Error curve CSV (t,error).
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PEAK_TOL)]
    peak_tol: f64,
    /// Also write the report here; it is always printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SineSpaceArgs {
    /// Frequencies 1, 2, …, omega-max.
    #[arg(long, default_value_t = 15)]
    omega_max: usize,
    /// Comma-separated phases; accepts forms like 0.25pi, pi/4, 3pi/4, 0.785.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_angle, default_value = "0,0.25pi,0.5pi,0.75pi")]
    taus: Vec<f64>,
    /// Coordinate that ω multiplies.
    #[arg(long, value_enum, default_value = "normalized")]
    time_axis: TimeAxisArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum TimeAxisArg {
    Normalized,
    Native,
}

impl SineSpaceArgs {
    fn space(&self) -> Result<SineSearchSpace, Failure> {
        let time_axis = match self.time_axis {
            TimeAxisArg::Normalized => TimeAxis::Normalized,
            TimeAxisArg::Native => TimeAxis::Native,
        };
        let omegas = (1..=self.omega_max).map(|w| w as f64).collect();
        SineSearchSpace::new(omegas, self.taus.clone(), time_axis).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Args, Debug)]
struct SineArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    space: SineSpaceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModelArg {
    M1,
    M2,
}

#[derive(Args, Debug)]
struct FeatureArgs {
    /// LABEL=DIR, repeatable; each file in DIR is one segment.
    #[arg(long = "class", required = true, value_parser = parse_class)]
    classes: Vec<(String, PathBuf)>,
    #[arg(long, value_enum, default_value = "m1")]
    model: ModelArg,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Training fraction per class.
    #[arg(long, default_value_t = 0.75)]
    split: f64,
    /// Keep file order instead of shuffling within each class.
    #[arg(long)]
    no_shuffle: bool,
    #[command(flatten)]
    space: SineSpaceArgs,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_test: PathBuf,
}

#[derive(Args, Debug)]
struct SmokeArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

/// A failure with its exit category.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Input(String),
    Solver(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Input(_) => 4,
            Failure::Solver(_) => 5,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Input(_) => "input",
            Failure::Solver(_) => "solver",
            Failure::Internal(_) => "internal",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(s) | Failure::Io(s) | Failure::Input(s) | Failure::Solver(s) | Failure::Internal(s) => s,
        }
    }
}

impl From<crate::signal_pipeline::PipelineError> for Failure {
    fn from(e: crate::signal_pipeline::PipelineError) -> Self {
        use crate::signal_pipeline::PipelineError as P;
        let msg = e.to_string();
        match e {
            P::Io { .. } | P::EmptyDirectory(_) => Failure::Io(msg),
            P::Csv { ref source, .. } if source.is_io_error() => Failure::Io(msg),
            P::Segment { .. } => Failure::Solver(msg),
            P::InvalidFraction(_) => Failure::Usage(msg),
            _ => Failure::Input(msg),
        }
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (c, d) = s.split_once(',').ok_or("expected c,d")?;
    let c: f64 = c.trim().parse().map_err(|_| format!("bad number {c:?}"))?;
    let d: f64 = d.trim().parse().map_err(|_| format!("bad number {d:?}"))?;
    if !(c.is_finite() && d.is_finite() && c < d) {
        return Err(format!("interval [{c}, {d}] is empty"));
    }
    Ok((c, d))
}

/// `x`, `xpi`, `pi/k`, `xpi/k`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("bad angle {s:?}");
    let Some(pos) = s.find("pi") else {
        return s.parse().map_err(|_| bad());
    };
    let (coef, rest) = (&s[..pos], &s[pos + 2..]);
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let div = match rest.strip_prefix('/') {
        None if rest.is_empty() => 1.0,
        Some(k) => k.parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(coef * std::f64::consts::PI / div)
}

fn parse_class(s: &str) -> Result<(String, PathBuf), String> {
    let (label, dir) = s.split_once('=').ok_or("expected LABEL=DIR")?;
    if label.is_empty() || label.contains(',') {
        return Err(format!("bad class label {label:?}"));
    }
    Ok((label.to_string(), PathBuf::from(dir)))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

/// Grid and samples for a target.
fn load_target(t: &TargetArgs, min_nodes: usize) -> Result<(Grid, Vec<f64>), Failure> {
    let input = |e: crate::grid::GridError| Failure::Input(e.to_string());
    if let Some(path) = &t.input {
        let values = parse_samples(path, &read_text(path)?)?;
        let (c, d) = t.interval.unwrap_or((0.0, values.len().saturating_sub(1) as f64));
        let grid = uniform_nodes(c, d, values.len()).map_err(input)?;
        return Ok((grid, values));
    }
    let f = t.function.ok_or_else(|| Failure::Usage("one of --fn or --input is required".into()))?;
    let (c, d) = t.interval.unwrap_or((-1.0, 1.0));
    let nodes = t.nodes.unwrap_or(min_nodes.max(2000));
    let grid = match t.grid {
        GridKind::Chebyshev => chebyshev_nodes(c, d, nodes),
        GridKind::Uniform => uniform_nodes(c, d, nodes),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let values = grid.nodes().iter().map(|&x| f.eval(x)).collect();
    Ok((grid, values))
}

fn write_curve(path: &Path, curve: &[(f64, f64)]) -> Result<(), Failure> {
    let mut text = String::from("t,error\n");
    for (t, e) in curve {
        text.push_str(&format!("{t:?},{e:?}\n"));
    }
    write_text(path, &text)
}

fn read_curve(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,error" => {}
        _ => return Err(Failure::Input(format!("{}: header must be t,error", path.display()))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        match parsed {
            Some(p) => out.push(p),
            None => return Err(Failure::Input(format!("{}:{}: expected t,error", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn solver(e: impl std::fmt::Display) -> Failure {
    Failure::Solver(e.to_string())
}

fn numerator_family(b: BasisKind) -> (NumeratorFamily, DenominatorFamily) {
    match b {
        BasisKind::Monomial => (NumeratorFamily::Monomial, DenominatorFamily::Monomial),
        BasisKind::Chebyshev => (NumeratorFamily::ChebyshevT, DenominatorFamily::ChebyshevT),
    }
}

/// Fields shared by every result file; `check` needs only `n`, `m`, `z`.
#[derive(Debug, Serialize, Deserialize)]
struct ResultHead {
    n: usize,
    m: usize,
    z: f64,
}

fn bisection_config(eps: f64, delta: Option<f64>) -> Result<BisectionConfig, Failure> {
    let cfg = BisectionConfig { delta, ..BisectionConfig::default().with_epsilon(eps) };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(d) = delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Failure::Usage(format!("--delta must be positive, got {d}")));
        }
    }
    Ok(cfg)
}

fn cmd_approx(a: &ApproxArgs, quiet: bool) -> Result<(), Failure> {
    let (num, den) = numerator_family(a.basis);
    let basis = BasisSpec { numerator: num, denominator: den, n: a.n, m: a.m };
    let (grid, values) = load_target(&a.target, 10 * (a.n + a.m + 2))?;
    let cfg = bisection_config(a.eps, a.delta)?;
    let problem = ApproximationProblem::new(grid.clone(), values, basis).map_err(|e| Failure::Input(e.to_string()))?;
    let r = solve_minimax(&problem, &cfg).map_err(solver)?;
    let record = json!({
        "kind": "rational",
        "n": a.n,
        "m": a.m,
        "basis": r.basis,
        "interval": grid.interval(),
        "nodes": grid.len(),
        "interval_map": r.interval_map,
        "numerator": r.numerator,
        "denominator": r.denominator,
        "z": r.z,
        "max_deviation": r.max_deviation,
        "lower_bound": r.lower_bound,
        "initial_upper_bound": r.initial_upper_bound,
        "iterations": r.iterations,
        "epsilon": r.epsilon,
        "delta": r.delta,
        "fixed_sign": r.fixed_sign,
    });
    write_json(&a.output.out, &record)?;
    if let Some(path) = &a.output.error_curve {
        write_curve(path, &r.error_curve(&problem).map_err(solver)?)?;
    }
    if !quiet {
        eprintln!("({}, {}) z = {:e} after {} bisection steps", a.n, a.m, r.z, r.iterations);
    }
    Ok(())
}

fn cmd_poly(a: &PolyArgs, quiet: bool) -> Result<(), Failure> {
    let (family, _) = numerator_family(a.basis);
    let (grid, values) = load_target(&a.target, 10 * (a.degree + 1))?;
    let p = solve_poly_minimax(&values, &grid, a.degree, family).map_err(solver)?;
    let record = json!({
        "kind": "polynomial",
        "n": a.degree,
        "m": 0,
        "family": p.family,
        "interval": grid.interval(),
        "nodes": grid.len(),
        "interval_map": p.interval_map,
        "numerator": p.coefficients,
        "denominator": [1.0],
        "z": p.z,
    });
    write_json(&a.output.out, &record)?;
    if let Some(path) = &a.output.error_curve {
        write_curve(path, &p.error_curve(&grid, &values))?;
    }
    if !quiet {
        eprintln!("degree {} z = {:e}", a.degree, p.z);
    }
    Ok(())
}

fn cmd_check(a: &CheckArgs) -> Result<(), Failure> {
    let head: ResultHead = serde_json::from_str(&read_text(&a.result)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.result.display())))?;
    let curve = read_curve(&a.curve)?;
    let report = analyze(&curve, head.n, head.m, head.z, a.peak_tol).map_err(|e| Failure::Input(e.to_string()))?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    if let Some(path) = &a.out {
        write_text(path, &(text.clone() + "\n"))?;
    }
    emit(&text)
}

fn cmd_sine(a: &SineArgs, quiet: bool) -> Result<(), Failure> {
    let space = a.space.space()?;
    let (grid, values) = load_target(&a.target, 10 * (a.n + a.m + 2))?;
    let cfg = bisection_config(a.eps, a.delta)?;
    let problem = ApproximationProblem::new(grid.clone(), values, BasisSpec::monomial(a.n, a.m))
        .map_err(|e| Failure::Input(e.to_string()))?;
    let r = fit_sine_model(&problem, &space, &cfg).map_err(solver)?;
    let record = json!({
        "kind": "sine",
        "n": a.n,
        "m": a.m,
        "omega": r.omega,
        "tau": r.tau,
        "time_axis": space.time_axis,
        "basis": r.best.basis,
        "interval": grid.interval(),
        "nodes": grid.len(),
        "interval_map": r.best.interval_map,
        "numerator": r.best.numerator,
        "denominator": r.best.denominator,
        "z": r.best.z,
        "max_deviation": r.best.max_deviation,
        "iterations": r.best.iterations,
        "z_grid": r.z_grid,
    });
    write_json(&a.output.out, &record)?;
    if let Some(path) = &a.output.error_curve {
        let inner = problem.with_basis(r.best.basis).map_err(solver)?;
        write_curve(path, &r.best.error_curve(&inner).map_err(solver)?)?;
    }
    if !quiet {
        eprintln!("omega = {}, tau = {}, z = {:e}", r.omega, r.tau, r.best.z);
    }
    Ok(())
}

fn cmd_features(a: &FeatureArgs, seed: u64, quiet: bool) -> Result<(), Failure> {
    let space = a.space.space()?;
    let cfg = bisection_config(a.eps, None)?;
    let model = match a.model {
        ModelArg::M1 => Model::M1,
        ModelArg::M2 => Model::M2,
    };
    let mut all = Vec::new();
    for (label, dir) in &a.classes {
        let set = load_segments(dir, label)?;
        if !quiet {
            eprintln!("class {label}: {} segments", set.len());
        }
        all.extend(extract_features(&set, model, a.n, a.m, &cfg, &space)?);
    }
    let spec = SplitSpec { train_fraction: a.split, seed, shuffle: !a.no_shuffle };
    let (train, test) = split(&all, &spec)?;
    write_features_csv(&a.out_train, &train)?;
    write_features_csv(&a.out_test, &test)?;
    if !quiet {
        eprintln!("{} train / {} test vectors", train.len(), test.len());
    }
    Ok(())
}

fn cmd_smoke(a: &SmokeArgs) -> Result<(), Failure> {
    let train = read_features_csv(&a.train)?;
    let test = read_features_csv(&a.test)?;
    let report = separability_smoke_check(&train, &test)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    emit(&text)
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let q = cli.quiet;
    let body = || match &cli.command {
        Command::Approx(a) => cmd_approx(a, q),
        Command::Poly(a) => cmd_poly(a, q),
        Command::Check(a) => cmd_check(a),
        Command::SineFit(a) => cmd_sine(a, q),
        Command::Features(a) => cmd_features(a, cli.seed, q),
        Command::Smoke(a) => cmd_smoke(a),
    };
    match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Internal(e.to_string()))?
            .install(body),
        None => body(),
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let rendered = e.to_string();
            let mut lines = rendered.lines();
            let first = lines.next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            let rest: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
            if !rest.is_empty() {
                eprintln!("{}", rest.join("\n"));
            }
            return 2;
        }
    };
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match dispatch(&cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            0
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.category(), f.message().replace('\n', " "));
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let mut argv = vec!["ratmin".to_string()];
        argv.extend(args.iter().map(|a| a.replace("{d}", dir.to_str().unwrap())));
        run(argv)
    }

    #[test]
    fn angles() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_angle("0.25pi").unwrap(), 0.25 * pi);
        assert_eq!(parse_angle("pi/4").unwrap(), pi / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * pi / 4.0);
        assert_eq!(parse_angle("-pi").unwrap(), -pi);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("x").is_err());
        assert!(parse_angle("pi4").is_err());
    }

    #[test]
    fn intervals() {
        assert_eq!(parse_interval("-1,1").unwrap(), (-1.0, 1.0));
        assert!(parse_interval("1,1").is_err());
        assert!(parse_interval("1").is_err());
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run(["ratmin", "badcmd"]), 2);
        assert_eq!(run(["ratmin", "approx", "--fn", "abs", "--n", "1", "--m", "1", "--bogus"]), 2);
        assert_eq!(run(["ratmin", "--help"]), 0);
    }

    #[test]
    fn approx_then_check() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let code = run_in(
            d,
            &[
                "-q",
                "approx",
                "--fn",
                "sqrt-abs-shift",
                "--n",
                "3",
                "--m",
                "3",
                "--interval",
                "-1,1",
                "--eps",
                "1e-5",
                "--out",
                "{d}/r.json",
                "--error-curve",
                "{d}/c.csv",
            ],
        );
        assert_eq!(code, 0);
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
        assert_eq!(r["n"], 3);
        assert_eq!(r["nodes"], 2000);
        assert!((r["z"].as_f64().unwrap() - 0.0788).abs() < 1e-3);
        let curve = fs::read_to_string(d.join("c.csv")).unwrap();
        assert!(curve.starts_with("t,error\n"));
        assert_eq!(curve.lines().count(), 2001);

        let code = run_in(d, &["check", "--result", "{d}/r.json", "--curve", "{d}/c.csv", "--out", "{d}/rep.json"]);
        assert_eq!(code, 0);
        let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("rep.json")).unwrap()).unwrap();
        assert_eq!(rep["alternation_count"], 8);
        assert_eq!(rep["verdict"], "CertifiedOptimal");
    }

    #[test]
    fn poly_with_samples_file() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let samples: String = (0..21).map(|k| format!("{}\n", (k as f64 - 10.0).abs())).collect();
        fs::write(d.join("s.txt"), samples).unwrap();
        let code = run_in(d, &["-q", "poly", "--input", "{d}/s.txt", "--degree", "0", "--out", "{d}/p.json"]);
        assert_eq!(code, 0);
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("p.json")).unwrap()).unwrap();
        assert_eq!(r["z"], 5.0);
        assert_eq!(r["interval"], json!([0.0, 20.0]));
    }

    #[test]
    fn error_categories() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        assert_eq!(run_in(d, &["poly", "--input", "{d}/missing.txt", "--degree", "1", "--out", "{d}/p.json"]), 3);
        fs::write(d.join("bad.txt"), "1\nabc\n").unwrap();
        assert_eq!(run_in(d, &["poly", "--input", "{d}/bad.txt", "--degree", "1", "--out", "{d}/p.json"]), 4);
        // Too few nodes for (3, 3).
        assert_eq!(
            run_in(d, &["approx", "--fn", "abs", "--n", "3", "--m", "3", "--nodes", "20", "--out", "{d}/r.json"]),
            4
        );
        assert_eq!(
            run_in(d, &["approx", "--fn", "abs", "--n", "1", "--m", "1", "--eps", "0", "--out", "{d}/r.json"]),
            2
        );
        // A denominator floor no admissible B can reach.
        assert_eq!(
            run_in(d, &["approx", "--fn", "abs", "--n", "1", "--m", "1", "--delta", "1e300", "--out", "{d}/r.json"]),
            5
        );
    }

    #[test]
    fn sine_fit_reports_grid() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let samples: String =
            (0..200).map(|k| format!("{}\n", (5.0 * (-1.0 + 2.0 * k as f64 / 199.0)).sin())).collect();
        fs::write(d.join("s.txt"), samples).unwrap();
        let code = run_in(
            d,
            &[
                "-q",
                "--threads",
                "2",
                "sine-fit",
                "--input",
                "{d}/s.txt",
                "--interval",
                "-1,1",
                "--n",
                "0",
                "--m",
                "0",
                "--taus",
                "0,pi/4,pi/2,3pi/4",
                "--out",
                "{d}/s.json",
            ],
        );
        assert_eq!(code, 0);
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
        assert_eq!(r["omega"], 5.0);
        assert_eq!(r["tau"], 0.0);
        assert_eq!(r["z_grid"].as_array().unwrap().len(), 60);
    }

    #[test]
    fn features_and_smoke() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        for (label, level) in [("A", 1.0), ("B", 2.0)] {
            let cdir = d.join(label);
            fs::create_dir(&cdir).unwrap();
            for k in 0..8 {
                let text: String = (0..30).map(|i| format!("{}\n", level + 0.01 * ((i + k) % 3) as f64)).collect();
                fs::write(cdir.join(format!("seg{k:02}.txt")), text).unwrap();
            }
        }
        let args = [
            "-q",
            "--seed",
            "4",
            "features",
            "--class",
            "A={d}/A",
            "--class",
            "B={d}/B",
            "--model",
            "m1",
            "--n",
            "0",
            "--m",
            "0",
            "--out-train",
            "{d}/train.csv",
            "--out-test",
            "{d}/test.csv",
        ];
        assert_eq!(run_in(d, &args), 0);
        let train = fs::read_to_string(d.join("train.csv")).unwrap();
        assert!(train.starts_with("label,segment_id,f1\n"));
        assert_eq!(train.lines().count(), 1 + 12);
        assert_eq!(fs::read_to_string(d.join("test.csv")).unwrap().lines().count(), 1 + 4);
        assert_eq!(run_in(d, &args), 0);
        assert_eq!(fs::read_to_string(d.join("train.csv")).unwrap(), train);
        assert_eq!(run_in(d, &["smoke", "--train", "{d}/train.csv", "--test", "{d}/test.csv"]), 0);
        assert_eq!(run_in(d, &["features", "--class", "A={d}/none", "--out-train", "x", "--out-test", "y"]), 3);
    }
}
