//! Command-line front end: dataset ingestion, instance generation, coreset
//! building, evaluation and report emission.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use robust_coreset::coreset1d::{build_robust_1d_with, Robust1dConfig};
use robust_coreset::coreset_nd::{build_robust_kz, check_assumptions, AssumptionReport, NdCoresetConfig};
use robust_coreset::eval::{
    evaluate_builder, speedup_report, sweep_size_error, BuildContext, Builder, CenterBank, SpeedupRow, SweepTable,
    DEFAULT_CENTERS,
};
use robust_coreset::instances::{generate, Family, InstanceSpec};
use robust_coreset::solver::robust_median_1d;
use robust_coreset::{CoresetError, Dataset, Power, WeightedSet};
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => EXIT_INVALID,
            Self::Assumption(_) => EXIT_ASSUMPTION,
            Self::Io(_) => EXIT_IO,
        }
    }
}

impl From<CoresetError> for CliError {
    fn from(e: CoresetError) -> Self {
        match e {
            CoresetError::AssumptionViolation(msg) => Self::Assumption(msg),
            CoresetError::InvalidInput(msg) | CoresetError::InvalidParameters(msg) => Self::Invalid(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Write a synthetic instance.
    Generate,
    /// Build a coreset and write it with a weight column.
    Build,
    /// Empirical error of a coreset (built, or read with --coreset).
    Eval,
    /// Mean empirical error per builder and size.
    Sweep,
    /// Solver runtime on coresets versus the full data.
    Bench,
    /// Report the cluster-structure conditions at the reference centers.
    CheckAssumptions,
}

#[derive(Debug, Parser)]
#[command(name = "rcoreset", version, about = "Robust coresets for the geometric median and (k, z)-clustering")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Dataset CSV, one point per row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Destination file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Coreset CSV to evaluate instead of building one.
    #[arg(long)]
    pub coreset: Option<PathBuf>,
    /// Number of points for generate.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of outliers.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// Dimension for generate.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub z: u32,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Target coreset size.
    #[arg(long)]
    pub size: Option<usize>,
    /// Comma-separated target sizes for sweep and bench.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Builder, or a comma-separated list for sweep and bench.
    #[arg(long, value_delimiter = ',')]
    pub builder: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Seed for all randomness; drawn from system entropy when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled evaluation centers.
    #[arg(long, default_value_t = DEFAULT_CENTERS)]
    pub centers: usize,
    /// Build even when n < 4m.
    #[arg(long)]
    pub allow_small_n: bool,
    /// Build even when the cluster-structure conditions fail.
    #[arg(long)]
    pub allow_violations: bool,
    #[arg(long)]
    pub family: Option<String>,
    /// Fraction of points replaced by Cauchy noise.
    #[arg(long, default_value_t = 0.0)]
    pub contaminate: f64,
}

/// Validated parameters of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub coreset: Option<PathBuf>,
    pub n: Option<usize>,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub power: Power,
    pub eps: f64,
    pub builders: Vec<Builder>,
    pub size: Option<usize>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Whether the seed came from system entropy.
    pub seed_drawn: bool,
    pub centers: usize,
    pub allow_small_n: bool,
    pub allow_violations: bool,
    pub family: Option<Family>,
    pub contaminate: f64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let power = Power::from_exponent(cli.z).map_err(|_| CliError::Invalid(format!("--z must be 1 or 2, got {}", cli.z)))?;
        if !(cli.eps > 0.0 && cli.eps < 1.0) {
            return invalid(format!("--eps must lie in (0, 1), got {}", cli.eps));
        }
        if cli.k == 0 || cli.d == 0 {
            return invalid("--k and --d must be positive");
        }
        if cli.trials == 0 || cli.centers == 0 {
            return invalid("--trials and --centers must be positive");
        }
        if !(0.0..1.0).contains(&cli.contaminate) {
            return invalid(format!("--contaminate must lie in [0, 1), got {}", cli.contaminate));
        }
        if cli.size == Some(0) || cli.sizes.contains(&0) {
            return invalid("coreset sizes must be positive");
        }
        let builders = cli.builder.iter().map(|b| b.parse()).collect::<Result<Vec<Builder>, _>>()?;
        let family = cli.family.as_deref().map(str::parse).transpose()?;
        let (seed, seed_drawn) = match cli.seed {
            Some(s) => (s, false),
            None => (rand::random(), true),
        };
        let needs_input = !matches!(cli.command, Command::Generate);
        if needs_input && cli.input.is_none() {
            return invalid("--input is required");
        }
        match cli.command {
            Command::Generate if family.is_none() || cli.n.is_none() => return invalid("generate needs --family and --n"),
            Command::Sweep if cli.sizes.is_empty() || builders.is_empty() => {
                return invalid("sweep needs --sizes and --builder")
            }
            Command::Bench if builders.is_empty() => return invalid("bench needs --builder"),
            _ => {}
        }
        Ok(Self {
            command: cli.command,
            input: cli.input,
            output: cli.output,
            coreset: cli.coreset,
            n: cli.n,
            m: cli.m,
            d: cli.d,
            k: cli.k,
            power,
            eps: cli.eps,
            builders,
            size: cli.size,
            sizes: cli.sizes,
            trials: cli.trials,
            seed,
            seed_drawn,
            centers: cli.centers,
            allow_small_n: cli.allow_small_n,
            allow_violations: cli.allow_violations,
            family,
            contaminate: cli.contaminate,
        })
    }
}

/// A parsed CSV: points plus the header row when one was present.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub points: Dataset,
    pub header: Option<Vec<String>>,
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parse comma-separated reals, one point per row. A first row with a non-numeric
/// cell is taken as a header; blank lines and lines starting with `#` are skipped.
pub fn parse_csv(text: &str) -> CliResult<ParsedCsv> {
    let mut header = None;
    let mut dim = None;
    let mut coords = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Vec<Option<f64>> = cells.iter().map(|c| c.parse::<f64>().ok()).collect();
        if parsed.iter().any(Option::is_none) {
            if dim.is_none() && header.is_none() {
                header = Some(cells.iter().map(|c| c.to_string()).collect::<Vec<_>>());
                continue;
            }
            return invalid(format!("line {lineno}: non-numeric cell"));
        }
        let expected = *dim.get_or_insert(header.as_ref().map_or(cells.len(), Vec::len));
        if cells.len() != expected {
            return invalid(format!("line {lineno}: expected {expected} columns, found {}", cells.len()));
        }
        for v in parsed.into_iter().flatten() {
            if !v.is_finite() {
                return invalid(format!("line {lineno}: non-finite value"));
            }
            coords.push(v);
        }
        rows += 1;
    }
    let Some(dim) = dim.filter(|_| rows > 0) else {
        return invalid("no data rows");
    };
    Ok(ParsedCsv { points: Dataset::new(dim, coords)?, header })
}

pub fn parse_dataset(path: &Path) -> CliResult<Dataset> {
    Ok(parse_csv(&read_file(path)?)?.points)
}

/// Read a coreset file: coordinates followed by a final `weight` column.
pub fn parse_coreset(path: &Path) -> CliResult<WeightedSet> {
    let parsed = parse_csv(&read_file(path)?)?;
    if parsed.header.as_ref().and_then(|h| h.last()).map(String::as_str) != Some("weight") {
        return invalid(format!("{}: last column must be headed `weight`", path.display()));
    }
    let width = parsed.points.dim();
    if width < 2 {
        return invalid(format!("{}: need at least one coordinate column", path.display()));
    }
    let mut coords = Vec::with_capacity(parsed.points.len() * (width - 1));
    let mut weights = Vec::with_capacity(parsed.points.len());
    for row in parsed.points.rows() {
        coords.extend_from_slice(&row[..width - 1]);
        weights.push(row[width - 1]);
    }
    Ok(WeightedSet::new(Dataset::new(width - 1, coords)?, weights)?)
}

/// CSV text for `points`, with an optional weight column (17 significant digits).
pub fn points_csv(points: &Dataset, weights: Option<&[f64]>, comment: &str) -> String {
    let mut out = format!("# {comment}\n");
    let names: Vec<String> = (0..points.dim()).map(|j| format!("x{j}")).collect();
    out.push_str(&names.join(","));
    if weights.is_some() {
        out.push_str(",weight");
    }
    out.push('\n');
    for (i, row) in points.rows().enumerate() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        if let Some(w) = weights {
            let _ = write!(out, ",{:.16e}", w[i]);
        }
        out.push('\n');
    }
    out
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn one_dimensional_median(cfg: &RunConfig, points: &Dataset) -> bool {
    points.dim() == 1 && cfg.k == 1 && cfg.power == Power::One
}

/// Reference centers `C*`: the exact solver in 1D, outlier-aware Lloyd otherwise.
fn context(cfg: &RunConfig, points: Dataset) -> CliResult<BuildContext> {
    if cfg.m >= points.len() {
        return invalid(format!("need m < n (m = {}, n = {})", cfg.m, points.len()));
    }
    let mut ctx = if one_dimensional_median(cfg, &points) {
        let mut xs = points.as_flat().to_vec();
        xs.sort_by(f64::total_cmp);
        let reference = robust_median_1d(&xs, cfg.m)?.centers;
        BuildContext::with_reference(points, cfg.m, cfg.power, cfg.eps, reference)
    } else {
        BuildContext::new(points, cfg.m, cfg.k, cfg.power, cfg.eps, cfg.seed)?
    };
    ctx.allow_small_n = cfg.allow_small_n;
    Ok(ctx)
}

fn default_builder(cfg: &RunConfig, points: &Dataset) -> Builder {
    if one_dimensional_median(cfg, points) {
        Builder::Ours1d
    } else {
        Builder::OursNd
    }
}

fn enforce(report: &AssumptionReport, cfg: &RunConfig) -> CliResult<()> {
    if report.holds() || cfg.allow_violations {
        return Ok(());
    }
    Err(CliError::Assumption(report.violations(cfg.m, cfg.k).join("; ")))
}

/// Build with `builder`; without a target size our builders use their `eps` budgets.
fn build(cfg: &RunConfig, ctx: &BuildContext, builder: Builder) -> CliResult<WeightedSet> {
    match (builder, cfg.size) {
        (Builder::Ours1d, None) => {
            let Some(sorted) = &ctx.sorted else {
                return invalid("the 1D builder needs one-dimensional data");
            };
            if ctx.k != 1 || ctx.power != Power::One {
                return invalid("the 1D builder handles k = 1, z = 1 only");
            }
            let mut c = Robust1dConfig::new(cfg.eps);
            c.allow_small_n = cfg.allow_small_n;
            Ok(build_robust_1d_with(sorted, cfg.m, c)?.set)
        }
        (Builder::OursNd, size) => {
            let n = ctx.points.len();
            if n < 4 * cfg.m && !cfg.allow_small_n {
                return Err(CliError::Assumption(format!("n >= 4m does not hold (n = {n}, m = {})", cfg.m)));
            }
            let mut nd = NdCoresetConfig::new(cfg.eps, cfg.seed);
            if let Some(total) = size {
                nd = nd.for_total_size(total, n, cfg.m);
            }
            let cs = build_robust_kz(&ctx.points, cfg.m, &nd, &ctx.reference)?;
            enforce(&cs.assumptions, cfg)?;
            Ok(cs.set)
        }
        (b, Some(size)) => Ok(ctx.build(b, size, cfg.seed)?),
        (b, None) => invalid(format!("builder {b} needs --size")),
    }
}

fn single_builder(cfg: &RunConfig, points: &Dataset) -> CliResult<Builder> {
    match cfg.builders.as_slice() {
        [] => Ok(default_builder(cfg, points)),
        [b] => Ok(*b),
        _ => invalid("this command takes a single --builder"),
    }
}

fn input(cfg: &RunConfig) -> CliResult<Dataset> {
    parse_dataset(cfg.input.as_deref().expect("validated"))
}

fn cmd_generate(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let family = cfg.family.expect("validated");
    let mut spec = InstanceSpec::new(family, cfg.n.expect("validated"), cfg.m);
    spec.d = cfg.d;
    spec.k = cfg.k;
    spec.eps = cfg.eps;
    spec.seed = cfg.seed;
    spec.contamination = cfg.contaminate;
    let points = generate(&spec)?;
    let comment = format!("family={family} n={} m={} d={} seed={}", spec.n, spec.m, points.dim(), cfg.seed);
    emit(cfg, &points_csv(&points, None, &comment), stdout)
}

fn cmd_build(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let points = input(cfg)?;
    let builder = single_builder(cfg, &points)?;
    let ctx = context(cfg, points)?;
    let set = build(cfg, &ctx, builder)?;
    let comment = format!("builder={builder} m={} k={} z={} eps={} seed={}", cfg.m, cfg.k, cfg.power.exponent(), cfg.eps, cfg.seed);
    eprintln!("built {} points (total weight {})", set.len(), set.total_weight());
    emit(cfg, &points_csv(set.points(), Some(set.weights()), &comment), stdout)
}

#[derive(Debug, Serialize)]
struct EvalSummary {
    builder: String,
    size: usize,
    trials: usize,
    mean_error: f64,
    max_error: f64,
    seed: u64,
}

fn cmd_eval(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let points = input(cfg)?;
    if let Some(path) = &cfg.coreset {
        let set = parse_coreset(path)?;
        let mut errors = Vec::with_capacity(cfg.trials);
        for t in 0..cfg.trials {
            let bank = CenterBank::sample(&points, cfg.m, cfg.k, cfg.power, cfg.centers, cfg.seed.wrapping_add(t as u64))?;
            errors.push(bank.evaluate(&set)?.max_error);
        }
        let summary = EvalSummary {
            builder: "file".into(),
            size: set.len(),
            trials: cfg.trials,
            mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
            max_error: errors.iter().copied().fold(0.0, f64::max),
            seed: cfg.seed,
        };
        return emit(cfg, &json(&summary), stdout);
    }
    let builder = single_builder(cfg, &points)?;
    let ctx = context(cfg, points)?;
    let Some(size) = cfg.size else {
        return invalid("eval builds at --size, or reads --coreset");
    };
    let mut rows = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let ts = cfg.seed.wrapping_add(t as u64);
        let bank = CenterBank::sample(&ctx.points, cfg.m, cfg.k, cfg.power, cfg.centers, ts)?;
        rows.push(evaluate_builder(&ctx, &bank, builder, size, t, ts)?);
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.empirical_error).collect();
    let summary = EvalSummary {
        builder: builder.to_string(),
        size,
        trials: cfg.trials,
        mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
        max_error: errors.iter().copied().fold(0.0, f64::max),
        seed: cfg.seed,
    };
    let table = SweepTable { seed: cfg.seed, rows, means: Vec::new() };
    eprint!("{}", json(&summary));
    emit(cfg, &table.to_csv(), stdout)
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let ctx = context(cfg, input(cfg)?)?;
    let table = sweep_size_error(&ctx, &cfg.sizes, &cfg.builders, cfg.trials, cfg.centers, cfg.seed)?;
    eprint!("{}", json(&table.means));
    emit(cfg, &table.to_csv(), stdout)
}

fn cmd_bench(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let ctx = context(cfg, input(cfg)?)?;
    let sizes: Vec<usize> = match (cfg.sizes.as_slice(), cfg.size) {
        ([], Some(s)) => vec![s; cfg.builders.len()],
        (s, _) if s.len() == cfg.builders.len() => s.to_vec(),
        _ => return invalid("bench needs one --size, or one entry of --sizes per builder"),
    };
    let entries: Vec<(Builder, usize)> = cfg.builders.iter().copied().zip(sizes).collect();
    let rows = speedup_report(&ctx, &entries, cfg.seed, 3)?;
    let mut out = String::from(SpeedupRow::CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    emit(cfg, &out, stdout)
}

#[derive(Debug, Serialize)]
struct AssumptionSummary<'a> {
    #[serde(flatten)]
    report: &'a AssumptionReport,
    holds: bool,
    violations: Vec<String>,
    seed: u64,
}

fn cmd_check_assumptions(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let ctx = context(cfg, input(cfg)?)?;
    let report = check_assumptions(&ctx.points, &ctx.reference, cfg.m)?;
    let summary = AssumptionSummary {
        report: &report,
        holds: report.holds(),
        violations: report.violations(cfg.m, cfg.k),
        seed: cfg.seed,
    };
    emit(cfg, &json(&summary), stdout)?;
    if !report.holds() {
        return Err(CliError::Assumption(summary.violations.join("; ")));
    }
    Ok(())
}

/// Dispatch one validated command, writing artifacts to `--output` or `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    match cfg.command {
        Command::Generate => cmd_generate(cfg, stdout),
        Command::Build => cmd_build(cfg, stdout),
        Command::Eval => cmd_eval(cfg, stdout),
        Command::Sweep => cmd_sweep(cfg, stdout),
        Command::Bench => cmd_bench(cfg, stdout),
        Command::CheckAssumptions => cmd_check_assumptions(cfg, stdout),
    }
}

/// Parse `args`, run, and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|cfg| {
        if cfg.seed_drawn {
            eprintln!("seed: {} (drawn from system entropy)", cfg.seed);
        } else {
            eprintln!("seed: {}", cfg.seed);
        }
        run(&cfg, &mut io::stdout().lock())
    });
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
