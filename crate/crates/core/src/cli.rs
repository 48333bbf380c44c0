//! The `gapforge` command line.
//!
//! Subcommands print CSV to stdout, or write it under `--out DIR` together
//! with a `<file>.manifest` recording how to regenerate it. Exit status is
//! 0 on success, 1 for usage errors and 2 for runtime failures.
//!
//! CSV headers:
//!
//! | file | columns |
//! |------|---------|
//! | `cells.csv` | `gamma_label_k, gamma_label_h, gamma_decimal_18, sequence` |
//! | `bench.csv` | `sequence_id, n, trials, mean, variance, normalized_mean` |
//! | `bench_trials.csv` | `sequence_id, n, trial, comparisons` |
//! | `exclusion.csv` | `sequence_id, n, trials, including_mean, including_normalized_mean, excluding_mean, excluding_normalized_mean, dropped_increments` |
//! | `step_<n>.csv` | `rank, gamma_label_k, gamma_label_h, gamma_decimal_18, mean, variance, normalized_mean, has_consensus_prefix, sequence` |
//! | `summary.csv` | `step, n, trials, cells, interval_in, interval_out, consensus, best_gamma_decimal_18, best_mean, best_normalized_mean, best_diverges` |
//! | `ciura_ranges.csv` | `position, increment, lo_k, lo_h, lo_decimal_18, hi_k, hi_h, hi_decimal_18` |
//!
//! Sequences inside a CSV field are space separated. An unbounded cell has
//! empty label columns and decimal `inf`. Floats are printed in shortest
//! round-trip form. A decimal ending in `?` was not pinned to 18 digits.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::error::Error;
use crate::exactroots::{
    ciura_increment_ranges, enumerate_cells, BoundaryGamma, Endpoint, GammaInterval, DISPLAY_DIGITS,
};
use crate::gapseq::{
    ciura_sequence, format_exact_rational, gamma_sequence, tokuda_sequence, truncate_for_size, Gamma,
    GapSequence,
};
use crate::searchpipe::{run_search, SearchConfig, SearchReport, StepReport};
use crate::sortbench::{run_bench_with, BenchResult, Fixture, TrialSet, Truncation};

/// Master seed used when neither `--seed` nor `GAPFORGE_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "gapforge", version, about = "Shellsort gap sequence research tool")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write CSV files and manifests into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a gap sequence, one increment per line, ascending.
    Gaps(GapsArgs),
    /// Enumerate every distinct truncated gamma-sequence on (lo, hi].
    Cells(CellsArgs),
    /// Average comparison counts of sequences on seeded random permutations.
    Bench(BenchArgs),
    /// Compare keeping against dropping increments above N/2.
    ExclusionStudy(ExclusionArgs),
    /// Run the stepwise narrowing search described by a config file.
    Search(SearchArgs),
    /// The gamma range reproducing each Ciura increment.
    CiuraRanges,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Gamma,
    Tokuda,
    Ciura,
}

#[derive(Args, Debug)]
pub struct GapsArgs {
    pub generator: Generator,
    /// Gamma value for the `gamma` generator: decimal or p/q, parsed exactly.
    pub value: Option<String>,
    /// Continue Ciura's sequence by h -> floor(9h/4).
    #[arg(long)]
    pub extended: bool,
    #[command(flatten)]
    pub bound: Bound,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Bound {
    /// Largest increment to print.
    #[arg(long)]
    pub limit: Option<u64>,
    /// Array size; keeps increments h with 2h <= N.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CellsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lo: String,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: String,
    /// Largest increment kept in each sequence.
    #[arg(long)]
    pub limit: u64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// tokuda, ciura, ciura-extended, gamma=<value>, or an explicit list
    /// such as 1,4,10,23. Repeatable.
    #[arg(long = "seq", required = true)]
    pub seqs: Vec<String>,
    /// Array sizes: a comma list, or log10:A..B for N = ceil(10^(k/10)), k = A..=B.
    #[arg(long)]
    pub n: String,
    /// Trial count, or `exhaustive` / `exhaustive-<n>` for all n! inputs.
    #[arg(long)]
    pub trials: String,
    #[arg(long, env = "GAPFORGE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also write per-trial comparison counts (bench_trials.csv; needs --out).
    #[arg(long)]
    pub per_trial: bool,
}

#[derive(Args, Debug)]
pub struct ExclusionArgs {
    /// Sequences to study; defaults to tokuda.
    #[arg(long = "seq")]
    pub seqs: Vec<String>,
    /// Same syntax as `bench --n`.
    #[arg(long)]
    pub n_grid: String,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, env = "GAPFORGE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Flat `key = value` file; see the searchpipe module for keys.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::GammaDomain(_)
            | Error::GammaParse(_)
            | Error::BoundaryDomain { .. }
            | Error::InvalidSequence(_)
            | Error::EmptyInterval
            | Error::Config(_) => CliError::Usage(e.to_string()),
            Error::UnrealizablePrefix(_) | Error::Unsorted { .. } | Error::Search { .. } => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Results per size, each holding one `(id, result)` per sequence.
type GridResults = Vec<(u64, Vec<(String, BenchResult)>)>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let command_line: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &command_line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, command_line: &[String]) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let ctx = Context { out: cli.out.clone(), command_line: command_line.to_vec() };
    pool.install(|| match &cli.command {
        Command::Gaps(a) => cmd_gaps(a),
        Command::Cells(a) => cmd_cells(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
        Command::ExclusionStudy(a) => cmd_exclusion_study(&ctx, a),
        Command::Search(a) => cmd_search(&ctx, a),
        Command::CiuraRanges => cmd_ciura_ranges(&ctx),
    })
}

struct Context {
    out: Option<PathBuf>,
    command_line: Vec<String>,
}

impl Context {
    /// Writes `body` to `<out>/<name>` plus its manifest, or to stdout.
    fn emit(&self, name: &str, body: &[u8], manifest: &RunManifest) -> CliResult<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(name);
                fs::write(&path, body)?;
                manifest.write_beside(&path)?;
                println!("wrote {}", path.display());
            }
            None => io::stdout().lock().write_all(body)?,
        }
        Ok(())
    }

    fn manifest(&self, config: Vec<(&str, String)>, master_seed: Option<u64>) -> RunManifest {
        RunManifest {
            command_line: self.command_line.clone(),
            config: config.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// How an output file was produced. Rendered as `# ` metadata lines
/// followed by `key = value` lines; for `search` those lines form a valid
/// config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: Vec<(String, String)>,
    pub master_seed: Option<u64>,
    pub version: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command: {}\n", self.command_line.join(" ")));
        s.push_str(&format!("# version: {}\n", self.version));
        s.push_str(&format!("# timestamp_unix: {}\n", self.timestamp_unix));
        if let Some(seed) = self.master_seed {
            if !self.config.iter().any(|(k, _)| k == "seed") {
                s.push_str(&format!("seed = {seed}\n"));
            }
        }
        for (k, v) in &self.config {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(OsString::from).unwrap_or_default();
        name.push(".manifest");
        output.with_file_name(name)
    }

    pub fn write_beside(&self, output: &Path) -> io::Result<()> {
        fs::write(Self::path_for(output), self.render())
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

fn cmd_gaps(a: &GapsArgs) -> CliResult<()> {
    let limit = a.bound.limit.or(a.bound.n).expect("clap enforces one bound");
    if a.generator != Generator::Gamma && a.value.is_some() {
        return Err(CliError::Usage("only the gamma generator takes a value".into()));
    }
    if a.extended && a.generator != Generator::Ciura {
        return Err(CliError::Usage("--extended applies to ciura only".into()));
    }
    let seq = match a.generator {
        Generator::Gamma => {
            let text = a.value.as_deref().ok_or_else(|| CliError::Usage("gamma needs a value".into()))?;
            gamma_sequence(&text.parse::<Gamma>()?, limit)
        }
        Generator::Tokuda => tokuda_sequence(limit),
        Generator::Ciura => ciura_sequence(limit, a.extended),
    };
    let seq = match a.bound.n {
        Some(n) => truncate_for_size(&seq, n),
        None => seq,
    };
    let mut out = io::stdout().lock();
    for h in seq.increments() {
        writeln!(out, "{h}")?;
    }
    Ok(())
}

/// `(k, h, decimal)` columns for an optional boundary label.
fn label_columns(label: Option<&BoundaryGamma>) -> [String; 3] {
    match label {
        Some(b) => [b.k().to_string(), b.h().to_string(), b.decimal(DISPLAY_DIGITS).to_string()],
        None => [String::new(), String::new(), "inf".to_string()],
    }
}

fn endpoint_columns(e: &Endpoint) -> [String; 3] {
    match e {
        Endpoint::Boundary(b) => label_columns(Some(b)),
        Endpoint::Rational(q) => [String::new(), String::new(), format_exact_rational(q)],
        Endpoint::Infinity => label_columns(None),
    }
}

fn cmd_cells(ctx: &Context, a: &CellsArgs) -> CliResult<()> {
    let interval = GammaInterval::parse(&a.lo, &a.hi)?;
    let cells = enumerate_cells(&interval, a.limit);
    let rows = cells.iter().map(|c| {
        let [k, h, d] = label_columns(c.label.as_ref());
        vec![k, h, d, c.sequence.joined()]
    });
    let body = csv_bytes(&["gamma_label_k", "gamma_label_h", "gamma_decimal_18", "sequence"], rows)?;
    let manifest = ctx.manifest(
        vec![("lo", a.lo.clone()), ("hi", a.hi.clone()), ("limit", a.limit.to_string())],
        None,
    );
    ctx.emit("cells.csv", &body, &manifest)
}

/// A sequence named on the command line, generated up to `n`.
pub fn sequence_from_spec(spec: &str, n: u64) -> crate::Result<(String, GapSequence)> {
    let spec = spec.trim();
    let seq = match spec {
        "tokuda" => tokuda_sequence(n),
        "ciura" => ciura_sequence(n, false),
        "ciura-extended" => ciura_sequence(n, true),
        _ => {
            if let Some(g) = spec.strip_prefix("gamma=") {
                let gamma: Gamma = g.parse()?;
                let seq = gamma_sequence(&gamma, n);
                return Ok((format!("gamma={gamma}"), seq));
            }
            let values = spec
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<u64>())
                .collect::<std::result::Result<Vec<u64>, _>>()
                .map_err(|_| Error::InvalidSequence(format!("unknown sequence {spec:?}")))?;
            let seq = GapSequence::explicit(values)?;
            let id = seq.increments().iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            return Ok((id, seq));
        }
    };
    Ok((seq.source().to_string(), seq))
}

/// Parses a comma list of sizes or `log10:A..B`, the grid
/// `N = ceil(10^(k/10))` for `k = A..=B`.
pub fn parse_n_grid(text: &str) -> crate::Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad size grid {text:?}"));
    let text = text.trim();
    let grid: Vec<u64> = if let Some(range) = text.strip_prefix("log10:") {
        let (a, b) = range.split_once("..").ok_or_else(bad)?;
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b || b > 180 {
            return Err(bad());
        }
        (a..=b).map(ceil_tenth_power).collect()
    } else {
        text.split(',')
            .map(|p| p.trim().replace('_', "").parse::<u64>().map_err(|_| bad()))
            .collect::<crate::Result<_>>()?
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(bad());
    }
    Ok(grid)
}

/// `ceil(10^(k/10))`, the smallest `N` with `N^10 >= 10^k`.
pub fn ceil_tenth_power(k: u32) -> u64 {
    let target = BigUint::from(10u32).pow(k);
    let mut n = 10f64.powf(k as f64 / 10.0).ceil() as u64;
    while n > 1 && BigUint::from(n - 1).pow(10) >= target {
        n -= 1;
    }
    while BigUint::from(n).pow(10) < target {
        n += 1;
    }
    n
}

enum TrialsArg {
    Count(u64),
    Exhaustive(Option<u64>),
}

fn parse_trials(text: &str) -> CliResult<TrialsArg> {
    let bad = || CliError::Usage(format!("bad --trials {text:?}"));
    match text.strip_prefix("exhaustive") {
        Some("") => Ok(TrialsArg::Exhaustive(None)),
        Some(rest) => {
            let n = rest.strip_prefix('-').and_then(|r| r.parse().ok()).ok_or_else(bad)?;
            Ok(TrialsArg::Exhaustive(Some(n)))
        }
        None => text.parse().map(TrialsArg::Count).map_err(|_| bad()),
    }
}

fn fixture_for(trials: &TrialsArg, n: u64, seed: u64) -> CliResult<Fixture> {
    Ok(match *trials {
        TrialsArg::Count(t) => Fixture::Random(TrialSet::new(seed, t, n)?),
        TrialsArg::Exhaustive(m) => {
            if m.is_some_and(|m| m != n) {
                return Err(CliError::Usage(format!("exhaustive-{} does not match n = {n}", m.unwrap())));
            }
            Fixture::exhaustive(n)?
        }
    })
}

/// Benchmarks every spec at every size; ids come from the specs.
fn bench_grid(
    specs: &[String],
    grid: &[u64],
    mut fixture: impl FnMut(u64) -> CliResult<Fixture>,
    truncation: Truncation,
) -> CliResult<GridResults> {
    let mut out = Vec::with_capacity(grid.len());
    for &n in grid {
        let named: Vec<(String, GapSequence)> =
            specs.iter().map(|s| sequence_from_spec(s, n)).collect::<crate::Result<_>>()?;
        let seqs: Vec<GapSequence> = named.iter().map(|(_, s)| s.clone()).collect();
        let results = run_bench_with(&seqs, &fixture(n)?, truncation)?;
        out.push((n, named.into_iter().map(|(id, _)| id).zip(results).collect()));
    }
    Ok(out)
}

fn cmd_bench(ctx: &Context, a: &BenchArgs) -> CliResult<()> {
    let grid = parse_n_grid(&a.n)?;
    let trials = parse_trials(&a.trials)?;
    if a.per_trial && ctx.out.is_none() {
        return Err(CliError::Usage("--per-trial needs --out".into()));
    }
    let table = bench_grid(&a.seqs, &grid, |n| fixture_for(&trials, n, a.seed), Truncation::HalfSize)?;

    let rows = table.iter().flat_map(|(n, results)| {
        results.iter().map(move |(id, r)| {
            vec![
                id.clone(),
                n.to_string(),
                r.fixture.count().to_string(),
                r.mean_comparisons.to_string(),
                r.variance.to_string(),
                r.normalized_mean.to_string(),
            ]
        })
    });
    let body = csv_bytes(&["sequence_id", "n", "trials", "mean", "variance", "normalized_mean"], rows)?;
    let manifest = ctx.manifest(
        vec![("seq", a.seqs.join(" ; ")), ("n", a.n.clone()), ("trials", a.trials.clone())],
        Some(a.seed),
    );
    ctx.emit("bench.csv", &body, &manifest)?;

    if a.per_trial {
        let rows = table.iter().flat_map(|(n, results)| {
            results.iter().flat_map(move |(id, r)| {
                r.per_trial
                    .iter()
                    .enumerate()
                    .map(move |(t, c)| vec![id.clone(), n.to_string(), t.to_string(), c.to_string()])
            })
        });
        let body = csv_bytes(&["sequence_id", "n", "trial", "comparisons"], rows)?;
        ctx.emit("bench_trials.csv", &body, &manifest)?;
    }
    Ok(())
}

fn cmd_exclusion_study(ctx: &Context, a: &ExclusionArgs) -> CliResult<()> {
    let grid = parse_n_grid(&a.n_grid)?;
    let specs = if a.seqs.is_empty() { vec!["tokuda".to_string()] } else { a.seqs.clone() };
    let fixture = |n| Ok(Fixture::Random(TrialSet::new(a.seed, a.trials, n)?));
    let including = bench_grid(&specs, &grid, fixture, Truncation::None)?;
    let excluding = bench_grid(&specs, &grid, fixture, Truncation::HalfSize)?;

    let mut rows = Vec::new();
    for ((n, inc), (_, exc)) in including.iter().zip(&excluding) {
        for ((id, i), (_, e)) in inc.iter().zip(exc) {
            let dropped: Vec<String> = i
                .gaps
                .iter()
                .filter(|h| !e.gaps.contains(h) && **h < *n)
                .map(u64::to_string)
                .collect();
            rows.push(vec![
                id.clone(),
                n.to_string(),
                a.trials.to_string(),
                i.mean_comparisons.to_string(),
                i.normalized_mean.to_string(),
                e.mean_comparisons.to_string(),
                e.normalized_mean.to_string(),
                dropped.join(" "),
            ]);
        }
    }
    let header = [
        "sequence_id",
        "n",
        "trials",
        "including_mean",
        "including_normalized_mean",
        "excluding_mean",
        "excluding_normalized_mean",
        "dropped_increments",
    ];
    let body = csv_bytes(&header, rows)?;
    let manifest = ctx.manifest(
        vec![("seq", specs.join(" ; ")), ("n_grid", a.n_grid.clone()), ("trials", a.trials.to_string())],
        Some(a.seed),
    );
    ctx.emit("exclusion.csv", &body, &manifest)
}

fn env_seed() -> CliResult<u64> {
    match std::env::var("GAPFORGE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("bad GAPFORGE_SEED {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Config lines that `SearchConfig::parse` reads back to the same config.
pub fn config_lines(c: &SearchConfig) -> Vec<(&'static str, String)> {
    let exact = |e: &Endpoint| match e {
        Endpoint::Rational(q) => format_exact_rational(q),
        other => other.to_string(),
    };
    let steps: Vec<String> = c.steps.iter().map(|s| format!("{}:{}", s.n_elements, s.trials)).collect();
    vec![
        ("lo", exact(c.initial_interval.lo())),
        ("hi", exact(c.initial_interval.hi())),
        ("steps", steps.join(", ")),
        ("top_t", c.top_t.to_string()),
        ("quorum", format!("{}/{}", c.quorum.0, c.quorum.1)),
        ("seed", c.master_seed.to_string()),
    ]
}

fn step_csv(report: &StepReport) -> CliResult<Vec<u8>> {
    let header = [
        "rank",
        "gamma_label_k",
        "gamma_label_h",
        "gamma_decimal_18",
        "mean",
        "variance",
        "normalized_mean",
        "has_consensus_prefix",
        "sequence",
    ];
    let rows = report.ranking.iter().enumerate().map(|(rank, &i)| {
        let (cell, r) = (&report.cells[i], &report.results[i]);
        let [k, h, d] = label_columns(cell.label.as_ref());
        vec![
            (rank + 1).to_string(),
            k,
            h,
            d,
            r.mean_comparisons.to_string(),
            r.variance.to_string(),
            r.normalized_mean.to_string(),
            cell.sequence.starts_with(&report.consensus).to_string(),
            cell.sequence.joined(),
        ]
    });
    csv_bytes(&header, rows)
}

fn summary_csv(report: &SearchReport) -> CliResult<Vec<u8>> {
    let header = [
        "step",
        "n",
        "trials",
        "cells",
        "interval_in",
        "interval_out",
        "consensus",
        "best_gamma_decimal_18",
        "best_mean",
        "best_normalized_mean",
        "best_diverges",
    ];
    let rows = report.steps.iter().map(|s| {
        let (cell, r) = s.best();
        vec![
            s.step.to_string(),
            s.n_elements.to_string(),
            s.trials.count.to_string(),
            s.cells.len().to_string(),
            s.interval_in.to_string(),
            s.interval_out.to_string(),
            s.consensus.joined(),
            label_columns(cell.label.as_ref())[2].clone(),
            r.mean_comparisons.to_string(),
            r.normalized_mean.to_string(),
            s.best_diverges.to_string(),
        ]
    });
    csv_bytes(&header, rows)
}

fn cmd_search(ctx: &Context, a: &SearchArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.config.display())))?;
    let mut config = SearchConfig::parse(&text, env_seed()?)?;
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    let report = run_search(&config)?;
    let ctx = Context {
        out: Some(ctx.out.clone().unwrap_or_else(|| PathBuf::from("."))),
        command_line: ctx.command_line.clone(),
    };
    let manifest = ctx.manifest(config_lines(&config), Some(config.master_seed));
    for step in &report.steps {
        eprintln!(
            "step {}: n = {}, {} cells, consensus {} -> {}",
            step.step,
            step.n_elements,
            step.cells.len(),
            step.consensus,
            step.interval_out
        );
        ctx.emit(&format!("step_{}.csv", step.step), &step_csv(step)?, &manifest)?;
    }
    ctx.emit("summary.csv", &summary_csv(&report)?, &manifest)?;
    println!("gamma = {}", report.gamma.decimal(DISPLAY_DIGITS));
    println!("sequence = {}", report.best_sequence);
    println!("final interval = {}", report.final_interval());
    Ok(())
}

fn cmd_ciura_ranges(ctx: &Context) -> CliResult<()> {
    let ranges = ciura_increment_ranges();
    let rows = ranges.rows.iter().enumerate().map(|(i, (h, iv))| {
        let [lk, lh, ld] = endpoint_columns(iv.lo());
        let [hk, hh, hd] = endpoint_columns(iv.hi());
        vec![(i + 1).to_string(), h.to_string(), lk, lh, ld, hk, hh, hd]
    });
    let header = ["position", "increment", "lo_k", "lo_h", "lo_decimal_18", "hi_k", "hi_h", "hi_decimal_18"];
    let body = csv_bytes(&header, rows)?;
    ctx.emit("ciura_ranges.csv", &body, &ctx.manifest(Vec::new(), None))?;
    match &ranges.intersection {
        None => eprintln!("intersection of all ranges: empty"),
        Some(iv) => eprintln!("intersection of all ranges: {iv}"),
    }
    Ok(())
}
