//! Command-line front end.
//!
//! Exit codes: 0 on success (including `--help`), 1 when the inputs fail
//! validation, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::census::{component_census, run_exploration, ComponentCensus, ExplorationTrace};
use crate::degseq::{
    build_sequence, parse_degree_file, parse_inline_counts, parse_inline_degrees, DegreeSequence,
    LimitParams, DEFAULT_NU_CAP,
};
use crate::error::{Error, Result};
use crate::generator::{sample, Multigraph, Seed};
use crate::montecarlo::{run_experiment, sweep, sweep_csv, ExperimentConfig, SequenceSource};
use crate::oracle::{exact_law_with_cap, DEFAULT_CAP};
use crate::theory::{predict, PredictOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cmlab",
    version,
    about = "Configuration-model connectivity lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one multigraph and print its edge list (`u v`, 1-indexed).
    Generate(GenerateArgs),
    /// Census of a graph file, optionally with an exploration trace.
    Analyze(AnalyzeArgs),
    /// Limiting predictions from parameters or a degree sequence.
    Theory(TheoryArgs),
    /// Exact joint law of the census by enumerating all pairings.
    Enumerate(EnumerateArgs),
    /// Monte Carlo estimates compared against theory.
    Simulate(SimulateArgs),
    /// Repeat `simulate` over several n and emit CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
#[group(id = "sequence", multiple = false)]
struct SequenceArgs {
    /// Inline degrees, e.g. `1,1,2`.
    #[arg(long)]
    degrees: Option<String>,
    /// Inline run-length `degree:count` pairs, e.g. `1:10,2:30,3:60`.
    #[arg(long)]
    counts: Option<String>,
    /// Degree file: one degree per line, or `degree count` per line.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl SequenceArgs {
    fn given(&self) -> bool {
        self.degrees.is_some() || self.counts.is_some() || self.file.is_some()
    }

    fn load(&self) -> Result<Option<DegreeSequence>> {
        if let Some(s) = &self.degrees {
            return parse_inline_degrees(s).map(Some);
        }
        if let Some(s) = &self.counts {
            return parse_inline_counts(s).map(Some);
        }
        if let Some(p) = &self.file {
            return parse_degree_file(&fs::read_to_string(p)?).map(Some);
        }
        Ok(None)
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Number of vertices for a built sequence.
    #[arg(long)]
    n: Option<usize>,
    /// Target `n1 / sqrt(n)`.
    #[arg(long)]
    rho1: Option<f64>,
    /// Target `n2 / n`.
    #[arg(long)]
    p2: Option<f64>,
    /// Degree of the remaining vertices.
    #[arg(long, default_value_t = 3)]
    bulk: u32,
}

/// A sequence given directly, or built from `--n --rho1 --p2 --bulk`.
#[derive(Debug, Args)]
struct SourceArgs {
    #[command(flatten)]
    sequence: SequenceArgs,
    #[command(flatten)]
    build: BuildArgs,
}

impl SourceArgs {
    fn source(&self) -> Result<SequenceSource> {
        if let Some(seq) = self.sequence.load()? {
            if self.build.n.is_some() || self.build.rho1.is_some() || self.build.p2.is_some() {
                return Err(Error::InvalidArgument(
                    "give either a degree sequence or --n/--rho1/--p2, not both".into(),
                ));
            }
            return Ok(SequenceSource::Explicit(seq));
        }
        match (self.build.n, self.build.rho1, self.build.p2) {
            (Some(n), Some(rho1), Some(p2)) => Ok(SequenceSource::Build {
                n,
                rho1,
                p2,
                bulk_degree: self.build.bulk,
            }),
            _ => Err(Error::InvalidArgument(
                "need --degrees, --counts, --file, or all of --n --rho1 --p2".into(),
            )),
        }
    }

    fn sequence(&self) -> Result<DegreeSequence> {
        match self.source()? {
            SequenceSource::Explicit(s) => Ok(s),
            SequenceSource::Build {
                n,
                rho1,
                p2,
                bulk_degree,
            } => Ok(build_sequence(n, rho1, p2, bulk_degree)?.sequence),
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Edge list as written by `generate`.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
    /// Also run the exploration from this vertex (0-based).
    #[arg(long)]
    start: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[command(flatten)]
    sequence: SequenceArgs,
    #[arg(long, conflicts_with = "sequence")]
    rho1: Option<f64>,
    #[arg(long, conflicts_with = "sequence")]
    p2: Option<f64>,
    #[arg(long, conflicts_with = "sequence")]
    d: Option<f64>,
    /// Omit for an infinite nu (simplicity entries become null).
    #[arg(long, conflicts_with = "sequence")]
    nu: Option<f64>,
    #[arg(long, default_value_t = 50)]
    x_max: usize,
    #[arg(long)]
    trunc_k: Option<u32>,
    #[arg(long, default_value_t = 10)]
    k_max: u32,
    #[arg(long, default_value_t = DEFAULT_NU_CAP)]
    nu_cap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    sequence: SequenceArgs,
    /// Largest total degree allowed.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 1000)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    condition_on_simple: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 50)]
    x_max: usize,
    #[arg(long)]
    trunc_k: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_NU_CAP)]
    nu_cap: f64,
}

impl ExperimentArgs {
    fn config(&self, source: SequenceSource) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(source, self.replicates, self.seed);
        cfg.condition_on_simple = self.condition_on_simple;
        cfg.threads = self.threads;
        cfg.x_max = self.x_max;
        cfg.trunc_k = self.trunc_k;
        cfg.nu_cap = self.nu_cap;
        cfg
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Ascending vertex counts, e.g. `100,1000,10000`; empty for none.
    #[arg(long, value_parser = parse_n_values)]
    n_values: NValues,
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    p2: f64,
    #[arg(long, default_value_t = 3)]
    bulk: u32,
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct NValues(Vec<usize>);

fn parse_n_values(s: &str) -> std::result::Result<NValues, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(NValues)
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    census: ComponentCensus,
    exploration: Option<ExplorationTrace>,
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn require_sequence(args: &SequenceArgs) -> Result<DegreeSequence> {
    args.load()?
        .ok_or_else(|| Error::InvalidArgument("need --degrees, --counts or --file".into()))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate(a) => {
            let seq = a.source.sequence()?;
            let g = sample(&seq, Seed::new(a.seed, a.stream));
            emit(&g.to_dump(), a.out.as_deref(), stdout)
        }
        Command::Analyze(a) => {
            let seq = a.source.sequence()?;
            let g = Multigraph::parse_dump(&fs::read_to_string(&a.graph)?, Some(seq.n()))?;
            let census = component_census(&g, &seq)?;
            let exploration = a
                .start
                .map(|v| run_exploration(&seq, Seed::new(a.seed, a.stream), v))
                .transpose()?;
            emit(
                &to_json(&AnalyzeReport {
                    census,
                    exploration,
                }),
                a.out.as_deref(),
                stdout,
            )
        }
        Command::Theory(a) => {
            let opts = PredictOptions {
                x_max: a.x_max,
                trunc_k: a.trunc_k,
                k_max: a.k_max,
                ..PredictOptions::default()
            };
            let prediction = if a.sequence.given() {
                let seq = require_sequence(&a.sequence)?;
                let p = seq.window_params().to_limit_params_with_cap(a.nu_cap);
                predict(&p, Some(&seq), &opts)?
            } else {
                let (Some(rho1), Some(p2), Some(d)) = (a.rho1, a.p2, a.d) else {
                    return Err(Error::InvalidArgument(
                        "need --rho1 --p2 --d (and optionally --nu), or a degree sequence".into(),
                    ));
                };
                let p = LimitParams::new(rho1, p2, d, a.nu.unwrap_or(f64::INFINITY))?;
                predict(&p, None, &opts)?
            };
            emit(&to_json(&prediction), a.out.as_deref(), stdout)
        }
        Command::Enumerate(a) => {
            let seq = require_sequence(&a.sequence)?;
            let law = exact_law_with_cap(&seq, a.cap)?;
            emit(&to_json(&law), a.out.as_deref(), stdout)
        }
        Command::Simulate(a) => {
            let cfg = a.experiment.config(a.source.source()?);
            let report = run_experiment(&cfg)?;
            emit(&to_json(&report), a.out.as_deref(), stdout)
        }
        Command::Sweep(a) => {
            let source = SequenceSource::Build {
                n: 0,
                rho1: a.rho1,
                p2: a.p2,
                bulk_degree: a.bulk,
            };
            let rows = sweep(&a.experiment.config(source), &a.n_values.0)?;
            emit(&sweep_csv(&rows), a.csv.as_deref(), stdout)
        }
    }
}

/// Runs with explicit output sinks. `args` includes the program name.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_VALIDATION
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
