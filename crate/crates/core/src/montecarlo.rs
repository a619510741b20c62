//! Reproducible multi-replicate experiments.
//!
//! Replicate `i` samples with `Seed { master, stream: i }`. Per-replicate
//! statistics are nonnegative integers folded into integer accumulators, so
//! the merged totals, and therefore the report, do not depend on how the
//! replicates were scheduled across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{component_census, ComponentCensus};
use crate::degseq::{build_sequence, DegreeSequence, WindowParams, DEFAULT_NU_CAP};
use crate::error::{Error, Result};
use crate::generator::{sample, Seed};
use crate::stats::{chi_square_gof, wilson_interval, ChiSquare, IntMoments, Z95};
use crate::theory::{predict, PredictOptions, Prediction};

/// Cycle and line counts are tracked individually up to this length.
pub const DEFAULT_K_MAX: u32 = 10;
/// Goodness-of-fit buckets for the complement: `0, 1, 2, 3, >= 4`.
pub const COMPLEMENT_BUCKETS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSource {
    Explicit(DegreeSequence),
    Build {
        n: usize,
        rho1: f64,
        p2: f64,
        bulk_degree: u32,
    },
}

impl SequenceSource {
    fn resolve(&self) -> Result<(DegreeSequence, Option<usize>)> {
        match self {
            SequenceSource::Explicit(s) => Ok((s.clone(), None)),
            &SequenceSource::Build {
                n,
                rho1,
                p2,
                bulk_degree,
            } => {
                let b = build_sequence(n, rho1, p2, bulk_degree)?;
                Ok((b.sequence, b.parity_repair))
            }
        }
    }
}

/// Which optional report blocks to collect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Collect {
    pub census: bool,
    pub simplicity: bool,
    pub complement_histogram: bool,
}

impl Default for Collect {
    fn default() -> Self {
        Self {
            census: true,
            simplicity: true,
            complement_histogram: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: SequenceSource,
    pub replicates: u64,
    pub master_seed: u64,
    pub collect: Collect,
    /// Also report connectivity among simple samples (rejection).
    pub condition_on_simple: bool,
    /// Histogram and pmf range for the complement.
    pub x_max: usize,
    pub trunc_k: Option<u32>,
    pub k_max: u32,
    pub nu_cap: f64,
    /// Worker threads; `None` uses the global pool. Never changes results.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(source: SequenceSource, replicates: u64, master_seed: u64) -> Self {
        Self {
            source,
            replicates,
            master_seed,
            collect: Collect::default(),
            condition_on_simple: false,
            x_max: 50,
            trunc_k: None,
            k_max: DEFAULT_K_MAX,
            nu_cap: DEFAULT_NU_CAP,
            threads: None,
        }
    }
}

#[derive(Debug, Clone)]
struct Accumulator {
    replicates: u64,
    connected: u64,
    simple: u64,
    connected_and_simple: u64,
    cycles: Vec<IntMoments>,
    lines: Vec<IntMoments>,
    cycles_overflow: IntMoments,
    lines_overflow: IntMoments,
    line1_observed: u64,
    self_loops: IntMoments,
    multi_edges: IntMoments,
    complement: IntMoments,
    giant_size: IntMoments,
    deg3_outside_giant: IntMoments,
    other_outside_giant: IntMoments,
    complement_hist: Vec<u64>,
    complement_overflow: u64,
}

impl Accumulator {
    fn new(k_max: u32, x_max: usize) -> Self {
        Self {
            replicates: 0,
            connected: 0,
            simple: 0,
            connected_and_simple: 0,
            cycles: vec![IntMoments::default(); k_max as usize + 1],
            lines: vec![IntMoments::default(); k_max as usize + 1],
            cycles_overflow: IntMoments::default(),
            lines_overflow: IntMoments::default(),
            line1_observed: 0,
            self_loops: IntMoments::default(),
            multi_edges: IntMoments::default(),
            complement: IntMoments::default(),
            giant_size: IntMoments::default(),
            deg3_outside_giant: IntMoments::default(),
            other_outside_giant: IntMoments::default(),
            complement_hist: vec![0; x_max + 1],
            complement_overflow: 0,
        }
    }

    fn push(&mut self, c: &ComponentCensus) {
        let k_max = self.cycles.len() as u32 - 1;
        self.replicates += 1;
        let (conn, simple) = (c.is_connected(), c.is_simple());
        self.connected += u64::from(conn);
        self.simple += u64::from(simple);
        self.connected_and_simple += u64::from(conn && simple);
        for k in 1..=k_max {
            self.cycles[k as usize].push(c.cycles(k));
            self.lines[k as usize].push(c.lines(k));
        }
        let over = |m: &BTreeMap<u32, u64>| m.range(k_max + 1..).map(|(_, &v)| v).sum::<u64>();
        self.cycles_overflow.push(over(&c.cycle_counts));
        self.lines_overflow.push(over(&c.line_counts));
        self.line1_observed += c.lines(1);
        self.self_loops.push(c.self_loops);
        self.multi_edges.push(c.multi_edges);
        self.complement.push(c.complement);
        self.giant_size.push(c.giant_size);
        self.deg3_outside_giant.push(c.deg3_outside_giant);
        self.other_outside_giant.push(c.other_outside_giant);
        match self.complement_hist.get_mut(c.complement as usize) {
            Some(slot) => *slot += 1,
            None => self.complement_overflow += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.replicates += other.replicates;
        self.connected += other.connected;
        self.simple += other.simple;
        self.connected_and_simple += other.connected_and_simple;
        for (a, b) in self.cycles.iter_mut().zip(&other.cycles) {
            a.merge(b);
        }
        for (a, b) in self.lines.iter_mut().zip(&other.lines) {
            a.merge(b);
        }
        self.cycles_overflow.merge(&other.cycles_overflow);
        self.lines_overflow.merge(&other.lines_overflow);
        self.line1_observed += other.line1_observed;
        self.self_loops.merge(&other.self_loops);
        self.multi_edges.merge(&other.multi_edges);
        self.complement.merge(&other.complement);
        self.giant_size.merge(&other.giant_size);
        self.deg3_outside_giant.merge(&other.deg3_outside_giant);
        self.other_outside_giant.merge(&other.other_outside_giant);
        for (a, b) in self.complement_hist.iter_mut().zip(&other.complement_hist) {
            *a += b;
        }
        self.complement_overflow += other.complement_overflow;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frequency {
    pub successes: u64,
    pub trials: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub theory: Option<f64>,
}

impl Frequency {
    fn new(successes: u64, trials: u64, theory: Option<f64>) -> Self {
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, Z95);
        Self {
            successes,
            trials,
            frequency: successes as f64 / trials as f64,
            wilson_low,
            wilson_high,
            theory,
        }
    }

    /// Binomial standard error of the frequency.
    pub fn stderr(&self) -> f64 {
        (self.frequency * (1.0 - self.frequency) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalFrequency {
    /// Connected among the simple replicates.
    pub frequency: Frequency,
    pub acceptance_rate: f64,
    /// `P(connected and simple)` over all replicates.
    pub joint_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatEstimate {
    pub stat: String,
    pub mean: f64,
    pub stderr: f64,
    pub theory: Option<f64>,
    pub z: Option<f64>,
}

impl StatEstimate {
    fn new(stat: impl Into<String>, m: &IntMoments, theory: Option<f64>) -> Self {
        let (mean, stderr) = (m.mean(), m.stderr());
        let z = theory.and_then(|t| {
            if stderr > 0.0 {
                Some((mean - t) / stderr)
            } else if mean == t {
                Some(0.0)
            } else {
                None
            }
        });
        Self {
            stat: stat.into(),
            mean,
            stderr,
            theory,
            z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusMeans {
    pub cycles: BTreeMap<u32, f64>,
    pub lines: BTreeMap<u32, f64>,
    /// Mean total count of cycles (lines) longer than the tracked range.
    pub cycles_overflow: f64,
    pub lines_overflow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplementHistogram {
    /// Counts of `n - |C_max| = x` for `x` in `0..=x_max`.
    pub counts: Vec<u64>,
    pub overflow: u64,
    /// Counts on `0, 1, 2, 3, >= 4`.
    pub buckets: Vec<u64>,
    pub theory_buckets: Option<Vec<f64>>,
    pub chi_square: Option<ChiSquare>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub n: usize,
    pub ell: u64,
    pub replicates: u64,
    pub master_seed: u64,
    pub parity_repair: Option<usize>,
    pub window: WindowParams,
    /// Predictions from the finite-n window ratios; `null` outside `2 p2 < d`.
    pub prediction: Option<Prediction>,
    pub connectivity: Frequency,
    pub simplicity: Option<Frequency>,
    pub conditional_connectivity: Option<ConditionalFrequency>,
    pub statistics: Vec<StatEstimate>,
    pub census_means: Option<CensusMeans>,
    pub complement_histogram: Option<ComplementHistogram>,
    pub deg3_outside_giant_mean: f64,
    /// Always zero: degree-1 vertices cannot form a one-vertex line.
    pub line1_observed: u64,
}

impl EstimateReport {
    pub fn stat(&self, name: &str) -> Option<&StatEstimate> {
        self.statistics.iter().find(|s| s.stat == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

fn accumulate(seq: &DegreeSequence, cfg: &ExperimentConfig) -> Accumulator {
    let run = || {
        (0..cfg.replicates)
            .into_par_iter()
            .fold(
                || Accumulator::new(cfg.k_max, cfg.x_max),
                |mut acc, i| {
                    let g = sample(seq, Seed::new(cfg.master_seed, i));
                    let c = component_census(&g, seq).expect("sampled graph realizes its sequence");
                    acc.push(&c);
                    acc
                },
            )
            .reduce(
                || Accumulator::new(cfg.k_max, cfg.x_max),
                Accumulator::merge,
            )
    };
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EstimateReport> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidArgument(
            "replicates must be at least 1".into(),
        ));
    }
    let (seq, parity_repair) = cfg.source.resolve()?;
    let window = seq.window_params();
    let limit = window.to_limit_params_with_cap(cfg.nu_cap);
    let prediction = if limit.in_window() {
        let opts = PredictOptions {
            x_max: cfg.x_max,
            trunc_k: cfg.trunc_k,
            k_max: cfg.k_max,
            ..PredictOptions::default()
        };
        Some(predict(&limit, Some(&seq), &opts)?)
    } else {
        None
    };

    let acc = accumulate(&seq, cfg);
    let reps = acc.replicates;

    let conditional_connectivity = if cfg.condition_on_simple {
        if acc.simple == 0 {
            return Err(Error::ZeroAcceptedSamples { replicates: reps });
        }
        Some(ConditionalFrequency {
            frequency: Frequency::new(
                acc.connected_and_simple,
                acc.simple,
                prediction.as_ref().and_then(|p| p.p_connected_given_simple),
            ),
            acceptance_rate: acc.simple as f64 / reps as f64,
            joint_frequency: acc.connected_and_simple as f64 / reps as f64,
        })
    } else {
        None
    };

    let pr = prediction.as_ref();
    let nu = pr.map(|p| p.params.nu).filter(|nu| nu.is_finite());
    let mut statistics = Vec::new();
    for k in 1..=cfg.k_max {
        statistics.push(StatEstimate::new(
            format!("C{k}"),
            &acc.cycles[k as usize],
            pr.and_then(|p| p.lambda_cycles.get(&k).copied()),
        ));
    }
    for k in 2..=cfg.k_max {
        statistics.push(StatEstimate::new(
            format!("L{k}"),
            &acc.lines[k as usize],
            pr.and_then(|p| p.lambda_lines.get(&k).copied()),
        ));
    }
    statistics.push(StatEstimate::new("S", &acc.self_loops, nu.map(|v| v / 2.0)));
    statistics.push(StatEstimate::new(
        "M",
        &acc.multi_edges,
        nu.map(|v| v * v / 4.0),
    ));
    statistics.push(StatEstimate::new(
        "complement",
        &acc.complement,
        pr.map(|p| p.expected_complement),
    ));
    statistics.push(StatEstimate::new(
        "deg3_outside_giant",
        &acc.deg3_outside_giant,
        pr.map(|_| 0.0),
    ));
    statistics.push(StatEstimate::new(
        "other_outside_giant",
        &acc.other_outside_giant,
        pr.map(|_| 0.0),
    ));
    statistics.push(StatEstimate::new("giant_size", &acc.giant_size, None));

    let census_means = cfg.collect.census.then(|| CensusMeans {
        cycles: (1..=cfg.k_max)
            .map(|k| (k, acc.cycles[k as usize].mean()))
            .collect(),
        lines: (2..=cfg.k_max)
            .map(|k| (k, acc.lines[k as usize].mean()))
            .collect(),
        cycles_overflow: acc.cycles_overflow.mean(),
        lines_overflow: acc.lines_overflow.mean(),
    });

    let complement_histogram = cfg.collect.complement_histogram.then(|| {
        let mut buckets = vec![0u64; COMPLEMENT_BUCKETS];
        for (x, &c) in acc.complement_hist.iter().enumerate() {
            buckets[x.min(COMPLEMENT_BUCKETS - 1)] += c;
        }
        buckets[COMPLEMENT_BUCKETS - 1] += acc.complement_overflow;
        let theory_buckets = pr
            .filter(|p| p.complement_pmf.len() >= COMPLEMENT_BUCKETS - 1)
            .map(|p| {
                let head = &p.complement_pmf[..COMPLEMENT_BUCKETS - 1];
                let mut b = head.to_vec();
                b.push((1.0 - head.iter().sum::<f64>()).max(0.0));
                b
            });
        let chi_square = theory_buckets.as_ref().map(|t| chi_square_gof(&buckets, t));
        ComplementHistogram {
            counts: acc.complement_hist.clone(),
            overflow: acc.complement_overflow,
            buckets,
            theory_buckets,
            chi_square,
        }
    });

    Ok(EstimateReport {
        n: seq.n(),
        ell: seq.ell(),
        replicates: reps,
        master_seed: cfg.master_seed,
        parity_repair,
        window,
        connectivity: Frequency::new(acc.connected, reps, pr.map(|p| p.p_connected)),
        simplicity: cfg
            .collect
            .simplicity
            .then(|| Frequency::new(acc.simple, reps, pr.and_then(|p| p.p_simple))),
        conditional_connectivity,
        statistics,
        census_means,
        complement_histogram,
        deg3_outside_giant_mean: acc.deg3_outside_giant.mean(),
        line1_observed: acc.line1_observed,
        prediction,
    })
}

/// One CSV line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub stat: String,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
    pub theory: Option<f64>,
    pub z: Option<f64>,
}

impl SweepRow {
    fn from_frequency(n: usize, stat: &str, f: &Frequency) -> Self {
        let se = f.stderr();
        Self {
            n,
            stat: stat.into(),
            empirical: Some(f.frequency),
            stderr: Some(se),
            theory: f.theory,
            z: f.theory
                .filter(|_| se > 0.0)
                .map(|t| (f.frequency - t) / se),
        }
    }

    fn from_estimate(n: usize, e: &StatEstimate) -> Self {
        Self {
            n,
            stat: e.stat.clone(),
            empirical: Some(e.mean),
            stderr: Some(e.stderr),
            theory: e.theory,
            z: e.z,
        }
    }
}

pub const SWEEP_HEADER: &str = "n,stat,empirical,stderr,theory,z";
/// Statistics listed per `n` in a sweep, after the frequencies.
pub const SWEEP_STATS: [&str; 7] = ["C1", "C2", "L2", "L3", "S", "M", "complement"];

/// Runs the template once per `n`. The template's source must be
/// [`SequenceSource::Build`]; its `n` is replaced. Infeasible targets are
/// reported as an `infeasible_targets` row rather than aborting the sweep.
pub fn sweep(template: &ExperimentConfig, n_values: &[usize]) -> Result<Vec<SweepRow>> {
    if n_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("n values must be ascending".into()));
    }
    let SequenceSource::Build {
        rho1,
        p2,
        bulk_degree,
        ..
    } = template.source
    else {
        return Err(Error::InvalidArgument(
            "sweep needs build targets, not an explicit sequence".into(),
        ));
    };
    let mut rows = Vec::new();
    for &n in n_values {
        let mut cfg = template.clone();
        cfg.source = SequenceSource::Build {
            n,
            rho1,
            p2,
            bulk_degree,
        };
        let report = match run_experiment(&cfg) {
            Ok(r) => r,
            Err(Error::InfeasibleTargets(_)) => {
                rows.push(SweepRow {
                    n,
                    stat: "infeasible_targets".into(),
                    empirical: None,
                    stderr: None,
                    theory: None,
                    z: None,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        rows.push(SweepRow::from_frequency(
            n,
            "connected",
            &report.connectivity,
        ));
        if let Some(s) = &report.simplicity {
            rows.push(SweepRow::from_frequency(n, "simple", s));
        }
        if let Some(c) = &report.conditional_connectivity {
            rows.push(SweepRow::from_frequency(
                n,
                "connected_given_simple",
                &c.frequency,
            ));
        }
        for name in SWEEP_STATS {
            if let Some(e) = report.stat(name) {
                rows.push(SweepRow::from_estimate(n, e));
            }
        }
    }
    Ok(rows)
}

/// CSV with header `n,stat,empirical,stderr,theory,z`; missing values are empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.stat,
            cell(r.empirical),
            cell(r.stderr),
            cell(r.theory),
            cell(r.z)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(raw: &[i64]) -> SequenceSource {
        SequenceSource::Explicit(DegreeSequence::validate(raw).unwrap())
    }

    #[test]
    fn two_two_connectivity() {
        let cfg = ExperimentConfig::new(explicit(&[2, 2]), 30_000, 17);
        let r = run_experiment(&cfg).unwrap();
        let c = &r.connectivity;
        assert!(c.wilson_low <= 2.0 / 3.0 && 2.0 / 3.0 <= c.wilson_high);
        assert!(r.prediction.is_none());
        assert_eq!(r.line1_observed, 0);
    }

    #[test]
    fn single_replicate_is_reproducible() {
        let src = SequenceSource::Build {
            n: 500,
            rho1: 1.0,
            p2: 0.3,
            bulk_degree: 3,
        };
        let cfg = ExperimentConfig::new(src, 1, 2024);
        assert_eq!(
            run_experiment(&cfg).unwrap().to_json(),
            run_experiment(&cfg).unwrap().to_json()
        );
    }

    #[test]
    fn zero_replicates_rejected() {
        let cfg = ExperimentConfig::new(explicit(&[2, 2]), 0, 1);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn conditioning_with_no_simple_samples() {
        // [2, 2] is never simple
        let mut cfg = ExperimentConfig::new(explicit(&[2, 2]), 50, 1);
        cfg.condition_on_simple = true;
        assert_eq!(
            run_experiment(&cfg),
            Err(Error::ZeroAcceptedSamples { replicates: 50 })
        );
    }

    #[test]
    fn conditional_is_joint_over_simple() {
        let src = SequenceSource::Build {
            n: 400,
            rho1: 1.0,
            p2: 0.3,
            bulk_degree: 3,
        };
        let mut cfg = ExperimentConfig::new(src, 400, 5);
        cfg.condition_on_simple = true;
        let r = run_experiment(&cfg).unwrap();
        let c = r.conditional_connectivity.unwrap();
        let s = r.simplicity.unwrap();
        assert!((c.frequency.frequency - c.joint_frequency / s.frequency).abs() < 1e-12);
        assert_eq!(c.frequency.trials, s.successes);
        assert!((c.acceptance_rate - s.frequency).abs() < 1e-15);
    }

    #[test]
    fn sweep_shapes() {
        let src = SequenceSource::Build {
            n: 0,
            rho1: 5.0,
            p2: 0.9,
            bulk_degree: 3,
        };
        let cfg = ExperimentConfig::new(src, 10, 1);
        assert_eq!(
            sweep_csv(&sweep(&cfg, &[]).unwrap()),
            format!("{SWEEP_HEADER}\n")
        );
        let rows = sweep(&cfg, &[50]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].stat, "infeasible_targets");
        assert_eq!(
            sweep_csv(&rows).lines().nth(1),
            Some("50,infeasible_targets,,,,")
        );
        assert!(sweep(&cfg, &[100, 50]).is_err());
        let explicit_cfg = ExperimentConfig::new(explicit(&[2, 2]), 10, 1);
        assert!(sweep(&explicit_cfg, &[10]).is_err());
    }
}
