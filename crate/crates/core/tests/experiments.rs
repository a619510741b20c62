use std::collections::BTreeMap;

use cmlab::montecarlo::{sweep, sweep_csv, SWEEP_HEADER};
use cmlab::{
    component_census, run_experiment, sample, DegreeSequence, ExperimentConfig, Seed,
    SequenceSource,
};
use proptest::prelude::*;

fn built(n: usize) -> SequenceSource {
    SequenceSource::Build {
        n,
        rho1: 1.0,
        p2: 0.3,
        bulk_degree: 3,
    }
}

#[test]
fn thread_count_does_not_change_report() {
    let mut cfg = ExperimentConfig::new(built(2_000), 300, 99);
    cfg.condition_on_simple = true;
    let mut reports = Vec::new();
    for threads in [1, 3, 8] {
        cfg.threads = Some(threads);
        reports.push(run_experiment(&cfg).unwrap().to_json());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn explicit_and_built_sources_agree() {
    let seq = cmlab::build_sequence(500, 1.0, 0.3, 3).unwrap().sequence;
    let a = run_experiment(&ExperimentConfig::new(built(500), 50, 4)).unwrap();
    let b = run_experiment(&ExperimentConfig::new(SequenceSource::Explicit(seq), 50, 4)).unwrap();
    assert_eq!(a.statistics, b.statistics);
    assert_eq!(a.connectivity, b.connectivity);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn census_sanity(n in 20usize..3_000, master in any::<u64>(), stream in any::<u64>()) {
        let seq: DegreeSequence = cmlab::build_sequence(n, 1.0, 0.3, 3).unwrap().sequence;
        let c = component_census(&sample(&seq, Seed::new(master, stream)), &seq).unwrap();
        prop_assert_eq!(c.is_connected(), c.complement == 0);
        prop_assert_eq!(c.lines(1), 0);
    }

    #[test]
    fn conditioning_consistency(n in 50usize..800, master in any::<u64>()) {
        let mut cfg = ExperimentConfig::new(built(n), 200, master);
        cfg.condition_on_simple = true;
        match run_experiment(&cfg) {
            Ok(r) => {
                let cond = r.conditional_connectivity.unwrap();
                let simple = r.simplicity.unwrap().frequency;
                prop_assert!((cond.frequency.frequency - cond.joint_frequency / simple).abs() <= 1e-12);
            }
            Err(e) => prop_assert_eq!(e, cmlab::Error::ZeroAcceptedSamples { replicates: 200 }),
        }
    }
}

#[test]
fn estimates_are_well_formed() {
    let mut cfg = ExperimentConfig::new(built(1_000), 200, 8);
    cfg.condition_on_simple = true;
    let r = run_experiment(&cfg).unwrap();
    for s in &r.statistics {
        assert!(s.stderr >= 0.0, "{}", s.stat);
    }
    let c = &r.connectivity;
    assert!(0.0 <= c.wilson_low && c.wilson_low <= c.frequency);
    assert!(c.frequency <= c.wilson_high && c.wilson_high <= 1.0);
    assert_eq!(r.line1_observed, 0);
    let hist = r.complement_histogram.unwrap();
    assert_eq!(hist.buckets.iter().sum::<u64>(), 200);
    let census = r.census_means.unwrap();
    assert_eq!(
        census.cycles.keys().copied().collect::<Vec<_>>(),
        (1..=10).collect::<Vec<_>>()
    );
}

/// Summed |empirical - theory| over the reported statistics, per n.
fn aggregate_error(csv: &str) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let (emp, theory): (f64, f64) = (cells[2].parse().unwrap(), cells[4].parse().unwrap());
        *out.entry(cells[0].parse().unwrap()).or_insert(0.0) += (emp - theory).abs();
    }
    out
}

#[test]
fn sweep_error_shrinks_with_n() {
    let n_values = [100, 1_000, 10_000];
    let mut per_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for master in [11, 12, 13] {
        let cfg = ExperimentConfig::new(built(0), 4_000, master);
        let csv = sweep_csv(&sweep(&cfg, &n_values).unwrap());
        assert!(csv.starts_with(SWEEP_HEADER));
        for (n, e) in aggregate_error(&csv) {
            per_n.entry(n).or_default().push(e);
        }
    }
    let medians: Vec<f64> = per_n
        .into_values()
        .map(|mut v| {
            v.sort_by(f64::total_cmp);
            v[1]
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}
