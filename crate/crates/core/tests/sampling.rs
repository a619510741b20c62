use std::collections::BTreeMap;

use cmlab::census::{explore_component, Components};
use cmlab::generator::{sample_pairing, Pairing};
use cmlab::oracle::exact_law;
use cmlab::stats::{chi_square_gof, chi_square_two_sample};
use cmlab::{build_sequence, component_census, sample, DegreeSequence, Seed};
use proptest::prelude::*;

const ALPHA: f64 = 0.001;

fn seq(raw: &[i64]) -> DegreeSequence {
    DegreeSequence::validate(raw).unwrap()
}

fn even_degrees() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..8, 1..60).prop_map(|mut v| {
        if v.iter().sum::<i64>() % 2 == 1 {
            v[0] += 1;
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn realized_degrees_match(raw in even_degrees(), master in any::<u64>(), stream in any::<u64>()) {
        let s = seq(&raw);
        let g = sample(&s, Seed::new(master, stream));
        let expected: Vec<u64> = s.degrees().iter().map(|&d| u64::from(d)).collect();
        prop_assert_eq!(g.realized_degrees(), expected);
        prop_assert!(component_census(&g, &s).is_ok());
    }
}

fn pairing_frequencies(raw: &[i64], master: u64, samples: u64) -> BTreeMap<Pairing, u64> {
    let s = seq(raw);
    let mut freq = BTreeMap::new();
    for i in 0..samples {
        *freq
            .entry(sample_pairing(&s, Seed::new(master, i)))
            .or_insert(0) += 1;
    }
    freq
}

#[test]
fn matchings_are_uniform() {
    for (master, raw) in [(2718, &[2, 2][..]), (2719, &[1, 1, 2])] {
        let freq = pairing_frequencies(raw, master, 30_000);
        assert_eq!(freq.len(), 3, "{raw:?}");
        let counts: Vec<u64> = freq.values().copied().collect();
        let chi = chi_square_gof(&counts, &[1.0 / 3.0; 3]);
        assert!(chi.passes(ALPHA), "{raw:?}: {chi:?}");
    }
}

/// Every census outcome's sampled frequency sits within 4 standard errors of
/// its exact probability.
#[test]
fn monte_carlo_agrees_with_exact_law() {
    const SAMPLES: u64 = 100_000;
    for raw in [
        &[2, 2][..],
        &[1, 1, 2],
        &[3, 3],
        &[1, 1, 1, 1, 2],
        &[1, 2, 3, 2],
        &[1, 1, 2, 2, 2],
    ] {
        let s = seq(raw);
        let law = exact_law(&s).unwrap();
        let mut seen = BTreeMap::new();
        for i in 0..SAMPLES {
            let c = component_census(&sample(&s, Seed::new(31, i)), &s).unwrap();
            *seen.entry(c.key()).or_insert(0u64) += 1;
        }
        for key in seen.keys() {
            assert!(
                law.joint_counts().contains_key(key),
                "{raw:?}: impossible {key}"
            );
        }
        for (key, &count) in law.joint_counts() {
            let p = count as f64 / law.total_matchings() as f64;
            let f = *seen.get(key).unwrap_or(&0) as f64 / SAMPLES as f64;
            let se = (p * (1.0 - p) / SAMPLES as f64).sqrt();
            assert!((f - p).abs() <= 4.0 * se, "{raw:?} {key}: {f} vs {p}");
        }
    }
}

fn size_bucket(size: u64, n: u64) -> usize {
    match size {
        0..=2 => 0,
        3 => 1,
        4..=5 => 2,
        6..=10 => 3,
        s if 2 * s <= n => 4,
        _ => 5,
    }
}

#[test]
fn exploration_component_size_matches_census() {
    const RUNS: u64 = 10_000;
    let s = build_sequence(400, 1.0, 0.3, 3).unwrap().sequence;
    let n = s.n() as u64;
    for start in [0, s.n() - 1] {
        let mut explored = [0u64; 6];
        let mut sampled = [0u64; 6];
        for i in 0..RUNS {
            let seed = Seed::new(77, i);
            let t = explore_component(&s, seed, start).unwrap();
            explored[size_bucket(t.discovered_vertices, n)] += 1;
            let comps = Components::of(&sample(&s, seed));
            sampled[size_bucket(comps.size_of(start), n)] += 1;
        }
        let chi = chi_square_two_sample(&explored, &sampled);
        assert!(
            chi.passes(ALPHA),
            "start {start}: {explored:?} vs {sampled:?}"
        );
    }
}
