//! Exhaustive enumeration of half-edge pairings for tiny sequences.
//!
//! Every perfect matching of the `ell` half-edges is visited exactly once by
//! always pairing the lowest free half-edge with each remaining free one in
//! turn, so the visit count is `(ell - 1)!!`. Aggregates are kept as exact
//! integer counts and reported as exact rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::census::{component_census, CensusKey, Statistic};
use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::generator::{half_edge_owners, Multigraph, Pairing};
use crate::stats::falling_factorial;

/// Default largest total degree accepted (15!! = 2 027 025 matchings).
pub const DEFAULT_CAP: u64 = 16;
/// Half-edges are tracked in a 64-bit mask.
const MASK_BITS: u64 = 64;

/// Depth-first enumeration of perfect matchings on `0..ell`.
#[derive(Debug, Clone)]
pub struct Matchings {
    full: u64,
    used: u64,
    stack: Vec<(u8, u8)>,
    floor: usize,
    started: bool,
    done: bool,
}

impl Matchings {
    fn new(ell: usize) -> Self {
        debug_assert!(ell.is_multiple_of(2) && ell as u64 <= MASK_BITS);
        let full = if ell == 64 {
            u64::MAX
        } else {
            (1u64 << ell) - 1
        };
        Self {
            full,
            used: 0,
            stack: Vec::with_capacity(ell / 2),
            floor: 0,
            started: false,
            done: ell == 0,
        }
    }

    /// Only the matchings that pair half-edge 0 with `partner`.
    fn with_first_pair(ell: usize, partner: u8) -> Self {
        let mut m = Self::new(ell);
        m.used = 1 | (1u64 << partner);
        m.stack.push((0, partner));
        m.floor = 1;
        m
    }

    fn fill(&mut self) {
        while self.used != self.full {
            let a = (!self.used & self.full).trailing_zeros() as u8;
            self.used |= 1 << a;
            let b = (!self.used & self.full).trailing_zeros() as u8;
            self.used |= 1 << b;
            self.stack.push((a, b));
        }
    }

    fn advance(&mut self) -> bool {
        while self.stack.len() > self.floor {
            let (a, b) = self.stack.pop().expect("stack above floor");
            self.used &= !((1u64 << a) | (1u64 << b));
            let above_b = if b >= 63 { 0 } else { !((1u64 << (b + 1)) - 1) };
            let candidates = !self.used & self.full & above_b;
            if candidates != 0 {
                let c = candidates.trailing_zeros() as u8;
                self.used |= (1u64 << a) | (1u64 << c);
                self.stack.push((a, c));
                self.fill();
                return true;
            }
        }
        false
    }

    /// Next matching as `(a, b)` pairs with `a < b`, sorted by `a`.
    pub fn next_pairs(&mut self) -> Option<&[(u8, u8)]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(&self.stack)
    }
}

impl Iterator for Matchings {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        self.next_pairs()
            .map(|pairs| Pairing::from_pairs(pairs.iter().map(|&(a, b)| (a as usize, b as usize))))
    }
}

fn check_cap(seq: &DegreeSequence, cap: u64) -> Result<()> {
    let ell = seq.ell();
    if ell > cap || ell > MASK_BITS {
        return Err(Error::TooLarge {
            ell,
            cap: cap.min(MASK_BITS),
        });
    }
    Ok(())
}

/// All `(ell - 1)!!` matchings, with the default cap.
pub fn enumerate_matchings(seq: &DegreeSequence) -> Result<Matchings> {
    enumerate_matchings_with_cap(seq, DEFAULT_CAP)
}

pub fn enumerate_matchings_with_cap(seq: &DegreeSequence, cap: u64) -> Result<Matchings> {
    check_cap(seq, cap)?;
    Ok(Matchings::new(seq.ell() as usize))
}

/// `(ell - 1)!!`.
pub fn double_factorial_odd(ell: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = ell.saturating_sub(1);
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// Exact law of the census under a uniform pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLaw {
    total: u64,
    joint: BTreeMap<CensusKey, u64>,
}

impl ExactLaw {
    pub fn total_matchings(&self) -> u64 {
        self.total
    }

    /// Number of matchings per canonical census.
    pub fn joint_counts(&self) -> &BTreeMap<CensusKey, u64> {
        &self.joint
    }

    fn ratio(&self, count: BigInt) -> BigRational {
        BigRational::new(count, BigInt::from(self.total))
    }

    /// Probability of the set of censuses selected by `pred`.
    pub fn probability(&self, pred: impl Fn(&CensusKey) -> bool) -> BigRational {
        let hits: u64 = self
            .joint
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, &c)| c)
            .sum();
        self.ratio(BigInt::from(hits))
    }

    /// `P(stat = value)`.
    pub fn prob_eq(&self, stat: Statistic, value: u64) -> BigRational {
        self.probability(|k| k.get(stat) == value)
    }

    pub fn p_connected(&self) -> BigRational {
        self.prob_eq(Statistic::Connected, 1)
    }

    pub fn p_simple(&self) -> BigRational {
        self.prob_eq(Statistic::Simple, 1)
    }

    pub fn expectation(&self, stat: Statistic) -> BigRational {
        self.factorial_moment(&[(stat, 1)])
    }

    /// `E[prod (X_s)_{r_s}]` with `(x)_r` the falling factorial.
    pub fn factorial_moment(&self, spec: &[(Statistic, u32)]) -> BigRational {
        let mut acc = BigInt::zero();
        for (key, &count) in &self.joint {
            let mut term = BigInt::from(count);
            for &(stat, order) in spec {
                term *= BigInt::from(falling_factorial(key.get(stat), order));
                if term.is_zero() {
                    break;
                }
            }
            acc += term;
        }
        self.ratio(acc)
    }

    /// Statistics that are nonzero in some census, plus the scalar ones.
    pub fn statistics(&self) -> Vec<Statistic> {
        let mut stats: Vec<Statistic> = self
            .joint
            .keys()
            .flat_map(|k| k.0.iter().map(|&(s, _)| s))
            .collect();
        stats.sort_unstable();
        stats.dedup();
        stats
    }

    pub fn census_expectations(&self) -> BTreeMap<String, BigRational> {
        self.statistics()
            .into_iter()
            .map(|s| (s.to_string(), self.expectation(s)))
            .collect()
    }
}

/// `p/q` text form; integers keep the `/1`.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize)]
struct ExactLawJson {
    total_matchings: u64,
    p_connected: String,
    p_simple: String,
    census_expectations: BTreeMap<String, String>,
    joint_pmf: BTreeMap<String, String>,
}

impl Serialize for ExactLaw {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExactLawJson {
            total_matchings: self.total,
            p_connected: fmt_ratio(&self.p_connected()),
            p_simple: fmt_ratio(&self.p_simple()),
            census_expectations: self
                .census_expectations()
                .iter()
                .map(|(k, v)| (k.clone(), fmt_ratio(v)))
                .collect(),
            joint_pmf: self
                .joint
                .iter()
                .map(|(k, &c)| (k.to_string(), fmt_ratio(&self.ratio(BigInt::from(c)))))
                .collect(),
        }
        .serialize(s)
    }
}

pub fn exact_law(seq: &DegreeSequence) -> Result<ExactLaw> {
    exact_law_with_cap(seq, DEFAULT_CAP)
}

/// Runs the census on every matching; subtrees keyed by the partner of
/// half-edge 0 are enumerated in parallel and merged by exact addition.
pub fn exact_law_with_cap(seq: &DegreeSequence, cap: u64) -> Result<ExactLaw> {
    check_cap(seq, cap)?;
    let ell = seq.ell() as usize;
    let owner = half_edge_owners(seq);
    let subtrees: Vec<Result<BTreeMap<CensusKey, u64>>> = (1..ell as u8)
        .into_par_iter()
        .map(|partner| {
            let mut local = BTreeMap::new();
            let mut it = Matchings::with_first_pair(ell, partner);
            let mut edges = Vec::with_capacity(ell / 2);
            while let Some(pairs) = it.next_pairs() {
                edges.clear();
                edges.extend(
                    pairs
                        .iter()
                        .map(|&(a, b)| (owner[a as usize], owner[b as usize])),
                );
                let g = Multigraph::new(seq.n(), edges.iter().copied())?;
                let census = component_census(&g, seq)?;
                *local.entry(census.key()).or_insert(0u64) += 1;
            }
            Ok(local)
        })
        .collect();
    let mut joint = BTreeMap::new();
    for sub in subtrees {
        for (k, c) in sub? {
            *joint.entry(k).or_insert(0u64) += c;
        }
    }
    let total = joint.values().sum();
    debug_assert_eq!(BigInt::from(total), double_factorial_odd(seq.ell()));
    Ok(ExactLaw { total, joint })
}

/// `E[prod (X_s)_{r_s}]` over the exact law of `seq`.
pub fn exact_factorial_moment(
    seq: &DegreeSequence,
    spec: &[(Statistic, u32)],
) -> Result<BigRational> {
    Ok(exact_law(seq)?.factorial_moment(spec))
}
