//! Uniform random pairing of half-edges.
//!
//! Half-edges are laid out grouped by vertex (`0..d_0` belong to vertex 0,
//! the next `d_1` to vertex 1, ...). A uniform Fisher-Yates shuffle of that
//! layout followed by pairing positions `(2i, 2i+1)` yields each of the
//! `(l_n - 1)!!` perfect matchings with equal probability.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), which is seedable and
//! produces the same stream on every platform. The master seed keys the
//! generator and the replicate index selects an independent ChaCha stream.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};

/// `(master, stream)` fully determines every random draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// Multigraph with self-loops and parallel edges. Edges are stored as
/// `(min, max)` pairs with 0-based vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        if let Some(&(_, v)) = edges.iter().find(|&&(_, v)| v as usize >= n) {
            return Err(Error::InvalidArgument(format!(
                "edge endpoint {v} out of range for {n} vertices"
            )));
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Incidence count per vertex; a self-loop contributes 2.
    pub fn realized_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    /// One `u v` line per edge, 1-indexed.
    pub fn to_dump(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 12);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }

    /// Parses the `u v` dump. When `n` is not given it is the largest id seen.
    pub fn parse_dump(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max_id = 0u32;
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let mut it = t.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(format!("expected `u v`, got {t:?}")));
            };
            let parse = |s: &str| -> Result<u32> {
                match s.parse::<u32>() {
                    Ok(0) => Err(bad("vertex ids are 1-indexed".into())),
                    Ok(x) => Ok(x - 1),
                    Err(e) => Err(bad(format!("{s:?}: {e}"))),
                }
            };
            let (u, v) = (parse(a)?, parse(b)?);
            max_id = max_id.max(u.max(v) + 1);
            edges.push((u, v));
        }
        Self::new(n.unwrap_or(max_id as usize), edges)
    }
}

/// A perfect matching of half-edge ids, as `(min, max)` pairs sorted by the
/// smaller id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn to_multigraph(&self, seq: &DegreeSequence) -> Multigraph {
        let owner = half_edge_owners(seq);
        let edges = self
            .pairs
            .iter()
            .map(|&(a, b)| (owner[a], owner[b]))
            .collect::<Vec<_>>();
        Multigraph::new(seq.n(), edges).expect("owners are in range")
    }
}

pub fn half_edge_count(seq: &DegreeSequence) -> u64 {
    seq.ell()
}

/// Owner vertex of every half-edge, in the grouped layout.
pub fn half_edge_owners(seq: &DegreeSequence) -> Vec<u32> {
    let mut owner = Vec::with_capacity(seq.ell() as usize);
    for (v, &d) in seq.degrees().iter().enumerate() {
        owner.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    owner
}

/// The matching drawn by [`sample`] for the same seed, in half-edge form.
pub fn sample_pairing(seq: &DegreeSequence, seed: Seed) -> Pairing {
    let mut ids: Vec<usize> = (0..seq.ell() as usize).collect();
    ids.shuffle(&mut seed.rng());
    Pairing::from_pairs(ids.chunks_exact(2).map(|c| (c[0], c[1])))
}

/// Uniform configuration-model multigraph.
///
/// Shuffles owner labels directly; the permutation depends only on the
/// length and the random stream, so the edge multiset equals that of
/// `sample_pairing(seq, seed).to_multigraph(seq)`.
pub fn sample(seq: &DegreeSequence, seed: Seed) -> Multigraph {
    let mut owner = half_edge_owners(seq);
    owner.shuffle(&mut seed.rng());
    let edges = owner
        .chunks_exact(2)
        .map(|c| {
            if c[0] <= c[1] {
                (c[0], c[1])
            } else {
                (c[1], c[0])
            }
        })
        .collect();
    Multigraph { n: seq.n(), edges }
}
