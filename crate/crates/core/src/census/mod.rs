//! Component classification of a configuration-model multigraph.
//!
//! A *cycle of length k* is a component of `k` degree-2 vertices with `k`
//! edges; a degree-2 vertex carrying a self-loop is a cycle of length 1. A
//! *line of length k* is a path component with two degree-1 ends and `k - 2`
//! degree-2 interior vertices, so `L_1` is always zero. Both are counted over
//! every component, the largest one included.

mod exploration;
mod union_find;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::generator::Multigraph;

pub use exploration::{explore_component, run_exploration, ExplorationTrace, StopReason};
pub use union_find::UnionFind;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ComponentCensus {
    /// `k -> C_k`.
    pub cycle_counts: BTreeMap<u32, u64>,
    /// `k -> L_k`; never has key 1.
    pub line_counts: BTreeMap<u32, u64>,
    /// Number of self-loop edges.
    pub self_loops: u64,
    /// Sum over vertex pairs `u != v` of `C(m, 2)`, `m` the edge multiplicity.
    pub multi_edges: u64,
    pub giant_size: u64,
    /// `n - giant_size`.
    pub complement: u64,
    /// Vertices outside the giant in components that are neither cycles nor lines.
    pub other_outside_giant: u64,
    pub deg3_outside_giant: u64,
}

impl ComponentCensus {
    pub fn is_connected(&self) -> bool {
        self.complement == 0
    }

    pub fn is_simple(&self) -> bool {
        self.self_loops == 0 && self.multi_edges == 0
    }

    pub fn cycles(&self, k: u32) -> u64 {
        self.cycle_counts.get(&k).copied().unwrap_or(0)
    }

    pub fn lines(&self, k: u32) -> u64 {
        self.line_counts.get(&k).copied().unwrap_or(0)
    }

    pub fn value(&self, stat: Statistic) -> u64 {
        match stat {
            Statistic::Connected => u64::from(self.is_connected()),
            Statistic::Simple => u64::from(self.is_simple()),
            Statistic::Cycles(k) => self.cycles(k),
            Statistic::Lines(k) => self.lines(k),
            Statistic::SelfLoops => self.self_loops,
            Statistic::MultiEdges => self.multi_edges,
            Statistic::GiantSize => self.giant_size,
            Statistic::Complement => self.complement,
            Statistic::OtherOutsideGiant => self.other_outside_giant,
            Statistic::Deg3OutsideGiant => self.deg3_outside_giant,
        }
    }

    /// Canonical sorted `(statistic, value)` list. Zero cycle and line
    /// counts are omitted; the scalar statistics are always present.
    pub fn key(&self) -> CensusKey {
        let mut entries: Vec<(Statistic, u64)> = self
            .cycle_counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&k, &c)| (Statistic::Cycles(k), c))
            .chain(
                self.line_counts
                    .iter()
                    .filter(|(_, &c)| c > 0)
                    .map(|(&k, &c)| (Statistic::Lines(k), c)),
            )
            .collect();
        for s in [
            Statistic::SelfLoops,
            Statistic::MultiEdges,
            Statistic::GiantSize,
            Statistic::Complement,
            Statistic::OtherOutsideGiant,
            Statistic::Deg3OutsideGiant,
        ] {
            entries.push((s, self.value(s)));
        }
        entries.sort_unstable();
        CensusKey(entries)
    }
}

/// Named census statistic. Text form: `connected`, `simple`, `C<k>`,
/// `L<k>`, `S`, `M`, `giant_size`, `complement`, `other_outside_giant`,
/// `deg3_outside_giant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Connected,
    Simple,
    Cycles(u32),
    Lines(u32),
    SelfLoops,
    MultiEdges,
    GiantSize,
    Complement,
    OtherOutsideGiant,
    Deg3OutsideGiant,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Connected => f.write_str("connected"),
            Statistic::Simple => f.write_str("simple"),
            Statistic::Cycles(k) => write!(f, "C{k}"),
            Statistic::Lines(k) => write!(f, "L{k}"),
            Statistic::SelfLoops => f.write_str("S"),
            Statistic::MultiEdges => f.write_str("M"),
            Statistic::GiantSize => f.write_str("giant_size"),
            Statistic::Complement => f.write_str("complement"),
            Statistic::OtherOutsideGiant => f.write_str("other_outside_giant"),
            Statistic::Deg3OutsideGiant => f.write_str("deg3_outside_giant"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let indexed = |rest: &str| {
            rest.parse::<u32>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::InvalidArgument(format!("bad statistic index in {s:?}")))
        };
        Ok(match s {
            "connected" => Statistic::Connected,
            "simple" => Statistic::Simple,
            "S" => Statistic::SelfLoops,
            "M" => Statistic::MultiEdges,
            "giant_size" => Statistic::GiantSize,
            "complement" => Statistic::Complement,
            "other_outside_giant" => Statistic::OtherOutsideGiant,
            "deg3_outside_giant" => Statistic::Deg3OutsideGiant,
            _ if s.starts_with('C') => Statistic::Cycles(indexed(&s[1..])?),
            _ if s.starts_with('L') => Statistic::Lines(indexed(&s[1..])?),
            _ => return Err(Error::InvalidArgument(format!("unknown statistic {s:?}"))),
        })
    }
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Canonical form of a census, used as the key of exact joint laws.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CensusKey(pub Vec<(Statistic, u64)>);

impl CensusKey {
    /// Value of `stat`; statistics absent from the key are zero.
    pub fn get(&self, stat: Statistic) -> u64 {
        match stat {
            Statistic::Connected => u64::from(self.get(Statistic::Complement) == 0),
            Statistic::Simple => u64::from(
                self.get(Statistic::SelfLoops) == 0 && self.get(Statistic::MultiEdges) == 0,
            ),
            _ => self
                .0
                .iter()
                .find(|(s, _)| *s == stat)
                .map_or(0, |&(_, v)| v),
        }
    }
}

impl fmt::Display for CensusKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for CensusKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Connected components, labelled by order of their smallest vertex.
#[derive(Debug, Clone)]
pub struct Components {
    label: Vec<u32>,
    sizes: Vec<u64>,
}

impl Components {
    pub fn of(g: &Multigraph) -> Self {
        let mut uf = UnionFind::new(g.n());
        for &(u, v) in g.edges() {
            uf.union(u, v);
        }
        let mut root_label = vec![u32::MAX; g.n()];
        let mut label = Vec::with_capacity(g.n());
        let mut sizes = Vec::new();
        for v in 0..g.n() as u32 {
            let r = uf.find(v) as usize;
            if root_label[r] == u32::MAX {
                root_label[r] = sizes.len() as u32;
                sizes.push(0);
            }
            let c = root_label[r];
            sizes[c as usize] += 1;
            label.push(c);
        }
        Self { label, sizes }
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, v: usize) -> u32 {
        self.label[v]
    }

    pub fn size(&self, c: u32) -> u64 {
        self.sizes[c as usize]
    }

    /// Size of the component containing `v`.
    pub fn size_of(&self, v: usize) -> u64 {
        self.sizes[self.label[v] as usize]
    }

    /// Largest component; ties go to the lowest smallest-vertex, which is
    /// the lowest label.
    pub fn giant(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (c, &s) in self.sizes.iter().enumerate() {
            if best.is_none_or(|b| s > self.sizes[b as usize]) {
                best = Some(c as u32);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    vertices: u64,
    edges: u64,
    deg1: u64,
    deg2: u64,
    deg3plus: u64,
}

/// Classifies every component of `g` and collects all counters.
pub fn component_census(g: &Multigraph, degrees: &DegreeSequence) -> Result<ComponentCensus> {
    if g.n() != degrees.n() {
        return Err(Error::InvalidArgument(format!(
            "graph has {} vertices, sequence has {}",
            g.n(),
            degrees.n()
        )));
    }
    for (v, (&expected, realized)) in degrees
        .degrees()
        .iter()
        .zip(g.realized_degrees())
        .enumerate()
    {
        if u64::from(expected) != realized {
            return Err(Error::DegreeMismatch {
                vertex: v,
                expected,
                realized,
            });
        }
    }

    let comps = Components::of(g);
    let mut tally = vec![Tally::default(); comps.count()];
    for (v, &d) in degrees.degrees().iter().enumerate() {
        let t = &mut tally[comps.label(v) as usize];
        t.vertices += 1;
        match d {
            1 => t.deg1 += 1,
            2 => t.deg2 += 1,
            _ => t.deg3plus += 1,
        }
    }

    let mut self_loops = 0u64;
    let mut keys = Vec::with_capacity(g.edges().len());
    for &(u, v) in g.edges() {
        tally[comps.label(u as usize) as usize].edges += 1;
        if u == v {
            self_loops += 1;
        } else {
            keys.push((u64::from(u) << 32) | u64::from(v));
        }
    }
    keys.sort_unstable();
    let multi_edges = keys
        .chunk_by(|a, b| a == b)
        .map(|run| {
            let m = run.len() as u64;
            m * (m - 1) / 2
        })
        .sum();

    let giant = comps.giant().expect("sequence is nonempty");
    let mut census = ComponentCensus {
        self_loops,
        multi_edges,
        giant_size: comps.size(giant),
        complement: degrees.n() as u64 - comps.size(giant),
        ..Default::default()
    };
    for (c, t) in tally.iter().enumerate() {
        let is_cycle = t.deg1 == 0 && t.deg3plus == 0 && t.edges == t.vertices;
        let is_line = t.deg1 == 2 && t.deg3plus == 0 && t.edges + 1 == t.vertices;
        let k = t.vertices as u32;
        if is_cycle {
            *census.cycle_counts.entry(k).or_insert(0) += 1;
        } else if is_line {
            *census.line_counts.entry(k).or_insert(0) += 1;
        }
        if c as u32 != giant {
            census.deg3_outside_giant += t.deg3plus;
            if !is_cycle && !is_line {
                census.other_outside_giant += t.vertices;
            }
        }
    }
    Ok(census)
}
