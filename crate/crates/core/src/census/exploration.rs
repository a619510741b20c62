//! Active/dead/neutral half-edge exploration from a single vertex.
//!
//! The pairing is built on the fly: each step takes an active half-edge and
//! pairs it with a uniformly chosen other live (active or neutral)
//! half-edge, which gives the same law as a uniform perfect matching. When
//! the partner is neutral, its vertex is discovered and the remaining
//! half-edges of that vertex turn active. `S_t` is the number of active
//! half-edges after `t` steps.

use rand::Rng;
use serde::Serialize;

use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::generator::Seed;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// `S_t` reached zero with neutral half-edges left.
    HitZero,
    /// The neutral half-edge count dropped to `n/2` or below.
    PassedTHalf,
    /// `S_t` reached zero and every half-edge is paired.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplorationTrace {
    pub start_vertex: usize,
    /// `S_0 ..= S_stop`.
    pub s_values: Vec<u64>,
    /// Neutral half-edge count at each recorded `t`.
    pub neutral_half_edges: Vec<u64>,
    /// First `t` with `S_t = 0`.
    pub t_zero: Option<usize>,
    /// Largest `t` with more than `n/2` neutral half-edges, once passed.
    pub t_half: Option<usize>,
    /// Largest recorded `t` with more than `n/2` undiscovered vertices.
    pub t_half_vertex: Option<usize>,
    pub stop_reason: StopReason,
    /// Vertices reached so far, the start included. Equals the size of the
    /// start's component when the trace hit zero.
    pub discovered_vertices: u64,
}

struct Explorer<'a> {
    seq: &'a DegreeSequence,
    owner: Vec<u32>,
    offset: Vec<usize>,
    live: Vec<usize>,
    live_pos: Vec<usize>,
    active: Vec<usize>,
    active_pos: Vec<usize>,
    neutral: u64,
    undiscovered: u64,
}

impl<'a> Explorer<'a> {
    fn new(seq: &'a DegreeSequence, start: usize) -> Self {
        let ell = seq.ell() as usize;
        let mut owner = Vec::with_capacity(ell);
        let mut offset = Vec::with_capacity(seq.n() + 1);
        for (v, &d) in seq.degrees().iter().enumerate() {
            offset.push(owner.len());
            owner.extend(std::iter::repeat_n(v as u32, d as usize));
        }
        offset.push(ell);
        let mut ex = Self {
            seq,
            owner,
            offset,
            live: (0..ell).collect(),
            live_pos: (0..ell).collect(),
            active: Vec::new(),
            active_pos: vec![NONE; ell],
            neutral: ell as u64,
            undiscovered: seq.n() as u64,
        };
        ex.discover(start, NONE);
        ex
    }

    fn discover(&mut self, v: usize, except: usize) {
        for h in self.offset[v]..self.offset[v + 1] {
            if h != except {
                self.active_pos[h] = self.active.len();
                self.active.push(h);
            }
        }
        self.neutral -= u64::from(self.seq.degree(v));
        self.undiscovered -= 1;
    }

    fn kill_live(&mut self, h: usize) {
        let p = self.live_pos[h];
        let last = *self.live.last().expect("live set nonempty");
        self.live[p] = last;
        self.live_pos[last] = p;
        self.live.pop();
        self.live_pos[h] = NONE;
    }

    fn deactivate(&mut self, h: usize) {
        let p = self.active_pos[h];
        let last = *self.active.last().expect("active set nonempty");
        self.active[p] = last;
        self.active_pos[last] = p;
        self.active.pop();
        self.active_pos[h] = NONE;
    }

    fn step<R: Rng>(&mut self, rng: &mut R) {
        let e1 = *self
            .active
            .last()
            .expect("step requires an active half-edge");
        self.deactivate(e1);
        self.kill_live(e1);
        let e2 = self.live[rng.gen_range(0..self.live.len() as u64) as usize];
        self.kill_live(e2);
        if self.active_pos[e2] != NONE {
            self.deactivate(e2);
        } else {
            self.discover(self.owner[e2] as usize, e2);
        }
    }

    fn s(&self) -> u64 {
        self.active.len() as u64
    }
}

fn explore(
    seq: &DegreeSequence,
    seed: Seed,
    start: usize,
    stop_at_half: bool,
) -> Result<ExplorationTrace> {
    if start >= seq.n() {
        return Err(Error::InvalidArgument(format!(
            "start vertex {start} out of range for {} vertices",
            seq.n()
        )));
    }
    let n = seq.n() as u64;
    let mut rng = seed.rng();
    let mut ex = Explorer::new(seq, start);
    let mut trace = ExplorationTrace {
        start_vertex: start,
        s_values: vec![ex.s()],
        neutral_half_edges: vec![ex.neutral],
        t_zero: None,
        t_half: None,
        t_half_vertex: (2 * ex.undiscovered > n).then_some(0),
        stop_reason: StopReason::PassedTHalf,
        discovered_vertices: 1,
    };
    let mut last_above_half = (2 * ex.neutral > n).then_some(0usize);
    if stop_at_half && last_above_half.is_none() {
        return Ok(trace);
    }
    let mut t = 0usize;
    loop {
        ex.step(&mut rng);
        t += 1;
        trace.s_values.push(ex.s());
        trace.neutral_half_edges.push(ex.neutral);
        trace.discovered_vertices = n - ex.undiscovered;
        if 2 * ex.undiscovered > n {
            trace.t_half_vertex = Some(t);
        }
        let above = 2 * ex.neutral > n;
        if above {
            last_above_half = Some(t);
        } else if trace.t_half.is_none() && last_above_half.is_some() {
            trace.t_half = last_above_half;
        }
        if ex.s() == 0 {
            trace.t_zero = Some(t);
            trace.stop_reason = if ex.live.is_empty() {
                StopReason::Exhausted
            } else {
                StopReason::HitZero
            };
            return Ok(trace);
        }
        if stop_at_half && !above {
            trace.stop_reason = StopReason::PassedTHalf;
            return Ok(trace);
        }
    }
}

/// Explores from `start` until `S_t = 0` or just past `T_1/2`, the last
/// time more than `n/2` half-edges are neutral.
pub fn run_exploration(seq: &DegreeSequence, seed: Seed, start: usize) -> Result<ExplorationTrace> {
    explore(seq, seed, start, true)
}

/// Explores from `start` until `S_t = 0`, revealing the whole component.
pub fn explore_component(
    seq: &DegreeSequence,
    seed: Seed,
    start: usize,
) -> Result<ExplorationTrace> {
    explore(seq, seed, start, false)
}
