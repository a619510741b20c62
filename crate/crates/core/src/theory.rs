//! Closed-form limits in the critical window for connectivity, plus the
//! finite-n formulas that go with them.
//!
//! With `x = 2 p2 / d`, the limiting counts of cycles and lines are
//! independent Poisson variables with means
//!
//! ```text
//! lambda_C(k) = x^k / (2k)                      k >= 1
//! lambda_L(k) = rho1^2 x^(k-2) / (2d)           k >= 2   (L_1 = 0)
//! ```
//!
//! and the graph is connected in the limit exactly when all of them vanish,
//! so `P(connected) = exp(-sum lambda) = sqrt(1 - x) exp(-rho1^2 / (2(d - 2 p2)))`.
//! Every series here is geometric in `x` and needs `x < 1`; outside that
//! domain the functions return [`Error::SeriesDivergence`].

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::degseq::{DegreeSequence, LimitParams};
use crate::error::{Error, Result};

/// Series stop once a term drops below this.
pub const SERIES_TOL: f64 = 1e-12;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: u32 = 10_000;
/// Each Poisson factor of the complement law keeps this much mass.
pub const POISSON_MASS: f64 = 1.0 - 1e-12;

fn ratio(p: &LimitParams) -> Result<f64> {
    p.check_window()?;
    Ok(2.0 * p.p2 / p.d)
}

/// Mean of the limiting number of lines with `k` vertices.
pub fn lambda_line(k: u32, p: &LimitParams) -> Result<f64> {
    let x = ratio(p)?;
    if k < 2 {
        return Ok(0.0);
    }
    Ok(p.rho1 * p.rho1 * x.powi(k as i32 - 2) / (2.0 * p.d))
}

/// Mean of the limiting number of cycles with `k` vertices.
pub fn lambda_cycle(k: u32, p: &LimitParams) -> Result<f64> {
    let x = ratio(p)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cycle length must be at least 1".into(),
        ));
    }
    Ok(x.powi(k as i32) / (2.0 * f64::from(k)))
}

/// Limiting probability that the multigraph is connected.
pub fn p_connected(p: &LimitParams) -> Result<f64> {
    let x = ratio(p)?;
    Ok((1.0 - x).sqrt() * (-p.rho1 * p.rho1 / (2.0 * (p.d - 2.0 * p.p2))).exp())
}

/// Limiting probability of no self-loops and no multiple edges,
/// `exp(-nu/2 - nu^2/4)`.
pub fn p_simple(p: &LimitParams) -> Result<f64> {
    let nu = p.finite_nu()?;
    Ok((-nu / 2.0 - nu * nu / 4.0).exp())
}

/// Limiting connectivity probability given simplicity. Simplicity rules
/// out cycles of length 1 and 2, which removes their penalty.
pub fn p_connected_given_simple(p: &LimitParams) -> Result<f64> {
    p.finite_nu()?;
    let base = p_connected(p)?;
    Ok(base * ((p.p2 * p.p2 + p.d * p.p2) / (p.d * p.d)).exp())
}

/// Truncated series value and a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: u32,
}

/// `sum_k k (lambda_C(k) + lambda_L(k))`, the limiting mean of the number
/// of vertices outside the giant, summed until a term drops below `tol`.
pub fn expected_complement(p: &LimitParams, tol: f64) -> Result<SeriesValue> {
    let x = ratio(p)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let term =
        |k: u32| -> Result<f64> { Ok(f64::from(k) * (lambda_cycle(k, p)? + lambda_line(k, p)?)) };
    let mut value = 0.0;
    let mut k = 1u32;
    loop {
        let t = term(k)?;
        value += t;
        // k = 1 and k = 2 always count: with p2 = 0 the only line term is k = 2
        if (k >= 2 && t < tol) || k >= MAX_TERMS {
            break;
        }
        k += 1;
    }
    // for j > k, term(j + 1) / term(j) <= x (k + 2) / (k + 1)
    let r = x * f64::from(k + 2) / f64::from(k + 1);
    let next = term(k + 1)?;
    let truncation_bound = if r < 1.0 {
        next / (1.0 - r)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue {
        value,
        truncation_bound,
        terms: k,
    })
}

/// Closed form of [`expected_complement`]:
/// `p2/(d - 2p2) + rho1^2 (d - p2)/(d - 2p2)^2`.
pub fn expected_complement_closed_form(p: &LimitParams) -> Result<f64> {
    p.check_window()?;
    let gap = p.d - 2.0 * p.p2;
    Ok(p.p2 / gap + p.rho1 * p.rho1 * (p.d - p.p2) / (gap * gap))
}

/// The published closed form `rho1^2 (2d - p2) / (2 (d - p2)^2) + p2/(d - 2p2)`.
/// It does not agree with the series it is meant to sum; kept for comparison.
pub fn paper_closed_form(p: &LimitParams) -> Result<f64> {
    p.check_window()?;
    let dp = p.d - p.p2;
    Ok(p.rho1 * p.rho1 * (2.0 * p.d - p.p2) / (2.0 * dp * dp) + p.p2 / (p.d - 2.0 * p.p2))
}

/// Smallest `k >= 2` past which every `lambda_C + lambda_L` is below
/// `1e-16`, capped at [`MAX_TERMS`].
pub fn auto_trunc_k(p: &LimitParams) -> Result<u32> {
    ratio(p)?;
    let mut k = 2u32;
    while k < MAX_TERMS && lambda_cycle(k, p)? + lambda_line(k, p)? >= 1e-16 {
        k += 1;
    }
    Ok(k)
}

/// Law of `sum_{k <= trunc_k} k (C_k + L_k)` on `0..=x_max`, by iterated
/// convolution of `k`-scaled Poisson laws. Mass beyond `x_max` is dropped.
pub fn complement_pmf(p: &LimitParams, x_max: usize, trunc_k: u32) -> Result<Vec<f64>> {
    ratio(p)?;
    let mut pmf = vec![0.0; x_max + 1];
    pmf[0] = 1.0;
    for k in 1..=trunc_k {
        let lambda = lambda_cycle(k, p)? + lambda_line(k, p)?;
        if lambda == 0.0 {
            continue;
        }
        let step = k as usize;
        let mut weights = Vec::new();
        let mut w = (-lambda).exp();
        let mut mass = 0.0;
        let mut j = 0usize;
        while j * step <= x_max {
            weights.push(w);
            mass += w;
            if mass >= POISSON_MASS {
                break;
            }
            j += 1;
            w *= lambda / j as f64;
        }
        let mut next = vec![0.0; x_max + 1];
        for (x, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &wj) in weights.iter().enumerate() {
                let shift = j * step;
                if shift > x {
                    break;
                }
                acc += wj * pmf[x - shift];
            }
            *slot = acc;
        }
        pmf = next;
    }
    Ok(pmf)
}

/// `ln((ell - 1)!!)` for even `ell`, the log of the number of pairings.
pub fn ln_pairings(ell: u64) -> f64 {
    debug_assert!(ell.is_multiple_of(2));
    let l = ell as f64;
    ln_gamma(l + 1.0) - (l / 2.0) * std::f64::consts::LN_2 - ln_gamma(l / 2.0 + 1.0)
}

/// `ln prod_i d_i!`.
pub fn ln_degree_factorials(seq: &DegreeSequence) -> f64 {
    seq.counts()
        .iter()
        .map(|(&d, &m)| m as f64 * ln_gamma(f64::from(d) + 1.0))
        .sum()
}

/// Natural log of the asymptotic number of simple graphs with the given
/// degrees, `exp(-nu/2 - nu^2/4) (ell - 1)!! / prod d_i!`.
pub fn log_count_simple(seq: &DegreeSequence, p: &LimitParams) -> Result<f64> {
    let nu = p.finite_nu()?;
    Ok(ln_pairings(seq.ell()) - ln_degree_factorials(seq) - nu / 2.0 - nu * nu / 4.0)
}

/// Natural log of the asymptotic number of connected simple graphs with
/// the given degrees.
pub fn log_count_connected_simple(seq: &DegreeSequence, p: &LimitParams) -> Result<f64> {
    let simple = log_count_simple(seq, p)?;
    Ok(simple + p_connected_given_simple(p)?.ln())
}

/// Connectivity limit when the mean degree diverges: `exp(-n1^2 / (2 ell))`
/// with the sequence's own `n1` and `ell`.
pub fn boundary_p_connected(seq: &DegreeSequence) -> f64 {
    let n1 = seq.count_of(1) as f64;
    (-n1 * n1 / (2.0 * seq.ell() as f64)).exp()
}

/// Exact probability that no two degree-1 vertices are paired together.
pub fn p_no_line2_exact(seq: &DegreeSequence) -> Result<f64> {
    p_no_line2_product(seq.count_of(1), seq.ell())
}

/// `prod_{i=1}^{n1} (ell - n1 - i + 1) / (ell - 2i + 1)`.
pub fn p_no_line2_product(n1: u64, ell: u64) -> Result<f64> {
    if 2 * n1 > ell {
        return Err(Error::InfeasibleProduct { n1, ell });
    }
    let mut prod = 1.0f64;
    for i in 1..=n1 {
        prod *= (ell - n1 - i + 1) as f64 / (ell - 2 * i + 1) as f64;
    }
    Ok(prod)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictOptions {
    pub x_max: usize,
    /// `None` picks [`auto_trunc_k`].
    pub trunc_k: Option<u32>,
    /// Largest `k` listed in the lambda maps.
    pub k_max: u32,
    pub tol: f64,
}

impl Default for PredictOptions {
    fn default() -> Self {
        Self {
            x_max: 50,
            trunc_k: None,
            k_max: 10,
            tol: SERIES_TOL,
        }
    }
}

/// All predictions for one parameter set. Entries that need a finite `nu`
/// or a concrete sequence are `null` when unavailable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub params: LimitParams,
    pub p_connected: f64,
    pub p_simple: Option<f64>,
    pub p_connected_given_simple: Option<f64>,
    pub lambda_lines: BTreeMap<u32, f64>,
    pub lambda_cycles: BTreeMap<u32, f64>,
    pub expected_complement: f64,
    pub expected_complement_truncation_bound: f64,
    pub paper_closed_form: f64,
    pub complement_pmf: Vec<f64>,
    pub log_count_connected_simple: Option<f64>,
    pub log_count_simple: Option<f64>,
    pub boundary_p_connected: Option<f64>,
    pub p_no_line2_exact: Option<f64>,
}

pub fn predict(
    p: &LimitParams,
    seq: Option<&DegreeSequence>,
    opts: &PredictOptions,
) -> Result<Prediction> {
    p.check_window()?;
    let trunc_k = match opts.trunc_k {
        Some(k) => k,
        None => auto_trunc_k(p)?,
    };
    let series = expected_complement(p, opts.tol)?;
    let finite_nu = p.nu.is_finite();
    let (log_count_connected_simple, log_count_simple) = match (seq, finite_nu) {
        (Some(s), true) => (
            Some(log_count_connected_simple(s, p)?),
            Some(log_count_simple(s, p)?),
        ),
        _ => (None, None),
    };
    Ok(Prediction {
        params: *p,
        p_connected: p_connected(p)?,
        p_simple: finite_nu.then(|| p_simple(p)).transpose()?,
        p_connected_given_simple: finite_nu.then(|| p_connected_given_simple(p)).transpose()?,
        lambda_lines: (2..=opts.k_max)
            .map(|k| Ok((k, lambda_line(k, p)?)))
            .collect::<Result<_>>()?,
        lambda_cycles: (1..=opts.k_max)
            .map(|k| Ok((k, lambda_cycle(k, p)?)))
            .collect::<Result<_>>()?,
        expected_complement: series.value,
        expected_complement_truncation_bound: series.truncation_bound,
        paper_closed_form: paper_closed_form(p)?,
        complement_pmf: complement_pmf(p, opts.x_max, trunc_k)?,
        log_count_connected_simple,
        log_count_simple,
        boundary_p_connected: seq.map(boundary_p_connected),
        p_no_line2_exact: seq.map(p_no_line2_exact).transpose().ok().flatten(),
    })
}
