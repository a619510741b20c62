//! Prescribed degree sequences and their critical-window parameters.
//!
//! A [`DegreeSequence`] is the validated input to everything else in the
//! crate: it guarantees positive degrees and an even total degree, and caches
//! the multiplicity of every degree. [`WindowParams`] are the finite-n ratios
//! `n1/sqrt(n)`, `n2/n`, `l_n/n` and `E[D(D-1)]/E[D]`; [`LimitParams`] is the
//! same quadruple viewed as the limit values fed to the closed-form
//! predictions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap above which `nu` is treated as infinite.
pub const DEFAULT_NU_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    ell: u64,
    counts: BTreeMap<u32, u64>,
}

impl DegreeSequence {
    /// Validates raw degrees: nonempty, every degree at least 1, even total.
    pub fn validate(raw: &[i64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut degrees = Vec::with_capacity(raw.len());
        for (index, &d) in raw.iter().enumerate() {
            if d < 1 {
                return Err(Error::ZeroOrNegativeDegree { index, degree: d });
            }
            let d32 = u32::try_from(d).map_err(|_| Error::DegreeOverflow { index, degree: d })?;
            degrees.push(d32);
        }
        Self::from_degrees(degrees)
    }

    /// Same as [`validate`](Self::validate) for already-unsigned degrees.
    pub fn from_degrees(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut counts = BTreeMap::new();
        let mut ell = 0u64;
        for (index, &d) in degrees.iter().enumerate() {
            if d == 0 {
                return Err(Error::ZeroOrNegativeDegree { index, degree: 0 });
            }
            ell += u64::from(d);
            *counts.entry(d).or_insert(0u64) += 1;
        }
        if ell % 2 == 1 {
            return Err(Error::OddTotalDegree { total: ell });
        }
        Ok(Self {
            degrees,
            ell,
            counts,
        })
    }

    /// Builds a sequence from `(degree, multiplicity)` runs, in the given order.
    pub fn from_counts(runs: &[(i64, u64)]) -> Result<Self> {
        let mut raw = Vec::new();
        for &(d, m) in runs {
            raw.extend(std::iter::repeat_n(d, m as usize));
        }
        Self::validate(&raw)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Total degree, i.e. the number of half-edges.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    /// Number of vertices with degree exactly `d`.
    pub fn count_of(&self, d: u32) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    /// `sum_v d_v (d_v - 1)`, exact.
    pub fn sum_falling2(&self) -> u128 {
        self.counts
            .iter()
            .map(|(&d, &m)| u128::from(d) * u128::from(d - 1) * u128::from(m))
            .sum()
    }

    /// Same multiset of degrees, listed in nondecreasing order.
    pub fn sorted(&self) -> Self {
        let mut degrees = self.degrees.clone();
        degrees.sort_unstable();
        Self {
            degrees,
            ell: self.ell,
            counts: self.counts.clone(),
        }
    }

    /// Run-length text form: one `degree count` line per distinct degree,
    /// sorted by degree.
    pub fn to_run_length(&self) -> String {
        let mut out = String::new();
        for (d, m) in &self.counts {
            let _ = writeln!(out, "{d} {m}");
        }
        out
    }

    pub fn window_params(&self) -> WindowParams {
        WindowParams::of(self)
    }
}

/// Parses the plain-text degree file: each non-comment line is either a
/// single degree or a `degree count` pair.
pub fn parse_degree_file(text: &str) -> Result<DegreeSequence> {
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let parse_int = |s: &str| -> Result<i64> {
            s.parse::<i64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("{s:?}: {e}"),
            })
        };
        match fields.as_slice() {
            [d] => raw.push(parse_int(d)?),
            [d, m] => {
                let d = parse_int(d)?;
                let m = parse_int(m)?;
                if m < 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("negative count {m}"),
                    });
                }
                raw.extend(std::iter::repeat_n(d, m as usize));
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `degree` or `degree count`, got {trimmed:?}"),
                })
            }
        }
    }
    DegreeSequence::validate(&raw)
}

/// Parses `1,1,2`.
pub fn parse_inline_degrees(s: &str) -> Result<DegreeSequence> {
    let raw = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|e| Error::InvalidArgument(format!("degree {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DegreeSequence::validate(&raw)
}

/// Parses `1:10,2:30,3:60`.
pub fn parse_inline_counts(s: &str) -> Result<DegreeSequence> {
    let mut runs = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (d, m) = item.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("expected degree:count, got {item:?}"))
        })?;
        let d = d
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::InvalidArgument(format!("degree {d:?}: {e}")))?;
        let m = m
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::InvalidArgument(format!("count {m:?}: {e}")))?;
        runs.push((d, m));
    }
    DegreeSequence::from_counts(&runs)
}

/// Finite-n critical-window ratios of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub rho1_n: f64,
    pub p2_n: f64,
    pub d_n: f64,
    pub nu_n: f64,
}

impl WindowParams {
    pub fn of(seq: &DegreeSequence) -> Self {
        let n = seq.n() as f64;
        let ell = seq.ell() as f64;
        Self {
            rho1_n: seq.count_of(1) as f64 / n.sqrt(),
            p2_n: seq.count_of(2) as f64 / n,
            d_n: ell / n,
            nu_n: seq.sum_falling2() as f64 / ell,
        }
    }

    pub fn to_limit_params(&self) -> LimitParams {
        self.to_limit_params_with_cap(DEFAULT_NU_CAP)
    }

    /// Copies the ratios, flagging `nu` as infinite above `nu_cap`.
    pub fn to_limit_params_with_cap(&self, nu_cap: f64) -> LimitParams {
        LimitParams {
            rho1: self.rho1_n,
            p2: self.p2_n,
            d: self.d_n,
            nu: if self.nu_n > nu_cap {
                f64::INFINITY
            } else {
                self.nu_n
            },
        }
    }
}

/// Limiting window parameters `(rho1, p2, d, nu)`.
///
/// `nu` is `f64::INFINITY` when flagged infinite; it serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub rho1: f64,
    pub p2: f64,
    pub d: f64,
    #[serde(with = "maybe_infinite")]
    pub nu: f64,
}

impl LimitParams {
    /// Checked constructor. Pass `f64::INFINITY` for an infinite `nu`.
    pub fn new(rho1: f64, p2: f64, d: f64, nu: f64) -> Result<Self> {
        if !(rho1.is_finite() && rho1 >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho1 = {rho1} must be finite and >= 0"
            )));
        }
        if !(0.0..1.0).contains(&p2) {
            return Err(Error::InvalidArgument(format!(
                "p2 = {p2} must lie in [0, 1)"
            )));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "d = {d} must be finite and > 0"
            )));
        }
        if nu.is_nan() || nu < 0.0 {
            return Err(Error::InvalidArgument(format!("nu = {nu} must be >= 0")));
        }
        Ok(Self { rho1, p2, d, nu })
    }

    /// `2 p2 < d`, the domain of every series-based prediction.
    pub fn in_window(&self) -> bool {
        2.0 * self.p2 < self.d
    }

    pub fn check_window(&self) -> Result<()> {
        if self.in_window() {
            Ok(())
        } else {
            Err(Error::SeriesDivergence {
                p2: self.p2,
                d: self.d,
            })
        }
    }

    pub fn nu_is_infinite(&self) -> bool {
        self.nu.is_infinite()
    }

    pub fn finite_nu(&self) -> Result<f64> {
        if self.nu.is_finite() {
            Ok(self.nu)
        } else {
            Err(Error::NuInfinite)
        }
    }
}

mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Output of [`build_sequence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltSequence {
    pub sequence: DegreeSequence,
    /// Bulk vertex whose degree was raised by one to make the total even.
    pub parity_repair: Option<usize>,
}

/// Builds `round(rho1 sqrt n)` vertices of degree 1, `round(p2 n)` of degree
/// 2 and the rest of degree `bulk_degree`, in that order.
pub fn build_sequence(n: usize, rho1: f64, p2: f64, bulk_degree: u32) -> Result<BuiltSequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(rho1.is_finite() && rho1 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rho1 = {rho1} must be finite and >= 0"
        )));
    }
    if !(0.0..1.0).contains(&p2) {
        return Err(Error::InvalidArgument(format!(
            "p2 = {p2} must lie in [0, 1)"
        )));
    }
    if bulk_degree < 3 {
        return Err(Error::InvalidArgument(format!(
            "bulk degree {bulk_degree} must be at least 3"
        )));
    }
    let n1 = (rho1 * (n as f64).sqrt()).round() as usize;
    let n2 = (p2 * n as f64).round() as usize;
    if n1 + n2 > n {
        return Err(Error::InfeasibleTargets(format!(
            "n1 = {n1} plus n2 = {n2} exceeds n = {n}"
        )));
    }
    let nb = n - n1 - n2;
    let mut degrees = Vec::with_capacity(n);
    degrees.extend(std::iter::repeat_n(1u32, n1));
    degrees.extend(std::iter::repeat_n(2u32, n2));
    degrees.extend(std::iter::repeat_n(bulk_degree, nb));

    let odd = (n1 as u64 + u64::from(bulk_degree) * nb as u64) % 2 == 1;
    let parity_repair = if odd {
        if nb == 0 {
            return Err(Error::InfeasibleTargets(format!(
                "total degree is odd (n1 = {n1}) and there is no bulk vertex to adjust"
            )));
        }
        let v = n - 1;
        degrees[v] += 1;
        Some(v)
    } else {
        None
    };
    Ok(BuiltSequence {
        sequence: DegreeSequence::from_degrees(degrees)?,
        parity_repair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn counts(seq: &DegreeSequence) -> Vec<(u32, u64)> {
        seq.counts().iter().map(|(&d, &m)| (d, m)).collect()
    }

    #[test]
    fn validate_tallies() {
        let s = DegreeSequence::validate(&[2, 2]).unwrap();
        assert_eq!((s.n(), s.ell()), (2, 4));
        assert_eq!(counts(&s), vec![(2, 2)]);

        let s = DegreeSequence::validate(&[1, 1, 2]).unwrap();
        assert_eq!((s.n(), s.ell()), (3, 4));
        assert_eq!(counts(&s), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn validate_rejects() {
        assert_eq!(
            DegreeSequence::validate(&[1, 2]),
            Err(Error::OddTotalDegree { total: 3 })
        );
        assert_eq!(
            DegreeSequence::validate(&[0, 2, 2]),
            Err(Error::ZeroOrNegativeDegree {
                index: 0,
                degree: 0
            })
        );
        assert!(matches!(
            DegreeSequence::validate(&[2, -2]),
            Err(Error::ZeroOrNegativeDegree { index: 1, .. })
        ));
        assert_eq!(DegreeSequence::validate(&[]), Err(Error::EmptySequence));
    }

    #[test]
    fn window_params_examples() {
        let s = DegreeSequence::from_counts(&[(1, 10), (2, 30), (3, 60)]).unwrap();
        let w = s.window_params();
        assert!((w.rho1_n - 1.0).abs() < 1e-15);
        assert!((w.p2_n - 0.3).abs() < 1e-15);
        assert!((w.d_n - 2.5).abs() < 1e-15);
        assert!((w.nu_n - 1.68).abs() < 1e-15);

        let w = DegreeSequence::validate(&[2, 2]).unwrap().window_params();
        assert_eq!((w.rho1_n, w.p2_n, w.d_n, w.nu_n), (0.0, 1.0, 2.0, 1.0));

        let w = DegreeSequence::validate(&[1, 1]).unwrap().window_params();
        assert!((w.rho1_n - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!((w.p2_n, w.d_n, w.nu_n), (0.0, 1.0, 0.0));
    }

    #[test]
    fn build_sequence_examples() {
        let b = build_sequence(100, 1.0, 0.3, 3).unwrap();
        assert_eq!(counts(&b.sequence), vec![(1, 10), (2, 30), (3, 60)]);
        assert_eq!(b.sequence.ell(), 250);
        assert_eq!(b.parity_repair, None);

        let b = build_sequence(4, 0.0, 0.0, 3).unwrap();
        assert_eq!(counts(&b.sequence), vec![(3, 4)]);
        assert_eq!(b.sequence.ell(), 12);

        assert!(matches!(
            build_sequence(3, 2.0, 0.9, 3),
            Err(Error::InfeasibleTargets(_))
        ));
    }

    #[test]
    fn build_sequence_repairs_parity() {
        // n1 = 3 with six bulk vertices: 3 + 18 = 21 is odd.
        let b = build_sequence(9, 1.0, 0.0, 3).unwrap();
        assert_eq!(b.parity_repair, Some(8));
        assert_eq!(counts(&b.sequence), vec![(1, 3), (3, 5), (4, 1)]);
        assert_eq!(b.sequence.ell() % 2, 0);
    }

    #[test]
    fn build_sequence_without_bulk_cannot_repair() {
        // n = 4: n1 = 2 (rho1 = 1), n2 = 2 (p2 = 0.5), total 6 is even, no repair
        assert!(build_sequence(4, 1.0, 0.5, 3).is_ok());
        // n = 1: n1 = 1, total 1 odd, no bulk
        assert!(matches!(
            build_sequence(1, 1.0, 0.0, 3),
            Err(Error::InfeasibleTargets(_))
        ));
    }

    #[test]
    fn limit_params_copy_and_flags() {
        let w = WindowParams {
            rho1_n: 1.0,
            p2_n: 0.3,
            d_n: 2.7,
            nu_n: 1.7778,
        };
        let l = w.to_limit_params();
        assert_eq!((l.rho1, l.p2, l.d, l.nu), (1.0, 0.3, 2.7, 1.7778));
        assert!(l.in_window());

        let w = WindowParams {
            rho1_n: 0.0,
            p2_n: 0.5,
            d_n: 1.0,
            nu_n: 0.5,
        };
        let l = w.to_limit_params();
        assert!(!l.in_window());
        assert!(matches!(
            l.check_window(),
            Err(Error::SeriesDivergence { .. })
        ));

        let w = WindowParams {
            rho1_n: 0.0,
            p2_n: 0.0,
            d_n: 3.0,
            nu_n: 2e6,
        };
        let l = w.to_limit_params();
        assert!(l.nu_is_infinite());
        assert_eq!(l.finite_nu(), Err(Error::NuInfinite));
        let json = serde_json::to_string(&l).unwrap();
        assert!(json.contains("\"nu\":null"));
        let back: LimitParams = serde_json::from_str(&json).unwrap();
        assert!(back.nu.is_infinite());
    }

    #[test]
    fn degree_file_parsing() {
        let text = "# comment\n4\n1 2\n\n2 1\n";
        let s = parse_degree_file(text).unwrap();
        assert_eq!(s.degrees(), &[4, 1, 1, 2]);
        assert!(matches!(
            parse_degree_file("1 2 3\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_degree_file("2\nx\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert_eq!(
            parse_degree_file("# only comments\n"),
            Err(Error::EmptySequence)
        );
        assert_eq!(s.to_run_length(), "1 2\n2 1\n4 1\n");
    }

    #[test]
    fn inline_forms() {
        assert_eq!(parse_inline_degrees("1,1,2").unwrap().degrees(), &[1, 1, 2]);
        let s = parse_inline_counts("1:10,2:30,3:60").unwrap();
        assert_eq!(s.n(), 100);
        assert!(parse_inline_counts("1-10").is_err());
    }

    fn arb_sequence() -> impl Strategy<Value = DegreeSequence> {
        prop::collection::vec(1u32..9, 1..60)
            .prop_filter_map("odd total", |v| DegreeSequence::from_degrees(v).ok())
    }

    proptest! {
        #[test]
        fn run_length_round_trip(s in arb_sequence()) {
            let back = parse_degree_file(&s.to_run_length()).unwrap();
            prop_assert_eq!(back, s.sorted());
        }

        #[test]
        fn nu_is_exact_ratio(s in arb_sequence()) {
            let num: u128 = s.degrees().iter().map(|&d| u128::from(d) * u128::from(d - 1)).sum();
            let exact = Ratio::new(num as i64, s.ell() as i64);
            let approx = *exact.numer() as f64 / *exact.denom() as f64;
            prop_assert_eq!(s.window_params().nu_n, approx);
            let total: u64 = s.counts().iter().map(|(&d, &m)| u64::from(d) * m).sum();
            prop_assert_eq!(total, s.ell());
            prop_assert_eq!(s.counts().values().sum::<u64>(), s.n() as u64);
        }

        #[test]
        fn built_sequences_recover_targets(n in 1usize..5000, rho1 in 0.0f64..3.0, p2 in 0.0f64..0.9) {
            if let Ok(b) = build_sequence(n, rho1, p2, 3) {
                let w = b.sequence.window_params();
                let nf = n as f64;
                prop_assert!((w.rho1_n - rho1).abs() <= 1.0 / nf.sqrt());
                prop_assert!((w.p2_n - p2).abs() <= 1.0 / nf);
                prop_assert_eq!(b.sequence.ell() % 2, 0);
            }
        }
    }
}
