//! Zero-sum score tuples, projectability and the minimal covering and
//! necessary sample sizes.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::score::ScoreProfile;

/// Relative fuzz applied before ceilings and bound comparisons.
pub const RATIO_FUZZ: f64 = 1e-9;

/// A sample size that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleSize {
    Finite(usize),
    Infinite,
}

impl SampleSize {
    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (SampleSize::Finite(a), SampleSize::Finite(b)) => SampleSize::Finite(a.max(b)),
            _ => SampleSize::Infinite,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, SampleSize::Finite(_))
    }
}

impl PartialOrd for SampleSize {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SampleSize {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SampleSize::Finite(a), SampleSize::Finite(b)) => a.cmp(b),
            (SampleSize::Finite(_), SampleSize::Infinite) => Ordering::Less,
            (SampleSize::Infinite, SampleSize::Finite(_)) => Ordering::Greater,
            (SampleSize::Infinite, SampleSize::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Finite(n) => f.pad(&n.to_string()),
            SampleSize::Infinite => f.pad("inf"),
        }
    }
}

impl Serialize for SampleSize {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SampleSize::Finite(n) => serializer.serialize_u64(*n as u64),
            SampleSize::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SampleSize {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(n) => Ok(SampleSize::Finite(n as usize)),
            Repr::Text(s) if s == "inf" => Ok(SampleSize::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("bad sample size `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McssResult {
    pub value: SampleSize,
    pub p_minus: ExtendedReal,
    pub p_plus: ExtendedReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnssResult {
    pub value: SampleSize,
    /// Negative and positive half-line results for a scale parameter on the line.
    pub per_halfline: Option<Box<(MnssResult, MnssResult)>>,
}

impl MnssResult {
    pub fn finite(n: usize) -> Self {
        Self { value: SampleSize::Finite(n), per_halfline: None }
    }

    pub fn infinite() -> Self {
        Self { value: SampleSize::Infinite, per_halfline: None }
    }
}

/// Open interval with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// An element `b` of the hyperplane `sum b_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSumTuple {
    b: Vec<f64>,
}

impl ZeroSumTuple {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tuple needs finite entries".into()));
        }
        let sum: f64 = b.iter().sum();
        let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if sum.abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!("entries sum to {sum}, not 0")));
        }
        Ok(Self { b })
    }

    /// Score values `score(x_i)` of a sample at its root; membership in `B_n`.
    pub fn from_scores(scores: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(scores.into_iter().collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.b
    }

    /// Every entry strictly inside `(-p_minus, p_plus)`.
    pub fn within_image(&self, p_minus: ExtendedReal, p_plus: ExtendedReal) -> bool {
        self.b
            .iter()
            .all(|&v| ExtendedReal::Finite(v) > p_minus.neg() && ExtendedReal::Finite(v) < p_plus)
    }
}

fn check_bounds(p_minus: ExtendedReal, p_plus: ExtendedReal) -> Result<()> {
    let zero = ExtendedReal::Finite(0.0);
    let bad = |p: ExtendedReal| p <= zero || matches!(p, ExtendedReal::Finite(v) if v.is_nan());
    if bad(p_minus) || bad(p_plus) {
        return Err(Error::InvalidBounds {
            p_minus: p_minus.to_f64(),
            p_plus: p_plus.to_f64(),
        });
    }
    Ok(())
}

/// Minimal covering sample size of the image `(-p_minus, p_plus)`.
pub fn mcss(p_minus: ExtendedReal, p_plus: ExtendedReal) -> Result<McssResult> {
    check_bounds(p_minus, p_plus)?;
    let value = match (p_minus, p_plus) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
            let ratio = a.max(b) / a.min(b) + 1.0;
            let n = (ratio * (1.0 - RATIO_FUZZ)).ceil();
            SampleSize::Finite((n as usize).max(2))
        }
        (ExtendedReal::PlusInfinity, ExtendedReal::PlusInfinity) => SampleSize::Finite(2),
        _ => SampleSize::Infinite,
    };
    Ok(McssResult { value, p_minus, p_plus })
}

fn times(k: usize, p: ExtendedReal) -> ExtendedReal {
    match p {
        ExtendedReal::Finite(v) => ExtendedReal::Finite(k as f64 * v),
        _ if k == 0 => ExtendedReal::Finite(0.0),
        other => other,
    }
}

fn emin(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal {
    if a <= b {
        a
    } else {
        b
    }
}

/// Coordinate projection of the zero-sum hyperplane intersected with the
/// open box `(-p_minus, p_plus)^n`.
pub fn projection_interval(p_minus: ExtendedReal, p_plus: ExtendedReal, n: usize) -> Interval {
    let k = n.saturating_sub(1);
    Interval {
        lo: emin(p_minus, times(k, p_plus)).neg(),
        hi: emin(p_plus, times(k, p_minus)),
    }
}

fn covers(limit: ExtendedReal, target: ExtendedReal) -> bool {
    match (limit, target) {
        (ExtendedReal::Finite(l), ExtendedReal::Finite(t)) => l >= t * (1.0 - RATIO_FUZZ),
        (l, t) => l >= t,
    }
}

/// Projection equals the full image.
pub fn projection_covers_image(p_minus: ExtendedReal, p_plus: ExtendedReal, n: usize) -> bool {
    let k = n.saturating_sub(1);
    // lo = -min(p-, k p+) equals -p- iff k p+ >= p-, and symmetrically.
    covers(times(k, p_plus), p_minus) && covers(times(k, p_minus), p_plus)
}

/// `max <= (n - 1) min` for finite bounds; equal infinite bounds always
/// qualify for `n >= 2`, a single infinite bound never does.
pub fn ratio_condition(p_minus: ExtendedReal, p_plus: ExtendedReal, n: usize) -> bool {
    match (p_minus, p_plus) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
            a.max(b) <= (n.saturating_sub(1)) as f64 * a.min(b) * (1.0 + RATIO_FUZZ)
        }
        (ExtendedReal::PlusInfinity, ExtendedReal::PlusInfinity) => n >= 2,
        _ => false,
    }
}

/// Whether every coordinate projection at size `n` covers the image. The
/// three equivalent characterizations are all evaluated and must agree.
pub fn is_projectable(p_minus: ExtendedReal, p_plus: ExtendedReal, n: usize) -> Result<bool> {
    let a = projection_covers_image(p_minus, p_plus, n);
    let b = match mcss(p_minus, p_plus)?.value {
        SampleSize::Finite(m) => n >= m,
        SampleSize::Infinite => false,
    };
    let c = ratio_condition(p_minus, p_plus, n);
    if a != b || b != c {
        return Err(Error::NonConvergence(format!(
            "projectability tests disagree for ({p_minus}, {p_plus}), n = {n}: {a} {b} {c}"
        )));
    }
    Ok(a)
}

/// Brute-force oracle for projectability. The closed image is discretized
/// into `grid` points; the reachable sums of `n - 1` grid coordinates are
/// enumerated, and an interior value `b1` is attainable when `-b1` lies
/// strictly between two reachable sums (the open box is connected) or
/// equals a sum of interior points.
pub fn brute_force_projectable(p_minus: f64, p_plus: f64, n: usize, grid: usize) -> Result<bool> {
    if !(1..=8).contains(&n) || !(3..=101).contains(&grid) {
        return Err(Error::BudgetExceeded(format!(
            "n = {n} (max 8), grid = {grid} (3..=101)"
        )));
    }
    if !(p_minus > 0.0 && p_plus > 0.0 && p_minus.is_finite() && p_plus.is_finite()) {
        return Err(Error::InvalidBounds { p_minus, p_plus });
    }
    let g = grid - 1;
    let h = (p_minus + p_plus) / g as f64;
    let value = |i: usize| -p_minus + i as f64 * h;
    let k = n - 1;
    // reachable[s]: index sum s is reachable with k coordinates in 0..=g;
    // interior[s]: reachable using interior indices 1..g-1 only.
    let mut reachable = vec![false; k * g + 1];
    let mut interior = vec![false; k * g + 1];
    reachable[0] = true;
    interior[0] = true;
    for _ in 0..k {
        let mut next_r = vec![false; k * g + 1];
        let mut next_i = vec![false; k * g + 1];
        for s in 0..=k * g {
            if reachable[s] {
                for i in 0..=g {
                    if s + i <= k * g {
                        next_r[s + i] = true;
                    }
                }
            }
            if interior[s] {
                for i in 1..g {
                    if s + i <= k * g {
                        next_i[s + i] = true;
                    }
                }
            }
        }
        reachable = next_r;
        interior = next_i;
    }
    let sum_value = |s: usize| -(k as f64) * p_minus + s as f64 * h;
    let eps = 1e-9 * h;
    for i in 1..g {
        let target = -value(i);
        let exact = (0..=k * g).any(|s| interior[s] && (sum_value(s) - target).abs() <= eps);
        let below = (0..=k * g).any(|s| reachable[s] && sum_value(s) < target - eps);
        let above = (0..=k * g).any(|s| reachable[s] && sum_value(s) > target + eps);
        if !(exact || (below && above)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `max(MCSS, 3)` for one profile, or the larger of the two half-line
/// results for a scale parameter on the whole line.
pub fn mnss(profiles: &[ScoreProfile]) -> Result<MnssResult> {
    let single = |p: &ScoreProfile| -> Result<MnssResult> {
        if !p.is_regular() {
            return Err(Error::NotCharacterizable(format!(
                "{} score on {} does not cross zero inside (-{}, {})",
                p.kind, p.domain, p.p_minus, p.p_plus
            )));
        }
        let m = mcss(p.p_minus, p.p_plus)?;
        Ok(MnssResult {
            value: m.value.max(SampleSize::Finite(3)),
            per_halfline: None,
        })
    };
    match profiles {
        [p] => single(p),
        [neg, pos] => {
            let a = single(neg)?;
            let b = single(pos)?;
            Ok(MnssResult {
                value: a.value.max(b.value),
                per_halfline: Some(Box::new((a, b))),
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "mnss expects one or two profiles, got {}",
            other.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::PlusInfinity;

    fn f(v: f64) -> ExtendedReal {
        ExtendedReal::Finite(v)
    }

    #[test]
    fn mcss_examples() {
        assert_eq!(mcss(f(1.0), f(1.0)).unwrap().value, SampleSize::Finite(2));
        assert_eq!(mcss(f(1.0), f(3.0)).unwrap().value, SampleSize::Finite(4));
        assert_eq!(mcss(PlusInfinity, f(1.0)).unwrap().value, SampleSize::Infinite);
        assert_eq!(mcss(PlusInfinity, PlusInfinity).unwrap().value, SampleSize::Finite(2));
        assert!(matches!(mcss(f(0.0), f(1.0)), Err(Error::InvalidBounds { .. })));
        assert!(matches!(mcss(f(-1.0), f(1.0)), Err(Error::InvalidBounds { .. })));
    }

    #[test]
    fn mcss_fuzz_does_not_inflate() {
        assert_eq!(mcss(f(1.0), f(2.000_000_000_1)).unwrap().value, SampleSize::Finite(3));
        assert_eq!(mcss(f(1.0), f(2.1)).unwrap().value, SampleSize::Finite(4));
    }

    #[test]
    fn projection_examples() {
        let p = projection_interval(PlusInfinity, f(1.0), 3);
        assert_eq!((p.lo, p.hi), (f(-2.0), f(1.0)));
        let p = projection_interval(f(1.0), f(3.0), 3);
        assert_eq!((p.lo, p.hi), (f(-1.0), f(2.0)));
        let p = projection_interval(f(1.0), f(1.0), 2);
        assert_eq!((p.lo, p.hi), (f(-1.0), f(1.0)));
    }

    #[test]
    fn projectable_examples() {
        assert!(is_projectable(f(1.0), f(3.0), 4).unwrap());
        assert!(!is_projectable(f(1.0), f(3.0), 3).unwrap());
        assert!(is_projectable(PlusInfinity, PlusInfinity, 2).unwrap());
        assert!(!is_projectable(PlusInfinity, f(1.0), 100).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_projectable(1.0, 1.0, 2, 41).unwrap());
        assert!(!brute_force_projectable(1.0, 3.0, 3, 41).unwrap());
        assert!(brute_force_projectable(1.0, 3.0, 4, 41).unwrap());
        assert!(matches!(
            brute_force_projectable(1.0, 3.0, 9, 41),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            brute_force_projectable(1.0, 3.0, 3, 201),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn zero_sum_tuples() {
        let t = ZeroSumTuple::new(vec![0.5, -1.5, 1.0]).unwrap();
        assert!(t.within_image(f(2.0), f(1.5)));
        assert!(!t.within_image(f(1.5), f(1.5)));
        assert!(ZeroSumTuple::new(vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn sample_size_serde() {
        let s = serde_json::to_string(&vec![SampleSize::Finite(3), SampleSize::Infinite]).unwrap();
        assert_eq!(s, r#"[3,"inf"]"#);
        let back: Vec<SampleSize> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![SampleSize::Finite(3), SampleSize::Infinite]);
    }
}
