//! Location, scale and group scores, and the analysis of their images.
//!
//! Sign conventions: the location score is `-f'/f`, the scale score is
//! `1 + x f'/f`, the group score is `U2 + U1 f'/f`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::{dlogf, DensityModel, SupportSet};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::group::GroupTransform;
use crate::root::{brent, RootOptions};

#[derive(Clone)]
pub enum ParameterKind {
    Location,
    Scale,
    Group(Arc<dyn GroupTransform>),
}

impl fmt::Debug for ParameterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParameterKind::Location => f.write_str("Location"),
            ParameterKind::Scale => f.write_str("Scale"),
            ParameterKind::Group(t) => write!(f, "Group({})", t.name()),
        }
    }
}

impl ParameterKind {
    pub fn tag(&self) -> KindTag {
        match self {
            ParameterKind::Location => KindTag::Location,
            ParameterKind::Scale => KindTag::Scale,
            ParameterKind::Group(_) => KindTag::Group,
        }
    }

    pub fn group(transform: impl GroupTransform + 'static) -> Self {
        ParameterKind::Group(Arc::new(transform))
    }
}

/// Parameter kind without the group functions; used in reports and on the
/// command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Location,
    Scale,
    Group,
}

impl fmt::Display for KindTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            KindTag::Location => "location",
            KindTag::Scale => "scale",
            KindTag::Group => "group",
        })
    }
}

impl FromStr for KindTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "loc" | "location" => Ok(KindTag::Location),
            "scale" => Ok(KindTag::Scale),
            "group" | "skewness" => Ok(KindTag::Group),
            other => Err(Error::Parse(format!("unknown parameter kind `{other}`"))),
        }
    }
}

/// `-f'(x)/f(x)`; requires full-line support.
pub fn location_score(model: &DensityModel, x: f64) -> Result<f64> {
    if model.support() != SupportSet::FullLine {
        return Err(Error::UnsupportedSupport {
            op: "location score",
            support: model.support().to_string(),
        });
    }
    Ok(-dlogf(model, x)?)
}

/// `1 + x f'(x)/f(x)`; requires a full-line or half-line support.
pub fn scale_score(model: &DensityModel, x: f64) -> Result<f64> {
    if matches!(model.support(), SupportSet::OpenInterval(..)) {
        return Err(Error::UnsupportedSupport {
            op: "scale score",
            support: model.support().to_string(),
        });
    }
    Ok(1.0 + x * dlogf(model, x)?)
}

/// `u2(x) + u1(x) f'(x)/f(x)`.
pub fn group_score(
    model: &DensityModel,
    u1: impl Fn(f64) -> f64,
    u2: impl Fn(f64) -> f64,
    x: f64,
) -> Result<f64> {
    Ok(u2(x) + u1(x) * dlogf(model, x)?)
}

pub fn kind_score(model: &DensityModel, kind: &ParameterKind, x: f64) -> Result<f64> {
    match kind {
        ParameterKind::Location => location_score(model, x),
        ParameterKind::Scale => scale_score(model, x),
        ParameterKind::Group(t) => group_score(model, |y| t.u1(y), |y| t.u2(y), x),
    }
}

pub type ScoreFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A score together with the open set it is analyzed on.
#[derive(Clone)]
pub struct ScoreFunction {
    pub kind: KindTag,
    pub domain: SupportSet,
    pub eval: ScoreFn,
}

impl ScoreFunction {
    pub fn new(
        kind: KindTag,
        domain: SupportSet,
        eval: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { kind, domain, eval: Arc::new(eval) }
    }

    /// Score of `kind` for `model`, restricted to `domain`.
    pub fn of(model: &DensityModel, kind: &ParameterKind, domain: SupportSet) -> Self {
        let m = model.clone();
        let k = kind.clone();
        Self::new(kind.tag(), domain, move |x| kind_score(&m, &k, x))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Interior probe points used for the monotonicity test.
    pub points: usize,
    /// Truncation of unbounded directions for the probe grid.
    pub half_width: f64,
    /// Endpoint values beyond this magnitude are classified as infinite.
    pub infinite_threshold: f64,
    /// Successive endpoint values closer than this are classified as finite.
    pub cauchy_tol: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            points: 129,
            half_width: 10.0,
            infinite_threshold: 1e8,
            cauchy_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsProvenance {
    Analytic,
    NumericEstimate { grid_size: usize, note: String },
}

impl fmt::Display for BoundsProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsProvenance::Analytic => f.write_str("analytic"),
            BoundsProvenance::NumericEstimate { grid_size, note } => {
                write!(f, "numeric(grid={grid_size}; {note})")
            }
        }
    }
}

/// Monotonicity, zero crossing and image `(-p_minus, p_plus)` of a score.
#[derive(Clone)]
pub struct ScoreProfile {
    pub kind: KindTag,
    pub domain: SupportSet,
    pub eval: ScoreFn,
    pub direction: Direction,
    pub crosses_zero: bool,
    pub zero: Option<f64>,
    pub p_minus: ExtendedReal,
    pub p_plus: ExtendedReal,
    pub provenance: BoundsProvenance,
    /// Numeric endpoint estimates, kept even when analytic bounds override them.
    pub numeric_p_minus: ExtendedReal,
    pub numeric_p_plus: ExtendedReal,
}

impl fmt::Debug for ScoreProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreProfile")
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("direction", &self.direction)
            .field("crosses_zero", &self.crosses_zero)
            .field("zero", &self.zero)
            .field("p_minus", &self.p_minus)
            .field("p_plus", &self.p_plus)
            .field("provenance", &self.provenance)
            .finish()
    }
}

/// Serializable view of a [`ScoreProfile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSummary {
    pub kind: KindTag,
    pub domain: SupportSet,
    pub direction: Direction,
    pub crosses_zero: bool,
    pub zero: Option<f64>,
    pub p_minus: ExtendedReal,
    pub p_plus: ExtendedReal,
    pub provenance: BoundsProvenance,
    pub numeric_p_minus: ExtendedReal,
    pub numeric_p_plus: ExtendedReal,
}

impl ScoreProfile {
    pub fn monotone_increasing(&self) -> bool {
        self.direction == Direction::Increasing
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        (self.eval)(x)
    }

    /// Both bounds positive and a zero inside the domain.
    pub fn is_regular(&self) -> bool {
        self.crosses_zero
            && self.p_minus > ExtendedReal::Finite(0.0)
            && self.p_plus > ExtendedReal::Finite(0.0)
    }

    /// Replaces the numeric bounds with known analytic ones.
    pub fn with_analytic_bounds(mut self, p_minus: ExtendedReal, p_plus: ExtendedReal) -> Self {
        self.p_minus = p_minus;
        self.p_plus = p_plus;
        self.crosses_zero = self.crosses_zero
            || (p_minus > ExtendedReal::Finite(0.0) && p_plus > ExtendedReal::Finite(0.0));
        self.provenance = BoundsProvenance::Analytic;
        self
    }

    pub fn summary(&self) -> ImageSummary {
        ImageSummary {
            kind: self.kind,
            domain: self.domain,
            direction: self.direction,
            crosses_zero: self.crosses_zero,
            zero: self.zero,
            p_minus: self.p_minus,
            p_plus: self.p_plus,
            provenance: self.provenance.clone(),
            numeric_p_minus: self.numeric_p_minus,
            numeric_p_plus: self.numeric_p_plus,
        }
    }
}

/// Strict monotonicity on `grid` (slack 0). Returns the direction or the
/// first point that breaks it.
pub fn check_monotone(eval: &dyn Fn(f64) -> Result<f64>, grid: &[f64]) -> Result<Direction> {
    let values = grid.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    monotone_direction(grid, &values)
}

fn monotone_direction(grid: &[f64], values: &[f64]) -> Result<Direction> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteLogDensity { x: grid[i] });
    }
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("monotonicity check needs two probes".into()));
    }
    let dir = if values[n - 1] > values[0] {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    for i in 1..n {
        let ok = match dir {
            Direction::Increasing => values[i] > values[i - 1],
            Direction::Decreasing => values[i] < values[i - 1],
        };
        if !ok {
            return Err(Error::NotMonotone { at: grid[i] });
        }
    }
    Ok(dir)
}

struct Limit {
    value: ExtendedReal,
    note: String,
    trail: Vec<(f64, f64)>,
}

fn endpoint_limit(
    eval: &dyn Fn(f64) -> Result<f64>,
    xs: impl Iterator<Item = f64>,
    probe: &ProbeConfig,
) -> Limit {
    let mut trail: Vec<(f64, f64)> = Vec::new();
    let mut converged = false;
    let mut last_diff = f64::INFINITY;
    for x in xs {
        let v = match eval(x) {
            Ok(v) if v.is_nan() => break,
            Ok(v) => v,
            Err(_) => break,
        };
        if v.abs() > probe.infinite_threshold {
            trail.push((x, v));
            return Limit {
                value: if v > 0.0 { ExtendedReal::PlusInfinity } else { ExtendedReal::MinusInfinity },
                note: format!("|score| > {:e} at x = {x:e}", probe.infinite_threshold),
                trail,
            };
        }
        if let Some(&(_, prev)) = trail.last() {
            let diff = (v - prev).abs();
            let scale = v.abs().max(1.0);
            if converged && (diff > last_diff || diff <= 1e-13 * scale) {
                // refinement stalled in round-off, or reached full precision
                let keep = if diff > last_diff { prev } else { v };
                trail.push((x, v));
                return Limit {
                    value: ExtendedReal::Finite(keep),
                    note: format!("cauchy-converged near x = {x:e}"),
                    trail,
                };
            }
            if diff <= probe.cauchy_tol * scale {
                converged = true;
            }
            last_diff = diff;
        }
        trail.push((x, v));
    }
    let last = trail.last().map(|p| p.1).unwrap_or(f64::NAN);
    if converged {
        return Limit {
            value: ExtendedReal::Finite(last),
            note: "cauchy-converged at end of walk".into(),
            trail,
        };
    }
    // Walk ended early: geometric shrinking of increments means a finite limit.
    let diffs: Vec<f64> = trail.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let shrinking = diffs.len() >= 4
        && diffs[diffs.len() - 3..]
            .windows(2)
            .all(|w| w[1] <= 0.75 * w[0]);
    if shrinking {
        Limit {
            value: ExtendedReal::Finite(last),
            note: "walk stopped; increments shrinking geometrically".into(),
            trail,
        }
    } else {
        let up = trail.len() >= 2 && trail[trail.len() - 1].1 > trail[trail.len() - 2].1;
        Limit {
            value: if up { ExtendedReal::PlusInfinity } else { ExtendedReal::MinusInfinity },
            note: "walk stopped; increments not shrinking".into(),
            trail,
        }
    }
}

fn walk_lower(domain: SupportSet, first: f64) -> Box<dyn Iterator<Item = f64>> {
    let (lo, _) = domain.endpoints();
    if lo.is_finite() {
        let w = first - lo;
        Box::new(
            (1..1100)
                .map(move |k| lo + w * 0.5f64.powi(k))
                .take_while(move |&x| x > lo),
        )
    } else {
        let x0 = first.abs().max(1.0);
        Box::new(
            (1..1100)
                .map(move |k| -x0 * 2f64.powi(k))
                .take_while(|x| x.is_finite()),
        )
    }
}

fn walk_upper(domain: SupportSet, last: f64) -> Box<dyn Iterator<Item = f64>> {
    let (_, hi) = domain.endpoints();
    if hi.is_finite() {
        let w = hi - last;
        Box::new(
            (1..1100)
                .map(move |k| hi - w * 0.5f64.powi(k))
                .take_while(move |&x| x < hi),
        )
    } else {
        let x0 = last.abs().max(1.0);
        Box::new(
            (1..1100)
                .map(move |k| x0 * 2f64.powi(k))
                .take_while(|x| x.is_finite()),
        )
    }
}

/// Monotonicity, zero crossing and numeric endpoint limits of a score.
pub fn analyze_image(score: &ScoreFunction, probe: &ProbeConfig) -> Result<ScoreProfile> {
    if probe.points < 64 {
        return Err(Error::InvalidConfig(format!(
            "probe grid needs at least 64 points, got {}",
            probe.points
        )));
    }
    let eval = score.eval.as_ref();
    let grid = score.domain.probe_grid(probe.points, probe.half_width);
    let values = grid.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let direction = monotone_direction(&grid, &values)?;

    let lower = endpoint_limit(eval, walk_lower(score.domain, grid[0]), probe);
    let upper = endpoint_limit(eval, walk_upper(score.domain, grid[grid.len() - 1]), probe);
    let (image_lo, image_hi) = match direction {
        Direction::Increasing => (lower.value, upper.value),
        Direction::Decreasing => (upper.value, lower.value),
    };
    let p_minus = image_lo.neg();
    let p_plus = image_hi;

    let mut points: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    points.extend(lower.trail.iter().copied());
    points.extend(upper.trail.iter().copied());
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut zero = None;
    if let Some(&(x, _)) = points.iter().find(|p| p.1 == 0.0) {
        zero = Some(x);
    } else if let Some(w) = points.windows(2).find(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0)) {
        let root = brent(
            |x| eval(x).unwrap_or(f64::NAN),
            w[0].0,
            w[1].0,
            &RootOptions::default(),
        )?;
        zero = Some(root.x);
    }
    let straddles = p_minus > ExtendedReal::Finite(0.0) && p_plus > ExtendedReal::Finite(0.0);
    let crosses_zero = zero.is_some() || straddles;

    Ok(ScoreProfile {
        kind: score.kind,
        domain: score.domain,
        eval: score.eval.clone(),
        direction,
        crosses_zero,
        zero,
        p_minus,
        p_plus,
        provenance: BoundsProvenance::NumericEstimate {
            grid_size: probe.points,
            note: format!("lower: {}; upper: {}", lower.note, upper.note),
        },
        numeric_p_minus: p_minus,
        numeric_p_plus: p_plus,
    })
}

/// Scale-score profiles on the negative and positive open half-lines of a
/// full-line model, in that order.
pub fn split_halflines(model: &DensityModel, probe: &ProbeConfig) -> Result<(ScoreProfile, ScoreProfile)> {
    if model.support() != SupportSet::FullLine {
        return Err(Error::UnsupportedSupport {
            op: "half-line split",
            support: model.support().to_string(),
        });
    }
    let neg = analyze_image(
        &ScoreFunction::of(model, &ParameterKind::Scale, SupportSet::NegativeHalfLine),
        probe,
    )?;
    let pos = analyze_image(
        &ScoreFunction::of(model, &ParameterKind::Scale, SupportSet::PositiveHalfLine),
        probe,
    )?;
    Ok((neg, pos))
}

/// Every profile needed for the characterization of `kind`: one, or the two
/// half-line pieces for a scale parameter on the full line.
pub fn score_profiles(model: &DensityModel, kind: &ParameterKind, probe: &ProbeConfig) -> Result<Vec<ScoreProfile>> {
    match kind {
        ParameterKind::Location => {
            if model.support() != SupportSet::FullLine {
                return Err(Error::UnsupportedSupport {
                    op: "location score",
                    support: model.support().to_string(),
                });
            }
            Ok(vec![analyze_image(&ScoreFunction::of(model, kind, SupportSet::FullLine), probe)?])
        }
        ParameterKind::Scale => match model.support() {
            SupportSet::FullLine => {
                let (neg, pos) = split_halflines(model, probe)?;
                Ok(vec![neg, pos])
            }
            SupportSet::PositiveHalfLine | SupportSet::NegativeHalfLine => {
                Ok(vec![analyze_image(&ScoreFunction::of(model, kind, model.support()), probe)?])
            }
            s @ SupportSet::OpenInterval(..) => Err(Error::UnsupportedSupport {
                op: "scale score",
                support: s.to_string(),
            }),
        },
        ParameterKind::Group(_) => {
            Ok(vec![analyze_image(&ScoreFunction::of(model, kind, model.support()), probe)?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::{MinusInfinity, PlusInfinity};
    use crate::group::SinhArcsinh;

    fn gaussian() -> DensityModel {
        DensityModel::new("gaussian", SupportSet::FullLine, |x| -0.5 * x * x).with_derivative(|x| -x)
    }

    fn gumbel() -> DensityModel {
        DensityModel::new("gumbel", SupportSet::FullLine, |x: f64| -x - (-x).exp())
    }

    fn finite(v: ExtendedReal) -> f64 {
        match v {
            ExtendedReal::Finite(v) => v,
            other => panic!("expected finite, got {other}"),
        }
    }

    #[test]
    fn location_scores() {
        assert!((location_score(&gaussian(), 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(location_score(&gumbel(), 0.0).unwrap().abs() < 1e-9);
        let half = DensityModel::new("exp", SupportSet::PositiveHalfLine, |x| -x);
        assert!(matches!(location_score(&half, 1.0), Err(Error::UnsupportedSupport { .. })));
    }

    #[test]
    fn scale_scores() {
        assert!(scale_score(&gaussian(), 1.0).unwrap().abs() < 1e-12);
        let gamma2 = DensityModel::new("gamma", SupportSet::PositiveHalfLine, |x: f64| x.ln() - x);
        assert!(scale_score(&gamma2, 2.0).unwrap().abs() < 1e-8);
        let weibull2 = DensityModel::new("weibull", SupportSet::PositiveHalfLine, |x: f64| {
            x.ln() - x * x
        });
        assert!(scale_score(&weibull2, 1.0).unwrap().abs() < 1e-8);
        let iv = DensityModel::new("u", SupportSet::OpenInterval(0.0, 1.0), |_| 0.0);
        assert!(scale_score(&iv, 0.5).is_err());
    }

    #[test]
    fn group_scores() {
        let g = gaussian();
        let s = SinhArcsinh;
        let v = group_score(&g, |y| s.u1(y), |y| s.u2(y), 1.0).unwrap();
        assert!((v + 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let v = group_score(&g, |y| y, |_| 1.0, 1.0).unwrap();
        assert!(v.abs() < 1e-12);
        let v = group_score(&g, |_| 1.0, |_| 0.0, 2.0).unwrap();
        assert!((v + 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_location_image_is_the_line() {
        let p = analyze_image(
            &ScoreFunction::of(&gaussian(), &ParameterKind::Location, SupportSet::FullLine),
            &ProbeConfig::default(),
        )
        .unwrap();
        assert!(p.monotone_increasing() && p.crosses_zero);
        assert_eq!(p.p_minus, PlusInfinity);
        assert_eq!(p.p_plus, PlusInfinity);
        assert!(p.zero.unwrap().abs() < 1e-12);
    }

    #[test]
    fn gumbel_location_image() {
        let p = analyze_image(
            &ScoreFunction::of(&gumbel(), &ParameterKind::Location, SupportSet::FullLine),
            &ProbeConfig::default(),
        )
        .unwrap();
        assert_eq!(p.p_minus, PlusInfinity);
        assert!((finite(p.p_plus) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn student_scale_image() {
        for &nu in &[0.5f64, 1.0, 3.0] {
            let student = DensityModel::new("student", SupportSet::FullLine, move |x: f64| {
                -(nu + 1.0) / 2.0 * (x * x / nu).ln_1p()
            })
            .with_derivative(move |x| -(nu + 1.0) * x / (nu + x * x));
            let (neg, pos) = split_halflines(&student, &ProbeConfig::default()).unwrap();
            for p in [neg, pos] {
                assert!((finite(p.p_minus) - nu).abs() < 1e-3 * nu);
                assert!((finite(p.p_plus) - 1.0).abs() < 1e-3);
                assert!((p.evaluate(p.zero.unwrap()).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn gaussian_and_laplace_scale_halflines() {
        let laplace = DensityModel::new("laplace", SupportSet::FullLine, |x: f64| -x.abs());
        for m in [gaussian(), laplace] {
            let (neg, pos) = split_halflines(&m, &ProbeConfig::default()).unwrap();
            assert_eq!(neg.direction, Direction::Increasing);
            assert_eq!(pos.direction, Direction::Decreasing);
            for p in [neg, pos] {
                assert_eq!(p.p_minus, PlusInfinity);
                assert!((finite(p.p_plus) - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn laplace_location_is_not_monotone() {
        let laplace = DensityModel::new("laplace", SupportSet::FullLine, |x: f64| -x.abs())
            .with_derivative(|x: f64| if x > 0.0 { -1.0 } else if x < 0.0 { 1.0 } else { 0.0 });
        let r = analyze_image(
            &ScoreFunction::of(&laplace, &ParameterKind::Location, SupportSet::FullLine),
            &ProbeConfig::default(),
        );
        assert!(matches!(r, Err(Error::NotMonotone { .. })));
    }

    #[test]
    fn decreasing_group_score_has_full_image() {
        let p = analyze_image(
            &ScoreFunction::of(&gaussian(), &ParameterKind::group(SinhArcsinh), SupportSet::FullLine),
            &ProbeConfig::default(),
        )
        .unwrap();
        assert_eq!(p.direction, Direction::Decreasing);
        assert_eq!(p.p_minus, PlusInfinity);
        assert_eq!(p.p_plus, PlusInfinity);
        assert!(p.is_regular());
    }

    #[test]
    fn analytic_bounds_override() {
        let p = analyze_image(
            &ScoreFunction::of(&gumbel(), &ParameterKind::Location, SupportSet::FullLine),
            &ProbeConfig::default(),
        )
        .unwrap()
        .with_analytic_bounds(PlusInfinity, ExtendedReal::Finite(1.0));
        assert_eq!(p.provenance, BoundsProvenance::Analytic);
        assert_eq!(p.p_plus, ExtendedReal::Finite(1.0));
        assert_ne!(p.numeric_p_plus, MinusInfinity);
    }

    #[test]
    fn too_few_probes_rejected() {
        let cfg = ProbeConfig { points: 10, ..ProbeConfig::default() };
        let r = analyze_image(
            &ScoreFunction::of(&gaussian(), &ParameterKind::Location, SupportSet::FullLine),
            &cfg,
        );
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
