//! Family specifications: a catalog reference or a tabulated log-density.
//!
//! JSON forms are `{"catalog": "gamma", "params": {"alpha": 2}}` and
//! `{"tabulated": {"support": "full_line", "grid": [...], "log_pdf": [...]}}`.
//! On the command line the shorthand `gamma:alpha=2` is also accepted.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{lookup, CatalogEntry};
use crate::density::{normalize, DensityModel, SupportSet};
use crate::error::{Error, Result};
use crate::interp::CubicHermite;
use crate::score::{score_profiles, KindTag, ParameterKind, ProbeConfig, ScoreProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    pub support: SupportSet,
    pub grid: Vec<f64>,
    pub log_pdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum FamilySpec {
    Catalog { name: String, params: BTreeMap<String, f64> },
    Tabulated(Tabulated),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tabulated: Option<Tabulated>,
}

impl TryFrom<RawSpec> for FamilySpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        match (raw.catalog, raw.tabulated) {
            (Some(name), None) => Ok(FamilySpec::Catalog { name, params: raw.params.unwrap_or_default() }),
            (None, Some(t)) if raw.params.is_none() => Ok(FamilySpec::Tabulated(t)),
            _ => Err("expected exactly one of `catalog` (with optional `params`) or `tabulated`".into()),
        }
    }
}

impl From<FamilySpec> for RawSpec {
    fn from(spec: FamilySpec) -> Self {
        match spec {
            FamilySpec::Catalog { name, params } => RawSpec {
                catalog: Some(name),
                params: Some(params),
                tabulated: None,
            },
            FamilySpec::Tabulated(t) => RawSpec { catalog: None, params: None, tabulated: Some(t) },
        }
    }
}

impl FamilySpec {
    pub fn catalog(name: &str) -> Self {
        FamilySpec::Catalog { name: name.to_string(), params: BTreeMap::new() }
    }

    /// Inline JSON, a path to a JSON file, or `name[:key=value,...]`.
    pub fn parse_arg(arg: &str) -> Result<Self> {
        let arg = arg.trim();
        if arg.starts_with('{') {
            return Ok(serde_json::from_str(arg)?);
        }
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            return Ok(serde_json::from_str(&text)?);
        }
        let (name, tail) = arg.split_once(':').unwrap_or((arg, ""));
        Ok(FamilySpec::Catalog { name: name.to_string(), params: parse_params(tail)? })
    }

    pub fn resolve(&self) -> Result<Family> {
        match self {
            FamilySpec::Catalog { name, params } => {
                let entry = lookup(name, params)?;
                Ok(Family { model: entry.model.clone(), entry: Some(entry) })
            }
            FamilySpec::Tabulated(t) => Ok(Family { model: t.to_model()?, entry: None }),
        }
    }
}

/// `key=value,key=value`; an empty string gives no parameters.
pub fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: `{v}`")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

impl Tabulated {
    fn validate(&self) -> Result<()> {
        if let SupportSet::OpenInterval(a, b) = self.support {
            SupportSet::interval(a, b)?;
        }
        if self.grid.len() < 2 || self.grid.len() != self.log_pdf.len() {
            return Err(Error::InvalidArgument(format!(
                "tabulated density needs matching grid and log_pdf of length >= 2, got {} and {}",
                self.grid.len(),
                self.log_pdf.len()
            )));
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("tabulated grid must be strictly increasing".into()));
        }
        if let Some(&x) = self.grid.iter().find(|&&x| !self.support.contains(x)) {
            return Err(Error::OutsideSupport { x });
        }
        if let Some(i) = self.log_pdf.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLogDensity { x: self.grid[i] });
        }
        Ok(())
    }

    /// Normalized density through a monotone cubic interpolant of the table.
    /// Beyond the grid the log-density continues as a concave quadratic
    /// matching the end slope and the end second difference; it is `-inf`
    /// where that continuation would not decay.
    pub fn to_model(&self) -> Result<DensityModel> {
        self.validate()?;
        let interp = CubicHermite::monotone(self.grid.clone(), self.log_pdf.clone())?;
        let (xs, ys) = (&self.grid, &self.log_pdf);
        let n = xs.len();
        let curvature = |i: usize| {
            if n < 3 {
                return 0.0;
            }
            let (h1, h2) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
            let d = (ys[i + 2] - ys[i + 1]) / h2 - (ys[i + 1] - ys[i]) / h1;
            (2.0 * d / (h1 + h2)).min(0.0)
        };
        let (s_lo, s_hi) = interp.end_slopes();
        let lo = Tail { x: xs[0], y: ys[0], slope: s_lo, curv: curvature(0), decays: s_lo > 0.0 };
        let hi = Tail { x: xs[n - 1], y: ys[n - 1], slope: s_hi, curv: curvature(n.saturating_sub(3)), decays: s_hi < 0.0 };
        let lo = Tail { decays: lo.decays || lo.curv < 0.0, ..lo };
        let hi = Tail { decays: hi.decays || hi.curv < 0.0, ..hi };
        let eval = move |x: f64| -> (f64, f64) {
            if x < lo.x {
                lo.eval(x)
            } else if x > hi.x {
                hi.eval(x)
            } else {
                interp.eval_with_derivative(x)
            }
        };
        let e2 = eval.clone();
        let model = DensityModel::new("tabulated", self.support, move |x| eval(x).0)
            .with_derivative(move |x| e2(x).1);
        Ok(normalize(&model, 1e-10)?.1)
    }

    /// Samples `model.log_pdf` on `points` equal steps over the region where
    /// it stays within `drop` of its peak (support probe window only).
    pub fn from_model(model: &DensityModel, points: usize, drop: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument("tabulation needs at least two points".into()));
        }
        let support = model.support();
        let probe = support.probe_grid(401, 10.0);
        let peak = probe
            .iter()
            .map(|&x| model.log_pdf(x))
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::NonFiniteLogDensity { x: probe[probe.len() / 2] });
        }
        let keep = |x: f64| model.log_pdf(x) > peak - drop;
        let (a, b) = support.endpoints();
        let reach = |start: f64, dir: f64| {
            let mut x = start;
            for k in 0..12 {
                let next = start + dir * 2f64.powi(k);
                x = next;
                if !keep(next) {
                    break;
                }
            }
            x
        };
        let (lo, hi) = match support {
            SupportSet::FullLine => (reach(0.0, -1.0), reach(0.0, 1.0)),
            SupportSet::PositiveHalfLine => (1e-4, reach(0.0, 1.0)),
            SupportSet::NegativeHalfLine => (reach(0.0, -1.0), -1e-4),
            SupportSet::OpenInterval(..) => (a + 1e-6 * (b - a), b - 1e-6 * (b - a)),
        };
        let grid: Vec<f64> = (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect();
        let log_pdf: Vec<f64> = grid.iter().map(|&x| model.log_pdf(x).max(peak - 4.0 * drop)).collect();
        Ok(Tabulated { support, grid, log_pdf })
    }
}

#[derive(Debug, Clone, Copy)]
struct Tail {
    x: f64,
    y: f64,
    slope: f64,
    curv: f64,
    decays: bool,
}

impl Tail {
    fn eval(&self, x: f64) -> (f64, f64) {
        if !self.decays {
            return (f64::NEG_INFINITY, f64::NAN);
        }
        let t = x - self.x;
        (self.y + self.slope * t + 0.5 * self.curv * t * t, self.slope + self.curv * t)
    }
}

/// A resolved family: the model plus its catalog entry when it has one.
#[derive(Debug, Clone)]
pub struct Family {
    pub model: DensityModel,
    pub entry: Option<CatalogEntry>,
}

impl Family {
    pub fn parameter_kind(&self, kind: KindTag) -> Result<ParameterKind> {
        match (&self.entry, kind) {
            (Some(e), _) => e.parameter_kind(kind),
            (None, KindTag::Location) => Ok(ParameterKind::Location),
            (None, KindTag::Scale) => Ok(ParameterKind::Scale),
            (None, KindTag::Group) => Err(Error::NotCharacterizable(
                "group kind needs a catalog family with a transform".into(),
            )),
        }
    }

    /// Density whose score is analyzed for `kind`.
    pub fn score_model(&self, kind: KindTag) -> &DensityModel {
        match &self.entry {
            Some(e) => e.score_model(kind),
            None => &self.model,
        }
    }

    pub fn profiles(&self, kind: KindTag, probe: &ProbeConfig) -> Result<Vec<ScoreProfile>> {
        match &self.entry {
            Some(e) => e.analyze(kind, probe),
            None => score_profiles(&self.model, &self.parameter_kind(kind)?, probe),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let a = FamilySpec::parse_arg("gamma:alpha=2").unwrap();
        let b = FamilySpec::parse_arg(r#"{"catalog":"gamma","params":{"alpha":2}}"#).unwrap();
        assert_eq!(a, b);
        assert!(FamilySpec::parse_arg(r#"{"catalog":"gamma","tabulated":{"support":"full_line","grid":[0,1],"log_pdf":[0,0]}}"#).is_err());
        assert!(matches!(
            FamilySpec::parse_arg("gumbel:x").unwrap_err(),
            Error::Parse(_)
        ));
        assert!(matches!(
            FamilySpec::parse_arg("nope").unwrap().resolve(),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn tabulated_gaussian() {
        let grid: Vec<f64> = (0..801).map(|i| -8.0 + 0.02 * i as f64).collect();
        let log_pdf = grid.iter().map(|x| -x * x / 2.0).collect();
        let t = Tabulated { support: SupportSet::FullLine, grid, log_pdf };
        let m = t.to_model().unwrap();
        let c = -0.5 * (2.0 * std::f64::consts::PI).ln();
        for &x in &[-2.0, 0.01, 1.5] {
            assert!((m.log_pdf(x) - (c - x * x / 2.0)).abs() < 1e-4);
            // slopes flatten at the tabulated extremum
            assert!((m.analytic_dlog_pdf(x).unwrap() + x).abs() < 1e-2);
        }
        let json = serde_json::to_string(&FamilySpec::Tabulated(t.clone())).unwrap();
        assert_eq!(serde_json::from_str::<FamilySpec>(&json).unwrap(), FamilySpec::Tabulated(t));
    }

    #[test]
    fn tabulation_roundtrip() {
        let f = FamilySpec::catalog("logistic").resolve().unwrap().model;
        let t = Tabulated::from_model(&f, 2001, 60.0).unwrap();
        let g = t.to_model().unwrap();
        for &x in &[-5.0, 0.0, 3.0] {
            assert!((g.log_pdf(x) - f.log_pdf(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let t = Tabulated { support: SupportSet::PositiveHalfLine, grid: vec![-1.0, 1.0], log_pdf: vec![0.0, 0.0] };
        assert!(matches!(t.to_model(), Err(Error::OutsideSupport { .. })));
        let t = Tabulated { support: SupportSet::FullLine, grid: vec![1.0, 0.0], log_pdf: vec![0.0, 0.0] };
        assert!(t.to_model().is_err());
    }
}
