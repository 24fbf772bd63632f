//! The nine reference families with their analytic scores, image bounds,
//! closed-form estimators and expected minimal necessary sample sizes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::coverage::{mnss, MnssResult, SampleSize, RATIO_FUZZ};
use crate::density::{DensityModel, RealFn, SupportSet};
use crate::error::{Error, Result};
use crate::estimator::ClosedForm;
use crate::extended::{ExtendedReal, PlusInfinity};
use crate::group::{group_member, GroupTransform, SinhArcsinh};
use crate::score::{score_profiles, KindTag, ParameterKind, ProbeConfig, ScoreProfile};

pub const FAMILY_NAMES: [&str; 9] = [
    "gaussian",
    "gamma",
    "generalized_gaussian",
    "laplace",
    "weibull",
    "gumbel",
    "student",
    "logistic",
    "sinh_arcsinh_skew_normal",
];

/// Whether a parameter kind admits the characterization, and why not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindStatus {
    Characterizable,
    /// The score is not strictly monotone.
    NotMonotone,
    /// The support does not allow this parameter kind.
    UnsupportedSupport,
}

#[derive(Clone)]
pub struct KindEntry {
    pub kind: KindTag,
    pub status: KindStatus,
    /// Human-readable score formula.
    pub formula: &'static str,
    /// Score as a function of the (base) variable.
    pub analytic_score: Option<RealFn>,
    /// `(p_minus, p_plus)` per analyzed piece (two for a scale on the line).
    pub analytic_bounds: Vec<(ExtendedReal, ExtendedReal)>,
    pub expected_mnss: Option<SampleSize>,
    pub closed_form: Option<ClosedForm>,
}

impl fmt::Debug for KindEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KindEntry")
            .field("kind", &self.kind)
            .field("status", &self.status)
            .field("formula", &self.formula)
            .field("analytic_bounds", &self.analytic_bounds)
            .field("expected_mnss", &self.expected_mnss)
            .field("closed_form", &self.closed_form)
            .finish()
    }
}

/// Base density and transform of a group family.
#[derive(Debug, Clone)]
pub struct GroupPart {
    pub base: DensityModel,
    pub transform: Arc<dyn GroupTransform>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// Normalized member density at the given parameters.
    pub model: DensityModel,
    pub kinds: Vec<KindEntry>,
    pub needs_scale_identification: bool,
    pub group: Option<GroupPart>,
}

impl CatalogEntry {
    pub fn kind(&self, kind: KindTag) -> Option<&KindEntry> {
        self.kinds.iter().find(|k| k.kind == kind)
    }

    pub fn characterizable_kinds(&self) -> Vec<KindTag> {
        self.kinds
            .iter()
            .filter(|k| k.status == KindStatus::Characterizable)
            .map(|k| k.kind)
            .collect()
    }

    pub fn closed_form(&self, kind: KindTag) -> Option<ClosedForm> {
        self.kind(kind).and_then(|k| k.closed_form)
    }

    /// Parameter kind with its group functions attached.
    pub fn parameter_kind(&self, kind: KindTag) -> Result<ParameterKind> {
        match kind {
            KindTag::Location => Ok(ParameterKind::Location),
            KindTag::Scale => Ok(ParameterKind::Scale),
            KindTag::Group => self
                .group
                .as_ref()
                .map(|g| ParameterKind::Group(g.transform.clone()))
                .ok_or_else(|| Error::NotCharacterizable(format!("{} has no group structure", self.name))),
        }
    }

    /// Density whose score is analyzed for `kind`: the group base for the
    /// group kind, the member density otherwise.
    pub fn score_model(&self, kind: KindTag) -> &DensityModel {
        match (kind, &self.group) {
            (KindTag::Group, Some(g)) => &g.base,
            _ => &self.model,
        }
    }

    /// Score profiles with analytic bounds substituted where known.
    pub fn analyze(&self, kind: KindTag, probe: &ProbeConfig) -> Result<Vec<ScoreProfile>> {
        let k = self.parameter_kind(kind)?;
        let profiles = score_profiles(self.score_model(kind), &k, probe)?;
        let bounds = self.kind(kind).map(|e| e.analytic_bounds.clone()).unwrap_or_default();
        if bounds.len() != profiles.len() {
            return Ok(profiles);
        }
        Ok(profiles
            .into_iter()
            .zip(bounds)
            .map(|(p, (pm, pp))| p.with_analytic_bounds(pm, pp))
            .collect())
    }

    /// Numeric profiles only, ignoring the analytic bounds.
    pub fn analyze_numeric(&self, kind: KindTag, probe: &ProbeConfig) -> Result<Vec<ScoreProfile>> {
        let k = self.parameter_kind(kind)?;
        score_profiles(self.score_model(kind), &k, probe)
    }

    /// MNSS computed by the coverage module from the analyzed profiles.
    pub fn computed_mnss(&self, kind: KindTag, probe: &ProbeConfig) -> Result<MnssResult> {
        mnss(&self.analyze(kind, probe)?)
    }
}

/// Tabulated MNSS of `entry` for `kind`.
pub fn expected_mnss(entry: &CatalogEntry, kind: KindTag) -> Result<SampleSize> {
    entry
        .kind(kind)
        .filter(|k| k.status == KindStatus::Characterizable)
        .and_then(|k| k.expected_mnss)
        .ok_or_else(|| Error::NotCharacterizable(format!("{}/{kind}", entry.name)))
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn check_keys(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParams(format!("unexpected parameter `{k}`")));
    }
    if let Some((k, v)) = params.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidParams(format!("{k} = {v} is not finite")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive, got {v}")))
    }
}

fn fin(v: f64) -> ExtendedReal {
    ExtendedReal::Finite(v)
}

fn characterizable(
    kind: KindTag,
    formula: &'static str,
    score: impl Fn(f64) -> f64 + Send + Sync + 'static,
    bounds: Vec<(ExtendedReal, ExtendedReal)>,
    expected: SampleSize,
    closed_form: Option<ClosedForm>,
) -> KindEntry {
    KindEntry {
        kind,
        status: KindStatus::Characterizable,
        formula,
        analytic_score: Some(Arc::new(score)),
        analytic_bounds: bounds,
        expected_mnss: Some(expected),
        closed_form,
    }
}

fn excluded(kind: KindTag, status: KindStatus, formula: &'static str) -> KindEntry {
    KindEntry {
        kind,
        status,
        formula,
        analytic_score: None,
        analytic_bounds: Vec::new(),
        expected_mnss: None,
        closed_form: None,
    }
}

fn with_score(mut k: KindEntry, score: impl Fn(f64) -> f64 + Send + Sync + 'static) -> KindEntry {
    k.analytic_score = Some(Arc::new(score));
    k
}

const INF: SampleSize = SampleSize::Infinite;

fn halves(p_minus: ExtendedReal, p_plus: ExtendedReal) -> Vec<(ExtendedReal, ExtendedReal)> {
    vec![(p_minus, p_plus), (p_minus, p_plus)]
}

/// Student-t scale MNSS as tabulated: `ceil(1 + 1/nu)` below one, 3 at one,
/// `ceil(1 + nu)` above.
pub fn student_scale_mnss(nu: f64) -> SampleSize {
    let up = |v: f64| (v * (1.0 - RATIO_FUZZ)).ceil() as usize;
    if nu < 1.0 {
        SampleSize::Finite(up(1.0 + 1.0 / nu))
    } else if nu == 1.0 {
        SampleSize::Finite(3)
    } else {
        SampleSize::Finite(up(1.0 + nu))
    }
}

fn gaussian_model() -> DensityModel {
    let c = -0.5 * (2.0 * PI).ln();
    DensityModel::new("gaussian", SupportSet::FullLine, move |x| -0.5 * x * x + c)
        .with_derivative(|x| -x)
        .assume_normalized()
}

fn gaussian() -> CatalogEntry {
    CatalogEntry {
        name: "gaussian".into(),
        params: BTreeMap::new(),
        model: gaussian_model(),
        kinds: vec![
            characterizable(
                KindTag::Location,
                "x",
                |x| x,
                vec![(PlusInfinity, PlusInfinity)],
                SampleSize::Finite(3),
                Some(ClosedForm::GaussianMean),
            ),
            characterizable(
                KindTag::Scale,
                "1 - x^2",
                |x| 1.0 - x * x,
                halves(PlusInfinity, fin(1.0)),
                INF,
                Some(ClosedForm::GaussianRate),
            ),
        ],
        needs_scale_identification: false,
        group: None,
    }
}

fn gamma(params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    check_keys(params, &["alpha"])?;
    let alpha = positive("alpha", param(params, "alpha", 2.0))?;
    let c = -ln_gamma(alpha);
    let model = DensityModel::new("gamma", SupportSet::PositiveHalfLine, move |x: f64| {
        (alpha - 1.0) * x.ln() - x + c
    })
    .with_derivative(move |x| (alpha - 1.0) / x - 1.0)
    .with_param("alpha", alpha)
    .assume_normalized();
    Ok(CatalogEntry {
        name: "gamma".into(),
        params: params_map(&[("alpha", alpha)]),
        model,
        kinds: vec![
            excluded(KindTag::Location, KindStatus::UnsupportedSupport, "n/a (support is the positive half-line)"),
            characterizable(
                KindTag::Scale,
                "alpha - x",
                move |x| alpha - x,
                vec![(PlusInfinity, fin(alpha))],
                INF,
                Some(ClosedForm::GammaRate { alpha }),
            ),
        ],
        needs_scale_identification: true,
        group: None,
    })
}

fn generalized_gaussian(params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    check_keys(params, &["alpha", "gamma"])?;
    let alpha = positive("alpha", param(params, "alpha", 1.0))?;
    let g = param(params, "gamma", 1.0);
    if g == 0.0 {
        return Err(Error::InvalidParams("gamma must differ from zero".into()));
    }
    let c = g.abs().ln() + alpha * alpha.ln() - ln_gamma(alpha);
    let model = DensityModel::new("generalized_gaussian", SupportSet::FullLine, move |x: f64| {
        alpha * g * x - alpha * (g * x).exp() + c
    })
    .with_derivative(move |x: f64| alpha * g * (1.0 - (g * x).exp()))
    .with_param("alpha", alpha)
    .with_param("gamma", g)
    .assume_normalized();
    let loc_bounds = if g > 0.0 {
        (fin(alpha * g), PlusInfinity)
    } else {
        (PlusInfinity, fin(alpha * g.abs()))
    };
    Ok(CatalogEntry {
        name: "generalized_gaussian".into(),
        params: params_map(&[("alpha", alpha), ("gamma", g)]),
        model,
        kinds: vec![
            characterizable(
                KindTag::Location,
                "-alpha gamma (1 - exp(gamma x))",
                move |x: f64| -alpha * g * (1.0 - (g * x).exp()),
                vec![loc_bounds],
                INF,
                Some(ClosedForm::FergusonLocation { gamma: g }),
            ),
            characterizable(
                KindTag::Scale,
                "alpha gamma x (1 - exp(gamma x)) + 1",
                move |x: f64| alpha * g * x * (1.0 - (g * x).exp()) + 1.0,
                halves(PlusInfinity, fin(1.0)),
                INF,
                None,
            ),
        ],
        needs_scale_identification: false,
        group: None,
    })
}

fn sign_derivative(x: f64) -> f64 {
    if x > 0.0 {
        -1.0
    } else if x < 0.0 {
        1.0
    } else {
        0.0
    }
}

fn laplace() -> CatalogEntry {
    let model = DensityModel::new("laplace", SupportSet::FullLine, |x: f64| -x.abs() - 2f64.ln())
        .with_derivative(sign_derivative)
        .assume_normalized();
    CatalogEntry {
        name: "laplace".into(),
        params: BTreeMap::new(),
        model,
        kinds: vec![
            with_score(
                excluded(KindTag::Location, KindStatus::NotMonotone, "sign(x)"),
                |x| -sign_derivative(x),
            ),
            characterizable(
                KindTag::Scale,
                "1 - |x|",
                |x: f64| 1.0 - x.abs(),
                halves(PlusInfinity, fin(1.0)),
                INF,
                Some(ClosedForm::LaplaceRate),
            ),
        ],
        needs_scale_identification: false,
        group: None,
    }
}

fn weibull(params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    check_keys(params, &["k"])?;
    let k = positive("k", param(params, "k", 2.0))?;
    let lk = k.ln();
    let model = DensityModel::new("weibull", SupportSet::PositiveHalfLine, move |x: f64| {
        lk + (k - 1.0) * x.ln() - x.powf(k)
    })
    .with_derivative(move |x: f64| (k - 1.0) / x - k * x.powf(k - 1.0))
    .with_param("k", k)
    .assume_normalized();
    Ok(CatalogEntry {
        name: "weibull".into(),
        params: params_map(&[("k", k)]),
        model,
        kinds: vec![
            excluded(KindTag::Location, KindStatus::UnsupportedSupport, "n/a (support is the positive half-line)"),
            characterizable(
                KindTag::Scale,
                "k (1 - x^k)",
                move |x: f64| k * (1.0 - x.powf(k)),
                vec![(PlusInfinity, fin(k))],
                INF,
                Some(ClosedForm::WeibullRate { k }),
            ),
        ],
        needs_scale_identification: true,
        group: None,
    })
}

fn gumbel() -> CatalogEntry {
    let model = DensityModel::new("gumbel", SupportSet::FullLine, |x: f64| -x - (-x).exp())
        .with_derivative(|x: f64| (-x).exp() - 1.0)
        .assume_normalized();
    CatalogEntry {
        name: "gumbel".into(),
        params: BTreeMap::new(),
        model,
        kinds: vec![
            characterizable(
                KindTag::Location,
                "1 - exp(-x)",
                |x: f64| 1.0 - (-x).exp(),
                vec![(PlusInfinity, fin(1.0))],
                INF,
                Some(ClosedForm::GumbelLocation),
            ),
            characterizable(
                KindTag::Scale,
                "x (exp(-x) - 1) + 1",
                |x: f64| x * ((-x).exp() - 1.0) + 1.0,
                halves(PlusInfinity, fin(1.0)),
                INF,
                None,
            ),
        ],
        needs_scale_identification: false,
        group: None,
    }
}

fn student(params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    check_keys(params, &["nu"])?;
    let nu = positive("nu", param(params, "nu", 3.0))?;
    let c = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
    let model = DensityModel::new("student", SupportSet::FullLine, move |x: f64| {
        -0.5 * (nu + 1.0) * (x * x / nu).ln_1p() + c
    })
    .with_derivative(move |x| -(nu + 1.0) * x / (nu + x * x))
    .with_param("nu", nu)
    .assume_normalized();
    Ok(CatalogEntry {
        name: "student".into(),
        params: params_map(&[("nu", nu)]),
        model,
        kinds: vec![
            with_score(
                excluded(KindTag::Location, KindStatus::NotMonotone, "(nu + 1) x / (nu + x^2)"),
                move |x| (nu + 1.0) * x / (nu + x * x),
            ),
            characterizable(
                KindTag::Scale,
                "nu (1 - x^2) / (nu + x^2)",
                move |x| nu * (1.0 - x * x) / (nu + x * x),
                halves(fin(nu), fin(1.0)),
                student_scale_mnss(nu),
                None,
            ),
        ],
        needs_scale_identification: false,
        group: None,
    })
}

fn logistic() -> CatalogEntry {
    let model = DensityModel::new("logistic", SupportSet::FullLine, |x: f64| {
        -x.abs() - 2.0 * (-x.abs()).exp().ln_1p()
    })
    .with_derivative(|x: f64| -(0.5 * x).tanh())
    .assume_normalized();
    CatalogEntry {
        name: "logistic".into(),
        params: BTreeMap::new(),
        model,
        kinds: vec![
            characterizable(
                KindTag::Location,
                "tanh(x / 2)",
                |x: f64| (0.5 * x).tanh(),
                vec![(fin(1.0), fin(1.0))],
                SampleSize::Finite(3),
                None,
            ),
            characterizable(
                KindTag::Scale,
                "1 - x tanh(x / 2)",
                |x: f64| 1.0 - x * (0.5 * x).tanh(),
                halves(PlusInfinity, fin(1.0)),
                INF,
                None,
            ),
        ],
        needs_scale_identification: false,
        group: None,
    }
}

fn sinh_arcsinh(params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    check_keys(params, &["delta"])?;
    let delta = param(params, "delta", 1.0);
    let base = gaussian_model();
    let transform: Arc<dyn GroupTransform> = Arc::new(SinhArcsinh);
    let model = group_member(&base, transform.clone(), delta)
        .with_name("sinh_arcsinh_skew_normal")
        .with_param("delta", delta);
    Ok(CatalogEntry {
        name: "sinh_arcsinh_skew_normal".into(),
        params: params_map(&[("delta", delta)]),
        model,
        kinds: vec![
            excluded(KindTag::Location, KindStatus::NotMonotone, "non-invertible"),
            excluded(KindTag::Scale, KindStatus::NotMonotone, "non-invertible"),
            characterizable(
                KindTag::Group,
                "-x^3 / sqrt(1 + x^2)",
                |x: f64| -x.powi(3) / x.hypot(1.0),
                vec![(PlusInfinity, PlusInfinity)],
                SampleSize::Finite(3),
                None,
            ),
        ],
        needs_scale_identification: false,
        group: Some(GroupPart { base, transform }),
    })
}

fn params_map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Canonical family name for `name` or one of its aliases.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let n = name.trim().to_ascii_lowercase().replace('-', "_");
    let canon = match n.as_str() {
        "normal" => "gaussian",
        "ferguson" | "generalized_normal" => "generalized_gaussian",
        "t" | "student_t" => "student",
        "sinh_arcsinh" | "sas" => "sinh_arcsinh_skew_normal",
        other => other,
    };
    FAMILY_NAMES.iter().copied().find(|f| *f == canon)
}

pub fn lookup(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let canon = canonical_name(name).ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
    let no_params = |e: CatalogEntry| -> Result<CatalogEntry> {
        check_keys(params, &[])?;
        Ok(e)
    };
    match canon {
        "gaussian" => no_params(gaussian()),
        "gamma" => gamma(params),
        "generalized_gaussian" => generalized_gaussian(params),
        "laplace" => no_params(laplace()),
        "weibull" => weibull(params),
        "gumbel" => no_params(gumbel()),
        "student" => student(params),
        "logistic" => no_params(logistic()),
        "sinh_arcsinh_skew_normal" => sinh_arcsinh(params),
        _ => unreachable!("canonical names are exhaustive"),
    }
}

/// Every family at its default parameters.
pub fn all_entries() -> Vec<CatalogEntry> {
    FAMILY_NAMES
        .iter()
        .map(|n| lookup(n, &BTreeMap::new()).expect("defaults are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::normalize;

    fn with(name: &str, key: &str, v: f64) -> CatalogEntry {
        lookup(name, &params_map(&[(key, v)])).unwrap()
    }

    #[test]
    fn catalog_densities_are_normalized() {
        for e in all_entries() {
            let (c, _) = normalize(&e.model, 1e-10).unwrap();
            assert!((c - 1.0).abs() < 1e-8, "{}: c = {c}", e.name);
        }
        for (n, k, v) in [("gamma", "alpha", 0.5), ("weibull", "k", 0.5), ("student", "nu", 0.5)] {
            let (c, _) = normalize(&with(n, k, v).model, 1e-10).unwrap();
            assert!((c - 1.0).abs() < 1e-8, "{n}: c = {c}");
        }
        let g = lookup("ferguson", &params_map(&[("alpha", 2.5), ("gamma", -0.7)])).unwrap();
        let (c, _) = normalize(&g.model, 1e-10).unwrap();
        assert!((c - 1.0).abs() < 1e-8);
    }

    #[test]
    fn examples() {
        let g = lookup("gaussian", &BTreeMap::new()).unwrap();
        assert_eq!(expected_mnss(&g, KindTag::Location).unwrap(), SampleSize::Finite(3));
        assert_eq!(expected_mnss(&g, KindTag::Scale).unwrap(), SampleSize::Infinite);
        assert_eq!(expected_mnss(&with("student", "nu", 0.5), KindTag::Scale).unwrap(), SampleSize::Finite(3));
        assert_eq!(expected_mnss(&with("student", "nu", 1.0), KindTag::Scale).unwrap(), SampleSize::Finite(3));
        let l = lookup("logistic", &BTreeMap::new()).unwrap();
        assert_eq!(expected_mnss(&l, KindTag::Location).unwrap(), SampleSize::Finite(3));
        let s = lookup("sinh_arcsinh_skew_normal", &BTreeMap::new()).unwrap();
        assert_eq!(expected_mnss(&s, KindTag::Group).unwrap(), SampleSize::Finite(3));
        let gu = lookup("gumbel", &BTreeMap::new()).unwrap();
        assert_eq!(expected_mnss(&gu, KindTag::Location).unwrap(), SampleSize::Infinite);
        let la = lookup("laplace", &BTreeMap::new()).unwrap();
        assert!(matches!(expected_mnss(&la, KindTag::Location), Err(Error::NotCharacterizable(_))));
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(lookup("cauchy", &BTreeMap::new()), Err(Error::UnknownFamily(_))));
        assert!(matches!(
            lookup("gamma", &params_map(&[("alpha", -1.0)])),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            lookup("ferguson", &params_map(&[("gamma", 0.0)])),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            lookup("gaussian", &params_map(&[("nu", 1.0)])),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn student_table() {
        let table = [(0.5, 3), (1.0, 3), (2.0, 3), (3.0, 4), (5.0, 6), (0.3, 5), (1.5, 3)];
        for (nu, m) in table {
            assert_eq!(student_scale_mnss(nu), SampleSize::Finite(m), "nu={nu}");
        }
    }

    #[test]
    fn sinh_arcsinh_member_scores_are_not_monotone() {
        let s = lookup("sinh_arcsinh_skew_normal", &BTreeMap::new()).unwrap();
        let probe = ProbeConfig::default();
        assert!(matches!(s.analyze_numeric(KindTag::Location, &probe), Err(Error::NotMonotone { .. })));
        assert!(matches!(s.analyze_numeric(KindTag::Scale, &probe), Err(Error::NotMonotone { .. })));
    }
}
