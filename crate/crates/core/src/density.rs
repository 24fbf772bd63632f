//! Densities on declared supports: evaluation, numeric differentiation,
//! quadrature normalization and inverse-CDF sampling.

use std::fmt;
use std::sync::Arc;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::root::{brent, RootOptions};

/// Open support of a density. Endpoints never belong to the set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSet {
    FullLine,
    PositiveHalfLine,
    NegativeHalfLine,
    OpenInterval(f64, f64),
}

impl SupportSet {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "open interval needs finite a < b, got ({a}, {b})"
            )));
        }
        Ok(SupportSet::OpenInterval(a, b))
    }

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match *self {
            SupportSet::FullLine => true,
            SupportSet::PositiveHalfLine => x > 0.0,
            SupportSet::NegativeHalfLine => x < 0.0,
            SupportSet::OpenInterval(a, b) => a < x && x < b,
        }
    }

    /// Lower and upper endpoints (possibly infinite).
    pub fn endpoints(&self) -> (f64, f64) {
        match *self {
            SupportSet::FullLine => (f64::NEG_INFINITY, f64::INFINITY),
            SupportSet::PositiveHalfLine => (0.0, f64::INFINITY),
            SupportSet::NegativeHalfLine => (f64::NEG_INFINITY, 0.0),
            SupportSet::OpenInterval(a, b) => (a, b),
        }
    }

    /// `points` interior probe points. Unbounded directions are truncated at
    /// `half_width`; bounded sides are sampled up to (but excluding) the
    /// endpoint.
    pub fn probe_grid(&self, points: usize, half_width: f64) -> Vec<f64> {
        let (lo, hi) = self.endpoints();
        let (a, b, open_a, open_b) = match (lo.is_finite(), hi.is_finite()) {
            (false, false) => (-half_width, half_width, false, false),
            (true, false) => (lo, lo + half_width, true, false),
            (false, true) => (hi - half_width, hi, false, true),
            (true, true) => (lo, hi, true, true),
        };
        // Closed ends are included, open (support) ends are skipped.
        let slots = points + usize::from(open_a) + usize::from(open_b) - 1;
        let first = usize::from(open_a);
        // multiply before dividing so symmetric grids hit 0 exactly
        (0..points)
            .map(|i| a + (b - a) * (first + i) as f64 / slots as f64)
            .collect()
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportSet::FullLine => f.write_str("(-inf, inf)"),
            SupportSet::PositiveHalfLine => f.write_str("(0, inf)"),
            SupportSet::NegativeHalfLine => f.write_str("(-inf, 0)"),
            SupportSet::OpenInterval(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density with an evaluable log-density and, optionally, its analytic
/// x-derivative. `log_pdf` is `-inf` outside the support.
#[derive(Clone)]
pub struct DensityModel {
    name: String,
    params: Vec<(String, f64)>,
    support: SupportSet,
    log_pdf: RealFn,
    dlog_pdf: Option<RealFn>,
    normalized: bool,
}

impl fmt::Debug for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("support", &self.support)
            .field("analytic_derivative", &self.dlog_pdf.is_some())
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl DensityModel {
    /// An unnormalized model; call [`normalize`] or mark it with
    /// [`DensityModel::assume_normalized`] when the constant is known.
    pub fn new(
        name: impl Into<String>,
        support: SupportSet,
        log_pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            params: Vec::new(),
            support,
            log_pdf: Arc::new(log_pdf),
            dlog_pdf: None,
            normalized: false,
        }
    }

    pub fn with_derivative(mut self, dlog_pdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dlog_pdf = Some(Arc::new(dlog_pdf));
        self
    }

    /// Drops the analytic derivative so every score falls back to central
    /// differences.
    pub fn without_derivative(&self) -> Self {
        Self {
            dlog_pdf: None,
            ..self.clone()
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn assume_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn support(&self) -> SupportSet {
        self.support
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dlog_pdf.is_some()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return f64::NEG_INFINITY;
        }
        (self.log_pdf)(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Analytic d/dx log f, if the model carries one.
    pub fn analytic_dlog_pdf(&self, x: f64) -> Option<f64> {
        self.dlog_pdf.as_ref().map(|d| d(x))
    }

    /// Same density with `shift` added to the log (`log c` of a normalizer).
    pub fn shifted(&self, shift: f64, normalized: bool) -> Self {
        let inner = self.log_pdf.clone();
        Self {
            name: self.name.clone(),
            params: self.params.clone(),
            support: self.support,
            log_pdf: Arc::new(move |x| inner(x) + shift),
            dlog_pdf: self.dlog_pdf.clone(),
            normalized,
        }
    }
}

/// Observations paired with a model's support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("sample must hold at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite observation {v}")));
        }
        Ok(Self { values })
    }

    /// Like [`Sample::new`] but also checks every value lies in `support`.
    pub fn within(values: Vec<f64>, support: &SupportSet) -> Result<Self> {
        let s = Self::new(values)?;
        if let Some(&x) = s.values.iter().find(|&&x| !support.contains(x)) {
            return Err(Error::OutsideSupport { x });
        }
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn median(&self) -> f64 {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        }
    }

    pub fn range(&self) -> f64 {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| f(x)).collect())
    }
}

/// Default central-difference step, `1e-6 * max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Central difference of the log-density, ignoring any analytic derivative.
/// The step is shrunk when `x +/- step` would leave the support.
pub fn fd_dlogf(model: &DensityModel, x: f64, step: f64) -> Result<f64> {
    let support = model.support();
    if !support.contains(x) {
        return Err(Error::OutsideSupport { x });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let (lo, hi) = support.endpoints();
    let room = (x - lo).min(hi - x);
    let h = if step < 0.5 * room { step } else { 0.5 * room };
    let fp = model.log_pdf(x + h);
    let fm = model.log_pdf(x - h);
    if !fp.is_finite() {
        return Err(Error::NonFiniteLogDensity { x: x + h });
    }
    if !fm.is_finite() {
        return Err(Error::NonFiniteLogDensity { x: x - h });
    }
    Ok((fp - fm) / (2.0 * h))
}

/// d/dx log f at `x`: the analytic derivative when present, else the
/// central difference with the given step.
pub fn eval_dlogf(model: &DensityModel, x: f64, step: f64) -> Result<f64> {
    if !model.support().contains(x) {
        return Err(Error::OutsideSupport { x });
    }
    match model.analytic_dlog_pdf(x) {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(Error::NonFiniteLogDensity { x }),
        None => fd_dlogf(model, x, step),
    }
}

/// [`eval_dlogf`] with the default step.
pub fn dlogf(model: &DensityModel, x: f64) -> Result<f64> {
    eval_dlogf(model, x, default_step(x))
}

/// Richardson-extrapolated central difference `(4 D(h/2) - D(h)) / 3`,
/// ignoring any analytic derivative. `h` is capped so both steps fit
/// inside the support.
pub fn richardson_dlogf(model: &DensityModel, x: f64, step: f64) -> Result<f64> {
    let (lo, hi) = model.support().endpoints();
    let h = step.min(0.4 * (x - lo).min(hi - x));
    let coarse = fd_dlogf(model, x, h)?;
    let fine = fd_dlogf(model, x, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn log_pdf_peak(model: &DensityModel) -> f64 {
    let (lo, hi, mapped) = quad::mapped_range(&model.support());
    let n = 401;
    (1..n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let x = if mapped { quad::map_to_line(t) } else { t };
            model.log_pdf(x)
        })
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Computes `c > 0` with `c * exp(log_pdf)` integrating to one and returns
/// it together with the normalized model.
pub fn normalize(model: &DensityModel, tol: f64) -> Result<(f64, DensityModel)> {
    let peak = log_pdf_peak(model);
    if !peak.is_finite() {
        return Err(Error::DivergentIntegral(
            "log-density is -inf on every probe point".into(),
        ));
    }
    let cfg = QuadConfig {
        abs_tol: tol,
        rel_tol: tol,
        ..QuadConfig::default()
    };
    let integral = quad::integrate_support(|x| (model.log_pdf(x) - peak).exp(), &model.support(), &cfg)?;
    if !(integral.value > 0.0) || !integral.value.is_finite() {
        return Err(Error::DivergentIntegral(format!(
            "integral evaluated to {}",
            integral.value
        )));
    }
    let log_c = -peak - integral.value.ln();
    Ok((log_c.exp(), model.shifted(log_c, true)))
}

/// Numeric inverse-CDF sampler. The CDF is tabulated by adaptive
/// quadrature over equal panels of the (mapped) integration variable;
/// inversion inside a panel is a bracketed root search.
#[derive(Clone)]
pub struct InverseCdfSampler {
    model: DensityModel,
    mapped: bool,
    edges: Vec<f64>,
    cumulative: Vec<f64>,
}

impl fmt::Debug for InverseCdfSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InverseCdfSampler")
            .field("model", &self.model.name())
            .field("panels", &(self.edges.len() - 1))
            .field("mass", &self.total())
            .finish()
    }
}

const SAMPLER_PANELS: usize = 1024;

impl InverseCdfSampler {
    pub fn new(model: &DensityModel) -> Result<Self> {
        let (lo, hi, mapped) = quad::mapped_range(&model.support());
        let edges: Vec<f64> = (0..=SAMPLER_PANELS)
            .map(|i| lo + (hi - lo) * i as f64 / SAMPLER_PANELS as f64)
            .collect();
        let cfg = QuadConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_subdivisions: 400,
        };
        let mut cumulative = Vec::with_capacity(edges.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let r = quad::integrate(|t| integrand(model, mapped, t), w[0], w[1], &cfg)?;
            acc += r.value.max(0.0);
            cumulative.push(acc);
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::DivergentIntegral(format!("total mass {acc}")));
        }
        Ok(Self {
            model: model.clone(),
            mapped,
            edges,
            cumulative,
        })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Normalized CDF at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.model.support().endpoints();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let t = if self.mapped { quad::map_from_line(x) } else { x };
        let k = self.panel_of_t(t);
        let partial = quad::kronrod15(&|s| integrand(&self.model, self.mapped, s), self.edges[k], t);
        ((self.cumulative[k] + partial) / self.total()).clamp(0.0, 1.0)
    }

    fn panel_of_t(&self, t: f64) -> usize {
        let k = self.edges.partition_point(|&e| e <= t);
        k.saturating_sub(1).min(self.edges.len() - 2)
    }

    /// Quantile for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidArgument(format!("quantile level {u} not in (0, 1)")));
        }
        let target = u * self.total();
        let mut k = self.cumulative.partition_point(|&c| c < target).saturating_sub(1);
        k = k.min(self.edges.len() - 2);
        while self.cumulative[k + 1] - self.cumulative[k] <= 0.0 {
            if k + 2 >= self.edges.len() {
                return Err(Error::InversionFailure(format!("no mass above level {u}")));
            }
            k += 1;
        }
        let (a, b) = (self.edges[k], self.edges[k + 1]);
        let mass = self.cumulative[k + 1] - self.cumulative[k];
        let frac = ((target - self.cumulative[k]) / mass).clamp(0.0, 1.0);
        let g = |s: f64| integrand(&self.model, self.mapped, s);
        let panel = quad::kronrod15(&g, a, b);
        if !(panel > 0.0) {
            return Err(Error::InversionFailure(format!("degenerate panel [{a}, {b}]")));
        }
        let opts = RootOptions {
            x_tol: 1e-13 * (b - a).max(1e-300),
            ..RootOptions::default()
        };
        let root = brent(|s| quad::kronrod15(&g, a, s) / panel - frac, a, b, &opts)
            .map_err(|e| Error::InversionFailure(e.to_string()))?;
        let mut t = root.x;
        // keep strictly inside the open panel range
        if t <= a {
            t = a + 0.5 * (b - a) * f64::EPSILON;
        }
        if t >= b {
            t = b - 0.5 * (b - a) * f64::EPSILON;
        }
        let x = if self.mapped { quad::map_to_line(t) } else { t };
        if !self.model.support().contains(x) {
            return Err(Error::InversionFailure(format!("quantile {x} left the support")));
        }
        Ok(x)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        let values = (0..n)
            .map(|_| self.quantile(rng.sample(Open01)))
            .collect::<Result<Vec<_>>>()?;
        Sample::new(values)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }
}

fn integrand(model: &DensityModel, mapped: bool, t: f64) -> f64 {
    if mapped {
        let p = model.pdf(quad::map_to_line(t));
        if p == 0.0 {
            0.0
        } else {
            p * quad::map_jacobian(t)
        }
    } else {
        model.pdf(t)
    }
}

/// `n` i.i.d. draws from `model`, deterministic in `seed`.
pub fn sample_from(model: &DensityModel, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    InverseCdfSampler::new(model)?.sample(n, seed)
}

/// Seeded generator for trial `index` of a run with master seed `seed`; the
/// trial index selects the ChaCha stream.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> DensityModel {
        DensityModel::new("gaussian", SupportSet::FullLine, |x| {
            -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln()
        })
        .assume_normalized()
    }

    fn logistic() -> DensityModel {
        DensityModel::new("logistic", SupportSet::FullLine, |x: f64| {
            -x - 2.0 * (-x).exp().ln_1p()
        })
    }

    #[test]
    fn support_membership_is_open() {
        assert!(SupportSet::FullLine.contains(-1e300));
        assert!(!SupportSet::PositiveHalfLine.contains(0.0));
        assert!(SupportSet::PositiveHalfLine.contains(1e-300));
        assert!(!SupportSet::NegativeHalfLine.contains(0.0));
        let iv = SupportSet::interval(-1.0, 2.0).unwrap();
        assert!(!iv.contains(-1.0) && !iv.contains(2.0) && iv.contains(0.0));
        assert!(SupportSet::interval(2.0, 2.0).is_err());
        assert!(!SupportSet::FullLine.contains(f64::NAN));
    }

    #[test]
    fn probe_grid_stays_inside() {
        for s in [
            SupportSet::FullLine,
            SupportSet::PositiveHalfLine,
            SupportSet::NegativeHalfLine,
            SupportSet::OpenInterval(-2.0, 3.0),
        ] {
            let g = s.probe_grid(64, 10.0);
            assert_eq!(g.len(), 64);
            assert!(g.iter().all(|&x| s.contains(x)), "{s}");
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn dlogf_examples() {
        // finite-difference path: the models carry no analytic derivative
        let g = gaussian();
        assert!(dlogf(&g, 0.0).unwrap().abs() < 1e-9);
        assert!((dlogf(&g, 1.0).unwrap() + 1.0).abs() < 1e-8);
        // logistic at 0: symmetric difference of an even function
        let l = logistic();
        let h = 1e-6;
        let oracle = (l.log_pdf(h) - l.log_pdf(-h)) / (2.0 * h);
        assert!(oracle.abs() < 1e-9);
        assert!(dlogf(&l, 0.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn dlogf_errors() {
        let e = DensityModel::new("exp", SupportSet::PositiveHalfLine, |x| -x);
        assert!(matches!(dlogf(&e, -1.0), Err(Error::OutsideSupport { .. })));
        let bad = DensityModel::new("bad", SupportSet::FullLine, |x| {
            if x > 1.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        });
        assert!(matches!(
            eval_dlogf(&bad, 1.0, 0.01),
            Err(Error::NonFiniteLogDensity { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let unnorm = DensityModel::new("k", SupportSet::FullLine, |x| -0.5 * x * x);
        let (c, m) = normalize(&unnorm, 1e-10).unwrap();
        assert!((c - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
        assert!(m.is_normalized());
        let (c1, _) = normalize(&gaussian(), 1e-10).unwrap();
        assert!((c1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quartic_normalizer_matches_independent_quadrature() {
        // Oracle: composite Simpson on [-12, 12] with 200k panels (independent
        // of the adaptive Gauss–Kronrod path); frozen value 0.390062251089...
        let n = 200_000;
        let (a, b) = (-12.0f64, 12.0f64);
        let h = (b - a) / n as f64;
        let f = |x: f64| (-x.powi(4) / 4.0).exp();
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        let oracle = 1.0 / (s * h / 3.0);
        assert!((oracle - 0.390_062_251_089_4).abs() < 1e-10);
        let quartic = DensityModel::new("quartic", SupportSet::FullLine, |x: f64| -x.powi(4) / 4.0);
        let (c, _) = normalize(&quartic, 1e-10).unwrap();
        assert!((c - oracle).abs() < 1e-9);
    }

    #[test]
    fn non_integrable_density_is_rejected() {
        let cauchyish = DensityModel::new("heavy", SupportSet::FullLine, |x: f64| {
            -0.5 * (1.0 + x * x).ln()
        });
        assert!(matches!(
            normalize(&cauchyish, 1e-10),
            Err(Error::DivergentIntegral(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_from(&gaussian(), 50, 7).unwrap();
        let b = sample_from(&gaussian(), 50, 7).unwrap();
        let c = sample_from(&gaussian(), 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_sample_mean() {
        let s = sample_from(&gaussian(), 100_000, 11).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.n() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn exponential_sample_mean() {
        let e = DensityModel::new("exp", SupportSet::PositiveHalfLine, |x| -x).assume_normalized();
        // oracle for the target mean: quadrature of x f(x)
        let m = quad::integrate_support(|x| x * e.pdf(x), &e.support(), &QuadConfig::default())
            .unwrap()
            .value;
        assert!((m - 1.0).abs() < 1e-9);
        let s = sample_from(&e, 100_000, 3).unwrap();
        assert!(s.values().iter().all(|&x| x > 0.0));
        let mean = s.values().iter().sum::<f64>() / s.n() as f64;
        assert!((mean - m).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn cdf_and_quantile_are_inverse() {
        let sampler = InverseCdfSampler::new(&logistic()).unwrap();
        for &u in &[1e-6, 0.1, 0.5, 0.9, 0.999_999] {
            let x = sampler.quantile(u).unwrap();
            let exact = (u / (1.0 - u)).ln();
            assert!((x - exact).abs() < 1e-7 * exact.abs().max(1.0), "u={u}: {x} vs {exact}");
            assert!((sampler.cdf(x) - u).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_rejects_values_outside_support() {
        assert!(Sample::within(vec![1.0, -1.0], &SupportSet::PositiveHalfLine).is_err());
        assert!(Sample::new(vec![]).is_err());
        let s = Sample::new(vec![3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!(s.median(), 2.5);
        assert_eq!(s.range(), 9.0);
    }
}
