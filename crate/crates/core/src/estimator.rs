//! Maximum-likelihood estimation for location, scale (rate) and group
//! parameters by bracketed root finding on the summed score, plus the
//! closed forms of the catalog families.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::CatalogEntry;
use crate::density::{DensityModel, Sample, SupportSet};
use crate::error::{Error, Result};
use crate::group::GroupTransform;
use crate::root::{brent, expand_bracket, Root, RootOptions};
use crate::score::{check_monotone, group_score, location_score, scale_score, KindTag, ParameterKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Method {
    ClosedForm { name: String },
    BracketedRoot { iterations: usize, bracket: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub theta_hat: f64,
    /// Summed score at `theta_hat`.
    pub residual: f64,
    pub method: Method,
    pub kind: KindTag,
    /// `1 / theta_hat` for the rate-parametrized scale kind.
    pub sigma_hat: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Required |summed score| at the root.
    pub tol: f64,
    /// Bracket width at which Brent iterations stop.
    pub x_floor: f64,
    pub max_doublings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            x_floor: 1e-12,
            max_doublings: 60,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

struct Solved {
    x: f64,
    fx: f64,
    iterations: usize,
    bracket: (f64, f64),
}

/// Root of a strictly monotone `f`. Brent stops at the bracket floor; if the
/// residual is still above `tol` the bracket is bisected further until the
/// residual passes or the bracket holds adjacent floats.
fn solve_monotone(f: impl Fn(f64) -> f64, center: f64, half_width: f64, opts: &SolverOptions) -> Result<Solved> {
    let (lo, hi) = expand_bracket(&f, center, half_width, opts.max_doublings)?;
    let ropts = RootOptions {
        x_tol: opts.x_floor,
        f_tol: 0.0,
        max_iter: 500,
    };
    let Root { x, fx, iterations, bracket } = brent(&f, lo, hi, &ropts)?;
    let (mut best, mut fbest) = (x, fx);
    let (mut a, mut b) = bracket;
    let mut extra = 0;
    if fbest.abs() >= opts.tol && a < b {
        let mut fa = f(a);
        while fbest.abs() >= opts.tol {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = f(m);
            extra += 1;
            if !fm.is_finite() {
                break;
            }
            if fm.abs() < fbest.abs() {
                best = m;
                fbest = fm;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
    }
    let at_resolution = b - a <= 4.0 * f64::EPSILON * best.abs().max(f64::MIN_POSITIVE);
    if fbest.abs() >= opts.tol && !at_resolution {
        return Err(Error::NonConvergence(format!(
            "score residual {fbest:e} above {:e} at {best}",
            opts.tol
        )));
    }
    Ok(Solved {
        x: best,
        fx: fbest,
        iterations: iterations + extra,
        bracket: (a.min(b), a.max(b)),
    })
}

fn probe_monotone(eval: impl Fn(f64) -> Result<f64>, domain: SupportSet) -> Result<()> {
    let grid = domain.probe_grid(129, 10.0);
    check_monotone(&eval, &grid).map(|_| ())
}

/// Location solver; the monotonicity precondition is checked once.
#[derive(Debug, Clone)]
pub struct LocationSolver {
    model: DensityModel,
    opts: SolverOptions,
}

impl LocationSolver {
    pub fn new(model: &DensityModel, opts: SolverOptions) -> Result<Self> {
        let m = model.clone();
        probe_monotone(move |x| location_score(&m, x), SupportSet::FullLine)?;
        Ok(Self { model: model.clone(), opts })
    }

    /// `sum_i phi(x_i - theta)`, strictly decreasing in `theta`.
    pub fn score_sum(&self, sample: &Sample, theta: f64) -> f64 {
        sample
            .values()
            .iter()
            .map(|&x| location_score(&self.model, x - theta).unwrap_or(f64::NAN))
            .sum()
    }

    pub fn solve(&self, sample: &Sample) -> Result<MleResult> {
        let s = solve_monotone(
            |t| self.score_sum(sample, t),
            sample.median(),
            sample.range() + 1.0,
            &self.opts,
        )?;
        Ok(MleResult {
            theta_hat: s.x,
            residual: s.fx,
            method: Method::BracketedRoot { iterations: s.iterations, bracket: s.bracket },
            kind: KindTag::Location,
            sigma_hat: None,
        })
    }
}

/// Rate solver for densities `theta f(theta x)`, bracketing on `log theta`.
#[derive(Debug, Clone)]
pub struct ScaleSolver {
    model: DensityModel,
    opts: SolverOptions,
}

const LOG_THETA_LIMIT: f64 = 700.0;

impl ScaleSolver {
    pub fn new(model: &DensityModel, opts: SolverOptions) -> Result<Self> {
        let halves: Vec<SupportSet> = match model.support() {
            SupportSet::FullLine => vec![SupportSet::NegativeHalfLine, SupportSet::PositiveHalfLine],
            s @ (SupportSet::PositiveHalfLine | SupportSet::NegativeHalfLine) => vec![s],
            s => {
                return Err(Error::UnsupportedSupport {
                    op: "scale estimation",
                    support: s.to_string(),
                })
            }
        };
        for half in halves {
            let m = model.clone();
            probe_monotone(move |x| scale_score(&m, x), half)?;
        }
        Ok(Self { model: model.clone(), opts })
    }

    /// `sum_i psi(theta x_i)`.
    pub fn score_sum(&self, sample: &Sample, theta: f64) -> f64 {
        sample
            .values()
            .iter()
            .map(|&x| scale_score(&self.model, theta * x).unwrap_or(f64::NAN))
            .sum()
    }

    pub fn solve(&self, sample: &Sample) -> Result<MleResult> {
        if sample.values().iter().all(|&x| x == 0.0) {
            return Err(Error::AllZeroSample);
        }
        if let Some(&x) = sample.values().iter().find(|&&x| x != 0.0 && !self.model.support().contains(x)) {
            return Err(Error::OutsideSupport { x });
        }
        let f = |u: f64| {
            if u.abs() > LOG_THETA_LIMIT {
                return f64::NAN;
            }
            self.score_sum(sample, u.exp())
        };
        let s = solve_monotone(f, 0.0, 1.0, &self.opts)?;
        let theta = s.x.exp();
        Ok(MleResult {
            theta_hat: theta,
            residual: s.fx,
            method: Method::BracketedRoot {
                iterations: s.iterations,
                bracket: (s.bracket.0.exp(), s.bracket.1.exp()),
            },
            kind: KindTag::Scale,
            sigma_hat: Some(1.0 / theta),
        })
    }
}

/// Group solver: `sum_i [u2 + u1 f'/f](H_theta(x_i)) = 0`. The common factor
/// `T(theta)` is assumed nonzero and dropped.
#[derive(Debug, Clone)]
pub struct GroupSolver {
    base: DensityModel,
    transform: Arc<dyn GroupTransform>,
    opts: SolverOptions,
}

impl GroupSolver {
    pub fn new(base: &DensityModel, transform: Arc<dyn GroupTransform>, opts: SolverOptions) -> Result<Self> {
        let m = base.clone();
        let t = transform.clone();
        probe_monotone(
            move |y| group_score(&m, |v| t.u1(v), |v| t.u2(v), y),
            base.support(),
        )?;
        Ok(Self { base: base.clone(), transform, opts })
    }

    pub fn score_sum(&self, sample: &Sample, theta: f64) -> f64 {
        let t = &self.transform;
        sample
            .values()
            .iter()
            .map(|&x| {
                group_score(&self.base, |v| t.u1(v), |v| t.u2(v), t.apply(theta, x)).unwrap_or(f64::NAN)
            })
            .sum()
    }

    pub fn solve(&self, sample: &Sample) -> Result<MleResult> {
        let t = &self.transform;
        let s = solve_monotone(
            |u| self.score_sum(sample, t.from_internal(u)),
            t.to_internal(t.identity()),
            1.0 + sample.range() + sample.median().abs(),
            &self.opts,
        )?;
        Ok(MleResult {
            theta_hat: t.from_internal(s.x),
            residual: s.fx,
            method: Method::BracketedRoot {
                iterations: s.iterations,
                bracket: (t.from_internal(s.bracket.0), t.from_internal(s.bracket.1)),
            },
            kind: KindTag::Group,
            sigma_hat: None,
        })
    }
}

pub fn mle_location(model: &DensityModel, sample: &Sample, tol: f64) -> Result<MleResult> {
    LocationSolver::new(model, SolverOptions::with_tol(tol))?.solve(sample)
}

pub fn mle_scale(model: &DensityModel, sample: &Sample, tol: f64) -> Result<MleResult> {
    ScaleSolver::new(model, SolverOptions::with_tol(tol))?.solve(sample)
}

pub fn mle_group(
    base: &DensityModel,
    transform: Arc<dyn GroupTransform>,
    sample: &Sample,
    tol: f64,
) -> Result<MleResult> {
    GroupSolver::new(base, transform, SolverOptions::with_tol(tol))?.solve(sample)
}

/// A solver for any parameter kind. For the group kind `model` is the base.
#[derive(Debug, Clone)]
pub enum Estimator {
    Location(LocationSolver),
    Scale(ScaleSolver),
    Group(GroupSolver),
}

impl Estimator {
    pub fn new(model: &DensityModel, kind: &ParameterKind, opts: SolverOptions) -> Result<Self> {
        Ok(match kind {
            ParameterKind::Location => Estimator::Location(LocationSolver::new(model, opts)?),
            ParameterKind::Scale => Estimator::Scale(ScaleSolver::new(model, opts)?),
            ParameterKind::Group(t) => Estimator::Group(GroupSolver::new(model, t.clone(), opts)?),
        })
    }

    pub fn solve(&self, sample: &Sample) -> Result<MleResult> {
        match self {
            Estimator::Location(s) => s.solve(sample),
            Estimator::Scale(s) => s.solve(sample),
            Estimator::Group(s) => s.solve(sample),
        }
    }
}

/// Closed-form estimators declared by catalog families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `mean(x)`.
    GaussianMean,
    /// `mean(x^2)^(-1/2)`.
    GaussianRate,
    /// `alpha / mean(x)`.
    GammaRate { alpha: f64 },
    /// `1 / mean(|x|)`.
    LaplaceRate,
    /// `mean(x^k)^(-1/k)`.
    WeibullRate { k: f64 },
    /// `-log mean(exp(-x))`.
    GumbelLocation,
    /// `log(mean(exp(gamma x))) / gamma`.
    FergusonLocation { gamma: f64 },
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

/// `log(mean(exp(a_i)))` without overflow.
fn log_mean_exp(a: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = a.clone().fold(f64::NEG_INFINITY, f64::max);
    m + mean(a.map(|v| (v - m).exp())).ln()
}

impl ClosedForm {
    pub fn id(&self) -> &'static str {
        match self {
            ClosedForm::GaussianMean => "gaussian_mean",
            ClosedForm::GaussianRate => "gaussian_rate",
            ClosedForm::GammaRate { .. } => "gamma_rate",
            ClosedForm::LaplaceRate => "laplace_rate",
            ClosedForm::WeibullRate { .. } => "weibull_rate",
            ClosedForm::GumbelLocation => "gumbel_location",
            ClosedForm::FergusonLocation { .. } => "ferguson_location",
        }
    }

    pub fn kind(&self) -> KindTag {
        match self {
            ClosedForm::GaussianMean | ClosedForm::GumbelLocation | ClosedForm::FergusonLocation { .. } => {
                KindTag::Location
            }
            _ => KindTag::Scale,
        }
    }

    pub fn evaluate(&self, sample: &Sample) -> Result<f64> {
        let xs = sample.values();
        let it = xs.iter().copied();
        let theta = match *self {
            ClosedForm::GaussianMean => mean(it),
            ClosedForm::GaussianRate => mean(it.map(|x| x * x)).powf(-0.5),
            ClosedForm::GammaRate { alpha } => alpha / mean(it),
            ClosedForm::LaplaceRate => 1.0 / mean(it.map(f64::abs)),
            ClosedForm::WeibullRate { k } => mean(it.map(|x| x.powf(k))).powf(-1.0 / k),
            ClosedForm::GumbelLocation => -log_mean_exp(it.map(|x| -x)),
            ClosedForm::FergusonLocation { gamma } => log_mean_exp(it.map(move |x| gamma * x)) / gamma,
        };
        if self.kind() == KindTag::Scale && xs.iter().all(|&x| x == 0.0) {
            return Err(Error::AllZeroSample);
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("{} undefined for this sample", self.id())));
        }
        Ok(theta)
    }
}

/// Evaluates the closed form `entry` declares for `kind`.
pub fn closed_form_mle(entry: &CatalogEntry, kind: KindTag, sample: &Sample) -> Result<MleResult> {
    let form = entry
        .closed_form(kind)
        .ok_or_else(|| Error::NoClosedForm(format!("{}/{kind}", entry.name)))?;
    let theta = form.evaluate(sample)?;
    let residual = match kind {
        KindTag::Location => LocationSolver { model: entry.model.clone(), opts: SolverOptions::default() }
            .score_sum(sample, theta),
        KindTag::Scale => ScaleSolver { model: entry.model.clone(), opts: SolverOptions::default() }
            .score_sum(sample, theta),
        KindTag::Group => f64::NAN,
    };
    Ok(MleResult {
        theta_hat: theta,
        residual,
        method: Method::ClosedForm { name: form.id().into() },
        kind,
        sigma_hat: (kind == KindTag::Scale).then(|| 1.0 / theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Dilation, SinhArcsinh, Translation};

    fn gaussian() -> DensityModel {
        DensityModel::new("gaussian", SupportSet::FullLine, |x| -0.5 * x * x).with_derivative(|x| -x)
    }

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gaussian_location_is_the_mean() {
        let r = mle_location(&gaussian(), &sample(&[1.0, 2.0, 3.0]), 1e-10).unwrap();
        assert!((r.theta_hat - 2.0).abs() < 1e-12);
        assert!(r.residual.abs() < 1e-10);
    }

    #[test]
    fn ferguson_location() {
        let f = DensityModel::new("ferguson", SupportSet::FullLine, |x: f64| x - x.exp())
            .with_derivative(|x: f64| 1.0 - x.exp());
        let r = mle_location(&f, &sample(&[0.0, 3f64.ln()]), 1e-10).unwrap();
        assert!((r.theta_hat - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn quartic_location_cubic_root() {
        let q = DensityModel::new("quartic", SupportSet::FullLine, |x: f64| -x.powi(4) / 4.0)
            .with_derivative(|x: f64| -x.powi(3));
        // bisection oracle on 2 t^3 - (3 - t)^3
        let (mut a, mut b) = (0.0f64, 3.0f64);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if 2.0 * m.powi(3) - (3.0 - m).powi(3) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let closed = 3.0 / (1.0 + 2f64.cbrt());
        assert!((a - closed).abs() < 1e-14);
        let r = mle_location(&q, &sample(&[0.0, 0.0, 3.0]), 1e-10).unwrap();
        assert!((r.theta_hat - closed).abs() < 1e-10);
    }

    #[test]
    fn scale_examples() {
        let laplace = DensityModel::new("laplace", SupportSet::FullLine, |x: f64| -x.abs())
            .with_derivative(|x: f64| if x > 0.0 { -1.0 } else if x < 0.0 { 1.0 } else { 0.0 });
        let r = mle_scale(&laplace, &sample(&[1.0, -1.0, 2.0]), 1e-10).unwrap();
        assert!((r.theta_hat - 0.75).abs() < 1e-10);
        assert!((r.sigma_hat.unwrap() - 4.0 / 3.0).abs() < 1e-10);
        let r = mle_scale(&gaussian(), &sample(&[1.0, 1.0]), 1e-10).unwrap();
        assert!((r.theta_hat - 1.0).abs() < 1e-10);
        let gamma2 = DensityModel::new("gamma", SupportSet::PositiveHalfLine, |x: f64| x.ln() - x)
            .with_derivative(|x| 1.0 / x - 1.0);
        let r = mle_scale(&gamma2, &sample(&[1.0, 3.0]), 1e-10).unwrap();
        assert!((r.theta_hat - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scale_errors() {
        assert!(matches!(
            mle_scale(&gaussian(), &sample(&[0.0, 0.0]), 1e-10),
            Err(Error::AllZeroSample)
        ));
        let gamma2 = DensityModel::new("gamma", SupportSet::PositiveHalfLine, |x: f64| x.ln() - x);
        assert!(matches!(
            mle_scale(&gamma2, &sample(&[1.0, -3.0]), 1e-10),
            Err(Error::OutsideSupport { .. })
        ));
    }

    #[test]
    fn location_requires_monotone_score() {
        let student = DensityModel::new("student", SupportSet::FullLine, |x: f64| -(x * x).ln_1p());
        assert!(matches!(
            mle_location(&student, &sample(&[0.0, 1.0]), 1e-10),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn group_examples() {
        let g = gaussian();
        let r = mle_group(&g, Arc::new(SinhArcsinh), &sample(&[0.7, -0.7]), 1e-10).unwrap();
        assert!(r.theta_hat.abs() < 1e-10);
        // H(x) = x - theta is the ordinary location family
        let r = mle_group(&g, Arc::new(Translation::location()), &sample(&[1.0, 2.0, 3.0]), 1e-10).unwrap();
        assert!((r.theta_hat - 2.0).abs() < 1e-10);
        // H(x) = x + theta estimates the negated shift
        let r = mle_group(&g, Arc::new(Translation { slope: 1.0 }), &sample(&[1.0, 2.0, 3.0]), 1e-10).unwrap();
        assert!((r.theta_hat + 2.0).abs() < 1e-10);
        // dilation group on a half-line reproduces the rate estimate
        let gamma2 = DensityModel::new("gamma", SupportSet::PositiveHalfLine, |x: f64| x.ln() - x)
            .with_derivative(|x| 1.0 / x - 1.0);
        let xs = sample(&[0.5, 2.0, 1.0]);
        let r = mle_group(&gamma2, Arc::new(Dilation), &xs, 1e-10).unwrap();
        let s = mle_scale(&gamma2, &xs, 1e-10).unwrap();
        assert!((r.theta_hat - s.theta_hat).abs() < 1e-10);
        assert!((s.theta_hat - 2.0 / (3.5 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn sinh_arcsinh_root_matches_scan() {
        let g = gaussian();
        let xs = sample(&[0.5, 1.0, 1.5]);
        let r = mle_group(&g, Arc::new(SinhArcsinh), &xs, 1e-10).unwrap();
        // independent scan: score sum sign changes on a 1e-6 grid over (-3, 3)
        let t = SinhArcsinh;
        let sum = |d: f64| -> f64 {
            xs.values()
                .iter()
                .map(|&x| {
                    let y = t.apply(d, x);
                    -y.powi(3) / y.hypot(1.0)
                })
                .sum()
        };
        let mut scan = None;
        let step = 1e-6;
        let mut prev = sum(-3.0);
        let mut k = 1;
        while -3.0 + k as f64 * step < 3.0 {
            let d = -3.0 + k as f64 * step;
            let v = sum(d);
            if (v < 0.0) != (prev < 0.0) {
                scan = Some(d - 0.5 * step);
                break;
            }
            prev = v;
            k += 1;
        }
        let scan = scan.expect("scan finds a sign change");
        assert!((r.theta_hat - scan).abs() < 1e-6);
        assert!((r.theta_hat + 0.838_093_418_541_213_4).abs() < 1e-9);
    }

    #[test]
    fn closed_forms() {
        let s = sample(&[0.0, 0.0]);
        assert!(ClosedForm::GumbelLocation.evaluate(&s).unwrap().abs() < 1e-15);
        let s = sample(&[1.0, 1.0]);
        assert!((ClosedForm::WeibullRate { k: 2.0 }.evaluate(&s).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ClosedForm::GaussianMean.evaluate(&sample(&[5.0])).unwrap(), 5.0);
    }
}
