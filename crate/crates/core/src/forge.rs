//! Counterexample densities: `g` with `-g'/g = h(phi_f)` for an odd
//! increasing `h` shares `f`'s location MLE on every two-point sample but not
//! on larger ones unless `h` is linear.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{mcss, projection_interval, Interval, SampleSize};
use crate::density::{normalize, trial_rng, DensityModel, InverseCdfSampler, RealFn, Sample, SupportSet};
use crate::error::{Error, Result};
use crate::estimator::{LocationSolver, SolverOptions};
use crate::extended::ExtendedReal;
use crate::quad::AnchoredIntegral;
use crate::score::{location_score, score_profiles, ParameterKind, ProbeConfig, ScoreProfile};

/// Minimum admissible `h'` on the probe grid.
const GUARD_SWEEP: usize = 20_000;

pub const H_SLOPE_GUARD: f64 = 1e-3;

#[derive(Clone)]
pub enum HSpec {
    /// `h(y) = d y^p` with `d > 0`, `p` odd.
    OddPower { d: f64, p: u32 },
    /// `h(y) = y + w'(y)` for an even `w`.
    PlusEvenDerivative {
        name: String,
        w: RealFn,
        w_prime: RealFn,
        w_second: RealFn,
    },
}

impl fmt::Debug for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HSpec::OddPower { d, p } => write!(f, "OddPower(d={d}, p={p})"),
            HSpec::PlusEvenDerivative { name, .. } => write!(f, "PlusEvenDerivative({name})"),
        }
    }
}

impl HSpec {
    pub fn odd_power(d: f64, p: u32) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) || p % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "odd power needs d > 0 and odd p, got d = {d}, p = {p}"
            )));
        }
        Ok(HSpec::OddPower { d, p })
    }

    /// `w(y) = a cos(b y)`, so `h(y) = y - a b sin(b y)`.
    pub fn cosine(a: f64, b: f64) -> Self {
        HSpec::PlusEvenDerivative {
            name: format!("{a} cos({b} y)"),
            w: Arc::new(move |y: f64| a * (b * y).cos()),
            w_prime: Arc::new(move |y: f64| -a * b * (b * y).sin()),
            w_second: Arc::new(move |y: f64| -a * b * b * (b * y).cos()),
        }
    }

    pub fn h(&self, y: f64) -> f64 {
        match self {
            HSpec::OddPower { d, p } => d * y.powi(*p as i32),
            HSpec::PlusEvenDerivative { w_prime, .. } => y + w_prime(y),
        }
    }

    pub fn h_prime(&self, y: f64) -> f64 {
        match self {
            HSpec::OddPower { d, p } => {
                if *p == 1 {
                    *d
                } else {
                    d * *p as f64 * y.powi(*p as i32 - 1)
                }
            }
            HSpec::PlusEvenDerivative { w_second, .. } => 1.0 + w_second(y),
        }
    }

    /// `h = c * id` for some `c > 0`.
    pub fn is_linear(&self) -> bool {
        matches!(self, HSpec::OddPower { p: 1, .. })
    }

    /// Checks evenness of `w` and the slope guard on `ys`.
    fn validate(&self, ys: &[f64]) -> Result<()> {
        if let HSpec::PlusEvenDerivative { w, name, .. } = self {
            if let Some(&y) = ys.iter().find(|&&y| (w(y) - w(-y)).abs() > 1e-12 * w(y).abs().max(1.0)) {
                return Err(Error::InvalidArgument(format!("w = {name} is not even at y = {y}")));
            }
            if let Some(&y) = ys.iter().find(|&&y| self.h_prime(y) <= H_SLOPE_GUARD) {
                return Err(Error::NotMonotone { at: y });
            }
        }
        Ok(())
    }
}

impl FromStr for HSpec {
    type Err = Error;

    /// `odd-power:d=1,p=3` or `cosine:a=0.1,b=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in tail.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("not a number: `{v}`")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, default: f64| kv.get(k).copied().unwrap_or(default);
        match head.trim() {
            "odd-power" | "odd_power" => {
                let p = get("p", 3.0);
                if p.fract() != 0.0 || p < 1.0 {
                    return Err(Error::Parse(format!("p must be a positive odd integer, got {p}")));
                }
                HSpec::odd_power(get("d", 1.0), p as u32)
            }
            "cosine" | "plus-even-derivative" => Ok(HSpec::cosine(get("a", 0.1), get("b", 1.0))),
            other => Err(Error::Parse(format!("unknown h specification `{other}`"))),
        }
    }
}

/// `g` with `-g'/g = h(phi_f)`, normalized. The log-density is the negated
/// integral of `h(phi_f)` anchored at the zero of `phi_f`.
pub fn forge_odd_h(target: &DensityModel, h: &HSpec) -> Result<DensityModel> {
    let probe = ProbeConfig::default();
    let profile = score_profiles(target, &ParameterKind::Location, &probe)?.remove(0);
    let anchor = profile
        .zero
        .ok_or_else(|| Error::NotCharacterizable("target location score has no zero".into()))?;
    let grid = SupportSet::FullLine.probe_grid(201, probe.half_width);
    let phis = grid
        .iter()
        .map(|&x| location_score(target, x))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = phis.iter().filter(|y| y.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &y| (l.min(y), u.max(y)));
    // the guard sees the probe scores and a dense sweep of their range
    let sweep = (0..=GUARD_SWEEP).map(|i| lo + (hi - lo) * i as f64 / GUARD_SWEEP as f64);
    let ys: Vec<f64> = phis.iter().copied().chain(sweep).collect();
    h.validate(&ys)?;

    let t = target.clone();
    let hh = h.clone();
    let integrand: RealFn = Arc::new(move |y| hh.h(location_score(&t, y).unwrap_or(f64::NAN)));
    let integral = Arc::new(AnchoredIntegral::new(integrand, &SupportSet::FullLine, anchor)?);
    let a = integral.clone();
    let t = target.clone();
    let hh = h.clone();
    let name = format!("forged[{}; {h:?}]", target.name());
    // a tail integral that fails to converge carries no mass
    let unnormalized = DensityModel::new(name, SupportSet::FullLine, move |x| match a.eval(x) {
        Ok(v) => -v,
        Err(_) => f64::NEG_INFINITY,
    })
    .with_derivative(move |x| -hh.h(location_score(&t, x).unwrap_or(f64::NAN)));
    let (_, g) = normalize(&unnormalized, 1e-10)?;
    Ok(g)
}

/// A sample on which two estimates differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample: Vec<f64>,
    pub theta_f: f64,
    pub theta_g: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub trials: usize,
    pub agreed: usize,
    pub fraction: f64,
    pub tol: f64,
    pub seed: u64,
    pub max_gap: f64,
    pub worst: Option<Witness>,
}

/// Both location estimates on one sample.
pub fn compare_on_sample(f: &LocationSolver, g: &LocationSolver, sample: &Sample) -> Result<Witness> {
    let a = f.solve(sample)?.theta_hat;
    let b = g.solve(sample)?.theta_hat;
    Ok(Witness {
        sample: sample.values().to_vec(),
        theta_f: a,
        theta_g: b,
        gap: (a - b).abs(),
    })
}

/// Draws `trials` samples of size `n` from `f` and compares the location
/// estimates of `f` and `g` on each. Trial `i` uses stream `i` of the seed.
pub fn verify_counterexample(
    f: &DensityModel,
    g: &DensityModel,
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<AgreementReport> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("n and trials must be positive".into()));
    }
    let sf = LocationSolver::new(f, SolverOptions::default())?;
    let sg = LocationSolver::new(g, SolverOptions::default())?;
    let sampler = InverseCdfSampler::new(f)?;
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let sample = sampler.sample_with(n, &mut rng)?;
            compare_on_sample(&sf, &sg, &sample)
        })
        .collect::<Result<Vec<_>>>()?;
    let agreed = results.iter().filter(|w| w.gap <= tol).count();
    let worst = results
        .iter()
        .filter(|w| w.gap > tol)
        .max_by(|a, b| a.gap.total_cmp(&b.gap))
        .cloned();
    let max_gap = results.iter().map(|w| w.gap).fold(0.0, f64::max);
    Ok(AgreementReport {
        n,
        trials,
        agreed,
        fraction: agreed as f64 / trials as f64,
        tol,
        seed,
        max_gap,
        worst,
    })
}

/// Identified and unidentified parts of the image at sample size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalSplit {
    pub n: usize,
    pub mcss: SampleSize,
    pub identified: Interval,
    pub unidentified: Vec<Interval>,
}

pub fn subcritical_split(p_minus: ExtendedReal, p_plus: ExtendedReal, n: usize) -> Result<SubcriticalSplit> {
    let m = mcss(p_minus, p_plus)?.value;
    if let SampleSize::Finite(k) = m {
        if n >= k {
            return Err(Error::AlreadyCovered { n, mcss: m.to_string() });
        }
    }
    let identified = projection_interval(p_minus, p_plus, n);
    let mut unidentified = Vec::new();
    if identified.lo > p_minus.neg() {
        unidentified.push(Interval { lo: p_minus.neg(), hi: identified.lo });
    }
    if identified.hi < p_plus {
        unidentified.push(Interval { lo: identified.hi, hi: p_plus });
    }
    Ok(SubcriticalSplit { n, mcss: m, identified, unidentified })
}

/// [`subcritical_split`] for the image of a profile.
pub fn subcritical_witness(profile: &ScoreProfile, n: usize) -> Result<SubcriticalSplit> {
    subcritical_split(profile.p_minus, profile.p_plus, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{class_grid, same_class, tilt};

    fn gaussian() -> DensityModel {
        let c = -0.5 * (2.0 * std::f64::consts::PI).ln();
        DensityModel::new("gaussian", SupportSet::FullLine, move |x| -0.5 * x * x + c)
            .with_derivative(|x| -x)
            .assume_normalized()
    }

    fn fin(v: f64) -> ExtendedReal {
        ExtendedReal::Finite(v)
    }

    #[test]
    fn quartic_forge() {
        let g = forge_odd_h(&gaussian(), &HSpec::odd_power(1.0, 3).unwrap()).unwrap();
        let c: f64 = 0.390_062_251_089_4;
        for &x in &[-3.0f64, -1.0, 0.0, 0.4, 2.2] {
            assert!((g.log_pdf(x) - (c.ln() - x.powi(4) / 4.0)).abs() < 1e-7, "x={x}");
            assert!((g.analytic_dlog_pdf(x).unwrap() + x.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_forge_reproduces_target() {
        let f = gaussian();
        let g = forge_odd_h(&f, &HSpec::odd_power(1.0, 1).unwrap()).unwrap();
        for &x in &[-2.0, 0.0, 1.3] {
            assert!((g.log_pdf(x) - f.log_pdf(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn cosine_forge() {
        let g = forge_odd_h(&gaussian(), &HSpec::cosine(0.1, 1.0)).unwrap();
        // symbolic oracle: integral of y - 0.1 sin y is y^2/2 + 0.1 cos y
        let shape = |y: f64| -y * y / 2.0 - 0.1 * y.cos();
        let off = g.log_pdf(0.0) - shape(0.0);
        for &y in &[-4.0, -0.5, 1.0, 3.0] {
            assert!((g.log_pdf(y) - shape(y) - off).abs() < 1e-8);
        }
    }

    #[test]
    fn guard_rejects_flat_h() {
        assert!(matches!(
            forge_odd_h(&gaussian(), &HSpec::cosine(1.2, 1.0)),
            Err(Error::NotMonotone { .. })
        ));
        // dips of 1 - 1.2 cos(2y) fall between probe scores
        assert!(matches!(
            forge_odd_h(&gaussian(), &HSpec::cosine(0.3, 2.0)),
            Err(Error::NotMonotone { .. })
        ));
        assert!(HSpec::odd_power(1.0, 2).is_err());
    }

    #[test]
    fn forged_density_is_a_distinct_class() {
        let f = gaussian();
        let g = forge_odd_h(&f, &HSpec::odd_power(1.0, 3).unwrap()).unwrap();
        let grid = class_grid(&SupportSet::FullLine);
        assert_eq!(same_class(&f, &g, &ParameterKind::Location, &grid, 1e-6).unwrap(), None);
    }

    #[test]
    fn agreement_at_two_but_not_three() {
        let f = gaussian();
        let g = forge_odd_h(&f, &HSpec::odd_power(1.0, 3).unwrap()).unwrap();
        let r2 = verify_counterexample(&f, &g, 2, 100, 5, 1e-7).unwrap();
        assert_eq!(r2.fraction, 1.0);
        let r3 = verify_counterexample(&f, &g, 3, 100, 5, 1e-4).unwrap();
        assert!(r3.fraction < 0.05);
        let w = compare_on_sample(
            &LocationSolver::new(&f, SolverOptions::default()).unwrap(),
            &LocationSolver::new(&g, SolverOptions::default()).unwrap(),
            &Sample::new(vec![0.0, 0.0, 3.0]).unwrap(),
        )
        .unwrap();
        assert!((w.theta_f - 1.0).abs() < 1e-10);
        assert!((w.theta_g - 3.0 / (1.0 + 2f64.cbrt())).abs() < 1e-9);
    }

    #[test]
    fn class_member_always_agrees() {
        let f = gaussian();
        let g = tilt(&f, 2.0, &ParameterKind::Location).unwrap().model;
        for n in [2, 3, 7] {
            let r = verify_counterexample(&f, &g, n, 50, 9, 1e-7).unwrap();
            assert_eq!(r.fraction, 1.0);
        }
    }

    #[test]
    fn subcritical_examples() {
        let s = subcritical_split(fin(1.0), fin(3.0), 3).unwrap();
        assert_eq!(s.identified, Interval { lo: fin(-1.0), hi: fin(2.0) });
        assert_eq!(s.unidentified, vec![Interval { lo: fin(2.0), hi: fin(3.0) }]);
        let s = subcritical_split(fin(1.0), fin(3.0), 2).unwrap();
        assert_eq!(s.identified, Interval { lo: fin(-1.0), hi: fin(1.0) });
        assert!(matches!(
            subcritical_split(fin(1.0), fin(1.0), 2),
            Err(Error::AlreadyCovered { .. })
        ));
    }

    #[test]
    fn parse_h() {
        assert!(matches!("odd-power:d=2,p=5".parse::<HSpec>().unwrap(), HSpec::OddPower { d, p: 5 } if d == 2.0));
        assert!("cosine:a=0.1".parse::<HSpec>().is_ok());
        assert!("odd-power:p=2".parse::<HSpec>().is_err());
        assert!("spline".parse::<HSpec>().is_err());
    }
}
