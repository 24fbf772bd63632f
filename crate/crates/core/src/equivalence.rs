//! Equivalence classes: densities whose scores are positive multiples of one
//! another share every maximum-likelihood estimate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::{normalize, DensityModel, SupportSet};
use crate::error::{Error, Result};
use crate::group::GroupTransform;
use crate::quad::AnchoredIntegral;
use crate::score::{kind_score, KindTag, ParameterKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltSpec {
    pub d: f64,
    pub kind: KindTag,
    /// `c` with the tilted log-density shifted by `log c`.
    pub normalizer: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Tilt {
    pub model: DensityModel,
    pub spec: TiltSpec,
}

/// First interior zero of `u1` on the support probe grid, if any.
pub fn u1_interior_zero(transform: &dyn GroupTransform, support: &SupportSet) -> Option<f64> {
    let grid = support.probe_grid(401, 50.0);
    let vals: Vec<f64> = grid.iter().map(|&y| transform.u1(y)).collect();
    if let Some(i) = vals.iter().position(|&v| v == 0.0) {
        return Some(grid[i]);
    }
    grid.windows(2)
        .zip(vals.windows(2))
        .find(|(_, v)| (v[0] < 0.0) != (v[1] < 0.0))
        .map(|(x, _)| 0.5 * (x[0] + x[1]))
}

/// The member of `model`'s equivalence class with exponent `d`:
/// location `c f^d`, scale `c |x|^(d-1) f^d`, group
/// `c exp((d-1) int u2/u1) f^d`. The result is normalized.
pub fn tilt(model: &DensityModel, d: f64, kind: &ParameterKind) -> Result<Tilt> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!("tilt exponent must be positive, got {d}")));
    }
    let support = model.support();
    let base = model.clone();
    let unnormalized = match kind {
        ParameterKind::Location => {
            if support != SupportSet::FullLine {
                return Err(Error::UnsupportedSupport {
                    op: "location tilt",
                    support: support.to_string(),
                });
            }
            let b = base.clone();
            let mut m = DensityModel::new(tilted_name(model, d), support, move |x| d * b.log_pdf(x));
            if model.has_analytic_derivative() {
                let b = base.clone();
                m = m.with_derivative(move |x| d * b.analytic_dlog_pdf(x).unwrap_or(f64::NAN));
            }
            m
        }
        ParameterKind::Scale => {
            match support {
                SupportSet::FullLine if d != 1.0 => return Err(Error::SingletonClass { d }),
                SupportSet::OpenInterval(..) => {
                    return Err(Error::UnsupportedSupport {
                        op: "scale tilt",
                        support: support.to_string(),
                    })
                }
                _ => {}
            }
            let b = base.clone();
            let mut m = DensityModel::new(tilted_name(model, d), support, move |x: f64| {
                let lp = b.log_pdf(x);
                if d == 1.0 {
                    lp
                } else {
                    (d - 1.0) * x.abs().ln() + d * lp
                }
            });
            if model.has_analytic_derivative() {
                let b = base.clone();
                m = m.with_derivative(move |x| {
                    (d - 1.0) / x + d * b.analytic_dlog_pdf(x).unwrap_or(f64::NAN)
                });
            }
            m
        }
        ParameterKind::Group(t) => {
            if d != 1.0 && u1_interior_zero(t.as_ref(), &support).is_some() {
                return Err(Error::SingletonClass { d });
            }
            let anchor = group_anchor(model, t.as_ref())?;
            let tt = t.clone();
            let ratio: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |y| tt.u2(y) / tt.u1(y));
            let integral = Arc::new(AnchoredIntegral::new(ratio, &support, anchor)?);
            let b = base.clone();
            let a = integral.clone();
            let mut m = DensityModel::new(tilted_name(model, d), support, move |x| {
                let lp = b.log_pdf(x);
                if d == 1.0 {
                    return lp;
                }
                match a.eval(x) {
                    Ok(v) => (d - 1.0) * v + d * lp,
                    Err(_) => f64::NAN,
                }
            });
            if model.has_analytic_derivative() {
                let b = base.clone();
                let tt = t.clone();
                m = m.with_derivative(move |x| {
                    (d - 1.0) * tt.u2(x) / tt.u1(x) + d * b.analytic_dlog_pdf(x).unwrap_or(f64::NAN)
                });
            }
            m
        }
    };
    let mut unnormalized = unnormalized.with_param("d", d);
    for (k, v) in model.params() {
        unnormalized = unnormalized.with_param(k.clone(), *v);
    }
    let (c, normalized) = normalize(&unnormalized, 1e-10)?;
    Ok(Tilt {
        model: normalized,
        spec: TiltSpec {
            d,
            kind: kind.tag(),
            normalizer: Some(c),
        },
    })
}

fn tilted_name(model: &DensityModel, d: f64) -> String {
    format!("{}^{d}", model.name())
}

/// Zero of the group score on the probe grid, else an interior default.
fn group_anchor(model: &DensityModel, t: &dyn GroupTransform) -> Result<f64> {
    let support = model.support();
    let grid = support.probe_grid(257, 10.0);
    let score = |y: f64| -> f64 {
        match crate::density::dlogf(model, y) {
            Ok(v) => t.u2(y) + t.u1(y) * v,
            Err(_) => f64::NAN,
        }
    };
    let vals: Vec<f64> = grid.iter().map(|&y| score(y)).collect();
    for (x, v) in grid.windows(2).zip(vals.windows(2)) {
        if v[0] == 0.0 {
            return Ok(x[0]);
        }
        if v[0].is_finite() && v[1].is_finite() && (v[0] < 0.0) != (v[1] < 0.0) {
            let r = crate::root::brent(score, x[0], x[1], &Default::default())?;
            return Ok(r.x);
        }
    }
    Ok(grid[grid.len() / 2])
}

/// Default comparison grid: 201 interior probe points of the support.
pub fn class_grid(support: &SupportSet) -> Vec<f64> {
    support.probe_grid(201, 10.0)
}

/// The constant `d` with `score_g = d score_f` on `grid`, if there is one.
pub fn same_class(
    f: &DensityModel,
    g: &DensityModel,
    kind: &ParameterKind,
    grid: &[f64],
    tol: f64,
) -> Result<Option<f64>> {
    if f.support() != g.support() {
        return Err(Error::InvalidArgument(format!(
            "supports differ: {} vs {}",
            f.support(),
            g.support()
        )));
    }
    let mut ratios = Vec::new();
    for &x in grid.iter().filter(|&&x| f.support().contains(x)) {
        let sf = kind_score(f, kind, x)?;
        if sf.abs() > tol {
            ratios.push(kind_score(g, kind, x)? / sf);
        }
    }
    if ratios.is_empty() {
        return Err(Error::DegenerateScore);
    }
    if ratios.iter().any(|r| !r.is_finite()) {
        return Ok(None);
    }
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len() / 2;
    let median = if ratios.len() % 2 == 1 {
        ratios[m]
    } else {
        0.5 * (ratios[m - 1] + ratios[m])
    };
    let spread = ratios.iter().map(|r| (r - median).abs()).fold(0.0, f64::max);
    Ok((median > 0.0 && spread < tol).then_some(median))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleIdentification {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCheck {
    pub lambda: f64,
    /// Limits of `log f(lambda x) - log f(x)` and the same for `g` as `x -> 0`.
    pub f_limit: f64,
    pub g_limit: f64,
    pub converged: bool,
    pub pathological: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleIdentificationReport {
    pub verdict: ScaleIdentification,
    pub checks: Vec<LambdaCheck>,
}

const ID_TOL: f64 = 1e-6;

fn log_ratio_limit(m: &DensityModel, lambda: f64, sign: f64) -> (f64, bool) {
    let at = |x: f64| m.log_pdf(sign * lambda * x) - m.log_pdf(sign * x);
    let vals: Vec<f64> = (3..=6).map(|k| at(10f64.powi(-k))).collect();
    // corrections are linear in x: extrapolate the last two decades
    let extrap = (10.0 * vals[3] - vals[2]) / 9.0;
    let prev = (10.0 * vals[2] - vals[1]) / 9.0;
    let converged = vals.iter().all(|v| v.is_finite()) && (extrap - prev).abs() < 1e-4;
    (extrap, converged)
}

/// Compares `lim g(lambda x)/g(x)` with `lim f(lambda x)/f(x)` as `x -> 0`
/// from inside a half-line support, for every `lambda`.
pub fn scale_identification(
    f: &DensityModel,
    g: &DensityModel,
    lambdas: &[f64],
) -> Result<ScaleIdentificationReport> {
    let sign = match f.support() {
        SupportSet::PositiveHalfLine => 1.0,
        SupportSet::NegativeHalfLine => -1.0,
        other => {
            return Err(Error::UnsupportedSupport {
                op: "scale identification",
                support: other.to_string(),
            })
        }
    };
    if g.support() != f.support() {
        return Err(Error::InvalidArgument("supports differ".into()));
    }
    let checks: Vec<LambdaCheck> = lambdas
        .iter()
        .map(|&lambda| {
            let (fl, fc) = log_ratio_limit(f, lambda, sign);
            let (gl, gc) = log_ratio_limit(g, lambda, sign);
            LambdaCheck {
                lambda,
                f_limit: fl,
                g_limit: gl,
                converged: fc && gc,
                pathological: (fl + lambda.ln()).abs() < ID_TOL,
            }
        })
        .collect();
    let verdict = if checks.iter().any(|c| !c.converged || c.pathological) {
        ScaleIdentification::Inconclusive
    } else if checks.iter().all(|c| (c.f_limit - c.g_limit).abs() < ID_TOL) {
        ScaleIdentification::Holds
    } else {
        ScaleIdentification::Fails
    };
    Ok(ScaleIdentificationReport { verdict, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::fd_dlogf;
    use crate::group::SinhArcsinh;
    use crate::score::scale_score;

    fn gaussian() -> DensityModel {
        DensityModel::new("gaussian", SupportSet::FullLine, |x| -0.5 * x * x)
            .with_derivative(|x| -x)
    }

    fn exponential() -> DensityModel {
        DensityModel::new("exp", SupportSet::PositiveHalfLine, |x| -x).with_derivative(|_| -1.0)
    }

    #[test]
    fn location_tilt_squares_the_kernel() {
        let t = tilt(&gaussian(), 2.0, &ParameterKind::Location).unwrap();
        // variance 1/2 normal: log density -x^2 - log(sqrt(pi))
        for &x in &[-1.5, 0.0, 0.8] {
            let exact = -x * x - 0.5 * std::f64::consts::PI.ln();
            assert!((t.model.log_pdf(x) - exact).abs() < 1e-9);
        }
        assert!(t.model.is_normalized());
    }

    #[test]
    fn unit_tilt_is_identity() {
        let f = gaussian().shifted(-0.5 * (2.0 * std::f64::consts::PI).ln(), true);
        for kind in [ParameterKind::Location, ParameterKind::Scale, ParameterKind::group(SinhArcsinh)] {
            let t = tilt(&f, 1.0, &kind).unwrap();
            assert!((t.spec.normalizer.unwrap() - 1.0).abs() < 1e-9);
            assert!((t.model.log_pdf(0.3) - f.log_pdf(0.3)).abs() < 1e-9);
        }
    }

    #[test]
    fn exponential_scale_tilt() {
        let t = tilt(&exponential(), 2.0, &ParameterKind::Scale).unwrap();
        // density 4 x exp(-2x); scale score 2 (1 - x), checked by differences
        let g = t.model.without_derivative();
        for &x in &[0.2, 1.0, 3.5] {
            assert!((t.model.log_pdf(x) - (4.0 * x).ln() + 2.0 * x).abs() < 1e-9);
            let fd = 1.0 + x * fd_dlogf(&g, x, 1e-6).unwrap();
            assert!((fd - 2.0 * (1.0 - x)).abs() < 1e-6);
            assert!((scale_score(&t.model, x).unwrap() - 2.0 * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_tilt_on_line_is_singleton() {
        assert!(matches!(
            tilt(&gaussian(), 2.0, &ParameterKind::Scale),
            Err(Error::SingletonClass { .. })
        ));
    }

    #[test]
    fn group_tilt_matches_closed_form() {
        // int u2/u1 = log(1 + y^2) / 2 for the sinh-arcsinh group
        let t = tilt(&gaussian(), 3.0, &ParameterKind::group(SinhArcsinh)).unwrap();
        let shape = |x: f64| (1.0 + x * x).ln() - 1.5 * x * x;
        let offset = t.model.log_pdf(0.0) - shape(0.0);
        for &x in &[-4.0, -1.0, 0.5, 2.0, 7.5] {
            assert!((t.model.log_pdf(x) - shape(x) - offset).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn heavy_tail_tilt_diverges() {
        let cauchy = DensityModel::new("cauchy", SupportSet::FullLine, |x: f64| -(x * x).ln_1p());
        assert!(matches!(
            tilt(&cauchy, 0.4, &ParameterKind::Location),
            Err(Error::DivergentIntegral(_))
        ));
    }

    #[test]
    fn same_class_examples() {
        let f = gaussian();
        let grid = class_grid(&f.support());
        let g = tilt(&f, 2.0, &ParameterKind::Location).unwrap().model;
        let d = same_class(&f, &g, &ParameterKind::Location, &grid, 1e-6).unwrap().unwrap();
        assert!((d - 2.0).abs() < 1e-9);
        let d = same_class(&f, &f, &ParameterKind::Location, &grid, 1e-6).unwrap().unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let logistic = DensityModel::new("logistic", SupportSet::FullLine, |x: f64| {
            -x.abs() - 2.0 * (-x.abs()).exp().ln_1p()
        })
        .with_derivative(|x: f64| -(0.5 * x).tanh());
        // oracle: x / tanh(x/2) is 2.164 at 1 and 2.626 at 2
        let r = |x: f64| x / (0.5 * x).tanh();
        assert!((r(1.0) - 2.164).abs() < 1e-3 && (r(2.0) - 2.626).abs() < 1e-3);
        assert_eq!(same_class(&f, &logistic, &ParameterKind::Location, &grid, 1e-6).unwrap(), None);
    }

    #[test]
    fn degenerate_reference_score() {
        let flat = DensityModel::new("flat", SupportSet::FullLine, |_| 0.0).with_derivative(|_| 0.0);
        let r = same_class(&flat, &flat, &ParameterKind::Location, &[0.0, 1.0], 1e-6);
        assert!(matches!(r, Err(Error::DegenerateScore)));
    }

    #[test]
    fn scale_identification_pins_unit_exponent() {
        let gamma2 = DensityModel::new("gamma", SupportSet::PositiveHalfLine, |x: f64| x.ln() - x)
            .with_derivative(|x| 1.0 / x - 1.0);
        for &d in &[0.5, 1.0, 2.0, 5.0] {
            let g = tilt(&gamma2, d, &ParameterKind::Scale).unwrap().model;
            let rep = scale_identification(&gamma2, &g, &[2.0, 3.0]).unwrap();
            let expected = if d == 1.0 { ScaleIdentification::Holds } else { ScaleIdentification::Fails };
            assert_eq!(rep.verdict, expected, "d={d}");
        }
    }
}
