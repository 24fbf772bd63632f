//! Adaptive Gauss–Kronrod quadrature.
//!
//! Integrals over infinite or half-infinite supports are mapped onto a
//! bounded variable through `x = t / (1 - t^2)`, which sends `(-1, 1)` onto
//! the real line, `(0, 1)` onto the positive half-line and `(-1, 0)` onto the
//! negative half-line. Kronrod nodes are interior, so endpoints of the
//! (open) supports are never evaluated.

use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::density::SupportSet;
use crate::error::{Error, Result};
use crate::interp::CubicHermite;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// One application of the 15-point rule on `[a, b]`. Returns the Kronrod
/// estimate and an error estimate scaled as in QUADPACK's qk15, which is
/// conservative on segments where the integrand is rough.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let scale = half.abs();
    resabs *= scale;
    resasc *= scale;
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kronrod * half, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive bisection on the segment with the largest error estimate until
/// the total error is below `abs_tol` or `rel_tol * |value|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite integration limits required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&f, a, b);
    let mut evaluations = 15;
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::DivergentIntegral(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    for _ in 0..cfg.max_subdivisions {
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
            });
        }
        let seg = heap.pop().expect("heap never empties");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval can no longer be split in floating point.
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        evaluations += 30;
        if !(v1.is_finite() && v2.is_finite() && e1.is_finite() && e2.is_finite()) {
            return Err(Error::DivergentIntegral(format!(
                "non-finite integrand near [{}, {}]",
                seg.a, seg.b
            )));
        }
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // Recompute the error sum from scratch; the running sum drifts.
    let err: f64 = heap.iter().map(|s| s.error).sum();
    let val: f64 = heap.iter().map(|s| s.value).sum();
    if err <= cfg.abs_tol.max(cfg.rel_tol * val.abs()) {
        return Ok(QuadResult {
            value: val,
            abs_error: err,
            evaluations,
        });
    }
    Err(Error::DivergentIntegral(format!(
        "error estimate {err:.3e} above tolerance after {} subdivisions (value {val:.6e})",
        cfg.max_subdivisions
    )))
}

/// The change of variables used for unbounded supports.
pub fn map_to_line(t: f64) -> f64 {
    t / (1.0 - t * t)
}

pub fn map_jacobian(t: f64) -> f64 {
    let s = 1.0 - t * t;
    (1.0 + t * t) / (s * s)
}

/// Inverse of [`map_to_line`] on `(-1, 1)`.
pub fn map_from_line(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // Root of x t^2 + t - x = 0 inside (-1, 1), written to avoid cancellation.
    2.0 * x / (1.0 + (1.0 + 4.0 * x * x).sqrt())
}

/// Range of the integration variable for a support, together with a flag
/// telling whether the `t / (1 - t^2)` map applies.
pub fn mapped_range(support: &SupportSet) -> (f64, f64, bool) {
    match *support {
        SupportSet::FullLine => (-1.0, 1.0, true),
        SupportSet::PositiveHalfLine => (0.0, 1.0, true),
        SupportSet::NegativeHalfLine => (-1.0, 0.0, true),
        SupportSet::OpenInterval(a, b) => (a, b, false),
    }
}

/// Integrates `f` over the open support, mapping unbounded pieces.
pub fn integrate_support<F: Fn(f64) -> f64>(
    f: F,
    support: &SupportSet,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let (lo, hi, mapped) = mapped_range(support);
    if mapped {
        integrate(
            |t| {
                let v = f(map_to_line(t));
                if v == 0.0 {
                    0.0
                } else {
                    v * map_jacobian(t)
                }
            },
            lo,
            hi,
            cfg,
        )
    } else {
        integrate(f, lo, hi, cfg)
    }
}

/// Fixed 15-point Kronrod sum on `[a, b]`, no adaptivity.
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    gk15(f, a, b).0
}

/// `x -> integral_{anchor}^{x} integrand`. On the full line the values are
/// cached on a fine grid and read back through a cubic Hermite interpolant
/// whose knot slopes are the integrand itself; elsewhere, and beyond the
/// cached window, the integral is evaluated directly.
#[derive(Clone)]
pub struct AnchoredIntegral {
    integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    anchor: f64,
    cache: Option<CubicHermite>,
    cfg: QuadConfig,
}

impl std::fmt::Debug for AnchoredIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnchoredIntegral")
            .field("anchor", &self.anchor)
            .field("cached_range", &self.cache.as_ref().map(|c| c.range()))
            .finish()
    }
}

const CACHE_HALF_WIDTH: f64 = 50.0;
const CACHE_KNOTS: usize = 4001;

impl AnchoredIntegral {
    pub fn new(
        integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        support: &SupportSet,
        anchor: f64,
    ) -> Result<Self> {
        if !support.contains(anchor) {
            return Err(Error::OutsideSupport { x: anchor });
        }
        let cfg = QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 200,
        };
        let mut out = Self { integrand, anchor, cache: None, cfg };
        if *support == SupportSet::FullLine {
            out.cache = out.build_cache()?;
        }
        Ok(out)
    }

    fn build_cache(&self) -> Result<Option<CubicHermite>> {
        let lo = -CACHE_HALF_WIDTH;
        let hi = CACHE_HALF_WIDTH;
        if !(lo < self.anchor && self.anchor < hi) {
            return Ok(None);
        }
        let xs: Vec<f64> = (0..CACHE_KNOTS)
            .map(|i| lo + (hi - lo) * i as f64 / (CACHE_KNOTS - 1) as f64)
            .collect();
        let f = &self.integrand;
        let k0 = xs.partition_point(|&x| x < self.anchor);
        let mut ys = vec![f64::NAN; xs.len()];
        // knots at or above the anchor
        let mut acc = integrate(|t| f(t), self.anchor, xs[k0], &self.cfg)?.value;
        ys[k0] = acc;
        let mut last = xs.len() - 1;
        for k in k0 + 1..xs.len() {
            match integrate(|t| f(t), xs[k - 1], xs[k], &self.cfg) {
                Ok(r) if (acc + r.value).is_finite() => {
                    acc += r.value;
                    ys[k] = acc;
                }
                _ => {
                    last = k - 1;
                    break;
                }
            }
        }
        // knots below the anchor
        let mut first = 0;
        if k0 > 0 {
            let mut acc = -integrate(|t| f(t), xs[k0 - 1], self.anchor, &self.cfg)?.value;
            ys[k0 - 1] = acc;
            for k in (0..k0 - 1).rev() {
                match integrate(|t| f(t), xs[k], xs[k + 1], &self.cfg) {
                    Ok(r) if (acc - r.value).is_finite() => {
                        acc -= r.value;
                        ys[k] = acc;
                    }
                    _ => {
                        first = k + 1;
                        break;
                    }
                }
            }
        }
        if last <= first {
            return Ok(None);
        }
        let xs = xs[first..=last].to_vec();
        let ys = ys[first..=last].to_vec();
        let slopes: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        if slopes.iter().any(|s| !s.is_finite()) {
            return Ok(None);
        }
        Ok(Some(CubicHermite::with_slopes(xs, ys, slopes)?))
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let f = &self.integrand;
        if let Some(c) = &self.cache {
            let (lo, hi) = c.range();
            if x >= lo && x <= hi {
                return Ok(c.eval(x));
            }
            let (edge, base) = if x < lo { (lo, c.values()[0]) } else { (hi, c.values()[c.values().len() - 1]) };
            return Ok(base + integrate(|t| f(t), edge, x, &self.cfg)?.value);
        }
        Ok(integrate(|t| f(t), self.anchor, x, &self.cfg)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x + 2.0 * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_over_line() {
        let r = integrate_support(
            |x| (-0.5 * x * x).exp(),
            &SupportSet::FullLine,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn exponential_over_half_line() {
        let r = integrate_support(
            |x| (-x).exp(),
            &SupportSet::PositiveHalfLine,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate_support(
            |x: f64| x.exp(),
            &SupportSet::NegativeHalfLine,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // x^{-1/2} on (0, 1) integrates to 2.
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let r = integrate_support(
            |x: f64| 1.0 / (1.0 + x.abs()),
            &SupportSet::FullLine,
            &QuadConfig::default(),
        );
        assert!(matches!(r, Err(Error::DivergentIntegral(_))));
    }

    #[test]
    fn anchored_integral_of_cubic() {
        let a = AnchoredIntegral::new(Arc::new(|y: f64| y * y * y), &SupportSet::FullLine, 0.0).unwrap();
        for &x in &[-60.0f64, -3.3, 0.0, 0.7, 12.25, 49.99, 75.0] {
            let exact = x.powi(4) / 4.0;
            assert!((a.eval(x).unwrap() - exact).abs() < 1e-6 * exact.max(1.0), "x={x}");
        }
        let h = AnchoredIntegral::new(
            Arc::new(|y: f64| 1.0 / y),
            &SupportSet::PositiveHalfLine,
            1.0,
        )
        .unwrap();
        assert!((h.eval(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn map_roundtrip() {
        for &x in &[-1e5, -3.0, -1e-9, 0.0, 0.5, 42.0, 1e5] {
            let t = map_from_line(x);
            assert!(t > -1.0 && t < 1.0);
            assert!((map_to_line(t) - x).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}
