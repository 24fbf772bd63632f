//! One-parameter transformation groups `H_theta` whose parameter derivative
//! factors as `T(theta) U1(H)` and whose log-Jacobian derivative factors as
//! `T(theta) U2(H)`. `T` is never stored: it is a common nonzero factor of
//! every summand of the likelihood equation.

use std::fmt;
use std::sync::Arc;

use crate::density::DensityModel;

pub trait GroupTransform: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    /// `H_theta(x)`.
    fn apply(&self, theta: f64, x: f64) -> f64;
    /// `d/dx H_theta(x)`, positive on the support.
    fn dx(&self, theta: f64, x: f64) -> f64;
    /// `d/dx log H'_theta(x)`.
    fn dlog_dx(&self, theta: f64, x: f64) -> f64;
    fn u1(&self, y: f64) -> f64;
    fn u2(&self, y: f64) -> f64;
    /// Parameter value for which `H` is the identity.
    fn identity(&self) -> f64;
    /// Unconstrained coordinate used for bracketing.
    fn to_internal(&self, theta: f64) -> f64 {
        theta
    }
    fn from_internal(&self, u: f64) -> f64 {
        u
    }
}

/// `H_delta(x) = sinh(asinh(x) + delta)`; `U1 = sqrt(1 + y^2)`, `U2 = y / sqrt(1 + y^2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinhArcsinh;

impl GroupTransform for SinhArcsinh {
    fn name(&self) -> String {
        "sinh_arcsinh".into()
    }
    fn apply(&self, theta: f64, x: f64) -> f64 {
        (x.asinh() + theta).sinh()
    }
    fn dx(&self, theta: f64, x: f64) -> f64 {
        (x.asinh() + theta).cosh() / x.hypot(1.0)
    }
    fn dlog_dx(&self, theta: f64, x: f64) -> f64 {
        let r = x.hypot(1.0);
        (x.asinh() + theta).tanh() / r - x / (r * r)
    }
    fn u1(&self, y: f64) -> f64 {
        y.hypot(1.0)
    }
    fn u2(&self, y: f64) -> f64 {
        y / y.hypot(1.0)
    }
    fn identity(&self) -> f64 {
        0.0
    }
}

/// Generalized location group `H_theta(x) = x + slope * theta`; `U1 = 1`, `U2 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Translation {
    pub slope: f64,
}

impl Translation {
    /// `H_theta(x) = x - theta`, the ordinary location family `f(x - theta)`.
    pub fn location() -> Self {
        Self { slope: -1.0 }
    }
}

impl GroupTransform for Translation {
    fn name(&self) -> String {
        format!("translation(slope={})", self.slope)
    }
    fn apply(&self, theta: f64, x: f64) -> f64 {
        x + self.slope * theta
    }
    fn dx(&self, _theta: f64, _x: f64) -> f64 {
        1.0
    }
    fn dlog_dx(&self, _theta: f64, _x: f64) -> f64 {
        0.0
    }
    fn u1(&self, _y: f64) -> f64 {
        1.0
    }
    fn u2(&self, _y: f64) -> f64 {
        0.0
    }
    fn identity(&self) -> f64 {
        0.0
    }
}

/// Generalized scale group `H_theta(x) = theta * x` with `theta > 0`;
/// `U1 = y`, `U2 = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dilation;

impl GroupTransform for Dilation {
    fn name(&self) -> String {
        "dilation".into()
    }
    fn apply(&self, theta: f64, x: f64) -> f64 {
        theta * x
    }
    fn dx(&self, theta: f64, _x: f64) -> f64 {
        theta
    }
    fn dlog_dx(&self, _theta: f64, _x: f64) -> f64 {
        0.0
    }
    fn u1(&self, y: f64) -> f64 {
        y
    }
    fn u2(&self, _y: f64) -> f64 {
        1.0
    }
    fn identity(&self) -> f64 {
        1.0
    }
    fn to_internal(&self, theta: f64) -> f64 {
        theta.ln()
    }
    fn from_internal(&self, u: f64) -> f64 {
        u.exp()
    }
}

/// Member `H'_theta(x) f(H_theta(x))` of the group family generated by `base`.
pub fn group_member(base: &DensityModel, transform: Arc<dyn GroupTransform>, theta: f64) -> DensityModel {
    let name = format!("{}[{}={theta}]", base.name(), transform.name());
    let b = base.clone();
    let t = transform.clone();
    let mut model = DensityModel::new(name, base.support(), move |x| {
        t.dx(theta, x).ln() + b.log_pdf(t.apply(theta, x))
    })
    .with_param("theta", theta);
    for (k, v) in base.params() {
        model = model.with_param(k.clone(), *v);
    }
    if base.has_analytic_derivative() {
        let b = base.clone();
        let t = transform;
        model = model.with_derivative(move |x| {
            let y = t.apply(theta, x);
            t.dlog_dx(theta, x) + b.analytic_dlog_pdf(y).unwrap_or(f64::NAN) * t.dx(theta, x)
        });
    }
    if base.is_normalized() {
        model = model.assume_normalized();
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{fd_dlogf, SupportSet};

    #[test]
    fn sinh_arcsinh_factorization() {
        // d/dtheta H = U1(H) and d/dtheta log H' = U2(H), by central differences
        let g = SinhArcsinh;
        let h = 1e-6;
        for &(theta, x) in &[(0.3, -1.2), (-0.7, 0.4), (1.0, 2.5)] {
            let y = g.apply(theta, x);
            let dtheta = (g.apply(theta + h, x) - g.apply(theta - h, x)) / (2.0 * h);
            assert!((dtheta - g.u1(y)).abs() < 1e-8);
            let dlj = (g.dx(theta + h, x).ln() - g.dx(theta - h, x).ln()) / (2.0 * h);
            assert!((dlj - g.u2(y)).abs() < 1e-8);
            let dxx = (g.dx(theta, x + h).ln() - g.dx(theta, x - h).ln()) / (2.0 * h);
            assert!((dxx - g.dlog_dx(theta, x)).abs() < 1e-8);
        }
    }

    #[test]
    fn member_derivative_matches_differences() {
        let base = DensityModel::new("gaussian", SupportSet::FullLine, |x| -0.5 * x * x)
            .with_derivative(|x| -x);
        let m = group_member(&base, Arc::new(SinhArcsinh), 0.8);
        for &x in &[-2.0, -0.3, 0.0, 1.7] {
            let fd = fd_dlogf(&m, x, 1e-6).unwrap();
            assert!((fd - m.analytic_dlog_pdf(x).unwrap()).abs() < 1e-6);
        }
    }
}
