//! Piecewise cubic Hermite interpolation on a strictly increasing grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicHermite {
    /// Hermite interpolant with caller-supplied knot slopes.
    pub fn with_slopes(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        check_grid(&xs, &ys)?;
        if slopes.len() != xs.len() {
            return Err(Error::InvalidArgument("slope count differs from grid".into()));
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Fritsch–Carlson monotone cubic: the interpolant is monotone on every
    /// interval where the data are.
    pub fn monotone(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_grid(&xs, &ys)?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] <= 0.0 {
                m[k] = 0.0;
            } else {
                // weighted harmonic mean (Fritsch–Butland), keeps monotonicity
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        for k in 0..n - 1 {
            if delta[k] == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let a = m[k] / delta[k];
            let b = m[k + 1] / delta[k];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[k] = tau * a * delta[k];
                m[k + 1] = tau * b * delta[k];
            }
        }
        Ok(Self { xs, ys, slopes: m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn end_slopes(&self) -> (f64, f64) {
        (self.slopes[0], self.slopes[self.slopes.len() - 1])
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    /// Value and derivative. Outside the grid the end tangent lines are used.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let (lo, hi) = self.range();
        if x <= lo {
            return (self.ys[0] + self.slopes[0] * (x - lo), self.slopes[0]);
        }
        if x >= hi {
            let n = self.xs.len() - 1;
            return (self.ys[n] + self.slopes[n] * (x - hi), self.slopes[n]);
        }
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1, m0, m1) = (self.ys[k], self.ys[k + 1], self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let deriv = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
        (value, deriv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }
}

fn check_grid(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::InvalidArgument(
            "interpolation needs at least two knots and matching value count".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite knot or value".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots() {
        let xs = vec![0.0, 1.0, 2.5, 4.0];
        let ys = vec![1.0, 3.0, 3.5, 10.0];
        let p = CubicHermite::monotone(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| if *x < 4.0 { 0.0 } else { x * x }).collect();
        let p = CubicHermite::monotone(xs, ys).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let v = p.eval(i as f64 * 0.0095);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn hermite_with_exact_slopes_is_accurate() {
        let xs: Vec<f64> = (0..=100).map(|i| -5.0 + i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -x * x * x * x / 4.0).collect();
        let ms: Vec<f64> = xs.iter().map(|x| -x * x * x).collect();
        let p = CubicHermite::with_slopes(xs, ys, ms).unwrap();
        let x: f64 = 1.234;
        assert!((p.eval(x) + x.powi(4) / 4.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(CubicHermite::monotone(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
    }
}
