//! Bracketed scalar root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once the bracket is narrower than this (absolute).
    pub x_tol: f64,
    /// Stop as soon as |f| drops to this level. Zero disables the test.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            f_tol: 0.0,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

fn opposite_signs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &RootOptions) -> Result<Root> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0, bracket: (a, a) });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0, bracket: (b, b) });
    }
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonConvergence(format!(
            "non-finite function value at bracket ends ({fa}, {fb})"
        )));
    }
    if !opposite_signs(fa, fb) {
        return Err(Error::BracketFailure);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=opts.max_iter {
        if opposite_signs(fb, fc) {
            // keep c on the other side of the root from b
        } else {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.x_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= opts.f_tol {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Ok(Root { x: b, fx: fb, iterations: iter, bracket: (lo, hi) });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonConvergence(format!("non-finite function value at {b}")));
        }
    }
    Err(Error::NonConvergence(format!(
        "Brent iteration limit {} reached",
        opts.max_iter
    )))
}

/// Grows `[center - w, center + w]` by doubling `w` until `f` changes sign
/// across it. A side whose next value is not finite stops moving while the
/// other keeps growing; a non-finite start is pulled toward the centre.
pub fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    center: f64,
    half_width: f64,
    max_doublings: usize,
) -> Result<(f64, f64)> {
    let start = |dir: f64, f: &mut F| {
        let mut w = half_width;
        for _ in 0..=max_doublings {
            let x = center + dir * w;
            let v = f(x);
            if v.is_finite() {
                return Some((x, v));
            }
            w *= 0.5;
        }
        None
    };
    let ((mut lo, mut flo), (mut hi, mut fhi)) = match (start(-1.0, &mut f), start(1.0, &mut f)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::BracketFailure),
    };
    let (mut lo_open, mut hi_open) = (true, true);
    for _ in 0..=max_doublings {
        if flo == 0.0 || fhi == 0.0 || opposite_signs(flo, fhi) {
            return Ok((lo, hi));
        }
        if lo_open {
            let x = center - 2.0 * (center - lo);
            let v = f(x);
            if v.is_finite() {
                (lo, flo) = (x, v);
            } else {
                lo_open = false;
            }
        }
        if hi_open {
            let x = center + 2.0 * (hi - center);
            let v = f(x);
            if v.is_finite() {
                (hi, fhi) = (x, v);
            } else {
                hi_open = false;
            }
        }
        if !lo_open && !hi_open {
            break;
        }
    }
    if flo == 0.0 || fhi == 0.0 || opposite_signs(flo, fhi) {
        return Ok((lo, hi));
    }
    Err(Error::BracketFailure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root_of_two() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, &RootOptions::default()).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_bracket() {
        let r = brent(|x| x * x + 1.0, -1.0, 1.0, &RootOptions::default());
        assert!(matches!(r, Err(Error::BracketFailure)));
    }

    #[test]
    fn handles_steep_monotone_function() {
        let r = brent(|x: f64| (x - 3.0).exp() - 1.0, -50.0, 50.0, &RootOptions::default()).unwrap();
        assert!((r.x - 3.0).abs() < 1e-11);
    }

    #[test]
    fn expands_past_one_sided_overflow() {
        let f = |x: f64| if x > 5.0 { f64::NAN } else { x + 30.0 };
        let (lo, hi) = expand_bracket(f, 0.0, 1.0, 60).unwrap();
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        assert!(matches!(expand_bracket(|_| f64::NAN, 0.0, 1.0, 60), Err(Error::BracketFailure)));
    }

    #[test]
    fn expands_until_sign_change() {
        let (lo, hi) = expand_bracket(|x| x - 1000.0, 0.0, 1.0, 60).unwrap();
        assert!(lo <= 1000.0 && hi >= 1000.0);
        assert!(expand_bracket(|_| 1.0, 0.0, 1.0, 10).is_err());
    }
}
