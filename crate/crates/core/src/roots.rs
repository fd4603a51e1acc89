//! Scalar root finding on bracketed intervals.

use crate::error::{Error, Result};

/// Bisection on a sign-changing bracket. Stops when the bracket is
/// narrower than `xtol` or after `max_iter` halvings.
pub fn bisect<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {flo:e}, f({b}) = {fhi:e}"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brent's method (inverse quadratic interpolation safeguarded by
/// bisection).
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa:e}, f({b}) = {fb:e}"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
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
            }
            p = p.abs();
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
    }
    Ok(b)
}

/// A few Newton iterations from `x`, rejected whenever an iterate leaves
/// `[lo, hi]` or fails to reduce the residual.
pub fn newton_polish<F, D>(f: F, df: D, x: f64, lo: f64, hi: f64, iters: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x;
    let mut fx = f(x);
    for _ in 0..iters {
        let d = df(x);
        if d == 0.0 || !d.is_finite() || fx == 0.0 {
            break;
        }
        let xn = x - fx / d;
        if !(lo..=hi).contains(&xn) {
            break;
        }
        let fxn = f(xn);
        if fxn.abs() >= fx.abs() {
            break;
        }
        x = xn;
        fx = fxn;
    }
    x
}

/// Illinois variant of regula falsi, used to polish event locations.
/// `fa` and `fb` must have opposite signs.
pub fn illinois<F>(mut f: F, a: f64, fa: f64, b: f64, fb: f64, xtol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Sample `f` on `n` equal subintervals of `[a, b]` and return the first
/// subinterval where it changes sign.
pub fn first_sign_change<F>(f: F, a: f64, b: f64, n: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 || f0.signum() != f1.signum() {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn brent_matches_cos_root() {
        let r = brent(f64::cos, 1.0, 2.0, 1e-15, 100).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn brent_rejects_missing_bracket() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn illinois_converges() {
        let f = |x: f64| x.exp() - 3.0;
        let r = illinois(f, 0.0, f(0.0), 2.0, f(2.0), 1e-14);
        assert_abs_diff_eq!(r, 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn newton_polish_improves() {
        let x = newton_polish(|x| x * x - 2.0, |x| 2.0 * x, 1.4, 1.0, 2.0, 8);
        assert_abs_diff_eq!(x, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn scan_reports_first_interval() {
        let (a, b) = first_sign_change(f64::sin, 0.5, 10.0, 100).unwrap();
        assert!(a < std::f64::consts::PI && b >= std::f64::consts::PI);
    }
}
