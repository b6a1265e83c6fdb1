//! Bracketed scalar root finders.

use crate::error::{Error, Result};

/// Stopping rule shared by the root finders.
#[derive(Debug, Clone, Copy)]
pub struct RootOpts {
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOpts {
    fn default() -> Self {
        Self {
            x_tol: 1e-15,
            max_iter: 200,
        }
    }
}

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: RootOpts) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::RootFailure(format!(
            "non-finite function value at bracket ends ({fa}, {fb})"
        )));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFailure(format!(
            "no sign change on [{a}, {b}]: f = ({fa:e}, {fb:e})"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..opts.max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootFailure(format!("non-finite f({b})")));
        }
    }
    Err(Error::RootFailure(format!(
        "Brent did not converge in {} iterations",
        opts.max_iter
    )))
}

/// Newton's method safeguarded by bisection on a sign-changing bracket.
/// `fdf` returns the value and derivative.
pub fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    guess: f64,
    opts: RootOpts,
) -> Result<f64> {
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootFailure(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    // Orient so that f(xl) < 0.
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = if guess > lo.min(hi) && guess < lo.max(hi) {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = fdf(x);
    for _ in 0..opts.max_iter {
        let outside = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        if outside || (2.0 * f).abs() > (dx_old * df).abs() || !df.is_finite() || df == 0.0 {
            dx_old = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        } else {
            dx_old = dx;
            dx = f / df;
            x -= dx;
        }
        let tol = opts.x_tol.max(4.0 * f64::EPSILON * x.abs());
        if dx.abs() < tol {
            return Ok(x);
        }
        let r = fdf(x);
        f = r.0;
        df = r.1;
        if f == 0.0 {
            return Ok(x);
        }
        if !f.is_finite() {
            return Err(Error::RootFailure(format!("non-finite f({x})")));
        }
        if f < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
        if (xh - xl).abs() < tol {
            return Ok(x);
        }
    }
    Err(Error::RootFailure(format!(
        "safeguarded Newton did not converge in {} iterations",
        opts.max_iter
    )))
}
