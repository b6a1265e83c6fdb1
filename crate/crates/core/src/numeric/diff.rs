//! Central finite differences with one Richardson extrapolation step.

use crate::error::{Error, Result};

/// A derivative estimate and an error indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

fn central<F: FnMut(f64) -> Result<f64>>(f: &mut F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Richardson-extrapolated central difference with step `h` and `h/2`.
/// The error indicator is the gap between the two extrapolated values
/// at steps `h` and `h/2`.
pub fn richardson<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<Derivative> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DerivativeFailure(format!("bad step {h}")));
    }
    let d1 = central(&mut f, x, h)?;
    let d2 = central(&mut f, x, 0.5 * h)?;
    let d4 = central(&mut f, x, 0.25 * h)?;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    if !(r2.is_finite() && r1.is_finite()) {
        return Err(Error::DerivativeFailure(format!(
            "non-finite difference at x = {x}"
        )));
    }
    Ok(Derivative {
        value: r2,
        error: (r2 - r1).abs(),
    })
}

/// Plain central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    central(&mut f, x, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_on_exp() {
        let d = richardson(|x| Ok(x.exp()), 0.3, 1e-2).unwrap();
        assert!((d.value - 0.3f64.exp()).abs() < 1e-10);
        assert!(d.error < 1e-8);
    }

    #[test]
    fn errors_propagate() {
        let r = richardson(
            |x| if x > 0.0 { Err(Error::Pole) } else { Ok(x) },
            0.0,
            1e-3,
        );
        assert!(r.is_err());
    }
}
