//! Convexity test behind the monotonicity of the period in `b`.
//!
//! With `phi2` the center and `eta = (c - phi2)/phi2`, the substitution
//! `x = (phi - phi2)/phi2` turns the profile equation into a Newton system
//! with potential
//!
//! ```text
//! V(x) = -x^2/2 - x - eta + eta^2/(eta - x) = x^2 (2 - eta + x) / (2 (eta - x))
//! ```
//!
//! The period grows with the energy when `W = V / V'^2` is convex between
//! the left maximum `x1` and its level-set partner `x2`. The second
//! derivative factors as `W'' = -3 (eta - x) R(x) / ((x - x1)^4 (x - x3)^4)`
//! with a cubic `R`, so convexity reduces to `R < 0` on `[x1, x2]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::roots::{brent, RootOpts};
use crate::wave_family::{cubic_roots, WaveParams};

/// Critical points of the potential and the level-set partner `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiconeSetup {
    pub eta: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    /// Height `V(x1)` of the separatrix.
    pub h_star: f64,
}

/// `V(x)` in the factored form, exact near the origin.
pub fn potential(x: f64, eta: f64) -> f64 {
    x * x * (2.0 - eta + x) / (2.0 * (eta - x))
}

/// `V(x)` straight from the definition, used only as an independent check.
pub fn potential_raw(x: f64, eta: f64) -> f64 {
    -0.5 * x * x - x - eta + eta * eta / (eta - x)
}

fn potential_raw_slope(x: f64, eta: f64) -> f64 {
    -x - 1.0 + eta * eta / ((eta - x) * (eta - x))
}

/// Setup for `eta` in `(0, 2)`.
pub fn chicone_setup_eta(eta: f64) -> Result<ChiconeSetup> {
    if !(eta > 0.0 && eta < 2.0) {
        return Err(Error::Domain(format!("eta = {eta} is outside (0, 2)")));
    }
    let s = (4.0 * eta + 1.0).sqrt();
    let x1 = eta - 0.5 - 0.5 * s;
    let x3 = eta - 0.5 + 0.5 * s;
    let h_star = potential(x1, eta);
    let x2 = brent(
        |x| potential(x, eta) - h_star,
        0.0,
        eta * (1.0 - 1e-15),
        RootOpts {
            x_tol: 1e-16,
            max_iter: 300,
        },
    )?;
    Ok(ChiconeSetup {
        eta,
        x1,
        x2,
        x3,
        h_star,
    })
}

/// Setup at an interior parameter point.
pub fn chicone_setup(p: &WaveParams) -> Result<ChiconeSetup> {
    let phi2 = cubic_roots(p.a, p.c)?.phi2;
    chicone_setup_eta((p.c - phi2) / phi2)
}

/// `R(x) = (1 - 2 eta) x^3 + eta (6 eta - 7) x^2 - 3 eta^2 (2 eta - 3) x + eta^2 (2 eta + 1)(eta - 2)`.
pub fn r_cubic(x: f64, eta: f64) -> f64 {
    let [a, b, c, d] = r_coefficients(eta);
    ((a * x + b) * x + c) * x + d
}

/// Coefficients of `R`, highest degree first.
pub fn r_coefficients(eta: f64) -> [f64; 4] {
    [
        1.0 - 2.0 * eta,
        eta * (6.0 * eta - 7.0),
        -3.0 * eta * eta * (2.0 * eta - 3.0),
        eta * eta * (2.0 * eta + 1.0) * (eta - 2.0),
    ]
}

/// Discriminant of `R` in closed form, `-4 (4 eta + 1)(4 eta^2 - 16 eta + 27) eta^4`.
pub fn r_discriminant(eta: f64) -> f64 {
    -4.0 * (4.0 * eta + 1.0) * (4.0 * eta * eta - 16.0 * eta + 27.0) * eta.powi(4)
}

/// Discriminant of `R` from its coefficients.
pub fn r_discriminant_numeric(eta: f64) -> f64 {
    let [a, b, c, d] = r_coefficients(eta);
    18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c
        - 4.0 * a * c * c * c
        - 27.0 * a * a * d * d
}

/// `W''(x)` from the factored formula.
pub fn w_second_derivative(x: f64, setup: &ChiconeSetup) -> f64 {
    let eta = setup.eta;
    let q = ((x - setup.x1) * (x - setup.x3)).powi(4);
    -3.0 * (eta - x) * r_cubic(x, eta) / q
}

/// `W = V / V'^2` from the raw definitions.
pub fn w_raw(x: f64, eta: f64) -> f64 {
    let v1 = potential_raw_slope(x, eta);
    potential_raw(x, eta) / (v1 * v1)
}

/// Energy level `b = phi2^2 (h + eta - 1/2)` of the orbit at height `h`.
pub fn b_of_level(h: f64, phi2: f64, eta: f64) -> f64 {
    phi2 * phi2 * (h + eta - 0.5)
}

/// Inverse of [`b_of_level`].
pub fn level_of_b(b: f64, phi2: f64, eta: f64) -> f64 {
    b / (phi2 * phi2) - eta + 0.5
}

/// Outcome of the convexity checks at one `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub setup: ChiconeSetup,
    /// Largest value of `R` on the grid over `[x1, x2]`.
    pub r_max: f64,
    pub r_negative: bool,
    /// Smallest value of the factored `W''` on the grid over `(x1, x2)`.
    pub w2_min: f64,
    pub w2_positive: bool,
    pub disc_closed_form: f64,
    pub disc_numeric: f64,
    pub disc_negative: bool,
    /// Grid points where the finite-difference `W''` was compared.
    pub fd_points: usize,
    pub fd_sign_agrees: bool,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.r_negative && self.w2_positive && self.disc_negative && self.fd_sign_agrees
    }
}

/// Runs all checks at the `eta` of an interior parameter point.
pub fn verify_monotonicity(p: &WaveParams, n_grid: usize) -> Result<MonotonicityReport> {
    verify_monotonicity_setup(chicone_setup(p)?, n_grid)
}

/// Runs all checks at a given `eta`.
pub fn verify_monotonicity_eta(eta: f64, n_grid: usize) -> Result<MonotonicityReport> {
    verify_monotonicity_setup(chicone_setup_eta(eta)?, n_grid)
}

fn verify_monotonicity_setup(setup: ChiconeSetup, n_grid: usize) -> Result<MonotonicityReport> {
    if n_grid < 3 {
        return Err(Error::InvalidInput(format!(
            "grid of {n_grid} points is too small"
        )));
    }
    let eta = setup.eta;
    let (x1, x2) = (setup.x1, setup.x2);
    let width = x2 - x1;
    let node = |i: usize| x1 + width * i as f64 / (n_grid - 1) as f64;

    let mut r_max = f64::NEG_INFINITY;
    for i in 0..n_grid {
        r_max = r_max.max(r_cubic(node(i), eta));
    }

    let mut w2_min = f64::INFINITY;
    for i in 0..n_grid {
        let x = node(i).max(x1 + 1e-6).min(x2);
        w2_min = w2_min.min(w_second_derivative(x, &setup));
    }

    // The raw W loses digits near the removable singularity at 0 and the
    // double pole at x1, so those neighbourhoods are skipped.
    let h = 1e-3 * width;
    let mut fd_points = 0;
    let mut fd_sign_agrees = true;
    for i in 0..n_grid {
        let x = node(i);
        if x - 2.0 * h <= x1 + 0.02 * width || x + 2.0 * h >= x2 || x.abs() < 0.05 * width {
            continue;
        }
        let fd = (w_raw(x + h, eta) - 2.0 * w_raw(x, eta) + w_raw(x - h, eta)) / (h * h);
        fd_points += 1;
        if !(fd > 0.0) || w_second_derivative(x, &setup) <= 0.0 {
            fd_sign_agrees = false;
        }
    }

    let disc_closed_form = r_discriminant(eta);
    let disc_numeric = r_discriminant_numeric(eta);
    Ok(MonotonicityReport {
        setup,
        r_max,
        r_negative: r_max < 0.0,
        w2_min,
        w2_positive: w2_min > 0.0,
        disc_closed_form,
        disc_numeric,
        disc_negative: disc_closed_form < 0.0 && disc_numeric < 0.0,
        fd_points,
        fd_sign_agrees: fd_sign_agrees && fd_points > 0,
    })
}
