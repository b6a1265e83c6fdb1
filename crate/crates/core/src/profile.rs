//! Wave profiles and the period function.
//!
//! Inside the existence region the profile is an elliptic function of an
//! auxiliary variable `z` related to `x` by `dx = sqrt(c - psi) dz`:
//!
//! ```text
//! psi(z) = c/3 + (4/3) gamma^2 [1 - 2k^2 + 3k^2 cn^2(gamma z; k)]
//!        = phi_+ - 4 gamma^2 k^2 sn^2(gamma z; k)
//! ```
//!
//! The period follows by integrating `sqrt(c - psi)` over one period in `z`.
//! An independent route integrates `dphi / phi'` between the turning points
//! after the substitution `phi = phi_- + (phi_+ - phi_-) sin^2(theta)`.
//! Both are computed so they can be checked against each other.
//!
//! Samples are placed on a uniform `x` grid by inverting `x(z)` with Newton's
//! method. `phi'` comes from the exact derivative of `psi` and `phi''` from the
//! second-order equation, so no numerical differentiation is involved.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::numeric::diff::{richardson, Derivative};
use crate::numeric::quad::{gl32, integrate_adaptive, integrate_panels, neumaier_sum, Adaptive};
use crate::numeric::roots::{brent, newton_bracketed, RootOpts};
use crate::wave_family::{
    boundary_b_minus, boundary_b_plus, classify, critical_value_a, cubic_roots, require_interior,
    turning_points, RegionClass, TurningPoints, WaveParams, DEFAULT_REGION_TOL,
};

/// Elliptic parameterization `(gamma, k, c)` of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    pub gamma: f64,
    pub modulus: Modulus,
    pub c: f64,
}

impl EllipticParams {
    pub fn k(&self) -> f64 {
        self.modulus.k()
    }

    /// Maximum `phi_+ = c/3 + (4/3) gamma^2 (1 + k^2)`.
    pub fn phi_plus(&self) -> f64 {
        let k = self.k();
        self.c / 3.0 + 4.0 / 3.0 * self.gamma * self.gamma * (1.0 + k * k)
    }

    /// Minimum `phi_- = c/3 + (4/3) gamma^2 (1 - 2k^2)`.
    pub fn phi_minus(&self) -> f64 {
        let k = self.k();
        self.c / 3.0 + 4.0 / 3.0 * self.gamma * self.gamma * (1.0 - 2.0 * k * k)
    }
}

/// Inverts the turning-point formulas:
/// `gamma^2 = (2 phi_+ + phi_- - c)/4`, `k^2 = (phi_+ - phi_-)/(2 phi_+ + phi_- - c)`.
pub fn params_from_turning(tp: &TurningPoints, c: f64) -> Result<EllipticParams> {
    let (pp, pm) = (tp.phi_plus, tp.phi_minus);
    let denom = 2.0 * pp + pm - c;
    if !(denom > 0.0) || pp < pm {
        return Err(Error::Domain(format!(
            "turning points ({pm}, {pp}) are inconsistent with c = {c}"
        )));
    }
    let k2 = (pp - pm) / denom;
    let kc2 = (pp + 2.0 * pm - c) / denom;
    if !(kc2 > 0.0) {
        return Err(Error::Domain(format!(
            "turning points ({pm}, {pp}) give modulus k >= 1"
        )));
    }
    Ok(EllipticParams {
        gamma: (0.25 * denom).sqrt(),
        modulus: Modulus::from_squares(k2, kc2)?,
        c,
    })
}

/// `(a, b)` from the elliptic parameters:
/// `a = (4/27)(c + 2g^2(2 - k^2))(c - 2g^2(1 + k^2))(c - 2g^2(1 - 2k^2))`,
/// `b = c^2/6 - (8/3) g^4 (1 - k^2 + k^4)`.
pub fn ab_from_elliptic(ep: &EllipticParams) -> WaveParams {
    let c = ep.c;
    let g2 = ep.gamma * ep.gamma;
    let k2 = ep.k() * ep.k();
    let a = 4.0 / 27.0
        * (c + 2.0 * g2 * (2.0 - k2))
        * (c - 2.0 * g2 * (1.0 + k2))
        * (c - 2.0 * g2 * (1.0 - 2.0 * k2));
    let b = c * c / 6.0 - 8.0 / 3.0 * g2 * g2 * (1.0 - k2 + k2 * k2);
    WaveParams { a, b, c }
}

/// Shape of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Smooth,
    Constant,
    Peaked,
}

/// Advisory flags attached to a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileWarning {
    /// `b` is within `1e-8 c^2` of the solitary boundary.
    NearSolitary,
}

/// One period of a wave sampled on the uniform grid `x_j = j L / n`,
/// `j = 0..n`, with the maximum at `x = 0`.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub period: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
    pub turning: TurningPoints,
    pub params: WaveParams,
    pub eparams: Option<EllipticParams>,
    pub kind: ProfileKind,
    pub warnings: Vec<ProfileWarning>,
}

impl WaveProfile {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `mu = phi - phi'' = a / (c - phi)^2`.
    pub fn mu(&self) -> Vec<f64> {
        let WaveParams { a, c, .. } = self.params;
        self.phi.iter().map(|&p| a / ((c - p) * (c - p))).collect()
    }

    /// Pointwise residual of `(c - phi)(phi'^2 - phi^2 - 2b) + 2a`.
    pub fn invariant_residual(&self) -> Vec<f64> {
        let WaveParams { a, b, c } = self.params;
        self.phi
            .iter()
            .zip(&self.dphi)
            .map(|(&p, &d)| (c - p) * (d * d - p * p - 2.0 * b) + 2.0 * a)
            .collect()
    }

    /// Pointwise residual of `(c - phi)^2 (phi'' - phi) + a`.
    pub fn second_order_residual(&self) -> Vec<f64> {
        let WaveParams { a, c, .. } = self.params;
        self.phi
            .iter()
            .zip(&self.ddphi)
            .map(|(&p, &dd)| (c - p) * (c - p) * (dd - p) + a)
            .collect()
    }

    /// Pointwise residual of `-(c - phi) phi'' + c phi - 3 phi^2/2 + phi'^2/2 - b`.
    pub fn first_integral_residual(&self) -> Vec<f64> {
        let WaveParams { b, c, .. } = self.params;
        (0..self.len())
            .map(|i| {
                let (p, d, dd) = (self.phi[i], self.dphi[i], self.ddphi[i]);
                -(c - p) * dd + c * p - 1.5 * p * p + 0.5 * d * d - b
            })
            .collect()
    }
}

/// Distance `c - phi_+`, computed without cancellation when `a > 0`.
fn crest_gap(p: &WaveParams, tp: &TurningPoints) -> f64 {
    if p.a > 0.0 {
        2.0 * p.a / (2.0 * p.b + tp.phi_plus * tp.phi_plus)
    } else {
        p.c - tp.phi_plus
    }
}

/// Quadrature settings used for the period and mass/energy integrals.
pub(crate) fn quad_opts() -> Adaptive {
    Adaptive {
        rel_tol: 1e-14,
        abs_tol: 0.0,
        initial_panels: 4,
        max_depth: 40,
    }
}

/// Data shared by all integrals over the elliptic variable `u = gamma z`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EllipticFrame {
    pub ep: EllipticParams,
    pub gap: f64,
    pub amp: f64,
    pub quarter: f64,
    pub phi_plus: f64,
}

impl EllipticFrame {
    pub fn new(p: &WaveParams, tp: &TurningPoints) -> Result<Self> {
        let ep = params_from_turning(tp, p.c)?;
        Ok(Self {
            ep,
            gap: crest_gap(p, tp),
            amp: tp.phi_plus - tp.phi_minus,
            quarter: ep.modulus.complete_k(),
            phi_plus: tp.phi_plus,
        })
    }

    /// `(psi, c - psi, sn, cn, dn)` at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64, f64, f64, f64) {
        let j = self.ep.modulus.sncndn(u);
        let s2 = j.sn * j.sn;
        (
            self.phi_plus - self.amp * s2,
            self.gap + self.amp * s2,
            j.sn,
            j.cn,
            j.dn,
        )
    }

    /// `dx/du = sqrt(c - psi) / gamma`.
    pub fn speed(&self, u: f64) -> f64 {
        self.eval(u).1.sqrt() / self.ep.gamma
    }
}

/// Period of the wave at a point of the constant boundary,
/// `2 pi / omega` with `omega^2 = 3 sqrt(c^2 - 6b) / (2c - sqrt(c^2 - 6b))`.
pub fn constant_limit_period(b: f64, c: f64) -> Result<f64> {
    let s2 = c * c - 6.0 * b;
    if !(c > 0.0) || !(s2 > 0.0) || b < -0.5 * c * c {
        return Err(Error::Domain(format!(
            "no constant wave for b = {b}, c = {c}"
        )));
    }
    let s = s2.sqrt();
    let omega2 = 3.0 * s / (2.0 * c - s);
    Ok(2.0 * PI / omega2.sqrt())
}

/// Period of the peaked wave, `2 arccosh(c / sqrt(2|b|))` for `-c^2/2 < b < 0`.
pub fn peaked_period(b: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && b > -0.5 * c * c && b < 0.0) {
        return Err(Error::Domain(format!(
            "no peaked wave for b = {b}, c = {c}"
        )));
    }
    Ok(2.0 * (c / (-2.0 * b).sqrt()).acosh())
}

/// `b = -c^2 / (2 cosh^2(L/2))`, the peaked wave of period `L`.
pub fn peaked_b_of_period(period: f64, c: f64) -> f64 {
    let ch = (0.5 * period).cosh();
    -0.5 * c * c / (ch * ch)
}

/// Period function by the elliptic route. Accepts interior points, the
/// exact constant boundary `b = b_-(a)` and the peaked segment `a = 0`.
pub fn period(p: &WaveParams) -> Result<f64> {
    if p.a == 0.0 && p.c > 0.0 {
        return peaked_period(p.b, p.c).map_err(|_| Error::NotInRegion {
            a: p.a,
            b: p.b,
            c: p.c,
        });
    }
    if p.a > 0.0 && p.a < critical_value_a(p.c)? && p.b == boundary_b_minus(p.a, p.c)? {
        return constant_limit_period(p.b, p.c);
    }
    require_interior(p)?;
    let tp = turning_points(p)?;
    let frame = EllipticFrame::new(p, &tp)?;
    let half = integrate_adaptive(|u| frame.speed(u), 0.0, frame.quarter, quad_opts())?;
    Ok(2.0 * half)
}

/// Period function by the turning-point route:
/// `L = 4 int_0^{pi/2} sqrt(c - phi_+ + D cos^2 t) / sqrt(phi_+ + 2 phi_- - c + D sin^2 t) dt`
/// with `D = phi_+ - phi_-`.
pub fn period_turning_quadrature(p: &WaveParams) -> Result<f64> {
    require_interior(p)?;
    let tp = turning_points(p)?;
    let gap = crest_gap(p, &tp);
    let d = tp.phi_plus - tp.phi_minus;
    let lower = tp.phi_plus + 2.0 * tp.phi_minus - p.c;
    let v = integrate_adaptive(
        |t| {
            let (s, co) = t.sin_cos();
            (gap + d * co * co).sqrt() / (lower + d * s * s).sqrt()
        },
        0.0,
        0.5 * PI,
        quad_opts(),
    )?;
    Ok(4.0 * v)
}

/// Period at normalized parameters `(a/c^3, b/c^2)` with `c = 1`. The period
/// does not change under the scaling `phi(x) = c phi_hat(x)`.
pub fn period_normalized(alpha: f64, beta: f64) -> Result<f64> {
    period(&WaveParams::new(alpha, beta, 1.0))
}

/// Steps for finite differences of the period that keep every stencil point
/// inside the region.
fn safe_steps(p: &WaveParams) -> Result<(f64, f64)> {
    let roots = cubic_roots(p.a, p.c)?;
    let c = p.c;
    let bm = c * roots.phi2 - 1.5 * roots.phi2 * roots.phi2;
    let bp = c * roots.phi1 - 1.5 * roots.phi1 * roots.phi1;
    let ac = critical_value_a(c)?;
    let hb = (1e-4 * c * c).min(0.25 * (p.b - bm)).min(0.25 * (bp - p.b));
    // db_-/da = 1/(c - phi2) and db_+/da = 1/(c - phi1).
    let ha = (1e-4 * ac)
        .min(0.25 * p.a)
        .min(0.25 * (ac - p.a))
        .min(0.25 * (p.b - bm) * (c - roots.phi2))
        .min(0.25 * (bp - p.b) * (c - roots.phi1));
    if !(hb > 0.0 && ha > 0.0) {
        return Err(Error::DerivativeFailure(format!(
            "({}, {}, {c}) is too close to the region boundary",
            p.a, p.b
        )));
    }
    Ok((ha, hb))
}

/// Finite-difference partial derivatives of the period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodGradient {
    pub d_a: f64,
    pub d_b: f64,
    pub err_a: f64,
    pub err_b: f64,
}

/// `(dL/da, dL/db)` by Richardson-extrapolated central differences.
pub fn period_gradient(p: &WaveParams) -> Result<PeriodGradient> {
    require_interior(p)?;
    let (ha, hb) = safe_steps(p)?;
    let Derivative {
        value: d_a,
        error: err_a,
    } = richardson(|a| period(&WaveParams { a, ..*p }), p.a, ha)?;
    let Derivative {
        value: d_b,
        error: err_b,
    } = richardson(|b| period(&WaveParams { b, ..*p }), p.b, hb)?;
    Ok(PeriodGradient {
        d_a,
        d_b,
        err_a,
        err_b,
    })
}

/// `dL/db` alone.
pub fn period_derivative_b(p: &WaveParams) -> Result<Derivative> {
    require_interior(p)?;
    let (_, hb) = safe_steps(p)?;
    richardson(|b| period(&WaveParams { b, ..*p }), p.b, hb)
}

/// `dL/da` alone.
pub fn period_derivative_a(p: &WaveParams) -> Result<Derivative> {
    require_interior(p)?;
    let (ha, _) = safe_steps(p)?;
    richardson(|a| period(&WaveParams { a, ..*p }), p.a, ha)
}

/// Samples the profile on `n_points` uniform points of one period.
pub fn sample_profile(p: &WaveParams, n_points: usize) -> Result<WaveProfile> {
    if n_points < 64 {
        return Err(Error::InvalidInput(format!(
            "profile needs at least 64 points, got {n_points}"
        )));
    }
    match classify(p, DEFAULT_REGION_TOL) {
        RegionClass::Interior => sample_smooth(p, n_points),
        RegionClass::BoundaryConstant => sample_constant(p, n_points),
        RegionClass::BoundaryPeaked => sample_peaked(p, n_points),
        _ => Err(Error::NotInRegion {
            a: p.a,
            b: p.b,
            c: p.c,
        }),
    }
}

fn sample_constant(p: &WaveParams, n: usize) -> Result<WaveProfile> {
    let c = p.c;
    let (phi2, a) = if p.a >= critical_value_a(c)? * (1.0 - 1e-12) {
        return Err(Error::DegenerateRoots { a: p.a, c });
    } else {
        (cubic_roots(p.a, c)?.phi2, p.a)
    };
    let b = c * phi2 - 1.5 * phi2 * phi2;
    let params = WaveParams { a, b, c };
    let period = constant_limit_period(b, c)?;
    let ddphi = phi2 - a / ((c - phi2) * (c - phi2));
    let tp = TurningPoints {
        phi_minus: phi2,
        phi_plus: phi2,
    };
    Ok(WaveProfile {
        period,
        x: (0..n).map(|j| period * j as f64 / n as f64).collect(),
        phi: vec![phi2; n],
        dphi: vec![0.0; n],
        ddphi: vec![ddphi; n],
        turning: tp,
        params,
        eparams: params_from_turning(&tp, c).ok(),
        kind: ProfileKind::Constant,
        warnings: Vec::new(),
    })
}

fn sample_peaked(p: &WaveParams, n: usize) -> Result<WaveProfile> {
    let c = p.c;
    let params = WaveParams { a: 0.0, b: p.b, c };
    let period = peaked_period(p.b, c).map_err(|_| Error::NotInRegion { a: p.a, b: p.b, c })?;
    let half = 0.5 * period;
    let ch = half.cosh();
    let x: Vec<f64> = (0..n).map(|j| period * j as f64 / n as f64).collect();
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    for &xi in &x {
        let (y, sign) = if xi <= half {
            (half - xi, -1.0)
        } else {
            (xi - half, 1.0)
        };
        phi.push(c * y.cosh() / ch);
        // The one-sided slopes at the crest are +-c tanh(L/2); report their mean.
        dphi.push(if xi == 0.0 {
            0.0
        } else {
            sign * c * y.sinh() / ch
        });
    }
    let ddphi = phi.clone();
    Ok(WaveProfile {
        period,
        x,
        phi,
        dphi,
        ddphi,
        turning: TurningPoints {
            phi_minus: (-2.0 * p.b).sqrt(),
            phi_plus: c,
        },
        params,
        eparams: None,
        kind: ProfileKind::Peaked,
        warnings: Vec::new(),
    })
}

/// Cumulative map `x(u)` on `[0, K]`, stored panel by panel.
pub(crate) struct HalfPeriodMap {
    pub frame: EllipticFrame,
    starts: Vec<f64>,
    panels: Vec<(f64, f64)>,
    pub half_period: f64,
}

impl HalfPeriodMap {
    pub fn new(p: &WaveParams) -> Result<Self> {
        let tp = turning_points(p)?;
        let frame = EllipticFrame::new(p, &tp)?;
        let panels = integrate_panels(|u| frame.speed(u), 0.0, frame.quarter, quad_opts())?;
        let mut starts = Vec::with_capacity(panels.len() + 1);
        let mut acc = Vec::with_capacity(panels.len());
        starts.push(0.0);
        for pan in &panels {
            acc.push(pan.value);
            starts.push(neumaier_sum(acc.iter().copied()));
        }
        let half_period = *starts.last().unwrap_or(&0.0);
        Ok(Self {
            frame,
            starts,
            panels: panels.iter().map(|p| (p.lo, p.hi)).collect(),
            half_period,
        })
    }

    /// Solves `x(u) = target` for `0 <= target <= L/2`.
    pub fn invert(&self, target: f64) -> Result<f64> {
        if target <= 0.0 {
            return Ok(0.0);
        }
        if target >= self.half_period {
            return Ok(self.frame.quarter);
        }
        let idx = match self.starts.binary_search_by(|s| s.total_cmp(&target)) {
            Ok(i) => {
                return Ok(if i < self.panels.len() {
                    self.panels[i].0
                } else {
                    self.frame.quarter
                })
            }
            Err(i) => i - 1,
        };
        let (lo, hi) = self.panels[idx];
        let x_lo = self.starts[idx];
        let x_hi = self.starts[idx + 1];
        let guess = lo + (target - x_lo) / (x_hi - x_lo) * (hi - lo);
        let rule = gl32();
        let frame = &self.frame;
        newton_bracketed(
            |u| {
                let partial = rule.integrate(|s| frame.speed(s), lo, u);
                (x_lo + partial - target, frame.speed(u))
            },
            lo,
            hi,
            guess,
            RootOpts {
                x_tol: 1e-15 * hi.max(1.0),
                max_iter: 100,
            },
        )
    }
}

fn sample_smooth(p: &WaveParams, n: usize) -> Result<WaveProfile> {
    let map = HalfPeriodMap::new(p)?;
    let frame = map.frame;
    let period = 2.0 * map.half_period;
    let WaveParams { a, b, c } = *p;
    let g = frame.ep.gamma;
    let slope_scale = 2.0 * g * frame.amp;

    let half_count = n / 2;
    let mut phi_half = Vec::with_capacity(half_count + 1);
    let mut dphi_half = Vec::with_capacity(half_count + 1);
    let mut ddphi_half = Vec::with_capacity(half_count + 1);
    let k2 = frame.ep.modulus.k() * frame.ep.modulus.k();
    for j in 0..=half_count {
        let target = period * j as f64 / n as f64;
        let u = if 2 * j == n {
            frame.quarter
        } else {
            map.invert(target)?
        };
        let (psi, gap_psi, sn, cn, dn) = frame.eval(u);
        phi_half.push(psi);
        // dpsi/dx = (dpsi/du) / (dx/du) = -2 gamma D sn cn dn / sqrt(c - psi)
        dphi_half.push(-slope_scale * sn * cn * dn / gap_psi.sqrt());
        // One more derivative of the same expression, with s = sn cn dn and
        // (c - psi)' = 2 D s in u.
        let s = sn * cn * dn;
        let ds = cn * cn * dn * dn - sn * sn * dn * dn - k2 * sn * sn * cn * cn;
        ddphi_half
            .push(-slope_scale * g * (ds * gap_psi - frame.amp * s * s) / (gap_psi * gap_psi));
    }
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    let mut ddphi = Vec::with_capacity(n);
    for j in 0..n {
        let (i, sign) = if 2 * j <= n { (j, 1.0) } else { (n - j, -1.0) };
        phi.push(phi_half[i]);
        dphi.push(sign * dphi_half[i]);
        ddphi.push(ddphi_half[i]);
    }
    dphi[0] = 0.0;

    let tp = TurningPoints {
        phi_minus: frame.phi_plus - frame.amp,
        phi_plus: frame.phi_plus,
    };
    let mut warnings = Vec::new();
    if let Ok(bp) = boundary_b_plus(a, c) {
        if bp - b <= 1e-8 * c * c {
            warnings.push(ProfileWarning::NearSolitary);
        }
    }
    let profile = WaveProfile {
        period,
        x: (0..n).map(|j| period * j as f64 / n as f64).collect(),
        phi,
        dphi,
        ddphi,
        turning: tp,
        params: *p,
        eparams: Some(frame.ep),
        kind: ProfileKind::Smooth,
        warnings,
    };
    let worst = profile
        .invariant_residual()
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    if !(worst < 1e-8 * a.abs().max(1.0)) {
        return Err(Error::QuadratureFailure(format!(
            "first-order invariant residual {worst:e} exceeds tolerance"
        )));
    }
    Ok(profile)
}

/// Spacing of the `a` samples along a fixed-period curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    LogNearZero,
}

/// The curve `b = B_L(a)`, `0 < a < a_L`, of waves with a fixed period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPeriodFamily {
    pub period: f64,
    pub c: f64,
    a_max: f64,
}

impl FixedPeriodFamily {
    /// `a_L` solves `L(a, b_-(a), c) = L`. On the constant boundary the
    /// period is `2 pi / omega` with `omega^2 = (3 phi2 - c)/(c - phi2)`, so
    /// `phi2 = c (1 + omega^2)/(3 + omega^2)` and `a_L = phi2 (c - phi2)^2`.
    pub fn new(period: f64, c: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "period L = {period} must be positive"
            )));
        }
        critical_value_a(c)?;
        let omega = 2.0 * PI / period;
        let w2 = omega * omega;
        let phi2 = c * (1.0 + w2) / (3.0 + w2);
        let a_max = phi2 * (c - phi2) * (c - phi2);
        Ok(Self { period, c, a_max })
    }

    /// Upper end `a_L` of the family.
    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// Left end value `b = -c^2 / (2 cosh^2(L/2))` on the peaked segment.
    pub fn b_peaked_end(&self) -> f64 {
        peaked_b_of_period(self.period, self.c)
    }

    /// Solves `L(a, b, c) = L` for `b` in `(b_-(a), b_+(a))`.
    pub fn b_at(&self, a: f64) -> Result<f64> {
        let c = self.c;
        if !(a > 0.0 && a < self.a_max) {
            return Err(Error::NoSolution(format!(
                "a = {a} is outside (0, a_L = {}) for L = {}",
                self.a_max, self.period
            )));
        }
        let bm = boundary_b_minus(a, c)?;
        let bp = boundary_b_plus(a, c)?;
        let target = self.period;
        let f = |b: f64| -> f64 {
            match period(&WaveParams { a, b, c }) {
                Ok(l) => l - target,
                Err(_) => f64::NAN,
            }
        };
        if !(f(bm) < 0.0) {
            return Err(Error::NoSolution(format!(
                "period at the constant boundary is not below L = {target} for a = {a}"
            )));
        }
        let width = bp - bm;
        let mut delta = 1e-3 * width;
        let mut hi = bp - delta;
        while !(f(hi) > 0.0) {
            delta *= 1e-3;
            if delta < 1e-14 * c * c {
                return Err(Error::NoSolution(format!(
                    "period does not reach L = {target} below the solitary boundary at a = {a}"
                )));
            }
            hi = bp - delta;
        }
        brent(
            f,
            bm,
            hi,
            RootOpts {
                x_tol: 1e-16 * c * c,
                max_iter: 200,
            },
        )
    }

    pub fn params_at(&self, a: f64) -> Result<WaveParams> {
        Ok(WaveParams {
            a,
            b: self.b_at(a)?,
            c: self.c,
        })
    }

    /// `n` values of `a` in `(0, a_L)`.
    pub fn a_grid(&self, n: usize, spacing: Spacing) -> Vec<f64> {
        let top = self.a_max;
        match spacing {
            Spacing::Uniform => (1..=n).map(|i| top * i as f64 / (n + 1) as f64).collect(),
            Spacing::LogNearZero => {
                let lo = (1e-4f64).ln();
                let hi = (n as f64 / (n + 1) as f64).ln();
                (0..n)
                    .map(|i| {
                        let t = if n == 1 {
                            1.0
                        } else {
                            i as f64 / (n - 1) as f64
                        };
                        top * (lo + t * (hi - lo)).exp()
                    })
                    .collect()
            }
        }
    }

    /// Samples the family at `n` points, evaluated in parallel.
    pub fn sample(&self, n: usize, spacing: Spacing) -> Result<Vec<WaveParams>> {
        self.a_grid(n, spacing)
            .into_par_iter()
            .map(|a| self.params_at(a))
            .collect()
    }
}

/// `n` parameter triples with period `L` and speed `c`, uniform in `a`.
pub fn fixed_period_curve(period: f64, c: f64, n_samples: usize) -> Result<Vec<WaveParams>> {
    FixedPeriodFamily::new(period, c)?.sample(n_samples, Spacing::Uniform)
}
