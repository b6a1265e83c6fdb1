//! Conserved quantities of a wave and the stability criterion along
//! fixed-period families.
//!
//! Mass `M = int phi`, energy `E = 1/2 int (phi^2 + phi'^2)` and
//! `F = 1/2 int (phi^3 + phi phi'^2)` over one period. Along a family with
//! fixed period `L` and speed `c`, `M` and `E` reduce to one-variable
//! functions of the normalized parameter through `M = c M_hat(a/c^3)` and
//! `E = c^2 E_hat(a/c^3)`, and all parameter derivatives are taken in that
//! normalized variable.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::quad::integrate_adaptive;
use crate::profile::{
    constant_limit_period, peaked_period, period_gradient, quad_opts, EllipticFrame,
    FixedPeriodFamily, ProfileKind, Spacing, WaveProfile,
};
use crate::wave_family::{
    boundary_b_minus, cubic_roots, normalize_scaling, require_interior, turning_points, WaveParams,
};

/// Mass, energy and the cubic conserved quantity of one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedTriple {
    pub mass: f64,
    pub energy: f64,
    pub higher: f64,
}

/// Conserved quantities together with the period and `int phi'^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveIntegrals {
    pub period: f64,
    pub mass: f64,
    pub energy: f64,
    pub higher: f64,
    pub slope_sq: f64,
}

/// Integrals by quadrature in the elliptic variable, without sampling.
/// Handles interior points, the exact constant boundary and `a = 0`.
pub fn wave_integrals(p: &WaveParams) -> Result<WaveIntegrals> {
    let WaveParams { a, b, c } = *p;
    if a == 0.0 {
        let l = peaked_period(b, c).map_err(|_| Error::NotInRegion { a, b, c })?;
        let (s, ch) = ((0.5 * l).sinh(), (0.5 * l).cosh());
        let th = s / ch;
        return Ok(WaveIntegrals {
            period: l,
            mass: 2.0 * c * th,
            energy: c * c * th,
            higher: c * c * c * (s + 2.0 * s * s * s / 3.0) / (ch * ch * ch),
            // E = 1/2 int phi^2 + 1/2 int phi'^2 and int phi^2 - int phi'^2 = -2bL
            slope_sq: c * c * th + b * l,
        });
    }
    if a > 0.0 && b == boundary_b_minus(a, c)? {
        let phi2 = cubic_roots(a, c)?.phi2;
        let l = constant_limit_period(b, c)?;
        return Ok(WaveIntegrals {
            period: l,
            mass: l * phi2,
            energy: 0.5 * l * phi2 * phi2,
            higher: 0.5 * l * phi2 * phi2 * phi2,
            slope_sq: 0.0,
        });
    }
    require_interior(p)?;
    let tp = turning_points(p)?;
    let frame = EllipticFrame::new(p, &tp)?;
    let k = frame.quarter;
    let scale = 2.0 / frame.ep.gamma;
    let opts = quad_opts();
    let slope2 = |psi: f64, gap: f64| psi * psi + 2.0 * b - 2.0 * a / gap;
    let period = scale * integrate_adaptive(|u| frame.eval(u).1.sqrt(), 0.0, k, opts)?;
    let mass = scale
        * integrate_adaptive(
            |u| {
                let (psi, gap, ..) = frame.eval(u);
                psi * gap.sqrt()
            },
            0.0,
            k,
            opts,
        )?;
    let energy = scale
        * integrate_adaptive(
            |u| {
                let (psi, gap, ..) = frame.eval(u);
                (b + psi * psi - a / gap) * gap.sqrt()
            },
            0.0,
            k,
            opts,
        )?;
    let higher = scale
        * integrate_adaptive(
            |u| {
                let (psi, gap, ..) = frame.eval(u);
                0.5 * psi * (psi * psi + slope2(psi, gap)) * gap.sqrt()
            },
            0.0,
            k,
            opts,
        )?;
    let slope_sq = scale
        * integrate_adaptive(
            |u| {
                let (_, gap, sn, cn, dn) = frame.eval(u);
                // phi'^2 sqrt(c - psi) = (2 gamma D sn cn dn)^2 / sqrt(c - psi)
                let d = 2.0 * frame.ep.gamma * frame.amp * sn * cn * dn;
                d * d / gap.sqrt()
            },
            0.0,
            k,
            opts,
        )?;
    Ok(WaveIntegrals {
        period,
        mass,
        energy,
        higher,
        slope_sq,
    })
}

/// `(M, E)` at a parameter point.
pub fn mass_energy(p: &WaveParams) -> Result<(f64, f64)> {
    let w = wave_integrals(p)?;
    Ok((w.mass, w.energy))
}

/// Mass and energy from the elliptic integrals; `F` from the sampled grid
/// for smooth profiles and in closed form for the limiting shapes.
pub fn conserved(profile: &WaveProfile) -> Result<ConservedTriple> {
    let w = wave_integrals(&profile.params)?;
    let higher = match profile.kind {
        ProfileKind::Smooth => conserved_on_grid(profile).higher,
        _ => w.higher,
    };
    Ok(ConservedTriple {
        mass: w.mass,
        energy: w.energy,
        higher,
    })
}

/// All three quantities by the periodic trapezoid rule on the profile grid.
pub fn conserved_on_grid(profile: &WaveProfile) -> ConservedTriple {
    let h = profile.period / profile.len() as f64;
    let (mut m, mut e, mut f) = (0.0, 0.0, 0.0);
    for (&p, &d) in profile.phi.iter().zip(&profile.dphi) {
        m += p;
        e += 0.5 * (p * p + d * d);
        f += 0.5 * (p * p * p + p * d * d);
    }
    ConservedTriple {
        mass: m * h,
        energy: e * h,
        higher: f * h,
    }
}

/// Largest pointwise residual of
/// `3 phi^2/2 - phi phi'' - phi'^2/2 - c (phi - phi'') + b`.
/// The crest of a peaked profile is skipped.
pub fn euler_lagrange_residual(profile: &WaveProfile) -> f64 {
    let WaveParams { b, c, .. } = profile.params;
    let mut worst = 0.0f64;
    for i in 0..profile.len() {
        if profile.kind == ProfileKind::Peaked && i == 0 {
            continue;
        }
        let (p, d, dd) = (profile.phi[i], profile.dphi[i], profile.ddphi[i]);
        let r = 1.5 * p * p - p * dd - 0.5 * d * d - c * (p - dd) + b;
        worst = worst.max(r.abs());
    }
    worst
}

/// Which projection matrix a [`ProjectionMatrix2`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    P,
    S,
}

/// A 2x2 matrix of constrained projections with its determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionMatrix2 {
    pub which: MatrixKind,
    pub entries: [[f64; 2]; 2],
    /// Determinant of `entries`.
    pub det: f64,
    /// Determinant from `M_hat^3 d(E_hat / M_hat^2)`, differenced directly.
    pub det_closed_form: f64,
}

/// Values on a family stencil `x +- h, x +- h/2, x +- h/4`.
struct Stencil {
    h: f64,
    plus: [f64; 3],
    minus: [f64; 3],
}

impl Stencil {
    /// Returns the Richardson-extrapolated derivative and the gap between
    /// the estimates from the two finest pairs of steps.
    fn derivative(&self) -> (f64, f64) {
        let d = |i: usize| {
            let step = self.h / (1 << i) as f64;
            (self.plus[i] - self.minus[i]) / (2.0 * step)
        };
        let (d1, d2, d4) = (d(0), d(1), d(2));
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d4 - d2) / 3.0;
        (r2, (r2 - r1).abs())
    }
}

/// Normalized mass and energy along the family of period `L` at `c = 1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NormalizedFamily {
    fam: FixedPeriodFamily,
}

/// `M_hat`, `E_hat` and their first derivatives in the normalized parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FamilyJet {
    pub alpha: f64,
    pub beta: f64,
    pub mass: f64,
    pub energy: f64,
    pub d_mass: f64,
    pub d_energy: f64,
    pub d_ratio: f64,
    pub err_mass: f64,
    pub err_energy: f64,
    pub err_ratio: f64,
}

impl NormalizedFamily {
    pub fn new(period: f64) -> Result<Self> {
        Ok(Self {
            fam: FixedPeriodFamily::new(period, 1.0)?,
        })
    }

    pub fn alpha_max(&self) -> f64 {
        self.fam.a_max()
    }

    fn point(&self, alpha: f64) -> Result<(f64, f64, f64)> {
        let beta = self.fam.b_at(alpha)?;
        let (m, e) = mass_energy(&WaveParams::new(alpha, beta, 1.0))?;
        Ok((beta, m, e))
    }

    /// Default stencil width: `1e-5`, shrunk so the stencil stays in
    /// `(0, alpha_L)`.
    pub fn step(&self, alpha: f64) -> f64 {
        1e-5f64
            .min(0.2 * alpha)
            .min(0.2 * (self.alpha_max() - alpha))
    }

    pub fn jet(&self, alpha: f64, h: f64) -> Result<FamilyJet> {
        if !(alpha > 0.0 && alpha < self.alpha_max())
            || !(h > 0.0)
            || alpha - h <= 0.0
            || alpha + h >= self.alpha_max()
        {
            return Err(Error::DerivativeFailure(format!(
                "stencil around {alpha} with step {h} leaves (0, {})",
                self.alpha_max()
            )));
        }
        let (beta, mass, energy) = self.point(alpha)?;
        let offsets = [h, 0.5 * h, 0.25 * h];
        type Pair = (f64, f64);
        let evals: Vec<Result<(Pair, Pair)>> = offsets
            .par_iter()
            .map(|&d| {
                let (_, mp, ep) = self.point(alpha + d)?;
                let (_, mm, em) = self.point(alpha - d)?;
                Ok(((mp, ep), (mm, em)))
            })
            .collect();
        let mut ms = Stencil {
            h,
            plus: [0.0; 3],
            minus: [0.0; 3],
        };
        let mut es = Stencil { ..ms };
        let mut rs = Stencil { ..ms };
        for (i, r) in evals.into_iter().enumerate() {
            let ((mp, ep), (mm, em)) = r?;
            ms.plus[i] = mp;
            ms.minus[i] = mm;
            es.plus[i] = ep;
            es.minus[i] = em;
            rs.plus[i] = ep / (mp * mp);
            rs.minus[i] = em / (mm * mm);
        }
        let (d_mass, err_mass) = ms.derivative();
        let (d_energy, err_energy) = es.derivative();
        let (d_ratio, err_ratio) = rs.derivative();
        Ok(FamilyJet {
            alpha,
            beta,
            mass,
            energy,
            d_mass,
            d_energy,
            d_ratio,
            err_mass,
            err_energy,
            err_ratio,
        })
    }
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn check_on_family(p: &WaveParams, period: f64) -> Result<()> {
    require_interior(p)?;
    let l = crate::profile::period(p)?;
    if (l - period).abs() > 1e-7 * period {
        return Err(Error::InvalidInput(format!(
            "({}, {}, {}) has period {l}, not {period}",
            p.a, p.b, p.c
        )));
    }
    Ok(())
}

/// Matrix `P` at a point of the family with period `L`. Derivatives in `c`
/// come from the scaling reduction; derivatives in `a` are along the family.
pub fn matrix_p(p: &WaveParams, period: f64) -> Result<ProjectionMatrix2> {
    check_on_family(p, period)?;
    let nf = NormalizedFamily::new(period)?;
    let (alpha, _) = normalize_scaling(p);
    let jet = nf.jet(alpha, nf.step(alpha))?;
    Ok(matrix_p_from_jet(&jet, p.a, p.c))
}

pub(crate) fn matrix_p_from_jet(jet: &FamilyJet, a: f64, c: f64) -> ProjectionMatrix2 {
    let alpha = jet.alpha;
    let dc_m = jet.mass - 3.0 * alpha * jet.d_mass;
    let da_m = jet.d_mass / (c * c);
    let dc_e = 2.0 * c * jet.energy - 3.0 * c * alpha * jet.d_energy;
    let da_e = jet.d_energy / c;
    let entries = [
        [-dc_m / (2.0 * a), -da_m - c * dc_m / (2.0 * a)],
        [-dc_e / (2.0 * a), -da_e - c * dc_e / (2.0 * a)],
    ];
    let det_closed_form = jet.mass.powi(3) / (2.0 * alpha * c.powi(4)) * jet.d_ratio;
    ProjectionMatrix2 {
        which: MatrixKind::P,
        entries,
        det: det2(&entries),
        det_closed_form,
    }
}

/// Matrix `S` at a point of the family with period `L`. The family is
/// parameterized by `b`, which requires `dL/da != 0`.
pub fn matrix_s(p: &WaveParams, period: f64) -> Result<ProjectionMatrix2> {
    check_on_family(p, period)?;
    let (alpha, beta) = normalize_scaling(p);
    let unit = WaveParams::new(alpha, beta, 1.0);
    let grad = period_gradient(&unit)?;
    // |dL/d alpha| relative to L over the width of the a-range.
    if grad.d_a.abs() * (4.0 / 27.0) < 1e-6 * period || grad.d_a.abs() < 10.0 * grad.err_a {
        return Err(Error::SingularFamily(grad.d_a));
    }
    let slope = -grad.d_a / grad.d_b;
    let nf = NormalizedFamily::new(period)?;
    let jet = nf.jet(alpha, nf.step(alpha))?;
    let c = p.c;
    let dm = jet.d_mass / slope;
    let de = jet.d_energy / slope;
    let dr = jet.d_ratio / slope;
    let entries = [
        [dm / c, -de],
        [
            jet.mass - 2.0 * beta * dm,
            -(2.0 * c * jet.energy - 2.0 * c * beta * de),
        ],
    ];
    Ok(ProjectionMatrix2 {
        which: MatrixKind::S,
        entries,
        det: det2(&entries),
        det_closed_form: jet.mass.powi(3) * dr,
    })
}

/// One point of a stability scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilitySample {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
    pub energy: f64,
    pub ratio: f64,
    pub dratio_da: f64,
    pub dratio_err: f64,
    pub det_p: f64,
    pub det_p_closed_form: f64,
}

/// `E/M^2` along `b = B_L(a)` with its derivative in `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCurve {
    pub period: f64,
    pub c: f64,
    pub samples: Vec<StabilitySample>,
}

impl StabilityCurve {
    /// True when every sample has `dratio/da < -3 err`.
    pub fn is_stable(&self) -> bool {
        !self.samples.is_empty()
            && self
                .samples
                .iter()
                .all(|s| s.dratio_da < -3.0 * s.dratio_err)
    }
}

/// Scans `n` points uniformly spaced in `(0, a_L)`.
pub fn stability_scan(period: f64, c: f64, n: usize) -> Result<StabilityCurve> {
    stability_scan_with(period, c, n, Spacing::Uniform)
}

/// Scans `n` points with the requested spacing.
pub fn stability_scan_with(
    period: f64,
    c: f64,
    n: usize,
    spacing: Spacing,
) -> Result<StabilityCurve> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "stability scan needs at least one sample".into(),
        ));
    }
    let fam = FixedPeriodFamily::new(period, c)?;
    let nf = NormalizedFamily::new(period)?;
    let c3 = c * c * c;
    let samples: Result<Vec<StabilitySample>> = fam
        .a_grid(n, spacing)
        .into_par_iter()
        .map(|a| {
            let alpha = a / c3;
            let jet = nf.jet(alpha, nf.step(alpha))?;
            let pm = matrix_p_from_jet(&jet, a, c);
            Ok(StabilitySample {
                a,
                b: jet.beta * c * c,
                mass: c * jet.mass,
                energy: c * c * jet.energy,
                ratio: jet.energy / (jet.mass * jet.mass),
                dratio_da: jet.d_ratio / c3,
                dratio_err: jet.err_ratio / c3,
                det_p: pm.det,
                det_p_closed_form: pm.det_closed_form,
            })
        })
        .collect();
    Ok(StabilityCurve {
        period,
        c,
        samples: samples?,
    })
}

/// Quadratic forms tied to orbital stability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitalSigns {
    /// `<K mu, mu> = a (c M - 6 E)`.
    pub kmm: f64,
    /// `a (2 b L - c M - 2 int phi'^2)`, equal to `kmm`.
    pub kmm_integral: f64,
    /// `<L phi, phi> = 2 b M - 2 c E`.
    pub lpp: f64,
}

/// Evaluates [`OrbitalSigns`] for a sampled profile.
pub fn orbital_sign_checks(profile: &WaveProfile) -> Result<OrbitalSigns> {
    let WaveParams { a, b, c } = profile.params;
    let w = wave_integrals(&profile.params)?;
    let h = profile.period / profile.len() as f64;
    let slope_sq = match profile.kind {
        ProfileKind::Smooth => profile.dphi.iter().map(|d| d * d).sum::<f64>() * h,
        _ => w.slope_sq,
    };
    Ok(OrbitalSigns {
        kmm: a * (c * w.mass - 6.0 * w.energy),
        kmm_integral: a * (2.0 * b * w.period - c * w.mass - 2.0 * slope_sq),
        lpp: 2.0 * b * w.mass - 2.0 * c * w.energy,
    })
}
