//! Fourier collocation of the linearized operators and their spectra.
//!
//! All operators act on samples at `x_j = j L / N` with `N` even. Fourier
//! multipliers are assembled as circulant matrices from their symbols, so
//! `(1 - d^2)^{-1}` is exact on trigonometric polynomials of degree `N/2`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::diff::Derivative;
use crate::numeric::ode::{dopri5, OdeOpts};
use crate::profile::{period, period_gradient, sample_profile, ProfileKind, WaveProfile};
use crate::wave_family::{require_interior, turning_points, WaveParams};

/// Default relative threshold separating zero from nonzero eigenvalues.
pub const DEFAULT_ZERO_TOL: f64 = 1e-7;

/// Relative size below which trailing Fourier modes of the profile must sit.
const ALIASING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `-d (c - phi) d + c - 3 phi + phi''`.
    LOp,
    /// `(c - phi)^3 - 2a (1 - d^2)^{-1}`.
    KOp,
    /// `J L` with `J = -(1 - d^2)^{-1} d`.
    JlOp,
    /// `(c - phi)^{-1} d (c - phi)^{-1} K`.
    JphiKOp,
    /// `-d^2 + 1 - 2a / (c - phi)^3`.
    MSchrodinger,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::LOp,
        OperatorKind::KOp,
        OperatorKind::JlOp,
        OperatorKind::JphiKOp,
        OperatorKind::MSchrodinger,
    ];

    pub fn is_self_adjoint(self) -> bool {
        matches!(
            self,
            OperatorKind::LOp | OperatorKind::KOp | OperatorKind::MSchrodinger
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::LOp => "l_op",
            OperatorKind::KOp => "k_op",
            OperatorKind::JlOp => "jl_op",
            OperatorKind::JphiKOp => "jphi_k_op",
            OperatorKind::MSchrodinger => "m_schrodinger",
        }
    }
}

/// A dense collocation matrix together with the profile it was built from.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub matrix: DMatrix<f64>,
    pub profile: WaveProfile,
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn grid(&self) -> &[f64] {
        &self.profile.x
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v))
            .as_slice()
            .to_vec()
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }
}

/// Symmetric circulant for the real even symbol `s(k)`, `k = 0..=N/2`.
fn even_circulant(n: usize, symbol: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let half = n / 2;
    let s: Vec<f64> = (0..=half).map(&symbol).collect();
    let col: Vec<f64> = (0..n)
        .map(|d| {
            let mut acc = s[0];
            for (k, sk) in s.iter().enumerate().take(half).skip(1) {
                acc += 2.0 * sk * (2.0 * PI * (k * d) as f64 / n as f64).cos();
            }
            acc += if d % 2 == 0 { s[half] } else { -s[half] };
            acc / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| col[(i + n - j) % n])
}

/// Antisymmetric circulant for the symbol `i s(k)` with `s` odd; the
/// Nyquist mode is dropped.
fn odd_circulant(n: usize, symbol: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let half = n / 2;
    let s: Vec<f64> = (0..half).map(&symbol).collect();
    let col: Vec<f64> = (0..n)
        .map(|d| {
            let mut acc = 0.0;
            for (k, sk) in s.iter().enumerate().skip(1) {
                acc += sk * (2.0 * PI * (k * d) as f64 / n as f64).sin();
            }
            -2.0 * acc / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| col[(i + n - j) % n])
}

fn wavenumber(k: usize, period: f64) -> f64 {
    2.0 * PI * k as f64 / period
}

/// First-derivative collocation matrix.
pub fn differentiation_matrix(n: usize, period: f64) -> DMatrix<f64> {
    odd_circulant(n, |k| wavenumber(k, period))
}

/// Second-derivative collocation matrix, Nyquist mode included.
pub fn second_differentiation_matrix(n: usize, period: f64) -> DMatrix<f64> {
    even_circulant(n, |k| {
        let xi = wavenumber(k, period);
        -xi * xi
    })
}

/// `(1 - d^2)^{-1}` as a circulant matrix.
pub fn helmholtz_inverse(n: usize, period: f64) -> DMatrix<f64> {
    even_circulant(n, |k| {
        let xi = wavenumber(k, period);
        1.0 / (1.0 + xi * xi)
    })
}

/// Magnitudes of the discrete Fourier coefficients `k = 0..=N/2`.
pub fn fourier_magnitudes(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &x) in v.iter().enumerate() {
                let t = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                re += x * t.cos();
                im -= x * t.sin();
            }
            (re * re + im * im).sqrt() / n as f64
        })
        .collect()
}

/// Ratio of the largest coefficient in the top eighth of the spectrum to
/// the largest coefficient overall.
pub fn aliasing_ratio(v: &[f64]) -> f64 {
    let mags = fourier_magnitudes(v);
    let n = v.len();
    let lead = mags.iter().cloned().fold(0.0, f64::max);
    let tail = mags[(3 * n / 8)..].iter().cloned().fold(0.0, f64::max);
    if lead == 0.0 {
        0.0
    } else {
        tail / lead
    }
}

fn resample(profile: &WaveProfile, n: usize) -> Result<WaveProfile> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "N = {n} must be even and at least 64"
        )));
    }
    if profile.kind == ProfileKind::Peaked {
        return Err(Error::Domain(
            "the peaked profile has no smooth linearization".into(),
        ));
    }
    if profile.len() == n {
        Ok(profile.clone())
    } else {
        sample_profile(&profile.params, n)
    }
}

/// Builds the collocation matrix of `kind` on `N` points.
pub fn build_operator(
    profile: &WaveProfile,
    kind: OperatorKind,
    n: usize,
) -> Result<DiscreteOperator> {
    let profile = resample(profile, n)?;
    let ratio = aliasing_ratio(&profile.phi);
    if ratio > ALIASING_TOL {
        return Err(Error::Resolution(ratio));
    }
    let WaveParams { a, c, .. } = profile.params;
    let l = profile.period;
    let gap: Vec<f64> = profile.phi.iter().map(|&p| c - p).collect();

    let matrix = match kind {
        OperatorKind::LOp => l_matrix(&profile, &gap),
        OperatorKind::KOp => k_matrix(a, l, &gap),
        OperatorKind::JlOp => {
            let j = helmholtz_inverse(n, l) * differentiation_matrix(n, l);
            -(j * l_matrix(&profile, &gap))
        }
        OperatorKind::JphiKOp => {
            let mut d = differentiation_matrix(n, l);
            for i in 0..n {
                for k in 0..n {
                    d[(i, k)] /= gap[i] * gap[k];
                }
            }
            d * k_matrix(a, l, &gap)
        }
        OperatorKind::MSchrodinger => {
            let mut m = -second_differentiation_matrix(n, l);
            for i in 0..n {
                m[(i, i)] += 1.0 - 2.0 * a / gap[i].powi(3);
            }
            m
        }
    };
    Ok(DiscreteOperator {
        kind,
        matrix,
        profile,
    })
}

fn l_matrix(profile: &WaveProfile, gap: &[f64]) -> DMatrix<f64> {
    let n = gap.len();
    let l = profile.period;
    let c = profile.params.c;
    let d = differentiation_matrix(n, l);
    let mut scaled = d.clone();
    for i in 0..n {
        for k in 0..n {
            scaled[(i, k)] *= gap[i];
        }
    }
    let mut m = d.transpose() * scaled;
    // The first-derivative matrix annihilates the Nyquist mode; restore its
    // diagonal symbol so the mode is not mistaken for a low eigenvalue.
    let kn = wavenumber(n / 2, l);
    let weight = kn * kn * gap.iter().sum::<f64>() / (n * n) as f64;
    for i in 0..n {
        for k in 0..n {
            let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
            m[(i, k)] += sign * weight;
        }
        m[(i, i)] += c - 3.0 * profile.phi[i] + profile.ddphi[i];
    }
    (&m + m.transpose()) * 0.5
}

fn k_matrix(a: f64, period: f64, gap: &[f64]) -> DMatrix<f64> {
    let n = gap.len();
    let mut m = helmholtz_inverse(n, period) * (-2.0 * a);
    for i in 0..n {
        m[(i, i)] += gap[i].powi(3);
    }
    m
}

/// One eigenvalue; real for the self-adjoint kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Eigenvalue summary of one operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub kind: OperatorKind,
    pub n: usize,
    pub zero_tol: f64,
    /// Sorted by real part for self-adjoint kinds, by imaginary part otherwise.
    pub eigenvalues: Vec<Eigenvalue>,
    pub spectral_radius: f64,
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
    /// Relative residual of the operator on its translation mode.
    pub kernel_residual: f64,
    /// `[(c - phi_+)^3, (c - phi_-)^3]` for `KOp`.
    pub continuous_band: Option<(f64, f64)>,
    pub band_count: Option<usize>,
    pub band_fraction: Option<f64>,
    /// `max |Re lambda|` over the nonzero eigenvalues of the flow kinds.
    pub max_real_part: Option<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Translation mode of the operator: `phi'` for `L`, `mu'` for `K`.
fn translation_mode(op: &DiscreteOperator) -> Vec<f64> {
    let p = &op.profile;
    let n = p.len();
    let along_phi = matches!(
        op.kind,
        OperatorKind::LOp | OperatorKind::JlOp | OperatorKind::MSchrodinger
    );
    if p.kind == ProfileKind::Constant {
        // The first Fourier mode spans the kernel of the constant state.
        return (0..n)
            .map(|j| (2.0 * PI * j as f64 / n as f64).sin())
            .collect();
    }
    if along_phi {
        p.dphi.clone()
    } else {
        let d = differentiation_matrix(n, p.period);
        (d * DVector::from_vec(p.mu())).as_slice().to_vec()
    }
}

/// `||A v|| / ||v||` on the translation mode.
pub fn kernel_residual(op: &DiscreteOperator) -> f64 {
    let v = translation_mode(op);
    norm(&op.apply(&v)) / norm(&v)
}

/// Kernel residuals `||L phi'|| / ||phi'||` and `||J_phi K mu'|| / ||mu'||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelResiduals {
    pub l_op: f64,
    pub k_op: f64,
    pub jphi_k_op: f64,
}

pub fn kernel_residuals(profile: &WaveProfile, n: usize) -> Result<KernelResiduals> {
    Ok(KernelResiduals {
        l_op: kernel_residual(&build_operator(profile, OperatorKind::LOp, n)?),
        k_op: kernel_residual(&build_operator(profile, OperatorKind::KOp, n)?),
        jphi_k_op: kernel_residual(&build_operator(profile, OperatorKind::JphiKOp, n)?),
    })
}

/// Eigenvalues and counts of `op`.
pub fn eigen_report(op: &DiscreteOperator, zero_tol: f64) -> Result<SpectralReport> {
    let n = op.len();
    let kernel_residual = kernel_residual(op);
    if op.kind.is_self_adjoint() {
        let sym = (&op.matrix + op.matrix.transpose()) * 0.5;
        let mut vals: Vec<f64> = sym.symmetric_eigenvalues().as_slice().to_vec();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigen(format!(
                "non-finite eigenvalue for {}",
                op.kind.name()
            )));
        }
        vals.sort_by(f64::total_cmp);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let thr = zero_tol * scale;
        let n_negative = vals.iter().filter(|&&v| v < -thr).count();
        let n_zero = vals.iter().filter(|&&v| v.abs() <= thr).count();
        let (mut continuous_band, mut band_count, mut band_fraction) = (None, None, None);
        if op.kind == OperatorKind::KOp {
            let c = op.profile.params.c;
            let tp = op.profile.turning;
            let lo = (c - tp.phi_plus).powi(3);
            let hi = (c - tp.phi_minus).powi(3);
            let delta = 1e-3 * (hi - lo);
            let positive: Vec<f64> = vals.iter().cloned().filter(|&v| v > thr).collect();
            let inside = positive
                .iter()
                .filter(|&&v| v >= lo - delta && v <= hi + delta)
                .count();
            continuous_band = Some((lo, hi));
            band_count = Some(inside);
            band_fraction = Some(if positive.is_empty() {
                0.0
            } else {
                inside as f64 / positive.len() as f64
            });
        }
        Ok(SpectralReport {
            kind: op.kind,
            n,
            zero_tol,
            eigenvalues: vals.iter().map(|&re| Eigenvalue { re, im: 0.0 }).collect(),
            spectral_radius: scale,
            n_negative,
            n_zero,
            n_positive: n - n_negative - n_zero,
            kernel_residual,
            continuous_band,
            band_count,
            band_fraction,
            max_real_part: None,
        })
    } else {
        let mut vals: Vec<Eigenvalue> = op
            .matrix
            .complex_eigenvalues()
            .iter()
            .map(|z| Eigenvalue { re: z.re, im: z.im })
            .collect();
        if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Eigen(format!(
                "non-finite eigenvalue for {}",
                op.kind.name()
            )));
        }
        vals.sort_by(|x, y| x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re)));
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let thr = zero_tol * scale;
        let n_zero = vals.iter().filter(|v| v.abs() <= thr).count();
        let max_real_part = vals
            .iter()
            .filter(|v| v.abs() > thr)
            .fold(0.0f64, |m, v| m.max(v.re.abs()));
        Ok(SpectralReport {
            kind: op.kind,
            n,
            zero_tol,
            eigenvalues: vals,
            spectral_radius: scale,
            n_negative: 0,
            n_zero,
            n_positive: 0,
            kernel_residual,
            continuous_band: None,
            band_count: None,
            band_fraction: None,
            max_real_part: Some(max_real_part),
        })
    }
}

/// Comparison of the nonzero spectra of `J L` and `J_phi K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumMatch {
    /// Eigenvalues compared on each side.
    pub compared: usize,
    /// Modulus below which eigenvalues were compared.
    pub cut: f64,
    pub max_relative_gap: f64,
    pub agree: bool,
}

/// Verdict on the imaginary-axis property for both flow operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralStability {
    pub jl: SpectralReport,
    pub jphi_k: SpectralReport,
    /// `max |Re lambda| / spectral radius`, worst of the two operators.
    pub relative_real_part: f64,
    pub stable: bool,
    pub equivalence: SpectrumMatch,
}

/// Relative real-part threshold of the stability verdict.
pub const STABILITY_TOL: f64 = 1e-6;

/// Tolerance of the pairwise eigenvalue comparison.
pub const EQUIVALENCE_TOL: f64 = 1e-6;

fn nonzero_below(r: &SpectralReport, cut: f64) -> Vec<Eigenvalue> {
    let thr = r.zero_tol * r.spectral_radius;
    r.eigenvalues
        .iter()
        .cloned()
        .filter(|e| e.abs() > thr && e.abs() < cut)
        .collect()
}

/// Compares the nonzero eigenvalues of modulus below `cut`.
pub fn match_spectra(x: &SpectralReport, y: &SpectralReport, cut: f64) -> SpectrumMatch {
    let sorted = |r: &SpectralReport| {
        let mut v = nonzero_below(r, cut);
        v.sort_by(|p, q| p.im.total_cmp(&q.im).then(p.re.total_cmp(&q.re)));
        v
    };
    let (ex, ey) = (sorted(x), sorted(y));
    if ex.len() != ey.len() || ex.is_empty() {
        return SpectrumMatch {
            compared: ex.len().min(ey.len()),
            cut,
            max_relative_gap: f64::INFINITY,
            agree: false,
        };
    }
    // The two flows run in opposite time directions, so compare against the
    // mirrored list as well and keep the better pairing.
    let gap_with = |flip: bool| -> f64 {
        let mut other: Vec<Eigenvalue> = ey
            .iter()
            .map(|e| {
                if flip {
                    Eigenvalue {
                        re: -e.re,
                        im: -e.im,
                    }
                } else {
                    *e
                }
            })
            .collect();
        other.sort_by(|p, q| p.im.total_cmp(&q.im).then(p.re.total_cmp(&q.re)));
        ex.iter()
            .zip(&other)
            .map(|(p, q)| (p.re - q.re).hypot(p.im - q.im) / p.abs())
            .fold(0.0, f64::max)
    };
    let gap = gap_with(false).min(gap_with(true));
    SpectrumMatch {
        compared: ex.len(),
        cut,
        max_relative_gap: gap,
        agree: gap <= EQUIVALENCE_TOL,
    }
}

/// Largest modulus below which every nonzero eigenvalue of `coarse` has a
/// counterpart in `fine` within relative `tol`.
pub fn converged_cut(coarse: &SpectralReport, fine: &SpectralReport, tol: f64) -> f64 {
    let mut ev = nonzero_below(coarse, f64::INFINITY);
    ev.sort_by(|p, q| p.abs().total_cmp(&q.abs()));
    let reference = nonzero_below(fine, f64::INFINITY);
    for e in &ev {
        let d = reference
            .iter()
            .map(|f| (e.re - f.re).hypot(e.im - f.im))
            .fold(f64::INFINITY, f64::min);
        if d > tol * e.abs() {
            return e.abs();
        }
    }
    f64::INFINITY
}

/// Upper bound on the compared window as a fraction of the spectral radius.
pub const EQUIVALENCE_WINDOW: f64 = 0.1;

/// Builds `J L` and `J_phi K`, checks their spectra lie on the imaginary
/// axis and that their nonzero parts agree.
///
/// The comparison covers eigenvalues below `EQUIVALENCE_WINDOW` times the
/// spectral radius that both operators reproduce on a grid of `2n` points.
pub fn spectral_stability(profile: &WaveProfile, n: usize) -> Result<SpectralStability> {
    let report = |kind, m| eigen_report(&build_operator(profile, kind, m)?, DEFAULT_ZERO_TOL);
    let jl = report(OperatorKind::JlOp, n)?;
    let jphi_k = report(OperatorKind::JphiKOp, n)?;
    let jl_fine = report(OperatorKind::JlOp, 2 * n)?;
    let jphi_k_fine = report(OperatorKind::JphiKOp, 2 * n)?;
    let rel = |r: &SpectralReport| r.max_real_part.unwrap_or(0.0) / r.spectral_radius;
    let relative_real_part = rel(&jl).max(rel(&jphi_k));
    let cut = (EQUIVALENCE_WINDOW * jl.spectral_radius.min(jphi_k.spectral_radius))
        .min(converged_cut(&jl, &jl_fine, EQUIVALENCE_TOL))
        .min(converged_cut(&jphi_k, &jphi_k_fine, EQUIVALENCE_TOL));
    let equivalence = match_spectra(&jl, &jphi_k, cut);
    Ok(SpectralStability {
        stable: relative_real_part < STABILITY_TOL,
        relative_real_part,
        equivalence,
        jl,
        jphi_k,
    })
}

/// Which parameter derivative of the profile the Floquet constant tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FloquetFamily {
    /// Null equation of `L`; sign opposite to `dL/da`.
    InA,
    /// Null equation of the Schrodinger operator `M`; sign of `dL/db`.
    InB,
}

fn floquet_opts() -> OdeOpts {
    OdeOpts {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_steps: 2_000_000,
    }
}

/// Floquet constant `theta = v'(L)` of the null equation.
pub fn floquet_theta(p: &WaveParams, family: FloquetFamily) -> Result<f64> {
    let (a, c) = (p.a, p.c);
    match family {
        FloquetFamily::InA => shoot_first_order(p, move |phi, dphi, ddphi, v, dv| {
            (dphi * dv + (ddphi - 3.0 * phi + c) * v) / (c - phi)
        }),
        FloquetFamily::InB => shoot_first_order(p, move |phi, _, _, v, _| {
            (1.0 - 2.0 * a / (c - phi).powi(3)) * v
        }),
    }
}

/// Same constant for `InA` from the Liouville form `-w'' + Q w = 0`.
pub fn floquet_theta_liouville(p: &WaveParams) -> Result<f64> {
    let c = p.c;
    shoot_first_order(p, move |phi, dphi, ddphi, w, _| {
        let gap = c - phi;
        let s = dphi / gap;
        let q = (c - 3.0 * phi) / gap + ddphi / (2.0 * gap) - 0.25 * s * s;
        q * w
    })
}

/// Shoots `(phi, phi', v, v')` over one period from the crest with
/// `v(0) = 1`, `v'(0) = 0` and returns `v'(L)`.
fn shoot_first_order(
    p: &WaveParams,
    second: impl Fn(f64, f64, f64, f64, f64) -> f64,
) -> Result<f64> {
    require_interior(p)?;
    let tp = turning_points(p)?;
    let l = period(p)?;
    let (a, c) = (p.a, p.c);
    let y = dopri5(
        |_, y: &[f64; 4]| {
            let gap = c - y[0];
            let dd = y[0] - a / (gap * gap);
            [y[1], dd, y[3], second(y[0], y[1], dd, y[2], y[3])]
        },
        0.0,
        [tp.phi_plus, 0.0, 1.0, 0.0],
        l,
        floquet_opts(),
    )
    .map_err(|e| Error::IntegrationFailure(e.to_string()))?;
    Ok(y[3])
}

/// Closed form of the constant from the period slopes. With
/// `D = c phi_+ - 3 phi_+^2 / 2 - b` it reads `-dL/da D^2 / (c - phi_+)`
/// for `InA` and `dL/db D^2 / (c - phi_+)^2` for `InB`.
pub fn floquet_theta_from_period(p: &WaveParams, family: FloquetFamily) -> Result<Derivative> {
    let tp = turning_points(p)?;
    let grad = period_gradient(p)?;
    let top = tp.phi_plus;
    let gap = p.c - top;
    let d = p.c * top - 1.5 * top * top - p.b;
    let d2 = d * d;
    Ok(match family {
        FloquetFamily::InA => Derivative {
            value: -grad.d_a * d2 / gap,
            error: grad.err_a * d2 / gap,
        },
        FloquetFamily::InB => Derivative {
            value: grad.d_b * d2 / (gap * gap),
            error: grad.err_b * d2 / (gap * gap),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::mass_energy;
    use crate::profile::{period_derivative_a, FixedPeriodFamily};
    use crate::wave_family::{a_minus_of_b, boundary_b_minus, boundary_b_plus};

    fn interior(a: f64, t: f64, c: f64) -> WaveParams {
        let bm = boundary_b_minus(a, c).unwrap();
        let bp = boundary_b_plus(a, c).unwrap();
        WaveParams::new(a, bm + t * (bp - bm), c)
    }

    fn rel_gap(x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        norm(&d) / norm(y)
    }

    #[test]
    fn fourier_matrices_are_exact_on_trig_polynomials() {
        let (n, l) = (64, 3.7);
        let x: Vec<f64> = (0..n).map(|j| l * j as f64 / n as f64).collect();
        let k = 2.0 * PI * 5.0 / l;
        let f: Vec<f64> = x.iter().map(|&t| (k * t).sin()).collect();
        let d = differentiation_matrix(n, l) * DVector::from_vec(f.clone());
        let d2 = second_differentiation_matrix(n, l) * DVector::from_vec(f.clone());
        let g = helmholtz_inverse(n, l) * DVector::from_vec(f.clone());
        for j in 0..n {
            assert!((d[j] - k * (k * x[j]).cos()).abs() < 1e-12);
            assert!((d2[j] + k * k * f[j]).abs() < 1e-10);
            assert!((g[j] - f[j] / (1.0 + k * k)).abs() < 1e-14);
        }
        let nyq: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let kn = 2.0 * PI * (n / 2) as f64 / l;
        let d2n = second_differentiation_matrix(n, l) * DVector::from_vec(nyq.clone());
        for j in 0..n {
            assert!((d2n[j] + kn * kn * nyq[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn operator_identities() {
        let p = WaveParams::new(0.4, 0.0, 2.0);
        let prof = sample_profile(&p, 256).unwrap();
        let (a, b, c) = (p.a, p.b, p.c);
        let lop = build_operator(&prof, OperatorKind::LOp, 256).unwrap();
        let kop = build_operator(&prof, OperatorKind::KOp, 256).unwrap();
        assert!(lop.asymmetry() < 1e-10 && kop.asymmetry() < 1e-10);

        let ones = vec![1.0; 256];
        let expect: Vec<f64> = (0..256)
            .map(|j| c - 3.0 * prof.phi[j] + prof.ddphi[j])
            .collect();
        assert!(rel_gap(&lop.apply(&ones), &expect) < 1e-8);

        let expect: Vec<f64> = (0..256)
            .map(|j| 2.0 * b + c * (prof.ddphi[j] - prof.phi[j]))
            .collect();
        assert!(rel_gap(&lop.apply(&prof.phi), &expect) < 1e-8);

        let mu = prof.mu();
        let kmu = kop.apply(&mu);
        let expect: Vec<f64> = prof.phi.iter().map(|&f| a * (c - 3.0 * f)).collect();
        assert!(rel_gap(&kmu, &expect) < 1e-8);

        let h = prof.period / 256.0;
        let form: f64 = kmu.iter().zip(&mu).map(|(x, y)| x * y).sum::<f64>() * h;
        let (m, e) = mass_energy(&p).unwrap();
        let expect = a * (c * m - 6.0 * e);
        assert!(
            ((form - expect) / expect).abs() < 1e-6,
            "{form} vs {expect}"
        );
    }

    #[test]
    fn kernel_residuals_are_small() {
        for p in [
            WaveParams::new(0.4, 0.0, 2.0),
            interior(1.0, 0.6, 2.0),
            interior(0.15, 0.5, 2.0),
        ] {
            let prof = sample_profile(&p, 256).unwrap();
            let r = kernel_residuals(&prof, 256).unwrap();
            assert!(
                r.l_op < 1e-7 && r.k_op < 1e-7 && r.jphi_k_op < 1e-7,
                "{p:?}: {r:?}"
            );
        }
    }

    #[test]
    fn helmholtz_family_relations() {
        // K d_a mu = c - phi and K d_c mu = -2a along a fixed-period family.
        let c = 2.0;
        let p0 = WaveParams::new(0.4, 0.0, c);
        let l = period(&p0).unwrap();
        let n = 256;
        let fam = FixedPeriodFamily::new(l, c).unwrap();
        let mu_at = |a: f64, c: f64| -> Vec<f64> {
            let f = FixedPeriodFamily::new(l, c).unwrap();
            let prof = sample_profile(&f.params_at(a).unwrap(), n).unwrap();
            prof.phi.iter().map(|&x| a / ((c - x) * (c - x))).collect()
        };
        let diff = |g: &dyn Fn(f64) -> Vec<f64>, x: f64, h: f64| -> Vec<f64> {
            let (p1, m1, p2, m2) = (g(x + h), g(x - h), g(x + 0.5 * h), g(x - 0.5 * h));
            (0..n)
                .map(|j| {
                    let d1 = (p1[j] - m1[j]) / (2.0 * h);
                    let d2 = (p2[j] - m2[j]) / h;
                    (4.0 * d2 - d1) / 3.0
                })
                .collect()
        };
        let a = 0.4;
        let prof = sample_profile(&fam.params_at(a).unwrap(), n).unwrap();
        let kop = build_operator(&prof, OperatorKind::KOp, n).unwrap();

        let da_mu = diff(&|s| mu_at(s, c), a, 1e-3);
        let expect: Vec<f64> = prof.phi.iter().map(|&x| c - x).collect();
        assert!(rel_gap(&kop.apply(&da_mu), &expect) < 1e-5);

        let dc_mu = diff(&|s| mu_at(a, s), c, 1e-3);
        let expect = vec![-2.0 * a; n];
        assert!(rel_gap(&kop.apply(&dc_mu), &expect) < 1e-5);
    }

    #[test]
    fn k_eigencounts_and_band() {
        for p in [
            WaveParams::new(0.4, 0.0, 2.0),
            interior(0.8, 0.3, 2.0),
            interior(1.1, 0.7, 2.0),
        ] {
            let mut counts = Vec::new();
            for n in [128, 256, 512] {
                let prof = sample_profile(&p, n).unwrap();
                let r = eigen_report(
                    &build_operator(&prof, OperatorKind::KOp, n).unwrap(),
                    DEFAULT_ZERO_TOL,
                )
                .unwrap();
                assert_eq!((r.n_negative, r.n_zero), (1, 1), "{p:?} N = {n}");
                assert_eq!(r.n_negative + r.n_zero + r.n_positive, n);
                assert!(r.band_fraction.unwrap() >= 0.9);
                counts.push(r.band_count.unwrap());
            }
            assert!(counts[0] < counts[1] && counts[1] < counts[2]);
        }
    }

    #[test]
    fn l_eigencounts_follow_period_slope() {
        let c = 2.0;
        for (b, expect) in [(-1.2, 2), (0.0, 1)] {
            let a = if b < 0.0 {
                0.7 * a_minus_of_b(b, c).unwrap()
            } else {
                0.4
            };
            let p = WaveParams::new(a, b, c);
            for n in [128, 256, 512] {
                let prof = sample_profile(&p, n).unwrap();
                let r = eigen_report(
                    &build_operator(&prof, OperatorKind::LOp, n).unwrap(),
                    DEFAULT_ZERO_TOL,
                )
                .unwrap();
                assert_eq!((r.n_negative, r.n_zero), (expect, 1), "b = {b}, N = {n}");
            }
        }
    }

    #[test]
    fn l_count_changes_with_the_sign_of_period_slope() {
        let (b, c) = (-0.6, 2.0);
        let top = a_minus_of_b(b, c).unwrap();
        for i in 4..12 {
            let a = top * i as f64 / 12.0;
            let p = WaveParams::new(a, b, c);
            let da = period_derivative_a(&p).unwrap();
            let prof = sample_profile(&p, 256).unwrap();
            let r = eigen_report(
                &build_operator(&prof, OperatorKind::LOp, 256).unwrap(),
                DEFAULT_ZERO_TOL,
            )
            .unwrap();
            let theta = floquet_theta(&p, FloquetFamily::InA).unwrap();
            assert_eq!(r.n_negative, if da.value > 0.0 { 2 } else { 1 }, "a = {a}");
            assert_eq!(theta > 0.0, da.value < 0.0);
        }
    }

    #[test]
    fn schrodinger_operator_counts() {
        let p = interior(0.8, 0.3, 2.0);
        let prof = sample_profile(&p, 256).unwrap();
        let r = eigen_report(
            &build_operator(&prof, OperatorKind::MSchrodinger, 256).unwrap(),
            DEFAULT_ZERO_TOL,
        )
        .unwrap();
        assert_eq!((r.n_negative, r.n_zero), (1, 1));
        assert!(r.kernel_residual < 1e-7);
    }

    #[test]
    fn constant_state_matches_its_symbol() {
        let c = 2.0;
        let a = 0.5;
        let p = WaveParams::new(a, boundary_b_minus(a, c).unwrap(), c);
        let n = 64;
        let prof = sample_profile(&p, n).unwrap();
        assert_eq!(prof.kind, ProfileKind::Constant);
        let lop = build_operator(&prof, OperatorKind::LOp, n).unwrap();
        assert!(kernel_residual(&lop) < 1e-12);

        let phi2 = prof.phi[0];
        let l = prof.period;
        let mut expect: Vec<f64> = (1..n / 2)
            .flat_map(|k| {
                let xi = wavenumber(k, l);
                let w = xi * ((c - phi2) * xi * xi + c - 3.0 * phi2) / (1.0 + xi * xi);
                [w, -w]
            })
            .chain([0.0, 0.0])
            .collect();
        expect.sort_by(f64::total_cmp);
        let r = eigen_report(
            &build_operator(&prof, OperatorKind::JlOp, n).unwrap(),
            DEFAULT_ZERO_TOL,
        )
        .unwrap();
        let scale = r.spectral_radius;
        let mut got: Vec<f64> = r.eigenvalues.iter().map(|e| e.im).collect();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-10 * scale, "{g} vs {e}");
        }
        assert!(r.max_real_part.unwrap() < 1e-10 * scale);
    }

    #[test]
    fn flow_spectra_on_the_imaginary_axis() {
        let p = WaveParams::new(0.4, 0.0, 2.0);
        let prof = sample_profile(&p, 256).unwrap();
        let s = spectral_stability(&prof, 256).unwrap();
        assert!(s.stable, "{}", s.relative_real_part);
        assert!(
            s.equivalence.agree && s.equivalence.compared >= 20,
            "{:?}",
            s.equivalence
        );
    }

    #[test]
    fn floquet_routes_agree() {
        for p in [
            WaveParams::new(0.4, 0.0, 2.0),
            WaveParams::new(0.05, -1.2, 2.0),
            interior(1.0, 0.6, 2.0),
        ] {
            let ta = floquet_theta(&p, FloquetFamily::InA).unwrap();
            let tl = floquet_theta_liouville(&p).unwrap();
            assert!(((ta - tl) / ta).abs() < 1e-6);
            for fam in [FloquetFamily::InA, FloquetFamily::InB] {
                let t = floquet_theta(&p, fam).unwrap();
                let cf = floquet_theta_from_period(&p, fam).unwrap();
                assert!(
                    (t - cf.value).abs() < 1e-6 * t.abs() + 10.0 * cf.error,
                    "{p:?} {fam:?}: {t} vs {cf:?}"
                );
            }
            assert!(floquet_theta(&p, FloquetFamily::InB).unwrap() > 0.0);
        }
    }

    #[test]
    fn under_resolved_profile_is_rejected() {
        let p = WaveParams::new(0.01, -0.6, 2.0);
        let prof = sample_profile(&p, 64).unwrap();
        assert!(matches!(
            build_operator(&prof, OperatorKind::KOp, 64),
            Err(Error::Resolution(_))
        ));
        assert!(build_operator(&prof, OperatorKind::KOp, 63).is_err());
    }
}
