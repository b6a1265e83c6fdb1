//! C interface to `chwave`.
//!
//! Every function returns a [`ChwStatus`]. Results are written through out
//! pointers, which are left untouched on failure. The message of the most
//! recent failure on the calling thread is available from
//! [`chw_last_error_message`].
//!
//! Profiles and stability curves are opaque handles owned by the caller and
//! released with their `_free` function.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access the function
//! makes: out pointers for one write, buffers for `buf_len` elements, and
//! handles must come from the matching `_new` or `_scan` call and not yet be
//! freed. Null pointers are reported as `ChwStatus::NullPointer`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chwave::functionals::{stability_scan, StabilityCurve};
use chwave::profile::{period, period_gradient, sample_profile, WaveProfile};
use chwave::spectra::{build_operator, eigen_report, spectral_stability, OperatorKind};
use chwave::wave_family::{
    boundary_b_minus, boundary_b_plus, classify, critical_value_a, RegionClass, WaveParams,
};
use chwave::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChwStatus {
    Ok = 0,
    NullPointer = 1,
    /// Arguments outside the domain of the call.
    InvalidArgument = 2,
    /// Parameters outside the existence region of smooth waves.
    NotInRegion = 3,
    /// The collocation grid does not resolve the profile.
    Unresolved = 4,
    /// Quadrature, root finding, integration or the eigensolver failed.
    NumericalFailure = 5,
    BufferTooSmall = 6,
    IndexOutOfRange = 7,
    Panic = 8,
}

/// Position of `(a, b, c)` relative to the existence region.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChwRegion {
    Interior = 0,
    BoundaryConstant = 1,
    BoundarySolitary = 2,
    BoundaryPeaked = 3,
    Outside = 4,
}

/// Linearized operators available through [`chw_operator_spectrum`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChwOperator {
    L = 0,
    K = 1,
    JL = 2,
    JPhiK = 3,
    Schrodinger = 4,
}

/// Sampled columns of a profile.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChwProfileField {
    X = 0,
    Phi = 1,
    DPhi = 2,
    DdPhi = 3,
}

/// Eigenvalue counts of one discretized operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ChwEigenSummary {
    /// Zero for the flow operators, whose spectra are not real.
    pub negative: usize,
    pub zero: usize,
    /// Zero for the flow operators.
    pub positive: usize,
    pub spectral_radius: f64,
    /// NaN for self-adjoint operators.
    pub max_real_part: f64,
    pub kernel_residual: f64,
}

/// Imaginary-axis verdict for `J L` and `J_phi K`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ChwSpectralStability {
    pub relative_real_part: f64,
    pub stable: bool,
    pub compared: usize,
    pub max_relative_gap: f64,
    pub spectra_agree: bool,
}

/// One point of a fixed-period family.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ChwStabilitySample {
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

/// Opaque sampled profile.
pub struct ChwProfile(WaveProfile);

/// Opaque `E/M^2` scan along a fixed-period family.
pub struct ChwStabilityCurve(StabilityCurve);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> ChwStatus {
    match err {
        Error::NotInRegion { .. }
        | Error::OutsideCubicRange { .. }
        | Error::DegenerateRoots { .. } => ChwStatus::NotInRegion,
        Error::Resolution(_) => ChwStatus::Unresolved,
        e if e.is_input_error() => ChwStatus::InvalidArgument,
        _ => ChwStatus::NumericalFailure,
    }
}

enum Fail {
    Status(ChwStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null() -> Fail {
    Fail::Status(ChwStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ChwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChwStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            ChwStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

/// Message of the last failure on this thread. Valid until the next call
/// on the same thread; empty when no call has failed.
#[no_mangle]
pub extern "C" fn chw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Upper end `4c^3/27` of the range of `a`.
#[no_mangle]
pub unsafe extern "C" fn chw_critical_value_a(c: f64, a_max: *mut f64) -> ChwStatus {
    guard(|| {
        let v = critical_value_a(c)?;
        *out(a_max)? = v;
        Ok(())
    })
}

/// Lower and upper bounds on `b` at fixed `a` and `c`.
#[no_mangle]
pub unsafe extern "C" fn chw_b_bounds(
    a: f64,
    c: f64,
    b_minus: *mut f64,
    b_plus: *mut f64,
) -> ChwStatus {
    guard(|| {
        let (lo, hi) = (boundary_b_minus(a, c)?, boundary_b_plus(a, c)?);
        let (lo_out, hi_out) = (out(b_minus)?, out(b_plus)?);
        *lo_out = lo;
        *hi_out = hi;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_classify(
    a: f64,
    b: f64,
    c: f64,
    tol: f64,
    region: *mut ChwRegion,
) -> ChwStatus {
    guard(|| {
        let r = match classify(&WaveParams::new(a, b, c), tol) {
            RegionClass::Interior => ChwRegion::Interior,
            RegionClass::BoundaryConstant => ChwRegion::BoundaryConstant,
            RegionClass::BoundarySolitary => ChwRegion::BoundarySolitary,
            RegionClass::BoundaryPeaked => ChwRegion::BoundaryPeaked,
            RegionClass::Outside => ChwRegion::Outside,
        };
        *out(region)? = r;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_period(a: f64, b: f64, c: f64, length: *mut f64) -> ChwStatus {
    guard(|| {
        let v = period(&WaveParams::new(a, b, c))?;
        *out(length)? = v;
        Ok(())
    })
}

/// Partial derivatives of the period in `a` and `b`.
#[no_mangle]
pub unsafe extern "C" fn chw_period_gradient(
    a: f64,
    b: f64,
    c: f64,
    d_a: *mut f64,
    d_b: *mut f64,
) -> ChwStatus {
    guard(|| {
        let g = period_gradient(&WaveParams::new(a, b, c))?;
        let (da_out, db_out) = (out(d_a)?, out(d_b)?);
        *da_out = g.d_a;
        *db_out = g.d_b;
        Ok(())
    })
}

/// Samples one period on `n` uniform points.
#[no_mangle]
pub unsafe extern "C" fn chw_profile_new(
    a: f64,
    b: f64,
    c: f64,
    n: usize,
    profile: *mut *mut ChwProfile,
) -> ChwStatus {
    guard(|| {
        let slot = out(profile)?;
        let p = sample_profile(&WaveParams::new(a, b, c), n)?;
        *slot = Box::into_raw(Box::new(ChwProfile(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_profile_free(profile: *mut ChwProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

#[no_mangle]
pub unsafe extern "C" fn chw_profile_len(profile: *const ChwProfile, len: *mut usize) -> ChwStatus {
    guard(|| {
        let n = handle(profile)?.0.len();
        *out(len)? = n;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_profile_period(
    profile: *const ChwProfile,
    length: *mut f64,
) -> ChwStatus {
    guard(|| {
        let l = handle(profile)?.0.period;
        *out(length)? = l;
        Ok(())
    })
}

/// Copies one sampled column into `buf`, which must hold at least
/// `chw_profile_len` values.
#[no_mangle]
pub unsafe extern "C" fn chw_profile_copy(
    profile: *const ChwProfile,
    field: ChwProfileField,
    buf: *mut f64,
    buf_len: usize,
) -> ChwStatus {
    guard(|| {
        let p = &handle(profile)?.0;
        let src = match field {
            ChwProfileField::X => &p.x,
            ChwProfileField::Phi => &p.phi,
            ChwProfileField::DPhi => &p.dphi,
            ChwProfileField::DdPhi => &p.ddphi,
        };
        if buf.is_null() {
            return Err(null());
        }
        if buf_len < src.len() {
            return Err(Fail::Status(
                ChwStatus::BufferTooSmall,
                format!("buffer holds {buf_len} values, {} needed", src.len()),
            ));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        Ok(())
    })
}

/// Eigenvalues of an operator discretized on `n` collocation points.
///
/// `re` and `im` may both be null; otherwise each must hold `n` values and
/// receives the eigenvalues in the library's sort order.
#[no_mangle]
pub unsafe extern "C" fn chw_operator_spectrum(
    profile: *const ChwProfile,
    op: ChwOperator,
    n: usize,
    zero_tol: f64,
    summary: *mut ChwEigenSummary,
    re: *mut f64,
    im: *mut f64,
    buf_len: usize,
) -> ChwStatus {
    guard(|| {
        let p = &handle(profile)?.0;
        let summary = out(summary)?;
        let want_values = !re.is_null() || !im.is_null();
        if want_values && (re.is_null() || im.is_null()) {
            return Err(null());
        }
        if want_values && buf_len < n {
            return Err(Fail::Status(
                ChwStatus::BufferTooSmall,
                format!("buffers hold {buf_len} values, {n} needed"),
            ));
        }
        let kind = match op {
            ChwOperator::L => OperatorKind::LOp,
            ChwOperator::K => OperatorKind::KOp,
            ChwOperator::JL => OperatorKind::JlOp,
            ChwOperator::JPhiK => OperatorKind::JphiKOp,
            ChwOperator::Schrodinger => OperatorKind::MSchrodinger,
        };
        let r = eigen_report(&build_operator(p, kind, n)?, zero_tol)?;
        *summary = ChwEigenSummary {
            negative: r.n_negative,
            zero: r.n_zero,
            positive: r.n_positive,
            spectral_radius: r.spectral_radius,
            max_real_part: r.max_real_part.unwrap_or(f64::NAN),
            kernel_residual: r.kernel_residual,
        };
        if want_values {
            for (i, e) in r.eigenvalues.iter().enumerate() {
                *re.add(i) = e.re;
                *im.add(i) = e.im;
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_spectral_stability(
    profile: *const ChwProfile,
    n: usize,
    result: *mut ChwSpectralStability,
) -> ChwStatus {
    guard(|| {
        let p = &handle(profile)?.0;
        let result = out(result)?;
        let s = spectral_stability(p, n)?;
        *result = ChwSpectralStability {
            relative_real_part: s.relative_real_part,
            stable: s.stable,
            compared: s.equivalence.compared,
            max_relative_gap: s.equivalence.max_relative_gap,
            spectra_agree: s.equivalence.agree,
        };
        Ok(())
    })
}

/// Scans `E/M^2` over `n` samples of the family of period `length`.
#[no_mangle]
pub unsafe extern "C" fn chw_stability_scan(
    length: f64,
    c: f64,
    n: usize,
    curve: *mut *mut ChwStabilityCurve,
) -> ChwStatus {
    guard(|| {
        let slot = out(curve)?;
        let s = stability_scan(length, c, n)?;
        *slot = Box::into_raw(Box::new(ChwStabilityCurve(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_stability_curve_free(curve: *mut ChwStabilityCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

#[no_mangle]
pub unsafe extern "C" fn chw_stability_curve_len(
    curve: *const ChwStabilityCurve,
    len: *mut usize,
) -> ChwStatus {
    guard(|| {
        let n = handle(curve)?.0.samples.len();
        *out(len)? = n;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn chw_stability_curve_sample(
    curve: *const ChwStabilityCurve,
    index: usize,
    sample: *mut ChwStabilitySample,
) -> ChwStatus {
    guard(|| {
        let samples = &handle(curve)?.0.samples;
        let sample = out(sample)?;
        let s = samples.get(index).ok_or_else(|| {
            Fail::Status(
                ChwStatus::IndexOutOfRange,
                format!("index {index} of {} samples", samples.len()),
            )
        })?;
        *sample = ChwStabilitySample {
            a: s.a,
            b: s.b,
            mass: s.mass,
            energy: s.energy,
            ratio: s.ratio,
            dratio_da: s.dratio_da,
            dratio_err: s.dratio_err,
            det_p: s.det_p,
            det_p_closed_form: s.det_p_closed_form,
        };
        Ok(())
    })
}

/// True when `E/M^2` decreases along the whole curve beyond its error
/// estimate.
#[no_mangle]
pub unsafe extern "C" fn chw_stability_curve_is_stable(
    curve: *const ChwStabilityCurve,
    stable: *mut bool,
) -> ChwStatus {
    guard(|| {
        let v = handle(curve)?.0.is_stable();
        *out(stable)? = v;
        Ok(())
    })
}
