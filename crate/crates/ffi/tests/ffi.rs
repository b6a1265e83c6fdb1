use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use chwave_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(chw_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn scalar_queries() {
    unsafe {
        let mut ac = 0.0;
        assert_eq!(chw_critical_value_a(2.0, &mut ac), ChwStatus::Ok);
        assert!((ac - 32.0 / 27.0).abs() < 1e-15);

        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(chw_b_bounds(0.5, 2.0, &mut lo, &mut hi), ChwStatus::Ok);
        assert!(lo < hi);

        let mut region = ChwRegion::Outside;
        assert_eq!(
            chw_classify(0.5, 0.5 * (lo + hi), 2.0, 1e-10, &mut region),
            ChwStatus::Ok
        );
        assert_eq!(region, ChwRegion::Interior);

        let mut l = 0.0;
        assert_eq!(chw_period(1e-10, -1.0, 2.0, &mut l), ChwStatus::Ok);
        assert!((l - 2.0 * (2.0f64 / 2.0f64.sqrt()).acosh()).abs() < 1e-4 * l);

        let (mut da, mut db) = (0.0, 0.0);
        assert_eq!(
            chw_period_gradient(0.4, 0.0, 2.0, &mut da, &mut db),
            ChwStatus::Ok
        );
        assert!(da < 0.0 && db > 0.0);
    }
}

#[test]
fn status_codes_and_messages() {
    unsafe {
        let mut l = -1.0;
        assert_eq!(chw_period(0.5, 5.0, 2.0, &mut l), ChwStatus::NotInRegion);
        assert_eq!(l, -1.0);
        assert!(last_error().contains("not inside"), "{}", last_error());

        assert_eq!(
            chw_period(0.5, 0.0, -1.0, &mut l),
            ChwStatus::InvalidArgument
        );
        assert_eq!(
            chw_period(0.4, 0.0, 2.0, ptr::null_mut()),
            ChwStatus::NullPointer
        );
        assert_eq!(chw_profile_len(ptr::null(), &mut 0), ChwStatus::NullPointer);

        let (mut lo, mut hi) = (0.0, 0.0);
        chw_b_bounds(0.01, 2.0, &mut lo, &mut hi);
        let mut prof = ptr::null_mut();
        assert_eq!(
            chw_profile_new(0.01, 0.5 * (lo + hi), 2.0, 64, &mut prof),
            ChwStatus::Ok
        );
        let mut s = ChwEigenSummary::default();
        let status = chw_operator_spectrum(
            prof,
            ChwOperator::K,
            64,
            1e-7,
            &mut s,
            ptr::null_mut(),
            ptr::null_mut(),
            0,
        );
        assert_eq!(status, ChwStatus::Unresolved);
        chw_profile_free(prof);
    }
}

#[test]
fn profile_handle() {
    unsafe {
        let mut prof = ptr::null_mut();
        assert_eq!(
            chw_profile_new(0.4, 0.0, 2.0, 128, &mut prof),
            ChwStatus::Ok
        );
        let mut n = 0;
        assert_eq!(chw_profile_len(prof, &mut n), ChwStatus::Ok);
        assert_eq!(n, 128);
        let mut l = 0.0;
        assert_eq!(chw_profile_period(prof, &mut l), ChwStatus::Ok);
        let mut direct = 0.0;
        chw_period(0.4, 0.0, 2.0, &mut direct);
        assert_eq!(l, direct);

        let mut phi = vec![0.0; n];
        assert_eq!(
            chw_profile_copy(prof, ChwProfileField::Phi, phi.as_mut_ptr(), n - 1),
            ChwStatus::BufferTooSmall
        );
        assert_eq!(
            chw_profile_copy(prof, ChwProfileField::Phi, phi.as_mut_ptr(), n),
            ChwStatus::Ok
        );
        assert!(phi[0] >= phi.iter().cloned().fold(f64::MIN, f64::max));

        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        let mut k = ChwEigenSummary::default();
        let status = chw_operator_spectrum(
            prof,
            ChwOperator::K,
            n,
            1e-7,
            &mut k,
            re.as_mut_ptr(),
            im.as_mut_ptr(),
            n,
        );
        assert_eq!(status, ChwStatus::Ok);
        assert_eq!((k.negative, k.zero), (1, 1));
        assert!(re.iter().filter(|&&x| x < 0.0).count() >= 1);
        assert!(im.iter().all(|&x| x == 0.0));

        let mut l_op = ChwEigenSummary::default();
        let status = chw_operator_spectrum(
            prof,
            ChwOperator::L,
            n,
            1e-7,
            &mut l_op,
            ptr::null_mut(),
            ptr::null_mut(),
            0,
        );
        assert_eq!(status, ChwStatus::Ok);
        assert_eq!((l_op.negative, l_op.zero), (1, 1));
        assert!(l_op.kernel_residual < 1e-7);

        let mut st = ChwSpectralStability::default();
        assert_eq!(chw_spectral_stability(prof, n, &mut st), ChwStatus::Ok);
        assert!(st.stable && st.spectra_agree && st.compared > 0);
        chw_profile_free(prof);
        chw_profile_free(ptr::null_mut());
    }
}

#[test]
fn stability_curve_handle() {
    unsafe {
        let mut curve = ptr::null_mut();
        assert_eq!(
            chw_stability_scan(std::f64::consts::PI, 2.0, 8, &mut curve),
            ChwStatus::Ok
        );
        let mut n = 0;
        chw_stability_curve_len(curve, &mut n);
        assert_eq!(n, 8);
        let mut stable = false;
        assert_eq!(
            chw_stability_curve_is_stable(curve, &mut stable),
            ChwStatus::Ok
        );
        assert!(stable);
        let mut s = ChwStabilitySample::default();
        for i in 0..n {
            assert_eq!(chw_stability_curve_sample(curve, i, &mut s), ChwStatus::Ok);
            assert!(s.det_p < 0.0);
            assert!(((s.det_p - s.det_p_closed_form) / s.det_p_closed_form).abs() < 1e-5);
        }
        assert_eq!(
            chw_stability_curve_sample(curve, n, &mut s),
            ChwStatus::IndexOutOfRange
        );
        chw_stability_curve_free(curve);
    }
}

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(String::from)
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    // Test builds only produce the rlib, so build the static library with
    // the profile that produced this test binary.
    let profile = if profile_dir.ends_with("release") {
        "release"
    } else {
        "test"
    };
    let built = Command::new(env!("CARGO"))
        .args([
            "build",
            "--quiet",
            "--lib",
            "-p",
            "chwave-ffi",
            "--profile",
            profile,
        ])
        .current_dir(&crate_dir)
        .status()
        .unwrap();
    assert!(built.success());
    let lib = profile_dir.join("libchwave_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
