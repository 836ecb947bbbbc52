use std::ffi::CStr;
use std::ptr;

use fdcert_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fdcert_last_error_message()) }.to_string_lossy().into_owned()
}

fn cz(phi: f64) -> *mut FdcertUnitary {
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { fdcert_unitary_cz_error(phi, &mut x) }, FdcertStatus::Ok);
    x
}

#[test]
fn cz_round_trip_through_the_abi() {
    let x = cz(0.3);
    let mut m = unsafe { std::mem::zeroed::<FdcertMoments>() };
    assert_eq!(unsafe { fdcert_moments(x, &mut m) }, FdcertStatus::Ok);
    let s2 = 0.15f64.sin().powi(2);
    assert!((m.fidelity - (1.0 - 0.6 * s2)).abs() < 1e-14);
    assert!((m.deviation - 0.2 * (17.0f64 / 7.0).sqrt() * s2).abs() < 1e-14);

    let mut entries = vec![0.0; 32];
    assert_eq!(unsafe { fdcert_unitary_copy_entries(x, entries.as_mut_ptr(), entries.len()) }, FdcertStatus::Ok);
    assert_eq!((entries[30], entries[31]), (0.3f64.cos(), 0.3f64.sin()));
    let mut y = ptr::null_mut();
    assert_eq!(unsafe { fdcert_unitary_from_interleaved(entries.as_ptr(), 4, &mut y) }, FdcertStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(fdcert_diamond_exact(x, &mut a), FdcertStatus::Ok);
        assert_eq!(fdcert_diamond_exact(y, &mut b), FdcertStatus::Ok);
        fdcert_unitary_free(x);
        fdcert_unitary_free(y);
    }
    assert_eq!(a, b);
    assert!((a - 0.15f64.sin()).abs() < 1e-14);
}

#[test]
fn certificates_match_the_library() {
    let x = cz(0.7);
    let mut c = unsafe { std::mem::zeroed::<FdcertCertificate>() };
    assert_eq!(unsafe { fdcert_certify_unitary(x, 1.0, &mut c) }, FdcertStatus::Ok);
    let lib = fdcert::certify_unitary(&fdcert::gates::build_cz_error(0.7), Some(1.0)).unwrap();
    assert_eq!(c.b_fd, lib.b_fd.unwrap());
    assert_eq!(c.b_ru, lib.b_ru.unwrap());
    assert_eq!(c.d_exact, lib.d_exact.unwrap());
    assert_eq!(c.flags, lib.flags.bits());
    assert_eq!(c.hybrid_source, FdcertBoundSource::Fd);

    assert_eq!(unsafe { fdcert_certify_moments(c.fidelity, c.deviation, 4, f64::NAN, &mut c) }, FdcertStatus::Ok);
    assert!(c.d_exact.is_nan() && c.b_ru.is_nan());
    let mut v = 0.0;
    assert_eq!(unsafe { fdcert_bound_fd(c.fidelity, c.deviation, 4, &mut v) }, FdcertStatus::Ok);
    assert_eq!(v, c.b_fd);
    assert_eq!(unsafe { fdcert_certified_overlap(c.fidelity, c.deviation, 4, &mut v) }, FdcertStatus::Ok);
    assert_eq!(v, c.c_value);

    assert_eq!(unsafe { fdcert_certify_moments(0.9, 0.02, 2, f64::NAN, &mut c) }, FdcertStatus::Ok);
    assert!(c.b_fd.is_nan());
    assert_eq!(c.flags & FDCERT_FLAG_LOW_DIMENSION, FDCERT_FLAG_LOW_DIMENSION);
    assert_eq!(c.hybrid_source, FdcertBoundSource::FidelityOnly);
    unsafe { fdcert_unitary_free(x) };
}

#[test]
fn flag_bits_match_the_library() {
    use fdcert::CertFlags;
    let pairs = [
        (FDCERT_FLAG_P2_CLAMPED, CertFlags::P2_CLAMPED),
        (FDCERT_FLAG_Q2_CLAMPED, CertFlags::Q2_CLAMPED),
        (FDCERT_FLAG_RADICAND_CLAMPED, CertFlags::RADICAND_CLAMPED),
        (FDCERT_FLAG_OVERLAP_CLAMPED, CertFlags::OVERLAP_CLAMPED),
        (FDCERT_FLAG_FIDELITY_ONLY_CLAMPED, CertFlags::FIDELITY_ONLY_CLAMPED),
        (FDCERT_FLAG_RU_CLAMPED, CertFlags::RU_CLAMPED),
        (FDCERT_FLAG_RU_RADICAND_CLAMPED, CertFlags::RU_RADICAND_CLAMPED),
        (FDCERT_FLAG_LOW_DIMENSION, CertFlags::LOW_DIMENSION),
        (FDCERT_FLAG_FD_LOOSER_THAN_FIDELITY_ONLY, CertFlags::FD_LOOSER_THAN_FIDELITY_ONLY),
        (FDCERT_FLAG_DEVIATION_TRUNCATED, CertFlags::DEVIATION_TRUNCATED),
        (FDCERT_FLAG_INFIDELITY_CLAMPED, CertFlags::INFIDELITY_CLAMPED),
    ];
    for (c, rust) in pairs {
        assert_eq!(c, rust.bits());
    }
    assert_eq!(pairs.iter().fold(0, |acc, (c, _)| acc | c), CertFlags::all().bits());
}

#[test]
fn model_constructors() {
    let mut x = ptr::null_mut();
    let mut dim = 0usize;
    unsafe {
        assert_eq!(fdcert_unitary_toffoli_error(0.01, &mut x), FdcertStatus::Ok);
        assert_eq!(fdcert_unitary_dim(x, &mut dim), FdcertStatus::Ok);
        assert_eq!(dim, 8);
        fdcert_unitary_free(x);
        assert_eq!(fdcert_unitary_qft_error(3, 0.01, &mut x), FdcertStatus::Ok);
        assert_eq!(fdcert_unitary_dim(x, &mut dim), FdcertStatus::Ok);
        assert_eq!(dim, 8);
        fdcert_unitary_free(x);
        x = ptr::null_mut();
        assert_eq!(fdcert_unitary_qft_error(11, 0.01, &mut x), FdcertStatus::InvalidArgument);
        assert!(x.is_null());
        assert!(last_error().contains("11"), "{}", last_error());
        assert_eq!(fdcert_unitary_cz_error(f64::NAN, &mut x), FdcertStatus::InvalidArgument);
    }
}

#[test]
fn witness_and_estimates() {
    let mut w = ptr::null_mut();
    unsafe {
        // Moments of a conjugate-pair spectrum admit a witness; CZ moments do not.
        let x = fdcert::UnitaryOperator::from_phases(&[0.2, -0.2, 0.05, -0.05]).unwrap();
        let m = fdcert::fd_from_unitary(&x);
        assert_eq!(fdcert_tightness_witness(m.fidelity, m.deviation, 4, &mut w), FdcertStatus::Ok);
        let (mut overlap, mut c) = (0.0, 0.0);
        assert_eq!(fdcert_min_overlap_exact(w, &mut overlap), FdcertStatus::Ok);
        assert_eq!(fdcert_certified_overlap(m.fidelity, m.deviation, 4, &mut c), FdcertStatus::Ok);
        assert!((overlap - c).abs() < 1e-9);
        fdcert_unitary_free(w);

        let mut cz_m = std::mem::zeroed::<FdcertMoments>();
        let x = cz(0.4);
        assert_eq!(fdcert_moments(x, &mut cz_m), FdcertStatus::Ok);
        w = ptr::null_mut();
        assert_eq!(fdcert_tightness_witness(cz_m.fidelity, cz_m.deviation, 4, &mut w), FdcertStatus::Inadmissible);
        assert!(w.is_null());

        let mut e1 = std::mem::zeroed::<FdcertEstimate>();
        let mut e2 = std::mem::zeroed::<FdcertEstimate>();
        assert_eq!(fdcert_estimate(x, 50, 20, 3, &mut e1), FdcertStatus::Ok);
        assert_eq!(fdcert_estimate(x, 50, 20, 3, &mut e2), FdcertStatus::Ok);
        assert_eq!(e1, e2);
        assert_eq!((e1.states, e1.shots, e1.seed), (50, 20, 3));
        assert_eq!(fdcert_estimate(x, 1, 20, 3, &mut e1), FdcertStatus::InvalidArgument);
        fdcert_unitary_free(x);
    }
}

#[test]
fn bad_inputs_are_reported() {
    unsafe {
        let mut x = ptr::null_mut();
        let not_unitary = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(fdcert_unitary_from_interleaved(not_unitary.as_ptr(), 2, &mut x), FdcertStatus::NotUnitary);
        assert!(x.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(fdcert_unitary_from_interleaved(ptr::null(), 2, &mut x), FdcertStatus::NullPointer);
        assert_eq!(fdcert_unitary_from_interleaved(not_unitary.as_ptr(), 0, &mut x), FdcertStatus::InvalidArgument);

        let mut v = 0.0;
        assert_eq!(fdcert_diamond_exact(ptr::null(), &mut v), FdcertStatus::NullPointer);
        let y = cz(0.1);
        assert_eq!(fdcert_diamond_exact(y, ptr::null_mut()), FdcertStatus::NullPointer);
        let mut small = [0.0; 4];
        assert_eq!(fdcert_unitary_copy_entries(y, small.as_mut_ptr(), 4), FdcertStatus::DimensionMismatch);
        assert_eq!(fdcert_bound_ru(0.01, 0.5, 4, &mut v), FdcertStatus::Inadmissible);
        assert_eq!(fdcert_bound_fidelity_only(0.01, 4, &mut v), FdcertStatus::Ok);
        assert_eq!(last_error(), "");
        fdcert_unitary_free(y);
        fdcert_unitary_free(ptr::null_mut());
    }
    let version = unsafe { CStr::from_ptr(fdcert_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
