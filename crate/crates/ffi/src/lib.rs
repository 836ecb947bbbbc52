//! C ABI for `fdcert`.
//!
//! Conventions:
//! * every fallible call returns an [`FdcertStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure;
//! * unitaries are opaque [`FdcertUnitary`] handles released with
//!   [`fdcert_unitary_free`];
//! * matrices cross the boundary as row-major interleaved `(re, im)` doubles;
//! * optional doubles are NaN when absent (input and output);
//! * the message for the last failure on the calling thread is available from
//!   [`fdcert_last_error_message`].
//!
//! Panics never cross the boundary; they surface as `FDCERT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fdcert::certify::{
    bound_fd, bound_fidelity_only, bound_ru, certified_overlap, certify_moments, certify_unitary,
    diamond_exact, min_overlap_exact, tightness_witness, BoundSource, CertificateBundle,
};
use fdcert::estimate::run_protocol;
use fdcert::gates::{build_cz_error, build_qft_pair, build_toffoli_pair, error_unitary};
use fdcert::moments::fd_from_unitary;
use fdcert::{ComplexSquareMatrix, Error, UnitaryOperator};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdcertStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotUnitary = 4,
    /// Eigensolver or other numerical breakdown.
    Numerical = 5,
    /// `(F, D)` admits no witness unitary.
    Inadmissible = 6,
    Unsupported = 7,
    Panic = 8,
}

/// Which bound the hybrid certificate selected.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdcertBoundSource {
    Ru = 0,
    Fd = 1,
    FidelityOnly = 2,
}

/// Certificate flag bits, as in [`FdcertCertificate::flags`].
pub const FDCERT_FLAG_P2_CLAMPED: u32 = 1 << 0;
pub const FDCERT_FLAG_Q2_CLAMPED: u32 = 1 << 1;
pub const FDCERT_FLAG_RADICAND_CLAMPED: u32 = 1 << 2;
pub const FDCERT_FLAG_OVERLAP_CLAMPED: u32 = 1 << 3;
pub const FDCERT_FLAG_FIDELITY_ONLY_CLAMPED: u32 = 1 << 4;
pub const FDCERT_FLAG_RU_CLAMPED: u32 = 1 << 5;
pub const FDCERT_FLAG_RU_RADICAND_CLAMPED: u32 = 1 << 6;
pub const FDCERT_FLAG_LOW_DIMENSION: u32 = 1 << 7;
pub const FDCERT_FLAG_FD_LOOSER_THAN_FIDELITY_ONLY: u32 = 1 << 8;
pub const FDCERT_FLAG_DEVIATION_TRUNCATED: u32 = 1 << 9;
pub const FDCERT_FLAG_INFIDELITY_CLAMPED: u32 = 1 << 10;

/// Opaque unitary error operator.
pub struct FdcertUnitary {
    inner: UnitaryOperator,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdcertMoments {
    pub dim: usize,
    pub fidelity: f64,
    pub deviation: f64,
    /// `1 - F`, computed without cancellation.
    pub infidelity: f64,
    pub second_moment: f64,
    /// `|tr X|^2`.
    pub p2: f64,
    /// `|tr X^2 + (tr X)^2|^2`.
    pub q2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdcertCertificate {
    pub dim: usize,
    pub fidelity: f64,
    pub deviation: f64,
    pub infidelity: f64,
    /// NaN unless certified from a unitary.
    pub d_exact: f64,
    pub b_fidelity_only: f64,
    /// NaN when no unitarity was supplied.
    pub b_ru: f64,
    /// NaN for `d < 4`.
    pub b_fd: f64,
    /// NaN for `d < 4`.
    pub c_value: f64,
    pub b_hybrid: f64,
    pub hybrid_source: FdcertBoundSource,
    pub flags: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdcertEstimate {
    pub states: usize,
    pub shots: u64,
    pub seed: u64,
    pub f_hat: f64,
    pub e2_hat: f64,
    pub f2_hat: f64,
    pub d2_hat: f64,
    pub d_hat: f64,
    pub truncated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FdcertStatus {
    match e {
        Error::DimensionMismatch { .. } => FdcertStatus::DimensionMismatch,
        Error::NotUnitary { .. } => FdcertStatus::NotUnitary,
        Error::Eigensolver { .. } => FdcertStatus::Numerical,
        Error::Inadmissible(_) => FdcertStatus::Inadmissible,
        Error::UnsupportedGate(_) => FdcertStatus::Unsupported,
        _ => FdcertStatus::InvalidArgument,
    }
}

fn fail(status: FdcertStatus, msg: &str) -> FdcertStatus {
    set_last_error(msg);
    status
}

struct Failure(FdcertStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `f`, maps library errors and panics to status codes, and writes the
/// value through `out` on success.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> FfiResult<T>) -> FdcertStatus {
    if out.is_null() {
        return fail(FdcertStatus::NullPointer, "output pointer is null");
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: `out` is non-null and the caller guarantees it is valid for writes.
            unsafe { out.write(v) };
            set_last_error("");
            FdcertStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => fail(status, &msg),
        Err(_) => fail(FdcertStatus::Panic, "internal panic"),
    }
}

/// SAFETY: a non-null `u` must come from this library and not be freed.
unsafe fn handle<'a>(u: *const FdcertUnitary) -> FfiResult<&'a UnitaryOperator> {
    u.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(FdcertStatus::NullPointer, "unitary handle is null".into()))
}

fn boxed(inner: UnitaryOperator) -> *mut FdcertUnitary {
    Box::into_raw(Box::new(FdcertUnitary { inner }))
}

fn nan_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn optional(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

fn certificate_of(b: &CertificateBundle) -> FdcertCertificate {
    FdcertCertificate {
        dim: b.dim,
        fidelity: b.fidelity,
        deviation: b.deviation,
        infidelity: b.infidelity,
        d_exact: nan_if_none(b.d_exact),
        b_fidelity_only: b.b_fidelity_only,
        b_ru: nan_if_none(b.b_ru),
        b_fd: nan_if_none(b.b_fd),
        c_value: nan_if_none(b.c_value),
        b_hybrid: b.b_hybrid,
        hybrid_source: match b.hybrid_source {
            BoundSource::Ru => FdcertBoundSource::Ru,
            BoundSource::Fd => FdcertBoundSource::Fd,
            BoundSource::FidelityOnly => FdcertBoundSource::FidelityOnly,
        },
        flags: b.flags.bits(),
    }
}

/// Message of the last failed call on this thread, or "" after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn fdcert_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fdcert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a unitary from `2 * dim * dim` row-major interleaved doubles.
///
/// # Safety
/// `entries` must point to `2 * dim * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_from_interleaved(
    entries: *const f64,
    dim: usize,
    out: *mut *mut FdcertUnitary,
) -> FdcertStatus {
    if entries.is_null() {
        return fail(FdcertStatus::NullPointer, "entries pointer is null");
    }
    guarded(out, || {
        let len = dim
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| Error::OutOfRange(format!("dimension {dim}")))?;
        let raw = std::slice::from_raw_parts(entries, len);
        let data = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        Ok(boxed(UnitaryOperator::new(ComplexSquareMatrix::new(dim, data)?)?))
    })
}

/// `diag(1, 1, 1, e^{i phi})`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_cz_error(phi: f64, out: *mut *mut FdcertUnitary) -> FdcertStatus {
    guarded(out, || {
        if !phi.is_finite() {
            return Err(Error::OutOfRange(format!("phase {phi}")).into());
        }
        Ok(boxed(build_cz_error(phi)))
    })
}

/// Error unitary of the over-rotated Clifford+T Toffoli.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_toffoli_error(epsilon: f64, out: *mut *mut FdcertUnitary) -> FdcertStatus {
    guarded(out, || {
        let (ideal, actual) = build_toffoli_pair(epsilon)?;
        Ok(boxed(error_unitary(&ideal, &actual)?))
    })
}

/// Error unitary of the over-rotated `n`-qubit QFT, `2 <= n <= 10`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_qft_error(
    qubits: usize,
    epsilon: f64,
    out: *mut *mut FdcertUnitary,
) -> FdcertStatus {
    guarded(out, || {
        let (ideal, actual) = build_qft_pair(qubits, epsilon)?;
        Ok(boxed(error_unitary(&ideal, &actual)?))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `u` must be null or a live handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_free(u: *mut FdcertUnitary) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_dim(u: *const FdcertUnitary, out: *mut usize) -> FdcertStatus {
    guarded(out, || Ok(handle(u)?.dim()))
}

/// Copies the entries as row-major interleaved doubles into `buffer`, which
/// must hold `len >= 2 * dim * dim` values.
///
/// # Safety
/// `u` must be a live handle; `buffer` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fdcert_unitary_copy_entries(
    u: *const FdcertUnitary,
    buffer: *mut f64,
    len: usize,
) -> FdcertStatus {
    if buffer.is_null() {
        return fail(FdcertStatus::NullPointer, "buffer pointer is null");
    }
    let mut written = 0usize;
    guarded(&mut written, || {
        let entries = handle(u)?.matrix().entries();
        if len < 2 * entries.len() {
            return Err(Error::DimensionMismatch { expected: 2 * entries.len(), actual: len }.into());
        }
        let dst = std::slice::from_raw_parts_mut(buffer, 2 * entries.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(entries) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(entries.len())
    })
}

/// Haar moments and trace invariants of `u`.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_moments(u: *const FdcertUnitary, out: *mut FdcertMoments) -> FdcertStatus {
    guarded(out, || {
        let m = fd_from_unitary(handle(u)?);
        Ok(FdcertMoments {
            dim: m.dim,
            fidelity: m.fidelity,
            deviation: m.deviation,
            infidelity: m.infidelity,
            second_moment: m.second_moment,
            p2: m.p2,
            q2: m.q2,
        })
    })
}

/// Minimum of `|<psi|X|psi>|` over pure states.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_min_overlap_exact(u: *const FdcertUnitary, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(min_overlap_exact(handle(u)?)?))
}

/// Exact diamond distance to the identity channel.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_diamond_exact(u: *const FdcertUnitary, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(diamond_exact(handle(u)?)?))
}

/// Every certificate for `u`; pass NaN as `unitarity` to omit the `(r, u)` bound.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_certify_unitary(
    u: *const FdcertUnitary,
    unitarity: f64,
    out: *mut FdcertCertificate,
) -> FdcertStatus {
    guarded(out, || Ok(certificate_of(&certify_unitary(handle(u)?, optional(unitarity))?)))
}

/// Certificates from `(F, D)` alone; `d_exact` is NaN.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_certify_moments(
    fidelity: f64,
    deviation: f64,
    dim: usize,
    unitarity: f64,
    out: *mut FdcertCertificate,
) -> FdcertStatus {
    guarded(out, || Ok(certificate_of(&certify_moments(fidelity, deviation, dim, optional(unitarity))?)))
}

/// `c(F, D)`, `d >= 4`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_certified_overlap(fidelity: f64, deviation: f64, dim: usize, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(certified_overlap(fidelity, deviation, dim)?))
}

/// `sqrt(1 - c(F, D)^2)`, `d >= 4`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_bound_fd(fidelity: f64, deviation: f64, dim: usize, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(bound_fd(fidelity, deviation, dim)?))
}

/// `min(1, sqrt(d(d+1) r))`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_bound_fidelity_only(infidelity: f64, dim: usize, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(bound_fidelity_only(infidelity, dim)?))
}

/// Bound from infidelity and unitarity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_bound_ru(infidelity: f64, unitarity: f64, dim: usize, out: *mut f64) -> FdcertStatus {
    guarded(out, || Ok(bound_ru(infidelity, unitarity, dim)?))
}

/// A unitary with moments `(F, D)` whose minimum overlap equals `c(F, D)`.
/// Fails with `FDCERT_STATUS_INADMISSIBLE` when no two-angle witness exists.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_tightness_witness(
    fidelity: f64,
    deviation: f64,
    dim: usize,
    out: *mut *mut FdcertUnitary,
) -> FdcertStatus {
    guarded(out, || Ok(boxed(tightness_witness(fidelity, deviation, dim)?)))
}

/// Simulates the sampling protocol on `u` and returns the unbiased estimates.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdcert_estimate(
    u: *const FdcertUnitary,
    states: usize,
    shots: u64,
    seed: u64,
    out: *mut FdcertEstimate,
) -> FdcertStatus {
    guarded(out, || {
        let r = run_protocol(handle(u)?, states, shots, seed)?;
        Ok(FdcertEstimate {
            states: r.states,
            shots: r.shots,
            seed,
            f_hat: r.f_hat,
            e2_hat: r.e2_hat,
            f2_hat: r.f2_hat,
            d2_hat: r.d2_hat,
            d_hat: r.d_hat,
            truncated: r.truncated,
        })
    })
}
