//! Worst-case certificates for a unitary error `X`.
//!
//! * exact: `d = sqrt(1 - m^2)` with `m` the distance from 0 to the spectral
//!   polygon of `X`;
//! * fidelity only: `sqrt(d(d+1) r)`;
//! * `(r, u)`: `d^2 c_d sqrt(u + 2dr/(d-1) - 1)`, `c_d = sqrt(1 - 1/d^2)/2`;
//! * `(F, D)`: `sqrt(1 - c^2)` with
//!   `c = [P/d - sqrt((d-2)(dQ + d^2 - (d+2)P^2))/(2d)]_+`;
//! * hybrid: the smaller of the `(r, u)` and `(F, D)` bounds.
//!
//! Every bound is clamped to `[0, 1]`; the unclamped value is kept where it
//! carries information.

use std::fmt;

use bitflags::bitflags;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{covering_arc_length, distance_origin_to_convex_hull, PlanarPoint};
use crate::linalg::{eigenvalues_unitary, ComplexSquareMatrix, UnitaryOperator};
use crate::moments::{fd_from_unitary, pq_from_infidelity, q0, MomentSummary};

/// Slack allowed on `r` and on bound radicands before they count as invalid.
pub const RADICAND_TOLERANCE: f64 = 1e-12;

/// Slack on the witness cosines before `(F, D)` is rejected as inadmissible.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

bitflags! {
    /// Warnings attached to a certificate. None of them invalidates the bounds.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct CertFlags: u32 {
        /// Reconstructed `P^2` fell outside `[0, d^2]`.
        const P2_CLAMPED = 1 << 0;
        /// Reconstructed `Q^2` fell outside `[0, (d + d^2)^2]`.
        const Q2_CLAMPED = 1 << 1;
        /// The radicand of `c(F, D)` was negative and set to 0.
        const RADICAND_CLAMPED = 1 << 2;
        /// `c(F, D)` fell outside `[0, 1]` before clamping.
        const OVERLAP_CLAMPED = 1 << 3;
        /// Fidelity-only bound exceeded 1.
        const FIDELITY_ONLY_CLAMPED = 1 << 4;
        /// `(r, u)` bound exceeded 1.
        const RU_CLAMPED = 1 << 5;
        /// Slightly negative `(r, u)` radicand set to 0.
        const RU_RADICAND_CLAMPED = 1 << 6;
        /// `d < 4`: no `(F, D)` certificate.
        const LOW_DIMENSION = 1 << 7;
        /// `(F, D)` bound came out looser than the fidelity-only bound.
        const FD_LOOSER_THAN_FIDELITY_ONLY = 1 << 8;
        /// Estimated `D^2` was negative and truncated to 0.
        const DEVIATION_TRUNCATED = 1 << 9;
        /// Slightly negative or above-one `r` clamped into `[0, 1]`.
        const INFIDELITY_CLAMPED = 1 << 10;
    }
}

impl CertFlags {
    /// `NAME|NAME` form, or `none`.
    pub fn to_names(&self) -> String {
        if self.is_empty() {
            return "none".into();
        }
        self.iter_names().map(|(name, _)| name).collect::<Vec<_>>().join("|")
    }
}

/// Which bound the hybrid certificate selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    Ru,
    Fd,
    /// Neither `(r, u)` nor `(F, D)` was available.
    FidelityOnly,
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundSource::Ru => "ru",
            BoundSource::Fd => "fd",
            BoundSource::FidelityOnly => "fidelity_only",
        })
    }
}

/// `m(X)`: minimum of `|<psi|X|psi>|` over pure states.
pub fn min_overlap_exact(x: &UnitaryOperator) -> Result<f64> {
    let points: Vec<PlanarPoint> = eigenvalues_unitary(x)?.into_iter().map(PlanarPoint::from).collect();
    Ok(distance_origin_to_convex_hull(&points)?.clamp(0.0, 1.0))
}

/// Exact diamond distance between the channel of `X` and the identity.
///
/// Equal to `sqrt(1 - m^2)`, evaluated as `sin(L/2)` from the shortest arc
/// `L` covering the eigenphases (1 when `L >= pi`), which stays accurate as
/// `m` approaches 1.
pub fn diamond_exact(x: &UnitaryOperator) -> Result<f64> {
    let angles: Vec<f64> = eigenvalues_unitary(x)?.iter().map(|z| z.arg()).collect();
    let arc = covering_arc_length(&angles)?;
    Ok(if arc < std::f64::consts::PI { (arc / 2.0).sin() } else { 1.0 })
}

fn check_dim(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::OutOfRange(format!("dimension {dim}")));
    }
    Ok(dim as f64)
}

fn check_infidelity(r: f64) -> Result<(f64, bool)> {
    if !r.is_finite() || !(-RADICAND_TOLERANCE..=1.0 + RADICAND_TOLERANCE).contains(&r) {
        return Err(Error::OutOfRange(format!("infidelity {r}")));
    }
    let clamped = r.clamp(0.0, 1.0);
    Ok((clamped, clamped != r))
}

/// `sqrt(d(d+1) r)` before clamping.
pub fn fidelity_only_raw(r: f64, dim: usize) -> Result<f64> {
    let d = check_dim(dim)?;
    let (r, _) = check_infidelity(r)?;
    Ok((q0(d) * r).sqrt())
}

/// `min(1, sqrt(d(d+1) r))`.
pub fn bound_fidelity_only(r: f64, dim: usize) -> Result<f64> {
    Ok(fidelity_only_raw(r, dim)?.min(1.0))
}

/// `d^2 c_d sqrt(u + 2dr/(d-1) - 1)` before clamping, and whether a small
/// negative radicand was zeroed.
pub fn ru_raw(r: f64, u: f64, dim: usize) -> Result<(f64, bool)> {
    let d = check_dim(dim)?;
    let (r, _) = check_infidelity(r)?;
    if !u.is_finite() {
        return Err(Error::OutOfRange(format!("unitarity {u}")));
    }
    let radicand = (u - 1.0) + 2.0 * d * r / (d - 1.0);
    if radicand < -RADICAND_TOLERANCE {
        return Err(Error::Inadmissible(format!(
            "(r, u) = ({r}, {u}) gives negative radicand {radicand:e}"
        )));
    }
    // d^2 c_d = (d/2) sqrt(d^2 - 1)
    Ok((0.5 * d * ((d * d - 1.0) * radicand.max(0.0)).sqrt(), radicand < 0.0))
}

/// `min(1, d^2 c_d sqrt(u + 2dr/(d-1) - 1))`.
pub fn bound_ru(r: f64, u: f64, dim: usize) -> Result<f64> {
    Ok(ru_raw(r, u, dim)?.0.min(1.0))
}

/// `c(F, D)` with the intermediate quantities needed by the witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapCertificate {
    pub dim: usize,
    /// `c`, clamped to `[0, 1]`.
    pub c: f64,
    /// `1 - c`, computed without cancellation when no clamping occurred.
    pub one_minus_c: f64,
    /// Unclamped `P/d - sqrt(radicand)/(2d)`.
    pub c_raw: f64,
    /// `P/d`.
    pub p_over_d: f64,
    /// `1 - P/d`.
    pub one_minus_p_over_d: f64,
    pub flags: CertFlags,
}

impl OverlapCertificate {
    /// `sqrt(1 - c^2)`.
    pub fn bound(&self) -> f64 {
        (self.one_minus_c * (1.0 + self.c)).sqrt().clamp(0.0, 1.0)
    }
}

/// `c(F, D)` for `d >= 4`.
pub fn certified_overlap(fidelity: f64, deviation: f64, dim: usize) -> Result<f64> {
    Ok(overlap_certificate(1.0 - fidelity, deviation, dim)?.c)
}

/// `sqrt(1 - c(F, D)^2)` for `d >= 4`.
pub fn bound_fd(fidelity: f64, deviation: f64, dim: usize) -> Result<f64> {
    Ok(overlap_certificate(1.0 - fidelity, deviation, dim)?.bound())
}

/// `c` from the infidelity `r = 1 - F` and `D`.
///
/// With `P^2 = d^2 (1 - (d+1) r/d)` and `Q^2 = q0^2 (1 - dq)`, `q0 = d(d+1)`,
/// the radicand factorizes as `(d-2) d (B - A dq/(1+s))/(1+s)` where
/// `A = (d+1)(d+2) r`, `B = (d+2)(d+3)(r^2 + D^2)`, `dq = (2A - B)/q0` and
/// `s = sqrt(1 - dq)`. Both `A dq` and `B` are second order in the error,
/// so near the identity nothing of order one is subtracted.
pub fn overlap_certificate(r: f64, deviation: f64, dim: usize) -> Result<OverlapCertificate> {
    if dim < 4 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if !r.is_finite() || !deviation.is_finite() || deviation < 0.0 {
        return Err(Error::OutOfRange(format!("(r, D) = ({r}, {deviation})")));
    }
    let d = dim as f64;
    let pq = pq_from_infidelity(r, deviation, dim);
    let mut flags = CertFlags::empty();
    if pq.p2_clamped() {
        flags |= CertFlags::P2_CLAMPED;
    }
    if pq.q2_clamped() {
        flags |= CertFlags::Q2_CLAMPED;
    }

    let (p_over_d, one_minus_p, sqrt_rad) = if flags.is_empty() && r >= 0.0 {
        let a = (d + 1.0) * (d + 2.0) * r;
        let b = (d + 2.0) * (d + 3.0) * (r * r + deviation * deviation);
        let dq = (2.0 * a - b) / q0(d);
        let s = (1.0 - dq).max(0.0).sqrt();
        let inner = (b - a * dq / (1.0 + s)) / (1.0 + s);
        let rad = (d - 2.0) * d * inner;
        if rad < -RADICAND_TOLERANCE {
            flags |= CertFlags::RADICAND_CLAMPED;
        }
        let pn = (1.0 - (d + 1.0) * r / d).max(0.0).sqrt();
        let one_minus_p = ((d + 1.0) * r / d) / (1.0 + pn);
        (pn, one_minus_p, rad.max(0.0).sqrt())
    } else {
        let p = pq.p2.sqrt();
        let q = pq.q2.sqrt();
        let rad = (d - 2.0) * (d * q + d * d - (d + 2.0) * pq.p2);
        if rad < -RADICAND_TOLERANCE {
            flags |= CertFlags::RADICAND_CLAMPED;
        }
        (p / d, 1.0 - p / d, rad.max(0.0).sqrt())
    };

    let c_raw = p_over_d - sqrt_rad / (2.0 * d);
    let (c, one_minus_c) = if c_raw < 0.0 {
        flags |= CertFlags::OVERLAP_CLAMPED;
        (0.0, 1.0)
    } else if c_raw > 1.0 {
        flags |= CertFlags::OVERLAP_CLAMPED;
        (1.0, 0.0)
    } else {
        (c_raw, (one_minus_p + sqrt_rad / (2.0 * d)).clamp(0.0, 1.0))
    };
    Ok(OverlapCertificate {
        dim,
        c,
        one_minus_c,
        c_raw,
        p_over_d,
        one_minus_p_over_d: one_minus_p,
        flags,
    })
}

/// Result of [`bound_hybrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridBound {
    pub value: f64,
    pub source: BoundSource,
}

/// The smaller of the available `(r, u)` and `(F, D)` bounds. Ties go to
/// `(F, D)`.
pub fn select_hybrid(b_ru: Option<f64>, b_fd: Option<f64>) -> Result<HybridBound> {
    match (b_ru, b_fd) {
        (Some(ru), Some(fd)) if ru < fd => Ok(HybridBound { value: ru, source: BoundSource::Ru }),
        (_, Some(fd)) => Ok(HybridBound { value: fd, source: BoundSource::Fd }),
        (Some(ru), None) => Ok(HybridBound { value: ru, source: BoundSource::Ru }),
        (None, None) => Err(Error::NoBoundInputs),
    }
}

/// Inputs to [`bound_hybrid`]; at least one pair must be present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridInputs {
    pub dim: usize,
    /// `(r, u)`.
    pub ru: Option<(f64, f64)>,
    /// `(F, D)`.
    pub fd: Option<(f64, f64)>,
}

pub fn bound_hybrid(inputs: &HybridInputs) -> Result<HybridBound> {
    let b_ru = inputs.ru.map(|(r, u)| bound_ru(r, u, inputs.dim)).transpose()?;
    let b_fd = inputs.fd.map(|(f, dev)| bound_fd(f, dev, inputs.dim)).transpose()?;
    select_hybrid(b_ru, b_fd)
}

/// `cos t + i sin t` given `cos t` and `1 - cos t`.
fn unit_from_cosine(cos: f64, one_minus_cos: f64) -> Complex64 {
    Complex64::new(cos, (one_minus_cos * (2.0 - one_minus_cos)).max(0.0).sqrt())
}

/// The two-angle diagonal unitary attaining `m(X) = c(F, D)`.
///
/// `(d-2)/2` conjugate pairs sit at `e^{±i alpha}` with
/// `cos alpha = (P - 2c)/(d-2)` and one pair at `e^{±i beta}`, `cos beta = c`.
/// It has the given `F`; it also has the given `D` when `c` was not clamped
/// at 0. Moments whose bulk cosine falls outside `[c, 1]` are rejected: no
/// such two-angle spectrum exists for them (this includes the CZ phase
/// error, whose moments give a bulk cosine above 1).
pub fn tightness_witness(fidelity: f64, deviation: f64, dim: usize) -> Result<UnitaryOperator> {
    tightness_witness_from_infidelity(1.0 - fidelity, deviation, dim)
}

pub fn tightness_witness_from_infidelity(r: f64, deviation: f64, dim: usize) -> Result<UnitaryOperator> {
    if dim < 4 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if dim % 2 != 0 {
        return Err(Error::Precondition(format!("tightness witness needs even dimension, got {dim}")));
    }
    let cert = overlap_certificate(r, deviation, dim)?;
    let d = dim as f64;
    let b = cert.c;
    let one_minus_b = cert.one_minus_c;
    let one_minus_a = (d * cert.one_minus_p_over_d - 2.0 * one_minus_b) / (d - 2.0);
    if !(-WITNESS_TOLERANCE..=2.0 + WITNESS_TOLERANCE).contains(&one_minus_a) {
        return Err(Error::Inadmissible(format!(
            "derived cosine {} lies outside [-1, 1]",
            1.0 - one_minus_a
        )));
    }
    let one_minus_a = one_minus_a.clamp(0.0, 2.0);
    if one_minus_a > one_minus_b + WITNESS_TOLERANCE {
        return Err(Error::Inadmissible(format!(
            "bulk cosine {} is below the extremal cosine {b}",
            1.0 - one_minus_a
        )));
    }
    let za = unit_from_cosine(1.0 - one_minus_a, one_minus_a);
    let zb = unit_from_cosine(b, one_minus_b);
    let mut diag = Vec::with_capacity(dim);
    for _ in 0..(dim - 2) / 2 {
        diag.push(za);
        diag.push(za.conj());
    }
    diag.push(zb);
    diag.push(zb.conj());
    UnitaryOperator::new(ComplexSquareMatrix::from_diagonal(&diag))
}

/// All certificates for one error, exact or moment-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateBundle {
    pub dim: usize,
    pub fidelity: f64,
    pub deviation: f64,
    pub infidelity: f64,
    /// Present only when the unitary itself was available.
    pub d_exact: Option<f64>,
    pub b_fidelity_only: f64,
    pub b_fidelity_only_raw: f64,
    pub unitarity: Option<f64>,
    pub b_ru: Option<f64>,
    pub b_ru_raw: Option<f64>,
    /// Absent for `d < 4`.
    pub b_fd: Option<f64>,
    pub c_value: Option<f64>,
    pub b_hybrid: f64,
    pub hybrid_source: BoundSource,
    pub flags: CertFlags,
}

/// Certificates from `(r, F, D)` alone. `r` is passed separately so callers
/// holding a cancellation-free `1 - F` keep its precision.
pub fn certify_moments_with_infidelity(
    r: f64,
    fidelity: f64,
    deviation: f64,
    dim: usize,
    unitarity: Option<f64>,
) -> Result<CertificateBundle> {
    let mut flags = CertFlags::empty();
    let (r_checked, r_clamped) = check_infidelity(r)?;
    if r_clamped {
        flags |= CertFlags::INFIDELITY_CLAMPED;
    }
    let fo_raw = fidelity_only_raw(r_checked, dim)?;
    if fo_raw > 1.0 {
        flags |= CertFlags::FIDELITY_ONLY_CLAMPED;
    }
    let b_fidelity_only = fo_raw.min(1.0);

    let (b_ru, b_ru_raw) = match unitarity {
        Some(u) => {
            let (raw, zeroed) = ru_raw(r_checked, u, dim)?;
            if zeroed {
                flags |= CertFlags::RU_RADICAND_CLAMPED;
            }
            if raw > 1.0 {
                flags |= CertFlags::RU_CLAMPED;
            }
            (Some(raw.min(1.0)), Some(raw))
        }
        None => (None, None),
    };

    let (b_fd, c_value) = if dim >= 4 {
        let cert = overlap_certificate(r_checked, deviation, dim)?;
        flags |= cert.flags;
        let b = cert.bound();
        if b > b_fidelity_only + RADICAND_TOLERANCE {
            flags |= CertFlags::FD_LOOSER_THAN_FIDELITY_ONLY;
        }
        (Some(b), Some(cert.c))
    } else {
        flags |= CertFlags::LOW_DIMENSION;
        (None, None)
    };

    let hybrid = select_hybrid(b_ru, b_fd).unwrap_or(HybridBound {
        value: b_fidelity_only,
        source: BoundSource::FidelityOnly,
    });

    Ok(CertificateBundle {
        dim,
        fidelity,
        deviation,
        infidelity: r_checked,
        d_exact: None,
        b_fidelity_only,
        b_fidelity_only_raw: fo_raw,
        unitarity,
        b_ru,
        b_ru_raw,
        b_fd,
        c_value,
        b_hybrid: hybrid.value,
        hybrid_source: hybrid.source,
        flags,
    })
}

/// Certificates from `(F, D)` alone; `d_exact` is absent.
pub fn certify_moments(
    fidelity: f64,
    deviation: f64,
    dim: usize,
    unitarity: Option<f64>,
) -> Result<CertificateBundle> {
    certify_moments_with_infidelity(1.0 - fidelity, fidelity, deviation, dim, unitarity)
}

/// Certificates from a moment summary computed from a known unitary.
pub fn certify_summary(summary: &MomentSummary, unitarity: Option<f64>) -> Result<CertificateBundle> {
    certify_moments_with_infidelity(
        summary.infidelity,
        summary.fidelity,
        summary.deviation,
        summary.dim,
        unitarity,
    )
}

/// Exact diamond distance plus every certificate for a unitary error.
pub fn certify_unitary(x: &UnitaryOperator, unitarity: Option<f64>) -> Result<CertificateBundle> {
    let summary = fd_from_unitary(x);
    let mut bundle = certify_summary(&summary, unitarity)?;
    bundle.d_exact = Some(diamond_exact(x)?);
    Ok(bundle)
}
