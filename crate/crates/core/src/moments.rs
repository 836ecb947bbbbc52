//! Haar moments of the survival fidelity `f_X(psi) = |<psi|X|psi>|^2`.
//!
//! For a unitary error `X` on dimension `d`, with `P = |tr X|` and
//! `Q = |tr X^2 + (tr X)^2|`:
//!
//! ```text
//! F  = (d + P^2) / (d(d+1))
//! E2 = D^2 + F^2 = (2d(d+3) + 4(d+2)P^2 + Q^2) / (d(d+1)(d+2)(d+3))
//! ```
//!
//! Near the identity both `1 - F` and `D^2 = E2 - F^2` are small differences
//! of O(1) numbers, so [`fd_from_unitary`] evaluates them from `E = X - I`
//! directly. [`fidelity_from_traces`] and [`second_moment_from_traces`] are
//! the plain formulas.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::estimate::sample_haar_state;
use crate::linalg::{trace, trace_of_square, UnitaryOperator};

/// Minimum sample count accepted by [`haar_mc_moments`].
pub const MC_MIN_SAMPLES: usize = 100;

const STATE_NORM_TOLERANCE: f64 = 1e-10;

/// First and second Haar moments of the survival fidelity, with the trace
/// invariants they were computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub dim: usize,
    /// Average fidelity `F`.
    pub fidelity: f64,
    /// Standard deviation `D` of the survival fidelity over Haar states.
    pub deviation: f64,
    /// `r = 1 - F`, computed without cancellation.
    pub infidelity: f64,
    /// `E2 = D^2 + F^2`.
    pub second_moment: f64,
    /// `|tr X|^2`.
    pub p2: f64,
    /// `|tr X^2 + (tr X)^2|^2`.
    pub q2: f64,
}

impl MomentSummary {
    /// Summary from `(F, D)` alone, with `P^2`, `Q^2` reconstructed (clamped).
    pub fn from_fd(fidelity: f64, deviation: f64, dim: usize) -> Self {
        let pq = pq_from_fd(fidelity, deviation, dim);
        Self {
            dim,
            fidelity,
            deviation,
            infidelity: 1.0 - fidelity,
            second_moment: deviation * deviation + fidelity * fidelity,
            p2: pq.p2,
            q2: pq.q2,
        }
    }
}

/// `d(d+1)`.
pub(crate) fn q0(d: f64) -> f64 {
    d * (d + 1.0)
}

/// `d(d+1)(d+2)(d+3)`.
pub(crate) fn n4(d: f64) -> f64 {
    d * (d + 1.0) * (d + 2.0) * (d + 3.0)
}

/// `F = (d + P^2)/(d(d+1))`.
pub fn fidelity_from_traces(p2: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (d + p2) / q0(d)
}

/// `E2 = (2d(d+3) + 4(d+2)P^2 + Q^2) / (d(d+1)(d+2)(d+3))`.
pub fn second_moment_from_traces(p2: f64, q2: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (2.0 * d * (d + 3.0) + 4.0 * (d + 2.0) * p2 + q2) / n4(d)
}

/// Trace of the projector onto the symmetric subspace of `(C^d)^{⊗k}`,
/// for the two orders the moment formulas need.
pub fn sym_projector_trace(dim: usize, order: usize) -> Result<f64> {
    let d = dim as f64;
    match order {
        2 => Ok(d * (d + 1.0) / 2.0),
        4 => Ok(n4(d) / 24.0),
        k => Err(Error::OutOfRange(format!("symmetric projector order {k} (only 2 and 4)"))),
    }
}

/// Closed-form `(F, D, E2)` of a unitary error.
pub fn fd_from_unitary(x: &UnitaryOperator) -> MomentSummary {
    let m = x.matrix();
    let dim = m.dim();
    let d = dim as f64;
    let e = |i: usize, j: usize| {
        let v = m[(i, j)];
        if i == j {
            v - 1.0
        } else {
            v
        }
    };

    // a = d - tr X, with Re a = ||E||^2 / 2 exactly for unitary X.
    let mut frob = 0.0;
    let mut herm = 0.0;
    let mut s2 = Complex64::new(0.0, 0.0);
    let mut im_trace = 0.0;
    for i in 0..dim {
        im_trace += m[(i, i)].im;
        for j in 0..dim {
            let eij = e(i, j);
            let eji = e(j, i);
            frob += eij.norm_sqr();
            herm += (eij + eji.conj()).norm_sqr();
            s2 += eij * eji;
        }
    }
    let x_re = 0.5 * frob;
    let a = Complex64::new(x_re, -im_trace);
    let u = s2 + a * a;

    let tr = trace(m);
    let p2 = tr.norm_sqr();
    let q2 = (trace_of_square(m) + tr * tr).norm_sqr();

    let infidelity = ((2.0 * d * x_re - a.norm_sqr()) / q0(d)).max(0.0);
    let fidelity = if infidelity > 0.5 {
        fidelity_from_traces(p2, dim)
    } else {
        1.0 - infidelity
    };
    let infidelity = if infidelity > 0.5 { 1.0 - fidelity } else { infidelity };

    // Far from the identity the E-based terms are O(1) while D^2 ~ 1/d^2,
    // so the plain trace form is the more accurate one there.
    let d2 = if infidelity > 0.5 {
        second_moment_from_traces(p2, q2, dim) - fidelity * fidelity
    } else {
        herm / ((d + 2.0) * (d + 3.0))
            + (4.0 * q0(d) * x_re * x_re - 4.0 * (d + 1.0) * (a * u.conj()).re + u.norm_sqr()) / n4(d)
            - infidelity * infidelity
    };
    let d2 = d2.max(0.0);
    let deviation = d2.sqrt();

    MomentSummary {
        dim,
        fidelity,
        deviation,
        infidelity,
        second_moment: d2 + fidelity * fidelity,
        p2,
        q2,
    }
}

/// Spectral invariants reconstructed from `(F, D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqReconstruction {
    /// `P^2` clamped to `[0, d^2]`.
    pub p2: f64,
    /// `Q^2` clamped to `[0, (d + d^2)^2]`.
    pub q2: f64,
    pub p2_raw: f64,
    pub q2_raw: f64,
    /// True for `d < 4`, where the reconstruction does not feed a certificate.
    pub low_dimension: bool,
}

impl PqReconstruction {
    pub fn p2_clamped(&self) -> bool {
        self.p2 != self.p2_raw
    }

    pub fn q2_clamped(&self) -> bool {
        self.q2 != self.q2_raw
    }
}

/// Inverts the moment formulas: `P^2 = d(d+1)F - d`,
/// `Q^2 = d(d+1)(d+2)(d+3)(D^2 + F^2) - 2d(d+3) - 4(d+2)P^2`.
///
/// Evaluated in `F` as written: the largest term is `O(d^4 F^2)`, so small
/// traces of far-from-identity errors keep their relative precision. The
/// `r`-based form cancels from `O(d^4)` and loses several digits there.
pub fn pq_from_fd(fidelity: f64, deviation: f64, dim: usize) -> PqReconstruction {
    let d = dim as f64;
    let q = q0(d);
    let p2_raw = q * fidelity - d;
    let q2_raw = n4(d) * (fidelity * fidelity + deviation * deviation)
        - 4.0 * (d + 2.0) * p2_raw
        - 2.0 * d * (d + 3.0);
    PqReconstruction {
        p2: p2_raw.clamp(0.0, d * d),
        q2: q2_raw.clamp(0.0, q * q),
        p2_raw,
        q2_raw,
        low_dimension: dim < 4,
    }
}

/// Same inversion in terms of `r = 1 - F`, for callers that hold `r` to
/// full relative precision.
pub(crate) fn pq_from_infidelity(r: f64, deviation: f64, dim: usize) -> PqReconstruction {
    let d = dim as f64;
    let q = q0(d);
    let p2_raw = d * d - q * r;
    let q2_raw = q * q - 2.0 * q * (d + 1.0) * (d + 2.0) * r + n4(d) * (r * r + deviation * deviation);
    PqReconstruction {
        p2: p2_raw.clamp(0.0, d * d),
        q2: q2_raw.clamp(0.0, q * q),
        p2_raw,
        q2_raw,
        low_dimension: dim < 4,
    }
}

/// `|<psi|X|psi>|^2` for a unit vector `psi`.
pub fn single_fidelity(x: &UnitaryOperator, psi: &[Complex64]) -> Result<f64> {
    let dim = x.dim();
    if psi.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: psi.len() });
    }
    let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm2.sqrt() - 1.0).abs() > STATE_NORM_TOLERANCE {
        return Err(Error::Precondition(format!("state norm {} is not 1", norm2.sqrt())));
    }
    Ok(overlap(x, psi).norm_sqr().min(1.0))
}

/// `<psi|X|psi>` without normalization checks.
pub(crate) fn overlap(x: &UnitaryOperator, psi: &[Complex64]) -> Complex64 {
    let m = x.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, pi) in psi.iter().enumerate() {
        let row: Complex64 = m.row(i).iter().zip(psi).map(|(a, b)| a * b).sum();
        acc += pi.conj() * row;
    }
    acc
}

/// Single-qubit relation `D = (1 - F)/sqrt(5)`.
pub fn d2_deviation(fidelity: f64) -> f64 {
    (1.0 - fidelity) / 5f64.sqrt()
}

/// Sample means of `f` and `f^2` over Haar-random states, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarMonteCarlo {
    pub fidelity: f64,
    pub second_moment: f64,
    pub stderr_fidelity: f64,
    pub stderr_second_moment: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of `F` and `E2` by direct state sampling.
pub fn haar_mc_moments(x: &UnitaryOperator, samples: usize, seed: u64) -> Result<HaarMonteCarlo> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::OutOfRange(format!("sample count {samples} (minimum {MC_MIN_SAMPLES})")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
    for _ in 0..samples {
        let psi = sample_haar_state(x.dim(), &mut rng)?;
        let f = overlap(x, &psi).norm_sqr().min(1.0);
        let f2 = f * f;
        s1 += f;
        s2 += f2;
        s4 += f2 * f2;
    }
    let n = samples as f64;
    let mean_f = s1 / n;
    let mean_f2 = s2 / n;
    let var_f = ((s2 - n * mean_f * mean_f) / (n - 1.0)).max(0.0);
    let var_f2 = ((s4 - n * mean_f2 * mean_f2) / (n - 1.0)).max(0.0);
    Ok(HaarMonteCarlo {
        fidelity: mean_f,
        second_moment: mean_f2,
        stderr_fidelity: (var_f / n).sqrt(),
        stderr_second_moment: (var_f2 / n).sqrt(),
        samples,
    })
}
