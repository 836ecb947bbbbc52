//! Simulated survival-probability sampling and the unbiased `(F, D)`
//! estimators built on it.
//!
//! Each of `M` Haar-random states is run `N` times; `K_i` of the shots
//! survive. Per state `f_i = K_i/N` and `f2_i = K_i(K_i - 1)/(N(N - 1))` are
//! unbiased for `f` and `f^2`. The cross average
//! `((sum f_i)^2 - sum f_i^2)/(M(M - 1))` is unbiased for `F^2`, which makes
//! `D^2_hat = mean(f2_i) - F2_hat` unbiased for `D^2`.
//!
//! Randomness: state `i` uses its own ChaCha20 stream of the run seed, so
//! changing `M` leaves the draws for earlier states untouched.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::certify::{certify_moments, CertFlags, CertificateBundle};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, UnitaryOperator};
use crate::moments::overlap;

/// Outcome of running one input state `N` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    pass_count: u64,
    shots: u64,
    /// Exact survival probability; for white-box tests only, never serialized.
    pub(crate) true_f: f64,
}

impl ShotRecord {
    /// A record from measured counts (`true_f` unknown).
    pub fn new(pass_count: u64, shots: u64) -> Result<Self> {
        if shots < 2 {
            return Err(Error::OutOfRange(format!("shot count {shots} (minimum 2)")));
        }
        if pass_count > shots {
            return Err(Error::OutOfRange(format!("pass count {pass_count} exceeds {shots} shots")));
        }
        Ok(Self { pass_count, shots, true_f: f64::NAN })
    }

    pub fn pass_count(&self) -> u64 {
        self.pass_count
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// `K/N`.
    pub fn f_hat(&self) -> f64 {
        self.pass_count as f64 / self.shots as f64
    }

    /// `K(K-1)/(N(N-1))`.
    pub fn f2_hat(&self) -> f64 {
        let k = self.pass_count as f64;
        let n = self.shots as f64;
        k * (k - 1.0) / (n * (n - 1.0))
    }
}

/// Estimated moments from `M` shot records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub states: usize,
    pub shots: u64,
    /// Seed of the simulated run, if the records came from one.
    pub seed: Option<u64>,
    pub f_hat: f64,
    pub e2_hat: f64,
    /// Unbiased estimate of `F^2`.
    pub f2_hat: f64,
    pub d2_hat: f64,
    pub d_hat: f64,
    /// `d2_hat` was negative and `d_hat` was set to 0.
    pub truncated: bool,
}

/// Haar-random pure state: a normalized vector of standard complex Gaussians.
pub fn sample_haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if dim < 2 {
        return Err(Error::OutOfRange(format!("state dimension {dim}")));
    }
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(v)
}

/// Runs the sampling protocol on `x`: `states` random inputs, `shots`
/// binomial trials each.
pub fn simulate_protocol(x: &UnitaryOperator, states: usize, shots: u64, seed: u64) -> Result<Vec<ShotRecord>> {
    if states < 2 {
        return Err(Error::OutOfRange(format!("state count {states} (minimum 2)")));
    }
    if shots < 2 {
        return Err(Error::OutOfRange(format!("shot count {shots} (minimum 2)")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..states)
        .map(|i| {
            rng.set_stream(i as u64);
            rng.set_word_pos(0);
            let psi = sample_haar_state(x.dim(), &mut rng)?;
            let f = overlap(x, &psi).norm_sqr().clamp(0.0, 1.0);
            let binomial = Binomial::new(shots, f)
                .map_err(|e| Error::Precondition(format!("binomial({shots}, {f}): {e}")))?;
            Ok(ShotRecord { pass_count: binomial.sample(&mut rng), shots, true_f: f })
        })
        .collect()
}

/// `F_hat`, `E2_hat`, cross-averaged `F2_hat` and `D_hat` from shot records.
pub fn estimate_moments(records: &[ShotRecord]) -> Result<EstimationResult> {
    let m = records.len();
    if m < 2 {
        return Err(Error::OutOfRange(format!("state count {m} (minimum 2)")));
    }
    let shots = records[0].shots;
    if let Some(r) = records.iter().find(|r| r.shots != shots) {
        return Err(Error::Precondition(format!(
            "records mix shot counts {shots} and {}",
            r.shots
        )));
    }
    let mf = m as f64;
    let sum_f: f64 = records.iter().map(ShotRecord::f_hat).sum();
    let sum_f_sq: f64 = records.iter().map(|r| r.f_hat() * r.f_hat()).sum();
    let sum_f2: f64 = records.iter().map(ShotRecord::f2_hat).sum();

    let f_hat = sum_f / mf;
    let e2_hat = sum_f2 / mf;
    let f2_hat = (sum_f * sum_f - sum_f_sq) / (mf * (mf - 1.0));
    let d2_hat = e2_hat - f2_hat;
    Ok(EstimationResult {
        states: m,
        shots,
        seed: None,
        f_hat,
        e2_hat,
        f2_hat,
        d2_hat,
        d_hat: d2_hat.max(0.0).sqrt(),
        truncated: d2_hat < 0.0,
    })
}

/// [`simulate_protocol`] followed by [`estimate_moments`], with the seed recorded.
pub fn run_protocol(x: &UnitaryOperator, states: usize, shots: u64, seed: u64) -> Result<EstimationResult> {
    let records = simulate_protocol(x, states, shots, seed)?;
    Ok(EstimationResult { seed: Some(seed), ..estimate_moments(&records)? })
}

/// Certificates from estimated `(F_hat, D_hat)`; `d_exact` is absent.
pub fn certify_from_estimates(
    result: &EstimationResult,
    dim: usize,
    unitarity: Option<f64>,
) -> Result<CertificateBundle> {
    if dim < 4 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let mut bundle = certify_moments(result.f_hat, result.d_hat, dim, unitarity)?;
    if result.truncated {
        bundle.flags |= CertFlags::DEVIATION_TRUNCATED;
    }
    Ok(bundle)
}
