//! Cross-module self-checks behind `fdcert verify`.
//!
//! Every check compares a measured value against an independent expectation
//! and records the worst case. `Quick` runs reduced sample counts; `Full`
//! runs the 2000-seed protocol check and 10^5-sample Monte-Carlo moments.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::certify::{bound_fd, bound_fidelity_only, bound_ru, diamond_exact};
use crate::error::Result;
use crate::estimate::{run_protocol, ShotRecord};
use crate::gates::build_cz_error;
use crate::linalg::{haar_unitary, trace, trace_of_square, UnitaryOperator};
use crate::moments::{fd_from_unitary, haar_mc_moments, pq_from_fd};
use crate::sweep::{parameter_grid, run_sweep, Model};

/// `(phi, 1 - c, b_fd)` for the CZ error, from 60-digit arithmetic.
pub const CZ_CERTIFICATE_REFERENCE: [(f64, f64, f64); 5] = [
    (0.001, 2.020031752124705e-7, 0.0006356149067003213),
    (0.01, 2.0200314941600025e-5, 0.006356116883009335),
    (0.1, 0.0020200058352246839, 0.06352897958314005),
    (0.3, 0.018178274807680068, 0.1898054265303724),
    (1.2, 0.29059578536061175, 0.7048018588595469),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

/// Signature of the `(F, D)` bound under test.
pub type FdBoundFn = fn(f64, f64, usize) -> Result<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn within(name: &'static str, measured: f64, expected: f64, tolerance: f64, detail: String) -> Self {
        let passed = (measured - expected).abs() <= tolerance;
        Self { name, passed, measured, expected, tolerance, detail }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        Self { name, passed: false, measured: f64::NAN, expected: f64::NAN, tolerance: f64::NAN, detail }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.6e}, expected {:.6e}, tolerance {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

pub fn run_verify(level: VerifyLevel) -> VerifyReport {
    run_verify_with(level, bound_fd)
}

/// Same as [`run_verify`] with a substitute `(F, D)` bound, so a broken
/// implementation can be shown to fail.
pub fn run_verify_with(level: VerifyLevel, fd_bound: FdBoundFn) -> VerifyReport {
    let full = level == VerifyLevel::Full;
    let checks = vec![
        check_or_fail("cz closed forms", cz_closed_forms()),
        check_or_fail("cz certificate", cz_certificate(fd_bound)),
        check_or_fail("single-qubit reference", single_qubit_reference()),
        check_or_fail("d=2 collapse", d2_collapse(if full { 500 } else { 100 })),
        check_or_fail("trace reconstruction", trace_reconstruction(if full { 200 } else { 20 })),
        check_or_fail("u=1 collapse factor", unitarity_ratio()),
        check_or_fail("bound ordering", bound_ordering(full)),
        check_or_fail("exhaustive unbiasedness", exhaustive_unbiasedness()),
        check_or_fail("haar monte-carlo", haar_monte_carlo(full)),
        check_or_fail("protocol consistency", protocol_consistency(if full { 2000 } else { 200 })),
    ];
    VerifyReport { level, checks }
}

fn check_or_fail(name: &'static str, outcome: Result<CheckOutcome>) -> CheckOutcome {
    outcome.unwrap_or_else(|e| CheckOutcome::failed(name, format!("error: {e}")))
}

fn cz_closed_forms() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for phi in [0.01, 0.05, 0.1, 0.3, 0.7, 1.2, FRAC_PI_2, PI] {
        let s2 = (phi / 2.0).sin().powi(2);
        let m = fd_from_unitary(&build_cz_error(phi));
        worst = worst.max((m.fidelity - (1.0 - 0.6 * s2)).abs());
        worst = worst.max((m.deviation - 0.2 * (17.0f64 / 7.0).sqrt() * s2).abs());
    }
    Ok(CheckOutcome::within("cz closed forms", worst, 0.0, 1e-12, "max |error| in F and D".into()))
}

/// The certificate must match the high-precision reference and stay above
/// the exact distance. The gap to the exact distance is reported, not tested.
fn cz_certificate(fd_bound: FdBoundFn) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    let mut valid = true;
    let mut ratio = 0.0;
    for (phi, _, reference) in CZ_CERTIFICATE_REFERENCE {
        let x = build_cz_error(phi);
        let m = fd_from_unitary(&x);
        let b = fd_bound(m.fidelity, m.deviation, 4)?;
        let exact = diamond_exact(&x)?;
        worst = worst.max((b - reference).abs());
        valid &= b >= exact - 1e-12;
        if phi == 0.001 {
            ratio = b / exact;
        }
    }
    let mut out = CheckOutcome::within(
        "cz certificate",
        worst,
        0.0,
        1e-10,
        format!("valid: {valid}; b_fd/d_exact at phi=1e-3: {ratio:.4}"),
    );
    out.passed &= valid;
    Ok(out)
}

fn single_qubit_reference() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for delta in [0.01, 0.1, 0.5f64] {
        let x = UnitaryOperator::from_phases(&[-delta, delta])?;
        let m = fd_from_unitary(&x);
        worst = worst.max((m.infidelity - 2.0 / 3.0 * delta.sin().powi(2)).abs());
        worst = worst.max((diamond_exact(&x)? - delta.sin().abs()).abs());
    }
    Ok(CheckOutcome::within("single-qubit reference", worst, 0.0, 1e-12, "max |error| in r and d_exact".into()))
}

fn d2_collapse(count: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(0xd2);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let m = fd_from_unitary(&haar_unitary(2, &mut rng));
        worst = worst.max((m.deviation - m.infidelity / 5f64.sqrt()).abs());
    }
    Ok(CheckOutcome::within("d=2 collapse", worst, 0.0, 1e-12, format!("{count} Haar U(2) draws")))
}

fn trace_reconstruction(per_dim: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(0x1e44a2);
    let mut worst = 0.0f64;
    for dim in [4usize, 8, 16] {
        for _ in 0..per_dim {
            let x = haar_unitary(dim, &mut rng);
            let t = trace(x.matrix());
            let p2 = t.norm_sqr();
            let q2 = (trace_of_square(x.matrix()) + t * t).norm_sqr();
            let m = fd_from_unitary(&x);
            let pq = pq_from_fd(m.fidelity, m.deviation, dim);
            // Relative to the natural scales d^2 and q0^2 of the two traces.
            let q0 = (dim * (dim + 1)) as f64;
            worst = worst.max((pq.p2 - p2).abs() / p2.max((dim * dim) as f64));
            worst = worst.max((pq.q2 - q2).abs() / q2.max(q0 * q0));
        }
    }
    Ok(CheckOutcome::within(
        "trace reconstruction",
        worst,
        0.0,
        1e-9,
        format!("{per_dim} Haar draws at d=4, 8, 16"),
    ))
}

fn unitarity_ratio() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for dim in [2usize, 4, 8, 1024] {
        let d = dim as f64;
        // Below the clamp: b_ru < 1 needs r < 2/(d^3 (d+1)).
        let r = 0.5 / (d * d * d * (d + 1.0));
        let ratio = bound_ru(r, 1.0, dim)? / bound_fidelity_only(r, dim)?;
        worst = worst.max((ratio / (d / SQRT_2) - 1.0).abs());
    }
    Ok(CheckOutcome::within("u=1 collapse factor", worst, 0.0, 1e-12, "max relative error vs d/sqrt(2)".into()))
}

fn bound_ordering(full: bool) -> Result<CheckOutcome> {
    let steps = if full { 50 } else { 10 };
    let qft_steps = if full { 30 } else { 6 };
    let mut runs = vec![
        (Model::Cz, 2, parameter_grid(1e-3, PI, steps, false)?),
        (Model::Toffoli, 3, parameter_grid(1e-3, 0.5, steps, false)?),
    ];
    for n in 2..=4 {
        runs.push((Model::Qft, n, parameter_grid(1e-3, 0.3, qft_steps, false)?));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut rows = 0;
    for (model, n, grid) in runs {
        for r in run_sweep(model, n, &grid, 1.0)? {
            rows += 1;
            let excess = r.d_exact - r.b_fd.min(r.b_fidelity_only).min(r.b_ru);
            worst = worst.max(excess);
        }
    }
    let mut out = CheckOutcome::within(
        "bound ordering",
        worst,
        0.0,
        1e-9,
        format!("max d_exact - min bound over {rows} rows"),
    );
    out.passed = worst <= 1e-9;
    Ok(out)
}

fn exhaustive_unbiasedness() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for n in 2..=6u64 {
        for f in [0.0, 0.25, 0.5, 0.75, 1.0f64] {
            let (mut e1, mut e2) = (0.0, 0.0);
            for outcome in 0u32..(1 << n) {
                let k = outcome.count_ones() as u64;
                let w = f.powi(k as i32) * (1.0 - f).powi((n - k) as i32);
                let rec = ShotRecord::new(k, n)?;
                e1 += w * rec.f_hat();
                e2 += w * rec.f2_hat();
            }
            worst = worst.max((e1 - f).abs()).max((e2 - f * f).abs());
        }
    }
    Ok(CheckOutcome::within(
        "exhaustive unbiasedness",
        worst,
        0.0,
        1e-15,
        "all 2^N outcomes, N=2..6".into(),
    ))
}

fn haar_monte_carlo(full: bool) -> Result<CheckOutcome> {
    let (per_dim, samples) = if full { (7, 100_000) } else { (2, 20_000) };
    let mut rng = ChaCha20Rng::seed_from_u64(0x4aa2);
    let mut jobs = Vec::new();
    for dim in [2usize, 4, 8] {
        for _ in 0..per_dim {
            jobs.push(haar_unitary(dim, &mut rng));
        }
    }
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mc = haar_mc_moments(x, samples, 1000 + i as u64)?;
            let m = fd_from_unitary(x);
            Ok((
                (mc.fidelity - m.fidelity).abs() / mc.stderr_fidelity,
                (mc.second_moment - m.second_moment).abs() / mc.stderr_second_moment,
            ))
        })
        .collect();
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut comparisons = 0;
    for r in results {
        let (zf, ze) = r?;
        for z in [zf, ze] {
            comparisons += 1;
            worst = worst.max(z);
            if z.is_nan() || z > 5.0 {
                failures += 1;
            }
        }
    }
    let mut out = CheckOutcome::within(
        "haar monte-carlo",
        failures as f64,
        0.0,
        1.0,
        format!("{comparisons} comparisons at 5 sigma, {samples} samples, worst {worst:.2} sigma"),
    );
    out.passed = failures <= 1;
    Ok(out)
}

/// Seed statistics of the simulated protocol at CZ phi = 0.3, M = 100, N = 50.
fn protocol_consistency(seeds: u64) -> Result<CheckOutcome> {
    let (states, shots) = (100usize, 50u64);
    let x = build_cz_error(0.3);
    let m = fd_from_unitary(&x);
    let runs: Vec<_> = (0..seeds)
        .into_par_iter()
        .map(|s| run_protocol(&x, states, shots, s))
        .collect::<Result<_>>()?;
    let k = seeds as f64;
    let mean = |v: &dyn Fn(usize) -> f64| (0..runs.len()).map(v).sum::<f64>() / k;
    let f_mean = mean(&|i| runs[i].f_hat);
    let d2_mean = mean(&|i| runs[i].d2_hat);
    let f_var = (0..runs.len()).map(|i| (runs[i].f_hat - f_mean).powi(2)).sum::<f64>() / (k - 1.0);
    let d2_var = (0..runs.len()).map(|i| (runs[i].d2_hat - d2_mean).powi(2)).sum::<f64>() / (k - 1.0);
    let d2 = m.deviation * m.deviation;
    let z_f = (f_mean - m.fidelity).abs() / (f_var / k).sqrt();
    let z_d2 = (d2_mean - d2).abs() / (d2_var / k).sqrt();
    let predicted = d2 / states as f64 + (m.fidelity - m.second_moment) / (states as f64 * shots as f64);
    let var_ratio = f_var / predicted;
    let passed = z_f <= 4.0 && z_d2 <= 4.0 && (1.0 / 1.5..=1.5).contains(&var_ratio);
    Ok(CheckOutcome {
        name: "protocol consistency",
        passed,
        measured: var_ratio,
        expected: 1.0,
        tolerance: 0.5,
        detail: format!("{seeds} seeds; F mean off by {z_f:.2} SE, D^2 mean off by {z_d2:.2} SE; variance ratio within x1.5"),
    })
}
