//! Parameter sweeps over the three error models and their CSV output.
//!
//! Numbers are written with `{:.16e}` (17 significant digits, so every
//! `f64` round-trips), `.` as decimal separator and `\n` line endings.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::certify::{certify_unitary, CertFlags};
use crate::error::{Error, Result};
use crate::estimate::{certify_from_estimates, run_protocol};
use crate::gates::{build_cz_error, build_qft_pair, build_toffoli_pair, error_unitary, CircuitSpec};
use crate::linalg::UnitaryOperator;
use crate::moments::fd_from_unitary;

/// Column header of sweep CSV files.
pub const SWEEP_HEADER: &str = "model,n,param,F,D,r,d_exact,b_fidelity_only,b_ru_at_u,b_fd,b_hybrid,flags";

/// Column header of estimate CSV files.
pub const ESTIMATE_HEADER: &str =
    "model,n,param,seed,samples,shots,F_hat,D_hat,D2_hat,truncated,b_fidelity_only,b_fd,flags";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `diag(1, 1, 1, e^{i phi})`; the parameter is `phi`.
    Cz,
    /// Clifford+T Toffoli with every primitive over-rotated by `eps`.
    Toffoli,
    /// `n`-qubit QFT with every primitive over-rotated by `eps`.
    Qft,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Cz => "cz",
            Model::Toffoli => "toffoli",
            Model::Qft => "qft",
        }
    }

    /// Qubit count of the model; `qft_qubits` is only consulted for QFT.
    pub fn qubits(&self, qft_qubits: Option<usize>) -> Result<usize> {
        match self {
            Model::Cz => Ok(2),
            Model::Toffoli => Ok(3),
            Model::Qft => {
                let n = qft_qubits.ok_or_else(|| Error::Precondition("the qft model needs a qubit count".into()))?;
                CircuitSpec::qft(n)?;
                Ok(n)
            }
        }
    }

    /// Error unitary `X` at parameter `param`.
    pub fn error_unitary(&self, param: f64, qubits: usize) -> Result<UnitaryOperator> {
        if !param.is_finite() {
            return Err(Error::OutOfRange(format!("parameter {param}")));
        }
        match self {
            Model::Cz => Ok(build_cz_error(param)),
            Model::Toffoli => {
                let (ideal, actual) = build_toffoli_pair(param)?;
                error_unitary(&ideal, &actual)
            }
            Model::Qft => {
                let (ideal, actual) = build_qft_pair(qubits, param)?;
                error_unitary(&ideal, &actual)
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cz" => Ok(Model::Cz),
            "toffoli" => Ok(Model::Toffoli),
            "qft" => Ok(Model::Qft),
            other => Err(Error::Precondition(format!("unknown model '{other}' (cz, toffoli, qft)"))),
        }
    }
}

/// `steps` points from `min` to `max` inclusive, linear or geometric.
pub fn parameter_grid(min: f64, max: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::OutOfRange(format!("step count {steps} (minimum 2)")));
    }
    if !min.is_finite() || !max.is_finite() || min >= max {
        return Err(Error::OutOfRange(format!("parameter range [{min}, {max}]")));
    }
    if log && min <= 0.0 {
        return Err(Error::OutOfRange(format!("log grid needs a positive minimum, got {min}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                return max;
            }
            let t = i as f64 / last;
            if log {
                min * (max / min).powf(t)
            } else {
                min + (max - min) * t
            }
        })
        .collect())
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: Model,
    pub n_qubits: usize,
    pub param: f64,
    pub fidelity: f64,
    pub deviation: f64,
    pub infidelity: f64,
    pub d_exact: f64,
    pub b_fidelity_only: f64,
    pub b_ru: f64,
    pub b_fd: f64,
    pub b_hybrid: f64,
    pub flags: CertFlags,
}

/// Evaluates every certificate for one model at one parameter value.
pub fn evaluate_point(model: Model, qubits: usize, param: f64, unitarity: f64) -> Result<SweepRecord> {
    let x = model.error_unitary(param, qubits)?;
    let bundle = certify_unitary(&x, Some(unitarity))?;
    let missing = |what: &str| Error::Precondition(format!("{what} missing for dimension {}", bundle.dim));
    Ok(SweepRecord {
        model,
        n_qubits: qubits,
        param,
        fidelity: bundle.fidelity,
        deviation: bundle.deviation,
        infidelity: bundle.infidelity,
        d_exact: bundle.d_exact.ok_or_else(|| missing("exact distance"))?,
        b_fidelity_only: bundle.b_fidelity_only,
        b_ru: bundle.b_ru.ok_or_else(|| missing("(r, u) bound"))?,
        b_fd: bundle.b_fd.ok_or_else(|| missing("(F, D) bound"))?,
        b_hybrid: bundle.b_hybrid,
        flags: bundle.flags,
    })
}

/// Evaluates a whole grid in parallel; rows come back in grid order.
pub fn run_sweep(model: Model, qubits: usize, grid: &[f64], unitarity: f64) -> Result<Vec<SweepRecord>> {
    grid.par_iter().map(|&p| evaluate_point(model, qubits, p, unitarity)).collect()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: Write>(out: &mut W, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.n_qubits,
            num(r.param),
            num(r.fidelity),
            num(r.deviation),
            num(r.infidelity),
            num(r.d_exact),
            num(r.b_fidelity_only),
            num(r.b_ru),
            num(r.b_fd),
            num(r.b_hybrid),
            r.flags.to_names()
        )?;
    }
    Ok(())
}

/// One simulated protocol run with its data-driven certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub model: Model,
    pub n_qubits: usize,
    pub param: f64,
    pub seed: u64,
    pub samples: usize,
    pub shots: u64,
    pub f_hat: f64,
    pub d_hat: f64,
    pub d2_hat: f64,
    pub truncated: bool,
    pub b_fidelity_only: f64,
    pub b_fd: f64,
    pub flags: CertFlags,
}

/// `repeats` protocol runs with seeds `seed, seed + 1, ...`, in seed order.
pub fn run_estimates(
    model: Model,
    qubits: usize,
    param: f64,
    samples: usize,
    shots: u64,
    seed: u64,
    repeats: usize,
) -> Result<Vec<EstimateRecord>> {
    if repeats < 1 {
        return Err(Error::OutOfRange("repeat count 0 (minimum 1)".into()));
    }
    let x = model.error_unitary(param, qubits)?;
    (0..repeats as u64)
        .into_par_iter()
        .map(|k| {
            let run_seed = seed.wrapping_add(k);
            let est = run_protocol(&x, samples, shots, run_seed)?;
            let bundle = certify_from_estimates(&est, x.dim(), None)?;
            Ok(EstimateRecord {
                model,
                n_qubits: qubits,
                param,
                seed: run_seed,
                samples,
                shots,
                f_hat: est.f_hat,
                d_hat: est.d_hat,
                d2_hat: est.d2_hat,
                truncated: est.truncated,
                b_fidelity_only: bundle.b_fidelity_only,
                b_fd: bundle.b_fd.unwrap_or(f64::NAN),
                flags: bundle.flags,
            })
        })
        .collect()
}

pub fn write_estimate_csv<W: Write>(out: &mut W, records: &[EstimateRecord]) -> std::io::Result<()> {
    writeln!(out, "{ESTIMATE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.n_qubits,
            num(r.param),
            r.seed,
            r.samples,
            r.shots,
            num(r.f_hat),
            num(r.d_hat),
            num(r.d2_hat),
            r.truncated,
            num(r.b_fidelity_only),
            num(r.b_fd),
            r.flags.to_names()
        )?;
    }
    Ok(())
}

/// Everything `moments` prints for one model point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub model: Model,
    pub n_qubits: usize,
    pub param: f64,
    pub dim: usize,
    pub fidelity: f64,
    pub deviation: f64,
    pub infidelity: f64,
    pub p2: f64,
    pub q2: f64,
    pub c_value: f64,
    pub d_exact: f64,
    pub b_fidelity_only: f64,
    pub b_ru: f64,
    pub b_fd: f64,
    pub b_hybrid: f64,
    pub flags: CertFlags,
}

pub const MOMENTS_HEADER: &str =
    "model,n,param,d,F,D,r,P2,Q2,c,d_exact,b_fidelity_only,b_ru_at_u,b_fd,b_hybrid,flags";

pub fn moment_report(model: Model, qubits: usize, param: f64, unitarity: f64) -> Result<MomentReport> {
    let x = model.error_unitary(param, qubits)?;
    let summary = fd_from_unitary(&x);
    let bundle = certify_unitary(&x, Some(unitarity))?;
    Ok(MomentReport {
        model,
        n_qubits: qubits,
        param,
        dim: x.dim(),
        fidelity: summary.fidelity,
        deviation: summary.deviation,
        infidelity: summary.infidelity,
        p2: summary.p2,
        q2: summary.q2,
        c_value: bundle.c_value.unwrap_or(f64::NAN),
        d_exact: bundle.d_exact.unwrap_or(f64::NAN),
        b_fidelity_only: bundle.b_fidelity_only,
        b_ru: bundle.b_ru.unwrap_or(f64::NAN),
        b_fd: bundle.b_fd.unwrap_or(f64::NAN),
        b_hybrid: bundle.b_hybrid,
        flags: bundle.flags,
    })
}

impl MomentReport {
    /// `key: value` lines for people.
    pub fn to_text(&self) -> String {
        let rows: [(&str, String); 16] = [
            ("model", self.model.to_string()),
            ("qubits", self.n_qubits.to_string()),
            ("param", num(self.param)),
            ("dimension", self.dim.to_string()),
            ("F", num(self.fidelity)),
            ("D", num(self.deviation)),
            ("r", num(self.infidelity)),
            ("P^2", num(self.p2)),
            ("Q^2", num(self.q2)),
            ("c(F,D)", num(self.c_value)),
            ("d_exact", num(self.d_exact)),
            ("b_fidelity_only", num(self.b_fidelity_only)),
            ("b_ru_at_u", num(self.b_ru)),
            ("b_fd", num(self.b_fd)),
            ("b_hybrid", num(self.b_hybrid)),
            ("flags", self.flags.to_names()),
        ];
        rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    /// Header plus one CSV row.
    pub fn to_csv(&self) -> String {
        let fields = [
            self.model.to_string(),
            self.n_qubits.to_string(),
            num(self.param),
            self.dim.to_string(),
            num(self.fidelity),
            num(self.deviation),
            num(self.infidelity),
            num(self.p2),
            num(self.q2),
            num(self.c_value),
            num(self.d_exact),
            num(self.b_fidelity_only),
            num(self.b_ru),
            num(self.b_fd),
            num(self.b_hybrid),
            self.flags.to_names(),
        ];
        format!("{MOMENTS_HEADER}\n{}\n", fields.join(","))
    }
}
