//! Gate zoo, coherent over-rotation models and the three benchmark circuits.
//!
//! Every primitive of a circuit shares one over-rotation parameter `epsilon`:
//!
//! * `T`, `T^dag`: `exp(-i epsilon Z/2) G`
//! * `H`: `exp(-i epsilon H/2) H`
//! * `CNOT`: `exp(-i epsilon |1><1| (x) X) CNOT`
//! * `CP(theta)`: `CP((1 + epsilon) theta)`

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, apply_embedded_left, exp_involutory, exp_projector_squared, kron, multiply,
    ComplexSquareMatrix, UnitaryOperator,
};

/// Largest register handled by [`build_qft_pair`].
pub const QFT_MAX_QUBITS: usize = 10;
pub const QFT_MIN_QUBITS: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    T,
    Tdag,
    /// First listed target is the control.
    Cnot,
    /// `diag(1, 1, 1, e^{i theta})`.
    Cp(f64),
    /// Two-qubit phase `diag(1, 1, 1, e^{i phi})`; no over-rotation model.
    CzPhase(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::T | GateKind::Tdag => 1,
            GateKind::Cnot | GateKind::Cp(_) | GateKind::CzPhase(_) => 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::H => write!(f, "H"),
            GateKind::T => write!(f, "T"),
            GateKind::Tdag => write!(f, "Tdag"),
            GateKind::Cnot => write!(f, "CNOT"),
            GateKind::Cp(t) => write!(f, "CP({t})"),
            GateKind::CzPhase(p) => write!(f, "CZ_phase({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    kind: GateKind,
    targets: Vec<usize>,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::Precondition(format!(
                "{kind} acts on {} qubits, got {} targets",
                kind.arity(),
                targets.len()
            )));
        }
        if let GateKind::Cp(a) | GateKind::CzPhase(a) = kind {
            if !a.is_finite() {
                return Err(Error::Precondition(format!("{kind} has a non-finite angle")));
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets[0]));
        }
        Ok(Self { kind, targets })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

/// Gates in application order: `gates[0]` acts first on the state.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    n: usize,
    gates: Vec<GateSpec>,
}

impl CircuitSpec {
    pub fn new(n: usize, gates: Vec<GateSpec>) -> Result<Self> {
        for g in &gates {
            if let Some(&q) = g.targets.iter().find(|&&q| q == 0 || q > n) {
                return Err(Error::QubitOutOfRange { index: q, qubits: n });
            }
        }
        Ok(Self { n, gates })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    /// Clifford+T Toffoli (controls 1, 2; target 3), 15 gates.
    pub fn toffoli() -> Self {
        use GateKind::*;
        // Operator product CNOT12 T2^dag T1 H3 CNOT12 T3 T2 CNOT13 T3^dag CNOT23
        // T3 CNOT13 T3^dag CNOT23 H3, listed right to left.
        let seq: [(GateKind, &[usize]); 15] = [
            (H, &[3]),
            (Cnot, &[2, 3]),
            (Tdag, &[3]),
            (Cnot, &[1, 3]),
            (T, &[3]),
            (Cnot, &[2, 3]),
            (Tdag, &[3]),
            (Cnot, &[1, 3]),
            (T, &[2]),
            (T, &[3]),
            (Cnot, &[1, 2]),
            (H, &[3]),
            (T, &[1]),
            (Tdag, &[2]),
            (Cnot, &[1, 2]),
        ];
        let gates = seq
            .iter()
            .map(|(k, t)| GateSpec::new(*k, t.to_vec()).expect("static gate list"))
            .collect();
        Self { n: 3, gates }
    }

    /// `n`-qubit QFT without the final bit-reversal swaps:
    /// `H_1, CP_{2,1}(pi/2), ..., CP_{n,1}(pi/2^{n-1}), H_2, CP_{3,2}(pi/2), ..., H_n`.
    pub fn qft(n: usize) -> Result<Self> {
        if !(QFT_MIN_QUBITS..=QFT_MAX_QUBITS).contains(&n) {
            return Err(Error::OutOfRange(format!(
                "QFT qubit count {n} (supported: {QFT_MIN_QUBITS}..={QFT_MAX_QUBITS})"
            )));
        }
        let mut gates = Vec::with_capacity(n * (n + 1) / 2);
        for j in 1..=n {
            gates.push(GateSpec::new(GateKind::H, vec![j])?);
            for k in (j + 1)..=n {
                let theta = PI / f64::powi(2.0, (k - j) as i32);
                gates.push(GateSpec::new(GateKind::Cp(theta), vec![k, j])?);
            }
        }
        Ok(Self { n, gates })
    }

    /// Circuit unitary; `None` for the ideal gates, `Some(eps)` for the
    /// over-rotated ones.
    pub fn unitary(&self, epsilon: Option<f64>) -> Result<ComplexSquareMatrix> {
        let mut acc = ComplexSquareMatrix::identity(1 << self.n);
        for g in &self.gates {
            let local = match epsilon {
                None => ideal_gate(g),
                Some(eps) => overrotated_gate(g, eps)?,
            };
            apply_embedded_left(&mut acc, &local, &g.targets, self.n)?;
        }
        Ok(acc)
    }

    /// `(ideal, implemented)` unitaries at over-rotation `epsilon`.
    pub fn unitary_pair(&self, epsilon: f64) -> Result<(UnitaryOperator, UnitaryOperator)> {
        let ideal = UnitaryOperator::new(self.unitary(None)?)?;
        let implemented = UnitaryOperator::new(self.unitary(Some(epsilon))?)?;
        Ok((ideal, implemented))
    }
}

pub fn pauli_x() -> ComplexSquareMatrix {
    ComplexSquareMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).expect("static")
}

pub fn pauli_z() -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_diagonal(&[ONE, -ONE])
}

pub fn hadamard() -> ComplexSquareMatrix {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ComplexSquareMatrix::new(2, vec![s, s, s, -s]).expect("static")
}

/// `|1><1|`.
pub fn projector_one() -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_diagonal(&[ZERO, ONE])
}

fn controlled_phase(theta: f64) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(theta)])
}

fn cnot() -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(4, |i, j| {
        let image = if i >= 2 { i ^ 1 } else { i };
        if image == j {
            ONE
        } else {
            ZERO
        }
    })
}

/// The 8x8 permutation swapping `|110>` and `|111>`.
pub fn toffoli_matrix() -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(8, |i, j| {
        let image = if i >= 6 { i ^ 1 } else { i };
        if image == j {
            ONE
        } else {
            ZERO
        }
    })
}

/// Textbook matrix of a gate on its `2^arity` local dimensions.
pub fn ideal_gate(spec: &GateSpec) -> ComplexSquareMatrix {
    match spec.kind {
        GateKind::H => hadamard(),
        GateKind::T => ComplexSquareMatrix::from_diagonal(&[ONE, Complex64::cis(PI / 4.0)]),
        GateKind::Tdag => ComplexSquareMatrix::from_diagonal(&[ONE, Complex64::cis(-PI / 4.0)]),
        GateKind::Cnot => cnot(),
        GateKind::Cp(theta) => controlled_phase(theta),
        GateKind::CzPhase(phi) => controlled_phase(phi),
    }
}

/// The coherently over-rotated version of a gate.
pub fn overrotated_gate(spec: &GateSpec, epsilon: f64) -> Result<ComplexSquareMatrix> {
    if !epsilon.is_finite() {
        return Err(Error::Precondition("over-rotation must be finite".into()));
    }
    let ideal = ideal_gate(spec);
    match spec.kind {
        GateKind::T | GateKind::Tdag => multiply(&exp_involutory(&pauli_z(), epsilon / 2.0)?, &ideal),
        GateKind::H => multiply(&exp_involutory(&hadamard(), epsilon / 2.0)?, &ideal),
        GateKind::Cnot => {
            let generator = kron(&projector_one(), &pauli_x());
            multiply(&exp_projector_squared(&generator, epsilon)?, &ideal)
        }
        GateKind::Cp(theta) => Ok(controlled_phase((1.0 + epsilon) * theta)),
        GateKind::CzPhase(_) => Err(Error::UnsupportedGate(spec.kind.to_string())),
    }
}

/// Error unitary of a miscalibrated two-qubit phase gate, `diag(1, 1, 1, e^{i phi_eps})`.
pub fn build_cz_error(phi_epsilon: f64) -> UnitaryOperator {
    UnitaryOperator::from_phases(&[0.0, 0.0, 0.0, phi_epsilon]).expect("diagonal phases are unitary")
}

pub fn build_toffoli_pair(epsilon: f64) -> Result<(UnitaryOperator, UnitaryOperator)> {
    CircuitSpec::toffoli().unitary_pair(epsilon)
}

pub fn build_qft_pair(n: usize, epsilon: f64) -> Result<(UnitaryOperator, UnitaryOperator)> {
    CircuitSpec::qft(n)?.unitary_pair(epsilon)
}

/// `X = ideal^dag implemented`.
pub fn error_unitary(ideal: &UnitaryOperator, implemented: &UnitaryOperator) -> Result<UnitaryOperator> {
    if ideal.dim() != implemented.dim() {
        return Err(Error::DimensionMismatch { expected: ideal.dim(), actual: implemented.dim() });
    }
    UnitaryOperator::new(multiply(&adjoint(ideal.matrix()), implemented.matrix())?)
}
