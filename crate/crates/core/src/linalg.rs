//! Dense complex matrices, unitary validation and spectra.
//!
//! Matrices are stored row-major. Large products and Hermitian
//! eigendecompositions go through `faer`; everything else is plain loops.
//!
//! Qubit convention for [`embed_gate`]: qubits are numbered from 1 and
//! qubit 1 is the most significant bit of the computational-basis index.

use std::ops::Index;

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Maximum `max|X^dag X - I|` accepted when constructing a [`UnitaryOperator`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Determinant-magnitude tolerance, only checked for `dim <= DET_CHECK_MAX_DIM`.
pub const DET_TOLERANCE: f64 = 1e-8;
pub const DET_CHECK_MAX_DIM: usize = 16;

/// Gap below which Hermitian-part eigenvalues are treated as one cluster.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

const GENERATOR_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense `d x d` complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexSquareMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![ONE; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = z;
        }
        m
    }

    /// Builds a matrix entrywise. Panics if `f` produces a non-finite value.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::new(dim, data).expect("from_fn produced an invalid matrix")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `self - I`.
    pub fn max_abs_diff_identity(&self) -> f64 {
        let d = self.dim;
        self.data
            .iter()
            .enumerate()
            .map(|(k, z)| if k / d == k % d { (z - ONE).norm() } else { z.norm() })
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|i| (i..d).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.data[i * self.dim + j])
    }

    pub(crate) fn from_faer(m: MatRef<'_, Complex64>) -> Self {
        let dim = m.nrows();
        Self { dim, data: (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect() }
    }
}

impl Index<(usize, usize)> for ComplexSquareMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of bounds");
        &self.data[i * self.dim + j]
    }
}

fn check_same_dim(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, actual: b.dim });
    }
    Ok(())
}

/// Matrix product `a * b`.
pub fn multiply(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    check_same_dim(a, b)?;
    let c = a.to_faer() * b.to_faer();
    Ok(ComplexSquareMatrix::from_faer(c.as_ref()))
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexSquareMatrix) -> ComplexSquareMatrix {
    let d = a.dim;
    let mut data = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            data[j * d + i] = a.data[i * d + j].conj();
        }
    }
    ComplexSquareMatrix { dim: d, data }
}

pub fn trace(a: &ComplexSquareMatrix) -> Complex64 {
    (0..a.dim).map(|i| a.data[i * a.dim + i]).sum()
}

/// `tr(A^2)` as `sum_ij A_ij A_ji`, without forming the product.
pub fn trace_of_square(a: &ComplexSquareMatrix) -> Complex64 {
    let d = a.dim;
    let mut acc = ZERO;
    for i in 0..d {
        acc += a.data[i * d + i] * a.data[i * d + i];
        for j in (i + 1)..d {
            acc += 2.0 * a.data[i * d + j] * a.data[j * d + i];
        }
    }
    acc
}

/// Tensor product; the left factor indexes the more significant block.
pub fn kron(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> ComplexSquareMatrix {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    ComplexSquareMatrix::from_fn(d, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Basis-index layout of a gate embedded on `targets` of an `n`-qubit register.
struct Embedding {
    /// Offsets (within a block) of the `2^k` local basis states.
    offsets: Vec<usize>,
    /// Indices with every target bit cleared.
    bases: Vec<usize>,
}

impl Embedding {
    fn new(gate_dim: usize, targets: &[usize], n: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Precondition("at least one target qubit is required".into()));
        }
        for (pos, &q) in targets.iter().enumerate() {
            if q == 0 || q > n {
                return Err(Error::QubitOutOfRange { index: q, qubits: n });
            }
            if targets[..pos].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        let k = targets.len();
        if gate_dim != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, actual: gate_dim });
        }
        let bit = |q: usize| 1usize << (n - q);
        let mask: usize = targets.iter().map(|&q| bit(q)).sum();
        let offsets = (0..1usize << k)
            .map(|s| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| s & (1 << (k - 1 - j)) != 0)
                    .map(|(_, &q)| bit(q))
                    .sum()
            })
            .collect();
        let bases = (0..1usize << n).filter(|r| r & mask == 0).collect();
        Ok(Self { offsets, bases })
    }
}

/// The `2^n x 2^n` operator acting as `gate` on `targets` (in listed order)
/// and as identity elsewhere.
pub fn embed_gate(
    gate: &ComplexSquareMatrix,
    targets: &[usize],
    n: usize,
) -> Result<ComplexSquareMatrix> {
    let emb = Embedding::new(gate.dim, targets, n)?;
    let d = 1usize << n;
    let mut out = ComplexSquareMatrix::zeros(d);
    for &base in &emb.bases {
        for (s, &rs) in emb.offsets.iter().enumerate() {
            for (t, &ct) in emb.offsets.iter().enumerate() {
                out.data[(base + rs) * d + base + ct] = gate[(s, t)];
            }
        }
    }
    Ok(out)
}

/// Replaces `m` with `embed_gate(gate, targets, n) * m` in `O(4^n 2^k)` time.
pub fn apply_embedded_left(
    m: &mut ComplexSquareMatrix,
    gate: &ComplexSquareMatrix,
    targets: &[usize],
    n: usize,
) -> Result<()> {
    let emb = Embedding::new(gate.dim, targets, n)?;
    let d = m.dim;
    if d != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, actual: d });
    }
    let g = emb.offsets.len();
    let mut scratch = vec![ZERO; g * d];
    for &base in &emb.bases {
        for (t, &off) in emb.offsets.iter().enumerate() {
            let row = (base + off) * d;
            scratch[t * d..(t + 1) * d].copy_from_slice(&m.data[row..row + d]);
        }
        for (s, &off) in emb.offsets.iter().enumerate() {
            let row = &mut m.data[(base + off) * d..(base + off + 1) * d];
            row.fill(ZERO);
            for t in 0..g {
                let coeff = gate[(s, t)];
                if coeff == ZERO {
                    continue;
                }
                for (dst, src) in row.iter_mut().zip(&scratch[t * d..(t + 1) * d]) {
                    *dst += coeff * src;
                }
            }
        }
    }
    Ok(())
}

/// `max |X^dag X - I|` over all entries.
pub fn unitarity_residual(x: &ComplexSquareMatrix) -> f64 {
    let f = x.to_faer();
    let gram = f.adjoint() * &f;
    let mut worst = 0.0f64;
    for j in 0..x.dim {
        for i in 0..x.dim {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// A matrix verified to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexSquareMatrix,
    unitarity_residual: f64,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if residual > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { residual });
        }
        if matrix.dim <= DET_CHECK_MAX_DIM {
            let det = matrix.to_faer().determinant().norm();
            if (det - 1.0).abs() > DET_TOLERANCE {
                return Err(Error::NotUnitary { residual: (det - 1.0).abs() });
            }
        }
        Ok(Self { matrix, unitarity_residual: residual })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexSquareMatrix::identity(dim), unitarity_residual: 0.0 }
    }

    /// Diagonal unitary with the given unit-modulus entries.
    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        let diag: Vec<_> = phases.iter().map(|&t| Complex64::cis(t)).collect();
        Self::new(ComplexSquareMatrix::from_diagonal(&diag))
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexSquareMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    /// `V X V^dag`.
    pub fn conjugate_by(&self, v: &UnitaryOperator) -> Result<Self> {
        let m = multiply(&multiply(v.matrix(), &self.matrix)?, &adjoint(v.matrix()))?;
        Self::new(m)
    }

    pub fn with_global_phase(&self, theta: f64) -> Result<Self> {
        Self::new(self.matrix.scale(Complex64::cis(theta)))
    }
}

/// All `d` eigenvalues of a unitary.
///
/// Diagonalizes the Hermitian part `(X + X^dag)/2`, then resolves each
/// degenerate cluster with the anti-Hermitian part `(X - X^dag)/2i`
/// restricted to it. Eigenvalues are read off as Rayleigh quotients of `X`
/// on the joint eigenbasis.
pub fn eigenvalues_unitary(u: &UnitaryOperator) -> Result<Vec<Complex64>> {
    let d = u.dim();
    let x = u.matrix.to_faer();
    let herm = Mat::from_fn(d, d, |i, j| (x[(i, j)] + x[(j, i)].conj()) * 0.5);
    let anti = Mat::from_fn(d, d, |i, j| {
        (x[(i, j)] - x[(j, i)].conj()) * Complex64::new(0.0, -0.5)
    });

    let evd = herm
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver { residual: f64::NAN })?;
    let cosines = evd.S().column_vector();
    let basis = evd.U();
    let mut joint = basis.to_owned();

    let mut start = 0;
    for j in 1..=d {
        if j < d && cosines[j].re - cosines[j - 1].re <= DEGENERACY_THRESHOLD {
            continue;
        }
        let len = j - start;
        if len > 1 {
            let block = basis.subcols(start, len);
            let restricted = block.adjoint() * &anti * block;
            let inner = restricted
                .self_adjoint_eigen(Side::Lower)
                .map_err(|_| Error::Eigensolver { residual: f64::NAN })?;
            let rotated = block * inner.U();
            joint.subcols_mut(start, len).copy_from(&rotated);
        }
        start = j;
    }

    let image = &x * &joint;
    let eigenvalues: Vec<Complex64> = (0..d)
        .map(|j| (0..d).map(|i| joint[(i, j)].conj() * image[(i, j)]).sum())
        .collect();

    let modulus_residual = eigenvalues.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let trace_residual = (eigenvalues.iter().sum::<Complex64>() - trace(&u.matrix)).norm();
    if modulus_residual > 1e-8 || trace_residual > 1e-8 * d as f64 {
        return Err(Error::Eigensolver { residual: modulus_residual.max(trace_residual) });
    }
    Ok(eigenvalues)
}

/// `exp(-i theta g) = cos(theta) I - i sin(theta) g` for Hermitian `g` with `g^2 = I`.
pub fn exp_involutory(g: &ComplexSquareMatrix, theta: f64) -> Result<ComplexSquareMatrix> {
    if !g.is_hermitian(GENERATOR_TOLERANCE) {
        return Err(Error::Precondition("generator is not Hermitian".into()));
    }
    if multiply(g, g)?.max_abs_diff_identity() > GENERATOR_TOLERANCE {
        return Err(Error::Precondition("generator does not square to the identity".into()));
    }
    let (s, c) = theta.sin_cos();
    Ok(ComplexSquareMatrix::from_fn(g.dim, |i, j| {
        let id = if i == j { c } else { 0.0 };
        Complex64::new(id, 0.0) + Complex64::new(0.0, -s) * g[(i, j)]
    }))
}

/// `exp(-i theta a) = I + (cos(theta) - 1) a^2 - i sin(theta) a` for Hermitian
/// `a` whose square is a projector.
pub fn exp_projector_squared(a: &ComplexSquareMatrix, theta: f64) -> Result<ComplexSquareMatrix> {
    if !a.is_hermitian(GENERATOR_TOLERANCE) {
        return Err(Error::Precondition("generator is not Hermitian".into()));
    }
    let sq = multiply(a, a)?;
    if multiply(&sq, &sq)?.max_abs_diff(&sq)? > GENERATOR_TOLERANCE {
        return Err(Error::Precondition("generator squared is not a projector".into()));
    }
    let (s, c) = theta.sin_cos();
    Ok(ComplexSquareMatrix::from_fn(a.dim, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        id + (c - 1.0) * sq[(i, j)] + Complex64::new(0.0, -s) * a[(i, j)]
    }))
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unitary: Gram-Schmidt (applied twice) on a complex Ginibre
/// matrix. Positive normalizations fix the column phases, so the result is
/// exactly Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    let mut cols: Vec<Vec<Complex64>> =
        (0..dim).map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect()).collect();
    for j in 0..dim {
        for _ in 0..2 {
            for k in 0..j {
                let overlap: Complex64 =
                    cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (dst, src) in rest[0].iter_mut().zip(&done[k]) {
                    *dst -= overlap * src;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let m = ComplexSquareMatrix::from_fn(dim, |i, j| cols[j][i]);
    UnitaryOperator::new(m).expect("Gram-Schmidt output is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> ComplexSquareMatrix {
        ComplexSquareMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    fn sigma_z() -> ComplexSquareMatrix {
        ComplexSquareMatrix::from_diagonal(&[ONE, -ONE])
    }

    fn proj1() -> ComplexSquareMatrix {
        ComplexSquareMatrix::from_diagonal(&[ZERO, ONE])
    }

    fn cnot() -> ComplexSquareMatrix {
        let mut d = vec![ZERO; 16];
        d[0] = ONE;
        d[5] = ONE;
        d[11] = ONE;
        d[14] = ONE;
        ComplexSquareMatrix::new(4, d).unwrap()
    }

    fn random_matrix(dim: usize, seed: u64) -> ComplexSquareMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        ComplexSquareMatrix::from_fn(dim, |_, _| complex_gaussian(&mut rng))
    }

    fn basis(d: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        v
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ComplexSquareMatrix::new(0, vec![]).is_err());
        assert!(ComplexSquareMatrix::new(2, vec![ONE; 3]).is_err());
        assert!(ComplexSquareMatrix::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        let not_unitary = ComplexSquareMatrix::from_diagonal(&[ONE, c(2.0, 0.0)]);
        assert!(matches!(UnitaryOperator::new(not_unitary), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn multiply_examples() {
        let i4 = ComplexSquareMatrix::identity(4);
        assert_eq!(multiply(&i4, &i4).unwrap(), i4);
        assert!(multiply(&sigma_x(), &sigma_x()).unwrap().max_abs_diff_identity() < 1e-15);
        let phi = 0.37;
        let p = ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(phi)]);
        let expect = ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(2.0 * phi)]);
        assert!(multiply(&p, &p).unwrap().max_abs_diff(&expect).unwrap() < 1e-15);
        assert!(matches!(
            multiply(&i4, &sigma_x()),
            Err(Error::DimensionMismatch { expected: 4, actual: 2 })
        ));
    }

    #[test]
    fn adjoint_examples() {
        let i3 = ComplexSquareMatrix::identity(3);
        assert_eq!(adjoint(&i3), i3);
        let phi = 1.1;
        let p = ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(phi)]);
        let expect = ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(-phi)]);
        assert!(adjoint(&p).max_abs_diff(&expect).unwrap() < 1e-15);
        let a = random_matrix(5, 3);
        assert_eq!(adjoint(&adjoint(&a)), a);
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace(&ComplexSquareMatrix::identity(6)), c(6.0, 0.0));
        let phi = 0.9;
        let p = ComplexSquareMatrix::from_diagonal(&[ONE, ONE, ONE, Complex64::cis(phi)]);
        assert!((trace(&p) - (3.0 + Complex64::cis(phi))).norm() < 1e-15);
        assert!((trace_of_square(&p) - (3.0 + Complex64::cis(2.0 * phi))).norm() < 1e-15);
        assert_eq!(trace(&sigma_z()), ZERO);
        assert_eq!(trace_of_square(&ComplexSquareMatrix::identity(5)), c(5.0, 0.0));
    }

    #[test]
    fn trace_of_square_matches_full_product() {
        for seed in 0..10 {
            let a = random_matrix(8, seed);
            let full = trace(&multiply(&a, &a).unwrap());
            assert!((trace_of_square(&a) - full).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_is_cyclic() {
        for seed in 0..10 {
            let a = random_matrix(8, 2 * seed);
            let b = random_matrix(8, 2 * seed + 1);
            let ab = trace(&multiply(&a, &b).unwrap());
            let ba = trace(&multiply(&b, &a).unwrap());
            assert!((ab - ba).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexSquareMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexSquareMatrix::identity(4));
        let k = kron(&proj1(), &sigma_x());
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i >= 2 && j >= 2 { sigma_x()[(i - 2, j - 2)] } else { ZERO };
                assert_eq!(k[(i, j)], expect);
            }
        }
        let zz = kron(&sigma_z(), &sigma_z());
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn embed_gate_basis_action() {
        assert_eq!(embed_gate(&sigma_x(), &[1], 1).unwrap(), sigma_x());
        let x2 = embed_gate(&sigma_x(), &[2], 2).unwrap();
        assert_eq!(x2.apply(&basis(4, 0b00)).unwrap(), basis(4, 0b01));

        // CNOT with control qubit 1, target qubit 2 on three qubits:
        // flip bit of qubit 2 iff qubit 1 is set.
        let cx = embed_gate(&cnot(), &[1, 2], 3).unwrap();
        for k in 0..8 {
            let expect = if k & 0b100 != 0 { k ^ 0b010 } else { k };
            assert_eq!(cx.apply(&basis(8, k)).unwrap(), basis(8, expect), "input {k:03b}");
        }
        assert_eq!(cx.apply(&basis(8, 0b110)).unwrap(), basis(8, 0b100));

        // Reversed target order swaps control and target.
        let xc = embed_gate(&cnot(), &[2, 1], 2).unwrap();
        assert_eq!(xc.apply(&basis(4, 0b01)).unwrap(), basis(4, 0b11));
    }

    #[test]
    fn embed_gate_errors() {
        assert!(matches!(
            embed_gate(&sigma_x(), &[3], 2),
            Err(Error::QubitOutOfRange { index: 3, qubits: 2 })
        ));
        assert!(matches!(embed_gate(&sigma_x(), &[0], 2), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(embed_gate(&cnot(), &[2, 2], 3), Err(Error::DuplicateTarget(2))));
        assert!(matches!(embed_gate(&cnot(), &[1], 3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let g = haar_unitary(2, &mut rng);
        let h = haar_unitary(2, &mut rng);
        for (k, m) in [(1, 2), (1, 3), (3, 2)] {
            let a = embed_gate(g.matrix(), &[k], 3).unwrap();
            let b = embed_gate(h.matrix(), &[m], 3).unwrap();
            let ab = multiply(&a, &b).unwrap();
            let ba = multiply(&b, &a).unwrap();
            assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
        }
    }

    #[test]
    fn apply_embedded_left_matches_dense_product() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let g2 = haar_unitary(4, &mut rng);
        let start = random_matrix(16, 9);
        for targets in [[1usize, 3], [4, 2], [2, 1]] {
            let dense = multiply(&embed_gate(g2.matrix(), &targets, 4).unwrap(), &start).unwrap();
            let mut fast = start.clone();
            apply_embedded_left(&mut fast, g2.matrix(), &targets, 4).unwrap();
            assert!(fast.max_abs_diff(&dense).unwrap() < 1e-13);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = eigenvalues_unitary(&UnitaryOperator::identity(4)).unwrap();
        assert!(ev.iter().all(|z| (z - ONE).norm() < 1e-14));

        let phi = 0.8;
        let x = UnitaryOperator::from_phases(&[0.0, 0.0, 0.0, phi]).unwrap();
        let mut ev = eigenvalues_unitary(&x).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        for (z, expect) in ev.iter().zip([ONE, ONE, ONE, Complex64::cis(phi)]) {
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_of_conjugate_pairs_are_resolved() {
        // e^{+ia} and e^{-ia} share a cosine; only the second stage separates them.
        let phases = [0.3, -0.3, 0.3, -0.3, 2.0, -2.0, 0.0, PI];
        let diag = UnitaryOperator::from_phases(&phases).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let v = haar_unitary(8, &mut rng);
        let x = diag.conjugate_by(&v).unwrap();
        let mut got: Vec<f64> = eigenvalues_unitary(&x).unwrap().iter().map(|z| z.arg()).collect();
        let mut want: Vec<f64> = phases.iter().map(|&t| Complex64::cis(t).arg()).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // -pi and pi are the same point; compare on the circle.
        for (g, w) in got.iter().zip(&want) {
            assert!((Complex64::cis(*g) - Complex64::cis(*w)).norm() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn eigenvalues_match_general_solver_on_haar_unitaries() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for d in [2, 5, 16, 64] {
            let u = haar_unitary(d, &mut rng);
            let ours = eigenvalues_unitary(&u).unwrap();
            let reference: Vec<Complex64> = u.matrix().to_faer().eigenvalues().unwrap();
            for z in &ours {
                assert!((z.norm() - 1.0).abs() < 1e-10);
                let nearest = reference.iter().map(|r| (r - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-9, "d={d}: {z} not in reference spectrum");
            }
            let sum: Complex64 = ours.iter().sum();
            assert!((sum - trace(u.matrix())).norm() < 1e-8 * d as f64);
            let prod: Complex64 = ours.iter().product();
            assert!((prod.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn exp_involutory_examples() {
        assert!(exp_involutory(&sigma_z(), 0.0).unwrap().max_abs_diff_identity() < 1e-16);
        let e = exp_involutory(&sigma_z(), PI / 2.0).unwrap();
        let expect = ComplexSquareMatrix::from_diagonal(&[c(0.0, -1.0), c(0.0, 1.0)]);
        assert!(e.max_abs_diff(&expect).unwrap() < 1e-15);
        for theta in [0.1, 0.7, -2.3] {
            let prod = multiply(
                &exp_involutory(&sigma_x(), theta).unwrap(),
                &exp_involutory(&sigma_x(), -theta).unwrap(),
            )
            .unwrap();
            assert!(prod.max_abs_diff_identity() < 1e-12);
        }
        let not_involutory = ComplexSquareMatrix::from_diagonal(&[ONE, c(2.0, 0.0)]);
        assert!(matches!(exp_involutory(&not_involutory, 0.1), Err(Error::Precondition(_))));
        let not_hermitian = ComplexSquareMatrix::from_diagonal(&[ONE, c(0.0, 1.0)]);
        assert!(matches!(exp_involutory(&not_hermitian, 0.1), Err(Error::Precondition(_))));
    }

    /// Truncated power series of exp(-i theta a); the oracle for the closed forms.
    fn expm_series(a: &ComplexSquareMatrix, theta: f64) -> ComplexSquareMatrix {
        let step = a.scale(c(0.0, -theta));
        let mut term = ComplexSquareMatrix::identity(a.dim());
        let mut sum = term.clone();
        for k in 1..60 {
            term = multiply(&term, &step).unwrap().scale(c(1.0 / k as f64, 0.0));
            sum = ComplexSquareMatrix::from_fn(a.dim(), |i, j| sum[(i, j)] + term[(i, j)]);
        }
        sum
    }

    #[test]
    fn exp_projector_squared_examples() {
        let gen = kron(&proj1(), &sigma_x());
        assert!(exp_projector_squared(&gen, 0.0).unwrap().max_abs_diff_identity() < 1e-16);
        for theta in [0.01, 0.5, 2.0] {
            let e = exp_projector_squared(&gen, theta).unwrap();
            assert!(e.max_abs_diff(&expm_series(&gen, theta)).unwrap() < 1e-13);
            let (s, co) = theta.sin_cos();
            // Upper-left block identity, lower-right block cos I - i sin X.
            assert_eq!(e[(0, 0)], ONE);
            assert_eq!(e[(1, 1)], ONE);
            assert_eq!(e[(0, 1)], ZERO);
            assert!((e[(2, 2)] - co).norm() < 1e-15);
            assert!((e[(2, 3)] - c(0.0, -s)).norm() < 1e-15);
            assert!(UnitaryOperator::new(e.clone()).unwrap().unitarity_residual() <= 1e-12);
        }
        assert!(matches!(exp_projector_squared(&sigma_x().scale(c(2.0, 0.0)), 0.3), Err(Error::Precondition(_))));
    }

    #[test]
    fn exp_involutory_matches_series() {
        let h = ComplexSquareMatrix::new(2, vec![ONE, ONE, ONE, -ONE])
            .unwrap()
            .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        for theta in [0.05, 1.3] {
            let e = exp_involutory(&h, theta).unwrap();
            assert!(e.max_abs_diff(&expm_series(&h, theta)).unwrap() < 1e-13);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for d in [1, 2, 7, 32] {
            let u = haar_unitary(d, &mut rng);
            assert!(u.unitarity_residual() < 1e-13);
        }
    }
}
