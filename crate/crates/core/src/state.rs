//! Dense state vectors and operators over a register of qubits.
//!
//! Basis convention: qubit 0 is the most significant bit of the basis index,
//! and bit value 0 stands for the `|+>` spin label, 1 for `|->`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par::{self, CompensatedSum, Execution};

pub type Amplitude = Complex64;

/// Default cap on the number of qubits in any dense register (2^26 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Allowed deviation of `||psi||^2` from 1 for a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Constructors silently renormalize inputs whose squared norm is this close to 1.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const UNITARY_TOLERANCE: f64 = 1e-10;

const ZERO: Amplitude = Complex64::new(0.0, 0.0);
const ONE: Amplitude = Complex64::new(1.0, 0.0);

pub(crate) fn check_qubits(what: &'static str, requested: usize, max: usize) -> Result<()> {
    if requested > max {
        return Err(Error::Capacity {
            what,
            requested,
            max,
        });
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

fn squared_norm(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).collect::<CompensatedSum>().value()
}

/// A normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Amplitude>,
    num_qubits: usize,
}

impl StateVector {
    /// Builds a state from raw amplitudes.
    ///
    /// The length must be a power of two. A squared norm within
    /// [`RENORMALIZE_TOLERANCE`] of 1 is rescaled to 1; anything further off is
    /// rejected.
    pub fn new(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::Validation(format!(
                "state length {} is not a power of two",
                amplitudes.len()
            ))
        })?;
        let norm2 = squared_norm(&amplitudes);
        if !norm2.is_finite() || (norm2 - 1.0).abs() >= RENORMALIZE_TOLERANCE {
            return Err(Error::Validation(format!(
                "squared norm {norm2} is not within {RENORMALIZE_TOLERANCE:e} of 1"
            )));
        }
        let mut amplitudes = amplitudes;
        if norm2 != 1.0 {
            let scale = norm2.sqrt().recip();
            for a in &mut amplitudes {
                *a *= scale;
            }
        }
        Ok(Self {
            amplitudes,
            num_qubits,
        })
    }

    /// Wraps amplitudes produced by a norm-preserving operation.
    pub(crate) fn from_unitary_image(amplitudes: Vec<Amplitude>) -> Self {
        let num_qubits = qubits_for_dim(amplitudes.len()).expect("power-of-two length");
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis state `|index>` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits("basis state", num_qubits, usize::BITS as usize - 2)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            amplitudes,
            num_qubits,
        })
    }

    /// `|0...0>`.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        squared_norm(&self.amplitudes)
    }

    /// Probability `|a_i|^2` of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.amplitudes.iter().map(|a| [a.re, a.im]))
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        StateVector::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(D::Error::custom)
    }
}

/// Tensor product of the factors under the default qubit cap.
pub fn tensor_product(factors: &[StateVector]) -> Result<StateVector> {
    tensor_product_capped(factors, DEFAULT_MAX_QUBITS)
}

/// Tensor product `f_0 (x) f_1 (x) ...`; factor 0 occupies the leading qubits.
///
/// An empty list yields the zero-qubit state `[1]`.
pub fn tensor_product_capped(factors: &[StateVector], max_qubits: usize) -> Result<StateVector> {
    let total: usize = factors.iter().map(StateVector::num_qubits).sum();
    check_qubits("tensor product", total, max_qubits)?;
    let mut amplitudes = vec![ONE];
    for f in factors {
        let prev = amplitudes;
        let fa = f.amplitudes();
        amplitudes = vec![ZERO; prev.len() * fa.len()];
        let width = fa.len();
        par::fill_indexed(&mut amplitudes, Execution::default(), |i| {
            prev[i / width] * fa[i % width]
        });
    }
    Ok(StateVector::from_unitary_image(amplitudes))
}

/// A Hermitian generator (`hbar = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Amplitude>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<Amplitude>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let d = matrix.nrows();
        for i in 0..d {
            for j in i..d {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOLERANCE {
                    return Err(Error::Validation(format!(
                        "operator is not Hermitian: entry ({i},{j}) deviates by {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        Self { matrix: d }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude> {
        &self.matrix
    }

    /// Real eigenvalues and the unitary whose columns are the eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Amplitude>) {
        let eig = self.matrix.clone().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    /// `exp(-i H t)` assembled from the eigendecomposition.
    pub fn propagator(&self, t: f64) -> UnitaryOperator {
        let (values, vectors) = self.eigen();
        let phases = nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        let matrix = &vectors * DMatrix::from_diagonal(&phases) * vectors.adjoint();
        UnitaryOperator { matrix }
    }
}

/// A unitary matrix acting on a register of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: DMatrix<Amplitude>,
}

impl UnitaryOperator {
    pub fn new(matrix: DMatrix<Amplitude>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let d = matrix.nrows();
        let gram = matrix.adjoint() * &matrix;
        let dev = (gram - DMatrix::<Amplitude>::identity(d, d)).camax();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::Validation(format!(
                "matrix is not unitary: max |U^dag U - I| = {dev:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[&[Amplitude]]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Shape {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Plain matrix-vector product; the input need not be normalized.
    pub fn apply_to(&self, v: &[Amplitude]) -> Result<Vec<Amplitude>> {
        if v.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let d = self.dim();
        let mut out = vec![ZERO; d];
        par::fill_indexed(&mut out, Execution::default(), |i| {
            (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum()
        });
        Ok(out)
    }
}

pub mod gates {
    //! Common fixed gates.
    use super::*;

    fn real(rows: &[[f64; 2]; 2]) -> UnitaryOperator {
        UnitaryOperator {
            matrix: DMatrix::from_fn(2, 2, |i, j| Complex64::new(rows[i][j], 0.0)),
        }
    }

    pub fn pauli_x() -> UnitaryOperator {
        real(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> UnitaryOperator {
        real(&[[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn hadamard() -> UnitaryOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        real(&[[s, s], [s, -s]])
    }

    /// `exp(-i angle Y / 2)`.
    pub fn ry(angle: f64) -> UnitaryOperator {
        let (s, c) = (angle / 2.0).sin_cos();
        real(&[[c, -s], [s, c]])
    }

    /// Applies `u` to the second qubit when the first is `|1>`.
    pub fn controlled(u: &UnitaryOperator) -> UnitaryOperator {
        two_branch(&UnitaryOperator::identity(2), u)
    }

    /// `|0><0| (x) on_zero + |1><1| (x) on_one`.
    pub fn two_branch(on_zero: &UnitaryOperator, on_one: &UnitaryOperator) -> UnitaryOperator {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(on_zero.matrix());
        m.view_mut((2, 2), (2, 2)).copy_from(on_one.matrix());
        UnitaryOperator { matrix: m }
    }

    pub fn cnot() -> UnitaryOperator {
        controlled(&pauli_x())
    }

    pub fn pauli_z_hamiltonian() -> HermitianOperator {
        HermitianOperator::diagonal(&[1.0, -1.0])
    }
}

/// `exp(-i H t) |psi>`.
pub fn evolve(state: &StateVector, h: &HermitianOperator, t: f64) -> Result<StateVector> {
    if h.dim() != state.dim() {
        return Err(Error::Shape {
            expected: state.dim(),
            found: h.dim(),
        });
    }
    let (values, vectors) = h.eigen();
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let mut coeffs = vectors.adjoint() * psi;
    for (c, &e) in coeffs.iter_mut().zip(&values) {
        *c *= Complex64::from_polar(1.0, -e * t);
    }
    let out = vectors * coeffs;
    Ok(StateVector::from_unitary_image(out.iter().copied().collect()))
}

/// `exp(+i H t) |psi>`, undoing [`evolve`] over the same interval.
pub fn evolve_reverse(state: &StateVector, h: &HermitianOperator, t: f64) -> Result<StateVector> {
    evolve(state, h, -t)
}

/// Applies `u` to `targets` (first target is the most significant bit of
/// `u`'s index) and the identity to every other qubit.
pub fn apply_unitary(
    state: &StateVector,
    u: &UnitaryOperator,
    targets: &[usize],
) -> Result<StateVector> {
    apply_unitary_with(state, u, targets, Execution::default())
}

pub fn apply_unitary_with(
    state: &StateVector,
    u: &UnitaryOperator,
    targets: &[usize],
    exec: Execution,
) -> Result<StateVector> {
    let n = state.num_qubits();
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::Index(format!(
                "target qubit {q} out of range for {n} qubits"
            )));
        }
        if targets[..i].contains(&q) {
            return Err(Error::Index(format!("target qubit {q} repeated")));
        }
    }
    if targets.len() >= usize::BITS as usize || u.dim() != 1usize << targets.len() {
        return Err(Error::Shape {
            expected: 1usize << targets.len().min(usize::BITS as usize - 1),
            found: u.dim(),
        });
    }
    // Bit position inside the basis index for each target, MSB-first order.
    let shifts: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let k = targets.len();
    let scatter = |sub: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .filter(|&(t, _)| (sub >> (k - 1 - t)) & 1 == 1)
            .map(|(_, &s)| 1usize << s)
            .sum()
    };
    let offsets: Vec<usize> = (0..u.dim()).map(scatter).collect();
    let input = state.amplitudes();
    let m = u.matrix();
    let mut out = vec![ZERO; state.dim()];
    par::fill_indexed(&mut out, exec, |i| {
        let row = shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((i >> s) & 1));
        let base = i & !mask;
        offsets
            .iter()
            .enumerate()
            .map(|(col, &off)| m[(row, col)] * input[base | off])
            .sum()
    });
    Ok(StateVector::from_unitary_image(out))
}

/// `<a|b> = sum conj(a_i) b_i`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    inner_product_raw(a.amplitudes(), b.amplitudes())
}

pub(crate) fn inner_product_raw(a: &[Amplitude], b: &[Amplitude]) -> Result<Amplitude> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (x, y) in a.iter().zip(b) {
        let z = x.conj() * y;
        re.add(z.re);
        im.add(z.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `|<a|b>|^2`, clamped to `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().clamp(0.0, 1.0))
}
