//! Measurement as unitary entanglement: spin/apparatus premeasurement, an
//! environment of pointer-record qubits, and reduced density matrices.
//!
//! Nothing here projects. Every step is a unitary acting on a larger register,
//! and outcome records are correlations between registers.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::CompensatedSum;
use crate::state::{
    self, apply_unitary, check_qubits, gates, tensor_product_capped, Amplitude, StateVector,
    DEFAULT_MAX_QUBITS, RENORMALIZE_TOLERANCE,
};

/// Default conditional kick angle for demonstrations.
pub const DEFAULT_KICK_ANGLE: f64 = FRAC_PI_2;

/// Single-spin preparation `c+ |+> + c- |->`.
///
/// Stored as the Born frequency `p = |c+|^2` plus one phase per amplitude, so
/// phase changes never perturb `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPreparation {
    p: f64,
    phase_plus: f64,
    phase_minus: f64,
}

impl SpinPreparation {
    /// From complex amplitudes. Squared norms within `1e-9` of 1 are
    /// renormalized, others rejected.
    pub fn new(c_plus: Amplitude, c_minus: Amplitude) -> Result<Self> {
        let (a, b) = (c_plus.norm_sqr(), c_minus.norm_sqr());
        let norm2 = a + b;
        if !norm2.is_finite() || (norm2 - 1.0).abs() >= RENORMALIZE_TOLERANCE {
            return Err(Error::Validation(format!(
                "|c+|^2 + |c-|^2 = {norm2} is not within {RENORMALIZE_TOLERANCE:e} of 1"
            )));
        }
        Ok(Self {
            p: (a / norm2).clamp(0.0, 1.0),
            phase_plus: c_plus.arg(),
            phase_minus: c_minus.arg(),
        })
    }

    /// From magnitudes and phases in radians.
    pub fn from_polar(mag_plus: f64, phase_plus: f64, mag_minus: f64, phase_minus: f64) -> Result<Self> {
        if mag_plus < 0.0 || mag_minus < 0.0 {
            return Err(Error::Validation("amplitude magnitudes must be non-negative".into()));
        }
        if !phase_plus.is_finite() || !phase_minus.is_finite() {
            return Err(Error::Validation("phases must be finite".into()));
        }
        let mut prep = Self::new(
            Complex64::new(mag_plus, 0.0),
            Complex64::new(mag_minus, 0.0),
        )?;
        prep.phase_plus = phase_plus;
        prep.phase_minus = phase_minus;
        Ok(prep)
    }

    /// Real non-negative amplitudes `(sqrt(p), sqrt(1 - p))`.
    pub fn from_probability(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("p = {p} is outside [0, 1]")));
        }
        Ok(Self {
            p,
            phase_plus: 0.0,
            phase_minus: 0.0,
        })
    }

    /// Multiplies `c+` by `exp(i phi_plus)` and `c-` by `exp(i phi_minus)`.
    pub fn with_phase_shift(self, phi_plus: f64, phi_minus: f64) -> Self {
        Self {
            phase_plus: self.phase_plus + phi_plus,
            phase_minus: self.phase_minus + phi_minus,
            ..self
        }
    }

    /// Born frequency of `+`.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn c_plus(&self) -> Amplitude {
        Complex64::from_polar(self.p.sqrt(), self.phase_plus)
    }

    pub fn c_minus(&self) -> Amplitude {
        Complex64::from_polar(self.q().sqrt(), self.phase_minus)
    }

    pub fn state(&self) -> StateVector {
        StateVector::new(vec![self.c_plus(), self.c_minus()]).expect("normalized by construction")
    }
}

/// Environment of `env_qubits` record qubits, each kicked by `+theta/2` or
/// `-theta/2` about y depending on the apparatus pointer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerModel {
    env_qubits: usize,
    kick_angle: f64,
}

impl PointerModel {
    pub fn new(env_qubits: usize, kick_angle: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&kick_angle) {
            return Err(Error::Validation(format!(
                "kick angle {kick_angle} is outside [0, pi]"
            )));
        }
        Ok(Self {
            env_qubits,
            kick_angle,
        })
    }

    pub fn env_qubits(&self) -> usize {
        self.env_qubits
    }

    pub fn kick_angle(&self) -> f64 {
        self.kick_angle
    }

    /// Overlap contributed by one environment qubit, `cos(theta/2)`.
    pub fn per_qubit_overlap(&self) -> f64 {
        // sin((pi - theta)/2) is exactly 0 at theta = pi and 1 at theta = 0
        ((std::f64::consts::PI - self.kick_angle) / 2.0).sin().abs()
    }
}

/// A one-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    entries: [[Amplitude; 2]; 2],
}

impl ReducedDensityMatrix {
    pub fn entries(&self) -> &[[Amplitude; 2]; 2] {
        &self.entries
    }

    /// The `<+|rho|->` coherence.
    pub fn off_diagonal(&self) -> Amplitude {
        self.entries[0][1]
    }

    pub fn trace(&self) -> Amplitude {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn hermiticity_error(&self) -> f64 {
        let e = &self.entries;
        [
            e[0][0].im.abs(),
            e[1][1].im.abs(),
            (e[0][1] - e[1][0].conj()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = &self.entries;
        let (a, d) = (e[0][0].re, e[1][1].re);
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + e[0][1].norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    pub fn purity(&self) -> f64 {
        let e = &self.entries;
        e[0][0].norm_sqr() + e[1][1].norm_sqr() + 2.0 * e[0][1].norm_sqr()
    }
}

/// One point of the environment-overlap curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPoint {
    pub n_env: usize,
    pub overlap: f64,
    pub log10_overlap: f64,
}

/// Apparatus qubit index in the premeasured pair.
const APPARATUS: usize = 1;

/// `c+ |+, M+> + c- |-, M->`: the spin (qubit 0) controls a flip of the
/// ready apparatus `|M> = |M+> = |0>` (qubit 1).
pub fn premeasure(prep: &SpinPreparation) -> StateVector {
    let ready = StateVector::zeros(1).expect("one qubit");
    let joint = state::tensor_product(&[prep.state(), ready]).expect("two qubits");
    apply_unitary(&joint, &gates::cnot(), &[0, 1]).expect("valid targets")
}

pub fn premeasure_n(preps: &[SpinPreparation]) -> Result<StateVector> {
    premeasure_n_capped(preps, DEFAULT_MAX_QUBITS)
}

/// `sum_m c_m |m> (x) |O_m>`: qubits `0..N` hold the spins, qubits `N..2N`
/// the observer record, which copies the outcome bit for bit.
pub fn premeasure_n_capped(preps: &[SpinPreparation], max_qubits: usize) -> Result<StateVector> {
    let n = preps.len();
    check_qubits("premeasurement register", 2 * n, max_qubits)?;
    let mut factors: Vec<StateVector> = preps.iter().map(SpinPreparation::state).collect();
    factors.push(StateVector::zeros(n)?);
    let mut psi = tensor_product_capped(&factors, max_qubits)?;
    let cnot = gates::cnot();
    for i in 0..n {
        psi = apply_unitary(&psi, &cnot, &[i, n + i])?;
    }
    Ok(psi)
}

pub fn entangle_environment(joint: &StateVector, model: &PointerModel) -> Result<StateVector> {
    entangle_environment_capped(joint, model, DEFAULT_MAX_QUBITS)
}

/// Appends `N_env` environment qubits in `|0>` and rotates each by `+theta/2`
/// (pointer `M+`) or `-theta/2` (pointer `M-`) about y.
pub fn entangle_environment_capped(
    joint: &StateVector,
    model: &PointerModel,
    max_qubits: usize,
) -> Result<StateVector> {
    if joint.num_qubits() != 2 {
        return Err(Error::Shape {
            expected: 4,
            found: joint.dim(),
        });
    }
    let total = 2 + model.env_qubits;
    check_qubits("environment register", total, max_qubits)?;
    let env = StateVector::zeros(model.env_qubits)?;
    let mut psi = tensor_product_capped(&[joint.clone(), env], max_qubits)?;
    let half = model.kick_angle / 2.0;
    let kick = gates::two_branch(&gates::ry(half), &gates::ry(-half));
    for j in 0..model.env_qubits {
        psi = apply_unitary(&psi, &kick, &[APPARATUS, 2 + j])?;
    }
    Ok(psi)
}

/// `|<E+|E->| = |cos(theta/2)|^N_env`.
pub fn branch_overlap(model: &PointerModel) -> f64 {
    model.per_qubit_overlap().powi(model.env_qubits as i32)
}

/// Closed-form overlap for `n_env = 0..=env_max`.
pub fn overlap_curve(kick_angle: f64, env_max: usize) -> Result<Vec<OverlapPoint>> {
    let per = PointerModel::new(0, kick_angle)?.per_qubit_overlap();
    let slope = per.log10();
    Ok((0..=env_max)
        .map(|n_env| OverlapPoint {
            n_env,
            overlap: per.powi(n_env as i32),
            log10_overlap: if n_env == 0 { 0.0 } else { n_env as f64 * slope },
        })
        .collect())
}

/// Normalized environment states recorded alongside `|+, M+>` and `|-, M->`
/// in a state produced by [`entangle_environment`].
pub fn environment_records(full: &StateVector, env_qubits: usize) -> Result<(StateVector, StateVector)> {
    if full.num_qubits() != 2 + env_qubits {
        return Err(Error::Shape {
            expected: 1usize << (2 + env_qubits),
            found: full.dim(),
        });
    }
    let width = 1usize << env_qubits;
    let slice = |prefix: usize| -> Result<StateVector> {
        let block = &full.amplitudes()[prefix * width..(prefix + 1) * width];
        let norm = block.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Validation(format!(
                "branch {prefix:02b} carries no amplitude"
            )));
        }
        StateVector::new(block.iter().map(|a| a / norm).collect())
    };
    Ok((slice(0b00)?, slice(0b11)?))
}

/// Partial trace over every qubit except `keep_qubit`.
pub fn reduce_to_system(full: &StateVector, keep_qubit: usize) -> Result<ReducedDensityMatrix> {
    let n = full.num_qubits();
    if keep_qubit >= n {
        return Err(Error::Index(format!(
            "qubit {keep_qubit} out of range for {n} qubits"
        )));
    }
    let bit = 1usize << (n - 1 - keep_qubit);
    let amps = full.amplitudes();
    let mut p0 = CompensatedSum::new();
    let mut p1 = CompensatedSum::new();
    let mut coh_re = CompensatedSum::new();
    let mut coh_im = CompensatedSum::new();
    for i in (0..full.dim()).filter(|i| i & bit == 0) {
        let (a0, a1) = (amps[i], amps[i | bit]);
        p0.add(a0.norm_sqr());
        p1.add(a1.norm_sqr());
        let z = a0 * a1.conj();
        coh_re.add(z.re);
        coh_im.add(z.im);
    }
    let coherence = Complex64::new(coh_re.value(), coh_im.value());
    let entries = [
        [Complex64::new(p0.value(), 0.0), coherence],
        [coherence.conj(), Complex64::new(p1.value(), 0.0)],
    ];
    Ok(ReducedDensityMatrix { entries })
}

/// Density matrix of the branch pair `{|+, M+>, |-, M->}` with the
/// environment traced out.
///
/// The pair is mapped onto the spin qubit by undoing the apparatus flip
/// (`|1, 1> -> |1, 0>`), then everything but qubit 0 is traced out. Its
/// off-diagonal is `c+ conj(c-) <E-|E+>`. A plain [`reduce_to_system`] on
/// qubit 0 has zero coherence whenever the apparatus records are orthogonal.
pub fn reduce_to_pointer_pair(full: &StateVector) -> Result<ReducedDensityMatrix> {
    if full.num_qubits() < 2 {
        return Err(Error::Shape {
            expected: 4,
            found: full.dim(),
        });
    }
    let unrecorded = apply_unitary(full, &gates::cnot(), &[0, APPARATUS])?;
    reduce_to_system(&unrecorded, 0)
}
