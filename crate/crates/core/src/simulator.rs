//! Dense statevector simulation with post-selection.
//!
//! Qubit 0 is the least significant bit of an amplitude index. Post-selection
//! projects onto |0⟩ and never renormalises.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compiler::{Circuit, Gate};
use crate::fvect::Tensor;
use crate::{Error, ParameterStore, Result};

pub const MAX_QUBITS: usize = 24;
pub const MAX_UNITARY_QUBITS: usize = 10;

/// Squared norms below this count as the zero vector.
pub const ZERO_NORM_SQR: f64 = 1e-30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

type Mat2 = [[Complex64; 2]; 2];

fn rz(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    [[Complex64::from_polar(1.0, -h), ZERO], [ZERO, Complex64::from_polar(1.0, h)]]
}

fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let (c, ms) = (Complex64::new(c, 0.0), Complex64::new(0.0, -s));
    [[c, ms], [ms, c]]
}

fn hadamard() -> Mat2 {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        s.amplitudes[0] = ZERO;
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1 << control, 1 << target);
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1 << a, 1 << b);
        for i in 0..self.amplitudes.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amplitudes.swap(i, (i & !ba) | bb);
            }
        }
    }

    fn postselect(&mut self, q: usize) {
        let bit = 1 << q;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = ZERO;
            }
        }
    }

    /// Applies one gate. Preparations are no-ops: a qubit is only prepared
    /// while it is |0⟩, either untouched or just post-selected.
    pub fn apply(&mut self, g: &Gate, store: &ParameterStore) -> Result<()> {
        match g {
            Gate::Rz { qubit, angle } => self.apply_1q(*qubit, &rz(angle.resolve(store)?)),
            Gate::Rx { qubit, angle } => self.apply_1q(*qubit, &rx(angle.resolve(store)?)),
            Gate::H { qubit } => self.apply_1q(*qubit, &hadamard()),
            Gate::Cnot { control, target } => self.apply_cnot(*control, *target),
            Gate::Swap { a, b } => self.apply_swap(*a, *b),
            Gate::PrepZero { .. } => {}
            Gate::PostselectZero { qubit } => self.postselect(*qubit),
        }
        Ok(())
    }
}

/// The post-selected output on the open qubits, scalar already applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeaningState {
    pub open_qubits: Vec<usize>,
    pub open_widths: Vec<usize>,
    #[serde(with = "complex_pairs")]
    pub amplitudes: Vec<Complex64>,
    pub scalar: f64,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl MeaningState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reshapes to one axis of size `2^w` per wire; within a wire the qubits
    /// are little-endian, and wire 0 owns the lowest qubits.
    pub fn to_tensor(&self, widths: &[usize]) -> Result<Tensor> {
        if widths.iter().sum::<usize>() != self.open_qubits.len() {
            return Err(Error::Shape(format!(
                "wire widths {widths:?} do not cover {} open qubits",
                self.open_qubits.len()
            )));
        }
        let shape: Vec<usize> = widths.iter().map(|w| 1usize << w).collect();
        let mut offsets = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for w in widths {
            offsets.push(acc);
            acc += w;
        }
        let mut data = Vec::with_capacity(self.amplitudes.len());
        let mut index = vec![0usize; shape.len()];
        for _ in 0..self.amplitudes.len() {
            let flat: usize = index.iter().zip(&offsets).map(|(i, o)| i << o).sum();
            data.push(self.amplitudes[flat]);
            for axis in (0..shape.len()).rev() {
                index[axis] += 1;
                if index[axis] < shape[axis] {
                    break;
                }
                index[axis] = 0;
            }
        }
        Tensor::new(shape, data)
    }

    pub fn tensor(&self) -> Result<Tensor> {
        self.to_tensor(&self.open_widths)
    }
}

/// Runs the circuit from |0…0⟩ and reads the amplitudes of the open qubits
/// with every other qubit at 0.
pub fn simulate(c: &Circuit, store: &ParameterStore) -> Result<MeaningState> {
    c.validate()?;
    let mut state = StateVector::zero(c.n_qubits)?;
    for g in &c.gates {
        state.apply(g, store)?;
    }
    let scalar = c.metadata.scalar;
    let amplitudes = (0..1usize << c.open_qubits.len())
        .map(|k| {
            let flat: usize = c.open_qubits.iter().enumerate().map(|(m, &q)| ((k >> m) & 1) << q).sum();
            state.amplitudes[flat] * scalar
        })
        .collect();
    Ok(MeaningState {
        open_qubits: c.open_qubits.clone(),
        open_widths: c.metadata.open_widths.clone(),
        amplitudes,
        scalar,
    })
}

/// The single amplitude of a fully post-selected circuit, scalar applied.
pub fn amplitude(c: &Circuit, store: &ParameterStore) -> Result<Complex64> {
    if !c.open_qubits.is_empty() {
        return Err(Error::OpenQubits(c.open_qubits.len()));
    }
    Ok(simulate(c, store)?.amplitudes[0])
}

/// `|⟨a,b⟩|² / (‖a‖²‖b‖²)` with the Hermitian inner product.
pub fn fidelity(a: &MeaningState, b: &MeaningState) -> Result<f64> {
    fidelity_of(&a.amplitudes, &b.amplitudes)
}

pub fn fidelity_of(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::OpenWireMismatch(a.len(), b.len()));
    }
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if na <= ZERO_NORM_SQR || nb <= ZERO_NORM_SQR {
        return Err(Error::ZeroVector(None));
    }
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok((inner.norm_sqr() / (na * nb)).min(1.0))
}

/// The `2^n × 2^n` matrix of the unitary gates, preparations and
/// post-selections skipped. Entry `[row, col]` is `⟨row|U|col⟩`.
pub fn circuit_unitary(c: &Circuit, store: &ParameterStore) -> Result<Tensor> {
    if c.n_qubits > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits(c.n_qubits));
    }
    let dim = 1usize << c.n_qubits;
    let mut data = vec![ZERO; dim * dim];
    for col in 0..dim {
        let mut s = StateVector::basis(c.n_qubits, col)?;
        for g in &c.gates {
            if !matches!(g, Gate::PrepZero { .. } | Gate::PostselectZero { .. }) {
                s.apply(g, store)?;
            }
        }
        for (row, a) in s.amplitudes.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Tensor::new(vec![dim, dim], data)
}
