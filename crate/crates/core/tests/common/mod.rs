//! Independent oracles: dense Kronecker-product matrices and plain loops.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use synqc::compiler::{Angle, Gate};
use synqc::fvect::Tensor;
use synqc::ParameterStore;

pub type Mat = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n).map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn rz(t: f64) -> Mat {
    vec![vec![Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)], vec![c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)]]
}

pub fn rx(t: f64) -> Mat {
    let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
    vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
}

pub fn h() -> Mat {
    let r = 1.0 / 2f64.sqrt();
    vec![vec![c(r, 0.0), c(r, 0.0)], vec![c(r, 0.0), c(-r, 0.0)]]
}

/// `m` on qubit `q` of `n`; qubit 0 is the rightmost Kronecker factor.
pub fn embed(m: &Mat, q: usize, n: usize) -> Mat {
    let id2 = identity(2);
    let mut out = identity(1);
    for k in (0..n).rev() {
        out = kron(&out, if k == q { m } else { &id2 });
    }
    out
}

/// Permutation matrix of a classical bit map.
pub fn permutation(n: usize, f: impl Fn(usize) -> usize) -> Mat {
    let dim = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for x in 0..dim {
        m[f(x)][x] = c(1.0, 0.0);
    }
    m
}

pub fn gate_matrix(g: &Gate, n: usize, store: &ParameterStore) -> Option<Mat> {
    let angle = |a: &Angle| a.resolve(store).unwrap();
    Some(match g {
        Gate::Rz { qubit, angle: a } => embed(&rz(angle(a)), *qubit, n),
        Gate::Rx { qubit, angle: a } => embed(&rx(angle(a)), *qubit, n),
        Gate::H { qubit } => embed(&h(), *qubit, n),
        Gate::Cnot { control, target } => {
            let (cb, tb) = (*control, *target);
            permutation(n, move |x| if x >> cb & 1 == 1 { x ^ (1 << tb) } else { x })
        }
        Gate::Swap { a, b } => {
            let (a, b) = (*a, *b);
            permutation(n, move |x| {
                let (ba, bb) = (x >> a & 1, x >> b & 1);
                (x & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b)
            })
        }
        Gate::PrepZero { .. } | Gate::PostselectZero { .. } => return None,
    })
}

/// Product of the unitary gates, in application order.
pub fn dense_unitary(gates: &[Gate], n: usize, store: &ParameterStore) -> Mat {
    let mut u = identity(1 << n);
    for g in gates {
        if let Some(m) = gate_matrix(g, n, store) {
            u = matmul(&m, &u);
        }
    }
    u
}

/// First column of the unitary: the state prepared from |0…0⟩ when every
/// preparation sits at the start.
pub fn dense_state(gates: &[Gate], n: usize, store: &ParameterStore) -> Vec<Complex64> {
    dense_unitary(gates, n, store).iter().map(|row| row[0]).collect()
}

/// Row-major tensor with one axis of `2^w` per wire from a little-endian vector.
pub fn reshape_wires(v: &[Complex64], widths: &[usize]) -> Tensor {
    let shape: Vec<usize> = widths.iter().map(|w| 1 << w).collect();
    let total: usize = shape.iter().product();
    let mut data = Vec::with_capacity(total);
    for flat in 0..total {
        // decode row-major index
        let mut rem = flat;
        let mut idx = vec![0; shape.len()];
        for axis in (0..shape.len()).rev() {
            idx[axis] = rem % shape[axis];
            rem /= shape[axis];
        }
        let mut offset = 0;
        let mut little = 0;
        for (axis, w) in widths.iter().enumerate() {
            little |= idx[axis] << offset;
            offset += w;
        }
        data.push(v[little]);
    }
    Tensor::new(shape, data).unwrap()
}

pub fn random_tensor(rng: &mut impl Rng, shape: Vec<usize>) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::new(shape, (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Whether `a = e^{iφ} b` for some global phase, entrywise within `tol`.
pub fn equal_up_to_phase(a: &Mat, b: &Mat, tol: f64) -> bool {
    let flat_a: Vec<Complex64> = a.iter().flatten().copied().collect();
    let flat_b: Vec<Complex64> = b.iter().flatten().copied().collect();
    let k = flat_b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).unwrap().0;
    if flat_b[k].norm() == 0.0 {
        return false;
    }
    let phase = flat_a[k] / flat_b[k];
    (phase.norm() - 1.0).abs() < tol && flat_a.iter().zip(&flat_b).all(|(x, y)| (x - phase * y).norm() < tol)
}
