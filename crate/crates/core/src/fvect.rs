//! Dense tensor semantics: the functor from pregroup types to vector spaces.
//!
//! Basic types map to spaces of configured dimension, cups to [`epsilon`],
//! caps to [`eta`], and a diagram evaluates to the contraction of its word
//! tensors along its wires. Real-valued models are embedded in complex tensors
//! so the same engine checks the circuits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, NodeKind, WireId};
use crate::pregroup::BasicType;
use crate::{Error, Result};

/// Absolute tolerance for comparing oracle values.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Dense complex tensor in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::Shape(format!("shape {shape:?} needs {len} entries, got {}", data.len())));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Shape("non-finite tensor entry".into()));
        }
        Ok(Self { shape, data })
    }

    pub fn from_real(shape: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(shape, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self { shape, data: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn scalar(value: Complex64) -> Self {
        Self { shape: vec![], data: vec![value] }
    }

    pub fn vector(data: Vec<Complex64>) -> Self {
        Self { shape: vec![data.len()], data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    fn strides(shape: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        strides
    }

    fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() {
            return Err(Error::Shape(format!("index of rank {} for tensor of rank {}", index.len(), self.rank())));
        }
        let mut off = 0;
        for ((&i, &d), s) in index.iter().zip(&self.shape).zip(Self::strides(&self.shape)) {
            if i >= d {
                return Err(Error::IndexOutOfRange { index: i, dim: d });
            }
            off += i * s;
        }
        Ok(off)
    }

    pub fn get(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.data[self.offset(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: Complex64) -> Result<()> {
        let off = self.offset(index)?;
        self.data[off] = value;
        Ok(())
    }

    /// Axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.rank()).collect::<Vec<_>>() {
            return Err(Error::Shape(format!("{perm:?} is not a permutation of {} axes", self.rank())));
        }
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let old_strides = Self::strides(&self.shape);
        let mut out = Tensor::zeros(shape.clone());
        for (flat, value) in out.data.iter_mut().enumerate() {
            let mut rem = flat;
            let mut src = 0;
            for (k, s) in Self::strides(&shape).iter().enumerate() {
                let i = rem / s;
                rem %= s;
                src += i * old_strides[perm[k]];
            }
            *value = self.data[src];
        }
        Ok(out)
    }

    pub fn reversed_axes(&self) -> Tensor {
        let perm: Vec<usize> = (0..self.rank()).rev().collect();
        self.permute(&perm).expect("reversal is a permutation")
    }

    pub fn reshape(&self, shape: Vec<usize>) -> Result<Tensor> {
        Tensor::new(shape, self.data.clone())
    }

    /// Sums over the paired axes; result axes are the remaining axes of
    /// `self` followed by the remaining axes of `other`.
    pub fn contract(&self, other: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
        for &(a, b) in pairs {
            if a >= self.rank() || b >= other.rank() || self.shape[a] != other.shape[b] {
                return Err(Error::Shape(format!("cannot contract axis {a} of {:?} with {b} of {:?}", self.shape, other.shape)));
            }
        }
        let free_a: Vec<usize> = (0..self.rank()).filter(|k| !pairs.iter().any(|p| p.0 == *k)).collect();
        let free_b: Vec<usize> = (0..other.rank()).filter(|k| !pairs.iter().any(|p| p.1 == *k)).collect();
        let sum_shape: Vec<usize> = pairs.iter().map(|p| self.shape[p.0]).collect();
        let shape: Vec<usize> =
            free_a.iter().map(|&k| self.shape[k]).chain(free_b.iter().map(|&k| other.shape[k])).collect();
        let sa = Self::strides(&self.shape);
        let sb = Self::strides(&other.shape);
        let out_strides = Self::strides(&shape);
        let sum_strides = Self::strides(&sum_shape);
        let n_sum: usize = sum_shape.iter().product();
        let mut out = Tensor::zeros(shape.clone());
        for (flat, value) in out.data.iter_mut().enumerate() {
            let mut base_a = 0;
            let mut base_b = 0;
            let mut rem = flat;
            for (k, s) in out_strides.iter().enumerate() {
                let i = rem / s;
                rem %= s;
                if k < free_a.len() {
                    base_a += i * sa[free_a[k]];
                } else {
                    base_b += i * sb[free_b[k - free_a.len()]];
                }
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n_sum {
                let (mut oa, mut ob, mut rem) = (base_a, base_b, m);
                for (k, s) in sum_strides.iter().enumerate() {
                    let i = rem / s;
                    rem %= s;
                    oa += i * sa[pairs[k].0];
                    ob += i * sb[pairs[k].1];
                }
                acc += self.data[oa] * other.data[ob];
            }
            *value = acc;
        }
        Ok(out)
    }

    pub fn outer(&self, other: &Tensor) -> Tensor {
        self.contract(other, &[]).expect("outer product has no paired axes")
    }

    pub fn hadamard(&self, other: &Tensor) -> Result<Tensor> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!("pointwise product of {:?} and {:?}", self.shape, other.shape)));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(Tensor { shape: self.shape.clone(), data })
    }

    pub fn scale(&self, factor: Complex64) -> Tensor {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|x| x * factor).collect() }
    }

    /// Largest entrywise distance; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Literal form used in lexicon files: shape plus row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorLiteral {
    pub shape: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<TensorLiteral> for Tensor {
    type Error = Error;

    fn try_from(lit: TensorLiteral) -> Result<Tensor> {
        Tensor::new(lit.shape, lit.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }
}

impl From<&Tensor> for TensorLiteral {
    fn from(t: &Tensor) -> Self {
        TensorLiteral { shape: t.shape.clone(), entries: t.data.iter().map(|c| [c.re, c.im]).collect() }
    }
}

/// Dimension of the space assigned to each basic type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimConfig {
    pub dims: BTreeMap<BasicType, usize>,
}

impl DimConfig {
    pub fn new(entries: impl IntoIterator<Item = (BasicType, usize)>) -> Result<Self> {
        let dims: BTreeMap<BasicType, usize> = entries.into_iter().collect();
        if let Some((b, _)) = dims.iter().find(|(_, d)| **d == 0) {
            return Err(Error::Shape(format!("dimension of `{b}` must be positive")));
        }
        Ok(Self { dims })
    }

    pub fn dim(&self, base: &BasicType) -> Result<usize> {
        self.dims.get(base).copied().ok_or_else(|| Error::MissingDimension(base.to_string()))
    }
}

/// The cap: the order-2 tensor with entries δ_ij.
pub fn eta(dim: usize) -> Tensor {
    let mut t = Tensor::zeros(vec![dim, dim]);
    for i in 0..dim {
        t.data[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    t
}

/// The cup. Contracting it against `v ⊗ w` gives the bilinear pairing Σ v_i w_i.
pub fn epsilon(dim: usize) -> Tensor {
    eta(dim)
}

fn swap_tensor(d0: usize, d1: usize) -> Tensor {
    // ports [in0, in1, out0, out1]; in0 = out1 and in1 = out0
    let mut t = Tensor::zeros(vec![d0, d1, d1, d0]);
    for a in 0..d0 {
        for b in 0..d1 {
            t.set(&[a, b, b, a], Complex64::new(1.0, 0.0)).expect("in range");
        }
    }
    t
}

struct Factor {
    tensor: Tensor,
    labels: Vec<WireId>,
}

impl Factor {
    fn contract(&self, other: &Factor) -> Result<Factor> {
        let pairs: Vec<(usize, usize)> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| other.labels.iter().position(|m| m == l).map(|j| (i, j)))
            .collect();
        let tensor = self.tensor.contract(&other.tensor, &pairs)?;
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| !pairs.iter().any(|p| p.0 == *i))
            .map(|(_, l)| *l)
            .chain(other.labels.iter().enumerate().filter(|(j, _)| !pairs.iter().any(|p| p.1 == *j)).map(|(_, l)| *l))
            .collect();
        Ok(Factor { tensor, labels })
    }
}

/// Contracts the diagram's port graph and returns the tensor on its outputs
/// (a scalar when there are none). Word effects use their word tensor with
/// axes reversed, matching their reversed port order.
pub fn evaluate(d: &Diagram, lexicon: &BTreeMap<String, Tensor>, cfg: &DimConfig) -> Result<Tensor> {
    d.validate()?;
    let dim = |w: WireId| -> Result<usize> { cfg.dim(d.base(w)?) };
    let mut factors = Vec::with_capacity(d.nodes.len());
    for n in &d.nodes {
        let tensor = match &n.kind {
            NodeKind::WordState { word, .. } | NodeKind::WordEffect { word, .. } => {
                let t = lexicon.get(word).ok_or_else(|| Error::MissingTensor(word.clone()))?;
                let t = if matches!(n.kind, NodeKind::WordEffect { .. }) { t.reversed_axes() } else { t.clone() };
                let expected = n.ports.iter().map(|&w| dim(w)).collect::<Result<Vec<_>>>()?;
                if t.shape() != expected.as_slice() {
                    return Err(Error::Shape(format!(
                        "tensor for `{word}` has shape {:?}, its type needs {expected:?}",
                        t.shape()
                    )));
                }
                t
            }
            NodeKind::Cup => epsilon(dim(n.ports[0])?),
            NodeKind::Cap => eta(dim(n.ports[0])?),
            NodeKind::Swap => swap_tensor(dim(n.ports[0])?, dim(n.ports[1])?),
        };
        factors.push(Factor { tensor, labels: n.ports.clone() });
    }

    // Greedy: contract the connected pair with the smallest result.
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                let shared: Vec<&WireId> = factors[i].labels.iter().filter(|l| factors[j].labels.contains(l)).collect();
                if shared.is_empty() {
                    continue;
                }
                let size: usize = factors[i]
                    .labels
                    .iter()
                    .zip(factors[i].tensor.shape())
                    .chain(factors[j].labels.iter().zip(factors[j].tensor.shape()))
                    .filter(|(l, _)| !shared.contains(l))
                    .map(|(_, d)| *d)
                    .product();
                if best.is_none_or(|b| size < b.2) {
                    best = Some((i, j, size));
                }
            }
        }
        let Some((i, j, _)) = best else { break };
        let b = factors.remove(j);
        let a = factors.remove(i);
        factors.insert(i, a.contract(&b)?);
    }
    let mut acc = Factor { tensor: Tensor::scalar(Complex64::new(1.0, 0.0)), labels: vec![] };
    for f in &factors {
        acc = acc.contract(f)?;
    }
    let perm = d
        .outputs
        .iter()
        .map(|o| {
            acc.labels
                .iter()
                .position(|l| l == o)
                .ok_or_else(|| Error::InvalidDiagram(format!("output wire {o} was contracted")))
        })
        .collect::<Result<Vec<_>>>()?;
    acc.tensor.permute(&perm)
}

/// Degrees of truth `alpha[j][i]`: object individual `j`, subject individual `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthVerbSpec {
    alpha: Vec<Vec<f64>>,
}

impl TruthVerbSpec {
    pub fn new(alpha: Vec<Vec<f64>>) -> Result<Self> {
        let n = alpha.len();
        if alpha.iter().any(|row| row.len() != n) {
            return Err(Error::Shape("truth matrix must be square".into()));
        }
        if alpha.iter().flatten().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Shape("degrees of truth must lie in [0, 1]".into()));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn individuals(&self) -> usize {
        self.alpha.len()
    }
}

/// The verb tensor in N ⊗ N ⊗ S with one-dimensional S: entry `[j, i, 0] = α_ji`.
pub fn truth_verb(spec: &TruthVerbSpec, noun_dim: usize) -> Result<Tensor> {
    let n = spec.individuals();
    if n != noun_dim {
        return Err(Error::Shape(format!("{n}×{n} truth matrix against noun dimension {noun_dim}")));
    }
    let data: Vec<f64> = spec.alpha.iter().flatten().copied().collect();
    Tensor::from_real(vec![n, n, 1], &data)
}

/// Truth value of "subject verb object" where the subject is the sum of the
/// individuals in `subjects` and the object the sum of those in `objects`.
pub fn truth_sentence_meaning(subjects: &[usize], objects: &[usize], spec: &TruthVerbSpec) -> Result<f64> {
    let n = spec.individuals();
    let check = |i: usize| if i < n { Ok(i) } else { Err(Error::IndexOutOfRange { index: i, dim: n }) };
    let mut total = 0.0;
    for &k in subjects {
        for &l in objects {
            total += spec.alpha[check(l)?][check(k)?];
        }
    }
    Ok(total)
}

/// Context-count vector of a word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordVector {
    pub coeffs: Vec<f64>,
}

impl WordVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Shape("word vector has a non-finite entry".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::vector(self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }
}

/// Verb matrix `c_ji = Σ obj_j sub_i` over the `(object, subject)` pairs of a corpus.
pub fn verb_from_corpus(pairs: &[(WordVector, WordVector)]) -> Result<Tensor> {
    let Some((o0, s0)) = pairs.first() else {
        return Err(Error::Shape("empty corpus".into()));
    };
    let shape = vec![o0.coeffs.len(), s0.coeffs.len()];
    let mut acc = Tensor::zeros(shape.clone());
    for (obj, sub) in pairs {
        if obj.coeffs.len() != shape[0] || sub.coeffs.len() != shape[1] {
            return Err(Error::Shape("word vectors of inconsistent length".into()));
        }
        let term = obj.to_tensor().outer(&sub.to_tensor());
        acc.data.iter_mut().zip(term.data).for_each(|(a, t)| *a += t);
    }
    Ok(acc)
}

/// `(obj ⊗ sub) ⊙ verb` for an order-2 verb indexed `[object, subject]`.
pub fn pointwise_meaning(obj: &Tensor, sub: &Tensor, verb: &Tensor) -> Result<Tensor> {
    if obj.rank() != 1 || sub.rank() != 1 {
        return Err(Error::Shape("noun meanings must be vectors".into()));
    }
    obj.outer(sub).hadamard(verb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eta_entries() {
        assert_eq!(eta(2).data(), &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(eta(2).shape(), &[2, 2]);
    }

    #[test]
    fn epsilon_after_eta_is_dimension() {
        let loop_value = epsilon(2).contract(&eta(2), &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(loop_value.data(), &[c(2.0)]);
    }

    #[test]
    fn epsilon_pairs_vectors() {
        let v = Tensor::from_real(vec![3], &[0.3, -1.2, 2.0]).unwrap();
        let w = Tensor::from_real(vec![3], &[1.5, 0.25, -0.7]).unwrap();
        let got = epsilon(3).contract(&v.outer(&w), &[(0, 0), (1, 1)]).unwrap();
        let dot: f64 = 0.3 * 1.5 + -1.2 * 0.25 + 2.0 * -0.7;
        assert!((got.data()[0] - c(dot)).norm() < 1e-15);
    }

    #[test]
    fn epsilon_is_symmetric() {
        for d in 1..5 {
            assert_eq!(epsilon(d).permute(&[1, 0]).unwrap(), epsilon(d));
        }
    }

    #[test]
    fn permute_and_contract_agree_with_loops() {
        let a = Tensor::from_real(vec![2, 3], &[1., 2., 3., 4., 5., 6.]).unwrap();
        let t = a.permute(&[1, 0]).unwrap();
        assert_eq!(t.shape(), &[3, 2]);
        assert_eq!(t.get(&[2, 1]).unwrap(), c(6.0));
        let b = Tensor::from_real(vec![3], &[1., 0., -1.]).unwrap();
        let ab = a.contract(&b, &[(1, 0)]).unwrap();
        assert_eq!(ab.data(), &[c(-2.0), c(-2.0)]);
    }

    #[test]
    fn tensor_rejects_bad_shapes() {
        assert!(Tensor::from_real(vec![2, 2], &[1.0]).is_err());
        assert!(Tensor::from_real(vec![1], &[f64::NAN]).is_err());
        assert!(matches!(eta(2).get(&[2, 0]), Err(Error::IndexOutOfRange { index: 2, dim: 2 })));
    }

    #[test]
    fn truth_verb_layout() {
        let one = TruthVerbSpec::new(vec![vec![1.0]]).unwrap();
        assert_eq!(truth_verb(&one, 1).unwrap().data(), &[c(1.0)]);
        let spec = TruthVerbSpec::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        let t = truth_verb(&spec, 2).unwrap();
        assert_eq!(t.get(&[1, 0, 0]).unwrap(), c(0.3));
        assert_eq!(t.get(&[0, 1, 0]).unwrap(), c(0.2));
        let zero = TruthVerbSpec::new(vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(truth_verb(&zero, 2).unwrap().norm(), 0.0);
        assert!(truth_verb(&spec, 3).is_err());
        assert!(TruthVerbSpec::new(vec![vec![1.5]]).is_err());
    }

    #[test]
    fn truth_sentence_sums() {
        let one = TruthVerbSpec::new(vec![vec![1.0]]).unwrap();
        assert_eq!(truth_sentence_meaning(&[0], &[0], &one).unwrap(), 1.0);
        let id = TruthVerbSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(truth_sentence_meaning(&[0, 1], &[0, 1], &id).unwrap(), 2.0);
        assert!(truth_sentence_meaning(&[2], &[0], &id).is_err());
    }

    #[test]
    fn corpus_verb() {
        let e0 = WordVector::new(vec![1.0, 0.0]).unwrap();
        let e1 = WordVector::new(vec![0.0, 1.0]).unwrap();
        let v = verb_from_corpus(&[(e0.clone(), e1.clone())]).unwrap();
        assert_eq!(v, Tensor::from_real(vec![2, 2], &[0., 1., 0., 0.]).unwrap());
        let v2 = verb_from_corpus(&[(e0.clone(), e1.clone()), (e0, e1)]).unwrap();
        assert_eq!(v2, v.scale(c(2.0)));
        let short = WordVector::new(vec![1.0]).unwrap();
        assert!(verb_from_corpus(&[(short, WordVector::new(vec![0.0, 1.0]).unwrap()), (WordVector::new(vec![1.0, 1.0]).unwrap(), WordVector::new(vec![0.0, 1.0]).unwrap())]).is_err());
    }

    #[test]
    fn pointwise_examples() {
        let obj = WordVector::new(vec![1.0, 0.0]).unwrap().to_tensor();
        let sub = WordVector::new(vec![0.0, 1.0]).unwrap().to_tensor();
        let verb = Tensor::from_real(vec![2, 2], &[2., 3., 5., 7.]).unwrap();
        let m = pointwise_meaning(&obj, &sub, &verb).unwrap();
        assert_eq!(m, Tensor::from_real(vec![2, 2], &[0., 3., 0., 0.]).unwrap());
        let ones = Tensor::from_real(vec![2, 2], &[1.; 4]).unwrap();
        assert_eq!(pointwise_meaning(&obj, &sub, &ones).unwrap(), obj.outer(&sub));
        assert!(pointwise_meaning(&obj, &sub, &Tensor::zeros(vec![3, 2])).is_err());
    }
}
