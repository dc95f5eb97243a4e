//! From diagrams to parametrised circuits.
//!
//! Word states become CNOT+rotation ansatze prepared from |0…0⟩; word effects
//! are their computational-basis transposes, ending in post-selection. Cups and
//! caps compile to Bell effects and Bell pairs. Qubit 0 is the least
//! significant bit of an amplitude index; within a wire of `q` qubits the
//! wire's basis index is `Σ_j bit_j 2^j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Endpoint, NodeKind, WireId};
use crate::fvect::{DimConfig, Tensor};
use crate::pregroup::{BasicType, PregroupType};
use crate::simulator;
use crate::{Error, ParameterStore, Result};

/// A rotation angle: a named parameter, a literal, or a sum of angles
/// (the result of fusing adjacent rotations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Param(String),
    Value(f64),
    Sum { sum: Vec<Angle> },
}

impl Angle {
    pub fn resolve(&self, store: &ParameterStore) -> Result<f64> {
        match self {
            Angle::Param(name) => store.get(name),
            Angle::Value(v) => Ok(*v),
            Angle::Sum { sum } => sum.iter().map(|a| a.resolve(store)).sum(),
        }
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Angle::Param(name) => {
                out.insert(name.clone());
            }
            Angle::Value(_) => {}
            Angle::Sum { sum } => sum.iter().for_each(|a| a.collect_params(out)),
        }
    }

    fn plus(self, other: Angle) -> Angle {
        let mut terms = Vec::new();
        for a in [self, other] {
            match a {
                Angle::Sum { sum } => terms.extend(sum),
                a => terms.push(a),
            }
        }
        Angle::Sum { sum: terms }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Param(name) => f.write_str(name),
            Angle::Value(v) => write!(f, "{v}"),
            Angle::Sum { sum } => {
                for (i, a) in sum.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<&str> for Angle {
    fn from(s: &str) -> Self {
        Angle::Param(s.to_string())
    }
}

impl From<String> for Angle {
    fn from(s: String) -> Self {
        Angle::Param(s)
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GateRecord", try_from = "GateRecord")]
pub enum Gate {
    Rz { qubit: usize, angle: Angle },
    Rx { qubit: usize, angle: Angle },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    PrepZero { qubit: usize },
    PostselectZero { qubit: usize },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rz { .. } => "rz",
            Gate::Rx { .. } => "rx",
            Gate::H { .. } => "h",
            Gate::Cnot { .. } => "cnot",
            Gate::Swap { .. } => "swap",
            Gate::PrepZero { .. } => "prep_zero",
            Gate::PostselectZero { .. } => "postselect_zero",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rz { qubit, .. }
            | Gate::Rx { qubit, .. }
            | Gate::H { qubit }
            | Gate::PrepZero { qubit }
            | Gate::PostselectZero { qubit } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Swap { a, b } => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Gate::Rz { angle, .. } | Gate::Rx { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn remap(&self, map: &[usize]) -> Gate {
        let m = |q: usize| map[q];
        match self.clone() {
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: m(qubit), angle },
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: m(qubit), angle },
            Gate::H { qubit } => Gate::H { qubit: m(qubit) },
            Gate::Cnot { control, target } => Gate::Cnot { control: m(control), target: m(target) },
            Gate::Swap { a, b } => Gate::Swap { a: m(a), b: m(b) },
            Gate::PrepZero { qubit } => Gate::PrepZero { qubit: m(qubit) },
            Gate::PostselectZero { qubit } => Gate::PostselectZero { qubit: m(qubit) },
        }
    }

    /// Computational-basis transpose. Every unitary in this gate set is a
    /// symmetric matrix; a preparation transposes to a post-selection.
    pub fn transpose(&self) -> Result<Gate> {
        match self {
            Gate::PrepZero { qubit } => Ok(Gate::PostselectZero { qubit: *qubit }),
            Gate::PostselectZero { .. } => Err(Error::NoTranspose(self.name().into())),
            g => Ok(g.clone()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<Angle>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        GateRecord { kind: g.name().into(), qubits: g.qubits(), angle: g.angle().cloned() }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = String;

    fn try_from(r: GateRecord) -> std::result::Result<Self, String> {
        let arity = match r.kind.as_str() {
            "cnot" | "swap" => 2,
            _ => 1,
        };
        if r.qubits.len() != arity {
            return Err(format!("gate `{}` takes {arity} qubit(s), got {}", r.kind, r.qubits.len()));
        }
        let q = &r.qubits;
        let angle = || r.angle.clone().ok_or_else(|| format!("gate `{}` needs an angle", r.kind));
        Ok(match r.kind.as_str() {
            "rz" => Gate::Rz { qubit: q[0], angle: angle()? },
            "rx" => Gate::Rx { qubit: q[0], angle: angle()? },
            "h" => Gate::H { qubit: q[0] },
            "cnot" => Gate::Cnot { control: q[0], target: q[1] },
            "swap" => Gate::Swap { a: q[0], b: q[1] },
            "prep_zero" => Gate::PrepZero { qubit: q[0] },
            "postselect_zero" => Gate::PostselectZero { qubit: q[0] },
            other => return Err(format!("unknown gate kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetadata {
    /// Factor applied to the post-selected amplitudes (from Bell cups/caps).
    pub scalar: f64,
    /// Qubits per open wire, in `open_qubits` order.
    pub open_widths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<TransitiveTemplate>,
}

impl Default for CircuitMetadata {
    fn default() -> Self {
        Self { scalar: 1.0, open_widths: vec![], label: None, template: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub open_qubits: Vec<usize>,
    pub params: Vec<String>,
    pub metadata: CircuitMetadata,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Life {
    Fresh,
    Live,
    Selected,
}

impl Circuit {
    pub fn empty() -> Self {
        Circuit { n_qubits: 0, gates: vec![], open_qubits: vec![], params: vec![], metadata: CircuitMetadata::default() }
    }

    /// A bare gate sequence on `n_qubits`, for unitary checks.
    pub fn fragment(n_qubits: usize, gates: Vec<Gate>) -> Self {
        let mut c = Circuit { n_qubits, gates, ..Circuit::empty() };
        c.refresh_params();
        c
    }

    pub fn refresh_params(&mut self) {
        let mut names = BTreeSet::new();
        for a in self.gates.iter().filter_map(Gate::angle) {
            a.collect_params(&mut names);
        }
        self.params = names.into_iter().collect();
    }

    pub fn count(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    pub fn cnots(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Cnot { control, target } => Some((control, target)),
                _ => None,
            })
            .collect()
    }

    /// Checks qubit ranges and the prepare/use/post-select life cycle.
    ///
    /// A qubit must be prepared before any gate acts on it. A post-selected
    /// qubit may be prepared again. At the end the live qubits are exactly
    /// the open qubits.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        let mut life = vec![Life::Fresh; self.n_qubits];
        for (i, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            if let Some(q) = qs.iter().find(|&&q| q >= self.n_qubits) {
                return bad(format!("gate {i} ({}) uses qubit {q} of {}", g.name(), self.n_qubits));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return bad(format!("gate {i} ({}) acts twice on qubit {}", g.name(), qs[0]));
            }
            match g {
                Gate::PrepZero { qubit } => {
                    if life[*qubit] == Life::Live {
                        return bad(format!("gate {i} prepares live qubit {qubit}"));
                    }
                    life[*qubit] = Life::Live;
                }
                _ => {
                    if let Some(q) = qs.iter().find(|&&q| life[q] != Life::Live) {
                        return bad(format!("gate {i} ({}) acts on unprepared qubit {q}", g.name()));
                    }
                    if let Gate::PostselectZero { qubit } = g {
                        life[*qubit] = Life::Selected;
                    }
                }
            }
        }
        let live: BTreeSet<usize> = (0..self.n_qubits).filter(|&q| life[q] == Life::Live).collect();
        let open: BTreeSet<usize> = self.open_qubits.iter().copied().collect();
        if open.len() != self.open_qubits.len() {
            return bad("open qubits repeat".into());
        }
        if live != open {
            return bad(format!("live qubits {live:?} differ from open qubits {open:?}"));
        }
        if self.metadata.open_widths.iter().sum::<usize>() != self.open_qubits.len() {
            return bad("open wire widths do not cover the open qubits".into());
        }
        if !self.metadata.scalar.is_finite() {
            return bad("non-finite scalar".into());
        }
        Ok(())
    }
}

/// Qubits per basic type plus the number of ansatz layers per word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitConfig {
    pub qubits: BTreeMap<BasicType, usize>,
    #[serde(default = "default_depth")]
    pub ansatz_depth: usize,
}

fn default_depth() -> usize {
    1
}

impl QubitConfig {
    pub fn new(qubits: impl IntoIterator<Item = (BasicType, usize)>, ansatz_depth: usize) -> Result<Self> {
        let cfg = Self { qubits: qubits.into_iter().collect(), ansatz_depth };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.values().all(|&q| q == 0) {
            return Err(Error::Compile("qubit config assigns no qubits to any type".into()));
        }
        Ok(())
    }

    pub fn count(&self, base: &BasicType) -> Result<usize> {
        self.qubits.get(base).copied().ok_or_else(|| Error::UnconfiguredQubits(base.to_string()))
    }

    /// Dimension `2^q` for every configured type.
    pub fn dims(&self) -> DimConfig {
        DimConfig { dims: self.qubits.iter().map(|(b, q)| (b.clone(), 1usize << q)).collect() }
    }
}

pub fn qubit_count(ty: &PregroupType, cfg: &QubitConfig) -> Result<usize> {
    ty.simples.iter().map(|s| cfg.count(&s.base)).sum()
}

pub fn angle_name(word: &str, layer: usize, qubit: usize, axis: char) -> String {
    format!("{word}.{layer}.{qubit}.{axis}")
}

/// `depth` layers of a CNOT ladder followed by RZ then RX on every qubit.
pub fn word_state_ansatz(word: &str, n_qubits: usize, depth: usize) -> Circuit {
    let mut gates: Vec<Gate> = (0..n_qubits).map(|qubit| Gate::PrepZero { qubit }).collect();
    for layer in 0..depth {
        for q in 0..n_qubits.saturating_sub(1) {
            gates.push(Gate::Cnot { control: q, target: q + 1 });
        }
        for qubit in 0..n_qubits {
            gates.push(Gate::Rz { qubit, angle: angle_name(word, layer, qubit, 'z').into() });
            gates.push(Gate::Rx { qubit, angle: angle_name(word, layer, qubit, 'x').into() });
        }
    }
    let mut c = Circuit {
        n_qubits,
        gates,
        open_qubits: (0..n_qubits).collect(),
        params: vec![],
        metadata: CircuitMetadata { open_widths: vec![1; n_qubits], label: Some(word.to_string()), ..Default::default() },
    };
    c.refresh_params();
    c
}

/// Reverses the gate order and transposes each gate, so preparations become
/// post-selections and the circuit's row vector is the state's transpose.
pub fn transpose_to_effect(c: &Circuit) -> Result<Circuit> {
    let gates = c.gates.iter().rev().map(Gate::transpose).collect::<Result<Vec<_>>>()?;
    let mut out = Circuit {
        n_qubits: c.n_qubits,
        gates,
        open_qubits: vec![],
        params: vec![],
        metadata: CircuitMetadata { scalar: c.metadata.scalar, label: c.metadata.label.clone(), ..Default::default() },
    };
    out.refresh_params();
    Ok(out)
}

/// Per-wire qubit widths of a word's type.
fn widths(ty: &PregroupType, cfg: &QubitConfig) -> Result<Vec<usize>> {
    ty.simples.iter().map(|s| cfg.count(&s.base)).collect()
}

fn bell_state(a: usize, b: usize) -> [Gate; 2] {
    [Gate::H { qubit: a }, Gate::Cnot { control: a, target: b }]
}

fn bell_effect(a: usize, b: usize) -> [Gate; 4] {
    [
        Gate::Cnot { control: a, target: b },
        Gate::H { qubit: a },
        Gate::PostselectZero { qubit: a },
        Gate::PostselectZero { qubit: b },
    ]
}

/// Compiles a diagram of word states, word effects, swaps, cups and caps.
///
/// Nodes are emitted in dependency order. Each produced wire gets fresh
/// qubits; effects and cups consume the qubits of their wires. Swaps between
/// equal-width wires emit SWAP gates; otherwise they relabel.
pub fn compile_bigraph(d: &Diagram, cfg: &QubitConfig) -> Result<Circuit> {
    d.validate()?;
    let depth = cfg.ansatz_depth;
    let width = |w: WireId| -> Result<usize> { cfg.count(d.base(w)?) };
    let mut qubits_of: BTreeMap<WireId, Vec<usize>> = BTreeMap::new();
    let mut n_qubits = 0;
    let mut gates = Vec::new();
    let mut scalar = 1.0;
    let mut alloc = |n: usize| -> Vec<usize> {
        let qs = (n_qubits..n_qubits + n).collect();
        n_qubits += n;
        qs
    };

    let inputs = |i: usize| -> Vec<WireId> {
        let n = &d.nodes[i];
        match n.kind {
            NodeKind::WordState { .. } | NodeKind::Cap => vec![],
            NodeKind::WordEffect { .. } | NodeKind::Cup => n.ports.clone(),
            NodeKind::Swap => n.ports[..2].to_vec(),
        }
    };
    let mut done = vec![false; d.nodes.len()];
    while let Some(i) = (0..d.nodes.len()).find(|&i| !done[i] && inputs(i).iter().all(|w| qubits_of.contains_key(w))) {
        done[i] = true;
        let n = &d.nodes[i];
        let produce = |qubits_of: &mut BTreeMap<WireId, Vec<usize>>, w: WireId, qs: Vec<usize>| -> Result<()> {
            if qubits_of.insert(w, qs).is_some() {
                return Err(Error::Compile(format!("wire {w} is produced twice")));
            }
            Ok(())
        };
        match &n.kind {
            NodeKind::WordState { word, ty } | NodeKind::WordEffect { word, ty } => {
                let ws = widths(ty, cfg)?;
                let ansatz = word_state_ansatz(word, ws.iter().sum(), depth);
                // local ansatz qubit -> physical qubit, wires in type order
                let mut map = Vec::new();
                if let NodeKind::WordState { .. } = n.kind {
                    for (t, &w) in n.ports.iter().enumerate() {
                        if width(w)? != ws[t] {
                            return Err(Error::Compile(format!("qubit budget mismatch on a wire of `{word}`")));
                        }
                        let qs = alloc(ws[t]);
                        map.extend(qs.iter().copied());
                        produce(&mut qubits_of, w, qs)?;
                    }
                    gates.extend(ansatz.gates.iter().map(|g| g.remap(&map)));
                } else {
                    for (t, &wt) in ws.iter().enumerate() {
                        let w = n.ports[n.type_port(t)];
                        let qs = qubits_of.remove(&w).expect("input ready");
                        if qs.len() != wt {
                            return Err(Error::Compile(format!("qubit budget mismatch on a wire of `{word}`")));
                        }
                        map.extend(qs);
                    }
                    let effect = transpose_to_effect(&ansatz)?;
                    gates.extend(effect.gates.iter().map(|g| g.remap(&map)));
                }
            }
            NodeKind::Cap => {
                let q = width(n.ports[0])?;
                let (a, b) = (alloc(q), alloc(q));
                for j in 0..q {
                    gates.extend([Gate::PrepZero { qubit: a[j] }, Gate::PrepZero { qubit: b[j] }]);
                    gates.extend(bell_state(a[j], b[j]));
                    scalar *= SQRT_2;
                }
                produce(&mut qubits_of, n.ports[0], a)?;
                produce(&mut qubits_of, n.ports[1], b)?;
            }
            NodeKind::Cup => {
                let a = qubits_of.remove(&n.ports[0]).expect("input ready");
                let b = qubits_of.remove(&n.ports[1]).expect("input ready");
                for (&qa, &qb) in a.iter().zip(&b) {
                    gates.extend(bell_effect(qa, qb));
                    scalar *= SQRT_2;
                }
            }
            NodeKind::Swap => {
                let a = qubits_of.remove(&n.ports[0]).expect("input ready");
                let b = qubits_of.remove(&n.ports[1]).expect("input ready");
                if a.len() == b.len() {
                    for (&qa, &qb) in a.iter().zip(&b) {
                        gates.push(Gate::Swap { a: qa, b: qb });
                    }
                    // out0 carries in1's content, now sitting on a's qubits
                    produce(&mut qubits_of, n.ports[2], a)?;
                    produce(&mut qubits_of, n.ports[3], b)?;
                } else {
                    produce(&mut qubits_of, n.ports[2], b)?;
                    produce(&mut qubits_of, n.ports[3], a)?;
                }
            }
        }
    }
    if let Some(i) = done.iter().position(|d| !d) {
        return Err(Error::Compile(format!("node {i} never has all of its input wires")));
    }
    let mut open_qubits = Vec::new();
    let mut open_widths = Vec::new();
    for w in &d.outputs {
        let qs = qubits_of.remove(w).ok_or_else(|| Error::Compile(format!("output wire {w} is not produced")))?;
        open_widths.push(qs.len());
        open_qubits.extend(qs);
    }
    if let Some(w) = qubits_of.keys().next() {
        return Err(Error::Compile(format!("wire {w} is produced but never consumed")));
    }
    let mut c = Circuit {
        n_qubits,
        gates,
        open_qubits,
        params: vec![],
        metadata: CircuitMetadata { scalar, open_widths, ..Default::default() },
    };
    c.refresh_params();
    c.validate()?;
    Ok(c)
}

/// Each word's state tensor under its ansatz, for checking compiled circuits
/// against diagram evaluation. Dimensions are `2^q` per type.
pub fn ansatz_lexicon(d: &Diagram, cfg: &QubitConfig, store: &ParameterStore) -> Result<(BTreeMap<String, Tensor>, DimConfig)> {
    let mut lexicon = BTreeMap::new();
    for (_, n) in d.word_nodes() {
        let (word, ty) = (n.kind.word().expect("word"), n.kind.word_type().expect("word"));
        if lexicon.contains_key(word) {
            continue;
        }
        let ws = widths(ty, cfg)?;
        let state = simulator::simulate(&word_state_ansatz(word, ws.iter().sum(), cfg.ansatz_depth), store)?;
        lexicon.insert(word.to_string(), state.to_tensor(&ws)?);
    }
    Ok((lexicon, cfg.dims()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Euler<A> {
    pub alpha: A,
    pub beta: A,
    pub gamma: A,
}

pub type EulerParams = Euler<f64>;

/// RZ(γ), RX(β), RZ(α) in time order: the matrix Rz(α)·Rx(β)·Rz(γ).
pub fn euler_unitary<A: Clone + Into<Angle>>(p: &Euler<A>, qubit: usize) -> Vec<Gate> {
    vec![
        Gate::Rz { qubit, angle: p.gamma.clone().into() },
        Gate::Rx { qubit, angle: p.beta.clone().into() },
        Gate::Rz { qubit, angle: p.alpha.clone().into() },
    ]
}

/// The transpose of [`euler_unitary`]: Rz(γ)·Rx(β)·Rz(α).
fn euler_transposed<A: Clone + Into<Angle>>(p: &Euler<A>, qubit: usize) -> Vec<Gate> {
    euler_unitary(p, qubit).into_iter().rev().collect()
}

/// Verb as `U · diag(p) · V` with `U = Euler(α, β, γ)`, `V = Euler(α′, β′, γ′)`
/// and `p = Rx(α_p)|0⟩` the diagonal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdVerbParams<A> {
    pub u: Euler<A>,
    pub v: Euler<A>,
    pub alpha_p: A,
}

/// One-qubit noun state `Rz(β)·Rx(α)|0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NounAngles {
    pub alpha: Angle,
    pub beta: Angle,
}

impl NounAngles {
    fn named(word: &str) -> Self {
        Self { alpha: format!("{word}.alpha").into(), beta: format!("{word}.beta").into() }
    }

    fn prepare(&self, qubit: usize) -> [Gate; 3] {
        [
            Gate::PrepZero { qubit },
            Gate::Rx { qubit, angle: self.alpha.clone() },
            Gate::Rz { qubit, angle: self.beta.clone() },
        ]
    }
}

/// The positive transitive sentence "subject verb object" with its angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitiveTemplate {
    pub subject: String,
    pub verb: String,
    pub object: String,
    pub subject_angles: NounAngles,
    pub object_angles: NounAngles,
    pub verb_angles: SvdVerbParams<Angle>,
}

impl TransitiveTemplate {
    pub fn named(subject: &str, verb: &str, object: &str) -> Self {
        let p = |suffix: &str| Angle::Param(format!("{verb}.{suffix}"));
        Self {
            subject: subject.into(),
            verb: verb.into(),
            object: object.into(),
            subject_angles: NounAngles::named(subject),
            object_angles: NounAngles::named(object),
            verb_angles: SvdVerbParams {
                u: Euler { alpha: p("alpha"), beta: p("beta"), gamma: p("gamma") },
                v: Euler { alpha: p("alpha_prime"), beta: p("beta_prime"), gamma: p("gamma_prime") },
                alpha_p: p("alpha_p"),
            },
        }
    }

    /// Four qubits: subject, two verb legs, object. The verb state
    /// `Σ_k p_k U|k⟩ ⊗ Vᵀ|k⟩` is merged into each noun by a CNOT and a
    /// post-selection; the two merges act on disjoint qubit pairs.
    pub fn circuit(&self) -> Circuit {
        let (sub, leg_s, leg_o, obj) = (0, 1, 2, 3);
        let verb = &self.verb_angles;
        let mut gates = Vec::new();
        gates.extend(self.subject_angles.prepare(sub));
        gates.extend(self.object_angles.prepare(obj));
        gates.extend([
            Gate::PrepZero { qubit: leg_s },
            Gate::PrepZero { qubit: leg_o },
            Gate::Rx { qubit: leg_s, angle: verb.alpha_p.clone() },
            Gate::Cnot { control: leg_s, target: leg_o },
        ]);
        gates.extend(euler_unitary(&verb.u, leg_s));
        gates.extend(euler_transposed(&verb.v, leg_o));
        gates.extend([
            Gate::Cnot { control: sub, target: leg_s },
            Gate::PostselectZero { qubit: leg_s },
            Gate::Cnot { control: obj, target: leg_o },
            Gate::PostselectZero { qubit: leg_o },
        ]);
        self.finish(4, gates, vec![sub, obj], "grammar-meaning")
    }

    /// Three qubits: the verb acts as a map on a copy of the object. The
    /// diagonal `p` is applied through the subject's qubit before the subject
    /// is prepared on it, so the CNOTs share qubits and run in sequence.
    pub fn choi_circuit(&self) -> Circuit {
        let (sub, obj, wire) = (0, 1, 2);
        let verb = &self.verb_angles;
        let mut gates = Vec::new();
        gates.extend(self.object_angles.prepare(obj));
        gates.extend([Gate::PrepZero { qubit: wire }, Gate::Cnot { control: obj, target: wire }]);
        gates.extend(euler_unitary(&verb.v, wire));
        gates.extend([
            Gate::PrepZero { qubit: sub },
            Gate::Rx { qubit: sub, angle: verb.alpha_p.clone() },
            Gate::Cnot { control: wire, target: sub },
            Gate::PostselectZero { qubit: sub },
        ]);
        gates.extend(euler_unitary(&verb.u, wire));
        gates.extend(self.subject_angles.prepare(sub));
        gates.extend([Gate::Cnot { control: sub, target: wire }, Gate::PostselectZero { qubit: wire }]);
        self.finish(3, fuse_rotations(gates), vec![sub, obj], "choi")
    }

    fn finish(&self, n_qubits: usize, gates: Vec<Gate>, open: Vec<usize>, form: &str) -> Circuit {
        let mut c = Circuit {
            n_qubits,
            gates,
            open_qubits: open,
            params: vec![],
            metadata: CircuitMetadata {
                scalar: 1.0,
                open_widths: vec![1, 1],
                label: Some(format!("{form}: {} {} {}", self.subject, self.verb, self.object)),
                template: Some(self.clone()),
            },
        };
        c.refresh_params();
        c
    }
}

/// Fuses same-axis rotations on a qubit when only commuting gates separate
/// them: Z rotations pass CNOT controls, X rotations pass CNOT targets.
pub fn fuse_rotations(mut gates: Vec<Gate>) -> Vec<Gate> {
    let commutes = |rot: &Gate, g: &Gate| -> bool {
        match (rot, g) {
            (Gate::Rz { qubit, .. }, Gate::Cnot { control, .. }) => control == qubit,
            (Gate::Rx { qubit, .. }, Gate::Cnot { target, .. }) => target == qubit,
            (rot, g) => !g.qubits().contains(&rot.qubits()[0]),
        }
    };
    'restart: loop {
        for i in 0..gates.len() {
            if gates[i].angle().is_none() {
                continue;
            }
            let q = gates[i].qubits()[0];
            for j in i + 1..gates.len() {
                let fused = match (&gates[i], &gates[j]) {
                    (Gate::Rz { angle: a, .. }, Gate::Rz { qubit, angle: b }) if *qubit == q => {
                        Some(Gate::Rz { qubit: q, angle: a.clone().plus(b.clone()) })
                    }
                    (Gate::Rx { angle: a, .. }, Gate::Rx { qubit, angle: b }) if *qubit == q => {
                        Some(Gate::Rx { qubit: q, angle: a.clone().plus(b.clone()) })
                    }
                    _ => None,
                };
                if let Some(g) = fused {
                    gates[j] = g;
                    gates.remove(i);
                    continue 'restart;
                }
                if !commutes(&gates[i], &gates[j]) {
                    break;
                }
            }
        }
        return gates;
    }
}

/// Finds subject, verb and object of a positive transitive sentence whose
/// function words have already been replaced by caps and straightened.
pub fn transitive_roles(d: &Diagram, target: &BasicType) -> Result<(String, String, String)> {
    let not_transitive = |why: &str| Error::Compile(format!("not a positive transitive sentence: {why}"));
    let root = d.root(target)?;
    let words: Vec<usize> = d.word_nodes().map(|(i, _)| i).collect();
    if words.len() != 3 {
        return Err(not_transitive(&format!("{} content words remain", words.len())));
    }
    let verb = &d.nodes[root];
    if verb.ports.len() != 3 {
        return Err(not_transitive("verb type must have three simple types"));
    }
    let bases: Vec<&BasicType> = verb.ports.iter().map(|&w| d.base(w)).collect::<Result<_>>()?;
    let s_idx = bases.iter().position(|b| *b == target).expect("root carries the target");
    let subject_port = if s_idx > 0 { s_idx - 1 } else { s_idx + 1 };
    let object_port = (0..3).find(|&p| p != s_idx && p != subject_port).expect("three ports");
    let eps = d.endpoints();
    let noun_at = |port: usize| -> Result<String> {
        match d.trace(&eps, root, verb.type_port(port))? {
            Endpoint::Port { node, .. } if d.nodes[node].ports.len() == 1 => {
                Ok(d.nodes[node].kind.word().expect("word endpoint").to_string())
            }
            _ => Err(not_transitive("verb argument is not a single noun")),
        }
    };
    Ok((noun_at(subject_port)?, verb.kind.word().expect("root is a word").to_string(), noun_at(object_port)?))
}

/// The grammar+meaning circuit of a positive transitive sentence; nouns are
/// one-qubit states and the verb lives in ℂ² ⊗ ℂ².
pub fn compile_grammar_meaning(d: &Diagram, target: &BasicType, cfg: &QubitConfig) -> Result<Circuit> {
    let (subject, verb, object) = transitive_roles(d, target)?;
    for (_, n) in d.word_nodes() {
        let word = n.kind.word().expect("word");
        if word != verb && qubit_count(n.kind.word_type().expect("word"), cfg)? != 1 {
            return Err(Error::Compile(format!("noun `{word}` must map to exactly one qubit")));
        }
    }
    let c = TransitiveTemplate::named(&subject, &verb, &object).circuit();
    c.validate()?;
    Ok(c)
}

/// Bends the verb's legs to turn circuit (subject, verb state, object) into
/// the three-qubit form. Amplitudes agree up to `metadata.scalar`.
pub fn choi_form(c: &Circuit) -> Result<Circuit> {
    let template = c
        .metadata
        .template
        .as_ref()
        .filter(|t| t.circuit().gates == c.gates)
        .ok_or_else(|| Error::Compile("choi form needs an unmodified transitive grammar+meaning circuit".into()))?;
    let out = template.choi_circuit();
    out.validate()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Qasm,
}

/// Serialises a circuit. JSON keeps symbolic angles; the QASM subset needs
/// every angle resolved from `store`.
pub fn export(c: &Circuit, format: ExportFormat, store: Option<&ParameterStore>) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => crate::json::to_vec(c),
        ExportFormat::Qasm => {
            let empty = ParameterStore::new();
            let store = store.unwrap_or(&empty);
            let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
            let n_select = c.count("postselect_zero");
            if c.n_qubits > 0 {
                let _ = writeln!(s, "qreg q[{}];", c.n_qubits);
            }
            if n_select > 0 {
                let _ = writeln!(s, "creg c[{n_select}];");
            }
            let mut bit = 0;
            for g in &c.gates {
                let angle = |a: &Angle| -> Result<String> { Ok(crate::json::format_f64(a.resolve(store)?)) };
                match g {
                    Gate::Rz { qubit, angle: a } => writeln!(s, "rz({}) q[{qubit}];", angle(a)?),
                    Gate::Rx { qubit, angle: a } => writeln!(s, "rx({}) q[{qubit}];", angle(a)?),
                    Gate::H { qubit } => writeln!(s, "h q[{qubit}];"),
                    Gate::Cnot { control, target } => writeln!(s, "cx q[{control}],q[{target}];"),
                    Gate::Swap { a, b } => writeln!(s, "swap q[{a}],q[{b}];"),
                    Gate::PrepZero { qubit } => writeln!(s, "reset q[{qubit}];"),
                    Gate::PostselectZero { qubit } => {
                        bit += 1;
                        writeln!(s, "measure q[{qubit}] -> c[{}]; // postselect 0", bit - 1)
                    }
                }
                .expect("writing to a string");
            }
            let _ = writeln!(s, "// scalar {}", crate::json::format_f64(c.metadata.scalar));
            Ok(s.into_bytes())
        }
    }
}
