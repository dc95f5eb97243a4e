//! String diagrams as port graphs.
//!
//! Every wire has exactly two endpoints, each either a node port or a
//! position in the diagram's open `outputs`. Word states and caps produce
//! wires; word effects and cups consume them. A swap has ports
//! `[in0, in1, out0, out1]` and connects `in0` to `out1` and `in1` to `out0`.
//!
//! A word effect lists its ports in the reverse of its type order: flipping a
//! state upside down reverses the left-to-right order of its wires.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::pregroup::{BasicType, Grammar, PregroupType, ReductionLinkage};
use crate::{Error, Result};

pub type WireId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub id: WireId,
    pub base: BasicType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    WordState {
        word: String,
        #[serde(rename = "type")]
        ty: PregroupType,
    },
    WordEffect {
        word: String,
        #[serde(rename = "type")]
        ty: PregroupType,
    },
    Cup,
    Cap,
    Swap,
}

impl NodeKind {
    pub fn word(&self) -> Option<&str> {
        match self {
            NodeKind::WordState { word, .. } | NodeKind::WordEffect { word, .. } => Some(word),
            _ => None,
        }
    }

    pub fn word_type(&self) -> Option<&PregroupType> {
        match self {
            NodeKind::WordState { ty, .. } | NodeKind::WordEffect { ty, .. } => Some(ty),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match self {
            NodeKind::WordState { word, .. } => word.clone(),
            NodeKind::WordEffect { word, .. } => format!("{word}ᵀ"),
            NodeKind::Cup => "cup".into(),
            NodeKind::Cap => "cap".into(),
            NodeKind::Swap => "swap".into(),
        }
    }

    /// Whether port `port` of this node produces (rather than consumes) its wire.
    fn produces(&self, port: usize) -> bool {
        match self {
            NodeKind::WordState { .. } | NodeKind::Cap => true,
            NodeKind::WordEffect { .. } | NodeKind::Cup => false,
            NodeKind::Swap => port >= 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    #[serde(flatten)]
    pub kind: NodeKind,
    pub ports: Vec<WireId>,
}

impl Node {
    /// Port index holding the wire of the `t`-th simple type of a word.
    pub fn type_port(&self, t: usize) -> usize {
        match self.kind {
            NodeKind::WordEffect { .. } => self.ports.len() - 1 - t,
            _ => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    Port { node: usize, port: usize },
    Output(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub wires: Vec<Wire>,
    pub nodes: Vec<Node>,
    pub outputs: Vec<WireId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordDistance {
    pub node: usize,
    pub word: String,
    pub distance: usize,
}

impl Diagram {
    /// Builds the sentence diagram: one state per word, one cup per linked
    /// pair, survivors as open outputs. Wire ids are flattened type indices.
    pub fn from_reduction(
        grammar: &Grammar,
        words: &[(String, PregroupType)],
        linkage: &ReductionLinkage,
    ) -> Result<Diagram> {
        let mut wires = Vec::new();
        let mut nodes = Vec::new();
        for (word, ty) in words {
            let start = wires.len();
            for s in &ty.simples {
                wires.push(Wire { id: wires.len(), base: grammar.canonical(&s.base).clone() });
            }
            nodes.push(Node {
                kind: NodeKind::WordState { word: word.clone(), ty: ty.clone() },
                ports: (start..wires.len()).collect(),
            });
        }
        let total = wires.len();
        let mut used = vec![false; total];
        let mut claim = |i: usize| -> Result<()> {
            if i >= total {
                return Err(Error::InvalidDiagram(format!("linkage index {i} out of range ({total} simple types)")));
            }
            if std::mem::replace(&mut used[i], true) {
                return Err(Error::InvalidDiagram(format!("linkage index {i} used twice")));
            }
            Ok(())
        };
        for &(i, j) in &linkage.cups {
            claim(i)?;
            claim(j)?;
        }
        for &k in &linkage.survivors {
            claim(k)?;
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(Error::InvalidDiagram(format!("simple type {k} is neither linked nor a survivor")));
        }
        for &(i, j) in &linkage.cups {
            if wires[i].base != wires[j].base {
                return Err(Error::InvalidDiagram(format!(
                    "cup ({i},{j}) joins `{}` and `{}`",
                    wires[i].base, wires[j].base
                )));
            }
            nodes.push(Node { kind: NodeKind::Cup, ports: vec![i, j] });
        }
        let d = Diagram { wires, nodes, outputs: linkage.survivors.clone() };
        d.validate()?;
        Ok(d)
    }

    pub fn wire(&self, id: WireId) -> Option<&Wire> {
        self.wires.binary_search_by_key(&id, |w| w.id).ok().map(|i| &self.wires[i])
    }

    pub fn base(&self, id: WireId) -> Result<&BasicType> {
        self.wire(id)
            .map(|w| &w.base)
            .ok_or_else(|| Error::InvalidDiagram(format!("unknown wire {id}")))
    }

    pub fn word_nodes(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.kind.word().is_some())
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(&n.kind)).count()
    }

    pub fn endpoints(&self) -> BTreeMap<WireId, Vec<Endpoint>> {
        let mut eps: BTreeMap<WireId, Vec<Endpoint>> = self.wires.iter().map(|w| (w.id, Vec::new())).collect();
        for (node, n) in self.nodes.iter().enumerate() {
            for (port, w) in n.ports.iter().enumerate() {
                eps.entry(*w).or_default().push(Endpoint::Port { node, port });
            }
        }
        for (i, w) in self.outputs.iter().enumerate() {
            eps.entry(*w).or_default().push(Endpoint::Output(i));
        }
        eps
    }

    pub fn validate(&self) -> Result<()> {
        if self.wires.windows(2).any(|p| p[0].id >= p[1].id) {
            return Err(Error::InvalidDiagram("wire ids must be unique and sorted".into()));
        }
        for (w, eps) in self.endpoints() {
            if self.wire(w).is_none() {
                return Err(Error::InvalidDiagram(format!("port refers to unknown wire {w}")));
            }
            if eps.len() != 2 {
                return Err(Error::InvalidDiagram(format!("wire {w} has {} endpoints", eps.len())));
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let bad = |msg: &str| Err(Error::InvalidDiagram(format!("node {i} ({}): {msg}", n.kind.label())));
            match &n.kind {
                NodeKind::Cup | NodeKind::Cap => {
                    if n.ports.len() != 2 {
                        return bad("needs exactly two ports");
                    }
                    if self.base(n.ports[0])? != self.base(n.ports[1])? {
                        return bad("ports differ in base type");
                    }
                }
                NodeKind::Swap => {
                    if n.ports.len() != 4 {
                        return bad("needs exactly four ports");
                    }
                    if self.base(n.ports[0])? != self.base(n.ports[3])?
                        || self.base(n.ports[1])? != self.base(n.ports[2])?
                    {
                        return bad("crossing wires change base type");
                    }
                }
                NodeKind::WordState { ty, .. } | NodeKind::WordEffect { ty, .. } => {
                    if n.ports.len() != ty.len() {
                        return bad("port count differs from its type");
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces the named words by caps (states) or cups (effects).
    pub fn substitute_cap_words(&self, cap_words: &BTreeSet<String>) -> Result<Diagram> {
        let mut d = self.clone();
        for n in &mut d.nodes {
            let Some(word) = n.kind.word().filter(|w| cap_words.contains(*w)) else { continue };
            let not_cap = |reason: &str| Error::NotACap { word: word.to_string(), reason: reason.into() };
            if n.ports.len() != 2 {
                return Err(not_cap("type must have exactly two simple types"));
            }
            if self.base(n.ports[0])? != self.base(n.ports[1])? {
                return Err(not_cap("the two simple types have different bases"));
            }
            n.kind = match n.kind {
                NodeKind::WordState { .. } => NodeKind::Cap,
                _ => NodeKind::Cup,
            };
        }
        Ok(d)
    }

    /// Straightens every cup-cap zig-zag into a plain wire, until none remain.
    ///
    /// A cup and a cap sharing exactly one wire are both removed; the wire on
    /// the cap's free leg is merged into the wire on the cup's free leg. A cup
    /// and cap sharing both wires form a closed loop and are left alone.
    pub fn snake_removal(&self) -> Diagram {
        let mut d = self.clone();
        while let Some((cup, cap, shared)) = d.find_snake() {
            let cup_free = d.nodes[cup].ports.iter().copied().find(|&w| w != shared).expect("cup has two wires");
            let cap_free = d.nodes[cap].ports.iter().copied().find(|&w| w != shared).expect("cap has two wires");
            for idx in [cup.max(cap), cup.min(cap)] {
                d.nodes.remove(idx);
            }
            for w in d.nodes.iter_mut().flat_map(|n| n.ports.iter_mut()).chain(d.outputs.iter_mut()) {
                if *w == cap_free {
                    *w = cup_free;
                }
            }
            d.wires.retain(|w| w.id != shared && w.id != cap_free);
        }
        d
    }

    fn find_snake(&self) -> Option<(usize, usize, WireId)> {
        for (i, cup) in self.nodes.iter().enumerate().filter(|(_, n)| n.kind == NodeKind::Cup) {
            for (j, cap) in self.nodes.iter().enumerate().filter(|(_, n)| n.kind == NodeKind::Cap) {
                let shared: Vec<WireId> = cup.ports.iter().copied().filter(|w| cap.ports.contains(w)).collect();
                if shared.len() == 1 && cup.ports[0] != cup.ports[1] {
                    return Some((i, j, shared[0]));
                }
            }
        }
        None
    }

    /// Follows a wire from a word port through cups, caps and swaps until it
    /// reaches another word port or an open output.
    pub fn trace(&self, endpoints: &BTreeMap<WireId, Vec<Endpoint>>, node: usize, port: usize) -> Result<Endpoint> {
        let mut from = Endpoint::Port { node, port };
        let mut wire = self.nodes[node].ports[port];
        for _ in 0..=self.wires.len() {
            let other = endpoints
                .get(&wire)
                .and_then(|eps| eps.iter().copied().find(|e| *e != from))
                .ok_or_else(|| Error::InvalidDiagram(format!("wire {wire} is dangling")))?;
            let Endpoint::Port { node: n, port: p } = other else { return Ok(other) };
            let next = match self.nodes[n].kind {
                NodeKind::WordState { .. } | NodeKind::WordEffect { .. } => return Ok(other),
                NodeKind::Cup | NodeKind::Cap => 1 - p,
                NodeKind::Swap => 3 - p,
            };
            from = Endpoint::Port { node: n, port: next };
            wire = self.nodes[n].ports[next];
        }
        Err(Error::InvalidDiagram("closed loop of structural wires".into()))
    }

    /// The unique word whose wires carry the target type.
    pub fn root(&self, target: &BasicType) -> Result<usize> {
        let roots: Vec<usize> = self
            .word_nodes()
            .filter(|(_, n)| n.ports.iter().any(|w| self.wire(*w).is_some_and(|w| &w.base == target)))
            .map(|(i, _)| i)
            .collect();
        match roots.as_slice() {
            [r] => Ok(*r),
            _ => Err(Error::Root(roots.len())),
        }
    }

    /// Breadth-first distances from the root on the word adjacency graph.
    pub fn distance_from_root(&self, target: &BasicType) -> Result<Vec<WordDistance>> {
        let root = self.root(target)?;
        let eps = self.endpoints();
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, n) in self.word_nodes() {
            adj.entry(i).or_default();
            for p in 0..n.ports.len() {
                if let Endpoint::Port { node, .. } = self.trace(&eps, i, p)? {
                    adj.entry(i).or_default().insert(node);
                }
            }
        }
        let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(root, 0)]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[&u] {
                if !dist.contains_key(&v) {
                    dist.insert(v, dist[&u] + 1);
                    queue.push_back(v);
                }
            }
        }
        self.word_nodes()
            .map(|(i, n)| {
                let word = n.kind.word().unwrap_or_default().to_string();
                dist.get(&i)
                    .map(|&distance| WordDistance { node: i, word: word.clone(), distance })
                    .ok_or_else(|| Error::NotBipartite(format!("word `{word}` is not connected to the root")))
            })
            .collect()
    }

    /// Rewrites into bipartite normal form: words at even distance from the
    /// root become states, words at odd distance become effects, and swaps
    /// route state wires to their effects. Outputs come last, in order.
    pub fn bigraph_rewrite(&self, target: &BasicType) -> Result<Diagram> {
        let d = self.snake_removal();
        let dist: BTreeMap<usize, usize> =
            d.distance_from_root(target)?.into_iter().map(|wd| (wd.node, wd.distance)).collect();
        let eps = d.endpoints();
        let even = |n: usize| dist[&n].is_multiple_of(2);

        // A slot is (word node, index into its type). Every state slot claims
        // the effect slot or output it is wired to.
        let mut claims: BTreeMap<Endpoint, (usize, usize)> = BTreeMap::new();
        let mut n_slots = 0;
        for (&node, _) in dist.iter().filter(|(n, _)| even(**n)) {
            let n = &d.nodes[node];
            for t in 0..n.ports.len() {
                n_slots += 1;
                let key = match d.trace(&eps, node, n.type_port(t))? {
                    Endpoint::Port { node: other, port } => {
                        if even(other) {
                            return Err(Error::NotBipartite(format!(
                                "`{}` and `{}` are linked at equal parity",
                                n.kind.word().unwrap_or_default(),
                                d.nodes[other].kind.word().unwrap_or_default()
                            )));
                        }
                        Endpoint::Port { node: other, port: d.nodes[other].type_port(port) }
                    }
                    out => out,
                };
                claims.insert(key, (node, t));
            }
        }
        // Bottom row: effects in node order (ports reversed), then outputs.
        let mut bottom: Vec<Endpoint> = Vec::new();
        for (&node, _) in dist.iter().filter(|(n, _)| !even(**n)) {
            let len = d.nodes[node].ports.len();
            bottom.extend((0..len).rev().map(|t| Endpoint::Port { node, port: t }));
        }
        bottom.extend((0..d.outputs.len()).map(Endpoint::Output));
        if bottom.len() != n_slots {
            return Err(Error::NotBipartite("state and effect wires do not pair up".into()));
        }
        let mut rank: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (pos, item) in bottom.iter().enumerate() {
            let slot = claims.get(item).ok_or_else(|| {
                let what = match *item {
                    Endpoint::Port { node, .. } => format!("effect `{}`", d.nodes[node].kind.word().unwrap_or_default()),
                    Endpoint::Output(o) => format!("output {o}"),
                };
                Error::NotBipartite(format!("a wire of {what} has no state partner"))
            })?;
            rank.insert(*slot, pos);
        }

        let mut out = Diagram { wires: Vec::new(), nodes: Vec::new(), outputs: Vec::new() };
        let fresh = |out: &mut Diagram, base: BasicType| {
            let id = out.wires.len();
            out.wires.push(Wire { id, base });
            id
        };
        let mut row: Vec<(WireId, usize)> = Vec::new();
        for (&node, _) in dist.iter().filter(|(n, _)| even(**n)) {
            let n = &d.nodes[node];
            let ty = n.kind.word_type().expect("word").clone();
            let mut ports = Vec::new();
            for t in 0..n.ports.len() {
                let base = d.base(n.ports[n.type_port(t)])?.clone();
                let id = fresh(&mut out, base);
                ports.push(id);
                row.push((id, rank[&(node, t)]));
            }
            out.nodes.push(Node { kind: NodeKind::WordState { word: n.kind.word().unwrap().into(), ty }, ports });
        }
        // Deterministic bubble sort; each adjacent exchange is one swap node.
        let len = row.len();
        for pass in 0..len {
            for k in 0..len.saturating_sub(1 + pass) {
                if row[k].1 > row[k + 1].1 {
                    let (left, right) = (row[k], row[k + 1]);
                    let (rb, lb) = (out.base(right.0)?.clone(), out.base(left.0)?.clone());
                    let a = fresh(&mut out, rb);
                    let b = fresh(&mut out, lb);
                    out.nodes.push(Node { kind: NodeKind::Swap, ports: vec![left.0, right.0, a, b] });
                    row[k] = (a, right.1);
                    row[k + 1] = (b, left.1);
                }
            }
        }
        let mut pos = 0;
        for (&node, _) in dist.iter().filter(|(n, _)| !even(**n)) {
            let n = &d.nodes[node];
            let ports = row[pos..pos + n.ports.len()].iter().map(|(w, _)| *w).collect();
            pos += n.ports.len();
            out.nodes.push(Node {
                kind: NodeKind::WordEffect {
                    word: n.kind.word().unwrap().into(),
                    ty: n.kind.word_type().expect("word").clone(),
                },
                ports,
            });
        }
        out.outputs = row[pos..].iter().map(|(w, _)| *w).collect();
        out.validate()?;
        Ok(out)
    }

    /// Graphviz rendering. Edges run from the producing port to the consuming one.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph diagram {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = match n.kind {
                NodeKind::WordState { .. } => "invtriangle",
                NodeKind::WordEffect { .. } => "triangle",
                NodeKind::Swap => "point",
                NodeKind::Cup | NodeKind::Cap => "none",
            };
            let _ = writeln!(s, "  n{i} [label=\"{}\", shape={shape}];", n.kind.label().replace('"', "\\\""));
        }
        for i in 0..self.outputs.len() {
            let _ = writeln!(s, "  out{i} [label=\"\", shape=point];");
        }
        let name = |e: &Endpoint| match e {
            Endpoint::Port { node, .. } => format!("n{node}"),
            Endpoint::Output(o) => format!("out{o}"),
        };
        let produces = |e: &Endpoint| match e {
            Endpoint::Port { node, port } => self.nodes[*node].kind.produces(*port),
            Endpoint::Output(_) => false,
        };
        for (w, eps) in self.endpoints() {
            if eps.len() != 2 {
                continue;
            }
            let (a, b) = if produces(&eps[1]) && !produces(&eps[0]) { (&eps[1], &eps[0]) } else { (&eps[0], &eps[1]) };
            let label = self.wire(w).map(|w| w.base.to_string()).unwrap_or_default();
            let dir = if produces(a) != produces(b) { "" } else { ", dir=none" };
            let _ = writeln!(s, "  {} -> {} [label=\"{label}\"{dir}];", name(a), name(b));
        }
        s.push_str("}\n");
        s
    }
}
