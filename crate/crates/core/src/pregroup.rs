//! Pregroup types and reductions.
//!
//! A simple type is a basic type decorated with an adjoint order `z`:
//! `z < 0` counts left adjoints, `z > 0` right adjoints. Two adjacent simple
//! types `a b` contract to the unit when their bases agree and
//! `b.z == a.z + 1`, which covers both `p p^r -> 1` and `p^l p -> 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasicType(String);

impl BasicType {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::MalformedType(name));
        }
        Ok(Self(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleType {
    pub base: BasicType,
    pub z: i32,
}

impl SimpleType {
    pub fn new(base: BasicType, z: i32) -> Self {
        Self { base, z }
    }

    pub fn plain(base: BasicType) -> Self {
        Self { base, z: 0 }
    }

    pub fn left_adjoint(&self) -> Self {
        Self { base: self.base.clone(), z: self.z - 1 }
    }

    pub fn right_adjoint(&self) -> Self {
        Self { base: self.base.clone(), z: self.z + 1 }
    }

    /// Parses `n`, `n^r`, `n^ll`, ... without checking the base against a grammar.
    fn parse_unchecked(token: &str) -> Result<Self> {
        let malformed = || Error::MalformedType(token.to_string());
        let (base, suffix) = match token.split_once('^') {
            Some((base, suffix)) => (base, Some(suffix)),
            None => (token, None),
        };
        let base = BasicType::new(base).map_err(|_| malformed())?;
        let z = match suffix {
            None => 0,
            Some(s) if !s.is_empty() && s.chars().all(|c| c == 'r') => s.len() as i32,
            Some(s) if !s.is_empty() && s.chars().all(|c| c == 'l') => -(s.len() as i32),
            Some(_) => return Err(malformed()),
        };
        Ok(Self { base, z })
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        match self.z {
            0 => Ok(()),
            z if z > 0 => write!(f, "^{}", "r".repeat(z as usize)),
            z => write!(f, "^{}", "l".repeat(z.unsigned_abs() as usize)),
        }
    }
}

/// A juxtaposition of simple types. The empty type is the monoidal unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PregroupType {
    pub simples: Vec<SimpleType>,
}

impl PregroupType {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn is_unit(&self) -> bool {
        self.simples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simples.is_empty()
    }

    pub fn concat(&self, other: &PregroupType) -> PregroupType {
        let mut simples = self.simples.clone();
        simples.extend(other.simples.iter().cloned());
        PregroupType { simples }
    }
}

impl fmt::Display for PregroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.simples.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for PregroupType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PregroupType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for PregroupType {
    type Err = Error;

    /// Syntactic parse only; use [`Grammar::parse_type`] to also check bases.
    fn from_str(text: &str) -> Result<Self> {
        let simples = text
            .split_whitespace()
            .map(|tok| tok.trim_matches(|c| c == '(' || c == ')'))
            .filter(|tok| !tok.is_empty())
            .map(SimpleType::parse_unchecked)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { simples })
    }
}

/// Basic types, the sentence target and alias identifications (e.g. `o = n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grammar {
    basic_types: Vec<BasicType>,
    target: BasicType,
    #[serde(default)]
    aliases: BTreeMap<BasicType, BasicType>,
}

impl Grammar {
    pub fn new(
        basic_types: Vec<BasicType>,
        target: BasicType,
        aliases: BTreeMap<BasicType, BasicType>,
    ) -> Result<Self> {
        let grammar = Self { basic_types, target, aliases };
        grammar.validate()?;
        Ok(grammar)
    }

    /// `n`, `s`, `o` with target `s` and no aliases.
    pub fn transitive() -> Self {
        let b = |s: &str| BasicType(s.to_string());
        Self { basic_types: vec![b("n"), b("s"), b("o")], target: b("s"), aliases: BTreeMap::new() }
    }

    /// [`Grammar::transitive`] with the object type identified with the noun type.
    pub fn transitive_with_object_as_noun() -> Self {
        let mut g = Self::transitive();
        g.aliases.insert(BasicType("o".into()), BasicType("n".into()));
        g
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for b in &self.basic_types {
            BasicType::new(b.name())?;
            if !seen.insert(b) {
                return Err(Error::InvalidGrammar(format!("basic type `{b}` listed twice")));
            }
        }
        if !seen.contains(&self.target) {
            return Err(Error::InvalidGrammar(format!("target `{}` is not a basic type", self.target)));
        }
        for (from, to) in &self.aliases {
            if !seen.contains(from) || !seen.contains(to) {
                return Err(Error::InvalidGrammar(format!("alias {from} -> {to} names an unknown type")));
            }
            if self.aliases.contains_key(to) {
                return Err(Error::InvalidGrammar(format!("alias chain through `{to}`")));
            }
        }
        Ok(())
    }

    pub fn basic_types(&self) -> &[BasicType] {
        &self.basic_types
    }

    pub fn target(&self) -> &BasicType {
        &self.target
    }

    pub fn aliases(&self) -> &BTreeMap<BasicType, BasicType> {
        &self.aliases
    }

    pub fn contains(&self, b: &BasicType) -> bool {
        self.basic_types.contains(b)
    }

    /// The representative of `b` under the alias map.
    pub fn canonical<'a>(&'a self, b: &'a BasicType) -> &'a BasicType {
        self.aliases.get(b).unwrap_or(b)
    }

    pub fn parse_type(&self, text: &str) -> Result<PregroupType> {
        let ty: PregroupType = text.parse()?;
        if let Some(bad) = ty.simples.iter().find(|s| !self.contains(&s.base)) {
            return Err(Error::UnknownBasicType(bad.base.to_string()));
        }
        Ok(ty)
    }

    /// Whether `left right` contracts to the unit.
    pub fn contracts(&self, left: &SimpleType, right: &SimpleType) -> bool {
        self.canonical(&left.base) == self.canonical(&right.base) && right.z == left.z + 1
    }

    /// Reduces the juxtaposition of `types` towards the target type.
    ///
    /// Repeatedly links the leftmost adjacent contractible pair among the
    /// not-yet-linked simple types until none remains. Indices refer to the
    /// flattened sequence of all simple types in order.
    pub fn reduce(&self, types: &[PregroupType]) -> Result<Reduction> {
        if types.is_empty() {
            return Err(Error::EmptySentence);
        }
        let flat: Vec<&SimpleType> = types.iter().flat_map(|t| t.simples.iter()).collect();
        let mut alive: Vec<usize> = (0..flat.len()).collect();
        let mut cups = Vec::new();
        while let Some(k) = (0..alive.len().saturating_sub(1))
            .find(|&k| self.contracts(flat[alive[k]], flat[alive[k + 1]]))
        {
            cups.push((alive[k], alive[k + 1]));
            alive.drain(k..k + 2);
        }
        let grammatical = alive.len() == 1 && {
            let s = flat[alive[0]];
            s.z == 0 && self.canonical(&s.base) == self.canonical(&self.target)
        };
        let linkage = ReductionLinkage { cups, survivors: alive };
        Ok(if grammatical { Reduction::Grammatical(linkage) } else { Reduction::Ungrammatical(linkage) })
    }

    pub fn is_grammatical(&self, types: &[PregroupType]) -> bool {
        matches!(self.reduce(types), Ok(Reduction::Grammatical(_)))
    }
}

/// Cups over the flattened simple-type sequence, in the order they were linked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLinkage {
    pub cups: Vec<(usize, usize)>,
    pub survivors: Vec<usize>,
}

impl ReductionLinkage {
    pub fn cup_set(&self) -> BTreeSet<(usize, usize)> {
        self.cups.iter().copied().collect()
    }

    /// True when no two cups `(i, j)`, `(k, l)` satisfy `i < k < j < l`.
    pub fn is_planar(&self) -> bool {
        self.cups.iter().all(|&(i, j)| {
            self.cups.iter().all(|&(k, l)| !(i < k && k < j && j < l))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    Grammatical(ReductionLinkage),
    /// Carries the partial linkage; survivors differ from `[target]`.
    Ungrammatical(ReductionLinkage),
}

impl Reduction {
    pub fn linkage(&self) -> &ReductionLinkage {
        match self {
            Reduction::Grammatical(l) | Reduction::Ungrammatical(l) => l,
        }
    }

    pub fn into_linkage(self) -> ReductionLinkage {
        match self {
            Reduction::Grammatical(l) | Reduction::Ungrammatical(l) => l,
        }
    }

    pub fn is_grammatical(&self) -> bool {
        matches!(self, Reduction::Grammatical(_))
    }
}
