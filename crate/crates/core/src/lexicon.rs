//! Lexicon files: grammar, dimensions, qubit budgets, words and sentence pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compiler::QubitConfig;
use crate::fvect::{DimConfig, Tensor, TensorLiteral};
use crate::pregroup::{Grammar, PregroupType};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const LEXICON_ENV: &str = "SYNQC_LEXICON";

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Meaning given by a parametrised word ansatz.
    Ansatz,
    /// A function word read as the identity wire.
    Cap,
    Tensor(TensorLiteral),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordEntry {
    pub text: String,
    pub language: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub schema: u32,
    pub grammar: Grammar,
    #[serde(default)]
    pub dims: DimConfig,
    pub qubits: QubitConfig,
    pub words: Vec<WordEntry>,
    #[serde(default)]
    pub pairs: Vec<PairEntry>,
}

/// A sentence resolved against one language of a lexicon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sentence {
    pub text: String,
    pub language: String,
    pub words: Vec<(String, PregroupType)>,
    #[serde(skip)]
    pub roles: Vec<Role>,
}

impl Sentence {
    pub fn types(&self) -> Vec<PregroupType> {
        self.words.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn cap_words(&self) -> BTreeSet<String> {
        self.words.iter().zip(&self.roles).filter(|(_, r)| **r == Role::Cap).map(|((w, _), _)| w.clone()).collect()
    }
}

impl Lexicon {
    /// The built-in lexicon of the shipped Persian/English corpus.
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("built-in lexicon is valid")
    }

    /// The file named by `SYNQC_LEXICON`, else the built-in lexicon.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(LEXICON_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parses and validates. Alias types inherit the dimension and qubit
    /// count of the type they stand for.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut lex: Lexicon = serde_json::from_str(text)?;
        if lex.schema != SCHEMA_VERSION {
            return Err(Error::Lexicon(format!("schema {} is not supported (expected {SCHEMA_VERSION})", lex.schema)));
        }
        lex.grammar.validate()?;
        for (alias, target) in lex.grammar.aliases().clone() {
            if let Some(&d) = lex.dims.dims.get(&target) {
                lex.dims.dims.entry(alias.clone()).or_insert(d);
            }
            if let Some(&q) = lex.qubits.qubits.get(&target) {
                lex.qubits.qubits.entry(alias).or_insert(q);
            }
        }
        lex.dims = DimConfig::new(lex.dims.dims)?;
        lex.qubits.validate()?;
        for b in lex.dims.dims.keys().chain(lex.qubits.qubits.keys()) {
            if !lex.grammar.contains(b) {
                return Err(Error::UnknownBasicType(b.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        for w in &lex.words {
            if !seen.insert((&w.language, &w.text)) {
                return Err(Error::Lexicon(format!("`{}` listed twice for language `{}`", w.text, w.language)));
            }
            if w.text.split_whitespace().count() != 1 {
                return Err(Error::Lexicon(format!("word `{}` must be a single token", w.text)));
            }
            let ty = lex.grammar.parse_type(&w.ty)?;
            if let Role::Tensor(lit) = &w.role {
                let t = Tensor::try_from(lit.clone())?;
                let expected = ty.simples.iter().map(|s| lex.dims.dim(&s.base)).collect::<Result<Vec<_>>>()?;
                if t.shape() != expected.as_slice() {
                    return Err(Error::Shape(format!("tensor for `{}` has shape {:?}, expected {expected:?}", w.text, t.shape())));
                }
            }
        }
        for p in &lex.pairs {
            lex.sentence(&p.a)?;
            lex.sentence(&p.b)?;
        }
        Ok(lex)
    }

    /// Languages in order of first appearance.
    pub fn languages(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for w in &self.words {
            if !out.contains(&w.language.as_str()) {
                out.push(&w.language);
            }
        }
        out
    }

    fn entry(&self, language: &str, text: &str) -> Option<&WordEntry> {
        self.words.iter().find(|w| w.language == language && w.text == text)
    }

    /// Splits on whitespace and resolves every token in the first language
    /// that has all of them.
    pub fn sentence(&self, text: &str) -> Result<Sentence> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        if let Some(missing) = tokens.iter().find(|t| !self.words.iter().any(|w| w.text == **t)) {
            return Err(Error::UnknownWord(missing.to_string()));
        }
        let language = self
            .languages()
            .into_iter()
            .find(|l| tokens.iter().all(|t| self.entry(l, t).is_some()))
            .ok_or_else(|| Error::Lexicon(format!("no single language contains every word of `{text}`")))?;
        let mut words = Vec::new();
        let mut roles = Vec::new();
        for t in &tokens {
            let e = self.entry(language, t).expect("checked above");
            words.push((e.text.clone(), self.grammar.parse_type(&e.ty)?));
            roles.push(e.role.clone());
        }
        Ok(Sentence { text: tokens.join(" "), language: language.to_string(), words, roles })
    }

    /// Tensor literals of every word that has one, keyed by word text.
    pub fn tensors(&self) -> Result<BTreeMap<String, Tensor>> {
        self.words
            .iter()
            .filter_map(|w| match &w.role {
                Role::Tensor(lit) => Some(Tensor::try_from(lit.clone()).map(|t| (w.text.clone(), t))),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pregroup::BasicType;

    #[test]
    fn builtin_resolves_the_corpus() {
        let lex = Lexicon::builtin();
        assert_eq!(lex.languages(), vec!["fa", "en"]);
        let fa = lex.sentence("Sara ketab ra kharid").unwrap();
        assert_eq!(fa.language, "fa");
        assert_eq!(fa.cap_words(), BTreeSet::from(["ra".to_string()]));
        let en = lex.sentence("Sara  bought the book").unwrap();
        assert_eq!(en.language, "en");
        assert_eq!(en.text, "Sara bought the book");
        assert_eq!(en.words[1].1.to_string(), "n^r s n^l");
        let o = BasicType::new("o").unwrap();
        assert_eq!(lex.qubits.count(&o).unwrap(), 1);
    }

    #[test]
    fn resolution_errors() {
        let lex = Lexicon::builtin();
        assert!(matches!(lex.sentence("Sara reads"), Err(Error::UnknownWord(w)) if w == "reads"));
        assert!(matches!(lex.sentence("  "), Err(Error::EmptySentence)));
        assert!(matches!(lex.sentence("Sara ketab the bought"), Err(Error::Lexicon(_))));
    }

    #[test]
    fn schema_and_shapes_checked() {
        let text = DEFAULT_LEXICON.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(Lexicon::from_json(&text), Err(Error::Lexicon(_))));
        let mut lex = Lexicon::builtin();
        lex.words[0].role = Role::Tensor(TensorLiteral { shape: vec![3], entries: vec![[0.0, 0.0]; 3] });
        let text = serde_json::to_string(&lex).unwrap();
        assert!(matches!(Lexicon::from_json(&text), Err(Error::Shape(_))));
    }
}
