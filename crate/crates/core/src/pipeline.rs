//! End-to-end stages shared by the CLI, the FFI layer and the tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compiler::{choi_form, compile_bigraph, compile_grammar_meaning, Circuit, QubitConfig};
use crate::diagram::Diagram;
use crate::lexicon::{Lexicon, Sentence};
use crate::pregroup::{Reduction, ReductionLinkage};
use crate::simulator::{fidelity, simulate, MeaningState};
use crate::training::{PairTask, SentencePair};
use crate::{Error, ParameterStore, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Bigraph,
    GrammarMeaning,
    Choi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rewrite {
    /// Cap-role words become caps and zig-zags are straightened.
    Snake,
    /// Every word keeps its own ansatz.
    None,
}

macro_rules! str_enum {
    ($ty:ident { $($v:ident => $s:literal),* }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($ty::$v),)*
                    other => Err(Error::Compile(format!("unknown {} `{other}`", stringify!($ty).to_lowercase()))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$v => $s,)* })
            }
        }
    };
}

str_enum!(Form { Bigraph => "bigraph", GrammarMeaning => "grammar-meaning", Choi => "choi" });
str_enum!(Rewrite { Snake => "snake", None => "none" });

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub form: Form,
    pub rewrite: Rewrite,
    pub qubits: QubitConfig,
}

impl CompileOptions {
    pub fn new(lex: &Lexicon, form: Form, rewrite: Rewrite) -> Self {
        Self { form, rewrite, qubits: lex.qubits.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordReport {
    pub text: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseReport {
    pub sentence: String,
    pub language: String,
    pub words: Vec<WordReport>,
    pub grammatical: bool,
    pub cups: Vec<(usize, usize)>,
    pub survivors: Vec<usize>,
}

pub fn parse(lex: &Lexicon, text: &str) -> Result<(Sentence, Reduction)> {
    let s = lex.sentence(text)?;
    let r = lex.grammar.reduce(&s.types())?;
    Ok((s, r))
}

pub fn parse_report(lex: &Lexicon, text: &str) -> Result<ParseReport> {
    let (s, r) = parse(lex, text)?;
    let ReductionLinkage { cups, survivors } = r.linkage().clone();
    Ok(ParseReport {
        sentence: s.text.clone(),
        language: s.language.clone(),
        words: s.words.iter().map(|(w, t)| WordReport { text: w.clone(), ty: t.to_string() }).collect(),
        grammatical: r.is_grammatical(),
        cups,
        survivors,
    })
}

/// The sentence diagram of a grammatical sentence.
pub fn diagram(lex: &Lexicon, text: &str) -> Result<(Sentence, Diagram)> {
    let (s, r) = parse(lex, text)?;
    if !r.is_grammatical() {
        return Err(Error::Ungrammatical(s.text));
    }
    let d = Diagram::from_reduction(&lex.grammar, &s.words, r.linkage())?;
    Ok((s, d))
}

pub fn rewrite(s: &Sentence, d: &Diagram, how: Rewrite) -> Result<Diagram> {
    match how {
        Rewrite::None => Ok(d.clone()),
        Rewrite::Snake => Ok(d.substitute_cap_words(&s.cap_words())?.snake_removal()),
    }
}

/// The diagram a form compiles from: rewritten, and in bipartite layout for
/// the bigraph form.
pub fn compile_diagram(lex: &Lexicon, text: &str, opts: &CompileOptions) -> Result<Diagram> {
    let (s, d) = diagram(lex, text)?;
    let d = rewrite(&s, &d, opts.rewrite)?;
    match opts.form {
        Form::Bigraph => d.bigraph_rewrite(lex.grammar.target()),
        Form::GrammarMeaning | Form::Choi => Ok(d),
    }
}

pub fn compile(lex: &Lexicon, text: &str, opts: &CompileOptions) -> Result<Circuit> {
    let d = compile_diagram(lex, text, opts)?;
    let target = lex.grammar.target();
    let mut c = match opts.form {
        Form::Bigraph => compile_bigraph(&d, &opts.qubits)?,
        Form::GrammarMeaning => compile_grammar_meaning(&d, target, &opts.qubits)?,
        Form::Choi => choi_form(&compile_grammar_meaning(&d, target, &opts.qubits)?)?,
    };
    if c.metadata.label.is_none() {
        c.metadata.label = Some(format!("{}: {}", opts.form, text.split_whitespace().collect::<Vec<_>>().join(" ")));
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub a: String,
    pub b: String,
    pub fidelity: f64,
    pub meaning_a: MeaningState,
    pub meaning_b: MeaningState,
}

pub fn compare(lex: &Lexicon, a: &str, b: &str, opts: &CompileOptions, store: &ParameterStore) -> Result<CompareReport> {
    let (ca, cb) = (compile(lex, a, opts)?, compile(lex, b, opts)?);
    let (ma, mb) = (simulate(&ca, store)?, simulate(&cb, store)?);
    Ok(CompareReport { a: a.into(), b: b.into(), fidelity: fidelity(&ma, &mb)?, meaning_a: ma, meaning_b: mb })
}

pub fn pair_task(lex: &Lexicon, pairs: &[(String, String)], opts: &CompileOptions) -> Result<PairTask> {
    let pairs = pairs
        .iter()
        .map(|(a, b)| {
            Ok(SentencePair { label: format!("{a} / {b}"), a: compile(lex, a, opts)?, b: compile(lex, b, opts)? })
        })
        .collect::<Result<Vec<_>>>()?;
    PairTask::new(pairs)
}
