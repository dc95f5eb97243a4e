use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown basic type `{0}`")]
    UnknownBasicType(String),
    #[error("malformed simple type `{0}`")]
    MalformedType(String),
    #[error("invalid grammar: {0}")]
    InvalidGrammar(String),
    #[error("nothing to reduce: the sentence has no words")]
    EmptySentence,

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("word `{word}` cannot become a cap: {reason}")]
    NotACap { word: String, reason: String },
    #[error("expected exactly one root word, found {0}")]
    Root(usize),
    #[error("diagram is not bipartite around the root: {0}")]
    NotBipartite(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("missing tensor for word `{0}`")]
    MissingTensor(String),
    #[error("no dimension configured for basic type `{0}`")]
    MissingDimension(String),

    #[error("no qubit count configured for basic type `{0}`")]
    UnconfiguredQubits(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("cannot compile: {0}")]
    Compile(String),
    #[error("unresolved angle parameter `{0}`")]
    UnresolvedAngle(String),
    #[error("gate `{0}` has no computational-basis transpose in this gate set")]
    NoTranspose(String),

    #[error("circuit has {0} open qubits; an amplitude needs none")]
    OpenQubits(usize),
    #[error("circuit too large for a dense unitary: {0} qubits")]
    TooManyQubits(usize),
    #[error("meaning state is the zero vector{}", .0.as_deref().map(|s| format!(" ({s})")).unwrap_or_default())]
    ZeroVector(Option<String>),
    #[error("open-qubit count mismatch: {0} vs {1}")]
    OpenWireMismatch(usize, usize),

    #[error("non-finite loss at iteration {iteration}: {loss}")]
    NonFiniteLoss { iteration: usize, loss: f64 },
    #[error("invalid training setup: {0}")]
    Training(String),

    #[error("`{0}` does not reduce to the sentence type")]
    Ungrammatical(String),
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("unsupported export: {0}")]
    Export(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
