//! Compiles grammatical sentences into tensor-semantic meanings and
//! parametrised quantum circuits.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`pregroup`]: pregroup types and cup-only reduction to the sentence type.
//! * [`diagram`]: string diagrams built from a reduction, plus the cap
//!   substitution, snake removal and bigraph rewrites.
//! * [`fvect`]: dense tensors, the compact-closed structure maps and diagram
//!   evaluation by contraction. This is the ground-truth oracle.
//! * [`compiler`]: word ansatze, effects by transposition, the bigraph circuit,
//!   the grammar+meaning circuit and its Choi form, circuit export.
//! * [`simulator`]: dense statevector simulation with post-selection.
//! * [`training`]: parameter optimisation so synonymous sentences agree.
//! * [`lexicon`] and [`pipeline`]: the lexicon file and end-to-end drivers used
//!   by the `synqc` binary.

pub mod compiler;
pub mod diagram;
mod error;
pub mod fvect;
pub mod json;
pub mod lexicon;
pub mod params;
pub mod pipeline;
pub mod pregroup;
pub mod simulator;
pub mod training;

pub use error::{Error, Result};
pub use params::ParameterStore;
