//! Finite-state transducers for modeling sensor and actuator attacks on
//! discrete-event systems, and synthesis of attack-resilient supervisors.
//!
//! Plants, attackers, supervisors and language models are all [`Fst`]
//! values. An automaton is an `Fst` whose transitions carry the same input
//! and output label.

pub mod algebra;
pub mod apply;
pub mod attacks;
pub mod automaton;
pub mod casestudy;
pub mod error;
pub mod fst;
pub mod nonblocking;
pub mod ops;
pub mod random;
pub mod samples;
pub mod symbol;
pub mod synthesis;
pub mod text;
pub mod verdict;

pub use algebra::{compose, compose_traced, invert, parallel, CompositionTrace};
pub use apply::{apply, relation_equal_upto, ApplyResult};
pub use automaton::{determinize, language_included, project_input, project_output};
pub use error::{Error, Result};
pub use fst::{Fst, StateId, Transition, Word};
pub use ops::{normalize, remove_epsilon_moves, trim, WordArc, WordFst};
pub use symbol::{Label, SymbolTable, EPS};
pub use nonblocking::{check_nonblocking, determinize_pairs, NonblockingReport};
pub use synthesis::{
    filter, synth_actuator, synth_both, synth_sensor, DesiredLanguage, FilterMode, SynthesisOptions,
    SynthesisReport,
};
pub use text::{read_fst, to_dot, write_fst};
pub use verdict::{Verdict, Witness};
