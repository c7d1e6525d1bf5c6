//! Graded distributed doxastic attitudes: a reasoner for a two-layer modal
//! logic in which agents hold weighted (graded) belief bases and groups pool
//! them to draw distributed conclusions of measurable strength.
//!
//! The crate provides:
//!
//! - the formula language and its parser/printer ([`formula`]);
//! - belief-base models and model checking ([`semantics`]);
//! - Kripke-style doxastic models with explicit or derived distance tables,
//!   plus validation of their defining conditions ([`kripke`]);
//! - the four satisfaction-preserving transformations between the model
//!   classes ([`transforms`]);
//! - a tableau decision procedure with countermodel extraction ([`tableau`]);
//! - axiom-schema instantiation for validity testing ([`axioms`]);
//! - a brute-force oracle and fuzzing harness ([`oracle`]).
//!
//! With the default `parallel` feature the oracle fans out over rayon; the
//! sequential entry points remain available and return identical results.

pub mod agents;
pub mod axioms;
pub mod formula;
pub mod grades;
pub mod json;
pub mod kripke;
pub mod oracle;
mod rng;
pub mod semantics;
pub mod tableau;
pub mod transforms;

pub use agents::{Agent, Group};
pub use formula::{parse, parse_inner, Atom, InnerFormula, OuterFormula};
pub use grades::Grade;
