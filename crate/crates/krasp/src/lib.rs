//! Answer-set semantics of grounded normal logic programs, their
//! characteristic automata, and certified cascade decompositions.
//!
//! The library is organized around a small pipeline:
//!
//! - [`asp`] — programs, the immediate consequence operator, least fixpoints,
//!   answer sets, and syntactic classification;
//! - [`automata`] — finite automata, morphisms, congruences, quotients, and
//!   the characteristic automaton of a program;
//! - [`cascade`] — loop-free (cascade) products of automata and of programs;
//! - [`represent`] — certificates witnessing that a product represents a
//!   target machine, exhaustive verification, and representation search;
//! - [`decompose`] — constructive builders: programmability witnesses, the
//!   positive-tight compiler, full-transformation embeddings, the bounded
//!   decomposition engine, and the end-to-end program pipeline;
//! - [`io`] — JSON file formats for automata, products, certificates, and
//!   decomposition bundles;
//! - [`corpus`] — seeded random program generators for tests.

pub mod asp;
pub mod automata;
pub mod cascade;
pub mod corpus;
pub mod decompose;
pub mod io;
pub mod parse;
pub mod represent;

pub use asp::{Alphabet, AspError, Atom, Interpretation, Program, Rule};
pub use automata::Automaton;
pub use cascade::{CascadeSpec, ProgramProduct};
pub use represent::{Certificate, Product};
