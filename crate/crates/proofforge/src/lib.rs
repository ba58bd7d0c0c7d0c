//! Proof search over derivation-structure hypergraphs for the description
//! logics EL and ELI.
//!
//! The pipeline: [`logic`] parses and normalizes theories, [`derivers`]
//! saturates them into derivation structures (every allowed inference as a
//! hyperedge), [`optimizer`] extracts proofs that are optimal under the
//! recursive quality measures of [`measures`] or decides budget questions
//! against the oracle interface, and [`generators`] builds hardness
//! instances whose answers are checked by independent semantic oracles
//! (a QBF evaluator and a bounded machine simulator). [`emit`] renders
//! everything as JSON or DOT; [`testgen`] provides seeded random fixtures
//! for the property suites.
//!
//! See the crate examples for a runnable tour of each capability, and the
//! `proofforge` binary for the command-line front end.

pub mod cli;
pub mod derivers;
pub mod emit;
pub mod generators;
pub mod hypergraph;
pub mod logic;
pub mod measures;
pub mod optimizer;
pub mod testgen;
pub mod weight;

pub use weight::Weight;
