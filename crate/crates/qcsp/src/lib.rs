//! Analysis toolkit for quantified constraint satisfaction problems
//! (QCSPs): finite-domain variables under an ordered exists/forall prefix,
//! constrained by extensional relations.
//!
//! - [`model`]: problems, assignments, relations, negation and relaxation.
//! - [`expr`]: linear comparison expressions compiled to relations.
//! - [`game`]: truth evaluation, strategies, scenarios, and the outcome set
//!   computed either by strategy enumeration or by a lexicographic
//!   membership scan.
//! - [`properties`]: deep, shallow, dual-shallow and classical value and
//!   variable properties over outcome sets.
//! - [`simplify`]: truth-preserving value removal and fixing with a
//!   justified fixpoint loop.
//! - [`local`]: per-constraint detection with sound combination rules and
//!   certificate-driven pruning.
//! - [`harness`]: random instance generation and validation of every
//!   guaranteed law, with fault injection for negative controls.
//! - [`format`]: the line-oriented text format.
//! - [`report`]: JSON documents emitted by the CLI.

pub mod expr;
pub mod format;
pub mod game;
pub mod harness;
pub mod local;
pub mod model;
pub mod properties;
pub mod report;
pub mod simplify;
