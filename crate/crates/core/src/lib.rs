//! Deterministic self-stabilizing algorithms in the state model.
//!
//! The crate has two halves that share one vocabulary:
//!
//! * a laboratory for guarded-rule algorithms on rings and d-regular graphs:
//!   a small rule language ([`algorithm::dsl`]), the daemon hierarchy
//!   ([`scheduler`]), problem legality predicates ([`problems`]) and an
//!   explicit-state model checker ([`checker`]);
//! * an executable memory lower bound ([`lowerbound`]): for an ID-based
//!   algorithm with `f` bits per node it counts the possible per-identifier
//!   behaviors, finds `n` identifiers that share one behavior, and traps the
//!   resulting ring in homogeneous configurations forever. The output is a
//!   replayable [`lowerbound::Witness`].
//!
//! Everything here is pure computation over `alloc`; file formats, reports
//! and the command line live in the `stabilab` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algorithm;
pub mod builtin;
pub mod checker;
pub mod lowerbound;
pub mod model;
pub mod problems;
pub mod scheduler;

pub use algorithm::{Algorithm, Behavior, Body, RuleSet, TransitionTable};
pub use checker::{Trace, TraceStatus, Verdict, VerdictKind};
pub use lowerbound::{BehaviorSpace, IdClass, TrapTrace, Witness, WitnessMode};
pub use model::{Configuration, Exponent, IdAssignment, Topology, TopologyKind};
pub use problems::ProblemSpec;
pub use scheduler::{Daemon, Instance};

/// A node's register content: an `f`-bit value stored in the low bits.
pub type State = u64;

/// A node identifier, `1 ..= id_cap`.
pub type Ident = u64;

/// Widest register the crate accepts.
pub const MAX_WIDTH: u32 = 32;
