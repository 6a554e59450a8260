//! ID-based algorithms and their identifier-free behaviors.
//!
//! An [`Algorithm`] maps `(ID, own state, neighbor states by port)` to a new
//! state. Its body is either a guarded-rule program ([`RuleSet`]) or an
//! explicit [`TransitionTable`]. Fixing the identifier yields a
//! [`Behavior`], the object the lower-bound engine counts and buckets.

mod behavior;
pub mod dsl;
mod table;

use alloc::string::String;

use thiserror::Error;

pub use behavior::{canonical_behavior_equal, input_count, pack_input, unpack_input, Behavior};
pub use dsl::{parse_rules, parse_rules_with, render, ParseError, RuleSet};
pub use table::TransitionTable;

use crate::{Ident, State, MAX_WIDTH};

/// Errors from building or evaluating algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("view has {found} entries, algorithm expects degree {expected}")]
    Arity { expected: usize, found: usize },
    #[error("state {value} does not fit in {f} bits")]
    StateTooWide { value: State, f: u32 },
    #[error("behavior table for f={f}, d={d} is too large to index")]
    TooLarge { f: u32, d: usize },
    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("behavior shapes differ: f={f}, d={d} vs f={other_f}, d={other_d}")]
    ShapeMismatch { f: u32, d: usize, other_f: u32, other_d: usize },
    #[error("rule {label:?} reads port {port}, but nodes have degree {degree}")]
    PortOutOfRange { label: String, port: usize, degree: usize },
    #[error("memory width {0} exceeds the supported maximum of {MAX_WIDTH} bits")]
    WidthTooLarge(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
}

/// The body of an algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    /// Guarded rules; first enabled rule fires.
    Rules(RuleSet),
    /// Explicit per-identifier transition tables.
    Table(TransitionTable),
}

/// An ID-based algorithm for `f`-bit registers on degree-`d` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algorithm {
    name: String,
    f: u32,
    d: usize,
    body: Body,
}

impl Algorithm {
    /// Wraps a rule set. The register width is the sum of field widths.
    pub fn from_rules(name: impl Into<String>, rules: RuleSet, d: usize) -> Result<Self, AlgorithmError> {
        if d == 0 {
            return Err(AlgorithmError::ZeroDegree);
        }
        let f = rules.width();
        if f > MAX_WIDTH {
            return Err(AlgorithmError::WidthTooLarge(f));
        }
        if let Some((label, port)) = rules.port_beyond(d) {
            return Err(AlgorithmError::PortOutOfRange { label: label.into(), port, degree: d });
        }
        Ok(Algorithm { name: name.into(), f, d, body: Body::Rules(rules) })
    }

    /// Parses `source` for degree-`d` nodes.
    pub fn parse(name: impl Into<String>, source: &str, d: usize) -> Result<Self, AlgorithmError> {
        let rules = parse_rules_with(source, None, Some(d))?;
        Algorithm::from_rules(name, rules, d)
    }

    /// Wraps a transition table.
    pub fn from_table(name: impl Into<String>, table: TransitionTable) -> Self {
        Algorithm { name: name.into(), f: table.f(), d: table.d(), body: Body::Table(table) }
    }

    /// Report label.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Bits per register.
    pub fn f(&self) -> u32 {
        self.f
    }

    /// Expected node degree.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The body.
    pub fn body(&self) -> &Body {
        &self.body
    }

    /// Whether any rule or table entry depends on the identifier. For rule
    /// sets this is syntactic; for tables it compares per-id entries with
    /// the fallback.
    pub fn mentions_id(&self) -> bool {
        match &self.body {
            Body::Rules(rs) => rs.mentions_id(),
            Body::Table(t) => t.depends_on_id(),
        }
    }

    fn check_inputs(&self, own: State, view: &[State]) -> Result<(), AlgorithmError> {
        if view.len() != self.d {
            return Err(AlgorithmError::Arity { expected: self.d, found: view.len() });
        }
        if let Some(&bad) = core::iter::once(&own).chain(view).find(|&&s| s >> self.f != 0) {
            return Err(AlgorithmError::StateTooWide { value: bad, f: self.f });
        }
        Ok(())
    }

    /// The new state. Rule bodies fire the first rule whose guard holds and
    /// keep the state when none does.
    pub fn evaluate(&self, id: Ident, own: State, view: &[State]) -> Result<State, AlgorithmError> {
        self.check_inputs(own, view)?;
        Ok(self.evaluate_unchecked(id, own, view))
    }

    /// Enabledness: some guard holds (rules), or the output differs from
    /// the current state (tables).
    pub fn is_enabled(&self, id: Ident, own: State, view: &[State]) -> Result<bool, AlgorithmError> {
        self.check_inputs(own, view)?;
        Ok(self.step_unchecked(id, own, view).is_some())
    }

    pub(crate) fn evaluate_unchecked(&self, id: Ident, own: State, view: &[State]) -> State {
        self.step_unchecked(id, own, view).unwrap_or(own)
    }

    /// `Some(new state)` when enabled, `None` when disabled.
    pub(crate) fn step_unchecked(&self, id: Ident, own: State, view: &[State]) -> Option<State> {
        match &self.body {
            Body::Rules(rs) => {
                let env = dsl::Env { id, own, view };
                rs.first_enabled(&env).map(|r| rs.fire(r, &env))
            }
            Body::Table(t) => {
                let next = t.behavior_for(id).apply(own, view);
                (next != own).then_some(next)
            }
        }
    }
}
