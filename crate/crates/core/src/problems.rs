//! Problem specifications and legality predicates.
//!
//! A [`ProblemSpec`] names which bit-fields of the register are
//! specification variables and how to judge them. Legality never looks at
//! any other bit.
//!
//! Encodings: colors are `0 ..= Δ` (palette `Δ + 1` unless overridden);
//! parent pointers use `0` for "no parent" (the root) and `k + 1` for port
//! `k`; the leader flag is `1` for the leader.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::model::{state_mask, Configuration, Topology};
use crate::State;

/// Errors from problem specifications.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("specification variable {name:?} needs bits {offset}..{end} but states have {f} bits")]
    FieldTooWide { name: String, offset: u32, end: u32, f: u32 },
    #[error("configuration has {found} nodes, topology has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("{0} has no solution-encoding bound")]
    Unsupported(String),
    #[error("problem {0:?} expects exactly one specification variable")]
    Layout(String),
}

/// A bit-field holding a specification variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpecVar {
    /// Variable name.
    pub name: String,
    /// Offset from the least-significant bit.
    pub offset: u32,
    /// Width in bits.
    pub width: u32,
}

impl SpecVar {
    /// A named field.
    pub fn new(name: impl Into<String>, offset: u32, width: u32) -> Self {
        SpecVar { name: name.into(), offset, width }
    }

    /// Extracts this field from `state`.
    pub fn read(&self, state: State) -> State {
        if self.width == 0 {
            return 0;
        }
        (state >> self.offset) & state_mask(self.width)
    }
}

/// Legality predicate over decoded specification variables:
/// `(topology, values[var][node]) -> legal`.
pub type LegalFn = Arc<dyn Fn(&Topology, &[Vec<State>]) -> bool + Send + Sync>;

/// User-defined problems.
#[derive(Clone)]
pub enum CustomRule {
    /// Every configuration is legal.
    Trivial,
    /// Legal iff every specification variable equals the given value at
    /// every node.
    AllEqual(State),
    /// Arbitrary predicate.
    Predicate(LegalFn),
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CustomRule::Trivial => f.write_str("Trivial"),
            CustomRule::AllEqual(v) => f.debug_tuple("AllEqual").field(v).finish(),
            CustomRule::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

/// Which problem.
#[derive(Debug, Clone)]
pub enum ProblemKind {
    /// Proper vertex coloring; `None` means palette `Δ + 1`.
    Coloring {
        /// Number of allowed colors.
        palette: Option<u64>,
    },
    /// Rooted spanning in-tree of parent pointers.
    SpanningTree,
    /// Exactly one leader.
    LeaderElection,
    /// Anything else.
    Custom {
        /// Report name.
        name: String,
        /// Legality rule.
        rule: CustomRule,
    },
}

/// A problem together with its specification-variable layout.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    kind: ProblemKind,
    vars: Vec<SpecVar>,
}

impl ProblemSpec {
    /// Coloring with the color in `offset .. offset + width`.
    pub fn coloring(offset: u32, width: u32, palette: Option<u64>) -> Self {
        ProblemSpec { kind: ProblemKind::Coloring { palette }, vars: vec![SpecVar::new("c", offset, width)] }
    }

    /// Spanning tree with the parent pointer in `offset .. offset + width`.
    pub fn spanning_tree(offset: u32, width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::SpanningTree, vars: vec![SpecVar::new("p", offset, width)] }
    }

    /// Leader election with the flag at bit `offset`.
    pub fn leader_election(offset: u32) -> Self {
        ProblemSpec { kind: ProblemKind::LeaderElection, vars: vec![SpecVar::new("l", offset, 1)] }
    }

    /// A custom problem over the given fields.
    pub fn custom(name: impl Into<String>, rule: CustomRule, vars: Vec<SpecVar>) -> Self {
        ProblemSpec { kind: ProblemKind::Custom { name: name.into(), rule }, vars }
    }

    /// Builds a spec from its parts; fails when a named problem does not
    /// have exactly one variable.
    pub fn from_parts(kind: ProblemKind, vars: Vec<SpecVar>) -> Result<Self, ProblemError> {
        let spec = ProblemSpec { kind, vars };
        if !matches!(spec.kind, ProblemKind::Custom { .. }) && spec.vars.len() != 1 {
            return Err(ProblemError::Layout(spec.name().into()));
        }
        Ok(spec)
    }

    /// Problem name: `coloring`, `spanning-tree`, `leader-election` or the
    /// custom name.
    pub fn name(&self) -> &str {
        match &self.kind {
            ProblemKind::Coloring { .. } => "coloring",
            ProblemKind::SpanningTree => "spanning-tree",
            ProblemKind::LeaderElection => "leader-election",
            ProblemKind::Custom { name, .. } => name,
        }
    }

    /// The problem.
    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    /// Specification variables.
    pub fn vars(&self) -> &[SpecVar] {
        &self.vars
    }

    /// Checks that every field fits in `f` bits.
    pub fn validate(&self, f: u32) -> Result<(), ProblemError> {
        for v in &self.vars {
            let end = v.offset + v.width;
            if end > f {
                return Err(ProblemError::FieldTooWide { name: v.name.clone(), offset: v.offset, end, f });
            }
        }
        Ok(())
    }

    /// Legality of `config` on `topology`, after checking the layout.
    pub fn is_legal(&self, topology: &Topology, config: &Configuration) -> Result<bool, ProblemError> {
        self.validate(config.f())?;
        if config.n() != topology.n() {
            return Err(ProblemError::SizeMismatch { expected: topology.n(), found: config.n() });
        }
        Ok(self.is_legal_states(topology, config.states()))
    }

    /// Legality of raw states; fields beyond the state width read as zero.
    pub fn is_legal_states(&self, topology: &Topology, states: &[State]) -> bool {
        let field = |i: usize| -> Vec<State> { states.iter().map(|&s| self.vars[i].read(s)).collect() };
        match &self.kind {
            ProblemKind::Coloring { palette } => {
                let palette = palette.unwrap_or(topology.max_degree() as u64 + 1);
                coloring_legal(topology, &field(0), palette)
            }
            ProblemKind::SpanningTree => spanning_tree_legal(topology, &field(0)),
            ProblemKind::LeaderElection => leader_election_legal(&field(0)),
            ProblemKind::Custom { rule, .. } => match rule {
                CustomRule::Trivial => true,
                CustomRule::AllEqual(value) => {
                    (0..self.vars.len()).all(|i| field(i).iter().all(|x| x == value))
                }
                CustomRule::Predicate(p) => {
                    let values: Vec<Vec<State>> = (0..self.vars.len()).map(field).collect();
                    p(topology, &values)
                }
            },
        }
    }
}

/// Every color is below `palette` and differs from every neighbor's.
pub fn coloring_legal(topology: &Topology, colors: &[State], palette: u64) -> bool {
    colors.len() == topology.n()
        && colors.iter().all(|&c| c < palette)
        && (0..topology.n()).all(|v| topology.ports(v).iter().all(|&u| colors[u] != colors[v]))
}

/// Exactly one null pointer (the root) and every other node's pointer chain
/// reaches the root without revisiting a node. Pointers naming a missing
/// port are illegal.
pub fn spanning_tree_legal(topology: &Topology, pointers: &[State]) -> bool {
    let n = topology.n();
    if pointers.len() != n {
        return false;
    }
    let mut parent = vec![None; n];
    for v in 0..n {
        match pointers[v] {
            0 => {}
            p => match topology.ports(v).get((p - 1) as usize) {
                Some(&u) => parent[v] = Some(u),
                None => return false,
            },
        }
    }
    if parent.iter().filter(|p| p.is_none()).count() != 1 {
        return false;
    }
    // 0 unknown, 1 on current walk, 2 reaches the root
    let mut mark = vec![0u8; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut v = start;
        loop {
            match mark[v] {
                2 => break,
                1 => return false,
                _ => {}
            }
            mark[v] = 1;
            path.push(v);
            match parent[v] {
                Some(u) => v = u,
                None => break,
            }
        }
        for u in path {
            mark[u] = 2;
        }
    }
    true
}

/// Exactly one node has its leader flag set.
pub fn leader_election_legal(flags: &[State]) -> bool {
    flags.iter().filter(|&&l| l == 1).count() == 1
}

/// True iff no homogeneous configuration of `f`-bit states is legal for
/// `spec` on `topology` (all `2^f` of them are checked).
pub fn verify_non_homogeneous(spec: &ProblemSpec, topology: &Topology, f: u32) -> bool {
    let n = topology.n();
    (0..=state_mask(f)).all(|s| !spec.is_legal_states(topology, &vec![s; n]))
}

/// Bits needed to encode one node's share of a solution on a graph of
/// maximum degree `max_degree`.
pub fn solution_encoding_bits(spec: &ProblemSpec, max_degree: usize) -> Result<u32, ProblemError> {
    let values = match spec.kind {
        // Δ + 1 colors, or Δ ports plus "no parent"
        ProblemKind::Coloring { .. } | ProblemKind::SpanningTree => max_degree as u64 + 1,
        ProblemKind::LeaderElection => 2,
        ProblemKind::Custom { .. } => return Err(ProblemError::Unsupported(spec.name().into())),
    };
    Ok(ceil_log2(values))
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        u64::BITS - (x - 1).leading_zeros()
    }
}
