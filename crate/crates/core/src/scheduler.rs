//! Daemons and the composite-atomic step.
//!
//! Node sets are sorted `Vec<usize>`s throughout.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::algorithm::{Algorithm, AlgorithmError};
use crate::model::{Configuration, IdAssignment, ModelError, Topology};
use crate::State;

/// Errors from scheduling and stepping.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("topology has {topology} nodes but {what} has {found}")]
    SizeMismatch { topology: usize, what: &'static str, found: usize },
    #[error("node {node} has degree {found}, algorithm expects {expected}")]
    DegreeMismatch { node: usize, found: usize, expected: usize },
    #[error("configuration has width {found}, algorithm expects {expected}")]
    WidthMismatch { found: u32, expected: u32 },
    #[error("daemon activated node {0}, which is not enabled")]
    NotEnabled(usize),
    #[error("daemon chose an empty set while nodes were enabled")]
    EmptyChoice,
    #[error("scripted strategy exhausted at step {0}")]
    ScriptExhausted(usize),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Tie-break rule of the central daemon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentralPolicy {
    /// Lowest enabled node index.
    #[default]
    LowestIndex,
    /// Highest enabled node index.
    HighestIndex,
}

/// Chooser callback: `(enabled, step) -> active`.
pub type ChooseFn = Arc<dyn Fn(&[usize], usize) -> Vec<usize> + Send + Sync>;

/// How an adversarial daemon picks.
#[derive(Clone)]
pub enum Strategy {
    /// One node set per step.
    Scripted(Vec<Vec<usize>>),
    /// Arbitrary callback; its output is checked against the daemon contract.
    Callback(ChooseFn),
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Scripted(s) => f.debug_tuple("Scripted").field(s).finish(),
            Strategy::Callback(_) => f.write_str("Callback(..)"),
        }
    }
}

/// Which enabled nodes move at each step.
#[derive(Debug, Clone)]
pub enum Daemon {
    /// Every enabled node.
    Synchronous,
    /// Exactly one enabled node.
    Central(CentralPolicy),
    /// Any nonempty subset, chosen by a strategy. No fairness is enforced.
    Adversarial(Strategy),
    /// A uniformly random nonempty subset, reproducible from the seed and
    /// the step index.
    Random {
        /// Base seed.
        seed: u64,
    },
}

impl Daemon {
    /// Central daemon with the lowest-index tie-break.
    pub fn central() -> Self {
        Daemon::Central(CentralPolicy::LowestIndex)
    }

    /// Whether this daemon's choice is a function of the enabled set alone.
    pub fn is_synchronous(&self) -> bool {
        matches!(self, Daemon::Synchronous)
    }

    /// Picks the nodes that move at step `step` among `enabled` (sorted).
    pub fn choose(&self, enabled: &[usize], step: usize) -> Result<Vec<usize>, ScheduleError> {
        if enabled.is_empty() {
            return Ok(Vec::new());
        }
        let chosen = match self {
            Daemon::Synchronous => enabled.to_vec(),
            Daemon::Central(CentralPolicy::LowestIndex) => alloc::vec![enabled[0]],
            Daemon::Central(CentralPolicy::HighestIndex) => alloc::vec![enabled[enabled.len() - 1]],
            Daemon::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(step as u64);
                loop {
                    let picked: Vec<usize> = enabled.iter().copied().filter(|_| rng.next_u32() & 1 == 1).collect();
                    if !picked.is_empty() {
                        break picked;
                    }
                }
            }
            Daemon::Adversarial(Strategy::Scripted(script)) => {
                let mut s = script.get(step).ok_or(ScheduleError::ScriptExhausted(step))?.clone();
                s.sort_unstable();
                s.dedup();
                s
            }
            Daemon::Adversarial(Strategy::Callback(f)) => {
                let mut s = f(enabled, step);
                s.sort_unstable();
                s.dedup();
                s
            }
        };
        if chosen.is_empty() {
            return Err(ScheduleError::EmptyChoice);
        }
        if let Some(&bad) = chosen.iter().find(|v| enabled.binary_search(v).is_err()) {
            return Err(ScheduleError::NotEnabled(bad));
        }
        Ok(chosen)
    }
}

/// A topology, an algorithm and an identifier assignment checked to agree
/// on `n` and `d`.
#[derive(Debug, Clone, Copy)]
pub struct Instance<'a> {
    topology: &'a Topology,
    algorithm: &'a Algorithm,
    ids: &'a IdAssignment,
}

impl<'a> Instance<'a> {
    /// Checks that every node has degree `algorithm.d()` and that there is
    /// one identifier per node.
    pub fn new(topology: &'a Topology, algorithm: &'a Algorithm, ids: &'a IdAssignment) -> Result<Self, ScheduleError> {
        if ids.len() != topology.n() {
            return Err(ScheduleError::SizeMismatch { topology: topology.n(), what: "the id assignment", found: ids.len() });
        }
        for v in 0..topology.n() {
            if topology.degree(v) != algorithm.d() {
                return Err(ScheduleError::DegreeMismatch { node: v, found: topology.degree(v), expected: algorithm.d() });
            }
        }
        Ok(Instance { topology, algorithm, ids })
    }

    /// The topology.
    pub fn topology(&self) -> &'a Topology {
        self.topology
    }

    /// The algorithm.
    pub fn algorithm(&self) -> &'a Algorithm {
        self.algorithm
    }

    /// The identifiers.
    pub fn ids(&self) -> &'a IdAssignment {
        self.ids
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub(crate) fn check_config(&self, config: &Configuration) -> Result<(), ScheduleError> {
        if config.n() != self.n() {
            return Err(ScheduleError::SizeMismatch { topology: self.n(), what: "the configuration", found: config.n() });
        }
        if config.f() != self.algorithm.f() {
            return Err(ScheduleError::WidthMismatch { found: config.f(), expected: self.algorithm.f() });
        }
        Ok(())
    }

    /// `Some(new state)` if node `v` is enabled in `states`.
    pub(crate) fn move_of(&self, states: &[State], v: usize, view: &mut Vec<State>) -> Option<State> {
        view.clear();
        view.extend(self.topology.ports(v).iter().map(|&u| states[u]));
        self.algorithm.step_unchecked(self.ids.id(v), states[v], view)
    }

    /// Enabled nodes with their would-be new states.
    pub(crate) fn moves(&self, states: &[State]) -> Vec<(usize, State)> {
        let mut view = Vec::with_capacity(self.algorithm.d());
        (0..self.n()).filter_map(|v| self.move_of(states, v, &mut view).map(|s| (v, s))).collect()
    }

    /// Nodes with at least one true guard.
    pub fn enabled_set(&self, config: &Configuration) -> Result<Vec<usize>, ScheduleError> {
        self.check_config(config)?;
        Ok(self.moves(config.states()).into_iter().map(|(v, _)| v).collect())
    }

    /// One atomic step: every node in `active` evaluates against the old
    /// configuration and writes its new state; others keep theirs.
    pub fn step(&self, config: &Configuration, active: &[usize]) -> Result<Configuration, ScheduleError> {
        self.check_config(config)?;
        let states = config.states();
        let mut next = states.to_vec();
        let mut view = Vec::with_capacity(self.algorithm.d());
        for &v in active {
            if v >= self.n() {
                return Err(ScheduleError::NotEnabled(v));
            }
            next[v] = self.move_of(states, v, &mut view).ok_or(ScheduleError::NotEnabled(v))?;
        }
        Ok(Configuration::new(config.f(), next)?)
    }

    /// Synchronous successor of raw states (all enabled nodes move).
    pub(crate) fn sync_successor(&self, states: &[State]) -> Vec<State> {
        let mut next = states.to_vec();
        for (v, s) in self.moves(states) {
            next[v] = s;
        }
        next
    }
}

/// `enabled_set` without building an [`Instance`] first.
pub fn enabled_set(
    topology: &Topology,
    algorithm: &Algorithm,
    ids: &IdAssignment,
    config: &Configuration,
) -> Result<Vec<usize>, ScheduleError> {
    Instance::new(topology, algorithm, ids)?.enabled_set(config)
}

/// `step` without building an [`Instance`] first.
pub fn step(
    topology: &Topology,
    algorithm: &Algorithm,
    ids: &IdAssignment,
    config: &Configuration,
    active: &[usize],
) -> Result<Configuration, ScheduleError> {
    Instance::new(topology, algorithm, ids)?.step(config, active)
}
