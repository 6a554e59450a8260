//! Executions, exhaustive self-stabilization checks, and witness replay.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::lowerbound::{extract_behavior, Witness};
use crate::model::{is_homogeneous, state_mask, Configuration, ModelError};
use crate::problems::{ProblemError, ProblemSpec};
use crate::scheduler::{Daemon, Instance, ScheduleError};
use crate::{Ident, State};

/// Default limit on the number of configurations a model check enumerates.
pub const DEFAULT_CONFIG_CAP: u64 = 1 << 24;

/// Hard ceiling on enumerated configurations (indices are `u32`).
pub const MAX_CONFIG_CAP: u64 = 1 << 32;

/// Errors from simulation and model checking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One step of an execution: the active set and the resulting configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Nodes that moved, sorted.
    pub active: Vec<usize>,
    /// Configuration after the step.
    pub config: Configuration,
}

/// How an execution ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    /// Stopped for another reason (e.g. a scripted daemon ran out).
    Running,
    /// No node is enabled in the configuration after `at` steps.
    FixedPoint {
        /// Step index of the terminal configuration.
        at: usize,
    },
    /// The configuration after `start + period` steps equals the one after
    /// `start`, and the daemon is deterministic, so the execution repeats.
    Cycle {
        /// First configuration of the cycle.
        start: usize,
        /// Cycle length.
        period: usize,
    },
    /// Step budget used up.
    BudgetExhausted,
}

/// A finite execution prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Starting configuration.
    pub initial: Configuration,
    /// Steps taken.
    pub steps: Vec<TraceStep>,
    /// Why it stopped.
    pub status: TraceStatus,
}

impl Trace {
    /// Configuration after `t` steps.
    pub fn config(&self, t: usize) -> &Configuration {
        if t == 0 {
            &self.initial
        } else {
            &self.steps[t - 1].config
        }
    }

    /// All configurations, initial first.
    pub fn configs(&self) -> impl Iterator<Item = &Configuration> {
        core::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.config))
    }

    /// Last configuration.
    pub fn last(&self) -> &Configuration {
        self.config(self.steps.len())
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// True iff no step was taken.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Outcome of a model check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    /// Every execution from every configuration ends up legal for good.
    Stabilizing,
    /// Some execution stays out of the legal set infinitely often.
    NonStabilizing,
    /// The state space exceeded the cap.
    Unknown,
}

impl VerdictKind {
    /// Label used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Stabilizing => "STABILIZING",
            VerdictKind::NonStabilizing => "NON-STABILIZING",
            VerdictKind::Unknown => "UNKNOWN",
        }
    }
}

/// A model-check result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// The outcome.
    pub result: VerdictKind,
    /// Worst-case steps to a closed legal configuration, when finite and
    /// known.
    pub convergence_bound: Option<usize>,
    /// An execution that never stabilizes, for non-stabilizing verdicts.
    pub counterexample: Option<Trace>,
    /// Configurations enumerated.
    pub explored: u64,
}

impl Verdict {
    fn unknown() -> Self {
        Verdict { result: VerdictKind::Unknown, convergence_bound: None, counterexample: None, explored: 0 }
    }
}

/// Runs `daemon` from `initial` for at most `budget` steps.
///
/// Cycles are detected only for the synchronous and central daemons, whose
/// choice depends on the configuration alone.
pub fn simulate(instance: &Instance<'_>, daemon: &Daemon, initial: &Configuration, budget: usize) -> Result<Trace, CheckError> {
    instance.check_config(initial)?;
    let deterministic = matches!(daemon, Daemon::Synchronous | Daemon::Central(_));
    let mut seen: BTreeMap<Vec<State>, usize> = BTreeMap::new();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut current = initial.clone();
    let status = loop {
        let t = steps.len();
        if deterministic {
            if let Some(&start) = seen.get(current.states()) {
                break TraceStatus::Cycle { start, period: t - start };
            }
            seen.insert(current.states().to_vec(), t);
        }
        let enabled = instance.enabled_set(&current)?;
        if enabled.is_empty() {
            break TraceStatus::FixedPoint { at: t };
        }
        if t >= budget {
            break TraceStatus::BudgetExhausted;
        }
        let active = match daemon.choose(&enabled, t) {
            Ok(a) => a,
            Err(ScheduleError::ScriptExhausted(_)) => break TraceStatus::Running,
            Err(e) => return Err(e.into()),
        };
        let next = instance.step(&current, &active)?;
        steps.push(TraceStep { active, config: next.clone() });
        current = next;
    };
    Ok(Trace { initial: initial.clone(), steps, status })
}

/// Number of configurations, if it is at most `cap`.
fn space_size(instance: &Instance<'_>, cap: u64) -> Option<u64> {
    let bits = instance.algorithm().f() as u64 * instance.n() as u64;
    let cap = cap.min(MAX_CONFIG_CAP);
    (bits < 64).then(|| 1u64 << bits).filter(|&size| size <= cap)
}

const INF: u32 = u32::MAX;

/// Exhaustive check under the synchronous daemon.
///
/// `dist(y) = 0` when `y` is legal and its successor has distance 0, else
/// `1 + dist(successor)`; configurations on a cycle that is not entirely
/// legal never converge.
pub fn model_check_synchronous(instance: &Instance<'_>, spec: &ProblemSpec, cap: u64) -> Result<Verdict, CheckError> {
    let f = instance.algorithm().f();
    spec.validate(f)?;
    let Some(size) = space_size(instance, cap) else {
        return Ok(Verdict::unknown());
    };
    let n = instance.n();
    let topology = instance.topology();
    let size = size as usize;
    let mut succ = vec![0u32; size];
    let mut legal = vec![false; size];
    for x in 0..size {
        let states = Configuration::from_index(f, n, x as u64).into_states();
        legal[x] = spec.is_legal_states(topology, &states);
        succ[x] = crate::model::pack_states(f, &instance.sync_successor(&states)) as u32;
    }

    // 0 unvisited, 1 on the current path, 2 done
    let mut mark = vec![0u8; size];
    let mut dist = vec![INF; size];
    // whether the cycle this configuration falls into is entirely illegal
    let mut sink_illegal = vec![false; size];
    let mut path: Vec<u32> = Vec::new();
    for start in 0..size {
        if mark[start] != 0 {
            continue;
        }
        path.clear();
        let mut x = start;
        while mark[x] == 0 {
            mark[x] = 1;
            path.push(x as u32);
            x = succ[x] as usize;
        }
        let mut end = path.len();
        if mark[x] == 1 {
            let pos = path.iter().position(|&y| y as usize == x).unwrap_or(0);
            let cycle = &path[pos..];
            let all_legal = cycle.iter().all(|&y| legal[y as usize]);
            let all_illegal = cycle.iter().all(|&y| !legal[y as usize]);
            for &y in cycle {
                dist[y as usize] = if all_legal { 0 } else { INF };
                sink_illegal[y as usize] = all_illegal;
                mark[y as usize] = 2;
            }
            end = pos;
        }
        for &y in path[..end].iter().rev() {
            let y = y as usize;
            let s = succ[y] as usize;
            dist[y] = match dist[s] {
                INF => INF,
                0 if legal[y] => 0,
                k => k + 1,
            };
            sink_illegal[y] = sink_illegal[s];
            mark[y] = 2;
        }
    }

    let explored = size as u64;
    let bad = (0..size).find(|&x| dist[x] == INF && sink_illegal[x]).or_else(|| (0..size).find(|&x| dist[x] == INF));
    match bad {
        None => Ok(Verdict {
            result: VerdictKind::Stabilizing,
            convergence_bound: dist.iter().max().map(|&d| d as usize),
            counterexample: None,
            explored,
        }),
        Some(x) => {
            let initial = Configuration::from_index(f, n, x as u64);
            let trace = simulate(instance, &Daemon::Synchronous, &initial, size + 1)?;
            Ok(Verdict { result: VerdictKind::NonStabilizing, convergence_bound: None, counterexample: Some(trace), explored })
        }
    }
}

/// Configuration graph of the distributed daemon over packed indices: every
/// nonempty subset of the enabled nodes is an edge, the full set first;
/// a configuration with no enabled node loops on itself.
struct DistributedGraph<'a, 'b> {
    instance: &'b Instance<'a>,
    f: u32,
    n: usize,
}

impl DistributedGraph<'_, '_> {
    fn moves(&self, x: u64) -> Vec<(usize, State)> {
        let states = Configuration::from_index(self.f, self.n, x).into_states();
        self.instance.moves(&states)
    }

    /// Successor of `x` when the moves selected by `mask` fire.
    fn apply(&self, x: u64, moves: &[(usize, State)], mask: u64) -> u64 {
        let field = state_mask(self.f);
        let mut y = x;
        for (i, &(v, s)) in moves.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let shift = v as u32 * self.f;
                y = (y & !(field << shift)) | (s << shift);
            }
        }
        y
    }

    /// Edge masks in order: full set, then descending.
    fn masks(moves: &[(usize, State)]) -> impl Iterator<Item = u64> {
        let full = if moves.is_empty() { 0 } else { (1u64 << moves.len()) - 1 };
        (1..=full).rev()
    }

    fn successors(&self, x: u64) -> Vec<(Vec<usize>, u64)> {
        let moves = self.moves(x);
        if moves.is_empty() {
            return vec![(Vec::new(), x)];
        }
        Self::masks(&moves)
            .map(|m| {
                let active = moves.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &(v, _))| v).collect();
                (active, self.apply(x, &moves, m))
            })
            .collect()
    }
}

/// Iterative Tarjan over the configurations admitted by `keep`. Returns the
/// component id of each kept configuration (`INF` for the others) and, per
/// component, whether it contains a cycle.
fn strongly_connected(
    size: usize,
    successors: impl Fn(u64) -> Vec<u64>,
    keep: impl Fn(usize) -> bool,
) -> (Vec<u32>, Vec<bool>) {
    let mut index = vec![INF; size];
    let mut low = vec![0u32; size];
    let mut on_stack = vec![false; size];
    let mut comp = vec![INF; size];
    let mut cyclic: Vec<bool> = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    // frame: node, its successors, position in them, whether it loops on itself
    let mut frames: Vec<(usize, Vec<u64>, usize, bool)> = Vec::new();
    for root in 0..size {
        if index[root] != INF || !keep(root) {
            continue;
        }
        frames.push((root, successors(root as u64), 0, false));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2] as usize;
                frame.2 += 1;
                if w == v {
                    frame.3 = true;
                    continue;
                }
                if !keep(w) {
                    continue;
                }
                if index[w] == INF {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    let succ = successors(w as u64);
                    frames.push((w, succ, 0, false));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            let self_loop = frame.3;
            frames.pop();
            if let Some(parent) = frames.last() {
                let p = parent.0;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let id = cyclic.len() as u32;
                let mut members = 0usize;
                loop {
                    let w = stack.pop().expect("tarjan stack holds the root") as usize;
                    on_stack[w] = false;
                    comp[w] = id;
                    members += 1;
                    if w == v {
                        break;
                    }
                }
                cyclic.push(members > 1 || self_loop);
            }
        }
    }
    (comp, cyclic)
}

/// Exhaustive check under the unfair distributed daemon (any nonempty subset
/// of enabled nodes moves).
///
/// Non-stabilizing iff some illegal configuration lies on a cycle of the
/// configuration graph, counting terminal configurations as self-loops.
/// The convergence bound is reported only when the configurations outside
/// the closed legal set form a DAG.
pub fn model_check_distributed(instance: &Instance<'_>, spec: &ProblemSpec, cap: u64) -> Result<Verdict, CheckError> {
    let f = instance.algorithm().f();
    spec.validate(f)?;
    let Some(size) = space_size(instance, cap) else {
        return Ok(Verdict::unknown());
    };
    let n = instance.n();
    let size = size as usize;
    let graph = DistributedGraph { instance, f, n };
    let topology = instance.topology();
    let legal: Vec<bool> = (0..size)
        .map(|x| spec.is_legal_states(topology, Configuration::from_index(f, n, x as u64).states()))
        .collect();
    let succ_ids = |x: u64| -> Vec<u64> { graph.successors(x).into_iter().map(|(_, y)| y).collect() };
    let explored = size as u64;

    let (comp, cyclic) = strongly_connected(size, succ_ids, |_| true);
    let on_cycle = |x: usize| cyclic[comp[x] as usize];
    if (0..size).any(|x| !legal[x] && on_cycle(x)) {
        // prefer a cycle that never touches a legal configuration
        let (icomp, icyclic) = strongly_connected(size, succ_ids, |x| !legal[x]);
        let pure = (0..size).find(|&x| !legal[x] && icyclic[icomp[x] as usize]);
        let (start, restricted) = match pure {
            Some(x) => (x, true),
            None => ((0..size).find(|&x| !legal[x] && on_cycle(x)).unwrap_or(0), false),
        };
        let trace = lasso(&graph, start as u64, |y| !restricted || !legal[y as usize]);
        return Ok(Verdict { result: VerdictKind::NonStabilizing, convergence_bound: None, counterexample: Some(trace), explored });
    }

    // closed legal set: greatest subset of legal configurations with no edge
    // leaving it
    let mut closed = legal.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..size {
            if closed[x] && succ_ids(x as u64).iter().any(|&y| !closed[y as usize]) {
                closed[x] = false;
                changed = true;
            }
        }
    }
    let convergence_bound = longest_path_to(size, &succ_ids, &closed);
    Ok(Verdict { result: VerdictKind::Stabilizing, convergence_bound, counterexample: None, explored })
}

/// Longest number of steps from any configuration into `target`, or `None`
/// if the configurations outside `target` contain a cycle.
fn longest_path_to(size: usize, successors: &impl Fn(u64) -> Vec<u64>, target: &[bool]) -> Option<usize> {
    // 0 unvisited, 1 in progress, 2 done
    let mut mark = vec![0u8; size];
    let mut depth = vec![0u32; size];
    let mut best = 0u32;
    for root in 0..size {
        if target[root] || mark[root] != 0 {
            continue;
        }
        let mut frames: Vec<(usize, Vec<u64>, usize)> = vec![(root, successors(root as u64), 0)];
        mark[root] = 1;
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2] as usize;
                frame.2 += 1;
                if target[w] {
                    depth[v] = depth[v].max(1);
                    continue;
                }
                match mark[w] {
                    0 => {
                        mark[w] = 1;
                        frames.push((w, successors(w as u64), 0));
                    }
                    1 => return None,
                    _ => depth[v] = depth[v].max(depth[w] + 1),
                }
                continue;
            }
            frames.pop();
            mark[v] = 2;
            best = best.max(depth[v]);
            if let Some(parent) = frames.last() {
                let p = parent.0;
                depth[p] = depth[p].max(depth[v] + 1);
            }
        }
    }
    Some(best as usize)
}

/// A shortest execution from `start` back to `start` through configurations
/// admitted by `keep`.
fn lasso(graph: &DistributedGraph<'_, '_>, start: u64, keep: impl Fn(u64) -> bool) -> Trace {
    let f = graph.f;
    let n = graph.n;
    let initial = Configuration::from_index(f, n, start);
    let mut parent: BTreeMap<u64, (u64, Vec<usize>)> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut closing: Option<(u64, Vec<usize>)> = None;
    'search: while let Some(x) = queue.pop_front() {
        for (active, y) in graph.successors(x) {
            if y == start {
                closing = Some((x, active));
                break 'search;
            }
            if keep(y) && !parent.contains_key(&y) {
                parent.insert(y, (x, active));
                queue.push_back(y);
            }
        }
    }
    let Some((mut x, active)) = closing else {
        return Trace { initial, steps: Vec::new(), status: TraceStatus::Running };
    };
    if active.is_empty() {
        return Trace { initial, steps: Vec::new(), status: TraceStatus::FixedPoint { at: 0 } };
    }
    let mut rev = vec![TraceStep { active, config: initial.clone() }];
    while x != start {
        let (p, a) = parent[&x].clone();
        rev.push(TraceStep { active: a, config: Configuration::from_index(f, n, x) });
        x = p;
    }
    rev.reverse();
    let period = rev.len();
    Trace { initial, steps: rev, status: TraceStatus::Cycle { start: 0, period } }
}

/// Why a witness failed to replay.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Divergence {
    #[error("witness setup is invalid: {0}")]
    Invalid(String),
    #[error("node {node} has id {id}, whose behavior differs from the witness class")]
    ForeignId { node: usize, id: Ident },
    #[error("expected {expected} traps, one per initial state, found {found}")]
    MissingTraps { expected: usize, found: usize },
    #[error("trap {trap}, step {step}, node {node}: expected state {expected}, observed {observed}")]
    StateMismatch { trap: usize, step: usize, node: usize, expected: State, observed: State },
    #[error("trap {trap} visits a legal configuration at step {step}")]
    LegalVisited { trap: usize, step: usize },
    #[error("trap {trap}: execution ends with {observed:?}, the witness claims prefix {prefix} and period {period}")]
    LassoMismatch { trap: usize, observed: TraceStatus, prefix: usize, period: usize },
}

/// Re-runs every trap of `w` with the real algorithm and identifiers under
/// the synchronous daemon and checks the recorded states bit for bit.
pub fn replay_witness(w: &Witness) -> Result<(), Divergence> {
    let invalid = |e: &dyn core::fmt::Display| Divergence::Invalid(alloc::format!("{e}"));
    let ring = w.ring().map_err(|e| invalid(&e))?;
    let alg = &w.algorithm;
    for (node, &id) in w.ids.ids().iter().enumerate() {
        let b = extract_behavior(alg, id).map_err(|e| invalid(&e))?;
        if b != w.behavior {
            return Err(Divergence::ForeignId { node, id });
        }
    }
    let expected = state_mask(alg.f()) as usize + 1;
    if w.traps.len() != expected {
        return Err(Divergence::MissingTraps { expected, found: w.traps.len() });
    }
    let instance = Instance::new(&ring, alg, &w.ids).map_err(|e| invalid(&e))?;
    for (k, trap) in w.traps.iter().enumerate() {
        let initial = Configuration::homogeneous(alg.f(), w.n, trap.s0).map_err(|e| invalid(&e))?;
        let horizon = trap.prefix.len() + trap.period();
        let trace = simulate(&instance, &Daemon::Synchronous, &initial, horizon).map_err(|e| invalid(&e))?;
        for (t, config) in trace.configs().enumerate() {
            let want = trap.state_at(t);
            if let Some((node, &got)) = config.states().iter().enumerate().find(|(_, &s)| s != want) {
                return Err(Divergence::StateMismatch { trap: k, step: t, node, expected: want, observed: got });
            }
            debug_assert!(is_homogeneous(config.states()));
            if w.problem.is_legal_states(&ring, config.states()) {
                return Err(Divergence::LegalVisited { trap: k, step: t });
            }
        }
        let closes = match trace.status {
            TraceStatus::Cycle { start, period } => start == trap.prefix.len() && period == trap.period(),
            TraceStatus::FixedPoint { at } => at == trap.prefix.len() && trap.period() == 1,
            _ => false,
        };
        if !closes {
            return Err(Divergence::LassoMismatch {
                trap: k,
                observed: trace.status,
                prefix: trap.prefix.len(),
                period: trap.period(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin;
    use crate::model::{make_ring, IdAssignment};
    use crate::problems::{CustomRule, SpecVar};

    fn flip_instance_parts() -> (crate::model::Topology, crate::Algorithm, IdAssignment) {
        (make_ring(3, false, None).unwrap(), builtin("flip").unwrap().unwrap(), IdAssignment::sequential(3))
    }

    #[test]
    fn flip_oscillates() {
        let (ring, flip, ids) = flip_instance_parts();
        let inst = Instance::new(&ring, &flip, &ids).unwrap();
        let t = simulate(&inst, &Daemon::Synchronous, &Configuration::homogeneous(1, 3, 0).unwrap(), 10).unwrap();
        assert_eq!(t.status, TraceStatus::Cycle { start: 0, period: 2 });
        assert_eq!(t.last().states(), &[0, 0, 0]);
        let t = simulate(&inst, &Daemon::central(), &Configuration::homogeneous(1, 3, 0).unwrap(), 5).unwrap();
        assert_eq!(t.steps[0].active, vec![0]);
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let ring = make_ring(3, false, None).unwrap();
        let id = builtin("id").unwrap().unwrap();
        let ids = IdAssignment::sequential(3);
        let inst = Instance::new(&ring, &id, &ids).unwrap();
        let t = simulate(&inst, &Daemon::Synchronous, &Configuration::new(1, vec![1, 0, 1]).unwrap(), 10).unwrap();
        assert_eq!(t.status, TraceStatus::FixedPoint { at: 0 });
    }

    #[test]
    fn flip_under_both_checkers() {
        let (ring, flip, ids) = flip_instance_parts();
        let inst = Instance::new(&ring, &flip, &ids).unwrap();
        let spec = ProblemSpec::leader_election(0);
        let v = model_check_synchronous(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!(v.result, VerdictKind::NonStabilizing);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.initial.states(), &[0, 0, 0]);
        assert_eq!(cx.status, TraceStatus::Cycle { start: 0, period: 2 });

        let v = model_check_distributed(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!(v.result, VerdictKind::NonStabilizing);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.initial.states(), &[0, 0, 0]);
        assert_eq!(cx.steps.len(), 2);
        assert_eq!(cx.steps[0].config.states(), &[1, 1, 1]);
    }

    #[test]
    fn trivial_problem_stabilizes() {
        let (ring, flip, ids) = flip_instance_parts();
        let inst = Instance::new(&ring, &flip, &ids).unwrap();
        let any = ProblemSpec::custom("any", CustomRule::Trivial, vec![SpecVar::new("s", 0, 1)]);
        let v = model_check_synchronous(&inst, &any, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!((v.result, v.convergence_bound, v.explored), (VerdictKind::Stabilizing, Some(0), 8));
        let v = model_check_distributed(&inst, &any, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!((v.result, v.convergence_bound), (VerdictKind::Stabilizing, Some(0)));
    }

    #[test]
    fn constant_converges_in_one_step() {
        let ring = make_ring(4, false, None).unwrap();
        let zero = crate::Algorithm::parse("zero", "var s:1; r: s == 1 -> s := 0", 2).unwrap();
        let ids = IdAssignment::sequential(4);
        let inst = Instance::new(&ring, &zero, &ids).unwrap();
        let spec = ProblemSpec::custom("zero", CustomRule::AllEqual(0), vec![SpecVar::new("s", 0, 1)]);
        let v = model_check_synchronous(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!((v.result, v.convergence_bound), (VerdictKind::Stabilizing, Some(1)));
        // one node at a time: up to four steps
        let v = model_check_distributed(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap();
        assert_eq!((v.result, v.convergence_bound), (VerdictKind::Stabilizing, Some(4)));
    }

    #[test]
    fn cap_gives_unknown() {
        let (ring, flip, ids) = flip_instance_parts();
        let inst = Instance::new(&ring, &flip, &ids).unwrap();
        let v = model_check_synchronous(&inst, &ProblemSpec::leader_election(0), 4).unwrap();
        assert_eq!(v.result, VerdictKind::Unknown);
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let flip = builtin("flip").unwrap().unwrap();
        let spec = ProblemSpec::leader_election(0);
        let w = crate::lowerbound::lower_bound_witness(
            &flip,
            crate::Exponent::integer(2),
            &spec,
            Some(4),
            crate::WitnessMode::Empirical,
        )
        .unwrap();
        assert_eq!(replay_witness(&w), Ok(()));
        let mut bad = w.clone();
        bad.traps[0].cycle = vec![0];
        assert!(matches!(replay_witness(&bad), Err(Divergence::StateMismatch { trap: 0, step: 1, .. })));
        let mut bad = w.clone();
        bad.traps.pop();
        assert!(matches!(replay_witness(&bad), Err(Divergence::MissingTraps { .. })));
        let mut bad = w;
        bad.algorithm = builtin("parity").unwrap().unwrap();
        assert!(matches!(replay_witness(&bad), Err(Divergence::ForeignId { node: 0, id: 1 })));
    }
}
