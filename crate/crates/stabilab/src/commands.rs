//! One function per subcommand. Each returns the human-readable text, the
//! JSON output, and the exit code; `main` only parses flags and prints.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use stabilab_core::checker::{model_check_distributed, model_check_synchronous, replay_witness, simulate as run, Trace, TraceStatus};
use stabilab_core::lowerbound::{behavior_cardinality, LowerBoundError};
use stabilab_core::problems::verify_non_homogeneous;
use stabilab_core::{Configuration, Daemon, Exponent, IdAssignment, Instance, ProblemSpec, Topology, VerdictKind, Witness, WitnessMode};

use crate::format::{behavior_hex, sha256_hex, ProblemDoc, TopologyDoc, TraceDoc, VerdictDoc, WitnessDoc};
use crate::loader::Loaded;
use crate::parallel;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const NON_STABILIZING: u8 = 2;
    pub const UNKNOWN: u8 = 3;
    pub const INAPPLICABLE: u8 = 4;
    pub const NO_UNIFORM_SET: u8 = 5;
    pub const REPLAY_FAILED: u8 = 6;
    pub const USAGE: u8 = 64;
}

/// A bad flag value detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Exit code for a failed command.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return exit::USAGE;
    }
    match err.downcast_ref::<LowerBoundError>() {
        Some(LowerBoundError::Inapplicable { .. }) => exit::INAPPLICABLE,
        Some(LowerBoundError::NoUniformSet { .. }) => exit::NO_UNIFORM_SET,
        Some(LowerBoundError::ExponentTooSmall(_)) => exit::USAGE,
        _ => exit::FAILURE,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub output: Value,
    pub exit: u8,
    pub inputs: BTreeMap<String, String>,
}

impl Outcome {
    fn new(text: String, output: Value, exit: u8) -> Self {
        Outcome { text, output, exit, inputs: BTreeMap::new() }
    }

    fn input(mut self, name: &str, bytes: &[u8]) -> Self {
        self.inputs.insert(name.into(), sha256_hex(bytes));
        self
    }
}

fn topology_bytes(t: &Topology) -> Vec<u8> {
    serde_json::to_vec(&TopologyDoc::new(t, None)).expect("topology serializes")
}

fn short_list<T: std::fmt::Display>(items: &[T], limit: usize) -> String {
    let mut s: Vec<String> = items.iter().take(limit).map(|x| x.to_string()).collect();
    if items.len() > limit {
        s.push(format!("... ({} more)", items.len() - limit));
    }
    s.join(",")
}

pub fn count(f: u32, d: usize) -> Result<Outcome> {
    if d == 0 {
        return Err(UsageError("--d must be at least 1".into()).into());
    }
    let space = behavior_cardinality(f, d);
    let mut text = format!("f={f} d={d}\nlog2 |B| = {}\n", space.log2_cardinality);
    match &space.cardinality {
        Some(c) => writeln!(text, "|B| = {c}")?,
        None => writeln!(text, "|B| = 2^{} (too large to print)", space.log2_cardinality)?,
    }
    let output = json!({
        "f": f,
        "d": d,
        "log2_cardinality": space.log2_cardinality.to_string(),
        "cardinality": space.cardinality.as_ref().map(|c| c.to_string()),
    });
    Ok(Outcome::new(text, output, exit::OK))
}

pub fn bucket(loaded: &Loaded, lo: u64, hi: u64) -> Result<Outcome> {
    let classes = parallel::bucket_identifiers(&loaded.algorithm, lo, hi)?;
    let sizes: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
    let noun = if classes.len() == 1 { "class" } else { "classes" };
    let mut text = format!("{} {noun}: {}\n", classes.len(), short_list(&sizes, 20).replace(',', ", "));
    for (i, c) in classes.iter().enumerate().take(20) {
        writeln!(text, "  #{i} size {} table {} ids {}", c.members.len(), behavior_hex(&c.behavior), short_list(&c.members, 10))?;
    }
    let output = json!({
        "algorithm": loaded.algorithm.name(),
        "lo": lo,
        "hi": hi,
        "classes": classes.iter().map(|c| json!({
            "size": c.members.len(),
            "behavior_hex": behavior_hex(&c.behavior),
            "members": c.members,
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(text, output, exit::OK).input("algorithm", &loaded.source))
}

#[derive(Debug, Clone)]
pub struct WitnessRequest<'a> {
    pub loaded: &'a Loaded,
    pub c: Exponent,
    pub problem: ProblemSpec,
    pub n: Option<usize>,
    pub mode: WitnessMode,
    pub out: Option<&'a Path>,
}

/// Builds, replays and optionally writes a witness. The exit code is 0 only
/// when the replay passes.
pub fn witness(req: &WitnessRequest<'_>) -> Result<(Outcome, Witness)> {
    let alg = &req.loaded.algorithm;
    let w = parallel::lower_bound_witness(alg, req.c, &req.problem, req.n, req.mode)?;
    let doc = WitnessDoc::new(&w, &req.loaded.source)?;
    let mut text = format!(
        "witness for {} against {}: n={} c={} mode {}\n",
        alg.name(),
        req.problem.name(),
        w.n,
        w.c,
        w.mode.as_str()
    );
    writeln!(text, "ids: {} from a class of {} in [1, {}]", short_list(w.ids.ids(), 12), w.class_size, w.ids.id_cap())?;
    writeln!(text, "shared behavior: {}", doc.behavior_hex)?;
    for t in &w.traps {
        writeln!(text, "trap s0={}: prefix {:?} cycle {:?}", t.s0, t.prefix, t.cycle)?;
    }
    writeln!(text, "replay: {}", if w.replay_ok { "OK" } else { "FAILED" })?;
    if let Some(path) = req.out {
        let mut body = serde_json::to_string_pretty(&doc)?;
        body.push('\n');
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
        writeln!(text, "wrote {}", path.display())?;
    }
    let exit = if w.replay_ok { exit::OK } else { exit::REPLAY_FAILED };
    let output = serde_json::to_value(&doc)?;
    Ok((Outcome::new(text, output, exit).input("algorithm", &req.loaded.source), w))
}

/// Which model checker `check` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Synchronous,
    Distributed,
}

fn describe_trace(t: &Trace, out: &mut String) {
    let _ = writeln!(out, "  t=0 {}", t.initial);
    for (i, s) in t.steps.iter().enumerate() {
        let _ = writeln!(out, "  t={} active {:?} -> {}", i + 1, s.active, s.config);
    }
    let _ = match t.status {
        TraceStatus::Cycle { start, period } => writeln!(out, "  cycle: t={} repeats with period {period}", start),
        TraceStatus::FixedPoint { at } => writeln!(out, "  fixed point at t={at}"),
        TraceStatus::BudgetExhausted => writeln!(out, "  step budget exhausted"),
        TraceStatus::Running => writeln!(out, "  stopped"),
    };
}

pub fn check(loaded: &Loaded, topology: &Topology, ids: &IdAssignment, problem: &ProblemSpec, mode: CheckMode, cap: u64) -> Result<Outcome> {
    let inst = Instance::new(topology, &loaded.algorithm, ids)?;
    let verdict = match mode {
        CheckMode::Synchronous => model_check_synchronous(&inst, problem, cap)?,
        CheckMode::Distributed => model_check_distributed(&inst, problem, cap)?,
    };
    let daemon = match mode {
        CheckMode::Synchronous => "sync",
        CheckMode::Distributed => "distributed",
    };
    let mut text = format!("{} ({daemon} daemon, {} configurations explored)\n", verdict.result.as_str(), verdict.explored);
    if let Some(b) = verdict.convergence_bound {
        writeln!(text, "convergence bound: {b} steps")?;
    }
    if let Some(cx) = &verdict.counterexample {
        writeln!(text, "counterexample:")?;
        describe_trace(cx, &mut text);
    }
    if verdict.result == VerdictKind::Unknown {
        writeln!(text, "state space exceeds the cap of {cap} configurations")?;
    }
    let exit = match verdict.result {
        VerdictKind::Stabilizing => exit::OK,
        VerdictKind::NonStabilizing => exit::NON_STABILIZING,
        VerdictKind::Unknown => exit::UNKNOWN,
    };
    let output = json!({
        "daemon": daemon,
        "problem": ProblemDoc::new(problem)?,
        "ids": ids.ids(),
        "verdict": VerdictDoc::new(&verdict),
    });
    Ok(Outcome::new(text, output, exit).input("algorithm", &loaded.source).input("topology", &topology_bytes(topology)))
}

pub fn simulate(loaded: &Loaded, topology: &Topology, ids: &IdAssignment, daemon: &Daemon, init: &Configuration, budget: usize) -> Result<Outcome> {
    let inst = Instance::new(topology, &loaded.algorithm, ids)?;
    let trace = run(&inst, daemon, init, budget)?;
    let mut text = String::new();
    describe_trace(&trace, &mut text);
    let output = json!({ "ids": ids.ids(), "trace": TraceDoc::new(&trace) });
    Ok(Outcome::new(text, output, exit::OK).input("algorithm", &loaded.source).input("topology", &topology_bytes(topology)))
}

/// Exit 0 when no homogeneous configuration is legal, 2 otherwise.
pub fn verify_spec(problem: &ProblemSpec, topology: &Topology, f: u32) -> Result<Outcome> {
    problem.validate(f)?;
    let ok = verify_non_homogeneous(problem, topology, f);
    let count = 1u64 << f;
    let text = if ok {
        format!("{} on n={}: none of the {count} homogeneous configurations is legal\n", problem.name(), topology.n())
    } else {
        let legal: Vec<u64> = (0..count).filter(|&s| problem.is_legal_states(topology, &vec![s; topology.n()])).collect();
        format!("{} on n={}: homogeneous configurations with states {legal:?} are legal\n", problem.name(), topology.n())
    };
    let output = json!({ "problem": ProblemDoc::new(problem)?, "n": topology.n(), "f": f, "non_homogeneous": ok });
    let exit = if ok { exit::OK } else { exit::NON_STABILIZING };
    Ok(Outcome::new(text, output, exit).input("topology", &topology_bytes(topology)))
}

/// Re-checks a witness file against the algorithm it names.
pub fn replay(witness_file: &Path, loaded: &Loaded) -> Result<Outcome> {
    let bytes = std::fs::read(witness_file).with_context(|| format!("reading {}", witness_file.display()))?;
    let doc: WitnessDoc = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", witness_file.display()))?;
    let w = doc.witness(loaded.algorithm.clone(), &loaded.source)?;
    let result = replay_witness(&w);
    let (text, exit) = match &result {
        Ok(()) => (format!("replay OK: {} traps on n={}\n", w.traps.len(), w.n), exit::OK),
        Err(d) => (format!("replay FAILED: {d}\n"), exit::REPLAY_FAILED),
    };
    let output = json!({ "replay_ok": result.is_ok(), "divergence": result.err().map(|d| d.to_string()) });
    Ok(Outcome::new(text, output, exit).input("algorithm", &loaded.source).input("witness", &bytes))
}
