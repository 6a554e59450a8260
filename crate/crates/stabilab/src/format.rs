//! JSON documents: topologies, configurations, problems, algorithms given
//! as tables, traces, verdicts and witnesses. Field names are frozen; see
//! `docs/format.md`.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use stabilab_core::checker::{Trace, TraceStatus, Verdict};
use stabilab_core::lowerbound::{TrapTrace, Witness, WitnessMode};
use stabilab_core::problems::{CustomRule, ProblemKind, SpecVar};
use stabilab_core::{
    Algorithm, Behavior, Configuration, Exponent, IdAssignment, ProblemSpec, State, Topology, TopologyKind, TransitionTable,
};

/// Bumped on any schema change.
pub const FORMAT_VERSION: u32 = 1;

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A topology, optionally with a configuration on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub n: usize,
    pub kind: String,
    pub ports: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<State>>,
}

impl TopologyDoc {
    pub fn new(t: &Topology, config: Option<&Configuration>) -> Self {
        TopologyDoc {
            n: t.n(),
            kind: t.kind().as_str().into(),
            ports: t.port_table().to_vec(),
            f: config.map(|c| c.f()),
            states: config.map(|c| c.states().to_vec()),
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        let kind: TopologyKind = self.kind.parse()?;
        if self.ports.len() != self.n {
            bail!("topology lists {} port rows for n = {}", self.ports.len(), self.n);
        }
        Ok(Topology::from_ports(kind, self.ports.clone())?)
    }

    pub fn configuration(&self) -> Result<Option<Configuration>> {
        match (self.f, &self.states) {
            (Some(f), Some(states)) => Ok(Some(Configuration::new(f, states.clone())?)),
            (None, None) => Ok(None),
            _ => bail!("a configuration needs both \"f\" and \"states\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecVarDoc {
    pub name: String,
    pub offset: u32,
    pub width: u32,
}

/// `{"name", "spec_vars", "params"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub name: String,
    pub spec_vars: Vec<SpecVarDoc>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl ProblemDoc {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let mut params = BTreeMap::new();
        let name = match spec.kind() {
            ProblemKind::Coloring { palette } => {
                if let Some(p) = palette {
                    params.insert("palette".into(), Value::from(*p));
                }
                "coloring".to_string()
            }
            ProblemKind::SpanningTree => "spanning-tree".into(),
            ProblemKind::LeaderElection => "leader-election".into(),
            ProblemKind::Custom { name, rule } => {
                params.insert("custom".into(), Value::from(name.clone()));
                match rule {
                    CustomRule::Trivial => "trivial".into(),
                    CustomRule::AllEqual(v) => {
                        params.insert("value".into(), Value::from(*v));
                        "all-equal".into()
                    }
                    CustomRule::Predicate(_) => bail!("custom predicate {name:?} cannot be serialized"),
                }
            }
        };
        let spec_vars = spec
            .vars()
            .iter()
            .map(|v| SpecVarDoc { name: v.name.clone(), offset: v.offset, width: v.width })
            .collect();
        Ok(ProblemDoc { name, spec_vars, params })
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        let vars: Vec<SpecVar> = self.spec_vars.iter().map(|v| SpecVar::new(v.name.clone(), v.offset, v.width)).collect();
        let custom_name = |default: &str| {
            self.params.get("custom").and_then(Value::as_str).unwrap_or(default).to_string()
        };
        let kind = match self.name.as_str() {
            "coloring" => {
                let palette = match self.params.get("palette") {
                    None | Some(Value::Null) => None,
                    Some(v) => Some(v.as_u64().ok_or_else(|| anyhow!("palette must be a non-negative integer"))?),
                };
                ProblemKind::Coloring { palette }
            }
            "spanning-tree" => ProblemKind::SpanningTree,
            "leader-election" => ProblemKind::LeaderElection,
            "trivial" => ProblemKind::Custom { name: custom_name("trivial"), rule: CustomRule::Trivial },
            "all-equal" => {
                let value = self
                    .params
                    .get("value")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| anyhow!("all-equal needs an integer \"value\" parameter"))?;
                ProblemKind::Custom { name: custom_name("all-equal"), rule: CustomRule::AllEqual(value) }
            }
            other => bail!("unknown problem {other:?}"),
        };
        Ok(ProblemSpec::from_parts(kind, vars)?)
    }
}

/// An algorithm given as explicit tables. Behaviors are hex strings of the
/// packed output vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub name: String,
    pub f: u32,
    pub d: usize,
    pub fallback: String,
    #[serde(default)]
    pub per_id: Vec<String>,
}

impl TableDoc {
    pub fn new(name: &str, table: &TransitionTable) -> Self {
        TableDoc {
            name: name.into(),
            f: table.f(),
            d: table.d(),
            fallback: behavior_hex(table.fallback()),
            per_id: table.entries().iter().map(behavior_hex).collect(),
        }
    }

    pub fn algorithm(&self) -> Result<Algorithm> {
        let fallback = behavior_from_hex(self.f, self.d, &self.fallback).context("fallback table")?;
        let per_id = self
            .per_id
            .iter()
            .enumerate()
            .map(|(i, h)| behavior_from_hex(self.f, self.d, h).with_context(|| format!("table for id {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Algorithm::from_table(self.name.clone(), TransitionTable::per_id(per_id, fallback)?))
    }
}

pub fn behavior_hex(b: &Behavior) -> String {
    hex::encode(b.to_packed_bytes())
}

pub fn behavior_from_hex(f: u32, d: usize, text: &str) -> Result<Behavior> {
    let bytes = hex::decode(text).context("invalid hex")?;
    Ok(Behavior::from_packed_bytes(f, d, &bytes)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
}

impl StatusDoc {
    pub fn new(s: TraceStatus) -> Self {
        let bare = |kind: &str| StatusDoc { kind: kind.into(), at: None, start: None, period: None };
        match s {
            TraceStatus::Running => bare("running"),
            TraceStatus::BudgetExhausted => bare("budget-exhausted"),
            TraceStatus::FixedPoint { at } => StatusDoc { at: Some(at), ..bare("fixed-point") },
            TraceStatus::Cycle { start, period } => StatusDoc { start: Some(start), period: Some(period), ..bare("cycle") },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub active: Vec<usize>,
    pub states: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub f: u32,
    pub initial: Vec<State>,
    pub steps: Vec<StepDoc>,
    pub status: StatusDoc,
}

impl TraceDoc {
    pub fn new(t: &Trace) -> Self {
        TraceDoc {
            f: t.initial.f(),
            initial: t.initial.states().to_vec(),
            steps: t.steps.iter().map(|s| StepDoc { active: s.active.clone(), states: s.config.states().to_vec() }).collect(),
            status: StatusDoc::new(t.status),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub result: String,
    pub convergence_bound: Option<usize>,
    pub explored: u64,
    pub counterexample: Option<TraceDoc>,
}

impl VerdictDoc {
    pub fn new(v: &Verdict) -> Self {
        VerdictDoc {
            result: v.result.as_str().into(),
            convergence_bound: v.convergence_bound,
            explored: v.explored,
            counterexample: v.counterexample.as_ref().map(TraceDoc::new),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmRef {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapDoc {
    pub s0: State,
    pub prefix: Vec<State>,
    pub cycle: Vec<State>,
}

/// The witness file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub version: u32,
    pub algorithm: AlgorithmRef,
    pub f: u32,
    pub d: usize,
    pub n: usize,
    pub c: String,
    pub mode: String,
    pub ids: Vec<u64>,
    pub class_size: usize,
    pub behavior_hex: String,
    pub traps: Vec<TrapDoc>,
    pub problem: ProblemDoc,
    pub replay_ok: bool,
}

impl WitnessDoc {
    /// `source` is the text the algorithm was loaded from; only its hash is
    /// stored.
    pub fn new(w: &Witness, source: &[u8]) -> Result<Self> {
        Ok(WitnessDoc {
            version: FORMAT_VERSION,
            algorithm: AlgorithmRef { name: w.algorithm.name().into(), sha256: sha256_hex(source) },
            f: w.algorithm.f(),
            d: w.algorithm.d(),
            n: w.n,
            c: w.c.to_string(),
            mode: w.mode.as_str().into(),
            ids: w.ids.ids().to_vec(),
            class_size: w.class_size,
            behavior_hex: behavior_hex(&w.behavior),
            traps: w.traps.iter().map(|t| TrapDoc { s0: t.s0, prefix: t.prefix.clone(), cycle: t.cycle.clone() }).collect(),
            problem: ProblemDoc::new(&w.problem)?,
            replay_ok: w.replay_ok,
        })
    }

    /// Rebuilds the witness around `algorithm`, whose source must hash to
    /// the recorded digest.
    pub fn witness(&self, algorithm: Algorithm, source: &[u8]) -> Result<Witness> {
        if self.version != FORMAT_VERSION {
            bail!("witness format version {} is not supported (expected {FORMAT_VERSION})", self.version);
        }
        let digest = sha256_hex(source);
        if digest != self.algorithm.sha256 {
            bail!("algorithm source hashes to {digest}, the witness records {}", self.algorithm.sha256);
        }
        if algorithm.f() != self.f || algorithm.d() != self.d {
            bail!("algorithm has f={}, d={}; the witness records f={}, d={}", algorithm.f(), algorithm.d(), self.f, self.d);
        }
        let c: Exponent = self.c.parse()?;
        let mode = match self.mode.as_str() {
            "guaranteed" => WitnessMode::Guaranteed,
            "empirical" => WitnessMode::Empirical,
            other => bail!("unknown witness mode {other:?}"),
        };
        if self.ids.len() != self.n {
            bail!("witness lists {} ids for n = {}", self.ids.len(), self.n);
        }
        let ids = IdAssignment::with_exponent(self.ids.clone(), c)?;
        Ok(Witness {
            algorithm,
            n: self.n,
            c,
            mode,
            ids,
            class_size: self.class_size,
            behavior: behavior_from_hex(self.f, self.d, &self.behavior_hex)?,
            traps: self
                .traps
                .iter()
                .map(|t| TrapTrace { s0: t.s0, prefix: t.prefix.clone(), cycle: t.cycle.clone() })
                .collect(),
            problem: self.problem.spec()?,
            replay_ok: self.replay_ok,
        })
    }
}

/// A scripted adversary: one node set per step.
pub fn parse_script(text: &str) -> Result<Vec<Vec<usize>>> {
    serde_json::from_str(text).context("a script is a JSON array of node-index arrays")
}

#[cfg(test)]
mod tests {
    use super::*;
    use stabilab_core::model::make_ring;

    #[test]
    fn topology_round_trip() {
        let t = make_ring(5, true, Some(3)).unwrap();
        let c = Configuration::new(2, vec![0, 1, 2, 3, 0]).unwrap();
        let doc = TopologyDoc::new(&t, Some(&c));
        let text = serde_json::to_string(&doc).unwrap();
        let back: TopologyDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.topology().unwrap(), t);
        assert_eq!(back.configuration().unwrap(), Some(c));
        assert!(text.starts_with("{\"n\":5,\"kind\":\"port-scrambled-ring\",\"ports\":"));
    }

    #[test]
    fn problem_round_trip() {
        for spec in [
            ProblemSpec::coloring(1, 2, Some(3)),
            ProblemSpec::coloring(0, 2, None),
            ProblemSpec::spanning_tree(0, 2),
            ProblemSpec::leader_election(3),
            ProblemSpec::custom("zero", CustomRule::AllEqual(0), vec![SpecVar::new("s", 0, 1)]),
            ProblemSpec::custom("anything", CustomRule::Trivial, vec![]),
        ] {
            let doc = ProblemDoc::new(&spec).unwrap();
            let back = doc.spec().unwrap();
            assert_eq!(ProblemDoc::new(&back).unwrap(), doc);
            assert_eq!(back.name(), spec.name());
        }
        let doc: ProblemDoc = serde_json::from_str(r#"{"name":"coloring","spec_vars":[{"name":"c","offset":0,"width":2}],"params":{"palette":3}}"#).unwrap();
        assert!(matches!(doc.spec().unwrap().kind(), ProblemKind::Coloring { palette: Some(3) }));
        assert!(serde_json::from_str::<ProblemDoc>(r#"{"name":"mis","spec_vars":[]}"#).unwrap().spec().is_err());
    }

    #[test]
    fn table_round_trip() {
        let one = Behavior::constant(1, 2, 1).unwrap();
        let flip = Behavior::from_fn(1, 2, |s, _| 1 - s).unwrap();
        let t = TransitionTable::per_id(vec![one.clone(), flip], one).unwrap();
        let doc = TableDoc::new("t", &t);
        assert_eq!(doc.fallback, "ff");
        assert_eq!(doc.per_id[1], "0f");
        let alg = doc.algorithm().unwrap();
        assert_eq!(alg.evaluate(2, 1, &[0, 0]).unwrap(), 0);
        assert_eq!(alg.evaluate(9, 0, &[0, 0]).unwrap(), 1);
    }

    #[test]
    fn digests() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
