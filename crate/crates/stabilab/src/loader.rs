//! Resolving command-line inputs: algorithm files or bundled names,
//! topologies, identifier lists and problem layouts.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use stabilab_core::builtin;
use stabilab_core::model::{make_ring, Configuration};
use stabilab_core::problems::{CustomRule, SpecVar};
use stabilab_core::{Algorithm, Body, IdAssignment, ProblemSpec, State, Topology};

use crate::commands::UsageError;
use crate::format::{ProblemDoc, TableDoc, TopologyDoc};

/// An algorithm with the bytes it was built from (hashed into reports and
/// witnesses).
#[derive(Debug, Clone)]
pub struct Loaded {
    pub algorithm: Algorithm,
    pub source: Vec<u8>,
}

/// Loads `spec` for degree-`d` nodes: a `.json` table file, a rule-language
/// file, or the name of a bundled program (`flip`, `flip.ss`,
/// `builtin:flip`). Existing files win over bundled names.
pub fn load_algorithm(spec: &str, d: usize) -> Result<Loaded> {
    let path = Path::new(spec);
    if path.is_file() {
        let source = fs::read(path).with_context(|| format!("reading {spec}"))?;
        let text = std::str::from_utf8(&source).with_context(|| format!("{spec} is not UTF-8"))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("algorithm");
        let algorithm = if path.extension().is_some_and(|e| e == "json") {
            let doc: TableDoc = serde_json::from_str(text).with_context(|| format!("parsing table file {spec}"))?;
            if doc.d != d {
                bail!("{spec} is a degree-{} table, degree {d} is needed", doc.d);
            }
            doc.algorithm()?
        } else {
            Algorithm::parse(stem, text, d).with_context(|| format!("in {spec}"))?
        };
        return Ok(Loaded { algorithm, source });
    }
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    let name = Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    let text = builtin::source(name).ok_or_else(|| {
        anyhow!("{spec}: no such file, and not a bundled program ({})", builtin::NAMES.join(", "))
    })?;
    Ok(Loaded { algorithm: Algorithm::parse(name, text, d)?, source: text.as_bytes().to_vec() })
}

/// `--ring N [--scrambled --seed S]` or `--topology FILE`.
pub fn load_topology(ring: Option<usize>, scrambled: bool, seed: Option<u64>, file: Option<&Path>) -> Result<Topology> {
    match (ring, file) {
        (Some(n), None) => Ok(make_ring(n, scrambled, seed)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: TopologyDoc = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            doc.topology()
        }
        (Some(_), Some(_)) => Err(UsageError("give either --ring or --topology, not both".into()).into()),
        (None, None) => Err(UsageError("a topology is required (--ring N or --topology FILE)".into()).into()),
    }
}

/// Comma-separated integers.
pub fn parse_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().with_context(|| format!("{s:?} is not a non-negative integer")))
        .collect()
}

/// `--ids a,b,c`, or `1..=n` when absent. The cap is the largest id.
pub fn load_ids(text: Option<&str>, n: usize) -> Result<IdAssignment> {
    match text {
        None => Ok(IdAssignment::sequential(n)),
        Some(t) => {
            let ids = parse_list(t)?;
            let cap = ids.iter().copied().max().unwrap_or(0);
            Ok(IdAssignment::new(ids, cap)?)
        }
    }
}

/// `--init a,b,c` as an `f`-bit configuration.
pub fn load_config(text: &str, f: u32) -> Result<Configuration> {
    let states: Vec<State> = parse_list(text)?;
    Ok(Configuration::new(f, states)?)
}

/// Field names searched for each problem's specification variable.
fn preferred_fields(problem: &str) -> &'static [&'static str] {
    match problem {
        "coloring" => &["c", "color", "colour"],
        "spanning-tree" => &["p", "parent"],
        "leader-election" => &["l", "leader"],
        _ => &[],
    }
}

/// Canonical problem name for a command-line alias.
pub fn problem_name(alias: &str) -> Result<&'static str> {
    Ok(match alias {
        "coloring" | "color" | "colouring" => "coloring",
        "leader" | "leader-election" => "leader-election",
        "tree" | "spanning-tree" => "spanning-tree",
        "trivial" => "trivial",
        other => bail!("unknown problem {other:?} (coloring, leader, tree, trivial)"),
    })
}

/// Builds a problem for an `f`-bit register.
///
/// The specification variable is the field named by `var`, else the first
/// field of `algorithm` with a conventional name (`c`/`color`,
/// `p`/`parent`, `l`/`leader`), else the whole register (coloring, tree)
/// or bit 0 (leader).
pub fn problem_for(alias: &str, f: u32, algorithm: Option<&Algorithm>, var: Option<&str>, palette: Option<u64>) -> Result<ProblemSpec> {
    let name = problem_name(alias)?;
    let rules = algorithm.and_then(|a| match a.body() {
        Body::Rules(rs) => Some(rs),
        Body::Table(_) => None,
    });
    let field = match (var, rules) {
        (Some(v), Some(rs)) => {
            Some(rs.var(v).ok_or_else(|| anyhow!("the algorithm declares no field named {v:?}"))?.clone())
        }
        (Some(v), None) => bail!("--var {v} needs a rule-language algorithm"),
        (None, Some(rs)) => preferred_fields(name).iter().find_map(|n| rs.var(n)).cloned(),
        (None, None) => None,
    };
    let (offset, width) = field.map(|v| (v.offset, v.width)).unwrap_or((0, f));
    if palette.is_some() && name != "coloring" {
        bail!("--palette applies to coloring only");
    }
    Ok(match name {
        "coloring" => ProblemSpec::coloring(offset, width, palette),
        "spanning-tree" => ProblemSpec::spanning_tree(offset, width),
        "leader-election" => ProblemSpec::leader_election(offset),
        _ => ProblemSpec::custom("trivial", CustomRule::Trivial, Vec::<SpecVar>::new()),
    })
}

/// A problem from a JSON file.
pub fn load_problem_file(path: &Path) -> Result<ProblemSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: ProblemDoc = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    doc.spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_names_resolve() {
        for spec in ["flip", "flip.ss", "builtin:maxid", "some/dir/parity.ss"] {
            load_algorithm(spec, 2).unwrap();
        }
        assert!(load_algorithm("nope.ss", 2).is_err());
    }

    #[test]
    fn problem_layouts() {
        let maxid = load_algorithm("maxid", 2).unwrap().algorithm;
        let leader = problem_for("leader", 4, Some(&maxid), None, None).unwrap();
        assert_eq!(leader.vars()[0].offset, 0);
        let by_key = problem_for("coloring", 4, Some(&maxid), Some("k"), None).unwrap();
        assert_eq!((by_key.vars()[0].offset, by_key.vars()[0].width), (1, 3));
        let whole = problem_for("tree", 2, None, None, None).unwrap();
        assert_eq!((whole.vars()[0].offset, whole.vars()[0].width), (0, 2));
        assert!(problem_for("mis", 1, None, None, None).is_err());
        assert!(problem_for("leader", 1, None, None, Some(3)).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("3, 5,9").unwrap(), vec![3, 5, 9]);
        assert!(parse_list("3,x").is_err());
        assert_eq!(load_ids(Some("3,5,9"), 3).unwrap().id_cap(), 9);
        assert_eq!(load_ids(None, 4).unwrap().ids(), &[1, 2, 3, 4]);
    }
}
