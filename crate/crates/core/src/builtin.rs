//! Bundled example programs.

use crate::algorithm::{Algorithm, AlgorithmError};

/// Anonymous bit toggle.
pub const FLIP: &str = include_str!("../algorithms/flip.ss");
/// No rules: every node is always disabled.
pub const IDENTITY: &str = include_str!("../algorithms/id.ss");
/// `s := ID mod 2`, enabled only while `s` is wrong.
pub const PARITY: &str = include_str!("../algorithms/parity.ss");
/// `s := ID mod 4`, enabled only while `s` is wrong.
pub const MOD4: &str = include_str!("../algorithms/mod4.ss");
/// 4-bit max-ID leader election for the 3-ring.
pub const MAXID: &str = include_str!("../algorithms/maxid.ss");

/// Names accepted by [`builtin`].
pub const NAMES: [&str; 5] = ["flip", "id", "parity", "mod4", "maxid"];

/// Source text of a bundled program.
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "flip" => FLIP,
        "id" | "identity" => IDENTITY,
        "parity" => PARITY,
        "mod4" => MOD4,
        "maxid" => MAXID,
        _ => return None,
    })
}

/// Parses a bundled program for ring nodes (degree 2).
pub fn builtin(name: &str) -> Option<Result<Algorithm, AlgorithmError>> {
    source(name).map(|src| Algorithm::parse(name, src, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_programs_parse() {
        for name in NAMES {
            let alg = builtin(name).unwrap().unwrap();
            assert_eq!(alg.d(), 2);
        }
        assert_eq!(builtin("maxid").unwrap().unwrap().f(), 4);
    }
}
