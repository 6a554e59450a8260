//! The memory lower bound as a pipeline.
//!
//! 1. [`behavior_cardinality`]: with `f` bits and degree `d` there are
//!    `2^(f · 2^((d+1)f))` identifier-free behaviors.
//! 2. [`min_guaranteed_size`]: the smallest ring size `n` with
//!    `n^(c-1) > |behaviors|`, so that `n^c` identifiers spread over the
//!    behaviors put more than `n` of them in one class on average.
//! 3. [`bucket_identifiers`] / [`find_uniform_id_set`]: group identifiers by
//!    the behavior they induce and take `n` identifiers from the largest
//!    class.
//! 4. [`homogeneity_trap`]: with every node running the same behavior, a
//!    homogeneous configuration stays homogeneous under the synchronous
//!    daemon, so a problem with no homogeneous solution is never solved.
//!
//! [`lower_bound_witness`] chains the steps into a replayable [`Witness`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::algorithm::{input_count, Algorithm, AlgorithmError, Behavior};
use crate::checker;
use crate::model::{make_ring, state_mask, Exponent, IdAssignment, ModelError, Topology};
use crate::problems::{verify_non_homogeneous, ProblemSpec};
use crate::{Ident, State};

/// Cardinalities are materialized only when `log2 |B| <= 10^6`.
pub const MATERIALIZE_LOG2_LIMIT: u64 = 1_000_000;

/// Largest behavior table [`extract_behavior`] builds by default.
pub const DEFAULT_TABULATION_LIMIT: usize = 1 << 24;

/// Largest identifier range the witness pipeline buckets.
pub const MAX_ID_RANGE: u64 = 1 << 28;

/// Errors from the lower-bound engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerBoundError {
    #[error("the exponent c must exceed 1, got {0}")]
    ExponentTooSmall(Exponent),
    #[error("behavior table needs {inputs} entries, above the limit of {limit}")]
    TabulationTooLarge { inputs: String, limit: usize },
    #[error("identifier range {lo}..={hi} is empty")]
    EmptyRange { lo: Ident, hi: Ident },
    #[error("identifier range of {0} ids exceeds the supported maximum")]
    RangeTooLarge(u64),
    #[error("largest behavior class has {largest} identifiers, {needed} are needed")]
    NoUniformSet { largest: usize, needed: usize },
    #[error("{problem} has a legal homogeneous configuration on the {n}-ring with {f}-bit states")]
    Inapplicable { problem: String, n: usize, f: u32 },
    #[error("the homogeneity trap needs a ring of at least 3 nodes, got {0}")]
    RingTooSmall(usize),
    #[error("witnesses are built on rings; the algorithm expects degree {0}")]
    NotARing(usize),
    #[error("no ring size up to {cap} meets n^(c-1) > |behaviors|")]
    NoGuaranteedSize { cap: u64 },
    #[error("ring size {n} is below the guaranteed threshold {threshold}")]
    BelowThreshold { n: usize, threshold: u64 },
    #[error("exponent {0} is too large to evaluate")]
    ExponentTooLarge(Exponent),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `|B|` for `f`-bit registers on degree-`d` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorSpace {
    /// Register width.
    pub f: u32,
    /// Degree.
    pub d: usize,
    /// `f · 2^((d+1)f)`, exactly.
    pub log2_cardinality: BigUint,
    /// `2^log2_cardinality`, when `log2_cardinality <= 10^6`.
    pub cardinality: Option<BigUint>,
}

/// Counts the identifier-free behaviors.
pub fn behavior_cardinality(f: u32, d: usize) -> BehaviorSpace {
    let inputs_log2 = (d as u64 + 1) * f as u64;
    let log2 = BigUint::from(f) << inputs_log2;
    let cardinality = log2
        .to_u64()
        .filter(|&l| l <= MATERIALIZE_LOG2_LIMIT)
        .map(|l| BigUint::one() << l);
    BehaviorSpace { f, d, log2_cardinality: log2, cardinality }
}

/// Exact test of `n^(c-1) > 2^log2_card` with `c = p/q`, i.e.
/// `n^(p-q) > 2^(q · log2_card)`, decided from bit lengths whenever
/// possible.
pub fn exceeds_behavior_count(n: u64, c: Exponent, log2_card: &BigUint) -> Result<bool, LowerBoundError> {
    if !c.exceeds_one() {
        return Err(LowerBoundError::ExponentTooSmall(c));
    }
    if n <= 1 {
        return Ok(false);
    }
    let e = c.numerator() - c.denominator();
    let target = log2_card * BigUint::from(c.denominator());
    let bits = (u64::BITS - n.leading_zeros()) as u128;
    let upper = BigUint::from(e as u128 * bits);
    let lower = BigUint::from(e as u128 * (bits - 1));
    if upper <= target {
        return Ok(false);
    }
    if lower > target {
        return Ok(true);
    }
    // boundary band: n^e has about `target` bits
    let e32 = u32::try_from(e).map_err(|_| LowerBoundError::ExponentTooLarge(c))?;
    let power = BigUint::from(n).pow(e32);
    let target = target.to_u64().ok_or(LowerBoundError::ExponentTooLarge(c))?;
    let pbits = power.bits();
    Ok(pbits > target + 1 || (pbits == target + 1 && power.trailing_zeros() != Some(target)))
}

/// Smallest `n <= cap` with `(c-1) · log2 n > f · 2^((d+1)f)`, or `None`.
pub fn min_guaranteed_size(f: u32, c: Exponent, d: usize, cap: u64) -> Result<Option<u64>, LowerBoundError> {
    if !c.exceeds_one() {
        return Err(LowerBoundError::ExponentTooSmall(c));
    }
    let log2 = behavior_cardinality(f, d).log2_cardinality;
    if cap < 2 || !exceeds_behavior_count(cap, c, &log2)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (2u64, cap);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if exceeds_behavior_count(mid, c, &log2)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// The behavior of `alg` with its identifier fixed to `id`.
pub fn extract_behavior(alg: &Algorithm, id: Ident) -> Result<Behavior, LowerBoundError> {
    extract_behavior_limited(alg, id, DEFAULT_TABULATION_LIMIT)
}

/// [`extract_behavior`] with an explicit table-size limit.
pub fn extract_behavior_limited(alg: &Algorithm, id: Ident, limit: usize) -> Result<Behavior, LowerBoundError> {
    check_tabulation(alg, limit)?;
    Ok(Behavior::from_fn(alg.f(), alg.d(), |own, view| alg.evaluate_unchecked(id, own, view))?)
}

/// Fails when `alg`'s behavior table would exceed `limit` entries.
pub fn check_tabulation(alg: &Algorithm, limit: usize) -> Result<(), LowerBoundError> {
    match input_count(alg.f(), alg.d()) {
        Some(k) if k <= limit => Ok(()),
        _ => Err(LowerBoundError::TabulationTooLarge {
            inputs: alloc::format!("2^{}", (alg.d() as u64 + 1) * alg.f() as u64),
            limit,
        }),
    }
}

/// Identifiers sharing one behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdClass {
    /// The shared behavior.
    pub behavior: Behavior,
    /// Sorted members.
    pub members: Vec<Ident>,
}

/// Merges `(id, behavior)` pairs into classes, largest first, ties broken by
/// the lexicographically smallest table.
pub fn group_behaviors(pairs: impl IntoIterator<Item = (Ident, Behavior)>) -> Vec<IdClass> {
    let mut classes: BTreeMap<Behavior, Vec<Ident>> = BTreeMap::new();
    for (id, b) in pairs {
        classes.entry(b).or_default().push(id);
    }
    order_classes(classes.into_iter().map(|(behavior, members)| IdClass { behavior, members }).collect())
}

/// Sorts members within each class and classes by size descending, then by
/// table. Classes must have distinct behaviors.
pub fn order_classes(mut classes: Vec<IdClass>) -> Vec<IdClass> {
    for c in &mut classes {
        c.members.sort_unstable();
    }
    classes.sort_by(|a, b| b.members.len().cmp(&a.members.len()).then_with(|| a.behavior.cmp(&b.behavior)));
    classes
}

/// Partitions `lo ..= hi` by induced behavior.
pub fn bucket_identifiers(alg: &Algorithm, lo: Ident, hi: Ident) -> Result<Vec<IdClass>, LowerBoundError> {
    if lo > hi || lo == 0 {
        return Err(LowerBoundError::EmptyRange { lo, hi });
    }
    check_tabulation(alg, DEFAULT_TABULATION_LIMIT)?;
    let pairs = (lo..=hi)
        .map(|id| extract_behavior(alg, id).map(|b| (id, b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(group_behaviors(pairs))
}

/// The `n` smallest members of the largest class over `1 ..= floor(n^c)`,
/// assigned to nodes `0 .. n` in increasing order, with their behavior and
/// the full class size.
pub fn find_uniform_id_set(alg: &Algorithm, n: usize, c: Exponent) -> Result<(IdAssignment, Behavior, usize), LowerBoundError> {
    let cap = c.id_cap(n)?;
    if cap > MAX_ID_RANGE {
        return Err(LowerBoundError::RangeTooLarge(cap));
    }
    let classes = bucket_identifiers(alg, 1, cap)?;
    uniform_set_from_classes(classes, n, cap)
}

/// Picks the witness identifiers from already-computed classes.
pub fn uniform_set_from_classes(
    classes: Vec<IdClass>,
    n: usize,
    cap: Ident,
) -> Result<(IdAssignment, Behavior, usize), LowerBoundError> {
    let largest = classes.into_iter().next().ok_or(LowerBoundError::NoUniformSet { largest: 0, needed: n })?;
    let size = largest.members.len();
    if size < n {
        return Err(LowerBoundError::NoUniformSet { largest: size, needed: n });
    }
    let ids = IdAssignment::new(largest.members[..n].to_vec(), cap)?;
    Ok((ids, largest.behavior, size))
}

/// The common-state sequence of a homogeneous synchronous execution, as a
/// lasso: `prefix` then `cycle` repeated forever. The first element of
/// `prefix ++ cycle` is `s0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrapTrace {
    /// Initial common state.
    pub s0: State,
    /// States visited once.
    pub prefix: Vec<State>,
    /// States repeated forever.
    pub cycle: Vec<State>,
}

impl TrapTrace {
    /// Common state after `t` steps.
    pub fn state_at(&self, t: usize) -> State {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Cycle length.
    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Every distinct common state.
    pub fn visited(&self) -> impl Iterator<Item = State> + '_ {
        self.prefix.iter().chain(&self.cycle).copied()
    }
}

/// Follows `s ↦ b(s, s, …, s)` from `s0` until a state repeats.
pub fn homogeneity_trap(b: &Behavior, n: usize, s0: State) -> Result<TrapTrace, LowerBoundError> {
    if n < 3 {
        return Err(LowerBoundError::RingTooSmall(n));
    }
    if s0 > state_mask(b.f()) {
        return Err(AlgorithmError::StateTooWide { value: s0, f: b.f() }.into());
    }
    let mut seen: BTreeMap<State, usize> = BTreeMap::new();
    let mut seq = Vec::new();
    let mut s = s0;
    loop {
        if let Some(&i) = seen.get(&s) {
            let cycle = seq.split_off(i);
            return Ok(TrapTrace { s0, prefix: seq, cycle });
        }
        seen.insert(s, seq.len());
        seq.push(s);
        s = b.on_homogeneous(s);
    }
}

/// How the ring size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMode {
    /// `n >= min_guaranteed_size`, so the pigeonhole argument guarantees
    /// success.
    Guaranteed,
    /// Any `n`; succeeds iff the algorithm realizes few enough behaviors.
    Empirical,
}

impl WitnessMode {
    /// Label used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessMode::Guaranteed => "guaranteed",
            WitnessMode::Empirical => "empirical",
        }
    }
}

/// Largest ring size the guaranteed mode searches.
pub const GUARANTEED_SIZE_CAP: u64 = 1 << 20;

/// A concrete instance on which an algorithm never reaches a legal
/// configuration: an oriented `n`-ring, identifiers sharing one behavior,
/// and the synchronous trap from every homogeneous start.
#[derive(Debug, Clone)]
pub struct Witness {
    /// The refuted algorithm.
    pub algorithm: Algorithm,
    /// Ring size.
    pub n: usize,
    /// Identifier exponent.
    pub c: Exponent,
    /// How `n` was chosen.
    pub mode: WitnessMode,
    /// Identifiers by node, all from one class.
    pub ids: IdAssignment,
    /// Size of that class within `1 ..= floor(n^c)`.
    pub class_size: usize,
    /// The behavior every node runs.
    pub behavior: Behavior,
    /// One trap per initial state `0 .. 2^f`.
    pub traps: Vec<TrapTrace>,
    /// The problem never solved.
    pub problem: ProblemSpec,
    /// Result of [`checker::replay_witness`] at construction time.
    pub replay_ok: bool,
}

impl Witness {
    /// The oriented ring the witness lives on.
    pub fn ring(&self) -> Result<Topology, ModelError> {
        make_ring(self.n, false, None)
    }
}

/// Builds a witness that `alg` does not solve `spec` on some ring with
/// identifiers in `1 ..= floor(n^c)`.
pub fn lower_bound_witness(
    alg: &Algorithm,
    c: Exponent,
    spec: &ProblemSpec,
    n: Option<usize>,
    mode: WitnessMode,
) -> Result<Witness, LowerBoundError> {
    let classes = |n: usize| -> Result<(Vec<IdClass>, Ident), LowerBoundError> {
        let cap = c.id_cap(n)?;
        if cap > MAX_ID_RANGE {
            return Err(LowerBoundError::RangeTooLarge(cap));
        }
        Ok((bucket_identifiers(alg, 1, cap)?, cap))
    };
    lower_bound_witness_with(alg, c, spec, n, mode, classes)
}

/// [`lower_bound_witness`] with a caller-supplied bucketing routine
/// `n -> (classes over 1..=cap, cap)`, e.g. a parallel one.
pub fn lower_bound_witness_with(
    alg: &Algorithm,
    c: Exponent,
    spec: &ProblemSpec,
    n: Option<usize>,
    mode: WitnessMode,
    bucket: impl FnOnce(usize) -> Result<(Vec<IdClass>, Ident), LowerBoundError>,
) -> Result<Witness, LowerBoundError> {
    if !c.exceeds_one() {
        return Err(LowerBoundError::ExponentTooSmall(c));
    }
    if alg.d() != 2 {
        return Err(LowerBoundError::NotARing(alg.d()));
    }
    check_tabulation(alg, DEFAULT_TABULATION_LIMIT)?;
    let threshold = || -> Result<u64, LowerBoundError> {
        min_guaranteed_size(alg.f(), c, 2, GUARANTEED_SIZE_CAP)?
            .ok_or(LowerBoundError::NoGuaranteedSize { cap: GUARANTEED_SIZE_CAP })
    };
    let n = match (mode, n) {
        (WitnessMode::Guaranteed, Some(n)) => {
            let t = threshold()?;
            if (n as u64) < t {
                return Err(LowerBoundError::BelowThreshold { n, threshold: t });
            }
            n
        }
        (_, Some(n)) => n,
        // f = 0 gives threshold 2; the oriented ring needs 3 nodes
        (_, None) => (threshold()? as usize).max(3),
    };
    if n < 3 {
        return Err(LowerBoundError::RingTooSmall(n));
    }
    let ring = make_ring(n, false, None)?;
    if !verify_non_homogeneous(spec, &ring, alg.f()) {
        return Err(LowerBoundError::Inapplicable { problem: spec.name().into(), n, f: alg.f() });
    }
    let (classes, cap) = bucket(n)?;
    let (ids, behavior, class_size) = uniform_set_from_classes(classes, n, cap)?;
    let traps = (0..=state_mask(alg.f()))
        .map(|s0| homogeneity_trap(&behavior, n, s0))
        .collect::<Result<Vec<_>, _>>()?;
    let mut witness = Witness {
        algorithm: alg.clone(),
        n,
        c,
        mode,
        ids,
        class_size,
        behavior,
        traps,
        problem: spec.clone(),
        replay_ok: false,
    };
    witness.replay_ok = checker::replay_witness(&witness).is_ok();
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::{parse_rules, TransitionTable};
    use crate::builtin::builtin;
    use alloc::vec;

    #[test]
    fn cardinalities() {
        let s = behavior_cardinality(1, 2);
        assert_eq!(s.log2_cardinality, BigUint::from(8u32));
        assert_eq!(s.cardinality, Some(BigUint::from(256u32)));
        assert_eq!(behavior_cardinality(1, 1).cardinality, Some(BigUint::from(16u32)));
        let s = behavior_cardinality(2, 2);
        assert_eq!(s.log2_cardinality, BigUint::from(128u32));
        assert_eq!(s.cardinality, Some(BigUint::one() << 128u32));
        // 8 · 2^24 > 10^6: not materialized
        assert_eq!(behavior_cardinality(8, 2).cardinality, None);
        assert!(behavior_cardinality(0, 2).log2_cardinality == BigUint::ZERO);
    }

    #[test]
    fn thresholds() {
        let two = Exponent::integer(2);
        assert_eq!(min_guaranteed_size(1, two, 2, 1 << 20).unwrap(), Some(257));
        assert_eq!(min_guaranteed_size(0, two, 2, 100).unwrap(), Some(2));
        assert_eq!(min_guaranteed_size(2, two, 2, 1_000_000_000).unwrap(), None);
        // c = 3: n^2 > 256 → n = 17
        assert_eq!(min_guaranteed_size(1, Exponent::integer(3), 2, 1000).unwrap(), Some(17));
        // c = 1.5: n^0.5 > 256 → n = 65537
        assert_eq!(min_guaranteed_size(1, "1.5".parse().unwrap(), 2, 1 << 20).unwrap(), Some(65537));
        assert_eq!(
            min_guaranteed_size(1, Exponent::integer(1), 2, 100),
            Err(LowerBoundError::ExponentTooSmall(Exponent::integer(1)))
        );
        assert_eq!(min_guaranteed_size(1, two, 2, 256).unwrap(), None);
    }

    #[test]
    fn parity_extraction() {
        let parity = builtin("parity").unwrap().unwrap();
        assert_eq!(extract_behavior(&parity, 7).unwrap(), Behavior::constant(1, 2, 1).unwrap());
        assert_eq!(extract_behavior(&parity, 12).unwrap(), Behavior::constant(1, 2, 0).unwrap());
        let flip = builtin("flip").unwrap().unwrap();
        assert_eq!(extract_behavior(&flip, 3).unwrap(), extract_behavior(&flip, 12).unwrap());
        let id = builtin("id").unwrap().unwrap();
        assert_eq!(extract_behavior(&id, 5).unwrap(), Behavior::identity(1, 2).unwrap());
    }

    #[test]
    fn tabulation_limit() {
        let wide = crate::algorithm::Algorithm::parse("wide", "var s:9;", 2).unwrap();
        assert!(matches!(extract_behavior(&wide, 1), Err(LowerBoundError::TabulationTooLarge { .. })));
        assert!(extract_behavior_limited(&wide, 1, 1 << 27).is_ok());
    }

    #[test]
    fn bucketing() {
        let parity = builtin("parity").unwrap().unwrap();
        let classes = bucket_identifiers(&parity, 1, 10).unwrap();
        assert_eq!(classes.iter().map(|c| c.members.len()).collect::<Vec<_>>(), vec![5, 5]);
        // tie broken by smallest table: constant 0 (even ids) first
        assert_eq!(classes[0].members, vec![2, 4, 6, 8, 10]);

        let flip = builtin("flip").unwrap().unwrap();
        assert_eq!(bucket_identifiers(&flip, 1, 100).unwrap().len(), 1);

        let mod4 = builtin("mod4").unwrap().unwrap();
        let classes = bucket_identifiers(&mod4, 1, 8).unwrap();
        assert_eq!(classes.iter().map(|c| c.members.len()).collect::<Vec<_>>(), vec![2, 2, 2, 2]);
        assert_eq!(classes[0].members, vec![4, 8]);
        assert!(bucket_identifiers(&mod4, 5, 4).is_err());
    }

    #[test]
    fn uniform_sets() {
        let parity = builtin("parity").unwrap().unwrap();
        let (ids, b, size) = find_uniform_id_set(&parity, 5, Exponent::integer(2)).unwrap();
        // 1..=25: 13 odd, 12 even → odd class is larger
        assert_eq!(size, 13);
        assert_eq!(ids.ids(), &[1, 3, 5, 7, 9]);
        assert_eq!(b, Behavior::constant(1, 2, 1).unwrap());

        // f = 2 with 2^128 possible behaviors but only three realized
        let mod3 = crate::algorithm::Algorithm::parse("mod3", "var s:2; r: s != ID % 3 -> s := ID % 3", 2).unwrap();
        let (ids, _, size) = find_uniform_id_set(&mod3, 100, Exponent::integer(2)).unwrap();
        assert_eq!(size, 3334);
        assert_eq!(ids.len(), 100);

        // every id its own behavior: no class of size 3 among 9 ids
        let rs = parse_rules("var s:4; r: s != ID -> s := ID").unwrap();
        let distinct = crate::algorithm::Algorithm::from_rules("distinct", rs, 2).unwrap();
        assert_eq!(
            find_uniform_id_set(&distinct, 3, Exponent::integer(2)),
            Err(LowerBoundError::NoUniformSet { largest: 1, needed: 3 })
        );
    }

    #[test]
    fn traps() {
        let flip = Behavior::from_fn(1, 2, |s, _| 1 - s).unwrap();
        let t = homogeneity_trap(&flip, 3, 0).unwrap();
        assert!(t.prefix.is_empty());
        assert_eq!(t.cycle, vec![0, 1]);
        let id = Behavior::identity(1, 2).unwrap();
        let t = homogeneity_trap(&id, 3, 1).unwrap();
        assert_eq!((t.prefix.len(), t.cycle.clone()), (0, vec![1]));
        let zero = Behavior::constant(1, 2, 0).unwrap();
        let t = homogeneity_trap(&zero, 5, 1).unwrap();
        assert_eq!((t.prefix.clone(), t.cycle.clone()), (vec![1], vec![0]));
        assert_eq!(t.state_at(0), 1);
        assert_eq!(t.state_at(7), 0);
        assert_eq!(homogeneity_trap(&zero, 2, 0), Err(LowerBoundError::RingTooSmall(2)));
    }

    #[test]
    fn witness_for_flip() {
        let flip = builtin("flip").unwrap().unwrap();
        let w = lower_bound_witness(&flip, Exponent::integer(2), &ProblemSpec::leader_election(0), Some(5), WitnessMode::Empirical)
            .unwrap();
        assert!(w.replay_ok);
        assert_eq!(w.n, 5);
        assert_eq!(w.class_size, 25);
        assert_eq!(w.ids.ids(), &[1, 2, 3, 4, 5]);
        assert_eq!(w.traps.len(), 2);
    }

    #[test]
    fn witness_guaranteed_mode() {
        let flip = builtin("flip").unwrap().unwrap();
        let w = lower_bound_witness(&flip, Exponent::integer(2), &ProblemSpec::coloring(0, 1, None), None, WitnessMode::Guaranteed)
            .unwrap();
        assert_eq!(w.n, 257);
        assert_eq!(w.ids.id_cap(), 66049);
        assert!(w.replay_ok);
        assert_eq!(
            lower_bound_witness(&flip, Exponent::integer(2), &ProblemSpec::coloring(0, 1, None), Some(10), WitnessMode::Guaranteed)
                .unwrap_err(),
            LowerBoundError::BelowThreshold { n: 10, threshold: 257 }
        );
    }

    #[test]
    fn witness_preconditions() {
        use crate::problems::{CustomRule, SpecVar};
        let flip = builtin("flip").unwrap().unwrap();
        let zero = ProblemSpec::custom("all-zero", CustomRule::AllEqual(0), vec![SpecVar::new("s", 0, 1)]);
        assert!(matches!(
            lower_bound_witness(&flip, Exponent::integer(2), &zero, Some(5), WitnessMode::Empirical),
            Err(LowerBoundError::Inapplicable { .. })
        ));
        assert!(matches!(
            lower_bound_witness(&flip, Exponent::integer(1), &zero, Some(5), WitnessMode::Empirical),
            Err(LowerBoundError::ExponentTooSmall(_))
        ));
        let table = TransitionTable::anonymous(Behavior::identity(1, 3).unwrap());
        let k4 = crate::algorithm::Algorithm::from_table("deg3", table);
        assert_eq!(
            lower_bound_witness(&k4, Exponent::integer(2), &zero, Some(5), WitnessMode::Empirical).unwrap_err(),
            LowerBoundError::NotARing(3)
        );
    }
}
