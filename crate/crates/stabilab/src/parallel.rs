//! Rayon-backed versions of the embarrassingly parallel steps.

use std::collections::BTreeMap;

use rayon::prelude::*;

use stabilab_core::lowerbound::{
    check_tabulation, extract_behavior, lower_bound_witness_with, order_classes, LowerBoundError, MAX_ID_RANGE,
    DEFAULT_TABULATION_LIMIT,
};
use stabilab_core::{Algorithm, Behavior, Exponent, IdClass, ProblemSpec, Witness, WitnessMode};

type Buckets = BTreeMap<Behavior, Vec<u64>>;

fn merge(mut a: Buckets, b: Buckets) -> Buckets {
    for (k, mut ids) in b {
        a.entry(k).or_default().append(&mut ids);
    }
    a
}

/// Same result as `lowerbound::bucket_identifiers`, computed in parallel.
/// Each worker fills its own map; maps are merged at the end.
pub fn bucket_identifiers(alg: &Algorithm, lo: u64, hi: u64) -> Result<Vec<IdClass>, LowerBoundError> {
    if lo == 0 || lo > hi {
        return Err(LowerBoundError::EmptyRange { lo, hi });
    }
    check_tabulation(alg, DEFAULT_TABULATION_LIMIT)?;
    let buckets = (lo..=hi)
        .into_par_iter()
        .try_fold(Buckets::new, |mut acc, id| {
            acc.entry(extract_behavior(alg, id)?).or_default().push(id);
            Ok::<_, LowerBoundError>(acc)
        })
        .try_reduce(Buckets::new, |a, b| Ok(merge(a, b)))?;
    Ok(order_classes(buckets.into_iter().map(|(behavior, members)| IdClass { behavior, members }).collect()))
}

/// `lowerbound::lower_bound_witness` with parallel bucketing.
pub fn lower_bound_witness(
    alg: &Algorithm,
    c: Exponent,
    spec: &ProblemSpec,
    n: Option<usize>,
    mode: WitnessMode,
) -> Result<Witness, LowerBoundError> {
    lower_bound_witness_with(alg, c, spec, n, mode, |n| {
        let cap = c.id_cap(n)?;
        if cap > MAX_ID_RANGE {
            return Err(LowerBoundError::RangeTooLarge(cap));
        }
        Ok((bucket_identifiers(alg, 1, cap)?, cap))
    })
}
