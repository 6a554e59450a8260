use alloc::vec::Vec;

use super::{AlgorithmError, Behavior};
use crate::Ident;

/// An explicit ID-based transition table.
///
/// Identifier `i` in `1 ..= per_id.len()` runs `per_id[i - 1]`; every other
/// identifier runs `fallback`. An empty `per_id` is an anonymous algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    fallback: Behavior,
    per_id: Vec<Behavior>,
}

impl TransitionTable {
    /// Every identifier runs `behavior`.
    pub fn anonymous(behavior: Behavior) -> Self {
        TransitionTable { fallback: behavior, per_id: Vec::new() }
    }

    /// Per-identifier behaviors, all of the same shape as `fallback`.
    pub fn per_id(per_id: Vec<Behavior>, fallback: Behavior) -> Result<Self, AlgorithmError> {
        if let Some(b) = per_id.iter().find(|b| b.f() != fallback.f() || b.d() != fallback.d()) {
            return Err(AlgorithmError::ShapeMismatch {
                f: fallback.f(),
                d: fallback.d(),
                other_f: b.f(),
                other_d: b.d(),
            });
        }
        Ok(TransitionTable { fallback, per_id })
    }

    /// Memory width.
    pub fn f(&self) -> u32 {
        self.fallback.f()
    }

    /// Degree.
    pub fn d(&self) -> usize {
        self.fallback.d()
    }

    /// Behavior for identifiers without an explicit entry.
    pub fn fallback(&self) -> &Behavior {
        &self.fallback
    }

    /// Explicit entries; index `i` is identifier `i + 1`.
    pub fn entries(&self) -> &[Behavior] {
        &self.per_id
    }

    /// The behavior run by identifier `id`.
    pub fn behavior_for(&self, id: Ident) -> &Behavior {
        usize::try_from(id)
            .ok()
            .and_then(|i| i.checked_sub(1))
            .and_then(|i| self.per_id.get(i))
            .unwrap_or(&self.fallback)
    }

    pub(crate) fn depends_on_id(&self) -> bool {
        self.per_id.iter().any(|b| *b != self.fallback)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lookup_by_id() {
        let zero = Behavior::constant(1, 2, 0).unwrap();
        let one = Behavior::constant(1, 2, 1).unwrap();
        let t = TransitionTable::per_id(vec![one.clone(), zero.clone()], zero.clone()).unwrap();
        assert_eq!(t.behavior_for(1), &one);
        assert_eq!(t.behavior_for(2), &zero);
        assert_eq!(t.behavior_for(0), &zero);
        assert_eq!(t.behavior_for(99), &zero);
        assert!(t.depends_on_id());
        assert!(!TransitionTable::anonymous(one).depends_on_id());
        let wrong = Behavior::constant(1, 1, 0).unwrap();
        assert!(TransitionTable::per_id(vec![wrong], zero).is_err());
    }
}
