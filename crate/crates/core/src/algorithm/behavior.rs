use alloc::vec;
use alloc::vec::Vec;

use super::AlgorithmError;
use crate::model::state_mask;
use crate::State;

/// An identifier-free transition function `{0,1}^{(d+1)f} -> {0,1}^f`.
///
/// Entry `x` of the table is the new state for the packed input
/// `own ‖ port 0 ‖ … ‖ port d-1`, own state in the most significant `f`
/// bits. Two behaviors are equal iff their tables are equal; the derived
/// `Ord` compares `f`, `d`, then tables lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Behavior {
    f: u32,
    d: usize,
    table: Vec<State>,
}

/// Number of packed inputs, `2^{(d+1)f}`, if it fits in `usize`.
pub fn input_count(f: u32, d: usize) -> Option<usize> {
    let bits = (d as u64 + 1).checked_mul(f as u64)?;
    if bits >= usize::BITS as u64 {
        return None;
    }
    Some(1usize << bits)
}

/// Packs `(own, view)` into a table index.
pub fn pack_input(f: u32, own: State, view: &[State]) -> usize {
    if f == 0 {
        return 0;
    }
    view.iter().fold(own as usize, |acc, &s| (acc << f) | s as usize)
}

/// Splits a table index back into `(own, view)`.
pub fn unpack_input(f: u32, d: usize, index: usize) -> (State, Vec<State>) {
    let mask = state_mask(f) as usize;
    let mut view = vec![0; d];
    let mut rest = index;
    if f == 0 {
        return (0, view);
    }
    for slot in view.iter_mut().rev() {
        *slot = (rest & mask) as State;
        rest >>= f;
    }
    ((rest & mask) as State, view)
}

impl Behavior {
    /// Validates the length and the width of every entry.
    pub fn new(f: u32, d: usize, table: Vec<State>) -> Result<Self, AlgorithmError> {
        let expected = input_count(f, d).ok_or(AlgorithmError::TooLarge { f, d })?;
        if table.len() != expected {
            return Err(AlgorithmError::TableLength { expected, found: table.len() });
        }
        if let Some(&bad) = table.iter().find(|&&s| s >> f != 0) {
            return Err(AlgorithmError::StateTooWide { value: bad, f });
        }
        Ok(Behavior { f, d, table })
    }

    /// Tabulates `rule` over every packed input.
    pub fn from_fn(f: u32, d: usize, mut rule: impl FnMut(State, &[State]) -> State) -> Result<Self, AlgorithmError> {
        let count = input_count(f, d).ok_or(AlgorithmError::TooLarge { f, d })?;
        let mask = state_mask(f);
        let table = (0..count)
            .map(|x| {
                let (own, view) = unpack_input(f, d, x);
                rule(own, &view) & mask
            })
            .collect();
        Ok(Behavior { f, d, table })
    }

    /// `s ↦ s`.
    pub fn identity(f: u32, d: usize) -> Result<Self, AlgorithmError> {
        Behavior::from_fn(f, d, |own, _| own)
    }

    /// Constant output `value`.
    pub fn constant(f: u32, d: usize, value: State) -> Result<Self, AlgorithmError> {
        Behavior::from_fn(f, d, |_, _| value)
    }

    /// Memory width.
    pub fn f(&self) -> u32 {
        self.f
    }

    /// Degree.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The packed output vector.
    pub fn table(&self) -> &[State] {
        &self.table
    }

    /// New state for `(own, view)`. `view.len()` must equal `d`.
    pub fn apply(&self, own: State, view: &[State]) -> State {
        self.table[pack_input(self.f, own, view)]
    }

    /// New state when the node and all its neighbors hold `s`.
    pub fn on_homogeneous(&self, s: State) -> State {
        let x = if self.f == 0 {
            0
        } else {
            (0..self.d).fold(s as usize, |acc, _| (acc << self.f) | s as usize)
        };
        self.table[x]
    }

    /// Entries packed `f` bits each, entry 0 first, least-significant bit
    /// first within each byte.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let total = self.table.len() * self.f as usize;
        let mut bytes = vec![0u8; total.div_ceil(8)];
        for (i, &s) in self.table.iter().enumerate() {
            for b in 0..self.f as usize {
                if (s >> b) & 1 == 1 {
                    let bit = i * self.f as usize + b;
                    bytes[bit / 8] |= 1 << (bit % 8);
                }
            }
        }
        bytes
    }

    /// Inverse of [`Behavior::to_packed_bytes`].
    pub fn from_packed_bytes(f: u32, d: usize, bytes: &[u8]) -> Result<Self, AlgorithmError> {
        let count = input_count(f, d).ok_or(AlgorithmError::TooLarge { f, d })?;
        let total = count * f as usize;
        if bytes.len() != total.div_ceil(8) {
            return Err(AlgorithmError::TableLength { expected: total.div_ceil(8), found: bytes.len() });
        }
        let table = (0..count)
            .map(|i| {
                (0..f as usize).fold(0, |acc, b| {
                    let bit = i * f as usize + b;
                    acc | ((((bytes[bit / 8] >> (bit % 8)) & 1) as State) << b)
                })
            })
            .collect();
        Ok(Behavior { f, d, table })
    }
}

/// Pointwise equality of two behaviors of the same shape.
pub fn canonical_behavior_equal(a: &Behavior, b: &Behavior) -> Result<bool, AlgorithmError> {
    if a.f != b.f || a.d != b.d {
        return Err(AlgorithmError::ShapeMismatch { f: a.f, d: a.d, other_f: b.f, other_d: b.d });
    }
    Ok(a.table == b.table)
}
