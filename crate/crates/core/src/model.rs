//! Topologies, configurations and identifier assignments.
//!
//! A [`Topology`] is a port-numbered simple graph. Port order is the only
//! notion of direction anywhere in the crate: a node's view of its
//! neighbors is always listed by port index.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::{Ident, State, MAX_WIDTH};

/// Errors raised while building or validating model objects.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid size: a ring needs at least 2 nodes, got {0}")]
    InvalidSize(usize),
    #[error("node {node} has degree {found}, expected {expected}")]
    WrongDegree { node: usize, found: usize, expected: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} names a node outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("node {0} lists {1} but {1} does not list {0}")]
    Asymmetric(usize, usize),
    #[error("graph is disconnected: node {0} is unreachable from node 0")]
    Disconnected(usize),
    #[error("following port 0 from node 0 does not visit every node")]
    NotOriented,
    #[error("node index {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("state {value} at node {node} does not fit in {f} bits")]
    StateTooWide { node: usize, value: State, f: u32 },
    #[error("memory width {0} exceeds the supported maximum of {MAX_WIDTH} bits")]
    WidthTooLarge(u32),
    #[error("expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("identifier {id} at node {node} is outside 1..={cap}")]
    IdOutOfRange { node: usize, id: Ident, cap: Ident },
    #[error("identifier {id} is used by nodes {first} and {second}")]
    DuplicateId { id: Ident, first: usize, second: usize },
    #[error("unknown topology kind {0:?}")]
    UnknownKind(String),
    #[error("invalid exponent {0:?}")]
    InvalidExponent(String),
    #[error("identifier cap n^c for n={0} does not fit in 64 bits")]
    CapOverflow(usize),
}

/// The shape of a [`Topology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    /// Ring where port 0 of node `v` is `v+1` and port 1 is `v-1`.
    OrientedRing,
    /// Ring whose two port labels are permuted per node.
    ScrambledRing,
    /// A connected d-regular simple graph (includes the 2-node edge graph).
    Regular,
}

impl TopologyKind {
    /// Label used in file formats.
    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::OrientedRing => "oriented-ring",
            TopologyKind::ScrambledRing => "port-scrambled-ring",
            TopologyKind::Regular => "d-regular",
        }
    }
}

impl FromStr for TopologyKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oriented-ring" => Ok(TopologyKind::OrientedRing),
            "port-scrambled-ring" => Ok(TopologyKind::ScrambledRing),
            "d-regular" => Ok(TopologyKind::Regular),
            _ => Err(ModelError::UnknownKind(s.into())),
        }
    }
}

/// A port-numbered simple connected graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    kind: TopologyKind,
    ports: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a topology from explicit port lists and validates it.
    pub fn from_ports(kind: TopologyKind, ports: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let topology = Topology { kind, ports };
        topology.validate()?;
        Ok(topology)
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.ports.len()
    }

    /// Shape tag.
    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// Degree of `node`.
    pub fn degree(&self, node: usize) -> usize {
        self.ports[node].len()
    }

    /// Per-node degrees.
    pub fn degree_profile(&self) -> Vec<usize> {
        self.ports.iter().map(Vec::len).collect()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.ports.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree if every node has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.ports.first()?.len();
        self.ports.iter().all(|p| p.len() == d).then_some(d)
    }

    /// Neighbors of `node`, indexed by port.
    pub fn ports(&self, node: usize) -> &[usize] {
        &self.ports[node]
    }

    /// All port lists.
    pub fn port_table(&self) -> &[Vec<usize>] {
        &self.ports
    }

    /// Checks simplicity, symmetry, connectivity and the kind-specific shape.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n();
        if n < 2 {
            return Err(ModelError::InvalidSize(n));
        }
        for (v, ports) in self.ports.iter().enumerate() {
            for (i, &u) in ports.iter().enumerate() {
                if u >= n {
                    return Err(ModelError::EdgeOutOfRange(v, u, n));
                }
                if u == v {
                    return Err(ModelError::SelfLoop(v));
                }
                if ports[..i].contains(&u) {
                    return Err(ModelError::DuplicateEdge(v, u));
                }
                if !self.ports[u].contains(&v) {
                    return Err(ModelError::Asymmetric(v, u));
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.ports[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(ModelError::Disconnected(v));
        }
        match self.kind {
            TopologyKind::OrientedRing | TopologyKind::ScrambledRing => {
                for v in 0..n {
                    if self.degree(v) != 2 {
                        return Err(ModelError::WrongDegree { node: v, found: self.degree(v), expected: 2 });
                    }
                }
                if self.kind == TopologyKind::OrientedRing {
                    let mut v = 0;
                    for step in 0..n {
                        if self.ports[v][1] != (v + n - 1) % n || (step > 0 && v == 0) {
                            return Err(ModelError::NotOriented);
                        }
                        v = self.ports[v][0];
                    }
                    if v != 0 {
                        return Err(ModelError::NotOriented);
                    }
                }
            }
            TopologyKind::Regular => {
                let d = self.degree(0);
                for v in 0..n {
                    if self.degree(v) != d {
                        return Err(ModelError::WrongDegree { node: v, found: self.degree(v), expected: d });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds a ring on `n` nodes.
///
/// With `scrambled = false` the ring is oriented: port 0 ("right") of node
/// `v` leads to `v+1 mod n` and port 1 ("left") to `v-1 mod n`. With
/// `scrambled = true` each node's two port labels are swapped with
/// probability one half, deterministically from `seed`.
///
/// `n = 2` yields the single-edge graph (one port per node).
pub fn make_ring(n: usize, scrambled: bool, seed: Option<u64>) -> Result<Topology, ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidSize(n));
    }
    if n == 2 {
        return Topology::from_ports(TopologyKind::Regular, vec![vec![1], vec![0]]);
    }
    let mut ports: Vec<Vec<usize>> = (0..n).map(|v| vec![(v + 1) % n, (v + n - 1) % n]).collect();
    let kind = if scrambled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
        for p in &mut ports {
            if rng.next_u32() & 1 == 1 {
                p.swap(0, 1);
            }
        }
        TopologyKind::ScrambledRing
    } else {
        TopologyKind::OrientedRing
    };
    Topology::from_ports(kind, ports)
}

/// Builds a d-regular topology from an undirected edge list. Ports are
/// assigned in ascending neighbor order.
pub fn make_regular(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Topology, ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidSize(n));
    }
    let mut ports: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(ModelError::EdgeOutOfRange(a, b, n));
        }
        if a == b {
            return Err(ModelError::SelfLoop(a));
        }
        if ports[a].contains(&b) {
            return Err(ModelError::DuplicateEdge(a.min(b), a.max(b)));
        }
        ports[a].push(b);
        ports[b].push(a);
    }
    for (v, p) in ports.iter_mut().enumerate() {
        if p.len() != d {
            return Err(ModelError::WrongDegree { node: v, found: p.len(), expected: d });
        }
        p.sort_unstable();
    }
    Topology::from_ports(TopologyKind::Regular, ports)
}

/// One `f`-bit state per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    f: u32,
    states: Vec<State>,
}

impl Configuration {
    /// Validates that every state fits in `f` bits.
    pub fn new(f: u32, states: Vec<State>) -> Result<Self, ModelError> {
        if f > MAX_WIDTH {
            return Err(ModelError::WidthTooLarge(f));
        }
        for (node, &value) in states.iter().enumerate() {
            if value >> f != 0 {
                return Err(ModelError::StateTooWide { node, value, f });
            }
        }
        Ok(Configuration { f, states })
    }

    /// The configuration where every one of `n` nodes holds `state`.
    pub fn homogeneous(f: u32, n: usize, state: State) -> Result<Self, ModelError> {
        Configuration::new(f, vec![state; n])
    }

    /// Decodes the `index`-th configuration in the packed enumeration order
    /// (node 0 in the least-significant `f` bits).
    pub fn from_index(f: u32, n: usize, index: u64) -> Self {
        let mask = state_mask(f);
        let states = (0..n)
            .map(|v| if f == 0 { 0 } else { (index >> (v as u32 * f)) & mask })
            .collect();
        Configuration { f, states }
    }

    /// Packed index, inverse of [`Configuration::from_index`]. Requires
    /// `n * f <= 64`.
    pub fn index(&self) -> u64 {
        pack_states(self.f, &self.states)
    }

    /// Memory width.
    pub fn f(&self) -> u32 {
        self.f
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.states.len()
    }

    /// All states, by node index.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// `S(γ, v)`.
    pub fn state(&self, node: usize) -> State {
        self.states[node]
    }

    /// Consumes the configuration, returning its states.
    pub fn into_states(self) -> Vec<State> {
        self.states
    }

    /// True iff all states are equal.
    pub fn is_homogeneous(&self) -> bool {
        is_homogeneous(&self.states)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn state_mask(f: u32) -> State {
    if f >= 64 {
        State::MAX
    } else {
        (1 << f) - 1
    }
}

pub(crate) fn pack_states(f: u32, states: &[State]) -> u64 {
    states
        .iter()
        .enumerate()
        .fold(0u64, |acc, (v, &s)| if f == 0 { acc } else { acc | (s << (v as u32 * f)) })
}

/// Homogeneity: every node holds the same value. Vacuously true for zero or
/// one node.
pub fn is_homogeneous(states: &[State]) -> bool {
    states.windows(2).all(|w| w[0] == w[1])
}

/// States of `node`'s neighbors, listed by port.
pub fn neighbor_view(topology: &Topology, config: &Configuration, node: usize) -> Result<Vec<State>, ModelError> {
    let n = topology.n();
    if node >= n {
        return Err(ModelError::NodeOutOfRange { node, n });
    }
    if config.n() != n {
        return Err(ModelError::LengthMismatch { expected: n, found: config.n() });
    }
    Ok(topology.ports(node).iter().map(|&u| config.state(u)).collect())
}

/// The identifier exponent `c`, kept as an exact fraction `num / den`.
///
/// Parses integers (`2`), decimals (`1.5`) and fractions (`3/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: u64,
    den: u64,
}

impl Exponent {
    /// Builds `num / den` in lowest terms.
    pub fn new(num: u64, den: u64) -> Result<Self, ModelError> {
        if den == 0 {
            return Err(ModelError::InvalidExponent(alloc::format!("{num}/{den}")));
        }
        let g = num.gcd(&den).max(1);
        Ok(Exponent { num: num / g, den: den / g })
    }

    /// An integer exponent.
    pub fn integer(c: u64) -> Self {
        Exponent { num: c, den: 1 }
    }

    /// Numerator in lowest terms.
    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Denominator in lowest terms.
    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `c > 1`.
    pub fn exceeds_one(&self) -> bool {
        self.num > self.den
    }

    /// `floor(n^c)`, computed exactly.
    pub fn id_cap(&self, n: usize) -> Result<Ident, ModelError> {
        let power = BigUint::from(n).pow(u32::try_from(self.num).map_err(|_| ModelError::CapOverflow(n))?);
        let root = if self.den == 1 {
            power
        } else {
            power.nth_root(u32::try_from(self.den).map_err(|_| ModelError::CapOverflow(n))?)
        };
        root.to_u64().ok_or(ModelError::CapOverflow(n))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Exponent {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidExponent(s.into());
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return Exponent::new(num, den).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 9 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Exponent::new(num, den)
    }
}

/// Distinct identifiers in `1 ..= id_cap`, one per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdAssignment {
    ids: Vec<Ident>,
    id_cap: Ident,
}

impl IdAssignment {
    /// Validates injectivity and range.
    pub fn new(ids: Vec<Ident>, id_cap: Ident) -> Result<Self, ModelError> {
        for (node, &id) in ids.iter().enumerate() {
            if id == 0 || id > id_cap {
                return Err(ModelError::IdOutOfRange { node, id, cap: id_cap });
            }
        }
        let mut sorted: Vec<(Ident, usize)> = ids.iter().copied().zip(0..).collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ModelError::DuplicateId { id: w[0].0, first: w[0].1, second: w[1].1 });
        }
        Ok(IdAssignment { ids, id_cap })
    }

    /// Identifiers with cap `floor(n^c)` where `n = ids.len()`.
    pub fn with_exponent(ids: Vec<Ident>, c: Exponent) -> Result<Self, ModelError> {
        let cap = c.id_cap(ids.len())?;
        IdAssignment::new(ids, cap)
    }

    /// `1, 2, ..., n` with cap `n`.
    pub fn sequential(n: usize) -> Self {
        IdAssignment { ids: (1..=n as Ident).collect(), id_cap: n as Ident }
    }

    /// `ID(v)`.
    pub fn id(&self, node: usize) -> Ident {
        self.ids[node]
    }

    /// All identifiers by node.
    pub fn ids(&self) -> &[Ident] {
        &self.ids
    }

    /// Largest admissible identifier.
    pub fn id_cap(&self) -> Ident {
        self.id_cap
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// True for the empty assignment.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oriented_three_ring() {
        let t = make_ring(3, false, None).unwrap();
        assert_eq!(t.ports(0), &[1, 2]);
        assert_eq!(t.ports(1), &[2, 0]);
        assert_eq!(t.ports(2), &[0, 1]);
        assert_eq!(t.kind(), TopologyKind::OrientedRing);
    }

    #[test]
    fn two_ring_is_an_edge() {
        let t = make_ring(2, false, None).unwrap();
        assert_eq!(t.degree_profile(), vec![1, 1]);
        assert_eq!(t.regular_degree(), Some(1));
        assert_eq!(make_ring(1, false, None), Err(ModelError::InvalidSize(1)));
    }

    #[test]
    fn ring_257() {
        let t = make_ring(257, false, None).unwrap();
        assert_eq!(t.n(), 257);
        assert!(t.degree_profile().iter().all(|&d| d == 2));
    }

    #[test]
    fn scrambled_ring_is_deterministic_and_valid() {
        let a = make_ring(11, true, Some(7)).unwrap();
        let b = make_ring(11, true, Some(7)).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        for v in 0..11 {
            let mut p = a.ports(v).to_vec();
            p.sort_unstable();
            let mut expected = vec![(v + 1) % 11, (v + 10) % 11];
            expected.sort_unstable();
            assert_eq!(p, expected);
        }
    }

    #[test]
    fn regular_graphs() {
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let t = make_regular(4, 3, &k4).unwrap();
        assert!(t.degree_profile().iter().all(|&d| d == 3));
        assert_eq!(t.ports(2), &[0, 1, 3]);

        let prism = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)];
        make_regular(6, 3, &prism).unwrap();

        let path = [(0, 1), (1, 2), (2, 3)];
        assert_eq!(
            make_regular(4, 2, &path),
            Err(ModelError::WrongDegree { node: 0, found: 1, expected: 2 })
        );
        assert_eq!(make_regular(3, 2, &[(0, 0)]), Err(ModelError::SelfLoop(0)));
        assert_eq!(make_regular(3, 2, &[(0, 1), (1, 0)]), Err(ModelError::DuplicateEdge(0, 1)));
        // two disjoint triangles
        let two = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        assert_eq!(make_regular(6, 2, &two), Err(ModelError::Disconnected(3)));
    }

    #[test]
    fn homogeneity() {
        assert!(is_homogeneous(&[0, 0, 0]));
        assert!(!is_homogeneous(&[0, 1, 0]));
        assert!(is_homogeneous(&[5]));
    }

    #[test]
    fn views_follow_ports() {
        let t = make_ring(3, false, None).unwrap();
        let c = Configuration::new(1, vec![0, 1, 1]).unwrap();
        assert_eq!(neighbor_view(&t, &c, 0).unwrap(), vec![1, 1]);
        let c = Configuration::new(2, vec![0, 1, 2]).unwrap();
        assert_eq!(neighbor_view(&t, &c, 1).unwrap(), vec![2, 0]);
        assert_eq!(
            neighbor_view(&t, &c, 3),
            Err(ModelError::NodeOutOfRange { node: 3, n: 3 })
        );
        let k4 = make_regular(4, 3, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let h = Configuration::homogeneous(2, 4, 3).unwrap();
        assert_eq!(neighbor_view(&k4, &h, 1).unwrap(), vec![3, 3, 3]);
    }

    #[test]
    fn configuration_width_is_checked() {
        assert!(Configuration::new(1, vec![0, 2]).is_err());
        let c = Configuration::new(3, vec![5, 0, 7]).unwrap();
        assert_eq!(Configuration::from_index(3, 3, c.index()), c);
    }

    #[test]
    fn exponent_parsing_and_caps() {
        let c: Exponent = "2".parse().unwrap();
        assert_eq!(c.id_cap(257).unwrap(), 66049);
        let c: Exponent = "1.5".parse().unwrap();
        assert_eq!((c.numerator(), c.denominator()), (3, 2));
        // 10^1.5 = 31.62...
        assert_eq!(c.id_cap(10).unwrap(), 31);
        assert_eq!("3/2".parse::<Exponent>().unwrap(), c);
        assert!(!"1.0".parse::<Exponent>().unwrap().exceeds_one());
        assert!("abc".parse::<Exponent>().is_err());
        assert!("2.".parse::<Exponent>().unwrap().exceeds_one());
    }

    #[test]
    fn id_assignment_checks() {
        assert!(IdAssignment::new(vec![1, 2, 3], 9).is_ok());
        assert_eq!(
            IdAssignment::new(vec![1, 2, 1], 9),
            Err(ModelError::DuplicateId { id: 1, first: 0, second: 2 })
        );
        assert!(IdAssignment::new(vec![0, 2], 9).is_err());
        assert!(IdAssignment::new(vec![10, 2], 9).is_err());
        let ids = IdAssignment::with_exponent(vec![3, 5, 9], Exponent::integer(2)).unwrap();
        assert_eq!(ids.id_cap(), 9);
    }
}
