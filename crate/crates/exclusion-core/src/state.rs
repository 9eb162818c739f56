//! State spaces for the two processes on the complete graph with `n`
//! vertices: `l`-element subsets for the unlabelled process and ordered
//! `l`-tuples of distinct vertices for the labelled one.
//!
//! Subsets are ranked colexicographically through the combinatorial number
//! system; tuples use a falling-factorial (Lehmer-style) mixed-radix code.
//! Both codes rank and unrank in O(l) with no tables beyond binomials.

use crate::combin::{binomial, falling_factorial};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Which of the two processes a parameter set refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    /// Unlabelled exclusion process on `l`-subsets.
    Uep,
    /// Labelled exclusion process on ordered `l`-tuples; `l = n` is the
    /// interchange process (random transpositions).
    Lep,
}

/// Parameters of a process instance: vertex count, ball count, edge-clock
/// intensity and the unlabelled/labelled flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub kind: ProcessKind,
}

impl ProcessParams {
    pub fn new(n: usize, ell: usize, alpha: f64, kind: ProcessKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(format!("n must be >= 1, got {n}")));
        }
        if ell > n {
            return Err(Error::InvalidParameter(format!(
                "ell must satisfy 0 <= ell <= n, got ell={ell}, n={n}"
            )));
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(ProcessParams { n, ell, alpha, kind })
    }

    /// State-space size: C(n, l) for the unlabelled process, (n)_l for the
    /// labelled one. Capacity error once it no longer fits in 63 bits.
    pub fn state_count(&self) -> Result<u64> {
        match self.kind {
            ProcessKind::Uep => binomial(self.n as u64, self.ell as u64),
            ProcessKind::Lep => falling_factorial(self.n as u64, self.ell as u64),
        }
    }

    /// Total jump rate out of any state.
    pub fn exit_rate(&self) -> f64 {
        self.alpha * self.jump_degree() as f64
    }

    /// Number of distinct moves out of any state: l(n-l) for the unlabelled
    /// process, l(n-l) + C(l,2) for the labelled one.
    pub fn jump_degree(&self) -> u64 {
        let (n, ell) = (self.n as u64, self.ell as u64);
        match self.kind {
            ProcessKind::Uep => ell * (n - ell),
            ProcessKind::Lep => ell * (n - ell) + ell * ell.saturating_sub(1) / 2,
        }
    }
}

/// An unlabelled state: the sorted set of vertices holding a black ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetState {
    members: Vec<usize>,
}

impl SubsetState {
    /// Members must be strictly increasing and within `[0, n)`.
    pub fn new(members: Vec<usize>, n: usize) -> Result<Self> {
        for w in members.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(format!(
                    "subset members must be strictly increasing, got {:?}",
                    members
                )));
            }
        }
        if let Some(&last) = members.last() {
            if last >= n {
                return Err(Error::InvalidParameter(format!(
                    "subset member {last} out of range for n={n}"
                )));
            }
        }
        Ok(SubsetState { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A labelled state: entry `j` is the vertex occupied by ball `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleState {
    positions: Vec<usize>,
}

impl TupleState {
    /// Positions must be pairwise distinct and within `[0, n)`.
    pub fn new(positions: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = alloc::vec![false; n];
        for &p in &positions {
            if p >= n {
                return Err(Error::InvalidParameter(format!(
                    "tuple entry {p} out of range for n={n}"
                )));
            }
            if seen[p] {
                return Err(Error::InvalidParameter(format!(
                    "tuple entries must be distinct, got {:?}",
                    positions
                )));
            }
            seen[p] = true;
        }
        Ok(TupleState { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Colex rank of a subset: sum of C(m_i, i+1) over the sorted members.
pub fn rank_subset(s: &SubsetState, n: usize) -> Result<u64> {
    if s.members.last().is_some_and(|&m| m >= n) {
        return Err(Error::InvalidParameter(format!(
            "subset {:?} does not fit in n={n}",
            s.members
        )));
    }
    let mut rank = 0u64;
    for (i, &m) in s.members.iter().enumerate() {
        rank += binomial(m as u64, i as u64 + 1)?;
    }
    Ok(rank)
}

/// Inverse of [`rank_subset`].
pub fn unrank_subset(mut rank: u64, n: usize, ell: usize) -> Result<SubsetState> {
    let total = binomial(n as u64, ell as u64)?;
    if rank >= total {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} out of range for C({n}, {ell}) = {total}"
        )));
    }
    let mut members = alloc::vec![0usize; ell];
    for i in (1..=ell).rev() {
        // largest m with C(m, i) <= rank
        let mut m = i as u64 - 1;
        let mut next = binomial(m + 1, i as u64)?;
        while next <= rank {
            m += 1;
            next = binomial(m + 1, i as u64)?;
        }
        rank -= binomial(m, i as u64)?;
        members[i - 1] = m as usize;
    }
    SubsetState::new(members, n)
}

/// All C(n, l) subsets in colexicographic order; position equals colex rank.
pub fn enumerate_subsets(n: usize, ell: usize) -> Result<Vec<SubsetState>> {
    if ell > n {
        return Err(Error::InvalidParameter(format!(
            "ell={ell} exceeds n={n}"
        )));
    }
    let total = binomial(n as u64, ell as u64)?;
    if total > (1 << 32) {
        return Err(Error::Capacity(format!(
            "refusing to materialize {total} subsets"
        )));
    }
    (0..total).map(|r| unrank_subset(r, n, ell)).collect()
}

/// Falling-factorial rank of a tuple: digit `j` counts how many
/// still-unused vertices precede `positions[j]`.
pub fn rank_tuple(x: &TupleState, n: usize) -> Result<u64> {
    if x.positions.iter().any(|&p| p >= n) {
        return Err(Error::InvalidParameter(format!(
            "tuple {:?} does not fit in n={n}",
            x.positions
        )));
    }
    let mut used = alloc::vec![false; n];
    let mut rank = 0u64;
    for (j, &p) in x.positions.iter().enumerate() {
        let digit = (0..p).filter(|&v| !used[v]).count() as u64;
        rank = rank * (n - j) as u64 + digit;
        used[p] = true;
    }
    Ok(rank)
}

/// Inverse of [`rank_tuple`].
pub fn unrank_tuple(rank: u64, n: usize, ell: usize) -> Result<TupleState> {
    let total = falling_factorial(n as u64, ell as u64)?;
    if rank >= total {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} out of range for ({n})_{ell} = {total}"
        )));
    }
    // extract mixed-radix digits, most significant first
    let mut digits = alloc::vec![0u64; ell];
    let mut r = rank;
    for j in (0..ell).rev() {
        let radix = (n - j) as u64;
        digits[j] = r % radix;
        r /= radix;
    }
    let mut unused: Vec<usize> = (0..n).collect();
    let mut positions = Vec::with_capacity(ell);
    for &d in &digits {
        positions.push(unused.remove(d as usize));
    }
    TupleState::new(positions, n)
}

/// Unlabelled neighbors: every state reached by moving one black ball to a
/// white vertex. Exactly l(n-l) states, no duplicates.
pub fn uep_neighbors(s: &SubsetState, n: usize) -> Result<Vec<SubsetState>> {
    let mut occupied = alloc::vec![false; n];
    for &m in &s.members {
        if m >= n {
            return Err(Error::InvalidParameter(format!(
                "subset {:?} does not fit in n={n}",
                s.members
            )));
        }
        occupied[m] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !occupied[v]).collect();
    let mut out = Vec::with_capacity(s.members.len() * free.len());
    for (i, _) in s.members.iter().enumerate() {
        for &b in &free {
            let mut members = s.members.clone();
            members[i] = b;
            members.sort_unstable();
            out.push(SubsetState { members });
        }
    }
    Ok(out)
}

/// Labelled neighbors: single-ball moves to unoccupied vertices plus
/// transpositions of two labelled balls. Exactly l(n-l) + C(l,2) states.
pub fn lep_neighbors(x: &TupleState, n: usize) -> Result<Vec<TupleState>> {
    let ell = x.positions.len();
    let mut occupied = alloc::vec![false; n];
    for &p in &x.positions {
        if p >= n {
            return Err(Error::InvalidParameter(format!(
                "tuple {:?} does not fit in n={n}",
                x.positions
            )));
        }
        occupied[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !occupied[v]).collect();
    let mut out = Vec::with_capacity(ell * free.len() + ell * ell.saturating_sub(1) / 2);
    for i in 0..ell {
        for &v in &free {
            let mut positions = x.positions.clone();
            positions[i] = v;
            out.push(TupleState { positions });
        }
    }
    for i in 0..ell {
        for j in i + 1..ell {
            let mut positions = x.positions.clone();
            positions.swap(i, j);
            out.push(TupleState { positions });
        }
    }
    Ok(out)
}
