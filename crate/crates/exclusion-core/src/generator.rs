//! Assembly of the symmetric generators for both processes and of the
//! transposition Cayley adjacency matrices.
//!
//! The complete graph is hard-wired: off-diagonal support comes straight from
//! the neighbor relation, never from an edge list. Matrices are stored as a
//! uniform off-diagonal rate plus an edge list in canonical (row, col) order;
//! densification happens only inside the eigensolver oracle.

use crate::combin::factorial;
use crate::linalg::{SymMat, MAX_DENSE_DIM};
use crate::state::{
    lep_neighbors, rank_subset, rank_tuple, uep_neighbors, unrank_subset, unrank_tuple,
    ProcessKind, ProcessParams,
};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Symmetric rate matrix of one process instance.
///
/// Diagonal entries all equal `-exit_rate()`; every listed edge carries the
/// off-diagonal rate `alpha` (stored once with `row < col`).
#[derive(Debug, Clone)]
pub struct Generator {
    pub params: ProcessParams,
    pub dim: usize,
    edges: Vec<(usize, usize)>,
}

impl Generator {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Total jump rate out of any state (the negated diagonal).
    pub fn exit_rate(&self) -> f64 {
        self.params.exit_rate()
    }

    /// y = (-Q) x.
    pub fn neg_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        let exit = self.exit_rate();
        let alpha = self.params.alpha;
        let mut y: Vec<f64> = x.iter().map(|&v| exit * v).collect();
        for &(i, j) in &self.edges {
            y[i] -= alpha * x[j];
            y[j] -= alpha * x[i];
        }
        Ok(y)
    }

    /// Dense copy of -Q (positive semidefinite).
    pub fn neg_dense(&self) -> Result<SymMat> {
        let mut m = SymMat::zeros(self.dim)?;
        let exit = self.exit_rate();
        for i in 0..self.dim {
            m.set(i, i, exit);
        }
        for &(i, j) in &self.edges {
            m.set_sym(i, j, -self.params.alpha);
        }
        Ok(m)
    }

    /// Coordinate triplets of Q itself, in canonical (row, col) order with
    /// the diagonal included. This is the dump format's payload.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let exit = self.exit_rate();
        let alpha = self.params.alpha;
        let mut out = Vec::with_capacity(self.dim + 2 * self.edges.len());
        for i in 0..self.dim {
            out.push((i, i, -exit));
        }
        for &(i, j) in &self.edges {
            out.push((i, j, alpha));
            out.push((j, i, alpha));
        }
        out.sort_by_key(|t| (t.0, t.1));
        out
    }
}

fn check_dense_capacity(dim: u64) -> Result<usize> {
    if dim as usize > MAX_DENSE_DIM {
        return Err(Error::Capacity(format!(
            "state space of size {dim} exceeds the dense-solver cap {MAX_DENSE_DIM}"
        )));
    }
    Ok(dim as usize)
}

/// Generator of the unlabelled process: dim C(n, l), off-diagonal alpha on
/// single-swap pairs, diagonal -alpha l(n-l).
pub fn build_uep_generator(p: ProcessParams) -> Result<Generator> {
    if p.kind != ProcessKind::Uep {
        return Err(Error::InvalidParameter(
            "build_uep_generator requires kind = UEP".into(),
        ));
    }
    let dim = check_dense_capacity(p.state_count()?)?;
    let mut edges = Vec::new();
    for r in 0..dim {
        let s = unrank_subset(r as u64, p.n, p.ell)?;
        for t in uep_neighbors(&s, p.n)? {
            let r2 = rank_subset(&t, p.n)? as usize;
            if r < r2 {
                edges.push((r, r2));
            }
        }
    }
    edges.sort_unstable();
    Ok(Generator { params: p, dim, edges })
}

/// Generator of the labelled process: dim (n)_l, off-diagonal alpha on
/// ball-move and transposition pairs, diagonal -alpha (l(n-l) + C(l,2)).
pub fn build_lep_generator(p: ProcessParams) -> Result<Generator> {
    if p.kind != ProcessKind::Lep {
        return Err(Error::InvalidParameter(
            "build_lep_generator requires kind = LEP".into(),
        ));
    }
    let dim = check_dense_capacity(p.state_count()?)?;
    let mut edges = Vec::new();
    for r in 0..dim {
        let x = unrank_tuple(r as u64, p.n, p.ell)?;
        for y in lep_neighbors(&x, p.n)? {
            let r2 = rank_tuple(&y, p.n)? as usize;
            if r < r2 {
                edges.push((r, r2));
            }
        }
    }
    edges.sort_unstable();
    Ok(Generator { params: p, dim, edges })
}

/// 0/1 adjacency of the Cayley graph of the symmetric group on `k` items
/// generated by the transpositions. Permutations are indexed by the same
/// falling-factorial code as tuples with l = n = k, so spectra computed here
/// compose directly with the tuple machinery.
#[derive(Debug, Clone)]
pub struct CayleyAdjacency {
    pub k: usize,
    pub dim: usize,
    edges: Vec<(usize, usize)>,
}

impl CayleyAdjacency {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn dense(&self) -> Result<SymMat> {
        let mut m = SymMat::zeros(self.dim)?;
        for &(i, j) in &self.edges {
            m.set_sym(i, j, 1.0);
        }
        Ok(m)
    }
}

/// Builds the Cayley adjacency for `k` items. Practical limit is k <= 8.
pub fn build_cayley_adjacency(k: usize) -> Result<CayleyAdjacency> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let dim = check_dense_capacity(factorial(k as u64)?)?;
    let mut edges = Vec::new();
    for r in 0..dim {
        let x = unrank_tuple(r as u64, k, k)?;
        for i in 0..k {
            for j in i + 1..k {
                let mut positions = x.positions().to_vec();
                positions.swap(i, j);
                let y = crate::state::TupleState::new(positions, k)?;
                let r2 = rank_tuple(&y, k)? as usize;
                if r < r2 {
                    edges.push((r, r2));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(CayleyAdjacency { k, dim, edges })
}

/// The affine map mu -> alpha (C(k,2) - mu) carrying spec(A_k) onto
/// spec(-Q) of the interchange process on k items.
#[derive(Debug, Clone, Copy)]
pub struct CayleyLepMap {
    pub k: usize,
    pub alpha: f64,
    pub center: f64,
}

impl CayleyLepMap {
    pub fn apply(&self, mu: f64) -> f64 {
        self.alpha * (self.center - mu)
    }
}

pub fn relate_cayley_to_lep(k: usize, alpha: f64) -> CayleyLepMap {
    let center = (k * k.saturating_sub(1) / 2) as f64;
    CayleyLepMap { k, alpha, center }
}
