//! Spectra: the closed-form unlabelled spectrum, the dense eigen-oracle, the
//! envelope recursion bounding the labelled spectrum, lift operators between
//! levels, and the verification reports built from them.

use crate::combin::{binomial, falling_factorial};
use crate::generator::{
    build_cayley_adjacency, build_lep_generator, build_uep_generator, relate_cayley_to_lep,
    CayleyAdjacency, Generator,
};
use crate::linalg::{sym_eigen, EigenDecomposition};
use crate::state::{
    rank_subset, rank_tuple, unrank_subset, unrank_tuple, ProcessKind, ProcessParams, TupleState,
};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Which matrix family a spectrum summary describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryKind {
    Uep,
    Lep,
    Cayley,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPair {
    pub value: f64,
    pub multiplicity: u64,
}

/// Multiset of (eigenvalue, multiplicity) pairs, ascending in eigenvalue.
///
/// For generator summaries the values are eigenvalues of -Q, so the smallest
/// is 0 with multiplicity 1 and all others are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    pub kind: SummaryKind,
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub pairs: Vec<SpectrumPair>,
}

impl SpectrumSummary {
    pub fn total(&self) -> u64 {
        self.pairs.iter().map(|p| p.multiplicity).sum()
    }

    /// Multiplicity of the eigenvalue closest to `value`, if within `tol`.
    pub fn multiplicity_at(&self, value: f64, tol: f64) -> Option<u64> {
        self.pairs
            .iter()
            .find(|p| (p.value - value).abs() <= tol)
            .map(|p| p.multiplicity)
    }
}

/// Default clustering tolerance, 1e-6 in units of alpha n^2. With alpha = 1
/// the spectra are integer-valued, so clusters are well separated.
pub fn default_cluster_tol(alpha: f64, n: usize) -> f64 {
    1e-6 * alpha * (n as f64) * (n as f64)
}

/// Groups sorted eigenvalues into clusters whose consecutive gaps stay below
/// `cluster_tol`; each cluster reports its mean and size.
pub fn cluster_spectrum(values: &[f64], cluster_tol: f64) -> Vec<SpectrumPair> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] - sorted[j - 1] <= cluster_tol {
            j += 1;
        }
        let m = (j - i) as u64;
        let mean = sorted[i..j].iter().sum::<f64>() / m as f64;
        pairs.push(SpectrumPair {
            value: mean,
            multiplicity: m,
        });
        i = j;
    }
    pairs
}

/// Closed-form spectrum of -Q for the unlabelled process: eigenvalues
/// i alpha (n - i + 1) for i = 0..l, with multiplicities C(n,i) - C(n,i-1)
/// (and 1 for i = 0). Requires l <= n/2.
pub fn uep_spectrum_closed_form(p: ProcessParams) -> Result<SpectrumSummary> {
    if p.kind != ProcessKind::Uep {
        return Err(Error::InvalidParameter(
            "closed-form spectrum requires kind = UEP".into(),
        ));
    }
    if 2 * p.ell > p.n {
        return Err(Error::InvalidParameter(format!(
            "closed form requires ell <= n/2, got ell={}, n={}",
            p.ell, p.n
        )));
    }
    let n = p.n as u64;
    let mut pairs = alloc::vec![SpectrumPair { value: 0.0, multiplicity: 1 }];
    for i in 1..=p.ell as u64 {
        let mult = binomial(n, i)? - binomial(n, i - 1)?;
        pairs.push(SpectrumPair {
            value: i as f64 * p.alpha * (n - i + 1) as f64,
            multiplicity: mult,
        });
    }
    Ok(SpectrumSummary {
        kind: SummaryKind::Uep,
        n: p.n,
        ell: p.ell,
        alpha: p.alpha,
        pairs,
    })
}

/// Independent oracle: dense symmetric eigendecomposition of -Q, clustered.
pub fn brute_force_spectrum(g: &Generator, cluster_tol: f64) -> Result<SpectrumSummary> {
    let eig = sym_eigen(&g.neg_dense()?)?;
    Ok(SpectrumSummary {
        kind: match g.params.kind {
            ProcessKind::Uep => SummaryKind::Uep,
            ProcessKind::Lep => SummaryKind::Lep,
        },
        n: g.params.n,
        ell: g.params.ell,
        alpha: g.params.alpha,
        pairs: cluster_spectrum(&eig.values, cluster_tol),
    })
}

/// Dense-eigensolver spectrum of a Cayley adjacency matrix, clustered.
pub fn cayley_spectrum(a: &CayleyAdjacency, cluster_tol: f64) -> Result<SpectrumSummary> {
    let eig = sym_eigen(&a.dense()?)?;
    Ok(SpectrumSummary {
        kind: SummaryKind::Cayley,
        n: a.k,
        ell: a.k,
        alpha: 1.0,
        pairs: cluster_spectrum(&eig.values, cluster_tol),
    })
}

/// The finite superset of the labelled spectrum built by the envelope
/// recursion from Cayley-adjacency spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSet {
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    /// Sorted distinct admissible eigenvalues.
    pub values: Vec<f64>,
}

impl EnvelopeSet {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.values.iter().any(|&v| (v - value).abs() <= tol)
    }
}

fn sort_dedup(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup_by(|a, b| (*a - *b).abs() <= tol);
    values
}

/// Envelope E^n_l: start from {0}, add alpha n at level 1, then at each
/// level k+1 union in alpha (n(k+1) - C(k+1,2) - spec(A_{k+1})), with the
/// top level inheriting level n-1. The Cayley spectra come from the oracle.
pub fn envelope(n: usize, ell: usize, alpha: f64) -> Result<EnvelopeSet> {
    if ell > n {
        return Err(Error::InvalidParameter(format!(
            "ell={ell} exceeds n={n}"
        )));
    }
    let tol = default_cluster_tol(alpha, n).max(1e-12);
    let mut values = alloc::vec![0.0f64];
    if ell >= 1 {
        values.push(alpha * n as f64);
    }
    let top = ell.min(n.saturating_sub(1));
    for level in 2..=top {
        let a = build_cayley_adjacency(level)?;
        let spec = cayley_spectrum(&a, tol)?;
        let map = relate_cayley_to_lep(level, alpha);
        for p in &spec.pairs {
            values.push(alpha * ((n * level) as f64 - map.center - p.value));
        }
    }
    Ok(EnvelopeSet {
        n,
        ell,
        alpha,
        values: sort_dedup(values, tol),
    })
}

/// Largest subset of an envelope symmetric around `center`.
pub fn symmetric_core(e: &EnvelopeSet, center: f64) -> EnvelopeSet {
    let tol = default_cluster_tol(e.alpha, e.n).max(1e-12);
    let values: Vec<f64> = e
        .values
        .iter()
        .cloned()
        .filter(|&v| e.contains(2.0 * center - v, tol))
        .collect();
    EnvelopeSet {
        n: e.n,
        ell: e.ell,
        alpha: e.alpha,
        values,
    }
}

/// Lift of a function on l-subsets to (l+1)-subsets: the lifted value at a
/// set is the sum of f over its l-element subsets.
pub fn lift_uep(f: &[f64], n: usize, ell: usize) -> Result<Vec<f64>> {
    let dim_lo = binomial(n as u64, ell as u64)? as usize;
    if f.len() != dim_lo {
        return Err(Error::Dimension {
            expected: dim_lo,
            got: f.len(),
        });
    }
    if ell + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "cannot lift past the full set: ell+1={} > n={n}",
            ell + 1
        )));
    }
    let dim_hi = binomial(n as u64, ell as u64 + 1)? as usize;
    let mut out = alloc::vec![0.0; dim_hi];
    for (r, slot) in out.iter_mut().enumerate() {
        let s = unrank_subset(r as u64, n, ell + 1)?;
        let mut acc = 0.0;
        for drop in 0..s.len() {
            let mut members: Vec<usize> = s.members().to_vec();
            members.remove(drop);
            let sub = crate::state::SubsetState::new(members, n)?;
            acc += f[rank_subset(&sub, n)? as usize];
        }
        *slot = acc;
    }
    Ok(out)
}

/// Lift of a function on l-tuples to (l+1)-tuples by ignoring the position
/// of ball `i` (1-based).
pub fn lift_lep(f: &[f64], i: usize, n: usize, ell: usize) -> Result<Vec<f64>> {
    let dim_lo = falling_factorial(n as u64, ell as u64)? as usize;
    if f.len() != dim_lo {
        return Err(Error::Dimension {
            expected: dim_lo,
            got: f.len(),
        });
    }
    if i < 1 || i > ell + 1 {
        return Err(Error::InvalidParameter(format!(
            "ball index {i} out of range 1..={}",
            ell + 1
        )));
    }
    if ell + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "cannot lift past full occupancy: ell+1={} > n={n}",
            ell + 1
        )));
    }
    let dim_hi = falling_factorial(n as u64, ell as u64 + 1)? as usize;
    let mut out = alloc::vec![0.0; dim_hi];
    for (r, slot) in out.iter_mut().enumerate() {
        let x = unrank_tuple(r as u64, n, ell + 1)?;
        let mut positions = x.positions().to_vec();
        positions.remove(i - 1);
        let sub = TupleState::new(positions, n)?;
        *slot = f[rank_tuple(&sub, n)? as usize];
    }
    Ok(out)
}

/// Orthonormal eigenbasis of -Q for one generator.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub params: ProcessParams,
    pub eig: EigenDecomposition,
}

/// Full dense eigendecomposition of -Q, eigenvalues ascending.
pub fn eigen_basis(g: &Generator) -> Result<EigenBasis> {
    Ok(EigenBasis {
        params: g.params,
        eig: sym_eigen(&g.neg_dense()?)?,
    })
}

/// Coefficients of the point mass at state `x` in the eigenbasis: entry `i`
/// is component `x` of eigenvector `i`.
pub fn project_indicator(b: &EigenBasis, x: usize) -> Result<Vec<f64>> {
    if x >= b.eig.dim {
        return Err(Error::InvalidParameter(format!(
            "state rank {x} out of range for dimension {}",
            b.eig.dim
        )));
    }
    Ok((0..b.eig.dim).map(|i| b.eig.vector(i)[x]).collect())
}

/// Report from [`verify_lift_lemmas`].
#[derive(Debug, Clone)]
pub struct LiftLemmaReport {
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub tol: f64,
    /// Lifted unlabelled eigenvectors whose eigenvalue qualifies for the
    /// nonvanishing guarantee.
    pub uep_qualifying: usize,
    pub uep_nonvanishing_ok: bool,
    pub uep_max_eigen_residual: f64,
    /// Largest normalized inner product between distinct lifted vectors.
    pub uep_max_cross_dot: f64,
    /// Labelled eigenvectors at level l+1 with mass outside the span of all
    /// lifts from level l.
    pub lep_fresh_count: usize,
    /// Largest distance from a fresh eigenvalue to the admissible band.
    pub lep_max_membership_dev: f64,
    pub passed: bool,
}

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks the lift machinery at one (n, l) instance:
///
/// (a) every unlabelled lift of an eigenvector whose eigenvalue sits below
///     both alpha l(n-l+1) and the complement eigenvalue alpha (l+1)(n-l)
///     is nonzero and solves the level-(l+1) eigen-equation;
/// (b) lifted pairs stay orthogonal;
/// (c) labelled eigenvalues at level l+1 carried by the orthogonal
///     complement of all lifts lie in
///     alpha (n(l+1) - C(l+1,2) - spec(A_{l+1})).
pub fn verify_lift_lemmas(n: usize, ell: usize, alpha: f64, tol: f64) -> Result<LiftLemmaReport> {
    if ell + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "lift target level {}+1 exceeds n={n}",
            ell
        )));
    }
    let scale = (alpha * (n * n) as f64).max(1.0);
    let mut report = LiftLemmaReport {
        n,
        ell,
        alpha,
        tol,
        uep_qualifying: 0,
        uep_nonvanishing_ok: true,
        uep_max_eigen_residual: 0.0,
        uep_max_cross_dot: 0.0,
        lep_fresh_count: 0,
        lep_max_membership_dev: 0.0,
        passed: true,
    };

    // --- unlabelled lifts ---
    {
        let g_lo = build_uep_generator(ProcessParams::new(n, ell, alpha, ProcessKind::Uep)?)?;
        let g_hi = build_uep_generator(ProcessParams::new(n, ell + 1, alpha, ProcessKind::Uep)?)?;
        let basis = eigen_basis(&g_lo)?;
        let qualify_cap = alpha * (ell * (n - ell + 1)) as f64;
        let complement_value = alpha * ((ell + 1) * (n - ell)) as f64;
        let mut lifted: Vec<(f64, Vec<f64>)> = Vec::with_capacity(basis.eig.dim);
        for i in 0..basis.eig.dim {
            let lambda = basis.eig.values[i];
            let hat = lift_uep(basis.eig.vector(i), n, ell)?;
            let hat_norm = norm2(&hat);
            // eigen-equation residual (vacuous for a vanishing lift)
            let applied = g_hi.neg_apply(&hat)?;
            let mut res = 0.0f64;
            for (a, h) in applied.iter().zip(&hat) {
                res += (a - lambda * h) * (a - lambda * h);
            }
            let res = libm::sqrt(res) / hat_norm.max(1.0);
            report.uep_max_eigen_residual = report.uep_max_eigen_residual.max(res);
            let qualifies = lambda <= qualify_cap + tol * scale
                && lambda < complement_value - tol * scale;
            if qualifies {
                report.uep_qualifying += 1;
                if hat_norm < 1e-9 {
                    report.uep_nonvanishing_ok = false;
                }
            }
            lifted.push((hat_norm, hat));
        }
        for a in 0..lifted.len() {
            for b in a + 1..lifted.len() {
                let (na, va) = &lifted[a];
                let (nb, vb) = &lifted[b];
                if *na > 1e-9 && *nb > 1e-9 {
                    let d = dot(va, vb).abs() / (na * nb);
                    report.uep_max_cross_dot = report.uep_max_cross_dot.max(d);
                }
            }
        }
    }

    // --- labelled complement ---
    {
        let g_lo = build_lep_generator(ProcessParams::new(n, ell, alpha, ProcessKind::Lep)?)?;
        let g_hi = build_lep_generator(ProcessParams::new(n, ell + 1, alpha, ProcessKind::Lep)?)?;
        let basis_lo = eigen_basis(&g_lo)?;
        let basis_hi = eigen_basis(&g_hi)?;

        // orthonormal basis of the span of all lifts, by modified
        // Gram-Schmidt with one reorthogonalization pass
        let mut span: Vec<Vec<f64>> = Vec::new();
        for i in 1..=ell + 1 {
            for j in 0..basis_lo.eig.dim {
                let mut v = lift_lep(basis_lo.eig.vector(j), i, n, ell)?;
                let initial = norm2(&v);
                for _ in 0..2 {
                    for b in &span {
                        let c = dot(&v, b);
                        for (vi, bi) in v.iter_mut().zip(b) {
                            *vi -= c * bi;
                        }
                    }
                }
                let nrm = norm2(&v);
                if nrm > 1e-8 * initial.max(1.0) {
                    for vi in v.iter_mut() {
                        *vi /= nrm;
                    }
                    span.push(v);
                }
            }
        }

        let cay = build_cayley_adjacency(ell + 1)?;
        let cay_spec = cayley_spectrum(&cay, default_cluster_tol(1.0, ell + 1).max(1e-9))?;
        let map = relate_cayley_to_lep(ell + 1, alpha);
        let band: Vec<f64> = cay_spec
            .pairs
            .iter()
            .map(|p| alpha * ((n * (ell + 1)) as f64 - map.center - p.value))
            .collect();

        for k in 0..basis_hi.eig.dim {
            let mut w = basis_hi.eig.vector(k).to_vec();
            for b in &span {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
            if norm2(&w) > 1e-6 {
                report.lep_fresh_count += 1;
                let lambda = basis_hi.eig.values[k];
                let dev = band
                    .iter()
                    .map(|&f| (lambda - f).abs())
                    .fold(f64::INFINITY, f64::min);
                report.lep_max_membership_dev = report.lep_max_membership_dev.max(dev);
            }
        }
    }

    let tol_abs = tol * scale;
    report.passed = report.uep_nonvanishing_ok
        && report.uep_max_eigen_residual <= tol_abs
        && report.uep_max_cross_dot <= tol_abs
        && report.lep_max_membership_dev <= tol_abs;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct BandCheck {
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
    pub total_multiplicity: u64,
    pub bound: u64,
    pub ok: bool,
}

/// Report from [`multiplicity_checks`].
#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    pub gap_multiplicity: u64,
    pub gap_expected: u64,
    pub gap_ok: bool,
    pub bands: Vec<BandCheck>,
    pub passed: bool,
}

/// Multiplicity of the eigenvalue alpha n of the labelled process.
///
/// For l < n this is l(n-1). At l = n the ball-coordinate eigenfunctions
/// acquire one linear relation per base eigenvector (their sum over balls is
/// a function of the full occupied set, which is constant), so the count
/// drops to (n-1)^2.
pub fn lep_gap_multiplicity(n: usize, ell: usize) -> u64 {
    if ell == n {
        ((n - 1) * (n - 1)) as u64
    } else {
        (ell * (n - 1)) as u64
    }
}

/// Checks the multiplicity statements on a labelled spectrum summary: the
/// eigenvalue alpha n has the expected exact multiplicity, and each band
/// [alpha j(n-j+1), alpha (j+1)(n-j)) for 1 <= j <= min(l, n-l) carries
/// total multiplicity at most (n)_j C(l, j).
pub fn multiplicity_checks(s: &SpectrumSummary, tol: f64) -> Result<MultiplicityReport> {
    if s.kind != SummaryKind::Lep {
        return Err(Error::InvalidParameter(
            "multiplicity checks apply to labelled spectra".into(),
        ));
    }
    let (n, ell, alpha) = (s.n, s.ell, s.alpha);
    let scale = (alpha * (n * n) as f64).max(1.0);
    let tol_abs = tol * scale;

    let gap_expected = if ell == 0 { 0 } else { lep_gap_multiplicity(n, ell) };
    let gap_multiplicity = s.multiplicity_at(alpha * n as f64, tol_abs).unwrap_or(0);
    let gap_ok = gap_multiplicity == gap_expected;

    let mut bands = Vec::new();
    let jmax = ell.min(n - ell);
    for j in 1..=jmax {
        let lo = alpha * (j * (n - j + 1)) as f64;
        let hi = alpha * ((j + 1) * (n - j)) as f64;
        let total: u64 = s
            .pairs
            .iter()
            .filter(|p| p.value >= lo - tol_abs && p.value < hi - tol_abs)
            .map(|p| p.multiplicity)
            .sum();
        let bound = falling_factorial(n as u64, j as u64)? * binomial(ell as u64, j as u64)?;
        bands.push(BandCheck {
            j,
            lo,
            hi,
            total_multiplicity: total,
            bound,
            ok: total <= bound,
        });
    }
    let passed = gap_ok && bands.iter().all(|b| b.ok);
    Ok(MultiplicityReport {
        gap_multiplicity,
        gap_expected,
        gap_ok,
        bands,
        passed,
    })
}

/// True when every eigenvalue of `lo` also occurs in `hi` (as sets).
pub fn spectrum_set_contained(lo: &SpectrumSummary, hi: &SpectrumSummary, tol: f64) -> bool {
    lo.pairs
        .iter()
        .all(|p| hi.pairs.iter().any(|q| (p.value - q.value).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_of(s: &SpectrumSummary) -> Vec<(i64, u64)> {
        s.pairs
            .iter()
            .map(|p| (libm::round(p.value) as i64, p.multiplicity))
            .collect()
    }

    #[test]
    fn closed_form_examples() {
        let s = uep_spectrum_closed_form(
            ProcessParams::new(4, 2, 1.0, ProcessKind::Uep).unwrap(),
        )
        .unwrap();
        assert_eq!(pairs_of(&s), vec![(0, 1), (4, 3), (6, 2)]);

        let s = uep_spectrum_closed_form(
            ProcessParams::new(3, 1, 1.0, ProcessKind::Uep).unwrap(),
        )
        .unwrap();
        assert_eq!(pairs_of(&s), vec![(0, 1), (3, 2)]);

        let s = uep_spectrum_closed_form(
            ProcessParams::new(6, 3, 1.0, ProcessKind::Uep).unwrap(),
        )
        .unwrap();
        assert_eq!(pairs_of(&s), vec![(0, 1), (6, 5), (10, 9), (12, 5)]);
        assert_eq!(s.total(), 20);
    }

    #[test]
    fn closed_form_rejects_large_ell() {
        assert!(uep_spectrum_closed_form(
            ProcessParams::new(4, 3, 1.0, ProcessKind::Uep).unwrap()
        )
        .is_err());
    }

    #[test]
    fn oracle_matches_closed_form_4_2() {
        let p = ProcessParams::new(4, 2, 1.0, ProcessKind::Uep).unwrap();
        let g = build_uep_generator(p).unwrap();
        let s = brute_force_spectrum(&g, default_cluster_tol(1.0, 4)).unwrap();
        assert_eq!(pairs_of(&s), vec![(0, 1), (4, 3), (6, 2)]);
    }

    #[test]
    fn cayley_oracle_spectra() {
        let a3 = build_cayley_adjacency(3).unwrap();
        let s = cayley_spectrum(&a3, 1e-6).unwrap();
        assert_eq!(pairs_of(&s), vec![(-3, 1), (0, 4), (3, 1)]);

        let a4 = build_cayley_adjacency(4).unwrap();
        let s = cayley_spectrum(&a4, 1e-6).unwrap();
        assert_eq!(pairs_of(&s), vec![(-6, 1), (-2, 9), (0, 4), (2, 9), (6, 1)]);
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(4, 1, 1.0).unwrap();
        assert_eq!(e.values, vec![0.0, 4.0]);

        let e = envelope(4, 2, 1.0).unwrap();
        assert_eq!(e.values, vec![0.0, 4.0, 6.0, 8.0]);

        let e4 = envelope(4, 4, 1.0).unwrap();
        assert_eq!(e4.values, vec![0.0, 4.0, 6.0, 8.0, 9.0, 12.0]);
        // top level inherits level n-1
        let e3 = envelope(4, 3, 1.0).unwrap();
        assert_eq!(e3.values, e4.values);
    }

    #[test]
    fn envelope_monotone_in_ell() {
        for n in 2..=5usize {
            for ell in 0..n {
                let lo = envelope(n, ell, 1.0).unwrap();
                let hi = envelope(n, ell + 1, 1.0).unwrap();
                for &v in &lo.values {
                    assert!(hi.contains(v, 1e-9));
                }
            }
        }
    }

    #[test]
    fn symmetric_core_examples() {
        let e = envelope(4, 4, 1.0).unwrap();
        let core = symmetric_core(&e, 6.0);
        assert_eq!(core.values, vec![0.0, 4.0, 6.0, 8.0, 12.0]);

        let toy = EnvelopeSet {
            n: 2,
            ell: 1,
            alpha: 1.0,
            values: alloc::vec![0.0, 2.0],
        };
        assert_eq!(symmetric_core(&toy, 1.0).values, vec![0.0, 2.0]);

        let lone = EnvelopeSet {
            n: 2,
            ell: 1,
            alpha: 1.0,
            values: alloc::vec![5.0],
        };
        assert!(symmetric_core(&lone, 0.0).values.is_empty());
    }

    #[test]
    fn lift_uep_examples() {
        // constants lift to (l+1) copies
        let f = alloc::vec![1.0; 3];
        let hat = lift_uep(&f, 3, 1).unwrap();
        assert!(hat.iter().all(|&v| (v - 2.0).abs() < 1e-15));

        // indicator of {0} at level 1, n=3
        let f = alloc::vec![1.0, 0.0, 0.0];
        let hat = lift_uep(&f, 3, 1).unwrap();
        // colex 2-subsets of 3: {0,1}, {0,2}, {1,2}
        assert_eq!(hat, alloc::vec![1.0, 1.0, 0.0]);

        // eigenvector for eigenvalue 4 of the (4,1) chain lifts to an
        // eigenvector of the (4,2) chain
        let f = alloc::vec![1.0, -1.0, 0.0, 0.0];
        let hat = lift_uep(&f, 4, 1).unwrap();
        assert!(norm2(&hat) > 1e-9);
        let g = build_uep_generator(ProcessParams::new(4, 2, 1.0, ProcessKind::Uep).unwrap())
            .unwrap();
        let applied = g.neg_apply(&hat).unwrap();
        for (a, h) in applied.iter().zip(&hat) {
            assert!((a - 4.0 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_lep_examples() {
        let dim1 = 3usize;
        let f = alloc::vec![1.0; dim1];
        for i in 1..=2 {
            let hat = lift_lep(&f, i, 3, 1).unwrap();
            assert!(hat.iter().all(|&v| v == 1.0));
        }

        // indicator of position 0 at level 1, ignored ball i=2
        let f = alloc::vec![1.0, 0.0, 0.0];
        let hat = lift_lep(&f, 2, 3, 1).unwrap();
        for (r, &v) in hat.iter().enumerate() {
            let x = unrank_tuple(r as u64, 3, 2).unwrap();
            let expect = if x.positions()[0] == 0 { 1.0 } else { 0.0 };
            assert_eq!(v, expect);
        }

        // eigenvector of the level-1 chain lifts to the labelled level 2
        let f = alloc::vec![1.0, -1.0, 0.0];
        let hat = lift_lep(&f, 1, 3, 1).unwrap();
        let g = build_lep_generator(ProcessParams::new(3, 2, 1.0, ProcessKind::Lep).unwrap())
            .unwrap();
        let applied = g.neg_apply(&hat).unwrap();
        for (a, h) in applied.iter().zip(&hat) {
            assert!((a - 3.0 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_dimension_errors() {
        assert!(lift_uep(&[1.0, 2.0], 3, 1).is_err());
        assert!(lift_lep(&[1.0; 3], 0, 3, 1).is_err());
        assert!(lift_lep(&[1.0; 3], 3, 3, 1).is_err());
    }

    #[test]
    fn lift_lemmas_4_1() {
        let r = verify_lift_lemmas(4, 1, 1.0, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn lift_lemmas_5_2_degenerate_complement() {
        // C(5,3) = C(5,2): the unlabelled complement at level 3 is empty
        let r = verify_lift_lemmas(5, 2, 1.0, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn lep_complement_band_4_2() {
        let r = verify_lift_lemmas(4, 2, 1.0, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        // fresh eigenvalues at level 3 must sit in {12-3-spec(A_3)} = {6,9,12}
        assert!(r.lep_fresh_count > 0);
        assert!(r.lep_max_membership_dev < 1e-9 * 16.0);
    }

    #[test]
    fn multiplicity_checks_examples() {
        let tol = 1e-9;
        // n=4, l=2: eigenvalue 4 has multiplicity 6 = 2 * 3
        let g = build_lep_generator(ProcessParams::new(4, 2, 1.0, ProcessKind::Lep).unwrap())
            .unwrap();
        let s = brute_force_spectrum(&g, default_cluster_tol(1.0, 4)).unwrap();
        let r = multiplicity_checks(&s, tol).unwrap();
        assert_eq!(r.gap_multiplicity, 6);
        assert!(r.passed, "{r:?}");

        // n=5, l=2: band j=1 holds at most 5 * 2 = 10
        let g = build_lep_generator(ProcessParams::new(5, 2, 1.0, ProcessKind::Lep).unwrap())
            .unwrap();
        let s = brute_force_spectrum(&g, default_cluster_tol(1.0, 5)).unwrap();
        let r = multiplicity_checks(&s, tol).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.bands[0].bound, 10);

        // l=n: no band check applies and the gap multiplicity collapses
        let g = build_lep_generator(ProcessParams::new(4, 4, 1.0, ProcessKind::Lep).unwrap())
            .unwrap();
        let s = brute_force_spectrum(&g, default_cluster_tol(1.0, 4)).unwrap();
        let r = multiplicity_checks(&s, tol).unwrap();
        assert!(r.bands.is_empty());
        assert_eq!(r.gap_multiplicity, 9);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn interchange_matches_level_below() {
        // spec(-Q at l=n) equals spec(-Q at l=n-1) as multisets
        for n in 2..=5usize {
            let tol = default_cluster_tol(1.0, n);
            let top = build_lep_generator(
                ProcessParams::new(n, n, 1.0, ProcessKind::Lep).unwrap(),
            )
            .unwrap();
            let below = build_lep_generator(
                ProcessParams::new(n, n - 1, 1.0, ProcessKind::Lep).unwrap(),
            )
            .unwrap();
            let st = brute_force_spectrum(&top, tol).unwrap();
            let sb = brute_force_spectrum(&below, tol).unwrap();
            assert_eq!(st.pairs.len(), sb.pairs.len());
            for (a, b) in st.pairs.iter().zip(&sb.pairs) {
                assert!((a.value - b.value).abs() < 1e-8);
                assert_eq!(a.multiplicity, b.multiplicity);
            }
        }
    }

    #[test]
    fn project_indicator_is_unit() {
        let g = build_uep_generator(ProcessParams::new(4, 2, 1.0, ProcessKind::Uep).unwrap())
            .unwrap();
        let b = eigen_basis(&g).unwrap();
        for x in 0..g.dim {
            let c = project_indicator(&b, x).unwrap();
            let sum: f64 = c.iter().map(|v| v * v).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        // eigenvalue-0 coefficient is +-1/sqrt(N)
        let c0 = project_indicator(&b, 0).unwrap()[0];
        assert!((c0.abs() - 1.0 / (6.0f64).sqrt()).abs() < 1e-12);
        assert!(project_indicator(&b, 6).is_err());
    }

    #[test]
    fn ell_zero_is_the_one_state_chain() {
        let g = build_uep_generator(ProcessParams::new(3, 0, 1.0, ProcessKind::Uep).unwrap())
            .unwrap();
        let s = brute_force_spectrum(&g, 1e-6).unwrap();
        assert_eq!(pairs_of(&s), vec![(0, 1)]);
        let e = envelope(3, 0, 1.0).unwrap();
        assert_eq!(e.values, vec![0.0]);
    }
}
