//! Exact L2 distance from stationarity, mixing-time location, sandwich
//! bounds around t = (1/4) n log(scale) + c n, and the large-n asymptotic
//! profiles. All closed-form evaluations use alpha = 2/n^2, the one-move-per
//! -unit-time normalization; spectrum-based evaluations take whatever alpha
//! the summary carries.

use crate::combin::{ln_binomial_diff, log_sum_exp};
use crate::generator::Generator;
use crate::spectral::{eigen_basis, project_indicator, SpectrumSummary, SummaryKind};
use crate::state::ProcessKind;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Alpha value that makes one state change per unit time.
pub fn standard_alpha(n: usize) -> f64 {
    2.0 / (n as f64 * n as f64)
}

/// ln of the exact unlabelled L2 distance from stationarity at time `t`,
/// with alpha = 2/n^2:
///
/// ln sqrt( sum_{i=1..l} (C(n,i) - C(n,i-1)) exp(-4 i (n-i+1) t / n^2) ).
///
/// Log-domain throughout, so it stays finite for n up to 10^6 even at t = 0
/// where the distance is sqrt(C(n,l) - 1).
pub fn uep_l2_log(n: usize, ell: usize, t: f64) -> Result<f64> {
    if ell < 1 || 2 * ell > n {
        return Err(Error::InvalidParameter(format!(
            "exact formula requires 1 <= ell <= n/2, got ell={ell}, n={n}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let n_f = n as f64;
    let mut terms = Vec::with_capacity(ell);
    let mut max_seen = f64::NEG_INFINITY;
    for i in 1..=ell as u64 {
        let rate = 4.0 * i as f64 * (n as u64 - i + 1) as f64 / (n_f * n_f);
        let term = ln_binomial_diff(n as u64, i) - rate * t;
        max_seen = max_seen.max(term);
        // the sum is dominated by small i; skip negligible tail terms
        if term < max_seen - 745.0 {
            break;
        }
        terms.push(term);
    }
    Ok(0.5 * log_sum_exp(&terms))
}

/// Exact unlabelled L2 distance (may overflow to infinity near t = 0 for
/// large n; use [`uep_l2_log`] when that matters).
pub fn uep_l2_exact(n: usize, ell: usize, t: f64) -> Result<f64> {
    Ok(libm::exp(uep_l2_log(n, ell, t)?))
}

/// L2 distance from a -Q spectrum summary of a start-state-symmetric chain:
/// sqrt( sum over nonzero eigenvalues of m_j exp(-2 lambda_j t) ).
pub fn l2_from_spectrum(s: &SpectrumSummary, t: f64) -> f64 {
    libm::exp(l2_log_from_spectrum(s, t))
}

/// ln of [`l2_from_spectrum`].
pub fn l2_log_from_spectrum(s: &SpectrumSummary, t: f64) -> f64 {
    let zero_tol = 1e-12 * (s.alpha * (s.n * s.n) as f64).max(1.0);
    let terms: Vec<f64> = s
        .pairs
        .iter()
        .filter(|p| p.value > zero_tol)
        .map(|p| libm::log(p.multiplicity as f64) - 2.0 * p.value * t)
        .collect();
    0.5 * log_sum_exp(&terms)
}

/// First-band lower bound on the labelled L2 distance: the eigenvalue 2/n
/// carries multiplicity l(n-1), so the distance is at least
/// sqrt(l(n-1) exp(-4t/n)). Exact at leading order; the remaining spectrum
/// only adds mass.
pub fn lep_l2_first_term(n: usize, ell: usize, t: f64) -> f64 {
    libm::sqrt((ell * (n - 1)) as f64 * libm::exp(-4.0 * t / n as f64))
}

/// Time scale used by the offset coordinate c: t = (1/4) n ln(scale) + c n
/// with scale = n-1 for the unlabelled process and l(n-1) for the labelled.
pub fn mixing_scale(n: usize, ell: usize, kind: ProcessKind) -> f64 {
    match kind {
        ProcessKind::Uep => (n - 1) as f64,
        ProcessKind::Lep => (ell * (n - 1)) as f64,
    }
}

pub fn time_from_offset(n: usize, ell: usize, kind: ProcessKind, c: f64) -> f64 {
    0.25 * n as f64 * libm::log(mixing_scale(n, ell, kind)) + c * n as f64
}

pub fn offset_from_time(n: usize, ell: usize, kind: ProcessKind, t: f64) -> f64 {
    (t - 0.25 * n as f64 * libm::log(mixing_scale(n, ell, kind))) / n as f64
}

/// One evaluated point of a distance curve.
#[derive(Debug, Clone, Copy)]
pub struct L2Sample {
    pub t: f64,
    pub c: f64,
    pub l2: f64,
    /// e^(-2c)
    pub lower: f64,
    /// 2 e^(-2c)
    pub upper: f64,
}

/// Distance-from-stationarity curve over a time grid.
#[derive(Debug, Clone)]
pub struct L2Curve {
    pub n: usize,
    pub ell: usize,
    pub kind: ProcessKind,
    /// True when the l2 column is the first-band lower bound rather than the
    /// full spectrum sum.
    pub approximate: bool,
    pub samples: Vec<L2Sample>,
}

/// Unlabelled curve from the exact formula, sampled at offsets `c_grid`.
pub fn uep_l2_curve(n: usize, ell: usize, c_grid: &[f64]) -> Result<L2Curve> {
    let mut samples = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        let t = time_from_offset(n, ell, ProcessKind::Uep, c);
        samples.push(L2Sample {
            t,
            c,
            l2: uep_l2_exact(n, ell, t.max(0.0))?,
            lower: libm::exp(-2.0 * c),
            upper: 2.0 * libm::exp(-2.0 * c),
        });
    }
    Ok(L2Curve {
        n,
        ell,
        kind: ProcessKind::Uep,
        approximate: false,
        samples,
    })
}

/// Curve from a spectrum summary (exact whenever the summary is).
pub fn spectrum_l2_curve(s: &SpectrumSummary, c_grid: &[f64]) -> Result<L2Curve> {
    let kind = match s.kind {
        SummaryKind::Uep => ProcessKind::Uep,
        SummaryKind::Lep => ProcessKind::Lep,
        SummaryKind::Cayley => {
            return Err(Error::InvalidParameter(
                "curves are defined for process spectra, not Cayley adjacencies".into(),
            ))
        }
    };
    let mut samples = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        let t = time_from_offset(s.n, s.ell, kind, c).max(0.0);
        samples.push(L2Sample {
            t,
            c,
            l2: l2_from_spectrum(s, t),
            lower: libm::exp(-2.0 * c),
            upper: 2.0 * libm::exp(-2.0 * c),
        });
    }
    Ok(L2Curve {
        n: s.n,
        ell: s.ell,
        kind,
        approximate: false,
        samples,
    })
}

/// Labelled curve from the first-band bound only; labeled approximate.
pub fn lep_l2_curve_approx(n: usize, ell: usize, c_grid: &[f64]) -> L2Curve {
    let samples = c_grid
        .iter()
        .map(|&c| {
            let t = time_from_offset(n, ell, ProcessKind::Lep, c).max(0.0);
            L2Sample {
                t,
                c,
                l2: lep_l2_first_term(n, ell, t),
                lower: libm::exp(-2.0 * c),
                upper: 2.0 * libm::exp(-2.0 * c),
            }
        })
        .collect();
    L2Curve {
        n,
        ell,
        kind: ProcessKind::Lep,
        approximate: true,
        samples,
    }
}

/// Result of locating the L2 mixing time.
#[derive(Debug, Clone)]
pub struct MixingReport {
    pub n: usize,
    pub ell: usize,
    pub kind: ProcessKind,
    pub epsilon: f64,
    /// First time at which the worst-start L2 distance drops to 2 epsilon.
    pub tau2: f64,
    pub bracket: (f64, f64),
    pub solver_tol: f64,
}

/// Locates tau_2(epsilon) by bisection on the strictly decreasing log
/// distance. The unlabelled route uses the closed form; the labelled route
/// needs an oracle-capable spectrum, supplied by the caller.
pub fn tau2(
    n: usize,
    ell: usize,
    kind: ProcessKind,
    epsilon: f64,
    lep_spectrum: Option<&SpectrumSummary>,
) -> Result<MixingReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let log_target = libm::log(2.0 * epsilon);
    let log_l2 = |t: f64| -> Result<f64> {
        match kind {
            ProcessKind::Uep => uep_l2_log(n, ell, t),
            ProcessKind::Lep => {
                let s = lep_spectrum.ok_or_else(|| {
                    Error::InvalidParameter(
                        "labelled tau2 needs an explicit spectrum summary".into(),
                    )
                })?;
                Ok(l2_log_from_spectrum(s, t))
            }
        }
    };

    let solver_tol = 1e-9 * n as f64 * libm::log((n.max(2)) as f64);
    if log_l2(0.0)? <= log_target {
        return Ok(MixingReport {
            n,
            ell,
            kind,
            epsilon,
            tau2: 0.0,
            bracket: (0.0, 0.0),
            solver_tol,
        });
    }
    let mut hi = n as f64;
    while log_l2(hi)? > log_target {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::InvalidParameter(
                "failed to bracket the mixing time".into(),
            ));
        }
    }
    let bracket = (0.0, hi);
    let mut lo = 0.0;
    let mut hi_b = hi;
    while hi_b - lo > solver_tol {
        let mid = 0.5 * (lo + hi_b);
        if log_l2(mid)? > log_target {
            lo = mid;
        } else {
            hi_b = mid;
        }
    }
    Ok(MixingReport {
        n,
        ell,
        kind,
        epsilon,
        tau2: 0.5 * (lo + hi_b),
        bracket,
        solver_tol,
    })
}

/// One row of a sandwich check.
#[derive(Debug, Clone, Copy)]
pub struct SandwichRow {
    pub c: f64,
    pub t: f64,
    pub l2: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_ok: bool,
    /// None when the upper bound is not asserted (c < 0, n below the floor,
    /// or labelled first-band evaluation).
    pub upper_ok: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub n: usize,
    pub ell: usize,
    pub kind: ProcessKind,
    /// Smallest n at which the factor-2 upper bound is asserted.
    pub upper_floor: usize,
    pub rows: Vec<SandwichRow>,
    pub passed: bool,
}

/// Default n floor above which the factor-2 upper bound is asserted; the
/// constant 2 only holds for large n.
pub const DEFAULT_UPPER_FLOOR: usize = 1000;

/// Slack factor applied to the factor-2 upper bound.
pub const UPPER_SLACK: f64 = 1.05;

/// Evaluates the exact (unlabelled) or first-band (labelled) distance at
/// t = (1/4) n log(scale) + c n and checks e^(-2c) <= l2, and for the
/// unlabelled process with c >= 0 and n >= upper_floor also
/// l2 <= 2 e^(-2c) * slack.
pub fn sandwich_check(
    n: usize,
    ell: usize,
    kind: ProcessKind,
    c_grid: &[f64],
    upper_floor: usize,
) -> Result<SandwichReport> {
    let mut rows = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        let t = time_from_offset(n, ell, kind, c);
        let l2 = match kind {
            ProcessKind::Uep => uep_l2_exact(n, ell, t)?,
            ProcessKind::Lep => lep_l2_first_term(n, ell, t),
        };
        let lower = libm::exp(-2.0 * c);
        let upper = 2.0 * libm::exp(-2.0 * c);
        let lower_ok = l2 >= lower * (1.0 - 1e-12);
        let upper_ok = if kind == ProcessKind::Uep && c >= 0.0 && n >= upper_floor {
            Some(l2 <= upper * UPPER_SLACK)
        } else {
            None
        };
        rows.push(SandwichRow {
            c,
            t,
            l2,
            lower,
            upper,
            lower_ok,
            upper_ok,
        });
    }
    let passed = rows
        .iter()
        .all(|r| r.lower_ok && r.upper_ok.unwrap_or(true));
    Ok(SandwichReport {
        n,
        ell,
        kind,
        upper_floor,
        rows,
        passed,
    })
}

/// Large-n, large-l limit of the squared unlabelled distance at offset c:
/// e^(e^(-4c)) - 1.
pub fn asymptotic_profile(c: f64) -> f64 {
    libm::expm1(libm::exp(-4.0 * c))
}

/// Large-n limit at constant l: sum_{i=1..l} e^(-4ci) / i!.
pub fn asymptotic_profile_fixed_ell(c: f64, ell: usize) -> f64 {
    let mut acc = 0.0;
    let mut fact = 1.0;
    for i in 1..=ell {
        fact *= i as f64;
        acc += libm::exp(-4.0 * c * i as f64) / fact;
    }
    acc
}

/// Per-eigenvalue deviation of the grouped squared coefficients C_j(x)^2
/// from m_j / N.
#[derive(Debug, Clone)]
pub struct CoefficientRow {
    pub eigenvalue: f64,
    pub multiplicity: u64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct CoefficientReport {
    pub dim: usize,
    pub rows: Vec<CoefficientRow>,
    pub max_deviation: f64,
}

/// For a start-state-symmetric chain the squared projection of any point
/// mass onto each eigenspace equals multiplicity / dimension. This builds
/// the eigenbasis, evaluates every start state, and reports the worst
/// deviation per distinct eigenvalue.
pub fn verify_coefficient_lemma(g: &Generator, tol: f64) -> Result<CoefficientReport> {
    let basis = eigen_basis(g)?;
    let dim = basis.eig.dim;
    let cluster_tol = tol.max(1e-10) * (g.params.alpha * (g.params.n * g.params.n) as f64).max(1.0);

    // group eigenvalue indices into clusters
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in basis.eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some((rep, idx)) if (v - *rep).abs() <= cluster_tol => idx.push(i),
            _ => groups.push((v, alloc::vec![i])),
        }
    }

    let mut rows: Vec<CoefficientRow> = groups
        .iter()
        .map(|(v, idx)| CoefficientRow {
            eigenvalue: *v,
            multiplicity: idx.len() as u64,
            max_deviation: 0.0,
        })
        .collect();
    for x in 0..dim {
        let coeff = project_indicator(&basis, x)?;
        for (row, (_, idx)) in rows.iter_mut().zip(&groups) {
            let c2: f64 = idx.iter().map(|&i| coeff[i] * coeff[i]).sum();
            let dev = (c2 - row.multiplicity as f64 / dim as f64).abs();
            row.max_deviation = row.max_deviation.max(dev);
        }
    }
    let max_deviation = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    Ok(CoefficientReport {
        dim,
        rows,
        max_deviation,
    })
}
