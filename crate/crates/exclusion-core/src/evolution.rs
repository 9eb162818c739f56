//! Exact heat-kernel evolution and continuous-time Monte Carlo simulation.
//!
//! Two exact routes are provided: the spectral route through the eigenbasis
//! and uniformization (Poisson-randomized powers of the jump kernel). The
//! constant diagonal makes the jump chain well defined with no self-loops.
//! Simulation draws aggregate exponential holding times and a uniform move;
//! this has the same law as per-edge clocks with far fewer draws.

use crate::generator::Generator;
use crate::spectral::EigenBasis;
use crate::state::{
    rank_subset, rank_tuple, unrank_subset, unrank_tuple, ProcessKind, ProcessParams,
};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Histogram capacity for simulation endpoints.
pub const MAX_HISTOGRAM_DIM: u64 = 1_000_000;

/// A probability vector over ranked states. Entries are clamped at zero on
/// construction; the sum must be 1 within 1e-10.
#[derive(Debug, Clone)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for p in probs.iter_mut() {
            if *p < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "negative probability {p}"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Distribution { probs })
    }

    pub fn point_mass(dim: usize, x: usize) -> Result<Self> {
        if x >= dim {
            return Err(Error::InvalidParameter(format!(
                "state rank {x} out of range for dimension {dim}"
            )));
        }
        let mut probs = alloc::vec![0.0; dim];
        probs[x] = 1.0;
        Ok(Distribution { probs })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// L2 distance from the uniform stationary law:
/// sqrt( N sum_s (mu(s) - 1/N)^2 ).
pub fn l2_distance(d: &Distribution) -> f64 {
    let n = d.dim() as f64;
    let sum: f64 = d.probs.iter().map(|&p| (p - 1.0 / n) * (p - 1.0 / n)).sum();
    libm::sqrt(n * sum)
}

/// Total variation distance from uniform: (1/2) sum_s |mu(s) - 1/N|.
pub fn tv_distance(d: &Distribution) -> f64 {
    let n = d.dim() as f64;
    0.5 * d.probs.iter().map(|&p| (p - 1.0 / n).abs()).sum::<f64>()
}

/// Law of the process at time `t` started from `x0`, through the eigenbasis.
pub fn heat_kernel_row_spectral(basis: &EigenBasis, x0: usize, t: f64) -> Result<Distribution> {
    let dim = basis.eig.dim;
    if x0 >= dim {
        return Err(Error::InvalidParameter(format!(
            "start rank {x0} out of range for dimension {dim}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let mut probs = alloc::vec![0.0; dim];
    for i in 0..dim {
        let v = basis.eig.vector(i);
        let w = v[x0] * libm::exp(-basis.eig.values[i] * t);
        for (p, &vi) in probs.iter_mut().zip(v) {
            *p += w * vi;
        }
    }
    for p in probs.iter_mut() {
        if *p < 0.0 && *p > -1e-9 {
            *p = 0.0;
        }
    }
    Distribution::new(probs)
}

/// Law of the process at time `t` started from `x0`, by uniformization:
/// the Poisson mixture of powers of the jump kernel, truncated once the
/// accumulated Poisson mass exceeds 1 - 1e-13.
pub fn heat_kernel_row_uniformization(g: &Generator, x0: usize, t: f64) -> Result<Distribution> {
    let dim = g.dim;
    if x0 >= dim {
        return Err(Error::InvalidParameter(format!(
            "start rank {x0} out of range for dimension {dim}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let rate = g.exit_rate();
    let mean = rate * t;
    if mean == 0.0 {
        return Distribution::point_mass(dim, x0);
    }
    if mean > 700.0 {
        return Err(Error::Capacity(format!(
            "uniformization mean jump count {mean} too large for direct Poisson weights"
        )));
    }
    let degree = g.params.jump_degree() as f64;
    let step = 1.0 / degree; // uniform jump kernel: each neighbor with prob 1/degree

    let mut current = alloc::vec![0.0; dim];
    current[x0] = 1.0;
    let mut out = alloc::vec![0.0; dim];
    let mut weight = libm::exp(-mean);
    let mut cumulative = weight;
    for (o, c) in out.iter_mut().zip(&current) {
        *o += weight * c;
    }
    let mut k = 0u64;
    while cumulative < 1.0 - 1e-13 {
        k += 1;
        // one step of the jump chain
        let mut next = alloc::vec![0.0; dim];
        for &(i, j) in g.edges() {
            next[i] += step * current[j];
            next[j] += step * current[i];
        }
        current = next;
        weight *= mean / k as f64;
        cumulative += weight;
        for (o, c) in out.iter_mut().zip(&current) {
            *o += weight * c;
        }
        if k > 100_000 {
            return Err(Error::Capacity(
                "uniformization failed to converge".into(),
            ));
        }
    }
    // truncated tail mass is below 1e-13; fold it into the current vector
    let missing = 1.0 - out.iter().sum::<f64>();
    if missing.abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "uniformization lost probability mass {missing}"
        )));
    }
    for (o, c) in out.iter_mut().zip(&current) {
        *o += missing * c;
    }
    Distribution::new(out)
}

/// Configuration of one simulation run.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub params: ProcessParams,
    /// Time horizon.
    pub t: f64,
    pub replicas: u64,
    pub seed: u64,
    /// Rank of the common starting state.
    pub start: u64,
}

impl SimConfig {
    pub fn new(params: ProcessParams, t: f64, replicas: u64, seed: u64) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
        }
        if replicas < 1 {
            return Err(Error::InvalidParameter("replicas must be >= 1".into()));
        }
        Ok(SimConfig {
            params,
            t,
            replicas,
            seed,
            start: 0,
        })
    }

    pub fn with_start(mut self, start: u64) -> Self {
        self.start = start;
        self
    }
}

/// Simulates one replica to the horizon and returns the final state rank.
/// Deterministic given (seed, replica): replica r runs on stream r of a
/// counter-based generator seeded with `seed`.
pub fn simulate(cfg: &SimConfig, replica: u64) -> Result<u64> {
    let p = cfg.params;
    let total = p.state_count()?;
    if cfg.start >= total {
        return Err(Error::InvalidParameter(format!(
            "start rank {} out of range for {total} states",
            cfg.start
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(replica);

    let rate = p.exit_rate();
    let degree = p.jump_degree();
    if degree == 0 || cfg.t == 0.0 {
        return Ok(cfg.start);
    }

    let n = p.n;
    let ell = p.ell;
    let mut occupied = alloc::vec![false; n];
    // positions[j]: vertex of ball j (labelled) or of the j-th black ball
    // in no particular order (unlabelled)
    let mut positions: Vec<usize> = match p.kind {
        ProcessKind::Uep => {
            let s = unrank_subset(cfg.start, n, ell)?;
            s.members().to_vec()
        }
        ProcessKind::Lep => {
            let x = unrank_tuple(cfg.start, n, ell)?;
            x.positions().to_vec()
        }
    };
    for &v in &positions {
        occupied[v] = true;
    }
    let moves = ell as u64 * (n - ell) as u64;

    let mut clock = 0.0f64;
    loop {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        clock += -libm::log(u) / rate;
        if clock > cfg.t {
            break;
        }
        let pick = rng.gen_range(0..degree);
        if pick < moves {
            // move one ball to a free vertex
            let ball = (pick / (n - ell) as u64) as usize;
            let mut free_idx = (pick % (n - ell) as u64) as usize;
            let mut target = usize::MAX;
            for (v, occ) in occupied.iter().enumerate() {
                if !occ {
                    if free_idx == 0 {
                        target = v;
                        break;
                    }
                    free_idx -= 1;
                }
            }
            occupied[positions[ball]] = false;
            occupied[target] = true;
            positions[ball] = target;
        } else {
            // transposition of two labelled balls (labelled process only)
            let mut r = pick - moves;
            let mut a = 0usize;
            // decode the pair (a, b) with a < b from the flat index
            let mut remaining = (ell - 1) as u64;
            while r >= remaining {
                r -= remaining;
                a += 1;
                remaining -= 1;
            }
            let b = a + 1 + r as usize;
            positions.swap(a, b);
        }
    }

    match p.kind {
        ProcessKind::Uep => {
            let mut members = positions;
            members.sort_unstable();
            let s = crate::state::SubsetState::new(members, n)?;
            rank_subset(&s, n)
        }
        ProcessKind::Lep => {
            let x = crate::state::TupleState::new(positions, n)?;
            rank_tuple(&x, n)
        }
    }
}

/// Runs all replicas and histograms the endpoints by state rank.
pub fn endpoint_histogram(cfg: &SimConfig) -> Result<Vec<u64>> {
    let dim = cfg.params.state_count()?;
    if dim > MAX_HISTOGRAM_DIM {
        return Err(Error::Capacity(format!(
            "state space of size {dim} exceeds histogram cap {MAX_HISTOGRAM_DIM}"
        )));
    }
    let mut hist = alloc::vec![0u64; dim as usize];
    for r in 0..cfg.replicas {
        hist[simulate(cfg, r)? as usize] += 1;
    }
    Ok(hist)
}

/// Plug-in total variation estimate with a bootstrap confidence halfwidth.
#[derive(Debug, Clone)]
pub struct TvEstimate {
    pub estimate: f64,
    /// 95% bootstrap halfwidth.
    pub halfwidth: f64,
    /// Documented positive bias bound of the plug-in estimator,
    /// (1/2) sqrt(N / replicas).
    pub bias_bound: f64,
    pub replicas: u64,
}

fn tv_of_hist(hist: &[u64], replicas: u64) -> f64 {
    let n = hist.len() as f64;
    let r = replicas as f64;
    0.5 * hist
        .iter()
        .map(|&h| (h as f64 / r - 1.0 / n).abs())
        .sum::<f64>()
}

/// Histograms replica endpoints and returns the plug-in distance to uniform
/// together with a 95% bootstrap halfwidth (200 resamples).
pub fn empirical_tv(cfg: &SimConfig) -> Result<TvEstimate> {
    let hist = endpoint_histogram(cfg)?;
    empirical_tv_from_histogram(&hist, cfg.replicas, cfg.seed)
}

/// Same estimate from a precomputed histogram.
pub fn empirical_tv_from_histogram(
    hist: &[u64],
    replicas: u64,
    seed: u64,
) -> Result<TvEstimate> {
    if hist.iter().sum::<u64>() != replicas {
        return Err(Error::InvalidParameter(
            "histogram total does not match replica count".into(),
        ));
    }
    let estimate = tv_of_hist(hist, replicas);

    // bootstrap from the empirical law via inverse-CDF sampling
    let cumulative: Vec<u64> = hist
        .iter()
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX); // keep bootstrap draws disjoint from replicas
    const BOOTSTRAP: usize = 200;
    let mut stats = Vec::with_capacity(BOOTSTRAP);
    let mut resample = alloc::vec![0u64; hist.len()];
    for _ in 0..BOOTSTRAP {
        resample.iter_mut().for_each(|v| *v = 0);
        for _ in 0..replicas {
            let u = rng.gen_range(0..replicas);
            let idx = cumulative.partition_point(|&c| c <= u);
            resample[idx] += 1;
        }
        stats.push(tv_of_hist(&resample, replicas));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = stats[(0.025 * BOOTSTRAP as f64) as usize];
    let hi = stats[((0.975 * BOOTSTRAP as f64) as usize).min(BOOTSTRAP - 1)];
    let halfwidth = 0.5 * (hi - lo);
    Ok(TvEstimate {
        estimate,
        halfwidth,
        bias_bound: 0.5 * libm::sqrt(hist.len() as f64 / replicas as f64),
        replicas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{build_uep_generator, Generator};
    use crate::spectral::eigen_basis;
    use crate::state::{ProcessKind, ProcessParams};

    fn uep(n: usize, ell: usize, alpha: f64) -> Generator {
        build_uep_generator(ProcessParams::new(n, ell, alpha, ProcessKind::Uep).unwrap())
            .unwrap()
    }

    #[test]
    fn point_mass_at_time_zero() {
        let g = uep(4, 2, 1.0);
        let b = eigen_basis(&g).unwrap();
        let d = heat_kernel_row_spectral(&b, 3, 0.0).unwrap();
        for (i, &p) in d.probs().iter().enumerate() {
            let expect = if i == 3 { 1.0 } else { 0.0 };
            assert!((p - expect).abs() < 1e-10);
        }
        let d = heat_kernel_row_uniformization(&g, 3, 0.0).unwrap();
        assert_eq!(d.probs()[3], 1.0);
    }

    #[test]
    fn two_state_chain_analytic() {
        // n=2, l=1: P(X_t = x0) = (1 + e^{-2t}) / 2
        let g = uep(2, 1, 1.0);
        let b = eigen_basis(&g).unwrap();
        for &t in &[0.0, 0.1, 0.5, 2.0] {
            let d = heat_kernel_row_spectral(&b, 0, t).unwrap();
            let expect = 0.5 * (1.0 + (-2.0 * t).exp());
            assert!((d.probs()[0] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_and_uniformization_agree() {
        let g = uep(5, 2, 1.0);
        let b = eigen_basis(&g).unwrap();
        for &t in &[0.1, 1.0, 5.0] {
            let ds = heat_kernel_row_spectral(&b, 0, t).unwrap();
            let du = heat_kernel_row_uniformization(&g, 0, t).unwrap();
            for (a, b) in ds.probs().iter().zip(du.probs()) {
                assert!((a - b).abs() < 1e-9, "t={t}");
            }
        }
    }

    #[test]
    fn kernel_rows_are_distributions() {
        let g = uep(5, 2, 1.0);
        let b = eigen_basis(&g).unwrap();
        for x0 in 0..g.dim {
            for &t in &[0.05, 0.7, 3.0] {
                let d = heat_kernel_row_spectral(&b, x0, t).unwrap();
                assert!(d.probs().iter().all(|&p| p >= 0.0));
                let sum: f64 = d.probs().iter().sum();
                assert!((sum - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn semigroup_property() {
        let g = uep(4, 2, 1.0);
        let b = eigen_basis(&g).unwrap();
        let (s, t) = (0.4, 0.9);
        let direct = heat_kernel_row_spectral(&b, 2, s + t).unwrap();
        // compose: row at s, then propagate each state by t
        let at_s = heat_kernel_row_spectral(&b, 2, s).unwrap();
        let mut composed = vec![0.0; g.dim];
        for y in 0..g.dim {
            let row = heat_kernel_row_spectral(&b, y, t).unwrap();
            for (ci, &ri) in composed.iter_mut().zip(row.probs()) {
                *ci += at_s.probs()[y] * ri;
            }
        }
        for (a, b) in direct.probs().iter().zip(&composed) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn kernel_is_symmetric_in_endpoints() {
        for n in 2..=4usize {
            for ell in 1..=n {
                let p = ProcessParams::new(n, ell, 1.0, ProcessKind::Lep).unwrap();
                let g = crate::generator::build_lep_generator(p).unwrap();
                let b = eigen_basis(&g).unwrap();
                let t = 0.6;
                let rows: Vec<_> = (0..g.dim)
                    .map(|x| heat_kernel_row_spectral(&b, x, t).unwrap())
                    .collect();
                for x in 0..g.dim {
                    for y in 0..g.dim {
                        assert!(
                            (rows[x].probs()[y] - rows[y].probs()[x]).abs() < 1e-10
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn distances_on_extremes() {
        let d = Distribution::point_mass(10, 0).unwrap();
        assert!((tv_distance(&d) - 0.9).abs() < 1e-15);
        assert!((l2_distance(&d) - 9.0f64.sqrt()).abs() < 1e-12);

        let u = Distribution::new(vec![0.1; 10]).unwrap();
        assert!(tv_distance(&u).abs() < 1e-15);
        assert!(l2_distance(&u).abs() < 1e-12);
    }

    #[test]
    fn kernel_l2_matches_exact_formula() {
        let n = 4;
        let alpha = crate::mixing::standard_alpha(n);
        let g = uep(n, 2, alpha);
        let b = eigen_basis(&g).unwrap();
        let t = 2.0;
        let d = heat_kernel_row_spectral(&b, 0, t).unwrap();
        let exact = crate::mixing::uep_l2_exact(n, 2, t).unwrap();
        assert!((l2_distance(&d) - exact).abs() < 1e-9);
    }

    #[test]
    fn simulate_time_zero_and_determinism() {
        let p = ProcessParams::new(5, 2, 1.0, ProcessKind::Uep).unwrap();
        let cfg = SimConfig::new(p, 0.0, 10, 42).unwrap().with_start(7);
        for r in 0..10 {
            assert_eq!(simulate(&cfg, r).unwrap(), 7);
        }
        let cfg = SimConfig::new(p, 1.0, 10, 42).unwrap();
        let a: Vec<u64> = (0..10).map(|r| simulate(&cfg, r).unwrap()).collect();
        let b: Vec<u64> = (0..10).map(|r| simulate(&cfg, r).unwrap()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn two_state_simulation_law() {
        // P(X_t = x0) = (1 + e^{-2t}) / 2 ~ 0.5 at t = 10
        let p = ProcessParams::new(2, 1, 1.0, ProcessKind::Uep).unwrap();
        let cfg = SimConfig::new(p, 10.0, 100_000, 1234).unwrap();
        let hist = endpoint_histogram(&cfg).unwrap();
        let expect = 0.5 * (1.0 + (-20.0f64).exp());
        let freq = hist[0] as f64 / cfg.replicas as f64;
        let se = (expect * (1.0 - expect) / cfg.replicas as f64).sqrt();
        assert!((freq - expect).abs() < 3.0 * se, "freq={freq}");
    }

    #[test]
    fn lep_simulation_reaches_all_states() {
        let p = ProcessParams::new(3, 3, 1.0, ProcessKind::Lep).unwrap();
        let cfg = SimConfig::new(p, 5.0, 6000, 9).unwrap();
        let hist = endpoint_histogram(&cfg).unwrap();
        assert_eq!(hist.len(), 6);
        // well mixed: every permutation near uniform
        for &h in &hist {
            let freq = h as f64 / 6000.0;
            assert!((freq - 1.0 / 6.0).abs() < 0.05, "hist={hist:?}");
        }
    }

    #[test]
    fn empirical_tv_at_time_zero() {
        let p = ProcessParams::new(4, 2, 1.0, ProcessKind::Uep).unwrap();
        let cfg = SimConfig::new(p, 0.0, 1000, 5).unwrap();
        let est = empirical_tv(&cfg).unwrap();
        assert!((est.estimate - (1.0 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn empirical_tv_mixed_chain() {
        let n = 4;
        let p = ProcessParams::new(n, 2, crate::mixing::standard_alpha(n), ProcessKind::Uep)
            .unwrap();
        let cfg = SimConfig::new(p, 100.0, 20_000, 11).unwrap();
        let est = empirical_tv(&cfg).unwrap();
        assert!(
            est.estimate <= est.bias_bound + 3.0 * est.halfwidth,
            "{est:?}"
        );
    }
}
