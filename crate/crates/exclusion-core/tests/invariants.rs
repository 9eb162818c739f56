//! Cross-module invariants, exhaustive sweeps at small n plus randomized
//! property checks.

use proptest::prelude::*;

use exclusion_core::generator::{
    build_cayley_adjacency, build_lep_generator, build_uep_generator, relate_cayley_to_lep,
};
use exclusion_core::mixing::{l2_from_spectrum, standard_alpha, uep_l2_exact};
use exclusion_core::spectral::{
    brute_force_spectrum, cayley_spectrum, default_cluster_tol, envelope,
    uep_spectrum_closed_form,
};
use exclusion_core::state::{
    rank_subset, rank_tuple, unrank_subset, unrank_tuple, ProcessKind, ProcessParams,
};

#[test]
fn unit_rate_spectra_are_integers() {
    for n in 2..=6usize {
        for ell in 0..=n {
            let p = ProcessParams::new(n, ell, 1.0, ProcessKind::Lep).unwrap();
            let g = build_lep_generator(p).unwrap();
            let s = brute_force_spectrum(&g, default_cluster_tol(1.0, n)).unwrap();
            for q in &s.pairs {
                assert!(
                    (q.value - q.value.round()).abs() < 1e-7,
                    "n={n} ell={ell} value={}",
                    q.value
                );
            }
        }
    }
}

#[test]
fn cayley_spectra_are_symmetric() {
    // transpositions are odd, so the Cayley graph is bipartite
    for k in 2..=5usize {
        let a = build_cayley_adjacency(k).unwrap();
        let s = cayley_spectrum(&a, 1e-6).unwrap();
        for q in &s.pairs {
            let mirrored = s.multiplicity_at(-q.value, 1e-6);
            assert_eq!(mirrored, Some(q.multiplicity), "k={k} value={}", q.value);
        }
    }
}

#[test]
fn fresh_lep_eigenvalues_respect_the_level_floor() {
    // with alpha = 1, every eigenvalue absent at level l-1 is >= l(n-l+1)
    for n in 2..=5usize {
        for ell in 1..=n {
            let lo = brute_force_spectrum(
                &build_lep_generator(
                    ProcessParams::new(n, ell - 1, 1.0, ProcessKind::Lep).unwrap(),
                )
                .unwrap(),
                1e-6,
            )
            .unwrap();
            let hi = brute_force_spectrum(
                &build_lep_generator(ProcessParams::new(n, ell, 1.0, ProcessKind::Lep).unwrap())
                    .unwrap(),
                1e-6,
            )
            .unwrap();
            let floor = (ell * (n - ell + 1)) as f64;
            for q in &hi.pairs {
                if lo.multiplicity_at(q.value, 1e-6).is_none() {
                    assert!(
                        q.value >= floor - 1e-6,
                        "n={n} ell={ell} fresh value {} below {floor}",
                        q.value
                    );
                }
            }
        }
    }
}

#[test]
fn lep_total_multiplicity_is_the_state_count() {
    for n in 2..=5usize {
        for ell in 0..=n {
            let p = ProcessParams::new(n, ell, 1.0, ProcessKind::Lep).unwrap();
            let g = build_lep_generator(p).unwrap();
            let s = brute_force_spectrum(&g, 1e-6).unwrap();
            assert_eq!(s.total(), p.state_count().unwrap());
        }
    }
}

#[test]
fn envelope_values_are_inside_the_trivial_range() {
    // -Q is positive semidefinite with rows summing to the exit rate, so
    // everything lies in [0, 2 alpha (l(n-l) + C(l,2))]; the envelope should
    // not wander past twice the top exit rate either
    for n in 2..=6usize {
        let e = envelope(n, n, 1.0).unwrap();
        let cap = 2.0 * (n * (n - 1)) as f64;
        assert!(e.values.iter().all(|&v| (-1e-9..=cap).contains(&v)));
        assert!((e.values[0]).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn subset_rank_round_trip(n in 1usize..16, rank_seed in 0u64..1_000_000) {
        for ell in 0..=n {
            let total = exclusion_core::combin::binomial(n as u64, ell as u64).unwrap();
            let rank = rank_seed % total;
            let s = unrank_subset(rank, n, ell).unwrap();
            prop_assert_eq!(rank_subset(&s, n).unwrap(), rank);
        }
    }

    #[test]
    fn tuple_rank_round_trip(n in 1usize..10, rank_seed in 0u64..10_000_000) {
        for ell in 0..=n {
            let total = exclusion_core::combin::falling_factorial(n as u64, ell as u64).unwrap();
            let rank = rank_seed % total;
            let x = unrank_tuple(rank, n, ell).unwrap();
            prop_assert_eq!(rank_tuple(&x, n).unwrap(), rank);
        }
    }

    #[test]
    fn closed_form_spectrum_scales_linearly_in_alpha(
        n in 2usize..12,
        alpha in 0.01f64..10.0,
    ) {
        let ell = n / 2;
        let base = uep_spectrum_closed_form(
            ProcessParams::new(n, ell, 1.0, ProcessKind::Uep).unwrap(),
        ).unwrap();
        let scaled = uep_spectrum_closed_form(
            ProcessParams::new(n, ell, alpha, ProcessKind::Uep).unwrap(),
        ).unwrap();
        prop_assert_eq!(base.pairs.len(), scaled.pairs.len());
        for (b, s) in base.pairs.iter().zip(&scaled.pairs) {
            prop_assert_eq!(b.multiplicity, s.multiplicity);
            prop_assert!((b.value * alpha - s.value).abs() < 1e-9 * alpha * (n * n) as f64);
        }
    }

    #[test]
    fn formula_and_spectrum_curves_agree(n in 4usize..40, t in 0.0f64..50.0) {
        let ell = n / 2;
        let s = uep_spectrum_closed_form(
            ProcessParams::new(n, ell, standard_alpha(n), ProcessKind::Uep).unwrap(),
        ).unwrap();
        let a = uep_l2_exact(n, ell, t).unwrap();
        let b = l2_from_spectrum(&s, t);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn generator_rows_sum_to_zero(n in 2usize..7, seed in 0u64..4) {
        let ell = (seed as usize % n.max(1)).min(n);
        for kind in [ProcessKind::Uep, ProcessKind::Lep] {
            let p = ProcessParams::new(n, ell, 1.0, kind).unwrap();
            let g = match kind {
                ProcessKind::Uep => build_uep_generator(p).unwrap(),
                ProcessKind::Lep => build_lep_generator(p).unwrap(),
            };
            let mut sums = vec![0.0f64; g.dim];
            for (r, c, v) in g.triplets() {
                sums[r] += v;
                if r == c {
                    prop_assert!(v <= 0.0);
                } else {
                    prop_assert!(v > 0.0);
                }
            }
            for s in sums {
                prop_assert!(s.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cayley_map_sends_top_to_zero(k in 2usize..20, alpha in 0.01f64..5.0) {
        // the all-ones eigenvector of A_k has eigenvalue C(k,2) and maps to
        // the stationary eigenvalue 0 of the interchange generator
        let m = relate_cayley_to_lep(k, alpha);
        let top = (k * (k - 1) / 2) as f64;
        prop_assert!(m.apply(top).abs() < 1e-9);
    }
}
