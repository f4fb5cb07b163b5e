mod common;

use std::f64::consts::PI;

use chain_spectra::orbits::{adjacency, count_by_length, transition_probabilities};
use chain_spectra::spectrum::SeparatorGrid;
use chain_spectra::*;
use common::primitive_counts_from_traces;
use proptest::prelude::*;

fn chain_strategy(max_bonds: usize, max_lambda: f64) -> impl Strategy<Value = ChainSpec> {
    (1..=max_bonds)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(0.3f64..1.5, n),
                prop::collection::vec(0.0f64..max_lambda, n),
            )
        })
        .prop_map(|(lengths, lambdas)| {
            let mut v = vec![0.0];
            for l in lengths {
                v.push(v.last().unwrap() + l);
            }
            ChainSpec::new(v, &lambdas).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbit_counts_are_mobius_inverted_traces(c in chain_strategy(4, 0.9)) {
        let counts = count_by_length(&enumerate_orbits(&c, 12).unwrap(), 12);
        let oracle = primitive_counts_from_traces(&adjacency(&c), 12);
        for l in 1..=12 {
            prop_assert_eq!(counts[l] as i128, oracle[l]);
        }
    }

    #[test]
    fn scattering_conserves_probability(c in chain_strategy(6, 0.99)) {
        for row in transition_probabilities(&c) {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_frequencies_are_inside_and_bounded(c in chain_strategy(5, 0.9)) {
        let form = expand_determinant(&c).unwrap();
        let bound: f64 = form.pairs.iter().map(|p| p.weight()).sum();
        prop_assert!((form.margin - (1.0 - bound)).abs() < 1e-12);
        for p in &form.pairs {
            prop_assert!(p.action > 0.0 && p.action < form.s0);
        }
        for i in 0..2000 {
            let k = 0.01 * i as f64;
            prop_assert!(form.characteristic(k).abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn compressed_chains_become_regular(c in chain_strategy(6, 0.99)) {
        let mut c = c;
        let mut halvings = 0;
        while expand_determinant(&c).unwrap().margin <= 0.0 {
            c = c.compress_contrast(0.5);
            halvings += 1;
            prop_assert!(halvings <= 20);
        }
    }

    #[test]
    fn regular_chains_interlace(c in chain_strategy(4, 0.5)) {
        let mut c = c;
        while expand_determinant(&c).unwrap().margin <= 0.0 {
            c = c.compress_contrast(0.5);
        }
        let form = expand_determinant(&c).unwrap();
        let grid = SeparatorGrid::new(&form);
        let roots = find_roots(&form, 1, 60).unwrap();
        prop_assert_eq!(roots.len(), 60);
        for r in &roots {
            let (lo, hi) = grid.interval(r.n);
            prop_assert!(lo < r.root && r.root < hi);
            prop_assert!(r.residual < 1e-12);
        }
    }

    #[test]
    fn repetition_scales_action_and_amplitude(c in chain_strategy(3, 0.9), nu in 1usize..5) {
        for o in enumerate_orbits(&c, 8).unwrap() {
            let rep = o.repeat(nu);
            prop_assert!((rep.action - nu as f64 * o.action).abs() < 1e-12);
            prop_assert!((orbit_amplitude(&c, &rep.code).unwrap() - o.amplitude.powi(nu as i32)).abs() < 1e-14);
            prop_assert!(o.amplitude.abs() <= 1.0);
        }
    }

    #[test]
    fn series_leading_term_is_weyl(c in chain_strategy(3, 0.3), n in 1usize..1000) {
        let mut c = c;
        while expand_determinant(&c).unwrap().margin <= 0.0 {
            c = c.compress_contrast(0.5);
        }
        let form = expand_determinant(&c).unwrap();
        let k = eigenvalue_series(&form, &OrbitSum::empty(&c), n).unwrap();
        prop_assert_eq!(k, PI * n as f64 / c.total_action());
    }
}
