use proptest::prelude::*;

use qfock::combinatorics::{permutations, PartialPartition, Permutation};
use qfock::fock::{FockSpace, FockVector, Letter, SpaceConfig, Word};
use qfock::render::{render_partition, RenderFormat};
use qfock::wick::wick_apply;

fn word(max_len: usize, d: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=d, 0..=max_len).prop_map(|v| Word::from_indices(&v))
}

/// A partial partition with pairs straddling the split, drawn by shuffling.
fn partial_partition() -> impl Strategy<Value = PartialPartition> {
    (1usize..=9)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, k)| {
            let j_max = k.min(n - k);
            (Just(n), Just(k), 0..=j_max, Just((1..=n - k).collect::<Vec<_>>()).prop_shuffle(), Just((n - k + 1..=n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(n, k, j, left, right)| {
            let pairs = left.into_iter().zip(right).take(j).collect();
            PartialPartition::new(n, k, pairs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inversions_of_inverse(images in Just((1..=6).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = Permutation::new(images.clone()).unwrap();
        let mut inv = vec![0; images.len()];
        for (i, &x) in images.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        prop_assert_eq!(p.inversions(), Permutation::new(inv).unwrap().inversions());
    }

    #[test]
    fn iota_prime_closed_form(rho in partial_partition()) {
        let triple = rho.partition_triple().unwrap();
        prop_assert_eq!(rho.iota_prime().unwrap(), triple.closed_form());
    }

    #[test]
    fn ascii_render_is_seven_bit(rho in partial_partition()) {
        let text = render_partition(&rho, RenderFormat::Ascii);
        prop_assert!(text.is_ascii());
        let caption = format!("iota = {}", rho.crossings());
        prop_assert!(text.trim_end().ends_with(&caption));
    }

    #[test]
    fn q_inner_symmetric_and_matches_permutation_sum(
        q in -0.95f64..0.95,
        u in word(4, 2),
        v in word(4, 2),
    ) {
        let space = FockSpace::float(SpaceConfig::new(2, 1, 4), q).unwrap();
        let (a, b) = (FockVector::word(u.clone()), FockVector::word(v.clone()));
        let uv = space.q_inner(&a, &b);
        prop_assert!((uv - space.q_inner(&b, &a)).abs() < 1e-12);
        let brute = if u.degree() == v.degree() {
            permutations(u.degree())
                .filter(|p| (1..=u.degree()).all(|i| u.letters()[i - 1] == v.letters()[p.apply(i) - 1]))
                .map(|p| q.powi(p.inversions() as i32))
                .sum()
        } else {
            0.0
        };
        prop_assert!((uv - brute).abs() < 1e-12);
    }

    #[test]
    fn ladder_adjointness(
        q in -0.95f64..0.95,
        u in word(3, 2),
        v in word(4, 2),
        h in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        let space = FockSpace::float(SpaceConfig::new(2, 1, 4), q).unwrap();
        let (a, b) = (FockVector::word(u), FockVector::word(v));
        let left = space.q_inner(&space.create(&h, &a), &b);
        let right = space.q_inner(&a, &space.annihilate(&h, &b));
        prop_assert!((left - right).abs() < 1e-10);
    }

    #[test]
    fn wick_of_vacuum_is_identity(q in -0.95f64..0.95, w in word(5, 2)) {
        let space = FockSpace::float(SpaceConfig::new(2, 1, 5), q).unwrap();
        let xi = FockVector::word(w);
        let image = wick_apply(&space, &xi, &FockVector::vacuum()).unwrap();
        prop_assert!(image.approx_eq(&xi, 1e-12));
    }

    #[test]
    fn gram_is_positive(q in -0.95f64..0.95, d in 1usize..=3, n in 0usize..=3) {
        let space = FockSpace::float(SpaceConfig::new(d, 1, n), q).unwrap();
        let g = space.gram_matrix(n).unwrap().to_nalgebra();
        prop_assert!(qfock::linalg::min_eigenvalue(&g) > 0.0);
        prop_assert!((&g - g.transpose()).amax() < 1e-12);
    }

    #[test]
    fn second_copy_letters_are_orthogonal_to_first(q in -0.9f64..0.9, i in 1usize..=2, j in 1usize..=2) {
        let space = FockSpace::float(SpaceConfig::new(2, 2, 1), q).unwrap();
        let a = FockVector::word(Word::new(vec![Letter::first(i)]));
        let b = FockVector::word(Word::new(vec![Letter::second(j)]));
        prop_assert_eq!(space.q_inner(&a, &b), 0.0);
    }
}
