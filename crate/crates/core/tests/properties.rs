//! Randomized invariants checked with proptest: word algebra, profile
//! domination, sampling determinism, Hausdorff axioms and remetrization
//! monotonicity.

use hutchfrac_core::corpus::load_example;
use hutchfrac_core::metrics::{diameter, hausdorff, pd_eval};
use hutchfrac_core::oscillation::{
    log_grid, oscillation_analytic, oscillation_empirical, sample_pairs,
};
use hutchfrac_core::remetrize::{build_remetrized, AlphaSequence};
use hutchfrac_core::spaces::{enumerate_words, eval_word};
use hutchfrac_core::{Cloud, IfsSystem, Point, PseudometricDescriptor, Word};
use proptest::prelude::*;

fn cantor_system() -> IfsSystem {
    load_example("cantor").expect("fixture").system
}

fn scalar_cloud(xs: &[f64]) -> Cloud {
    let pts = xs.iter().map(|&x| Point::scalar(x)).collect();
    Cloud::new(pts, 0.0).expect("cloud")
}

fn plane_cloud(xys: &[(f64, f64)]) -> Cloud {
    let pts = xys
        .iter()
        .map(|&(x, y)| Point::new(vec![x, y]).expect("finite"))
        .collect();
    Cloud::new(pts, 0.0).expect("cloud")
}

proptest! {
    /// Words form a semigroup under concatenation and evaluation is an
    /// antihomomorphism-free composition: (u.v)(x) = u(v(x)).
    #[test]
    fn word_concatenation_composes_evaluation(
        u in proptest::collection::vec(0usize..2, 0..6),
        v in proptest::collection::vec(0usize..2, 0..6),
        w in proptest::collection::vec(0usize..2, 0..6),
        x in 0.0f64..=1.0,
    ) {
        let ifs = cantor_system();
        let (u, v, w) = (Word::new(u), Word::new(v), Word::new(w));
        let left = u.concat(&v).concat(&w);
        let right = u.concat(&v.concat(&w));
        prop_assert_eq!(left.letters(), right.letters());
        let p = Point::scalar(x);
        let composed = eval_word(&ifs, &u.concat(&v), &p).unwrap();
        let staged = eval_word(&ifs, &u, &eval_word(&ifs, &v, &p).unwrap()).unwrap();
        prop_assert!((composed.coord(0) - staged.coord(0)).abs() <= 1e-15);
    }

    /// Length-n enumeration over k maps yields exactly k^n distinct words
    /// in lexicographic order.
    #[test]
    fn word_enumeration_is_complete_and_ordered(n in 0usize..8) {
        let ifs = cantor_system();
        let words = enumerate_words(&ifs, n, 1 << 12).unwrap();
        prop_assert_eq!(words.len(), 1usize << n);
        for w in &words {
            prop_assert_eq!(w.len(), n);
        }
        for pair in words.windows(2) {
            prop_assert!(pair[0].letters() < pair[1].letters());
        }
    }

    /// The sampled oscillation never exceeds the analytic upper envelope
    /// on the same grid.
    #[test]
    fn empirical_oscillation_is_dominated_by_analytic(
        xs in proptest::collection::vec(0.0f64..=1.0, 3..25),
        seed in any::<u64>(),
    ) {
        let ifs = cantor_system();
        let d = PseudometricDescriptor::Euclidean;
        let cloud = scalar_cloud(&xs);
        let grid = log_grid(1e-3, 1.0, 16);
        let emp = oscillation_empirical(ifs.maps(), &d, &cloud, &grid, 10_000, seed).unwrap();
        for m in ifs.maps() {
            let ana = oscillation_analytic(m, &d, &grid, Some(ifs.domain())).unwrap();
            for (t, &v) in grid.iter().zip(emp.values()) {
                prop_assert!(v <= ana.lookup_ceil(*t) + 1e-12);
            }
        }
    }

    /// Pair sampling is deterministic in the seed and nested in the
    /// budget: a smaller budget yields a prefix of a larger one.
    #[test]
    fn pair_sampling_is_seeded_and_nested(
        xs in proptest::collection::vec(0.0f64..=1.0, 30..60),
        seed in any::<u64>(),
        small in 5usize..40,
        extra in 1usize..40,
    ) {
        let cloud = scalar_cloud(&xs);
        let a = sample_pairs(&cloud, small, seed);
        let b = sample_pairs(&cloud, small, seed);
        prop_assert_eq!(&a, &b);
        let big = sample_pairs(&cloud, small + extra, seed);
        if big.len() > a.len() {
            prop_assert_eq!(&a[..], &big[..a.len()]);
        }
        for &(i, j) in &a {
            prop_assert!(i < j && j < cloud.len());
        }
    }

    /// The Hausdorff lift of a pseudometric is itself a pseudometric on
    /// clouds: zero on the diagonal, symmetric, triangle inequality.
    #[test]
    fn hausdorff_is_a_pseudometric_on_clouds(
        a in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..8),
        b in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..8),
        c in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..8),
    ) {
        let d = PseudometricDescriptor::Euclidean;
        let (a, b, c) = (plane_cloud(&a), plane_cloud(&b), plane_cloud(&c));
        prop_assert!(hausdorff(&d, &a, &a).unwrap() <= 1e-12);
        let ab = hausdorff(&d, &a, &b).unwrap();
        let ba = hausdorff(&d, &b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        let bc = hausdorff(&d, &b, &c).unwrap();
        let ac = hausdorff(&d, &a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    /// One Hutchinson step contracts cloud Hausdorff distance by the
    /// worst member Lipschitz constant (1/3 for the thirds system).
    #[test]
    fn hutchinson_step_contracts_hausdorff(
        a in proptest::collection::vec(0.0f64..=1.0, 1..10),
        b in proptest::collection::vec(0.0f64..=1.0, 1..10),
    ) {
        let ifs = cantor_system();
        let d = PseudometricDescriptor::Euclidean;
        let (a, b) = (scalar_cloud(&a), scalar_cloud(&b));
        let fa = hutchfrac_core::hutchinson::hutchinson_step(&ifs, &a).unwrap();
        let fb = hutchfrac_core::hutchinson::hutchinson_step(&ifs, &b).unwrap();
        let before = hausdorff(&d, &a, &b).unwrap();
        let after = hausdorff(&d, &fa, &fb).unwrap();
        prop_assert!(after <= before / 3.0 + 1e-12);
    }

    /// Truncated remetrization is monotone in the truncation depth,
    /// dominates the base pseudometric and stays below twice the domain
    /// diameter plus the certified tail.
    #[test]
    fn remetrized_value_is_monotone_and_bracketed(
        x in 0.0f64..=1.0,
        y in 0.0f64..=1.0,
    ) {
        let entry = load_example("cantor").unwrap();
        let rm = build_remetrized(
            &entry.system,
            PseudometricDescriptor::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            entry.invariant_cloud.clone(),
            1e-3,
            32,
        )
        .unwrap();
        let (px, py) = (Point::scalar(x), Point::scalar(y));
        let base = pd_eval(&PseudometricDescriptor::Euclidean, &px, &py).unwrap();
        let mut prev = 0.0f64;
        for depth in 0..=rm.depth() {
            let v = rm.eval_with_depth(&px, &py, depth);
            prop_assert!(v + 1e-15 >= prev, "depth {depth}: {v} < {prev}");
            prev = v;
        }
        let full = rm.eval(&px, &py);
        let diam = diameter(&PseudometricDescriptor::Euclidean, rm.invariant_cloud()).unwrap();
        prop_assert!(full.value + 1e-12 >= base);
        prop_assert!(full.value <= 2.0 * diam + rm.tail_bound() + 1e-12);
    }
}
