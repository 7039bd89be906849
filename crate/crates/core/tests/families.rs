use lengthpairs::bracket::{bracket_self, equal_term_pairs, term_word};
use lengthpairs::intersections::{mutual_intersections, self_intersections, self_intersections_with, Enumeration};
use lengthpairs::pipeline::{
    assess_pair, build_pair_general, build_pair_self, check_equal_length, find_min_n, Filling, PipelineError,
};
use lengthpairs::{are_conjugate, perturb, sample_representation, Representation, SurfaceSpec, Word};

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn reps(surface: &SurfaceSpec, n: u64) -> Vec<Representation> {
    (0..n).map(|s| sample_representation(surface, s, 3.0).unwrap()).collect()
}

#[test]
fn figure_eight_family_end_to_end() {
    let reps = reps(&SurfaceSpec::pair_of_pants(), 8);
    let alpha = w("ab");
    let record = self_intersections(&alpha, &reps[0], 6).unwrap().remove(0);
    assert_eq!(record.witness, w("a"));
    let scan = find_min_n(&alpha, &record, 20).unwrap();
    let n_observed = scan.n_observed;
    assert_eq!(n_observed, Some(1));
    for n in 1..=8 {
        let pair = build_pair_self(&alpha, &record, n).unwrap();
        assert_eq!(pair.left.cyclic_reduction().len(), pair.right.cyclic_reduction().len());
        let v = assess_pair(&pair, &reps, 1e-9, 4, n_observed).unwrap();
        assert!(v.equal_length_numeric && v.equal_length_symbolic, "n = {n}");
        assert_eq!(v.length_equivalent(), n >= 2, "n = {n}");
        assert_eq!((v.filling_left, v.filling_right), (Filling::Yes, Filling::Yes));
    }
}

#[test]
fn first_pair_is_a_rotation() {
    let rep = &reps(&SurfaceSpec::pair_of_pants(), 1)[0];
    let record = self_intersections(&w("ab"), rep, 6).unwrap().remove(0);
    let pair = build_pair_self(&w("ab"), &record, 1).unwrap();
    assert!(are_conjugate(&pair.left, &pair.right));
}

#[test]
fn general_pairs_from_equal_terms() {
    for (surface, x, y) in [
        (SurfaceSpec::one_holed_torus(), "a", "abbb"),
        (SurfaceSpec::pair_of_pants(), "ab", "aab"),
    ] {
        let reps = reps(&surface, 5);
        let (alpha, beta) = (w(x), w(y));
        let eq = equal_term_pairs(&alpha, &beta, &reps[0], 7).unwrap();
        assert!(!eq.is_empty(), "{x} {y}");
        for (g, h) in &eq {
            assert!(are_conjugate(&term_word(&alpha, &beta, g), &term_word(&alpha, &beta, h)));
            for n in 1..=6 {
                let pair = build_pair_general(&alpha, &beta, g, h, n).unwrap();
                let check = check_equal_length(&pair, &reps, 1e-9).unwrap();
                assert!(check.equal_numeric && check.equal_symbolic, "{x} {y} {g} {h} n = {n}");
            }
        }
    }
}

#[test]
fn general_pair_preconditions() {
    let (alpha, beta) = (w("ab"), w("aabb"));
    assert!(matches!(
        build_pair_general(&alpha, &beta, &w("a"), &w("a"), 2),
        Err(PipelineError::Degenerate)
    ));
    assert!(matches!(
        build_pair_general(&alpha, &w("b"), &w("a"), &w("A"), 2),
        Err(PipelineError::HypothesisViolated(..))
    ));
    assert!(matches!(
        build_pair_general(&alpha, &w("b"), &w("a"), &w("bb"), 0),
        Err(PipelineError::ZeroPower)
    ));
}

#[test]
fn records_survive_perturbation() {
    let base = &reps(&SurfaceSpec::one_holed_torus(), 3)[2];
    let alpha = w("aabAB");
    let keys = |r: &Representation| {
        self_intersections(&alpha, r, 6)
            .unwrap()
            .into_iter()
            .map(|x| (x.coset_key, x.sign))
            .collect::<Vec<_>>()
    };
    let expected = keys(base);
    assert!(!expected.is_empty());
    for seed in 0..4 {
        let moved = perturb(base, seed, 0.05).unwrap();
        assert!(moved.is_certified());
        assert_eq!(keys(&moved), expected, "seed {seed}");
    }
}

#[test]
fn exact_and_bounded_enumerations_agree() {
    let rep = &reps(&SurfaceSpec::one_holed_torus(), 2)[1];
    for s in ["ab", "aab", "aabb", "abAB", "aabAB", "abaB"] {
        let a = w(s);
        let bounded = self_intersections(&a, rep, 8).unwrap();
        let exact = self_intersections_with(&a, rep, Enumeration::Exact).unwrap();
        let k = |v: &Vec<lengthpairs::intersections::IntersectionRecord>| {
            v.iter().map(|r| r.coset_key.clone()).collect::<Vec<_>>()
        };
        assert_eq!(k(&bounded), k(&exact), "{s}");
    }
}

#[test]
fn self_brackets_vanish_on_random_curves() {
    let rep = &reps(&SurfaceSpec::one_holed_torus(), 4)[3];
    for s in ["ab", "aab", "abb", "aabb", "aabAB", "abAB"] {
        assert!(bracket_self(&w(s), rep, 6).unwrap().sum.is_zero(), "{s}");
    }
    assert!(mutual_intersections(&w("a"), &w("a"), rep, 6).unwrap().is_empty());
}

#[test]
fn representation_json_round_trip() {
    let rep = &reps(&SurfaceSpec::pair_of_pants(), 2)[1];
    let text = serde_json::to_string(rep).unwrap();
    let back: Representation = serde_json::from_str(&text).unwrap();
    assert_eq!(back.matrices, rep.matrices);
    assert_eq!(back.seed, rep.seed);
}
