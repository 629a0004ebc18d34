//! Cross-module invariants on randomized inputs: isomorphic copies are
//! equivalent, witnesses compose, files round-trip.

mod common;

use common::transport_model;

use autoequiv::corpus::{random_model, random_multimodel, random_permutation, CorpusConfig};
use autoequiv::equiv::{
    decide_model_equivalence, verify_model_witness, ModelDecision, ModelEquivWitness,
};
use autoequiv::format::{decode_multimodel, encode_multimodel};
use autoequiv::search::SearchBudget;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_corpus() -> CorpusConfig {
    CorpusConfig {
        sorts: (1, 2),
        sort_size: (2, 4),
        relations: (1, 2),
        arity: (1, 2),
        operation_probability: 0.3,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A model is equivalent to any isomorphic copy of itself, and the
    /// isomorphism itself is an acceptable witness.
    #[test]
    fn isomorphic_copies_are_equivalent(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = SearchBudget::default();
        let m1 = random_model(&small_corpus(), &mut rng);
        let sigma = random_permutation(m1.domain(), &mut rng);
        let m2 = transport_model(&m1, &sigma);

        let decision = decide_model_equivalence(&m1, &m2, &budget).unwrap();
        prop_assert!(decision.is_equivalent(), "transported copy not equivalent");

        let witness = ModelEquivWitness { conjugator: sigma };
        prop_assert!(verify_model_witness(&m1, &m2, &witness, &budget).unwrap());
    }

    /// Witnesses compose: with m1 ~ m2 via w12 and m2 ~ m3 via w23, the
    /// composition w23 . w12 is a witness for m1 ~ m3.
    #[test]
    fn witnesses_compose(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = SearchBudget::default();
        let m1 = random_model(&small_corpus(), &mut rng);
        let m2 = transport_model(&m1, &random_permutation(m1.domain(), &mut rng));
        let m3 = transport_model(&m2, &random_permutation(m1.domain(), &mut rng));

        let w12 = match decide_model_equivalence(&m1, &m2, &budget).unwrap() {
            ModelDecision::Equivalent(w) => w,
            other => return Err(TestCaseError::fail(format!("m1 !~ m2: {other:?}"))),
        };
        let w23 = match decide_model_equivalence(&m2, &m3, &budget).unwrap() {
            ModelDecision::Equivalent(w) => w,
            other => return Err(TestCaseError::fail(format!("m2 !~ m3: {other:?}"))),
        };
        let composed = ModelEquivWitness {
            conjugator: w23.conjugator.compose(&w12.conjugator).unwrap(),
        };
        prop_assert!(verify_model_witness(&m1, &m3, &composed, &budget).unwrap());
    }

    /// The backtracking search finds exactly the automorphism set that the
    /// brute-force oracle enumerates.
    #[test]
    fn search_matches_the_oracle_enumeration(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&small_corpus(), &mut rng);
        let engine = autoequiv::search::model_automorphisms(&m, &SearchBudget::default()).unwrap();
        let oracle = autoequiv::oracle::oracle_model_automorphisms(&m).unwrap();
        prop_assert_eq!(engine.elements(), oracle);
    }

    /// Graph automorphisms computed through the model bridge agree with the
    /// oracle's direct enumeration, and the loop-free complement keeps the
    /// automorphism group unchanged.
    #[test]
    fn graph_groups_survive_the_simple_complement(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2usize..=6);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(0.4) {
                    edges.push((u, v));
                }
            }
        }
        let graph = autoequiv::graph::Graph::undirected(n, edges).unwrap();
        let model = autoequiv::graph::graph_to_model(&graph);

        let engine = autoequiv::search::model_automorphisms(&model, &SearchBudget::default()).unwrap();
        let oracle = autoequiv::oracle::oracle_model_automorphisms(&model).unwrap();
        prop_assert_eq!(engine.elements(), &oracle);

        let complemented = autoequiv::transform::simple_graph_complement(&model.to_multimodel()).unwrap();
        let after = autoequiv::search::model_automorphisms(&complemented.model_at(0), &SearchBudget::default()).unwrap();
        prop_assert_eq!(engine.elements(), after.elements());
    }

    /// The algebra-level decision (conjugation by an arbitrary set bijection)
    /// matches a test-local brute force over all bijections.
    #[test]
    fn algebra_decisions_match_brute_force(seed: u64) {
        use autoequiv::equiv::decide_algebra_equivalence;
        use autoequiv::model::{Interpretation, Model};
        use autoequiv::oracle::oracle_model_automorphisms;
        use autoequiv::MultiSortedPermutation;
        use itertools::Itertools;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = CorpusConfig {
            sorts: (1, 1),
            sort_size: (2, 4),
            operation_probability: 0.5,
            ..small_corpus()
        };
        let a1 = random_model(&cfg, &mut rng).algebra;
        let a2 = if rng.random_bool(0.5) {
            random_model(&cfg, &mut rng).algebra
        } else {
            common::transport_model(
                &Model::new(a1.clone(), vec![], Interpretation::new("f")),
                &autoequiv::corpus::random_permutation(&a1.domain, &mut rng),
            )
            .algebra
        };

        let bare = |alg: &autoequiv::Algebra| Model::new(alg.clone(), vec![], Interpretation::new("f"));
        let aut1 = oracle_model_automorphisms(&bare(&a1)).unwrap();
        let aut2 = oracle_model_automorphisms(&bare(&a2)).unwrap();
        let aut2_set: std::collections::HashSet<_> = aut2.iter().cloned().collect();

        let n1 = a1.domain.sorts()[0].size;
        let mut brute = None;
        if n1 == a2.domain.sorts()[0].size
            && a1.domain.sorts()[0].name == a2.domain.sorts()[0].name
            && aut1.len() == aut2.len()
        {
            for images in (0..n1).permutations(n1) {
                let delta =
                    MultiSortedPermutation::from_images(&a1.domain, &a2.domain, vec![images])
                        .unwrap();
                let delta_inv = delta.inverse();
                let conjugates = aut1.iter().all(|g| {
                    let conj = delta.compose(&g.compose(&delta_inv).unwrap()).unwrap();
                    aut2_set.contains(&conj)
                });
                if conjugates {
                    brute = Some(delta);
                    break;
                }
            }
        }

        let engine = decide_algebra_equivalence(&a1, &a2, &SearchBudget::default()).unwrap();
        prop_assert_eq!(engine.is_equivalent(), brute.is_some());
        if let Some(delta) = brute {
            prop_assert_eq!(engine.witness(), Some(&delta));
        }
    }

    /// The verdict does not depend on argument order.
    #[test]
    fn equivalence_is_symmetric(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = SearchBudget::default();
        let m1 = random_model(&small_corpus(), &mut rng);
        let m2 = random_model(&small_corpus(), &mut rng);
        let forward = decide_model_equivalence(&m1, &m2, &budget).unwrap();
        let backward = decide_model_equivalence(&m2, &m1, &budget).unwrap();
        prop_assert_eq!(forward.is_equivalent(), backward.is_equivalent());
        if let (Some(f), Some(_)) = (forward.witness(), backward.witness()) {
            let inverse = ModelEquivWitness { conjugator: f.conjugator.inverse() };
            prop_assert!(verify_model_witness(&m2, &m1, &inverse, &budget).unwrap());
        }
    }

    /// A shared conjugating isomorphism is a stronger demand than per-pair
    /// conjugators: whenever the strict mode succeeds the default mode must
    /// too, and a shuffled copy of a multi-model always admits the identity
    /// as the shared conjugator.
    #[test]
    fn shared_conjugators_imply_per_pair_equivalence(seed: u64) {
        use autoequiv::equiv::{decide_multimodel_equivalence, MuPolicy};

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = CorpusConfig { interpretations: (1, 3), ..small_corpus() };
        let mm1 = random_multimodel(&cfg, &mut rng);
        let mut mm2 = mm1.clone();
        mm2.interpretations.reverse();

        let budget = SearchBudget::default();
        let shared = decide_multimodel_equivalence(&mm1, &mm2, &budget, MuPolicy::Shared).unwrap();
        let per_pair =
            decide_multimodel_equivalence(&mm1, &mm2, &budget, MuPolicy::PerPair).unwrap();
        prop_assert!(shared.is_equivalent());
        prop_assert!(per_pair.is_equivalent());
        let witness = shared.witness().unwrap();
        let first = &witness.conjugators[0];
        prop_assert!(witness.conjugators.iter().all(|c| c == first));
    }

    /// Encoding then decoding a generated multi-model is the identity.
    #[test]
    fn files_round_trip(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = CorpusConfig { interpretations: (1, 3), ..small_corpus() };
        let mut mm = random_multimodel(&cfg, &mut rng);
        mm.canonicalize();
        let text = encode_multimodel(&mm);
        let back = decode_multimodel(&text).unwrap();
        prop_assert_eq!(&back, &mm);
        prop_assert_eq!(encode_multimodel(&back), text);
    }
}

/// The violation report does not depend on JSON key order.
#[test]
fn validation_is_independent_of_key_order() {
    let a = r#"{
        "sorts": [{"name": "V", "size": 2}],
        "relations": [{"name": "r", "signature": ["V", "V"]}],
        "interpretations": [{"label": "f", "tuples": {"r": [[0, 1, 0]]}}]
    }"#;
    let b = r#"{
        "interpretations": [{"tuples": {"r": [[0, 1, 0]]}, "label": "f"}],
        "relations": [{"signature": ["V", "V"], "name": "r"}],
        "sorts": [{"size": 2, "name": "V"}]
    }"#;
    let va = decode_multimodel(a).unwrap().validate();
    let vb = decode_multimodel(b).unwrap().validate();
    assert_eq!(va, vb);
    assert_eq!(va.len(), 1);
    // Running validation twice reports the same thing.
    let mm = decode_multimodel(a).unwrap();
    assert_eq!(mm.validate(), mm.validate());
}
