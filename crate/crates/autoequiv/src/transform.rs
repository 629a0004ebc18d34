//! Constructions of multi-models automorphically equivalent to a given one:
//! pushing every interpretation forward along an algebra automorphism, and
//! complementing every tuple set in its Cartesian tuple space.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{cartesian_indices, Element, Interpretation, MultiModel};
use crate::perm::MultiSortedPermutation;
use crate::search::is_algebra_automorphism;

/// Pushes every interpretation forward along `sigma`: a tuple belongs to the
/// transformed state exactly when its preimage belongs to the original state.
/// `sigma` must be an automorphism of the multi-model's algebra. Labels are
/// suffixed with the automorphism's cycle notation (unchanged for the
/// identity), and the result is isomorphic to the input.
pub fn apply_automorphism(mm: &MultiModel, sigma: &MultiSortedPermutation) -> Result<MultiModel> {
    if !is_algebra_automorphism(&mm.algebra, sigma)? {
        return Err(Error::Precondition(format!(
            "{} is not an automorphism of the algebra",
            sigma
        )));
    }
    let suffix = if sigma.is_identity() {
        None
    } else {
        Some(format!("^{}", sigma.cycle_notation()))
    };
    let interpretations = mm
        .interpretations
        .iter()
        .map(|interp| {
            let mut out = Interpretation::new(match &suffix {
                Some(s) => format!("{}{}", interp.label, s),
                None => interp.label.clone(),
            });
            for (name, tuples) in &interp.tuples {
                let mut mapped: Vec<Vec<Element>> =
                    tuples.iter().map(|t| sigma.apply_tuple(t)).collect();
                mapped.sort();
                out.tuples.insert(name.clone(), mapped);
            }
            out
        })
        .collect();
    Ok(MultiModel::new(mm.algebra.clone(), mm.relations.clone(), interpretations))
}

/// Complements every tuple set in its full Cartesian tuple space (diagonal
/// tuples included). Labels toggle a trailing `~`, so complementing twice
/// restores the original labels, and the automorphism groups of each state
/// are unchanged.
pub fn complement(mm: &MultiModel) -> MultiModel {
    complement_impl(mm, false).expect("complement of a valid multi-model cannot fail")
}

/// The loop-free complement for simple graphs: like [`complement`], but
/// diagonal tuples are excluded from the output. Requires a single binary
/// relation over one sort.
pub fn simple_graph_complement(mm: &MultiModel) -> Result<MultiModel> {
    match mm.relations.as_slice() {
        [rel] if rel.signature.len() == 2 && rel.signature[0] == rel.signature[1] => {}
        [rel] => {
            return Err(Error::Precondition(format!(
                "relation {:?} is not a binary relation over one sort",
                rel.name
            )))
        }
        other => {
            return Err(Error::Precondition(format!(
                "expected exactly one relation, found {}",
                other.len()
            )))
        }
    }
    complement_impl(mm, true)
}

fn complement_impl(mm: &MultiModel, skip_diagonal: bool) -> Result<MultiModel> {
    let domain = mm.domain();
    let interpretations = mm
        .interpretations
        .iter()
        .map(|interp| {
            let mut out = Interpretation::new(toggle_complement_label(&interp.label));
            for rel in &mm.relations {
                let dims: Vec<usize> = rel
                    .signature
                    .iter()
                    .map(|&s| {
                        domain.cardinality(s).ok_or_else(|| {
                            Error::Signature(format!(
                                "relation {:?} refers to unknown sort index {s}",
                                rel.name
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                let present: BTreeSet<&Vec<Element>> =
                    interp.relation_tuples(&rel.name).iter().collect();
                let mut tuples = Vec::new();
                for combo in cartesian_indices(&dims) {
                    let tuple: Vec<Element> = combo
                        .iter()
                        .zip(&rel.signature)
                        .map(|(&index, &sort)| Element { sort, index })
                        .collect();
                    if skip_diagonal && tuple.windows(2).all(|w| w[0] == w[1]) {
                        continue;
                    }
                    if !present.contains(&tuple) {
                        tuples.push(tuple);
                    }
                }
                out.tuples.insert(rel.name.clone(), tuples);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(MultiModel::new(mm.algebra.clone(), mm.relations.clone(), interpretations))
}

fn toggle_complement_label(label: &str) -> String {
    match label.strip_suffix('~') {
        Some(base) => base.to_string(),
        None => format!("{label}~"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_to_model, Graph};
    use crate::model::{tuple_space_size, Algebra, RelationSymbol, SortedDomain};
    use crate::perm::PermGroup;
    use crate::search::{model_automorphisms, SearchBudget};

    fn star_mm() -> MultiModel {
        graph_to_model(&Graph::undirected(4, [(0, 1), (0, 2), (0, 3)]).unwrap()).to_multimodel()
    }

    fn edges_of(mm: &MultiModel, interp: usize) -> Vec<(usize, usize)> {
        mm.interpretations[interp]
            .relation_tuples("edge")
            .iter()
            .map(|t| (t[0].index, t[1].index))
            .collect()
    }

    #[test]
    fn identity_transform_is_a_no_op() {
        let mm = star_mm();
        let id = MultiSortedPermutation::identity(mm.domain());
        assert_eq!(apply_automorphism(&mm, &id).unwrap(), mm);
    }

    #[test]
    fn transform_maps_each_tuple_forward() {
        let path = graph_to_model(&Graph::directed(3, [(0, 1), (1, 2)]).unwrap()).to_multimodel();
        let swap = MultiSortedPermutation::single(path.domain(), vec![1, 0, 2]).unwrap();
        let moved = apply_automorphism(&path, &swap).unwrap();
        assert_eq!(edges_of(&moved, 0), vec![(0, 2), (1, 0)]);
        assert!(moved.interpretations[0].label.ends_with("^V:(0 1)"));
    }

    #[test]
    fn interpretation_automorphisms_leave_the_state_fixed() {
        let mm = star_mm();
        let leaf_swap = MultiSortedPermutation::single(mm.domain(), vec![0, 2, 1, 3]).unwrap();
        let moved = apply_automorphism(&mm, &leaf_swap).unwrap();
        assert_eq!(
            moved.interpretations[0].tuples,
            mm.interpretations[0].tuples
        );
    }

    #[test]
    fn non_automorphisms_are_rejected() {
        let alg = crate::testutil::cyclic4();
        let mm = MultiModel::new(
            alg,
            vec![RelationSymbol::new("r", vec![0])],
            vec![Interpretation::new("f").with_relation("r", Vec::<Vec<Element>>::new())],
        );
        let swap = MultiSortedPermutation::single(mm.domain(), vec![0, 2, 1, 3]).unwrap();
        match apply_automorphism(&mm, &swap) {
            Err(Error::Precondition(_)) => {}
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn complement_of_full_relation_is_empty() {
        let domain = SortedDomain::single("V", 3);
        let rel = RelationSymbol::new("r", vec![0, 0]);
        let full: Vec<Vec<Element>> = cartesian_indices(&[3, 3])
            .map(|c| vec![Element::new(0, c[0]), Element::new(0, c[1])])
            .collect();
        let mm = MultiModel::new(
            Algebra::new(domain, vec![]),
            vec![rel],
            vec![Interpretation::new("f").with_relation("r", full)],
        );
        let c = complement(&mm);
        assert!(c.interpretations[0].relation_tuples("r").is_empty());
    }

    #[test]
    fn complement_of_empty_binary_relation_includes_the_diagonal() {
        let domain = SortedDomain::single("V", 3);
        let mm = MultiModel::new(
            Algebra::new(domain, vec![]),
            vec![RelationSymbol::new("r", vec![0, 0])],
            vec![Interpretation::new("f").with_relation("r", Vec::<Vec<Element>>::new())],
        );
        let c = complement(&mm);
        let tuples = c.interpretations[0].relation_tuples("r");
        assert_eq!(tuples.len(), 9);
        for i in 0..3 {
            assert!(tuples.contains(&vec![Element::new(0, i), Element::new(0, i)]));
        }
    }

    #[test]
    fn star_complement_counts_match_the_tuple_space() {
        let mm = star_mm();
        let c = complement(&mm);
        let tuples = c.interpretations[0].relation_tuples("edge");
        assert_eq!(tuples.len(), 16 - 6);
        let loops = tuples.iter().filter(|t| t[0] == t[1]).count();
        assert_eq!(loops, 4);
        let space = tuple_space_size(&mm.relations[0], mm.domain()).unwrap();
        assert_eq!(tuples.len(), space - 6);
    }

    #[test]
    fn complement_twice_is_the_identity() {
        let mm = star_mm();
        assert_eq!(complement(&complement(&mm)), mm);
    }

    #[test]
    fn simple_complement_of_the_star_is_a_triangle_with_an_isolated_vertex() {
        let c = simple_graph_complement(&star_mm()).unwrap();
        assert_eq!(
            edges_of(&c, 0),
            vec![(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
        );
    }

    #[test]
    fn simple_complement_of_the_complete_graph_is_empty() {
        let k4 = graph_to_model(
            &Graph::undirected(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
        )
        .to_multimodel();
        let c = simple_graph_complement(&k4).unwrap();
        assert!(c.interpretations[0].relation_tuples("edge").is_empty());
    }

    #[test]
    fn simple_complement_is_an_involution_on_loop_free_graphs() {
        let mm = star_mm();
        let back = simple_graph_complement(&simple_graph_complement(&mm).unwrap()).unwrap();
        assert_eq!(back, mm);
    }

    #[test]
    fn simple_complement_rejects_other_shapes() {
        let domain = SortedDomain::single("V", 3);
        let mm = MultiModel::new(
            Algebra::new(domain, vec![]),
            vec![RelationSymbol::new("r", vec![0, 0, 0])],
            vec![Interpretation::new("f").with_relation("r", Vec::<Vec<Element>>::new())],
        );
        assert!(simple_graph_complement(&mm).is_err());
    }

    #[test]
    fn transform_conjugates_and_complement_preserves_the_group() {
        let mm = star_mm();
        let budget = SearchBudget::default();
        let sigma = MultiSortedPermutation::single(mm.domain(), vec![1, 0, 3, 2]).unwrap();

        let moved = apply_automorphism(&mm, &sigma).unwrap();
        let aut_before = model_automorphisms(&mm.model_at(0), &budget).unwrap();
        let aut_after = model_automorphisms(&moved.model_at(0), &budget).unwrap();
        let conjugated: PermGroup = aut_before.conjugate(&sigma).unwrap();
        assert!(aut_after.equal(&conjugated).unwrap());

        let c = complement(&mm);
        let aut_c = model_automorphisms(&c.model_at(0), &budget).unwrap();
        assert_eq!(aut_before.elements(), aut_c.elements());
    }
}
