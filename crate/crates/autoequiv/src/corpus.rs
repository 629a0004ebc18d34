//! Seeded random model generation, used by the differential test suites and
//! the hidden `gen` subcommand. Everything is deterministic given the RNG.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    Algebra, Element, Interpretation, Model, MultiModel, OperationTable, RelationSymbol,
    SortedDomain,
};
use crate::perm::MultiSortedPermutation;

/// Shape parameters for random multi-models. Ranges are inclusive.
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub sorts: (usize, usize),
    pub sort_size: (usize, usize),
    pub relations: (usize, usize),
    pub arity: (usize, usize),
    pub interpretations: (usize, usize),
    /// Probability of adding a modular-addition operation on the first sort,
    /// which keeps the algebra's automorphism group non-trivial.
    pub operation_probability: f64,
    /// Probability that any given tuple of the ambient space is included.
    pub tuple_density: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            sorts: (1, 2),
            sort_size: (2, 5),
            relations: (1, 2),
            arity: (1, 3),
            interpretations: (1, 1),
            operation_probability: 0.0,
            tuple_density: 0.35,
        }
    }
}

pub fn random_multimodel(cfg: &CorpusConfig, rng: &mut impl Rng) -> MultiModel {
    let sort_count = rng.random_range(cfg.sorts.0..=cfg.sorts.1).max(1);
    let domain = SortedDomain::new(
        (0..sort_count)
            .map(|i| (format!("s{i}"), rng.random_range(cfg.sort_size.0..=cfg.sort_size.1))),
    );

    let mut operations = Vec::new();
    if rng.random_bool(cfg.operation_probability) {
        let n = domain.cardinality(0).unwrap();
        operations.push(OperationTable::from_fn("add", &domain, vec![0, 0], 0, |args| {
            Element::new(0, (args[0].index + args[1].index) % n)
        }));
    }

    let relation_count = rng.random_range(cfg.relations.0..=cfg.relations.1);
    let relations: Vec<RelationSymbol> = (0..relation_count)
        .map(|i| {
            let arity = rng.random_range(cfg.arity.0..=cfg.arity.1).max(1);
            let signature = (0..arity).map(|_| rng.random_range(0..sort_count)).collect();
            RelationSymbol::new(format!("r{i}"), signature)
        })
        .collect();

    let interpretation_count = rng.random_range(cfg.interpretations.0..=cfg.interpretations.1).max(1);
    let interpretations = (0..interpretation_count)
        .map(|k| {
            let mut interp = Interpretation::new(format!("f{k}"));
            for rel in &relations {
                let dims: Vec<usize> = rel
                    .signature
                    .iter()
                    .map(|&s| domain.cardinality(s).unwrap())
                    .collect();
                let tuples: Vec<Vec<Element>> = crate::model::cartesian_indices(&dims)
                    .filter(|_| rng.random_bool(cfg.tuple_density))
                    .map(|combo| {
                        combo
                            .iter()
                            .zip(&rel.signature)
                            .map(|(&index, &sort)| Element { sort, index })
                            .collect()
                    })
                    .collect();
                interp.tuples.insert(rel.name.clone(), tuples);
            }
            interp
        })
        .collect();

    MultiModel::new(Algebra::new(domain, operations), relations, interpretations)
}

pub fn random_model(cfg: &CorpusConfig, rng: &mut impl Rng) -> Model {
    let cfg = CorpusConfig { interpretations: (1, 1), ..cfg.clone() };
    random_multimodel(&cfg, rng).model_at(0)
}

/// A uniformly random sort-wise permutation of `domain`.
pub fn random_permutation(domain: &SortedDomain, rng: &mut impl Rng) -> MultiSortedPermutation {
    let images = domain
        .sorts()
        .iter()
        .map(|s| {
            let mut arr: Vec<usize> = (0..s.size).collect();
            arr.shuffle(rng);
            arr
        })
        .collect();
    MultiSortedPermutation::from_images(domain, domain, images).expect("shuffles are bijections")
}
