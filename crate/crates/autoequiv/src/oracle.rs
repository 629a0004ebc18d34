//! Brute-force reference implementations for differential testing.
//!
//! Everything here enumerates complete sort-wise bijections and filters them
//! by direct definition checks. None of the backtracking machinery from the
//! search and equivalence modules is used; the only shared code is the model
//! types and permutation composition. Agreement between this module and the
//! main engine on small instances is the crate's central correctness check.

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{Algebra, Element, Model, MultiModel, SortedDomain};
use crate::perm::MultiSortedPermutation;

/// Hard cap on the size of any sort the oracle will enumerate over.
pub const ORACLE_MAX_SORT_SIZE: usize = 6;
/// Hard cap on the total number of bijections the oracle will enumerate.
pub const ORACLE_MAX_BIJECTIONS: u128 = 10_000_000;
/// Hard cap on multi-model interpretation counts.
pub const ORACLE_MAX_INTERPRETATIONS: usize = 5;

fn check_caps(domain: &SortedDomain) -> Result<()> {
    let mut bijections: u128 = 1;
    for sort in domain.sorts() {
        if sort.size > ORACLE_MAX_SORT_SIZE {
            return Err(Error::OracleCap(format!(
                "sort {:?} has {} elements, oracle cap is {ORACLE_MAX_SORT_SIZE}",
                sort.name, sort.size
            )));
        }
        for k in 2..=sort.size as u128 {
            bijections = bijections.saturating_mul(k);
        }
    }
    if bijections > ORACLE_MAX_BIJECTIONS {
        return Err(Error::OracleCap(format!(
            "{bijections} candidate bijections exceed the oracle cap of {ORACLE_MAX_BIJECTIONS}"
        )));
    }
    Ok(())
}

/// All sort-wise bijections from `source` onto `target` (sorts matched by
/// name), in canonical order. Empty when the domains are incompatible.
fn all_bijections(
    source: &SortedDomain,
    target: &SortedDomain,
) -> Result<Vec<MultiSortedPermutation>> {
    check_caps(source)?;
    if !source.compatible(target) {
        return Ok(Vec::new());
    }
    let per_sort: Vec<Vec<Vec<usize>>> = source
        .sorts()
        .iter()
        .map(|s| (0..s.size).permutations(s.size).collect())
        .collect();
    let mut out = Vec::new();
    for combo in per_sort.into_iter().multi_cartesian_product() {
        out.push(MultiSortedPermutation::from_images(source, target, combo)?);
    }
    if out.is_empty() {
        // multi_cartesian_product yields nothing for an empty factor list,
        // but a domain always has at least one sort in valid input; guard
        // against the degenerate zero-sort domain anyway.
        out.push(MultiSortedPermutation::from_images(source, target, Vec::new())?);
    }
    Ok(out)
}

/// Direct check that `p` carries every operation table of `a` onto the
/// same-named table of `b`, using table lookups only.
fn preserves_operations(a: &Algebra, b: &Algebra, p: &MultiSortedPermutation) -> bool {
    if !a.same_signature(b) {
        return false;
    }
    for src_op in &a.operations {
        let dst_op = b
            .operations
            .iter()
            .find(|o| o.name == src_op.name)
            .expect("signature match implies name match");
        let table: BTreeMap<&Vec<Element>, Element> =
            dst_op.entries.iter().map(|(args, result)| (args, *result)).collect();
        for (args, result) in &src_op.entries {
            let mapped_args: Vec<Element> = args.iter().map(|&e| p.apply(e)).collect();
            match table.get(&mapped_args) {
                Some(&expected) if expected == p.apply(*result) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Direct check that `p` maps every relation tuple set of `m1` into the
/// corresponding tuple set of `m2`.
fn preserves_relations(m1: &Model, m2: &Model, p: &MultiSortedPermutation) -> bool {
    for rel in &m1.relations {
        let image: HashSet<Vec<Element>> = m2
            .interpretation
            .relation_tuples(&rel.name)
            .iter()
            .cloned()
            .collect();
        for tuple in m1.interpretation.relation_tuples(&rel.name) {
            let mapped: Vec<Element> = tuple.iter().map(|&e| p.apply(e)).collect();
            if !image.contains(&mapped) {
                return false;
            }
        }
    }
    true
}

/// Exhaustive `Aut(f)`: every sort-wise bijection filtered by operation
/// preservation and then relation preservation.
pub fn oracle_model_automorphisms(model: &Model) -> Result<Vec<MultiSortedPermutation>> {
    Ok(all_bijections(model.domain(), model.domain())?
        .into_iter()
        .filter(|p| preserves_operations(&model.algebra, &model.algebra, p))
        .filter(|p| preserves_relations(model, model, p))
        .collect())
}

/// Exhaustive model-equivalence check: tries every sort-wise bijection as the
/// conjugating isomorphism and returns the least one that works.
pub fn oracle_model_equiv(m1: &Model, m2: &Model) -> Result<Option<MultiSortedPermutation>> {
    let aut1 = oracle_model_automorphisms(m1)?;
    let aut2 = oracle_model_automorphisms(m2)?;
    if aut1.len() != aut2.len() {
        return Ok(None);
    }
    let aut2_set: HashSet<&MultiSortedPermutation> = aut2.iter().collect();
    for mu in all_bijections(m1.domain(), m2.domain())? {
        if !preserves_operations(&m1.algebra, &m2.algebra, &mu) {
            continue;
        }
        let mu_inv = mu.inverse();
        let conjugated_matches = aut1.iter().all(|g| {
            let conj = mu
                .compose(&g.compose(&mu_inv).expect("same domain"))
                .expect("compatible domains");
            aut2_set.contains(&conj)
        });
        if conjugated_matches {
            return Ok(Some(mu));
        }
    }
    Ok(None)
}

/// Exhaustive multi-model equivalence: tries every bijection between the
/// interpretation index sets, requiring each matched pair to pass
/// [`oracle_model_equiv`]. Returns the pairing and one conjugator per pair.
#[allow(clippy::type_complexity)]
pub fn oracle_multimodel_equiv(
    mm1: &MultiModel,
    mm2: &MultiModel,
) -> Result<Option<(Vec<(usize, usize)>, Vec<MultiSortedPermutation>)>> {
    let n = mm1.interpretations.len();
    if mm2.interpretations.len() != n {
        return Ok(None);
    }
    if n > ORACLE_MAX_INTERPRETATIONS {
        return Err(Error::OracleCap(format!(
            "{n} interpretations exceed the oracle cap of {ORACLE_MAX_INTERPRETATIONS}"
        )));
    }
    let mut pair_cache: BTreeMap<(usize, usize), Option<MultiSortedPermutation>> = BTreeMap::new();
    for targets in (0..n).permutations(n) {
        let mut conjugators = Vec::with_capacity(n);
        let mut ok = true;
        for (i, &j) in targets.iter().enumerate() {
            let entry = match pair_cache.get(&(i, j)) {
                Some(cached) => cached.clone(),
                None => {
                    let result = oracle_model_equiv(&mm1.model_at(i), &mm2.model_at(j))?;
                    pair_cache.insert((i, j), result.clone());
                    result
                }
            };
            match entry {
                Some(mu) => conjugators.push(mu),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let pairing = targets.into_iter().enumerate().collect();
            return Ok(Some((pairing, conjugators)));
        }
    }
    Ok(None)
}
