//! Automorphic-equivalence decisions for algebras, models and multi-models,
//! with verifiable witnesses.
//!
//! * Algebras are equivalent when some set bijection conjugates one
//!   automorphism group onto the other (the operation signatures may differ).
//! * Models additionally require the conjugating bijection to be an algebra
//!   isomorphism.
//! * Multi-models are equivalent when the interpretation sets admit a
//!   bijection whose pairs are model-equivalent; decided by building the
//!   bipartite graph of equivalent pairs and extracting a perfect matching.
//!
//! All searches return the canonically least witness, so repeated runs are
//! bit-identical.

use std::fmt;
use std::ops::ControlFlow;

use crate::error::Result;
use crate::model::{Algebra, Model, MultiModel};
use crate::perm::{MultiSortedPermutation, PermGroup};
use crate::search::{
    self, is_algebra_isomorphism, NodeCounter, SearchBudget,
};

/// Witness for model equivalence: an algebra isomorphism conjugating the
/// first model's automorphism group onto the second's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelEquivWitness {
    pub conjugator: MultiSortedPermutation,
}

/// Witness for multi-model equivalence: a pairing of interpretation indices
/// (a bijection) plus one conjugating isomorphism per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiModelEquivWitness {
    pub pairing: Vec<(usize, usize)>,
    pub conjugators: Vec<MultiSortedPermutation>,
}

/// Whether each interpretation pair may use its own conjugating isomorphism
/// (the default reading) or one isomorphism must serve every pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuPolicy {
    #[default]
    PerPair,
    Shared,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraNonEquivalence {
    CardinalityMismatch,
    AutomorphismOrderMismatch { left: usize, right: usize },
    OrbitProfileMismatch,
    NoConjugatingBijection,
}

impl fmt::Display for AlgebraNonEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CardinalityMismatch => {
                write!(f, "the domains' sorts do not correspond by name and cardinality")
            }
            Self::AutomorphismOrderMismatch { left, right } => {
                write!(f, "automorphism group orders differ ({left} vs {right})")
            }
            Self::OrbitProfileMismatch => write!(f, "automorphism orbit profiles differ"),
            Self::NoConjugatingBijection => write!(f, "no conjugating bijection exists"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelNonEquivalence {
    AlgebrasNotIsomorphic,
    AutomorphismOrderMismatch { left: usize, right: usize },
    OrbitProfileMismatch,
    NoConjugatingIsomorphism,
}

impl fmt::Display for ModelNonEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlgebrasNotIsomorphic => write!(f, "the algebras are not isomorphic"),
            Self::AutomorphismOrderMismatch { left, right } => {
                write!(f, "automorphism group orders differ ({left} vs {right})")
            }
            Self::OrbitProfileMismatch => write!(f, "automorphism orbit profiles differ"),
            Self::NoConjugatingIsomorphism => write!(f, "no conjugating isomorphism exists"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultiModelNonEquivalence {
    AlgebrasNotIsomorphic,
    InterpretationCountMismatch { left: usize, right: usize },
    NoPerfectMatching,
    NoSharedConjugator,
}

impl fmt::Display for MultiModelNonEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlgebrasNotIsomorphic => write!(f, "the algebras are not isomorphic"),
            Self::InterpretationCountMismatch { left, right } => {
                write!(f, "interpretation counts differ ({left} vs {right})")
            }
            Self::NoPerfectMatching => {
                write!(f, "no perfect matching of equivalent interpretation pairs exists")
            }
            Self::NoSharedConjugator => {
                write!(f, "no single conjugating isomorphism works for every interpretation pair")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraDecision {
    Equivalent(MultiSortedPermutation),
    NotEquivalent(AlgebraNonEquivalence),
}

impl AlgebraDecision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent(_))
    }

    pub fn witness(&self) -> Option<&MultiSortedPermutation> {
        match self {
            Self::Equivalent(delta) => Some(delta),
            Self::NotEquivalent(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelDecision {
    Equivalent(ModelEquivWitness),
    NotEquivalent(ModelNonEquivalence),
}

impl ModelDecision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent(_))
    }

    pub fn witness(&self) -> Option<&ModelEquivWitness> {
        match self {
            Self::Equivalent(w) => Some(w),
            Self::NotEquivalent(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultiModelDecision {
    Equivalent(MultiModelEquivWitness),
    NotEquivalent(MultiModelNonEquivalence),
}

impl MultiModelDecision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent(_))
    }

    pub fn witness(&self) -> Option<&MultiModelEquivWitness> {
        match self {
            Self::Equivalent(w) => Some(w),
            Self::NotEquivalent(_) => None,
        }
    }
}

/// True when `mu` carries `g1` onto `g2`: both groups must have equal order
/// and every generator of `g1` must conjugate into `g2`.
fn conjugates_onto(
    g1: &PermGroup,
    g2: &PermGroup,
    mu: &MultiSortedPermutation,
) -> Result<bool> {
    if g1.order() != g2.order() {
        return Ok(false);
    }
    let mu_inv = mu.inverse();
    for g in g1.generators() {
        let conj = mu.compose(&g.compose(&mu_inv)?)?;
        if !g2.contains(&conj) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides automorphic equivalence of two algebras: is there a set bijection
/// conjugating `Aut(a)` onto `Aut(b)`? Returns the canonically least such
/// bijection. The operation signatures of the two algebras may differ.
pub fn decide_algebra_equivalence(
    a: &Algebra,
    b: &Algebra,
    budget: &SearchBudget,
) -> Result<AlgebraDecision> {
    let mut counter = NodeCounter::new(budget);
    if !a.domain.compatible(&b.domain) {
        return Ok(AlgebraDecision::NotEquivalent(AlgebraNonEquivalence::CardinalityMismatch));
    }
    let aut_a = search::algebra_automorphisms_counted(a, &mut counter)?;
    let aut_b = search::algebra_automorphisms_counted(b, &mut counter)?;
    if aut_a.order() != aut_b.order() {
        return Ok(AlgebraDecision::NotEquivalent(
            AlgebraNonEquivalence::AutomorphismOrderMismatch {
                left: aut_a.order(),
                right: aut_b.order(),
            },
        ));
    }
    if aut_a.orbit_profile() != aut_b.orbit_profile() {
        return Ok(AlgebraDecision::NotEquivalent(AlgebraNonEquivalence::OrbitProfileMismatch));
    }
    let mut found = None;
    search::visit_sortwise_bijections(&a.domain, &b.domain, &mut counter, &mut |delta| {
        if conjugates_onto(&aut_a, &aut_b, &delta)? {
            found = Some(delta);
            Ok(ControlFlow::Break(()))
        } else {
            Ok(ControlFlow::Continue(()))
        }
    })?;
    Ok(match found {
        Some(delta) => AlgebraDecision::Equivalent(delta),
        None => AlgebraDecision::NotEquivalent(AlgebraNonEquivalence::NoConjugatingBijection),
    })
}

/// Decides automorphic equivalence of two models: is there an algebra
/// isomorphism conjugating `Aut(f1)` onto `Aut(f2)`? Returns the canonically
/// least conjugator.
pub fn decide_model_equivalence(
    m1: &Model,
    m2: &Model,
    budget: &SearchBudget,
) -> Result<ModelDecision> {
    let mut counter = NodeCounter::new(budget);
    decide_model_equivalence_counted(m1, m2, &mut counter)
}

fn decide_model_equivalence_counted(
    m1: &Model,
    m2: &Model,
    counter: &mut NodeCounter,
) -> Result<ModelDecision> {
    let aut1 = search::model_automorphisms_counted(m1, counter)?;
    let aut2 = search::model_automorphisms_counted(m2, counter)?;
    Ok(match conjugator_search(&m1.algebra, &m2.algebra, &aut1, &aut2, counter)? {
        ConjugatorOutcome::Found(mu) => {
            ModelDecision::Equivalent(ModelEquivWitness { conjugator: mu })
        }
        ConjugatorOutcome::NoIsomorphisms => {
            ModelDecision::NotEquivalent(ModelNonEquivalence::AlgebrasNotIsomorphic)
        }
        ConjugatorOutcome::OrderMismatch { left, right } => {
            ModelDecision::NotEquivalent(ModelNonEquivalence::AutomorphismOrderMismatch { left, right })
        }
        ConjugatorOutcome::OrbitMismatch => {
            ModelDecision::NotEquivalent(ModelNonEquivalence::OrbitProfileMismatch)
        }
        ConjugatorOutcome::Exhausted => {
            ModelDecision::NotEquivalent(ModelNonEquivalence::NoConjugatingIsomorphism)
        }
    })
}

enum ConjugatorOutcome {
    Found(MultiSortedPermutation),
    NoIsomorphisms,
    OrderMismatch { left: usize, right: usize },
    OrbitMismatch,
    Exhausted,
}

/// Scans `Iso(a, b)` in canonical order for an isomorphism conjugating `g1`
/// onto `g2`, after the conjugation-invariant pre-filters.
fn conjugator_search(
    a: &Algebra,
    b: &Algebra,
    g1: &PermGroup,
    g2: &PermGroup,
    counter: &mut NodeCounter,
) -> Result<ConjugatorOutcome> {
    if g1.order() != g2.order() {
        return Ok(ConjugatorOutcome::OrderMismatch { left: g1.order(), right: g2.order() });
    }
    if g1.orbit_profile() != g2.orbit_profile() {
        return Ok(ConjugatorOutcome::OrbitMismatch);
    }
    let mut found = None;
    let mut candidates = 0usize;
    search::visit_algebra_isomorphisms(a, b, counter, &mut |mu| {
        candidates += 1;
        if conjugates_onto(g1, g2, &mu)? {
            found = Some(mu);
            Ok(ControlFlow::Break(()))
        } else {
            Ok(ControlFlow::Continue(()))
        }
    })?;
    Ok(match (found, candidates) {
        (Some(mu), _) => ConjugatorOutcome::Found(mu),
        (None, 0) => ConjugatorOutcome::NoIsomorphisms,
        (None, _) => ConjugatorOutcome::Exhausted,
    })
}

/// Decides automorphic equivalence of two multi-models:
///
/// 1. no algebra isomorphism at all means not equivalent;
/// 2. differing interpretation counts mean not equivalent;
/// 3. compute each interpretation's automorphism group;
/// 4. build the bipartite graph of model-equivalent pairs, caching the
///    conjugator found for each edge;
/// 5. a perfect matching yields the pairing and its per-pair conjugators.
pub fn decide_multimodel_equivalence(
    mm1: &MultiModel,
    mm2: &MultiModel,
    budget: &SearchBudget,
    policy: MuPolicy,
) -> Result<MultiModelDecision> {
    let mut counter = NodeCounter::new(budget);

    let mut any_iso = false;
    search::visit_algebra_isomorphisms(&mm1.algebra, &mm2.algebra, &mut counter, &mut |_| {
        any_iso = true;
        Ok(ControlFlow::Break(()))
    })?;
    if !any_iso {
        return Ok(MultiModelDecision::NotEquivalent(
            MultiModelNonEquivalence::AlgebrasNotIsomorphic,
        ));
    }

    let left = mm1.interpretations.len();
    let right = mm2.interpretations.len();
    if left != right {
        return Ok(MultiModelDecision::NotEquivalent(
            MultiModelNonEquivalence::InterpretationCountMismatch { left, right },
        ));
    }
    let n = left;

    let auts1: Vec<PermGroup> = (0..n)
        .map(|i| search::model_automorphisms_counted(&mm1.model_at(i), &mut counter))
        .collect::<Result<_>>()?;
    let auts2: Vec<PermGroup> = (0..n)
        .map(|j| search::model_automorphisms_counted(&mm2.model_at(j), &mut counter))
        .collect::<Result<_>>()?;

    match policy {
        MuPolicy::PerPair => {
            let mut edges = Vec::new();
            let mut cache = vec![vec![None; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let outcome = conjugator_search(
                        &mm1.algebra,
                        &mm2.algebra,
                        &auts1[i],
                        &auts2[j],
                        &mut counter,
                    )?;
                    if let ConjugatorOutcome::Found(mu) = outcome {
                        edges.push((i, j));
                        cache[i][j] = Some(mu);
                    }
                }
            }
            match bipartite_perfect_matching(n, &edges) {
                Some(pairing) => {
                    let conjugators = pairing
                        .iter()
                        .map(|&(i, j)| cache[i][j].clone().expect("matched edges carry a conjugator"))
                        .collect();
                    Ok(MultiModelDecision::Equivalent(MultiModelEquivWitness {
                        pairing,
                        conjugators,
                    }))
                }
                None => Ok(MultiModelDecision::NotEquivalent(
                    MultiModelNonEquivalence::NoPerfectMatching,
                )),
            }
        }
        MuPolicy::Shared => {
            let mut witness = None;
            search::visit_algebra_isomorphisms(
                &mm1.algebra,
                &mm2.algebra,
                &mut counter,
                &mut |mu| {
                    let mut edges = Vec::new();
                    for (i, left) in auts1.iter().enumerate() {
                        for (j, right) in auts2.iter().enumerate() {
                            if conjugates_onto(left, right, &mu)? {
                                edges.push((i, j));
                            }
                        }
                    }
                    if let Some(pairing) = bipartite_perfect_matching(n, &edges) {
                        let conjugators = vec![mu; pairing.len()];
                        witness = Some(MultiModelEquivWitness { pairing, conjugators });
                        Ok(ControlFlow::Break(()))
                    } else {
                        Ok(ControlFlow::Continue(()))
                    }
                },
            )?;
            Ok(match witness {
                Some(w) => MultiModelDecision::Equivalent(w),
                None => MultiModelDecision::NotEquivalent(
                    MultiModelNonEquivalence::NoSharedConjugator,
                ),
            })
        }
    }
}

/// Perfect matching in a bipartite graph with `n` vertices on each side,
/// found by augmenting paths in lowest-index order (deterministic). Panics
/// if an edge index is out of range.
pub fn bipartite_perfect_matching(n: usize, edges: &[(usize, usize)]) -> Option<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        assert!(u < n && v < n, "matching endpoint out of range");
        adj[u].push(v);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        matched_left: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if matched_left[v].is_none()
                || augment(matched_left[v].unwrap(), adj, seen, matched_left)
            {
                matched_left[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut matched_left: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, &adj, &mut seen, &mut matched_left) {
            return None;
        }
    }
    let mut pairs: Vec<(usize, usize)> = matched_left
        .iter()
        .enumerate()
        .map(|(v, u)| (u.expect("perfect matching saturates the right side"), v))
        .collect();
    pairs.sort_unstable();
    Some(pairs)
}

/// Rechecks an algebra-equivalence witness from scratch: the conjugated
/// group must equal the second algebra's automorphism group.
pub fn verify_algebra_witness(
    a: &Algebra,
    b: &Algebra,
    delta: &MultiSortedPermutation,
    budget: &SearchBudget,
) -> Result<bool> {
    if *delta.source() != a.domain || *delta.target() != b.domain {
        return Ok(false);
    }
    let mut counter = NodeCounter::new(budget);
    let aut_a = search::algebra_automorphisms_counted(a, &mut counter)?;
    let aut_b = search::algebra_automorphisms_counted(b, &mut counter)?;
    aut_a.conjugate(delta)?.equal(&aut_b)
}

/// Rechecks a model-equivalence witness: the conjugator must be an algebra
/// isomorphism and must carry `Aut(f1)` exactly onto `Aut(f2)`. The final
/// equality is computed with group primitives only, independent of how the
/// witness was found.
pub fn verify_model_witness(
    m1: &Model,
    m2: &Model,
    witness: &ModelEquivWitness,
    budget: &SearchBudget,
) -> Result<bool> {
    let mu = &witness.conjugator;
    if *mu.source() != *m1.domain() || *mu.target() != *m2.domain() {
        return Ok(false);
    }
    if !is_algebra_isomorphism(&m1.algebra, &m2.algebra, mu)? {
        return Ok(false);
    }
    let mut counter = NodeCounter::new(budget);
    let aut1 = search::model_automorphisms_counted(m1, &mut counter)?;
    let aut2 = search::model_automorphisms_counted(m2, &mut counter)?;
    aut1.conjugate(mu)?.equal(&aut2)
}

/// Rechecks a multi-model witness: the pairing must be a bijection on the
/// interpretation indices and every pair must pass the model recheck with its
/// conjugator.
pub fn verify_multimodel_witness(
    mm1: &MultiModel,
    mm2: &MultiModel,
    witness: &MultiModelEquivWitness,
    budget: &SearchBudget,
) -> Result<bool> {
    let n = mm1.interpretations.len();
    if mm2.interpretations.len() != n
        || witness.pairing.len() != n
        || witness.conjugators.len() != n
    {
        return Ok(false);
    }
    let mut seen_left = vec![false; n];
    let mut seen_right = vec![false; n];
    for &(i, j) in &witness.pairing {
        if i >= n || j >= n || seen_left[i] || seen_right[j] {
            return Ok(false);
        }
        seen_left[i] = true;
        seen_right[j] = true;
    }
    for (&(i, j), mu) in witness.pairing.iter().zip(&witness.conjugators) {
        let ok = verify_model_witness(
            &mm1.model_at(i),
            &mm2.model_at(j),
            &ModelEquivWitness { conjugator: mu.clone() },
            budget,
        )?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
