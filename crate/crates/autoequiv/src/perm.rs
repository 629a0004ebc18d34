//! Multi-sorted permutations and fully materialized permutation groups.
//!
//! A [`MultiSortedPermutation`] is a family of per-sort bijections between two
//! domains whose sorts correspond by name. Groups are kept as explicit element
//! sets in canonical order (lexicographic on the concatenated per-sort image
//! arrays), which makes membership, equality and conjugation direct.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Element, SortId, SortedDomain};

/// Default cap on materialized group size.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// A sort-wise bijection between two domains. For automorphisms the source
/// and target coincide; for cross-domain bijections the sorts are matched by
/// name (cardinalities must agree).
///
/// Field order matters: derived ordering compares image arrays first, which
/// is the canonical order used for all deterministic enumeration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiSortedPermutation {
    images: Vec<Vec<usize>>,
    source: Arc<SortedDomain>,
    target: Arc<SortedDomain>,
}

impl MultiSortedPermutation {
    /// The identity on `domain`.
    pub fn identity(domain: &SortedDomain) -> Self {
        let arc = Arc::new(domain.clone());
        Self {
            images: domain.sorts().iter().map(|s| (0..s.size).collect()).collect(),
            source: arc.clone(),
            target: arc,
        }
    }

    /// Build from per-source-sort image arrays. `images[i][k]` is the index,
    /// within the target sort named like source sort `i`, of the image of
    /// element `(i, k)`.
    pub fn from_images(
        source: &SortedDomain,
        target: &SortedDomain,
        images: Vec<Vec<usize>>,
    ) -> Result<Self> {
        Self::from_images_arc(Arc::new(source.clone()), Arc::new(target.clone()), images)
    }

    pub(crate) fn from_images_arc(
        source: Arc<SortedDomain>,
        target: Arc<SortedDomain>,
        images: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if !source.compatible(&target) {
            return Err(Error::DomainMismatch(
                "source and target domains do not share sort names and cardinalities".into(),
            ));
        }
        if images.len() != source.sort_count() {
            return Err(Error::DomainMismatch(format!(
                "{} image arrays for {} sorts",
                images.len(),
                source.sort_count()
            )));
        }
        for (i, arr) in images.iter().enumerate() {
            let card = source.cardinality(i).unwrap();
            if arr.len() != card {
                return Err(Error::DomainMismatch(format!(
                    "sort {:?}: image array length {} != cardinality {card}",
                    source.sorts()[i].name,
                    arr.len()
                )));
            }
            let mut seen = vec![false; card];
            for &v in arr {
                if v >= card || seen[v] {
                    return Err(Error::DomainMismatch(format!(
                        "sort {:?}: image array {:?} is not a bijection",
                        source.sorts()[i].name,
                        arr
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(Self { images, source, target })
    }

    /// Build a single-sorted permutation from one image array.
    pub fn single(domain: &SortedDomain, images: Vec<usize>) -> Result<Self> {
        Self::from_images(domain, domain, vec![images])
    }

    pub fn source(&self) -> &SortedDomain {
        &self.source
    }

    pub fn target(&self) -> &SortedDomain {
        &self.target
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.images.iter().all(|arr| arr.iter().enumerate().all(|(k, &v)| k == v))
    }

    /// Target sort id corresponding to each source sort (matched by name).
    pub(crate) fn sort_map(&self) -> Vec<SortId> {
        self.source
            .sorts()
            .iter()
            .map(|s| self.target.sort_index(&s.name).expect("checked on construction"))
            .collect()
    }

    pub fn apply(&self, e: Element) -> Element {
        let target_sort = self.target.sort_index(&self.source.sorts()[e.sort].name).unwrap();
        Element { sort: target_sort, index: self.images[e.sort][e.index] }
    }

    pub fn apply_tuple(&self, tuple: &[Element]) -> Vec<Element> {
        tuple.iter().map(|&e| self.apply(e)).collect()
    }

    /// `self ∘ other`: apply `other` first. Requires `other`'s target domain
    /// to equal `self`'s source domain.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if *self.source != *other.target {
            return Err(Error::DomainMismatch(
                "composition requires the inner target to equal the outer source".into(),
            ));
        }
        let other_map = other.sort_map();
        let images = other
            .images
            .iter()
            .enumerate()
            .map(|(i, arr)| {
                let mid = other_map[i];
                arr.iter().map(|&v| self.images[mid][v]).collect()
            })
            .collect();
        Ok(Self { images, source: other.source.clone(), target: self.target.clone() })
    }

    pub fn inverse(&self) -> Self {
        let map = self.sort_map();
        let mut images: Vec<Vec<usize>> =
            self.target.sorts().iter().map(|s| vec![0; s.size]).collect();
        for (i, arr) in self.images.iter().enumerate() {
            let j = map[i];
            for (k, &v) in arr.iter().enumerate() {
                images[j][v] = k;
            }
        }
        Self { images, source: self.target.clone(), target: self.source.clone() }
    }

    /// Disjoint-cycle notation, one clause per sort with non-trivial action,
    /// joined by `;`. The identity renders as `id`.
    pub fn cycle_notation(&self) -> String {
        let mut clauses = Vec::new();
        for (i, arr) in self.images.iter().enumerate() {
            let mut cycles = String::new();
            let mut seen = vec![false; arr.len()];
            for start in 0..arr.len() {
                if seen[start] || arr[start] == start {
                    seen[start] = true;
                    continue;
                }
                let mut cycle = vec![start];
                seen[start] = true;
                let mut next = arr[start];
                while next != start {
                    seen[next] = true;
                    cycle.push(next);
                    next = arr[next];
                }
                let body: Vec<String> = cycle.iter().map(usize::to_string).collect();
                cycles.push('(');
                cycles.push_str(&body.join(" "));
                cycles.push(')');
            }
            if !cycles.is_empty() {
                clauses.push(format!("{}:{}", self.source.sorts()[i].name, cycles));
            }
        }
        if clauses.is_empty() {
            "id".into()
        } else {
            clauses.join(";")
        }
    }
}

impl fmt::Display for MultiSortedPermutation {
    /// Per-sort image arrays, e.g. `V:[3,0,1,2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, arr)| {
                let body: Vec<String> = arr.iter().map(usize::to_string).collect();
                format!("{}:[{}]", self.source.sorts()[i].name, body.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A permutation group over one domain, fully materialized.
#[derive(Debug, Clone)]
pub struct PermGroup {
    domain: Arc<SortedDomain>,
    generators: Vec<MultiSortedPermutation>,
    elements: Vec<MultiSortedPermutation>,
    index: HashSet<Vec<Vec<usize>>>,
}

impl PermGroup {
    /// The trivial group.
    pub fn trivial(domain: &SortedDomain) -> Self {
        Self::closure(domain, &[], DEFAULT_CLOSURE_CAP).expect("identity fits any cap")
    }

    /// Smallest group containing all `generators`, materialized breadth-first
    /// and stored in canonical order. Fails if the group would exceed `cap`.
    pub fn closure(
        domain: &SortedDomain,
        generators: &[MultiSortedPermutation],
        cap: usize,
    ) -> Result<Self> {
        for g in generators {
            if *g.source() != *domain || *g.target() != *domain {
                return Err(Error::DomainMismatch(
                    "closure generators must act on the given domain".into(),
                ));
            }
        }
        if cap == 0 {
            return Err(Error::ClosureCapExceeded { cap });
        }
        let identity = MultiSortedPermutation::identity(domain);
        let mut index = HashSet::new();
        index.insert(identity.images.clone());
        let mut elements = vec![identity];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(at) = queue.pop_front() {
            for g in generators {
                let product = elements[at].compose(g)?;
                if index.insert(product.images.clone()) {
                    if elements.len() == cap {
                        return Err(Error::ClosureCapExceeded { cap });
                    }
                    elements.push(product);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        elements.sort();
        Ok(Self {
            domain: Arc::new(domain.clone()),
            generators: generators.to_vec(),
            elements,
            index,
        })
    }

    /// Wrap a set already known to be closed (e.g. a full automorphism set
    /// produced by search). Elements are sorted and a small generating set is
    /// chosen greedily in canonical order, so the result is deterministic.
    ///
    /// Panics if `elements` is not closed under composition.
    pub fn from_elements(domain: &SortedDomain, mut elements: Vec<MultiSortedPermutation>) -> Self {
        elements.sort();
        elements.dedup();
        assert!(!elements.is_empty(), "a group contains at least the identity");
        let index: HashSet<Vec<Vec<usize>>> =
            elements.iter().map(|p| p.images.clone()).collect();
        let mut generators: Vec<MultiSortedPermutation> = Vec::new();
        let mut generated: HashSet<Vec<Vec<usize>>> =
            [MultiSortedPermutation::identity(domain).images.clone()].into();
        for e in &elements {
            if generated.contains(&e.images) {
                continue;
            }
            generators.push(e.clone());
            let sub = Self::closure(domain, &generators, elements.len())
                .expect("subgroup of a closed set stays within its size");
            generated = sub.index;
            if generated.len() == elements.len() {
                break;
            }
        }
        assert_eq!(
            generated.len(),
            elements.len(),
            "element set is not closed under composition"
        );
        Self { domain: Arc::new(domain.clone()), generators, elements, index }
    }

    pub fn domain(&self) -> &SortedDomain {
        &self.domain
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MultiSortedPermutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[MultiSortedPermutation] {
        &self.generators
    }

    pub fn contains(&self, p: &MultiSortedPermutation) -> bool {
        *p.source() == *self.domain && *p.target() == *self.domain && self.index.contains(&p.images)
    }

    /// `{ mu g mu^-1 : g in self }` as a group over `mu`'s target domain.
    /// The i-th output element is the conjugate of the i-th input element.
    pub fn conjugate(&self, mu: &MultiSortedPermutation) -> Result<Self> {
        if *mu.source() != *self.domain {
            return Err(Error::DomainMismatch(
                "conjugating bijection must start at the group's domain".into(),
            ));
        }
        let mu_inv = mu.inverse();
        let conj = |g: &MultiSortedPermutation| -> Result<MultiSortedPermutation> {
            mu.compose(&g.compose(&mu_inv)?)
        };
        let elements: Vec<_> = self.elements.iter().map(conj).collect::<Result<_>>()?;
        let generators: Vec<_> = self.generators.iter().map(conj).collect::<Result<_>>()?;
        let index = elements.iter().map(|p: &MultiSortedPermutation| p.images.clone()).collect();
        Ok(Self {
            domain: Arc::new(mu.target().clone()),
            generators,
            elements,
            index,
        })
    }

    /// Set equality of two groups over the same domain: size equality plus
    /// generator membership both ways (sufficient since both sides are closed).
    pub fn equal(&self, other: &Self) -> Result<bool> {
        if *self.domain != *other.domain {
            return Err(Error::DomainMismatch("group comparison requires one domain".into()));
        }
        if self.order() != other.order() {
            return Ok(false);
        }
        Ok(self.generators.iter().all(|g| other.index.contains(&g.images))
            && other.generators.iter().all(|g| self.index.contains(&g.images)))
    }

    /// Per-sort multisets of orbit sizes, keyed by sort name. Conjugation
    /// invariant, used as a pre-filter before conjugator searches.
    pub fn orbit_profile(&self) -> Vec<(String, Vec<usize>)> {
        let mut profile = Vec::new();
        for (i, sort) in self.domain.sorts().iter().enumerate() {
            let mut parent: Vec<usize> = (0..sort.size).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let root = find(parent, parent[x]);
                    parent[x] = root;
                }
                parent[x]
            }
            for g in &self.elements {
                for (k, &v) in g.images[i].iter().enumerate() {
                    let a = find(&mut parent, k);
                    let b = find(&mut parent, v);
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
            let mut sizes = vec![0usize; sort.size];
            for k in 0..sort.size {
                sizes[find(&mut parent, k)] += 1;
            }
            let mut sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
            sizes.sort();
            profile.push((sort.name.clone(), sizes));
        }
        profile.sort();
        profile
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(n: usize) -> SortedDomain {
        SortedDomain::single("V", n)
    }

    fn perm(n: usize, images: Vec<usize>) -> MultiSortedPermutation {
        MultiSortedPermutation::single(&dom(n), images).unwrap()
    }

    #[test]
    fn transposition_composed_with_itself_is_identity() {
        let p = perm(3, vec![1, 0, 2]);
        assert!(p.compose(&p).unwrap().is_identity());
    }

    #[test]
    fn compose_is_apply_right_then_left() {
        // (0 1) after (1 2) sends 0->1, 1->2, 2->0.
        let p = perm(3, vec![1, 0, 2]);
        let q = perm(3, vec![0, 2, 1]);
        assert_eq!(p.compose(&q).unwrap().images(), &[vec![1, 2, 0]]);
    }

    #[test]
    fn identity_is_neutral() {
        let p = perm(4, vec![2, 0, 3, 1]);
        let id = MultiSortedPermutation::identity(&dom(4));
        assert_eq!(id.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&id).unwrap(), p);
    }

    #[test]
    fn inverse_examples() {
        assert!(MultiSortedPermutation::identity(&dom(3)).inverse().is_identity());
        let t = perm(3, vec![1, 0, 2]);
        assert_eq!(t.inverse(), t);
        let cycle = perm(3, vec![1, 2, 0]);
        assert_eq!(cycle.inverse().images(), &[vec![2, 0, 1]]);
        assert!(cycle.compose(&cycle.inverse()).unwrap().is_identity());
    }

    #[test]
    fn closure_orders() {
        let d = dom(3);
        assert_eq!(PermGroup::closure(&d, &[], 10).unwrap().order(), 1);

        let t01 = perm(3, vec![1, 0, 2]);
        assert_eq!(PermGroup::closure(&d, std::slice::from_ref(&t01), 10).unwrap().order(), 2);

        let t12 = perm(3, vec![0, 2, 1]);
        let sym = PermGroup::closure(&d, &[t01, t12], 10).unwrap();
        assert_eq!(sym.order(), 6);
    }

    #[test]
    fn closure_cap_is_enforced() {
        let d = dom(3);
        let gens = [perm(3, vec![1, 0, 2]), perm(3, vec![0, 2, 1])];
        match PermGroup::closure(&d, &gens, 4) {
            Err(Error::ClosureCapExceeded { cap: 4 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_by_identity_is_same_group() {
        let d = dom(4);
        let g = PermGroup::closure(&d, &[perm(4, vec![0, 2, 1, 3])], 100).unwrap();
        let conj = g.conjugate(&MultiSortedPermutation::identity(&d)).unwrap();
        assert!(g.equal(&conj).unwrap());
        assert_eq!(g.elements(), conj.elements());
    }

    #[test]
    fn conjugating_point_stabilizer_moves_the_fixed_point() {
        // Permutations of {1,2,3} fixing 0, conjugated by the swap of 0 and 3,
        // become the permutations of {0,1,2} fixing 3.
        let d = dom(4);
        let stab0 = PermGroup::closure(
            &d,
            &[perm(4, vec![0, 2, 1, 3]), perm(4, vec![0, 1, 3, 2])],
            100,
        )
        .unwrap();
        assert_eq!(stab0.order(), 6);
        let mu = perm(4, vec![3, 1, 2, 0]);
        let conj = stab0.conjugate(&mu).unwrap();
        let stab3 = PermGroup::closure(
            &d,
            &[perm(4, vec![1, 0, 2, 3]), perm(4, vec![0, 2, 1, 3])],
            100,
        )
        .unwrap();
        assert_eq!(conj.order(), 6);
        assert!(conj.equal(&stab3).unwrap());
        for e in conj.elements() {
            assert_eq!(e.images()[0][3], 3);
        }
    }

    #[test]
    fn group_equality_examples() {
        let d = dom(3);
        let t01 = perm(3, vec![1, 0, 2]);
        let t12 = perm(3, vec![0, 2, 1]);
        let cyc = perm(3, vec![1, 2, 0]);
        let g = PermGroup::closure(&d, &[t01.clone(), t12.clone()], 10).unwrap();
        assert!(g.equal(&g).unwrap());

        let small = PermGroup::closure(&d, std::slice::from_ref(&t01), 10).unwrap();
        assert!(!g.equal(&small).unwrap());

        let h = PermGroup::closure(&d, &[cyc, t01], 10).unwrap();
        assert!(g.equal(&h).unwrap());
    }

    #[test]
    fn from_elements_recovers_group() {
        let d = dom(3);
        let sym = PermGroup::closure(&d, &[perm(3, vec![1, 0, 2]), perm(3, vec![0, 2, 1])], 10).unwrap();
        let rebuilt = PermGroup::from_elements(&d, sym.elements().to_vec());
        assert!(sym.equal(&rebuilt).unwrap());
        assert!(rebuilt.generators().len() <= 2);
    }

    #[test]
    fn cycle_notation_round_trips_visually() {
        let p = perm(4, vec![1, 0, 3, 2]);
        assert_eq!(p.cycle_notation(), "V:(0 1)(2 3)");
        assert!(MultiSortedPermutation::identity(&dom(4)).cycle_notation() == "id");
        assert_eq!(p.to_string(), "V:[1,0,3,2]");
    }

    #[test]
    fn cross_domain_conjugation_matches_sorts_by_name() {
        let a = SortedDomain::new([("x", 2), ("y", 3)]);
        let b = SortedDomain::new([("y", 3), ("x", 2)]);
        let mu = MultiSortedPermutation::from_images(&a, &b, vec![vec![1, 0], vec![0, 1, 2]]).unwrap();
        let g = PermGroup::closure(
            &a,
            &[MultiSortedPermutation::from_images(&a, &a, vec![vec![0, 1], vec![1, 0, 2]]).unwrap()],
            10,
        )
        .unwrap();
        let conj = g.conjugate(&mu).unwrap();
        assert_eq!(conj.order(), g.order());
        assert_eq!(conj.domain(), &b);
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = MultiSortedPermutation> {
        Just((0..n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(move |images| perm(n, images))
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(gens in proptest::collection::vec(arb_perm(4), 0..3)) {
            let d = dom(4);
            let g = PermGroup::closure(&d, &gens, 1000).unwrap();
            let again = PermGroup::closure(&d, g.elements(), 1000).unwrap();
            prop_assert_eq!(g.elements(), again.elements());
        }

        #[test]
        fn conjugation_round_trips(gens in proptest::collection::vec(arb_perm(4), 0..3), mu in arb_perm(4)) {
            let d = dom(4);
            let g = PermGroup::closure(&d, &gens, 1000).unwrap();
            let back = g.conjugate(&mu).unwrap().conjugate(&mu.inverse()).unwrap();
            prop_assert_eq!(g.elements(), back.elements());
            prop_assert_eq!(g.conjugate(&mu).unwrap().order(), g.order());
        }

        #[test]
        fn lagrange_divisibility(gens in proptest::collection::vec(arb_perm(4), 0..3)) {
            let d = dom(4);
            let g = PermGroup::closure(&d, &gens, 1000).unwrap();
            prop_assert_eq!(24 % g.order(), 0);
        }

        #[test]
        fn composition_is_associative(p in arb_perm(4), q in arb_perm(4), r in arb_perm(4)) {
            let left = p.compose(&q).unwrap().compose(&r).unwrap();
            let right = p.compose(&q.compose(&r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
