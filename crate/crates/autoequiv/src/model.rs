//! Finite multi-sorted domains, algebras, relational models and multi-models.
//!
//! These are plain data types: constructors do not enforce invariants, so a
//! decoded file can be held in memory whatever its content. [`Model::validate`]
//! and [`MultiModel::validate`] report every invariant violation as data; the
//! search and equivalence modules require validated input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a sort within a [`SortedDomain`].
pub type SortId = usize;

/// One sort of a domain: a name and a finite cardinality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort {
    pub name: String,
    pub size: usize,
}

/// A finite multi-sorted carrier set. Single-sorted domains are the
/// one-element special case of the sort list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortedDomain {
    sorts: Vec<Sort>,
}

impl SortedDomain {
    pub fn new<S: Into<String>>(sorts: impl IntoIterator<Item = (S, usize)>) -> Self {
        Self {
            sorts: sorts
                .into_iter()
                .map(|(name, size)| Sort { name: name.into(), size })
                .collect(),
        }
    }

    /// A domain with a single sort.
    pub fn single(name: impl Into<String>, size: usize) -> Self {
        Self::new([(name.into(), size)])
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn cardinality(&self, sort: SortId) -> Option<usize> {
        self.sorts.get(sort).map(|s| s.size)
    }

    pub fn sort_index(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s.name == name)
    }

    /// Total number of elements across all sorts.
    pub fn element_count(&self) -> usize {
        self.sorts.iter().map(|s| s.size).sum()
    }

    /// All elements in canonical order: sort 0 first, indices ascending.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.sorts
            .iter()
            .enumerate()
            .flat_map(|(sort, s)| (0..s.size).map(move |index| Element { sort, index }))
    }

    /// True when `other` has the same sort names (as a set) with equal
    /// cardinalities. Sort order may differ; correspondence is by name.
    pub fn compatible(&self, other: &SortedDomain) -> bool {
        if self.sorts.len() != other.sorts.len() {
            return false;
        }
        self.sorts.iter().all(|s| {
            other
                .sort_index(&s.name)
                .map(|j| other.sorts[j].size == s.size)
                .unwrap_or(false)
        })
    }
}

/// An element of a domain, addressed as (sort, 0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub sort: SortId,
    pub index: usize,
}

impl Element {
    pub fn new(sort: SortId, index: usize) -> Self {
        Self { sort, index }
    }
}

/// A finitary operation given by its full table. `arg_sorts` may be empty
/// (constants). The entry list is the decoded form; totality and
/// well-sortedness are checked by validation, not on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationTable {
    pub name: String,
    pub arg_sorts: Vec<SortId>,
    pub result_sort: SortId,
    pub entries: Vec<(Vec<Element>, Element)>,
}

impl OperationTable {
    /// Build a total table by evaluating `f` on every argument tuple.
    /// Panics if a sort id is out of range for `domain`.
    pub fn from_fn(
        name: impl Into<String>,
        domain: &SortedDomain,
        arg_sorts: Vec<SortId>,
        result_sort: SortId,
        mut f: impl FnMut(&[Element]) -> Element,
    ) -> Self {
        let dims: Vec<usize> = arg_sorts
            .iter()
            .map(|&s| domain.cardinality(s).expect("arg sort out of range"))
            .collect();
        assert!(domain.cardinality(result_sort).is_some(), "result sort out of range");
        let mut entries = Vec::new();
        for combo in cartesian_indices(&dims) {
            let args: Vec<Element> = combo
                .iter()
                .zip(&arg_sorts)
                .map(|(&index, &sort)| Element { sort, index })
                .collect();
            let result = f(&args);
            entries.push((args, result));
        }
        Self { name: name.into(), arg_sorts, result_sort, entries }
    }
}

/// A data domain together with its operations. The "same variety" test used
/// throughout the crate is signature equality: operation names with matching
/// argument and result sort names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    pub domain: SortedDomain,
    pub operations: Vec<OperationTable>,
}

impl Algebra {
    pub fn new(domain: SortedDomain, operations: Vec<OperationTable>) -> Self {
        Self { domain, operations }
    }

    /// Operation signatures keyed by name, with sorts spelled as names so they
    /// can be compared across domains with different sort ordering.
    pub fn signature(&self) -> BTreeMap<&str, (Vec<&str>, &str)> {
        self.operations
            .iter()
            .filter_map(|op| {
                let args: Option<Vec<&str>> = op
                    .arg_sorts
                    .iter()
                    .map(|&s| self.domain.sorts().get(s).map(|x| x.name.as_str()))
                    .collect();
                let result = self.domain.sorts().get(op.result_sort).map(|x| x.name.as_str());
                Some((op.name.as_str(), (args?, result?)))
            })
            .collect()
    }

    /// True when both algebras expose the same operation names with the same
    /// argument/result sort names.
    pub fn same_signature(&self, other: &Algebra) -> bool {
        self.signature() == other.signature()
    }
}

/// A relation symbol: a name and the list of sorts of its argument positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSymbol {
    pub name: String,
    pub signature: Vec<SortId>,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, signature: Vec<SortId>) -> Self {
        Self { name: name.into(), signature }
    }
}

/// One state of a model: a named assignment of a tuple set to every relation
/// symbol. Tuple lists are kept in decoded order until [`MultiModel::canonicalize`]
/// sorts them; validation rejects duplicates rather than deduplicating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub label: String,
    pub tuples: BTreeMap<String, Vec<Vec<Element>>>,
}

impl Interpretation {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into(), tuples: BTreeMap::new() }
    }

    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        tuples: impl IntoIterator<Item = Vec<Element>>,
    ) -> Self {
        self.tuples.insert(name.into(), tuples.into_iter().collect());
        self
    }

    /// Tuples of one relation; empty slice when the key is absent.
    pub fn relation_tuples(&self, name: &str) -> &[Vec<Element>] {
        self.tuples.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn canonicalize(&mut self) {
        for tuples in self.tuples.values_mut() {
            tuples.sort();
        }
    }
}

/// A model: an algebra, relation symbols, and one interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub algebra: Algebra,
    pub relations: Vec<RelationSymbol>,
    pub interpretation: Interpretation,
}

impl Model {
    pub fn new(algebra: Algebra, relations: Vec<RelationSymbol>, interpretation: Interpretation) -> Self {
        Self { algebra, relations, interpretation }
    }

    pub fn domain(&self) -> &SortedDomain {
        &self.algebra.domain
    }

    /// Reports every invariant violation; an empty report means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        validate_domain(self.domain(), &mut report);
        validate_operations(&self.algebra, &mut report);
        validate_relations(self.domain(), &self.relations, &mut report);
        validate_interpretation(
            self.domain(),
            &self.relations,
            &self.interpretation,
            "interpretation",
            &mut report,
        );
        report
    }

    pub fn to_multimodel(&self) -> MultiModel {
        MultiModel {
            algebra: self.algebra.clone(),
            relations: self.relations.clone(),
            interpretations: vec![self.interpretation.clone()],
        }
    }
}

/// A multi-model: an algebra, relation symbols, and an ordered list of
/// interpretations with unique labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiModel {
    pub algebra: Algebra,
    pub relations: Vec<RelationSymbol>,
    pub interpretations: Vec<Interpretation>,
}

impl MultiModel {
    pub fn new(
        algebra: Algebra,
        relations: Vec<RelationSymbol>,
        interpretations: Vec<Interpretation>,
    ) -> Self {
        Self { algebra, relations, interpretations }
    }

    pub fn domain(&self) -> &SortedDomain {
        &self.algebra.domain
    }

    /// The model whose interpretation is the `index`-th state.
    pub fn model_at(&self, index: usize) -> Model {
        Model {
            algebra: self.algebra.clone(),
            relations: self.relations.clone(),
            interpretation: self.interpretations[index].clone(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        validate_domain(self.domain(), &mut report);
        validate_operations(&self.algebra, &mut report);
        validate_relations(self.domain(), &self.relations, &mut report);
        if self.interpretations.is_empty() {
            report.push(Violation::new("interpretations", "at least one interpretation is required"));
        }
        let mut labels = BTreeSet::new();
        for (i, interp) in self.interpretations.iter().enumerate() {
            if !labels.insert(interp.label.as_str()) {
                report.push(Violation::new(
                    format!("interpretations[{i}].label"),
                    format!("duplicate label {:?}", interp.label),
                ));
            }
            validate_interpretation(
                self.domain(),
                &self.relations,
                interp,
                &format!("interpretations[{i}]"),
                &mut report,
            );
        }
        report
    }

    /// Sorts every tuple list. Validated multi-models are canonicalized on
    /// load so that downstream output is deterministic.
    pub fn canonicalize(&mut self) {
        for interp in &mut self.interpretations {
            interp.canonicalize();
        }
    }
}

/// One invariant violation, addressed by a path into the offending value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Size of the ambient Cartesian tuple space of a relation: the product of
/// the cardinalities of its signature sorts.
pub fn tuple_space_size(relation: &RelationSymbol, domain: &SortedDomain) -> Result<usize> {
    let mut size: usize = 1;
    for (pos, &sort) in relation.signature.iter().enumerate() {
        let card = domain.cardinality(sort).ok_or_else(|| {
            Error::Signature(format!(
                "relation {:?} position {pos} refers to unknown sort index {sort}",
                relation.name
            ))
        })?;
        size = size.checked_mul(card).ok_or_else(|| {
            Error::Signature(format!("tuple space of relation {:?} overflows", relation.name))
        })?;
    }
    Ok(size)
}

/// Iterate all index tuples of the given per-position dimensions in
/// lexicographic order (first position most significant). An empty dimension
/// list yields exactly one empty tuple.
pub fn cartesian_indices(dims: &[usize]) -> CartesianIndices {
    CartesianIndices {
        dims: dims.to_vec(),
        next: if dims.contains(&0) { None } else { Some(vec![0; dims.len()]) },
    }
}

pub struct CartesianIndices {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for CartesianIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        let mut bumped = current.clone();
        let mut pos = self.dims.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            bumped[pos] += 1;
            if bumped[pos] < self.dims[pos] {
                self.next = Some(bumped);
                break;
            }
            bumped[pos] = 0;
        }
        Some(current)
    }
}

fn validate_domain(domain: &SortedDomain, report: &mut Vec<Violation>) {
    let mut seen = BTreeSet::new();
    for (i, sort) in domain.sorts().iter().enumerate() {
        if sort.name.is_empty() {
            report.push(Violation::new(format!("domain.sorts[{i}]"), "sort name is empty"));
        }
        if !seen.insert(sort.name.as_str()) {
            report.push(Violation::new(
                format!("domain.sorts[{i}]"),
                format!("duplicate sort name {:?}", sort.name),
            ));
        }
        if sort.size == 0 {
            report.push(Violation::new(
                format!("domain.sorts[{i}]"),
                format!("sort {:?} must have cardinality >= 1", sort.name),
            ));
        }
    }
}

fn element_in_sort(domain: &SortedDomain, e: Element, sort: SortId) -> bool {
    e.sort == sort && domain.cardinality(sort).map(|c| e.index < c).unwrap_or(false)
}

fn validate_operations(algebra: &Algebra, report: &mut Vec<Violation>) {
    let domain = &algebra.domain;
    let mut names = BTreeSet::new();
    for (i, op) in algebra.operations.iter().enumerate() {
        let path = format!("operations[{i}]");
        if !names.insert(op.name.as_str()) {
            report.push(Violation::new(&path, format!("duplicate operation name {:?}", op.name)));
        }
        let mut sig_ok = true;
        for (pos, &s) in op.arg_sorts.iter().enumerate() {
            if domain.cardinality(s).is_none() {
                report.push(Violation::new(
                    format!("{path}.signature[{pos}]"),
                    format!("unknown sort index {s}"),
                ));
                sig_ok = false;
            }
        }
        if domain.cardinality(op.result_sort).is_none() {
            report.push(Violation::new(
                format!("{path}.signature"),
                format!("unknown result sort index {}", op.result_sort),
            ));
            sig_ok = false;
        }
        if !sig_ok {
            continue;
        }
        let expected: usize = op
            .arg_sorts
            .iter()
            .map(|&s| domain.cardinality(s).unwrap())
            .product();
        let mut seen_args = BTreeSet::new();
        for (r, (args, result)) in op.entries.iter().enumerate() {
            let row_path = format!("{path}.table[{r}]");
            if args.len() != op.arg_sorts.len() {
                report.push(Violation::new(
                    &row_path,
                    format!("row has {} arguments, signature has {}", args.len(), op.arg_sorts.len()),
                ));
                continue;
            }
            let mut row_ok = true;
            for (pos, (&arg, &sort)) in args.iter().zip(&op.arg_sorts).enumerate() {
                if !element_in_sort(domain, arg, sort) {
                    report.push(Violation::new(
                        format!("{row_path}.args[{pos}]"),
                        format!("element ({}, {}) is not in sort {sort}", arg.sort, arg.index),
                    ));
                    row_ok = false;
                }
            }
            if !element_in_sort(domain, *result, op.result_sort) {
                report.push(Violation::new(
                    format!("{row_path}.result"),
                    format!(
                        "element ({}, {}) is not in result sort {}",
                        result.sort, result.index, op.result_sort
                    ),
                ));
                row_ok = false;
            }
            if row_ok && !seen_args.insert(args.clone()) {
                report.push(Violation::new(&row_path, "duplicate argument row"));
            }
        }
        if seen_args.len() != expected {
            report.push(Violation::new(
                format!("{path}.table"),
                format!(
                    "table is not total: {} distinct argument rows, expected {expected}",
                    seen_args.len()
                ),
            ));
        }
    }
}

fn validate_relations(domain: &SortedDomain, relations: &[RelationSymbol], report: &mut Vec<Violation>) {
    let mut names = BTreeSet::new();
    for (i, rel) in relations.iter().enumerate() {
        let path = format!("relations[{i}]");
        if !names.insert(rel.name.as_str()) {
            report.push(Violation::new(&path, format!("duplicate relation name {:?}", rel.name)));
        }
        if rel.signature.is_empty() {
            report.push(Violation::new(&path, format!("relation {:?} has an empty signature", rel.name)));
        }
        for (pos, &s) in rel.signature.iter().enumerate() {
            if domain.cardinality(s).is_none() {
                report.push(Violation::new(
                    format!("{path}.signature[{pos}]"),
                    format!("unknown sort index {s}"),
                ));
            }
        }
    }
}

fn validate_interpretation(
    domain: &SortedDomain,
    relations: &[RelationSymbol],
    interp: &Interpretation,
    path: &str,
    report: &mut Vec<Violation>,
) {
    for rel in relations {
        if !interp.tuples.contains_key(&rel.name) {
            report.push(Violation::new(
                format!("{path}.tuples"),
                format!("relation {:?} has no entry (use an empty list)", rel.name),
            ));
        }
    }
    for (name, tuples) in &interp.tuples {
        let rel_path = format!("{path}.tuples.{name}");
        let Some(rel) = relations.iter().find(|r| &r.name == name) else {
            report.push(Violation::new(&rel_path, "unknown relation symbol"));
            continue;
        };
        let mut seen = BTreeSet::new();
        for (t, tuple) in tuples.iter().enumerate() {
            let tuple_path = format!("{rel_path}[{t}]");
            if tuple.len() != rel.signature.len() {
                report.push(Violation::new(
                    &tuple_path,
                    format!("tuple arity {} does not match signature arity {}", tuple.len(), rel.signature.len()),
                ));
                continue;
            }
            let mut ok = true;
            for (pos, (&e, &sort)) in tuple.iter().zip(&rel.signature).enumerate() {
                if !element_in_sort(domain, e, sort) {
                    report.push(Violation::new(
                        format!("{tuple_path}[{pos}]"),
                        format!("element ({}, {}) is not in sort {sort}", e.sort, e.index),
                    ));
                    ok = false;
                }
            }
            if ok && !seen.insert(tuple.clone()) {
                report.push(Violation::new(&tuple_path, "duplicate tuple"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_model() -> Model {
        // 4 vertices, undirected star centered on 0, both orientations stored.
        let domain = SortedDomain::single("V", 4);
        let rel = RelationSymbol::new("edge", vec![0, 0]);
        let tuples = [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)]
            .map(|(a, b)| vec![Element::new(0, a), Element::new(0, b)]);
        let interp = Interpretation::new("E").with_relation("edge", tuples);
        Model::new(Algebra::new(domain, vec![]), vec![rel], interp)
    }

    #[test]
    fn star_model_is_valid() {
        assert!(star_model().validate().is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let mut m = star_model();
        m.interpretation
            .tuples
            .get_mut("edge")
            .unwrap()
            .push(vec![Element::new(0, 1), Element::new(0, 2), Element::new(0, 3)]);
        let report = m.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("arity 3"));
        assert!(report[0].path.contains("tuples.edge"));
    }

    #[test]
    fn missing_operation_row_is_reported() {
        let domain = SortedDomain::single("V", 2);
        let mut op = OperationTable::from_fn("f", &domain, vec![0], 0, |args| args[0]);
        op.entries.pop();
        let m = Model::new(
            Algebra::new(domain, vec![op]),
            vec![],
            Interpretation::new("f0"),
        );
        let report = m.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("not total"));
    }

    #[test]
    fn duplicate_tuple_rejected() {
        let mut m = star_model();
        m.interpretation
            .tuples
            .get_mut("edge")
            .unwrap()
            .push(vec![Element::new(0, 0), Element::new(0, 1)]);
        let report = m.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("duplicate tuple"));
    }

    #[test]
    fn missing_relation_key_reported() {
        let mut m = star_model();
        m.interpretation.tuples.clear();
        let report = m.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("no entry"));
    }

    #[test]
    fn multimodel_label_uniqueness() {
        let m = star_model();
        let mut mm = m.to_multimodel();
        mm.interpretations.push(mm.interpretations[0].clone());
        let report = mm.validate();
        assert!(report.iter().any(|v| v.message.contains("duplicate label")));
    }

    #[test]
    fn tuple_space_sizes() {
        let d1 = SortedDomain::single("V", 4);
        assert_eq!(tuple_space_size(&RelationSymbol::new("r", vec![0, 0]), &d1).unwrap(), 16);

        let d2 = SortedDomain::new([("a", 2), ("b", 3), ("c", 4)]);
        assert_eq!(tuple_space_size(&RelationSymbol::new("r", vec![0, 1, 2]), &d2).unwrap(), 24);

        let d3 = SortedDomain::single("V", 5);
        assert_eq!(tuple_space_size(&RelationSymbol::new("r", vec![0]), &d3).unwrap(), 5);

        assert!(tuple_space_size(&RelationSymbol::new("r", vec![7]), &d3).is_err());
    }

    #[test]
    fn tuple_sets_fit_in_tuple_space() {
        let m = star_model();
        for rel in &m.relations {
            let space = tuple_space_size(rel, m.domain()).unwrap();
            assert!(m.interpretation.relation_tuples(&rel.name).len() <= space);
        }
    }

    #[test]
    fn cartesian_indices_order_and_count() {
        let all: Vec<_> = cartesian_indices(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![1, 2]);
        let empty: Vec<_> = cartesian_indices(&[]).collect();
        assert_eq!(empty, vec![Vec::<usize>::new()]);
    }
}
