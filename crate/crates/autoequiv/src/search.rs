//! Backtracking search for automorphism groups and isomorphism sets.
//!
//! The engine extends a per-sort partial bijection one element at a time in
//! canonical element order, trying target candidates in ascending index
//! order. Pruning is weak but sound: a
//! branch is cut only when a fully-mapped operation row or a fully-mapped
//! relation tuple is violated. Results are emitted in lexicographic order of
//! the concatenated per-sort image arrays, so every enumeration is
//! deterministic and "first hit" means "canonically least".

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Algebra, Element, Interpretation, Model, OperationTable, RelationSymbol, SortId, SortedDomain};
use crate::perm::{MultiSortedPermutation, PermGroup};

/// Default backtracking node cap.
pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

/// Resource limits for one search or decision call.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Cap on backtracking nodes visited across the whole call.
    pub max_nodes: u64,
    /// Optional cap on the number of enumerated isomorphisms.
    pub max_results: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_nodes: DEFAULT_MAX_NODES, max_results: None }
    }
}

impl SearchBudget {
    pub fn with_max_nodes(max_nodes: u64) -> Self {
        Self { max_nodes, ..Self::default() }
    }
}

/// Shared node counter: one per top-level call, threaded through every
/// sub-search so the budget bounds the call as a whole.
pub(crate) struct NodeCounter {
    visited: u64,
    max: u64,
}

impl NodeCounter {
    pub(crate) fn new(budget: &SearchBudget) -> Self {
        Self { visited: 0, max: budget.max_nodes.max(1) }
    }

    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.max {
            Err(Error::BudgetExhausted { visited: self.visited, max: self.max })
        } else {
            Ok(())
        }
    }

    fn remaining(&self) -> u64 {
        self.max - self.visited
    }
}

/// Fails fast when the full bijection space alone already exceeds the
/// remaining node budget. Applied only to unconstrained enumerations, where
/// no pruning can help.
pub(crate) fn ensure_bijection_space(domain: &SortedDomain, counter: &NodeCounter) -> Result<()> {
    let mut bijections: u128 = 1;
    for sort in domain.sorts() {
        for k in 2..=sort.size as u128 {
            bijections = bijections.saturating_mul(k);
        }
    }
    if bijections > counter.remaining() as u128 {
        return Err(Error::SearchSpaceTooLarge { bijections, max: counter.max });
    }
    Ok(())
}

/// Operation table compiled to a dense lookup over argument index tuples.
struct DenseOp {
    strides: Vec<usize>,
    data: Vec<usize>,
}

impl DenseOp {
    fn compile(domain: &SortedDomain, op: &OperationTable) -> Result<Self> {
        let invalid = || Error::Precondition(format!("operation table {:?} is not a valid total table", op.name));
        let dims: Vec<usize> = op
            .arg_sorts
            .iter()
            .map(|&s| domain.cardinality(s).ok_or_else(invalid))
            .collect::<Result<_>>()?;
        let result_card = domain.cardinality(op.result_sort).ok_or_else(invalid)?;
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let size: usize = dims.iter().product();
        let mut data = vec![usize::MAX; size];
        for (args, result) in &op.entries {
            if args.len() != dims.len() || result.sort != op.result_sort || result.index >= result_card {
                return Err(invalid());
            }
            let mut at = 0usize;
            for ((&a, &sort), (&dim, &stride)) in
                args.iter().zip(&op.arg_sorts).zip(dims.iter().zip(&strides))
            {
                if a.sort != sort || a.index >= dim {
                    return Err(invalid());
                }
                at += a.index * stride;
            }
            if data[at] != usize::MAX {
                return Err(invalid());
            }
            data[at] = result.index;
        }
        if data.contains(&usize::MAX) {
            return Err(invalid());
        }
        Ok(Self { strides, data })
    }

    fn eval(&self, arg_indices: &[usize]) -> usize {
        let at: usize = arg_indices.iter().zip(&self.strides).map(|(&a, &s)| a * s).sum();
        self.data[at]
    }
}

/// A row of a source-side operation table, kept as the elements it mentions.
struct OpRow {
    op: usize,
    args: Vec<Element>,
    result: Element,
}

/// Relation constraint for self-map searches: the tuple list plus a
/// membership index over per-position element indices.
struct RelConstraint {
    tuples: Vec<Vec<Element>>,
    member: HashSet<Vec<usize>>,
}

struct Search {
    source: Arc<SortedDomain>,
    target: Arc<SortedDomain>,
    sort_map: Vec<SortId>,
    target_cards: Vec<usize>,
    positions: Vec<Element>,
    offsets: Vec<usize>,
    maps: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
    op_rows: Vec<OpRow>,
    target_ops: Vec<DenseOp>,
    rows_by_element: Vec<Vec<usize>>,
    rels: Vec<RelConstraint>,
    tuples_by_element: Vec<Vec<(usize, usize)>>,
}

enum BuildOutcome {
    Ready(Box<Search>),
    /// No bijection can satisfy the request (incompatible domains or
    /// mismatched operation signatures). Not an error: the result set is empty.
    Impossible,
}

fn build_search(
    source: &SortedDomain,
    target: &SortedDomain,
    ops: Option<(&Algebra, &Algebra)>,
    relations: Option<(&[RelationSymbol], &Interpretation)>,
) -> Result<BuildOutcome> {
    if !source.compatible(target) {
        return Ok(BuildOutcome::Impossible);
    }
    let sort_map: Vec<SortId> = source
        .sorts()
        .iter()
        .map(|s| target.sort_index(&s.name).unwrap())
        .collect();
    let offsets: Vec<usize> = source
        .sorts()
        .iter()
        .scan(0usize, |acc, s| {
            let at = *acc;
            *acc += s.size;
            Some(at)
        })
        .collect();
    let total = source.element_count();

    let mut op_rows = Vec::new();
    let mut target_ops = Vec::new();
    let mut rows_by_element = vec![Vec::new(); total];
    if let Some((a, b)) = ops {
        if !a.same_signature(b) {
            return Ok(BuildOutcome::Impossible);
        }
        for src_op in &a.operations {
            let dst_op = b
                .operations
                .iter()
                .find(|o| o.name == src_op.name)
                .expect("signature match implies name match");
            let op_idx = target_ops.len();
            target_ops.push(DenseOp::compile(&b.domain, dst_op)?);
            // Validate the source side too, so bad tables fail loudly here.
            DenseOp::compile(&a.domain, src_op)?;
            for (args, result) in &src_op.entries {
                let row_idx = op_rows.len();
                op_rows.push(OpRow { op: op_idx, args: args.clone(), result: *result });
                for e in args.iter().chain([result]) {
                    let id = offsets[e.sort] + e.index;
                    if !rows_by_element[id].contains(&row_idx) {
                        rows_by_element[id].push(row_idx);
                    }
                }
            }
        }
    }

    let mut rels = Vec::new();
    let mut tuples_by_element = vec![Vec::new(); total];
    if let Some((symbols, interp)) = relations {
        debug_assert_eq!(*source, *target, "relation constraints apply to self-maps only");
        for rel in symbols {
            let tuples: Vec<Vec<Element>> = interp.relation_tuples(&rel.name).to_vec();
            let member: HashSet<Vec<usize>> =
                tuples.iter().map(|t| t.iter().map(|e| e.index).collect()).collect();
            let rel_idx = rels.len();
            for (t_idx, tuple) in tuples.iter().enumerate() {
                for e in tuple {
                    let id = offsets[e.sort] + e.index;
                    if !tuples_by_element[id].contains(&(rel_idx, t_idx)) {
                        tuples_by_element[id].push((rel_idx, t_idx));
                    }
                }
            }
            rels.push(RelConstraint { tuples, member });
        }
    }

    Ok(BuildOutcome::Ready(Box::new(Search {
        source: Arc::new(source.clone()),
        target: Arc::new(target.clone()),
        sort_map,
        target_cards: target.sorts().iter().map(|s| s.size).collect(),
        positions: source.elements().collect(),
        offsets,
        maps: source.sorts().iter().map(|s| vec![None; s.size]).collect(),
        used: target.sorts().iter().map(|s| vec![false; s.size]).collect(),
        op_rows,
        target_ops,
        rows_by_element,
        rels,
        tuples_by_element,
    })))
}

impl Search {
    fn run(
        &mut self,
        counter: &mut NodeCounter,
        visit: &mut dyn FnMut(MultiSortedPermutation) -> Result<ControlFlow<()>>,
    ) -> Result<()> {
        let _ = self.recurse(0, counter, visit)?;
        Ok(())
    }

    fn recurse(
        &mut self,
        depth: usize,
        counter: &mut NodeCounter,
        visit: &mut dyn FnMut(MultiSortedPermutation) -> Result<ControlFlow<()>>,
    ) -> Result<ControlFlow<()>> {
        counter.tick()?;
        if depth == self.positions.len() {
            return visit(self.current());
        }
        let e = self.positions[depth];
        let ts = self.sort_map[e.sort];
        for cand in 0..self.target_cards[ts] {
            if self.used[ts][cand] {
                continue;
            }
            self.maps[e.sort][e.index] = Some(cand);
            self.used[ts][cand] = true;
            let flow = if self.consistent(e) {
                self.recurse(depth + 1, counter, visit)
            } else {
                Ok(ControlFlow::Continue(()))
            };
            self.maps[e.sort][e.index] = None;
            self.used[ts][cand] = false;
            if flow?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Checks every operation row and relation tuple touching `e` that is now
    /// fully mapped. Earlier-completed rows were checked when their last
    /// element was assigned.
    fn consistent(&self, e: Element) -> bool {
        let id = self.offsets[e.sort] + e.index;
        let mut arg_buf = Vec::new();
        'rows: for &row_idx in &self.rows_by_element[id] {
            let row = &self.op_rows[row_idx];
            arg_buf.clear();
            for a in &row.args {
                match self.maps[a.sort][a.index] {
                    Some(v) => arg_buf.push(v),
                    None => continue 'rows,
                }
            }
            let Some(result_image) = self.maps[row.result.sort][row.result.index] else {
                continue;
            };
            if self.target_ops[row.op].eval(&arg_buf) != result_image {
                return false;
            }
        }
        let mut tuple_buf = Vec::new();
        'tuples: for &(rel_idx, t_idx) in &self.tuples_by_element[id] {
            let tuple = &self.rels[rel_idx].tuples[t_idx];
            tuple_buf.clear();
            for a in tuple {
                match self.maps[a.sort][a.index] {
                    Some(v) => tuple_buf.push(v),
                    None => continue 'tuples,
                }
            }
            if !self.rels[rel_idx].member.contains(&tuple_buf) {
                return false;
            }
        }
        true
    }

    fn current(&self) -> MultiSortedPermutation {
        let images: Vec<Vec<usize>> = self
            .maps
            .iter()
            .map(|arr| arr.iter().map(|v| v.expect("leaf has a total map")).collect())
            .collect();
        MultiSortedPermutation::from_images_arc(self.source.clone(), self.target.clone(), images)
            .expect("search emits valid bijections")
    }
}

/// All operation-preserving bijections of the algebra onto itself. With no
/// operations this is the full sort-wise symmetric group.
pub fn algebra_automorphisms(algebra: &Algebra, budget: &SearchBudget) -> Result<PermGroup> {
    let mut counter = NodeCounter::new(budget);
    algebra_automorphisms_counted(algebra, &mut counter)
}

pub(crate) fn algebra_automorphisms_counted(
    algebra: &Algebra,
    counter: &mut NodeCounter,
) -> Result<PermGroup> {
    let outcome = build_search(&algebra.domain, &algebra.domain, Some((algebra, algebra)), None)?;
    let BuildOutcome::Ready(mut search) = outcome else {
        unreachable!("an algebra is compatible with itself");
    };
    let mut found = Vec::new();
    search.run(counter, &mut |p| {
        found.push(p);
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(PermGroup::from_elements(&algebra.domain, found))
}

/// The subgroup of `algebra_automorphisms` whose elements map every
/// relation's tuple set onto itself.
pub fn model_automorphisms(model: &Model, budget: &SearchBudget) -> Result<PermGroup> {
    let mut counter = NodeCounter::new(budget);
    model_automorphisms_counted(model, &mut counter)
}

pub(crate) fn model_automorphisms_counted(
    model: &Model,
    counter: &mut NodeCounter,
) -> Result<PermGroup> {
    let outcome = build_search(
        model.domain(),
        model.domain(),
        Some((&model.algebra, &model.algebra)),
        Some((&model.relations, &model.interpretation)),
    )?;
    let BuildOutcome::Ready(mut search) = outcome else {
        unreachable!("a model is compatible with itself");
    };
    let mut found = Vec::new();
    search.run(counter, &mut |p| {
        found.push(p);
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(PermGroup::from_elements(model.domain(), found))
}

/// Relations-only variant: bijections preserving every relation, with the
/// operations ignored. Exposed for experimentation; equivalence decisions use
/// [`model_automorphisms`].
pub fn relation_automorphisms(model: &Model, budget: &SearchBudget) -> Result<PermGroup> {
    let mut counter = NodeCounter::new(budget);
    let outcome = build_search(
        model.domain(),
        model.domain(),
        None,
        Some((&model.relations, &model.interpretation)),
    )?;
    let BuildOutcome::Ready(mut search) = outcome else {
        unreachable!("a model is compatible with itself");
    };
    let mut found = Vec::new();
    search.run(&mut counter, &mut |p| {
        found.push(p);
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(PermGroup::from_elements(model.domain(), found))
}

/// Every sort-wise bijection carrying `a`'s operations onto `b`'s, in
/// canonical order. Empty when the algebras are not isomorphic, including the
/// case of mismatched operation signatures.
pub fn algebra_isomorphisms(
    a: &Algebra,
    b: &Algebra,
    budget: &SearchBudget,
) -> Result<Vec<MultiSortedPermutation>> {
    let mut counter = NodeCounter::new(budget);
    let outcome = build_search(&a.domain, &b.domain, Some((a, b)), None)?;
    let BuildOutcome::Ready(mut search) = outcome else {
        return Ok(Vec::new());
    };
    let max_results = budget.max_results.unwrap_or(u64::MAX);
    let mut found = Vec::new();
    search.run(&mut counter, &mut |p| {
        found.push(p);
        Ok(if found.len() as u64 >= max_results {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        })
    })?;
    Ok(found)
}

/// Lazily visits `Iso(a, b)` in canonical order. Returns without error when
/// the visitor breaks or the space is exhausted.
pub(crate) fn visit_algebra_isomorphisms(
    a: &Algebra,
    b: &Algebra,
    counter: &mut NodeCounter,
    visit: &mut dyn FnMut(MultiSortedPermutation) -> Result<ControlFlow<()>>,
) -> Result<()> {
    let outcome = build_search(&a.domain, &b.domain, Some((a, b)), None)?;
    let BuildOutcome::Ready(mut search) = outcome else {
        return Ok(());
    };
    if a.operations.is_empty() {
        ensure_bijection_space(&a.domain, counter)?;
    }
    search.run(counter, visit)
}

/// Lazily visits every sort-wise bijection between two domains (no
/// constraints at all), in canonical order.
pub(crate) fn visit_sortwise_bijections(
    source: &SortedDomain,
    target: &SortedDomain,
    counter: &mut NodeCounter,
    visit: &mut dyn FnMut(MultiSortedPermutation) -> Result<ControlFlow<()>>,
) -> Result<()> {
    let outcome = build_search(source, target, None, None)?;
    let BuildOutcome::Ready(mut search) = outcome else {
        return Ok(());
    };
    ensure_bijection_space(source, counter)?;
    search.run(counter, visit)
}

/// Direct check that `p` preserves every operation table of `algebra`.
pub fn is_algebra_automorphism(algebra: &Algebra, p: &MultiSortedPermutation) -> Result<bool> {
    is_algebra_isomorphism(algebra, algebra, p)
}

/// Direct check that `p : a -> b` carries every operation of `a` onto the
/// same-named operation of `b`.
pub fn is_algebra_isomorphism(
    a: &Algebra,
    b: &Algebra,
    p: &MultiSortedPermutation,
) -> Result<bool> {
    if *p.source() != a.domain || *p.target() != b.domain {
        return Err(Error::DomainMismatch(
            "bijection endpoints do not match the algebras".into(),
        ));
    }
    if !a.same_signature(b) {
        return Ok(false);
    }
    for src_op in &a.operations {
        let dst_op = b.operations.iter().find(|o| o.name == src_op.name).unwrap();
        let dense = DenseOp::compile(&b.domain, dst_op)?;
        DenseOp::compile(&a.domain, src_op)?;
        for (args, result) in &src_op.entries {
            let mapped: Vec<usize> = args.iter().map(|&e| p.apply(e).index).collect();
            if dense.eval(&mapped) != p.apply(*result).index {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
