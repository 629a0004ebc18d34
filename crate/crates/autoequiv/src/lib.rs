//! Decision engine for automorphic equivalence of finite algebras, models
//! and multi-models.
//!
//! Two structures are automorphically equivalent when a bijection conjugates
//! one automorphism group exactly onto the other; for models the bijection
//! must be an algebra isomorphism, and for multi-models the interpretation
//! sets must admit a pairing whose pairs are all model-equivalent. The crate
//! provides:
//!
//! * [`model`]: multi-sorted domains, algebras, relational models and
//!   multi-models, with full validation;
//! * [`perm`]: multi-sorted permutations and materialized permutation groups
//!   (closure, conjugation, comparison);
//! * [`search`]: backtracking enumeration of automorphism groups and
//!   isomorphism sets;
//! * [`equiv`]: the three equivalence decisions, the bipartite matching step,
//!   and independent witness rechecks;
//! * [`transform`]: two constructions of equivalent multi-models: pushing
//!   interpretations along an algebra automorphism, and complementation;
//! * [`graph`]: graphs as single-sorted models plus tree/connectedness
//!   predicates;
//! * [`oracle`]: brute-force reference implementations for differential
//!   testing, sharing no search code with the engine;
//! * [`format`] / [`cli`]: the JSON file format and the `autoequiv` binary.
//!
//! A star and a triangle with an isolated vertex are the smallest
//! interesting example: not isomorphic, yet automorphically equivalent, with
//! an independently checkable witness.
//!
//! ```
//! use autoequiv::equiv::{decide_model_equivalence, verify_model_witness};
//! use autoequiv::graph::{graph_to_model, Graph};
//! use autoequiv::SearchBudget;
//!
//! let star = graph_to_model(&Graph::undirected(4, [(0, 1), (0, 2), (0, 3)])?);
//! let triangle = graph_to_model(&Graph::undirected(4, [(0, 1), (0, 2), (1, 2)])?);
//!
//! let budget = SearchBudget::default();
//! let decision = decide_model_equivalence(&star, &triangle, &budget)?;
//! let witness = decision.witness().expect("equivalent despite not being isomorphic");
//! assert_eq!(witness.conjugator.to_string(), "V:[3,0,1,2]");
//! assert!(verify_model_witness(&star, &triangle, witness, &budget)?);
//! # Ok::<(), autoequiv::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod corpus;
pub mod equiv;
pub mod error;
pub mod format;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod perm;
pub mod search;
pub mod transform;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use model::{
    Algebra, Element, Interpretation, Model, MultiModel, OperationTable, RelationSymbol,
    SortedDomain, Violation,
};
pub use perm::{MultiSortedPermutation, PermGroup};
pub use search::SearchBudget;
