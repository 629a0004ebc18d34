//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the engine. Invariant violations found by validation
/// are *data* (see [`crate::model::Violation`]), not errors; this type covers
/// genuine failures: incompatible inputs, exhausted resources, bad files.
#[derive(Debug, Error)]
pub enum Error {
    /// Two values that must act on the same (or name-compatible) domains do not.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A signature refers to a sort or operation that does not exist, or shapes disagree.
    #[error("signature error: {0}")]
    Signature(String),

    /// Input violates a documented precondition of the operation.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Backtracking search exceeded its node budget.
    #[error("search budget exhausted after visiting {visited} nodes (max {max}); raise --budget or AUTOEQUIV_BUDGET")]
    BudgetExhausted { visited: u64, max: u64 },

    /// The bijection space is provably larger than the node budget, so the
    /// search is refused up front instead of running out mid-way.
    #[error("search space of {bijections} sort-wise bijections exceeds the node budget of {max} nodes")]
    SearchSpaceTooLarge { bijections: u128, max: u64 },

    /// Group closure grew past the configured cap.
    #[error("group closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    /// Brute-force oracle refused an input outside its hard caps.
    #[error("oracle cap exceeded: {0}")]
    OracleCap(String),

    /// A file could not be decoded into a multi-model.
    #[error("decode error:\n{}", .issues.join("\n"))]
    Decode { issues: Vec<String> },

    /// A decoded multi-model failed validation.
    #[error("invalid input:\n{}", .violations.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid { violations: Vec<crate::model::Violation> },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
