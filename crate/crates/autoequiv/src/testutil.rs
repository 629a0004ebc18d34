//! Shared fixtures for unit tests.

use crate::model::{Algebra, Element, OperationTable, SortedDomain};

/// The cyclic group of order 4 as an operation table (addition mod 4).
/// Its automorphism group has order 2: identity and negation.
pub(crate) fn cyclic4() -> Algebra {
    let domain = SortedDomain::single("a", 4);
    let add = OperationTable::from_fn("mul", &domain, vec![0, 0], 0, |args| {
        Element::new(0, (args[0].index + args[1].index) % 4)
    });
    Algebra::new(domain, vec![add])
}

/// The Klein four-group as an operation table (xor on two bits).
/// Its automorphism group permutes the three non-identity elements freely.
pub(crate) fn klein4() -> Algebra {
    let domain = SortedDomain::single("a", 4);
    let xor = OperationTable::from_fn("mul", &domain, vec![0, 0], 0, |args| {
        Element::new(0, args[0].index ^ args[1].index)
    });
    Algebra::new(domain, vec![xor])
}
