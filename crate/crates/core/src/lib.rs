//! Exact symmetric weighted first-order model counting.
//!
//! Given a sentence in two-variable logic (optionally with one functionality
//! axiom), the uniform one-dimensional fragment U₁ or its strong restriction
//! SU₁, per-predicate positive/negative rational weights and a domain size n,
//! the engines compute the exact weighted model count in time polynomial in
//! n. A brute-force ground oracle validates every lifted computation at
//! small domain sizes.

pub mod combinatorics;
pub mod corpus;
pub mod engine;
pub mod normalize;
pub mod oracle;
pub mod prefix;
pub mod syntax;
pub mod typespace;

pub use engine::Engine;
pub use syntax::{classify_fragment, Formula, FragmentVerdict, Vocabulary, WeightMap};

// Re-exported so downstream binaries share the exact arithmetic types.
pub use num;

/// Reduced `p/q` rendering with positive denominator; integers print bare.
pub fn show_rational(value: &num::BigRational) -> String {
    let reduced = value.reduced();
    if num::One::is_one(reduced.denom()) {
        reduced.numer().to_string()
    } else {
        format!("{}/{}", reduced.numer(), reduced.denom())
    }
}
