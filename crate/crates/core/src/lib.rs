//! Exact arithmetic for cyclotomic fields and their p-adic completions,
//! together with a "lab" of machine checks for classical identities on
//! the p-adic logarithm of principal units: p-adic L-values at s = 1,
//! Stickelberger-type elements, and lattice-index computations done by
//! Hermite/Smith normal form.
//!
//! Everything is exact: rationals are `num_rational::BigRational`, p-adic
//! numbers are residues modulo `p^N` with explicit precision tracking, and
//! all module comparisons reduce to normal forms of integer or p-adic
//! matrices. No floating point anywhere.

pub mod arith;
pub mod cache;
pub mod chars;
pub mod cyclo;
pub mod error;
pub mod group_ring;
pub mod lab;
pub mod lattice;
pub mod padic;

pub use error::{Error, Result};

/// Three-valued outcome for comparisons done at finite p-adic precision.
///
/// `Undecidable` is a value, not an error: it means the requested
/// comparison falls within the precision slack and cannot be certified
/// either way without recomputing at higher precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Tri {
    Equal,
    Unequal,
    Undecidable,
}

impl Tri {
    pub fn is_equal(self) -> bool {
        self == Tri::Equal
    }
}
