//! Finite-index lattice comparisons in exact ambient spaces.
//!
//! Two coefficient domains: exact integers (fraction-free, for the global
//! Stickelberger computations) and Z_p at finite precision (for everything
//! p-adic, with valuation-pivoted echelon forms and explicit precision
//! slack so comparisons either certify or report undecidable).

pub mod zint;
pub mod zp;

pub use zint::{ZLattice, ZMat};
pub use zp::{solve_padic_integral, PLattice, DEFAULT_SLACK};

/// Default working precision for the level-n p-adic checks:
/// 2 (n p^n + n + 1) + 16, dominating twice the largest index exponent.
pub fn default_precision(p: u64, n: u32) -> u32 {
    let pn = (p as u128).pow(n).min(u32::MAX as u128) as u32;
    2 * (n * pn + n + 1) + 16
}
