//! Exact arithmetic in Z[zeta_m] and Z_p[zeta_m] on the power basis modulo
//! the m-th cyclotomic polynomial: Galois action, relative norms, the
//! Iwasawa logarithm, and the special weighted root sums.

pub mod ctx;
pub mod log;
pub mod padic;
pub mod rat;
pub mod special;

pub use ctx::{cyclo_ctx, cyclotomic_poly, CycloCtx};
pub use log::{field_log, pi_valuation, ramification, LogTable};
pub use padic::CycloPadic;
pub use rat::{solve_exact, CycloRat};
pub use special::{
    build_special, dotted_t, frobenius_unit, frobenius_unit_inv, one_over_pi, relative_norm,
    zeta_qi_exponent, DottedTCorrection, SpecialElement, SpecialKind,
};

/// The image of zeta_m^k in the power-basis representation.
pub fn embed_root(m: u64, k: u64) -> CycloRat {
    CycloRat::root_power(m, k)
}
