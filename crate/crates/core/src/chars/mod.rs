//! Dirichlet characters with exact root-of-unity values, generalized
//! Bernoulli numbers, the s = 1 and s = 1 - k special values of p-adic
//! L-functions, and the relative class number h^- through the classical
//! Bernoulli product.
//!
//! A character is stored by its exponents on a fixed generating set of
//! (Z/mZ)^x; values are abstract roots of unity (exponents of zeta_E for E
//! the group exponent) and are only embedded into a cyclotomic ring or into
//! Z_p (via Teichmüller, when the order divides p - 1) at evaluation sites.

mod dirichlet;
mod lvalues;

pub use dirichlet::{enumerate_characters, ten_group, DirichletCharacter, UnitGroup};
pub use lvalues::{
    bernoulli_b, bernoulli_b1_padic, bernoulli_number, bernoulli_poly_at, decompose, gauss_sum,
    gauss_sum_in, gauss_sum_padic, h_minus, lp_at_one, lp_at_one_minus_k, teich_character,
    LValueRecord,
};
