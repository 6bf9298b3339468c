//! The distinguished cyclotomic elements used throughout the checks:
//! the telescoping sums over p-power roots of unity (with or without the
//! p-power weights and Frobenius twists), the exact expansion of
//! 1/(zeta_{p^(n+1)} - 1), and relative norms between cyclotomic levels.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::rat::CycloRat;
use crate::arith::{gcd, inv_mod};
use crate::error::{Error, Result};

/// Which of the four weighted root sums to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    /// sum_{i=0..n} p^(i-n) zeta_{p^(i+1)}
    ScriptT,
    /// sum_{i=0..n} zeta_{p^(i+1)}
    LeopoldtT,
    /// sum_{i=1..n} p^(i-n) zeta_{p^(i+1)} (starts at i = 1)
    TildeT,
    /// the conductor-twisted sum on Q(zeta_{p^(n+1) d}); see [`dotted_t`]
    DottedT,
}

/// How to read the constant in the second conductor case of the twisted sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DottedTCorrection {
    /// correction term -p^(-n) F^n (F - 1) zeta_{q_0} (operator reading)
    FrobeniusMinusOne,
    /// correction term -p^(-n) (d - 1) F^n zeta_{q_0} (scalar reading)
    ScalarDMinusOne,
}

#[derive(Clone, Debug)]
pub struct SpecialElement {
    pub kind: SpecialKind,
    pub p: u64,
    pub d: u64,
    pub n: u32,
    pub value: CycloRat,
}

fn p_power_ratio(p: u64, i: u32, n: u32) -> BigRational {
    // p^(i - n) as an exact rational
    if i >= n {
        BigRational::from(BigInt::from(p).pow(i - n))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(p).pow(n - i))
    }
}

/// The weighted sums over zeta_{p^(i+1)} inside Q(zeta_{p^(n+1)}).
/// zeta_{p^(i+1)} is x^(p^(n-i)) on the power basis.
pub fn build_special(kind: SpecialKind, p: u64, n: u32) -> SpecialElement {
    let m = p.pow(n + 1);
    let mut value = CycloRat::zero(m);
    let (start, weighted) = match kind {
        SpecialKind::ScriptT => (0u32, true),
        SpecialKind::LeopoldtT => (0, false),
        SpecialKind::TildeT => (1, true),
        SpecialKind::DottedT => panic!("dotted sum needs conductor data; use dotted_t"),
    };
    for i in start..=n {
        let w = if weighted {
            p_power_ratio(p, i, n)
        } else {
            BigRational::one()
        };
        value.add_monomial_assign(p.pow(n - i) as u64, &w);
    }
    SpecialElement {
        kind,
        p,
        d: 1,
        n,
        value,
    }
}

/// Exponent of zeta_{q_i}^(F^j delta-part...) inside Q(zeta_{q_n}):
/// zeta_{q_i} = alpha zeta_{p^(i+1)} with alpha = x^(q_n/d) and
/// zeta_{p^(i+1)} = x^(d p^(n-i)); F twists the alpha-part by p.
pub fn zeta_qi_exponent(p: u64, d: u64, n: u32, i: u32, frob_pow: u32) -> u64 {
    let qn = p.pow(n + 1) * d;
    let alpha_exp = if d == 1 {
        0
    } else {
        (qn / d) % qn * crate::arith::pow_mod(p, frob_pow as u64, d) % qn
    };
    let p_exp = d * p.pow(n - i);
    (alpha_exp + p_exp) % qn
}

/// The conductor-twisted weighted sum on Q(zeta_{p^(n+1) d}).
///
/// For the conductor-pd case this is sum_{i=0..n} F^(n-i) p^(i-n) zeta_{q_i}.
/// For the conductor-d case the sum starts at i = 1, each term carries the
/// operator (1 - F/p), and a correction term at level 0 is subtracted; the
/// correction constant is configurable (see [`DottedTCorrection`]) because
/// the two readings differ and only one makes the identity hold.
pub fn dotted_t(
    p: u64,
    d: u64,
    n: u32,
    conductor_is_pd: bool,
    correction: DottedTCorrection,
) -> SpecialElement {
    let m = p.pow(n + 1) * d;
    let mut value = CycloRat::zero(m);
    if conductor_is_pd {
        for i in 0..=n {
            let w = p_power_ratio(p, i, n);
            value.add_monomial_assign(zeta_qi_exponent(p, d, n, i, n - i), &w);
        }
    } else {
        for i in 1..=n {
            let w = p_power_ratio(p, i, n);
            // (F^(n-i) - F^(n-i+1)/p) zeta_{q_i}
            value.add_monomial_assign(zeta_qi_exponent(p, d, n, i, n - i), &w);
            let w2 = -p_power_ratio(p, i, n + 1);
            value.add_monomial_assign(zeta_qi_exponent(p, d, n, i, n - i + 1), &w2);
        }
        let w = -p_power_ratio(p, 0, n);
        match correction {
            DottedTCorrection::FrobeniusMinusOne => {
                // -p^(-n) (F^(n+1) - F^n) zeta_{q_0}
                value.add_monomial_assign(zeta_qi_exponent(p, d, n, 0, n + 1), &w);
                value.add_monomial_assign(zeta_qi_exponent(p, d, n, 0, n), &(-&w));
            }
            DottedTCorrection::ScalarDMinusOne => {
                let c = &w * BigRational::from(BigInt::from(d as i64 - 1));
                value.add_monomial_assign(zeta_qi_exponent(p, d, n, 0, n), &c);
            }
        }
    }
    SpecialElement {
        kind: SpecialKind::DottedT,
        p,
        d,
        n,
        value,
    }
}

/// The exact element (1/p^(n+1)) sum_{k=1}^{p^(n+1)-1} k zeta^k, which equals
/// 1/(zeta_{p^(n+1)} - 1); the defining property is re-checked on every call.
pub fn one_over_pi(p: u64, n: u32) -> CycloRat {
    let m = p.pow(n + 1);
    let mut v = CycloRat::zero(m);
    let den = BigRational::new(BigInt::one(), BigInt::from(m));
    for k in 1..m {
        v.add_monomial_assign(k, &(&den * BigRational::from(BigInt::from(k))));
    }
    let pi = CycloRat::root_power(m, 1).sub(&CycloRat::one(m));
    let check = v.mul(&pi);
    assert!(
        check.eq(&CycloRat::one(m)),
        "1/pi expansion failed its defining identity"
    );
    v
}

/// Relative norm from Q(zeta_m) down to Q(zeta_target): the product of the
/// conjugates over Gal(Q(zeta_m)/Q(zeta_target)), recognized in the subfield.
pub fn relative_norm(x: &CycloRat, target: u64) -> Result<CycloRat> {
    let m = x.ctx.m;
    if m % target != 0 {
        return Err(Error::domain("target level must divide the source level"));
    }
    let mut acc = CycloRat::one(m);
    for a in 1..=m {
        if gcd(a, m) == 1 && a % target == 1 {
            acc = acc.mul(&x.galois(a)?);
        }
    }
    acc.descend(target)
}

/// Frobenius-power twist as an explicit Galois element of (Z/q_n)^x:
/// c = p^j on the d-part, trivial on the p-part.
pub fn frobenius_unit(p: u64, d: u64, n: u32, j: u32) -> u64 {
    let pn1 = p.pow(n + 1);
    if d == 1 {
        return 1;
    }
    let pj = crate::arith::pow_mod(p, j as u64, d);
    crate::arith::crt(1, pn1, pj, d)
}

/// Inverse Frobenius twist F^(-j).
pub fn frobenius_unit_inv(p: u64, d: u64, n: u32, j: u32) -> u64 {
    let c = frobenius_unit(p, d, n, j);
    let m = p.pow(n + 1) * d;
    inv_mod(c, m).expect("frobenius unit is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn script_t_level_zero_is_zeta_p() {
        let t = build_special(SpecialKind::ScriptT, 5, 0);
        assert!(t.value.eq(&CycloRat::root_power(5, 1)));
        let tt = build_special(SpecialKind::TildeT, 5, 0);
        assert!(tt.value.is_zero());
    }

    #[test]
    fn one_over_pi_instances() {
        // p=3, n=0: (1/3)(zeta + 2 zeta^2)
        let v = one_over_pi(3, 0);
        let mut expect = CycloRat::zero(3);
        expect.add_monomial_assign(1, &BigRational::new(1.into(), 3.into()));
        expect.add_monomial_assign(2, &BigRational::new(2.into(), 3.into()));
        assert!(v.eq(&expect));
        // defining identity is asserted inside for every (p, n)
        let _ = one_over_pi(3, 1);
        let _ = one_over_pi(5, 1);
        let _ = one_over_pi(7, 0);
    }

    #[test]
    fn norm_relation_smallest_case() {
        // d=1, p=3, n=1 -> 0: N(zeta_9 - 1) = zeta_3 - 1
        let x = CycloRat::root_power(9, 1).sub(&CycloRat::one(9));
        let n = relative_norm(&x, 3).unwrap();
        let expect = CycloRat::root_power(3, 1).sub(&CycloRat::one(3));
        assert!(n.eq(&expect));
    }

    #[test]
    fn relative_norm_is_transitive() {
        let x = CycloRat::root_power(27, 1)
            .sub(&CycloRat::root_power(27, 5))
            .add(&CycloRat::one(27));
        let direct = relative_norm(&x, 3).unwrap();
        let via = relative_norm(&relative_norm(&x, 9).unwrap(), 3).unwrap();
        assert!(direct.eq(&via));
    }
}
