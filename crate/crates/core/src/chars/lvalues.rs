//! Generalized Bernoulli numbers, Gauss sums, the p-adic L-values
//! L_p(1, chi) and L_p(1-k, chi), and the relative class number h^-.
//!
//! L_p(1, chi) for even nontrivial chi of conductor f is evaluated through
//! the closed formula
//!     L_p(1, chi) = -(1 - chi(p)/p) (tau(chi)/f) sum_a chibar(a) log_p(1 - zeta_f^a)
//! entirely inside Z_p[zeta_M] for a ring modulus M containing zeta_f and
//! the character values. L_p(1-k, chi) is exact:
//!     L_p(1-k, chi) = -(1 - chi omega^(-k)(p) p^(k-1)) B_{k, chi omega^(-k)} / k.

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use super::dirichlet::DirichletCharacter;
use crate::arith::{gcd, lcm};
use crate::cyclo::{CycloPadic, CycloRat, LogTable};
use crate::error::{Error, Result};
use crate::padic::val_p;

/// The Teichmüller character omega mod p (omega(a) = a mod p on roots of unity).
pub fn teich_character(p: u64) -> DirichletCharacter {
    DirichletCharacter {
        modulus: p,
        exps: vec![1],
    }
}

static BERNOULLI: Lazy<RwLock<Vec<BigRational>>> =
    Lazy::new(|| RwLock::new(vec![BigRational::one()]));

/// The k-th Bernoulli number (B_1 = -1/2).
pub fn bernoulli_number(k: usize) -> BigRational {
    {
        let have = BERNOULLI.read().unwrap();
        if k < have.len() {
            return have[k].clone();
        }
    }
    let mut have = BERNOULLI.write().unwrap();
    while have.len() <= k {
        let n = have.len(); // computing B_n
        let mut acc = BigRational::zero();
        for j in 0..n {
            acc += binomial(n as u64 + 1, j as u64) * &have[j];
        }
        let b = -acc / BigRational::from(BigInt::from(n as u64 + 1));
        have.push(b);
    }
    have[k].clone()
}

fn binomial(n: u64, k: u64) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Bernoulli polynomial B_k(x) evaluated at an exact rational.
pub fn bernoulli_poly_at(k: u32, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut xpow = BigRational::one();
    // sum_j C(k, j) B_{k-j} x^j  (coefficients in ascending powers of x)
    for j in 0..=k {
        let c = binomial(k as u64, j as u64) * bernoulli_number((k - j) as usize);
        acc += c * &xpow;
        xpow *= x;
    }
    acc
}

/// Generalized Bernoulli number B_{k,chi} of the primitive character inducing
/// chi, as an exact element of Q(zeta_ring_m); requires ord(chi) | ring_m.
pub fn bernoulli_b(k: u32, chi: &DirichletCharacter, ring_m: u64) -> CycloRat {
    let prim = chi.primitive_part();
    let f = prim.modulus;
    let mut acc = CycloRat::zero(ring_m);
    let fr = BigRational::from(BigInt::from(f));
    for a in 1..=f {
        let Some(t) = prim.eval_exp_in(a, ring_m) else {
            continue;
        };
        let b = bernoulli_poly_at(k, &(BigRational::from(BigInt::from(a)) / &fr));
        acc.add_monomial_assign(t, &b);
    }
    let scale = if k >= 1 {
        BigRational::from(BigInt::from(f)).pow(k as i32 - 1)
    } else {
        BigRational::one()
    };
    acc.scale(&scale)
}

/// Gauss sum tau(chi) = sum_a chi(a) zeta_f^a of a primitive character,
/// in the ring Q[x]/Phi_M; requires f | M and ord(chi) | M.
pub fn gauss_sum_in(chi: &DirichletCharacter, ring_m: u64) -> Result<CycloRat> {
    if !chi.is_primitive() {
        return Err(Error::domain(
            "gauss sum needs a primitive character; take primitive_part first",
        ));
    }
    let f = chi.modulus;
    if f == 1 {
        return Ok(CycloRat::one(ring_m));
    }
    assert!(ring_m % f == 0, "ring must contain zeta_f");
    let mut acc = CycloRat::zero(ring_m);
    let step = ring_m / f;
    for a in 1..f {
        let Some(t) = chi.eval_exp_in(a, ring_m) else {
            continue;
        };
        acc.add_monomial_assign((t + step * a) % ring_m, &BigRational::one());
    }
    Ok(acc)
}

/// Gauss sum in the smallest natural compositum lcm(f, ord(chi)).
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<CycloRat> {
    let ring = lcm(chi.modulus.max(1), chi.order().max(1)).max(1);
    gauss_sum_in(chi, ring)
}

/// Gauss sum with values embedded p-adically (Teichmüller scalars times
/// p-power roots inside the ring); for primitive inducing character of chi.
pub fn gauss_sum_padic(
    chi: &DirichletCharacter,
    ring_m: u64,
    p: u64,
    prec: u32,
) -> Result<CycloPadic> {
    let prim = chi.primitive_part();
    let f = prim.modulus;
    if f == 1 {
        return Ok(CycloPadic::one(ring_m, p, prec));
    }
    assert!(ring_m % f == 0, "ring must contain zeta_f");
    let step = ring_m / f;
    let mut acc = CycloPadic::zero(ring_m, p, prec);
    for a in 1..f {
        if gcd(a, f) != 1 {
            continue;
        }
        let v = prim.eval_in_padic_ring(a, ring_m, p, prec)?;
        let mono = CycloPadic::monomial(ring_m, p, prec, step * a % ring_m, BigUint::one());
        acc = acc.add(&v.mul(&mono));
    }
    Ok(acc)
}

/// B_{1,chi} of the primitive inducing character, computed p-adically as
/// (1/f) sum_a chi(a) a with values embedded in Z_p[zeta_ring_m].
pub fn bernoulli_b1_padic(
    chi: &DirichletCharacter,
    ring_m: u64,
    p: u64,
    prec: u32,
) -> Result<CycloPadic> {
    let prim = chi.primitive_part();
    let f = prim.modulus;
    let mut acc = CycloPadic::zero(ring_m, p, prec);
    for a in 1..=f {
        if f > 1 && gcd(a, f) != 1 {
            continue;
        }
        let v = prim.eval_in_padic_ring(a % f.max(1), ring_m, p, prec)?;
        acc = acc.add(&v.scale_biguint(&BigUint::from(a)));
    }
    if f == 1 {
        // B_{1,1} = 1/2
        let half = crate::padic::mod_inverse(
            &BigUint::from(2u32),
            &crate::padic::pow_p(p, prec),
        )
        .expect("2 is a p-unit");
        return Ok(CycloPadic::one(ring_m, p, prec).scale_biguint(&half));
    }
    let vpf = val_p(&BigUint::from(f), p).unwrap_or(0);
    let funit = f / (p as u64).pow(vpf);
    let modulus = crate::padic::pow_p(p, prec);
    let inv = crate::padic::mod_inverse(&(BigUint::from(funit) % &modulus), &modulus)
        .expect("prime-to-p part of f inverts");
    Ok(acc.scale_biguint(&inv).mul_p_pow(-(vpf as i64)))
}

/// Record of one computed L-value.
#[derive(Clone, Debug)]
pub struct LValueRecord {
    pub chi: DirichletCharacter,
    /// s = 1 stored as (1, 0); s = 1 - k stored as (1, k)
    pub s_point: (i32, u32),
    pub value: CycloPadic,
    pub precision: i64,
}

/// L_p(1, chi) for an even nontrivial character, computed inside the ring of
/// the supplied log table (modulus must contain zeta_f and the values of chi).
pub fn lp_at_one(chi: &DirichletCharacter, p: u64, table: &LogTable) -> Result<LValueRecord> {
    let prim = chi.primitive_part();
    if prim.is_trivial() {
        return Err(Error::domain("L_p(1, chi) needs a nontrivial character"));
    }
    if !prim.is_even() {
        return Err(Error::domain(
            "L_p(1, chi) is only computed for even characters",
        ));
    }
    let f = prim.modulus;
    let ring_m = table.m;
    let prec = table.residue_prec;
    assert!(ring_m % f == 0, "log-table ring must contain zeta_f");

    // Euler factor 1 - chi(p)/p (vanishing chi(p) when p | f).
    let one = CycloPadic::one(ring_m, p, prec);
    let euler = if f % p == 0 {
        one.clone()
    } else {
        let chip = prim.eval_in_padic_ring(p % f, ring_m, p, prec)?;
        one.sub(&chip.mul_p_pow(-1))
    };

    // sum_a chibar(a) log(1 - zeta_f^a)
    let barred = prim.inverse();
    let step = ring_m / f;
    let mut s = CycloPadic::zero(ring_m, p, prec);
    for a in 1..f {
        if gcd(a, f) != 1 {
            continue;
        }
        let l = table.log_one_minus_root(step * a % ring_m)?;
        let cv = barred.eval_in_padic_ring(a, ring_m, p, prec)?;
        s = s.add(&cv.mul(&l));
    }

    // -(euler) tau(chi) S / f, with the p-part of f going into the shift
    let tau = gauss_sum_padic(&prim, ring_m, p, prec)?;
    let vpf = val_p(&BigUint::from(f), p).unwrap_or(0);
    let funit = f / (p as u64).pow(vpf);
    let mut value = euler.mul(&tau).mul(&s).neg().mul_p_pow(-(vpf as i64));
    let modulus = crate::padic::pow_p(p, value.prec);
    let inv = crate::padic::mod_inverse(&(BigUint::from(funit) % &modulus), &modulus)
        .expect("prime-to-p part of f is a unit");
    value = value.scale_biguint(&inv);
    let precision = value.value_precision();
    Ok(LValueRecord {
        chi: prim,
        s_point: (1, 0),
        value,
        precision,
    })
}

/// L_p(1-k, chi) as an exact element of Q(zeta_ring_m) for chi of the first
/// kind: -(1 - chi omega^(-k)(p) p^(k-1)) B_{k, chi omega^(-k)} / k.
pub fn lp_at_one_minus_k(
    chi: &DirichletCharacter,
    k: u32,
    p: u64,
    ring_m: u64,
) -> Result<CycloRat> {
    if k == 0 {
        return Err(Error::domain("use k >= 1"));
    }
    let omega = teich_character(p);
    let om_inv_k = omega.inverse().power(k as u64);
    // twist on the common modulus lcm(m_chi, p)
    let common = lcm(chi.modulus.max(1), p);
    let a = chi.primitive_part().restrict_to(common);
    let b = om_inv_k.restrict_to(common);
    let twisted = a.mul(&b).primitive_part();
    let bval = bernoulli_b(k, &twisted, ring_m);
    // Euler-type factor 1 - twisted(p) p^(k-1)
    let f_tw = twisted.modulus;
    let factor = if f_tw % p == 0 || f_tw == 0 {
        CycloRat::one(ring_m)
    } else {
        let tp = twisted.eval_in_qring(p % f_tw.max(1), ring_m);
        let pk = BigRational::from(BigInt::from(p)).pow(k as i32 - 1);
        CycloRat::one(ring_m).sub(&tp.scale(&pk))
    };
    let minus_over_k = BigRational::new(BigInt::from(-1), BigInt::from(k));
    Ok(factor.mul(&bval).scale(&minus_over_k))
}

/// Relative class number h^- of Q(zeta_{p^(n+1)}) via the exact product
/// 2 p^(n+1) prod_{chi odd} (-B_{1,chi}/2); the result is asserted integral.
pub fn h_minus(p: u64, n: u32) -> Result<BigUint> {
    let m = p.pow(n + 1);
    let ring = crate::arith::euler_phi(m); // exponent of the character group
    let mut prod = CycloRat::one(ring);
    let mut count = 0usize;
    for chi in super::enumerate_characters(m) {
        if chi.parity() == -1 {
            let b = bernoulli_b(1, &chi, ring);
            prod = prod.mul(&b.scale(&BigRational::new(BigInt::from(-1), BigInt::from(2))));
            count += 1;
        }
    }
    assert_eq!(count as u64, crate::arith::euler_phi(m) / 2);
    let h = prod.scale(&BigRational::from(BigInt::from(2 * m)));
    let r = h
        .as_rational()
        .ok_or_else(|| Error::internal("h^- product is not rational"))?;
    if !r.is_integer() || !r.is_positive() {
        return Err(Error::internal(format!(
            "h^- product is not a positive integer: {r}"
        )));
    }
    Ok(r.to_integer().to_biguint().unwrap())
}

/// Decompose chi mod p^(n+1) d into (theta1 mod p, theta2 mod d, psi mod
/// p^(n+1) of the second kind), so that chi = theta1 theta2 psi on units.
pub fn decompose(
    chi: &DirichletCharacter,
    p: u64,
) -> Result<(DirichletCharacter, DirichletCharacter, DirichletCharacter)> {
    let m = chi.modulus;
    let mut ppow = 1u64;
    let mut d = m;
    while d % p == 0 {
        d /= p;
        ppow *= p;
    }
    if ppow < p {
        return Err(Error::domain("modulus must be divisible by p"));
    }
    let g = chi.group();
    let mut theta1_exp = 0u64;
    let mut psi_exp = 0u64;
    let mut d_exps = Vec::new();
    for (f, &e) in g.factors.iter().zip(&chi.exps) {
        if f.q == ppow {
            // split e over Z/(p-1) x Z/p^n
            let pm1 = p - 1;
            let pn = f.order / pm1;
            let a = crate::arith::crt(e % pm1, pm1, 0, pn);
            let b = crate::arith::crt(0, pm1, e % pn, pn);
            theta1_exp = a;
            psi_exp = b;
        } else {
            d_exps.push(e);
        }
    }
    let theta1_full = DirichletCharacter {
        modulus: ppow,
        exps: vec![theta1_exp],
    };
    let theta1 = theta1_full.restrict_to(p);
    let psi = DirichletCharacter {
        modulus: ppow,
        exps: vec![psi_exp],
    };
    let theta2 = DirichletCharacter {
        modulus: d,
        exps: d_exps,
    };
    // recomposition must reproduce chi on all units
    let e_m = g.exponent;
    for a in 1..m {
        if gcd(a, m) == 1 {
            let lhs = chi.eval_exp(a).unwrap();
            let t1 = theta1.eval_exp_in(a % p, e_m).unwrap();
            let t2 = theta2
                .eval_exp_in(if d == 1 { 0 } else { a % d }, e_m)
                .unwrap_or(0);
            let ps = psi.eval_exp_in(a % ppow, e_m).unwrap();
            assert_eq!(lhs, (t1 + t2 + ps) % e_m, "decomposition mismatch at {a}");
        }
    }
    Ok((theta1, theta2, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::enumerate_characters;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli_number(0), q(1, 1));
        assert_eq!(bernoulli_number(1), q(-1, 2));
        assert_eq!(bernoulli_number(2), q(1, 6));
        assert_eq!(bernoulli_number(4), q(-1, 30));
        assert_eq!(bernoulli_number(12), q(-691, 2730));
    }

    #[test]
    fn generalized_bernoulli_values() {
        // B_{1,chi} for the odd quadratic character mod 3: (1*1 + 2*(-1))/3 = -1/3
        let chi3 = enumerate_characters(3)
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        assert!(!chi3.is_even());
        let b = bernoulli_b(1, &chi3, 2);
        assert_eq!(b.as_rational(), Some(q(-1, 3)));
        // even nontrivial characters have B_1 = 0
        for m in [5u64, 7, 8, 12] {
            for chi in enumerate_characters(m) {
                if chi.is_even() && !chi.is_trivial() {
                    let ring = lcm(chi.order(), 1).max(1);
                    assert!(bernoulli_b(1, &chi, ring).is_zero(), "B1 even chi mod {m}");
                }
            }
        }
        // B_{2,1} = B_2 = 1/6
        let triv = DirichletCharacter::trivial(1);
        assert_eq!(bernoulli_b(2, &triv, 1).as_rational(), Some(q(1, 6)));
    }

    #[test]
    fn gauss_sum_squares() {
        // tau(quadratic mod 5)^2 = 5
        let chi = enumerate_characters(5)
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        let tau = gauss_sum(&chi).unwrap();
        assert_eq!(tau.mul(&tau).as_rational(), Some(q(5, 1)));
        // tau(trivial mod 1) = 1
        let triv = DirichletCharacter::trivial(1);
        assert_eq!(gauss_sum(&triv).unwrap().as_rational(), Some(q(1, 1)));
    }

    #[test]
    fn gauss_sum_norm_sweep() {
        // tau(chi) tau(chibar) = chi(-1) f for every primitive chi, f <= 24
        for f in 3u64..=24 {
            for chi in enumerate_characters(f) {
                if !chi.is_primitive() {
                    continue;
                }
                let ring = lcm(f, chi.order().max(1));
                let tau = gauss_sum_in(&chi, ring).unwrap();
                let taubar = gauss_sum_in(&chi.inverse(), ring).unwrap();
                let prod = tau.mul(&taubar);
                let expect = BigRational::from(BigInt::from(f as i64 * chi.parity() as i64));
                assert_eq!(
                    prod.as_rational(),
                    Some(expect),
                    "tau norm failed for conductor {f}"
                );
            }
        }
    }

    #[test]
    fn lp_at_zero_values() {
        // L_p(0, omega) = -(1 - 1) B_{1,1} = 0
        let p = 5u64;
        let om = teich_character(p);
        let v = lp_at_one_minus_k(&om, 1, p, 4).unwrap();
        assert!(v.is_zero());
        // L_p(-1, omega^2) = -(1-p) B_2 / 2 = -(1-p)/12
        let om2 = om.power(2);
        let v = lp_at_one_minus_k(&om2, 2, p, 4).unwrap();
        assert_eq!(v.as_rational(), Some(q(-(1 - 5), 12)));
    }

    #[test]
    fn h_minus_values() {
        assert_eq!(h_minus(3, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(h_minus(5, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(h_minus(7, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(h_minus(3, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(h_minus(23, 0).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn decompose_round_trip() {
        for (p, d) in [(3u64, 1u64), (3, 2), (5, 1), (5, 4), (3, 4)] {
            let m = p * p * d;
            for chi in enumerate_characters(m) {
                let (t1, t2, psi) = decompose(&chi, p).unwrap();
                assert!(t1.conductor() == 1 || t1.conductor() == p);
                assert!(d % t2.conductor().max(1) == 0);
                let fpsi = psi.conductor();
                assert!(fpsi == 1 || fpsi >= p * p, "psi is of the second kind");
            }
        }
        // chi trivial -> all trivial; chi = omega -> (omega, 1, 1)
        let om = teich_character(5);
        let (t1, t2, psi) = decompose(&om, 5).unwrap();
        assert_eq!(t1, om);
        assert!(t2.is_trivial() && psi.is_trivial());
    }
}
