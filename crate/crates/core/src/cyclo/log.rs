//! The Iwasawa p-adic logarithm on Q_p(zeta_m), normalized by log p = 0.
//!
//! For an input x the routine computes log of the integral part only (the
//! p-power shift contributes log p = 0): raise to the ramification degree e
//! to clear pi-powers, strip the p-valuation, kill the Teichmüller part with
//! a (q-1)-th power, contract into 1 + p^2 O by repeated p-th powers, then
//! sum the usual series. The truncation index comes from the explicit term
//! bound v_p(w^k / k) >= j*k - floor(log_p k), never from guesswork, and all
//! the accumulated divisions are repaid from the precision budget so the
//! result's stated precision is honest.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::padic::CycloPadic;
use crate::arith::{factor, mult_order};
use crate::error::{Error, Result};
use crate::padic::{mod_inverse, pow_p};

/// Ramification data of p in Q(zeta_m): (e, d, q) with e = phi(p-part),
/// d the prime-to-p part and q = p^(order of p mod d) the residue field size.
pub fn ramification(m: u64, p: u64) -> (u64, u64, u64) {
    let mut ppart = 1u64;
    let mut d = m;
    while d % p == 0 {
        d /= p;
        ppart *= p;
    }
    let e = if ppart == 1 { 1 } else { (p - 1) * (ppart / p) };
    let f = if d <= 1 { 1 } else { mult_order(p % d, d) };
    (e, d, p.pow(f as u32))
}

/// Iwasawa logarithm of x; the result is correct modulo p^target (as a value).
///
/// Errors with `Domain` when x is 0 or has non-uniform valuation across the
/// local factors, and with `UndecidableAtPrecision` when the input does not
/// carry enough digits to certify the target.
pub fn field_log(x: &CycloPadic, target: u32) -> Result<CycloPadic> {
    let p = x.p;
    let m = x.ctx.m;
    let (e, _d, q) = ramification(m, p);
    let vpe = factor(e)
        .iter()
        .find(|&&(pp, _)| pp == p)
        .map(|&(_, k)| k)
        .unwrap_or(0);

    // The shift is a p-power factor and log p = 0, so only the integral part
    // matters; strip the coefficient p-content first (also log p = 0) so the
    // e-th power below cannot underflow the precision window.
    let mut xx = x.clone();
    xx.shift = 0;
    if xx.is_zero_residue() {
        return Err(Error::domain("logarithm of zero"));
    }
    let v0 = xx.min_coeff_val().unwrap();
    let xx = xx.div_residues_exact(v0)?;

    // Clear pi-powers and the residual p-valuation (< 1 after stripping).
    let y = xx.pow_u64(e);
    let v = y
        .min_coeff_val()
        .ok_or_else(|| Error::domain("element vanishes at this precision"))?;
    let y = y.div_residues_exact(v)?;

    // Kill the Teichmüller component.
    let mut z = y.pow_u64(q - 1);

    // Contract into 1 + p^2 O.
    let mut mpow = 0u32;
    let bound = 2 * (64 - (2 * e).leading_zeros()) + 8;
    loop {
        let one = CycloPadic::one(m, p, z.prec);
        let w = z.sub(&one);
        match w.min_coeff_val() {
            None => break,
            Some(j) if j >= 2 => break,
            Some(_) => {
                z = z.pow_u64(p);
                mpow += 1;
                if mpow > bound {
                    return Err(Error::domain(
                        "not a unit of uniform valuation: p-power contraction failed",
                    ));
                }
            }
        }
    }

    // Series sum_{k>=1} (-1)^(k+1) w^k / k with w in p^j O, j >= 2.
    let one = CycloPadic::one(m, p, z.prec);
    let w = z.sub(&one);
    let pz = w.prec;
    let j = w.min_coeff_val().unwrap_or(pz).max(2) as i64;
    let mut kmax = 0u64;
    while (j * (kmax as i64 + 1) - ilog_p(kmax + 1, p)) < pz as i64 {
        kmax += 1;
    }
    let mut acc = CycloPadic::zero(m, p, pz);
    if kmax > 0 {
        let mut wk = w.clone();
        for k in 1..=kmax {
            let vk = crate::padic::vp_u64(k, p);
            let unit = k / (p as u64).pow(vk);
            let term = wk.div_residues_exact(vk)?;
            let inv = mod_inverse(&BigUint::from(unit), &pow_p(p, term.prec)).unwrap();
            let term = term.scale_biguint(&inv);
            acc = if k % 2 == 1 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
            if k < kmax {
                wk = wk.mul(&w);
            }
        }
    }

    // log x = series / (e (q-1) p^mpow); the unit part inverts, the p-part
    // goes into the shift.
    let e_unit_part = e / (p as u64).pow(vpe);
    let mut unit_factor = BigUint::from(e_unit_part);
    unit_factor *= BigUint::from(q - 1) % pow_p(p, acc.prec);
    let inv = mod_inverse(&(unit_factor % pow_p(p, acc.prec)), &pow_p(p, acc.prec))
        .ok_or_else(|| Error::internal("e(q-1)/p^v must be a p-unit"))?;
    let mut res = acc.scale_biguint(&inv);
    res.shift += vpe + mpow;

    if res.value_precision() < target as i64 {
        return Err(Error::UndecidableAtPrecision {
            what: format!(
                "field_log reached value precision {} < target {}",
                res.value_precision(),
                target
            ),
            precision: target,
        });
    }
    Ok(res)
}

/// pi-adic valuation (normalized v(pi) = 1, v(p) = e) of a nonzero element,
/// assuming uniform valuation across local factors.
pub fn pi_valuation(x: &CycloPadic) -> Result<i64> {
    let (e, _, _) = ramification(x.ctx.m, x.p);
    let mut xx = x.clone();
    xx.shift = 0;
    if xx.is_zero_residue() {
        return Err(Error::domain("pi-valuation of zero"));
    }
    // strip whole powers of p first so the e-th power stays inside precision
    let v0 = xx.min_coeff_val().unwrap();
    let xx = xx.div_residues_exact(v0)?;
    let y = xx.pow_u64(e);
    let v = y
        .min_coeff_val()
        .ok_or_else(|| Error::domain("element vanishes at this precision"))?;
    Ok(v as i64 + (v0 as i64 - x.shift as i64) * e as i64)
}

fn ilog_p(k: u64, p: u64) -> i64 {
    let mut v = 0i64;
    let mut q = p;
    while q <= k {
        v += 1;
        q *= p;
    }
    v
}

/// Cache of Iwasawa logarithms log(1 - x^j) in a fixed ring at fixed
/// precision. Only one logarithm per divisor class gcd(j, m) is ever
/// computed; the rest are Galois translates, since
/// sigma_u(log(1 - x^g)) = log(1 - x^(g u)).
pub struct LogTable {
    pub m: u64,
    pub p: u64,
    pub residue_prec: u32,
    pub target: u32,
    base: std::sync::RwLock<std::collections::HashMap<u64, CycloPadic>>,
}

impl LogTable {
    pub fn new(m: u64, p: u64, residue_prec: u32, target: u32) -> Self {
        LogTable {
            m,
            p,
            residue_prec,
            target,
            base: std::sync::RwLock::new(std::collections::HashMap::new()),
        }
    }

    /// log(1 - x^j) for j not divisible by m.
    pub fn log_one_minus_root(&self, j: u64) -> Result<CycloPadic> {
        let m = self.m;
        let j = j % m;
        if j == 0 {
            return Err(Error::domain("log(1 - 1) is undefined"));
        }
        let g = crate::arith::gcd(j, m);
        let cached = self.base.read().unwrap().get(&g).cloned();
        let base = match cached {
            Some(b) => b,
            None => {
                let one = CycloPadic::one(m, self.p, self.residue_prec);
                let zg = CycloPadic::monomial(m, self.p, self.residue_prec, g, BigUint::one());
                let l = field_log(&one.sub(&zg), self.target)?;
                self.base.write().unwrap().insert(g, l.clone());
                l
            }
        };
        if j == g {
            return Ok(base);
        }
        // find u coprime to m with g*u = j mod m
        let cof = m / g;
        let u0 = (j / g) % cof;
        let mut u = u0;
        loop {
            if crate::arith::gcd(u, m) == 1 {
                break;
            }
            u += cof;
            assert!(u < m + cof, "unit lift must exist");
        }
        base.galois(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Tri;

    #[test]
    fn log_kills_roots_of_unity() {
        let p = 5u64;
        let prec = 20u32;
        // zeta_25 and zeta_5 and their products with -1 all map to 0
        for exp in [1u64, 5, 7] {
            let z = CycloPadic::monomial(25, p, prec, exp, BigUint::one());
            let l = field_log(&z, 10).unwrap();
            assert_eq!(l.is_zero_mod(10), Tri::Equal, "log zeta^{exp}");
        }
    }

    #[test]
    fn log_is_galois_equivariant_and_additive() {
        let p = 5u64;
        let prec = 24u32;
        let m = 25u64;
        // u = 1 - zeta + zeta^3 is a unit of Z_p[zeta_25]
        let u = CycloPadic::one(m, p, prec)
            .sub(&CycloPadic::monomial(m, p, prec, 1, BigUint::one()))
            .add(&CycloPadic::monomial(m, p, prec, 3, BigUint::one()));
        let v = CycloPadic::one(m, p, prec).add(&CycloPadic::monomial(
            m,
            p,
            prec,
            2,
            BigUint::from(5u64),
        ));
        let lu = field_log(&u, 12).unwrap();
        let lv = field_log(&v, 12).unwrap();
        let luv = field_log(&u.mul(&v), 12).unwrap();
        assert_eq!(lu.add(&lv).eq_mod(&luv, 12), Tri::Equal);
        let lug = field_log(&u.galois(7).unwrap(), 12).unwrap();
        assert_eq!(lu.galois(7).unwrap().eq_mod(&lug, 12), Tri::Equal);
    }

    #[test]
    fn log_of_nonunit_uniformizer() {
        // log(1 - zeta_5) is defined via the Iwasawa branch; check that
        // e_theta-style combinations recover log((1-zeta^2)/(1-zeta)).
        let p = 5u64;
        let prec = 24u32;
        let m = 5u64;
        let pi1 = CycloPadic::one(m, p, prec)
            .sub(&CycloPadic::monomial(m, p, prec, 1, BigUint::one()));
        let pi2 = CycloPadic::one(m, p, prec)
            .sub(&CycloPadic::monomial(m, p, prec, 2, BigUint::one()));
        let l1 = field_log(&pi1, 12).unwrap();
        let l2 = field_log(&pi2, 12).unwrap();
        // (1-zeta^2)/(1-zeta) = 1 + zeta is a unit
        let unit = CycloPadic::one(m, p, prec).add(&CycloPadic::monomial(
            m,
            p,
            prec,
            1,
            BigUint::one(),
        ));
        let lu = field_log(&unit, 12).unwrap();
        assert_eq!(l2.sub(&l1).eq_mod(&lu, 12), Tri::Equal);
    }

    #[test]
    fn pi_valuation_basics() {
        let p = 5u64;
        let prec = 12u32;
        let m = 25u64;
        let pi = CycloPadic::one(m, p, prec)
            .sub(&CycloPadic::monomial(m, p, prec, 1, BigUint::one()));
        assert_eq!(pi_valuation(&pi).unwrap(), 1);
        let pp = CycloPadic::monomial(m, p, prec, 0, BigUint::from(5u64));
        assert_eq!(pi_valuation(&pp).unwrap(), 20); // e = 20
    }
}
