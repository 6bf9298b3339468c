//! Precision-tracked arithmetic in Z_p and Q_p.
//!
//! A [`PadicScalar`] is a residue modulo `p^N` together with the precision
//! `N`; arithmetic takes the minimum of the operand precisions, and
//! division by `p^k` lowers precision by `k`. Elements of `Frac(Z_p)` with
//! p-power denominator are [`PadicFraction`]s: a scalar numerator plus an
//! explicit denominator exponent, so the bookkeeping of elements like
//! `1/p^(n+1)` stays visible instead of silently eating digits.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Tri;

/// `p^n` as a `BigUint`.
pub fn pow_p(p: u64, n: u32) -> BigUint {
    BigUint::from(p).pow(n)
}

/// p-adic valuation of a nonzero `BigUint`; `None` for zero.
pub fn val_p(x: &BigUint, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pb = BigUint::from(p);
    let mut v = 0u32;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if r.is_zero() {
            v += 1;
            y = q;
        } else {
            return Some(v);
        }
    }
}

/// p-adic valuation of a rational number (numerator minus denominator valuation).
pub fn val_p_ratio(x: &num_rational::BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let vn = val_p(&x.numer().abs().to_biguint().unwrap(), p).unwrap() as i64;
    let vd = val_p(&x.denom().abs().to_biguint().unwrap(), p).unwrap() as i64;
    Some(vn - vd)
}

/// Modular inverse of `a` modulo `m` for `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m_int;
    if x.is_negative() {
        x += &m_int;
    }
    x.to_biguint()
}

/// An element of Z_p known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    pub p: u64,
    pub prec: u32,
    pub residue: BigUint,
}

impl PadicScalar {
    pub fn new(p: u64, prec: u32, residue: BigUint) -> Self {
        let m = pow_p(p, prec);
        PadicScalar {
            p,
            prec,
            residue: residue % m,
        }
    }

    pub fn from_u64(p: u64, prec: u32, v: u64) -> Self {
        Self::new(p, prec, BigUint::from(v))
    }

    pub fn from_bigint(p: u64, prec: u32, v: &BigInt) -> Self {
        let m = BigInt::from(pow_p(p, prec));
        let mut r = v % &m;
        if r.is_negative() {
            r += &m;
        }
        PadicScalar {
            p,
            prec,
            residue: r.to_biguint().unwrap(),
        }
    }

    /// Embed an exact rational with p-unit denominator.
    pub fn from_ratio(p: u64, prec: u32, v: &num_rational::BigRational) -> Result<Self> {
        let m = pow_p(p, prec);
        let den = v.denom().abs().to_biguint().unwrap();
        let inv = mod_inverse(&(&den % &m), &m)
            .ok_or_else(|| Error::domain(format!("denominator {} not a p-unit", den)))?;
        let num = Self::from_bigint(p, prec, v.numer());
        Ok(PadicScalar::new(p, prec, num.residue * inv))
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        PadicScalar {
            p,
            prec,
            residue: BigUint::zero(),
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicScalar {
            p,
            prec,
            residue: BigUint::one(),
        }
    }

    pub fn is_zero_residue(&self) -> bool {
        self.residue.is_zero()
    }

    /// Valuation as far as it is determined; `None` means "at least `prec`".
    pub fn valuation(&self) -> Option<u32> {
        val_p(&self.residue, self.p).filter(|v| *v < self.prec)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn align(&self, other: &Self) -> (BigUint, u32) {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        (pow_p(self.p, prec), prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (m, prec) = self.align(other);
        PadicScalar {
            p: self.p,
            prec,
            residue: (&self.residue + &other.residue) % m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (m, prec) = self.align(other);
        PadicScalar {
            p: self.p,
            prec,
            residue: ((&m + &self.residue % &m) - &other.residue % &m) % &m,
        }
    }

    pub fn neg(&self) -> Self {
        let m = pow_p(self.p, self.prec);
        let r = if self.residue.is_zero() {
            BigUint::zero()
        } else {
            &m - &self.residue % &m
        };
        PadicScalar {
            p: self.p,
            prec: self.prec,
            residue: r % m,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (m, prec) = self.align(other);
        PadicScalar {
            p: self.p,
            prec,
            residue: (&self.residue * &other.residue) % m,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        let m = pow_p(self.p, self.prec);
        PadicScalar {
            p: self.p,
            prec: self.prec,
            residue: (&self.residue * BigUint::from(k)) % m,
        }
    }

    /// Multiplicative inverse; requires a unit.
    pub fn invert(&self) -> Result<Self> {
        if self.valuation() != Some(0) {
            return Err(Error::NotInvertible(format!(
                "valuation {:?} at precision {}",
                self.valuation(),
                self.prec
            )));
        }
        let m = pow_p(self.p, self.prec);
        let inv = mod_inverse(&self.residue, &m).expect("unit residue must invert");
        Ok(PadicScalar {
            p: self.p,
            prec: self.prec,
            residue: inv,
        })
    }

    /// Exact division by `p^k`; lowers precision by `k`.
    pub fn div_exact_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k > self.prec {
            return Err(Error::domain("division by p^k exceeds precision"));
        }
        let pk = pow_p(self.p, k);
        let (q, r) = self.residue.div_rem(&pk);
        if !r.is_zero() {
            return Err(Error::domain(format!(
                "residue not divisible by p^{k} in exact division"
            )));
        }
        Ok(PadicScalar {
            p: self.p,
            prec: self.prec - k,
            residue: q,
        })
    }

    /// Reduce the stated precision to `prec` digits.
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        PadicScalar {
            p: self.p,
            prec,
            residue: &self.residue % pow_p(self.p, prec),
        }
    }

    pub fn pow_u64(&self, mut e: u64) -> Self {
        let m = pow_p(self.p, self.prec);
        let mut base = self.residue.clone();
        let mut acc = BigUint::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base) % &m;
            }
            base = (&base * &base) % &m;
            e >>= 1;
        }
        PadicScalar {
            p: self.p,
            prec: self.prec,
            residue: acc,
        }
    }

    /// Three-valued equality modulo `p^digits`.
    pub fn eq_mod(&self, other: &Self, digits: u32) -> Tri {
        assert_eq!(self.p, other.p);
        let shared = self.prec.min(other.prec);
        let test = digits.min(shared);
        let m = pow_p(self.p, test);
        if &self.residue % &m != &other.residue % &m {
            return Tri::Unequal;
        }
        if shared < digits {
            Tri::Undecidable
        } else {
            Tri::Equal
        }
    }
}

/// `numerator / p^k`: an element of Frac(Z_p) with explicit p-power denominator.
#[derive(Clone, Debug)]
pub struct PadicFraction {
    pub num: PadicScalar,
    pub denom_exp: u32,
}

impl PadicFraction {
    pub fn from_scalar(num: PadicScalar) -> Self {
        PadicFraction { num, denom_exp: 0 }
    }

    pub fn new(num: PadicScalar, denom_exp: u32) -> Self {
        PadicFraction { num, denom_exp }
    }

    /// Canonical form: the numerator is a unit or the denominator exponent is 0.
    pub fn normalize(&self) -> Self {
        match self.num.valuation() {
            Some(v) if v > 0 && self.denom_exp > 0 => {
                let k = v.min(self.denom_exp);
                let num = self.num.div_exact_p_pow(k).expect("valuation checked");
                PadicFraction {
                    num,
                    denom_exp: self.denom_exp - k,
                }
            }
            _ => self.clone(),
        }
    }

    /// Valuation of the value, when determined.
    pub fn valuation(&self) -> Option<i64> {
        self.num
            .valuation()
            .map(|v| v as i64 - self.denom_exp as i64)
    }

    fn align(&self, other: &Self) -> (PadicScalar, PadicScalar, u32) {
        let k = self.denom_exp.max(other.denom_exp);
        let a = scale_up(&self.num, k - self.denom_exp);
        let b = scale_up(&other.num, k - other.denom_exp);
        (a, b, k)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, k) = self.align(other);
        PadicFraction {
            num: a.add(&b),
            denom_exp: k,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, k) = self.align(other);
        PadicFraction {
            num: a.sub(&b),
            denom_exp: k,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        PadicFraction {
            num: self.num.mul(&other.num),
            denom_exp: self.denom_exp + other.denom_exp,
        }
    }

    pub fn eq_mod(&self, other: &Self, digits: i64) -> Tri {
        let (a, b, k) = self.align(other);
        let want = digits + k as i64;
        if want <= 0 {
            return Tri::Equal;
        }
        a.eq_mod(&b, want as u32)
    }
}

/// Multiply the residue by `p^k`, which raises the known precision by `k`.
fn scale_up(x: &PadicScalar, k: u32) -> PadicScalar {
    if k == 0 {
        return x.clone();
    }
    PadicScalar {
        p: x.p,
        prec: x.prec + k,
        residue: &x.residue * pow_p(x.p, k),
    }
}

/// Teichmüller lift ω(a): the unique (p-1)-th root of unity in Z_p congruent
/// to `a` mod p, computed by iterating the Frobenius x -> x^p to stabilization.
pub fn teichmuller(a: u64, p: u64, prec: u32) -> Result<PadicScalar> {
    if p < 3 {
        return Err(Error::domain("p must be an odd prime"));
    }
    if a % p == 0 {
        return Err(Error::domain("Teichmüller lift needs gcd(a, p) = 1"));
    }
    let mut x = PadicScalar::from_u64(p, prec, a);
    for _ in 0..=prec {
        let next = x.pow_u64(p);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    // x^p is a contraction on units congruent to a fixed root; prec+1
    // iterations always stabilize modulo p^prec.
    Ok(x)
}

/// p-adic logarithm of a principal unit of Z_p (u = 1 mod p), correct mod p^prec.
pub fn log1p_unit(u: &PadicScalar, prec: u32) -> Result<PadicScalar> {
    let p = u.p;
    let one = PadicScalar::one(p, u.prec);
    let x = u.sub(&one);
    if let Some(v) = x.valuation() {
        if v == 0 {
            return Err(Error::domain("log1p_unit needs u = 1 mod p"));
        }
    }
    // Terms x^k/k have valuation >= k - log_p(k); find the cutoff where every
    // remaining term has valuation >= prec, and carry enough guard digits to
    // survive the divisions by k.
    let mut kmax = 1u64;
    while kmax as i64 - ilog_p(kmax, p) < prec as i64 {
        kmax += 1;
    }
    let guard = ilog_p(kmax, p) as u32 + 1;
    let work = prec + guard;
    let xw = PadicScalar::new(p, work, x.residue.clone());
    let m = pow_p(p, work);
    let mut term = xw.residue.clone();
    let mut acc = PadicScalar::zero(p, work);
    for k in 1..=kmax {
        let vk = vp_u64(k, p);
        // x^k / k = (x^k / p^vk) / (k / p^vk)
        let t = PadicScalar::new(p, work, term.clone());
        let t = t.div_exact_p_pow(vk.min(t.prec))?;
        let unit_part = k / (p as u64).pow(vk);
        let inv = mod_inverse(&BigUint::from(unit_part), &pow_p(p, t.prec)).unwrap();
        let t = PadicScalar::new(p, t.prec, &t.residue * inv);
        if k % 2 == 1 {
            acc = acc.truncate(t.prec).add(&t);
        } else {
            acc = acc.truncate(t.prec).sub(&t);
        }
        term = (&term * &xw.residue) % &m;
    }
    Ok(acc.truncate(prec.min(acc.prec)))
}

/// Floor of log_p(k): an upper bound for v_p(k), used in truncation bounds.
fn ilog_p(k: u64, p: u64) -> i64 {
    let mut v = 0i64;
    let mut q = p;
    while q <= k {
        v += 1;
        q *= p;
    }
    v
}

/// Exact p-adic valuation of a positive integer.
pub fn vp_u64(mut k: u64, p: u64) -> u32 {
    let mut v = 0u32;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_small_values() {
        // omega(1) = 1 and omega(p-1) = -1 at any precision
        assert_eq!(
            teichmuller(1, 5, 3).unwrap().residue,
            BigUint::from(1u64)
        );
        assert_eq!(
            teichmuller(4, 5, 3).unwrap().residue,
            BigUint::from(124u64)
        );
        // omega(2) mod 5^3: iterate 2 -> 2^5 until fixed
        let w2 = teichmuller(2, 5, 3).unwrap();
        assert_eq!(w2.residue, BigUint::from(57u64));
        assert_eq!(w2.pow_u64(4).residue, BigUint::from(1u64));
        assert_eq!(&w2.residue % BigUint::from(5u64), BigUint::from(2u64));
    }

    #[test]
    fn teichmuller_rejects_multiples_of_p() {
        assert!(teichmuller(10, 5, 3).is_err());
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let p = 7u64;
        for a in 1..7u64 {
            for b in 1..7u64 {
                let wa = teichmuller(a, p, 8).unwrap();
                let wb = teichmuller(b, p, 8).unwrap();
                let wab = teichmuller((a * b) % p, p, 8).unwrap();
                assert_eq!(wa.mul(&wb), wab, "omega({a})*omega({b})");
            }
        }
    }

    #[test]
    fn log_of_one_plus_p() {
        // log(6) in Z_5 mod 5^4: 5 - 25/2 + 125/3 = 555 mod 625
        let u = PadicScalar::from_u64(5, 4, 6);
        let l = log1p_unit(&u, 4).unwrap();
        assert_eq!(l.residue, BigUint::from(555u64));
    }

    #[test]
    fn log_is_a_homomorphism() {
        let p = 5u64;
        let prec = 10u32;
        let u = PadicScalar::from_u64(p, prec, 1 + 2 * p);
        let v = PadicScalar::from_u64(p, prec, 1 + 3 * p * p);
        let lu = log1p_unit(&u, prec).unwrap();
        let lv = log1p_unit(&v, prec).unwrap();
        let luv = log1p_unit(&u.mul(&v), prec).unwrap();
        assert_eq!(lu.add(&lv).eq_mod(&luv, prec), Tri::Equal);
        // log(u^2) = 2 log(u)
        let lu2 = log1p_unit(&u.mul(&u), prec).unwrap();
        assert_eq!(lu.add(&lu).eq_mod(&lu2, prec), Tri::Equal);
    }

    #[test]
    fn log_rejects_non_principal_units() {
        let u = PadicScalar::from_u64(5, 4, 2);
        assert!(log1p_unit(&u, 4).is_err());
    }

    #[test]
    fn invert_matches_hand_values() {
        let two = PadicScalar::from_u64(5, 4, 2);
        let inv = two.invert().unwrap();
        assert_eq!(inv.residue, BigUint::from(313u64));
        assert_eq!(two.mul(&inv).residue, BigUint::from(1u64));
        // p itself is not a unit
        assert!(PadicScalar::from_u64(5, 4, 5).invert().is_err());
        // invert is an involution
        assert_eq!(inv.invert().unwrap(), two);
    }

    #[test]
    fn valuation_is_additive() {
        let x = PadicScalar::from_u64(5, 8, 50);
        let y = PadicScalar::from_u64(5, 8, 15);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(y.valuation(), Some(1));
        assert_eq!(x.mul(&y).valuation(), Some(3));
    }

    #[test]
    fn fraction_alignment_and_normalization() {
        let p = 5u64;
        let a = PadicFraction::new(PadicScalar::from_u64(p, 6, 10), 1); // 10/5 = 2
        let b = PadicFraction::from_scalar(PadicScalar::from_u64(p, 6, 2));
        assert_eq!(a.sub(&b).num.valuation(), None); // zero at precision
        let n = a.normalize();
        assert_eq!(n.denom_exp, 0);
        assert_eq!(n.num.residue, BigUint::from(2u64));
    }

    #[test]
    fn precision_drops_on_division() {
        let x = PadicScalar::from_u64(5, 6, 75);
        let y = x.div_exact_p_pow(2).unwrap();
        assert_eq!(y.prec, 4);
        assert_eq!(y.residue, BigUint::from(3u64));
        assert!(x.div_exact_p_pow(3).is_err());
    }
}
