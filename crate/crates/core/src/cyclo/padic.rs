//! Elements of Q_p(zeta_m) = Q_p[x]/Phi_m with precision-tracked p-adic
//! coefficients.
//!
//! A value is `p^(-shift) * sum_i c_i x^i` with every residue `c_i` known
//! modulo `p^prec`, so the value itself is determined modulo
//! `p^(prec - shift)`. Shifts make p-power denominators explicit (the
//! elements `T_n`, `eps_n`, `1/pi_n` all carry them) instead of losing
//! digits silently. When `p` does not split completely the ring is a
//! product of local fields; all operations below are componentwise ring
//! operations, and unit/valuation questions are answered through coefficient
//! valuations of suitable powers.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ctx::{cyclo_ctx, CycloCtx};
use super::rat::CycloRat;
use crate::error::{Error, Result};
use crate::padic::{mod_inverse, pow_p, val_p, PadicScalar};
use crate::Tri;

#[derive(Clone)]
pub struct CycloPadic {
    pub ctx: Arc<CycloCtx>,
    pub p: u64,
    pub prec: u32,
    pub shift: u32,
    pub coeffs: Vec<BigUint>,
}

impl std::fmt::Debug for CycloPadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CycloPadic(m={}, p={}, prec={}, shift={}, [",
            self.ctx.m, self.p, self.prec, self.shift
        )?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " {}*x^{}", c, i)?;
            }
        }
        write!(f, " ])")
    }
}

impl CycloPadic {
    pub fn zero(m: u64, p: u64, prec: u32) -> Self {
        let ctx = cyclo_ctx(m);
        let coeffs = vec![BigUint::zero(); ctx.phi];
        CycloPadic {
            ctx,
            p,
            prec,
            shift: 0,
            coeffs,
        }
    }

    pub fn one(m: u64, p: u64, prec: u32) -> Self {
        Self::monomial(m, p, prec, 0, BigUint::one())
    }

    /// `c * x^exp` reduced mod Phi_m.
    pub fn monomial(m: u64, p: u64, prec: u32, exp: u64, c: BigUint) -> Self {
        let mut z = Self::zero(m, p, prec);
        z.add_monomial_assign(exp, &c);
        z
    }

    pub fn add_monomial_assign(&mut self, exp: u64, c: &BigUint) {
        let modulus = pow_p(self.p, self.prec);
        for &(i, v) in self.ctx.clone().rep(exp) {
            let t = signed_mul(c, v, &modulus);
            self.coeffs[i as usize] = (&self.coeffs[i as usize] + t) % &modulus;
        }
    }

    /// Embed an exact rational element; denominators must be p-units
    /// outside their p-part, which becomes the shift.
    pub fn from_rat(x: &CycloRat, p: u64, prec: u32) -> Result<Self> {
        let mut k = 0u32; // p-part of common denominator
        let mut unit_den = BigUint::one();
        for c in &x.coeffs {
            if c.is_zero() {
                continue;
            }
            let den = c.denom().abs().to_biguint().unwrap();
            let vp = val_p(&den, p).unwrap();
            k = k.max(vp);
            let u = &den / pow_p(p, vp);
            unit_den = num_integer::Integer::lcm(&unit_den, &u);
        }
        let modulus = pow_p(p, prec);
        let inv_unit = mod_inverse(&(&unit_den % &modulus), &modulus)
            .ok_or_else(|| Error::domain("denominator is not a p-adic unit times p-power"))?;
        let scale = BigInt::from(unit_den.clone()) * BigInt::from(pow_p(p, k));
        let mut coeffs = Vec::with_capacity(x.coeffs.len());
        for c in &x.coeffs {
            // c * unit_den * p^k is an integer; embed then divide the unit out.
            let v = c * num_rational::BigRational::from(scale.clone());
            assert!(v.is_integer(), "cleared denominator must be integral");
            let mut r = v.to_integer() % BigInt::from(modulus.clone());
            if r.is_negative() {
                r += BigInt::from(modulus.clone());
            }
            coeffs.push(r.to_biguint().unwrap() * &inv_unit % &modulus);
        }
        Ok(CycloPadic {
            ctx: x.ctx.clone(),
            p,
            prec,
            shift: k,
            coeffs,
        })
    }

    pub fn value_precision(&self) -> i64 {
        self.prec as i64 - self.shift as i64
    }

    pub fn is_zero_residue(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Minimum coefficient valuation, or None if all residues vanish.
    pub fn min_coeff_val(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter_map(|c| val_p(c, self.p))
            .min()
            .filter(|v| *v < self.prec)
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.ctx.m, other.ctx.m, "modulus mismatch");
        assert_eq!(self.p, other.p, "prime mismatch");
        let s = self.shift.max(other.shift);
        (self.rescale_to_shift(s), other.rescale_to_shift(s))
    }

    fn rescale_to_shift(&self, s: u32) -> Self {
        assert!(s >= self.shift);
        let d = s - self.shift;
        if d == 0 {
            return self.clone();
        }
        let f = pow_p(self.p, d);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec + d,
            shift: s,
            coeffs: self.coeffs.iter().map(|c| c * &f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let prec = a.prec.min(b.prec);
        let m = pow_p(a.p, prec);
        CycloPadic {
            ctx: a.ctx.clone(),
            p: a.p,
            prec,
            shift: a.shift,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % &m)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let prec = a.prec.min(b.prec);
        let m = pow_p(a.p, prec);
        CycloPadic {
            ctx: a.ctx.clone(),
            p: a.p,
            prec,
            shift: a.shift,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| ((x % &m) + &m - (y % &m)) % &m)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        let m = pow_p(self.p, self.prec);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec,
            shift: self.shift,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| if c.is_zero() { c.clone() } else { &m - (c % &m) })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ctx.m, other.ctx.m, "modulus mismatch");
        assert_eq!(self.p, other.p, "prime mismatch");
        let prec = self.prec.min(other.prec);
        let modulus = pow_p(self.p, prec);
        let phi = self.ctx.phi;
        let mut conv = vec![BigUint::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        let mut out = vec![BigUint::zero(); phi];
        for (deg, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = c % &modulus;
            if deg < phi {
                out[deg] = (&out[deg] + c) % &modulus;
            } else {
                for &(i, v) in self.ctx.rep(deg as u64) {
                    let t = signed_mul(&c, v, &modulus);
                    out[i as usize] = (&out[i as usize] + t) % &modulus;
                }
            }
        }
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec,
            shift: self.shift + other.shift,
            coeffs: out,
        }
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        let mut acc = Self::one(self.ctx.m, self.p, self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn scale_biguint(&self, c: &BigUint) -> Self {
        let m = pow_p(self.p, self.prec);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec,
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|x| x * c % &m).collect(),
        }
    }

    pub fn scale_scalar(&self, c: &PadicScalar) -> Self {
        assert_eq!(self.p, c.p);
        let prec = self.prec.min(c.prec);
        let m = pow_p(self.p, prec);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec,
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|x| x * &c.residue % &m).collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        let m = pow_p(self.p, self.prec);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec,
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|x| signed_mul(x, c, &m)).collect(),
        }
    }

    /// Multiply the value by p^k (k may be negative; negative k is division,
    /// recorded in the shift).
    pub fn mul_p_pow(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        if k < 0 {
            let mut z = self.clone();
            z.shift += (-k) as u32;
            return z;
        }
        let k = k as u32;
        if self.shift >= k {
            let mut z = self.clone();
            z.shift -= k;
            return z;
        }
        let extra = k - self.shift;
        let f = pow_p(self.p, extra);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec + extra,
            shift: 0,
            coeffs: self.coeffs.iter().map(|c| c * &f).collect(),
        }
    }

    /// Divide all residues exactly by p^k (drops precision by k).
    pub fn div_residues_exact(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k > self.prec {
            return Err(Error::domain("exact division exceeds precision"));
        }
        let f = pow_p(self.p, k);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = num_integer::Integer::div_rem(c, &f);
            if !r.is_zero() {
                return Err(Error::domain("residue not divisible in exact division"));
            }
            coeffs.push(q);
        }
        Ok(CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec - k,
            shift: self.shift,
            coeffs,
        })
    }

    /// Canonical form: remove common p factors shared by all residues from
    /// the shift (costs stated residue precision, keeps value precision).
    pub fn reduce_shift(&self) -> Self {
        if self.shift == 0 {
            return self.clone();
        }
        match self.min_coeff_val() {
            Some(v) if v > 0 => {
                let k = v.min(self.shift);
                let mut z = self.div_residues_exact(k).expect("valuation checked");
                z.shift -= k;
                z
            }
            None => {
                // all residues zero: renormalize to shift 0 at value precision
                let prec = (self.prec - self.shift.min(self.prec)).max(1);
                CycloPadic::zero(self.ctx.m, self.p, prec)
            }
            _ => self.clone(),
        }
    }

    pub fn truncate_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let m = pow_p(self.p, prec);
        CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec,
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|c| c % &m).collect(),
        }
    }

    /// Galois action sigma_a.
    pub fn galois(&self, a: u64) -> Result<Self> {
        let m = self.ctx.m;
        if m > 1 && crate::arith::gcd(a % m, m) != 1 {
            return Err(Error::domain(format!("sigma_{a} needs gcd(a, {m}) = 1")));
        }
        let modulus = pow_p(self.p, self.prec);
        let mut out = vec![BigUint::zero(); self.ctx.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(i, v) in self.ctx.rep((a % m) * (j as u64) % m) {
                let t = signed_mul(c, v, &modulus);
                out[i as usize] = (&out[i as usize] + t) % &modulus;
            }
        }
        Ok(CycloPadic {
            ctx: self.ctx.clone(),
            p: self.p,
            prec: self.prec,
            shift: self.shift,
            coeffs: out,
        })
    }

    /// Three-valued equality of values modulo p^digits.
    pub fn eq_mod(&self, other: &Self, digits: i64) -> Tri {
        let (a, b) = self.align(other);
        let want = digits + a.shift as i64;
        if want <= 0 {
            return Tri::Equal;
        }
        let want = want as u32;
        let shared = a.prec.min(b.prec);
        let test = want.min(shared);
        let m = pow_p(a.p, test);
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            if x % &m != y % &m {
                return Tri::Unequal;
            }
        }
        if shared < want {
            Tri::Undecidable
        } else {
            Tri::Equal
        }
    }

    /// Is the value 0 modulo p^digits (three-valued)?
    pub fn is_zero_mod(&self, digits: i64) -> Tri {
        let z = Self::zero(self.ctx.m, self.p, self.prec + self.shift);
        self.eq_mod(&z, digits)
    }

    /// Coefficient vector as scalars (used to build lattice rows): the value
    /// times p^scale must be integral.
    pub fn to_scaled_vector(&self, scale: u32) -> Result<Vec<PadicScalar>> {
        let w = self.mul_p_pow(scale as i64).reduce_shift();
        if w.shift != 0 {
            return Err(Error::domain(
                "element is not integral at the requested ambient scale",
            ));
        }
        Ok(w.coeffs
            .iter()
            .map(|c| PadicScalar {
                p: self.p,
                prec: w.prec,
                residue: c.clone(),
            })
            .collect())
    }
}

fn signed_mul(c: &BigUint, v: i64, modulus: &BigUint) -> BigUint {
    if v >= 0 {
        c * BigUint::from(v as u64) % modulus
    } else {
        let t = c * BigUint::from((-v) as u64) % modulus;
        if t.is_zero() {
            t
        } else {
            modulus - t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_and_arithmetic() {
        // (zeta_5 - 1)(1/3 zeta_5 + ...) style smoke test: embed 1/pi for p=3, n=0
        // 1/(zeta_3 - 1) = (1/3)(zeta_3 + 2 zeta_3^2)
        let p = 3u64;
        let prec = 8u32;
        let mut inv_pi = CycloRat::zero(3);
        inv_pi.add_monomial_assign(1, &num_rational::BigRational::new(1.into(), 3.into()));
        inv_pi.add_monomial_assign(2, &num_rational::BigRational::new(2.into(), 3.into()));
        let inv_pi_p = CycloPadic::from_rat(&inv_pi, p, prec).unwrap();
        assert_eq!(inv_pi_p.shift, 1);
        let pi = CycloPadic::monomial(3, p, prec, 1, BigUint::one())
            .sub(&CycloPadic::one(3, p, prec));
        let prod = inv_pi_p.mul(&pi);
        let one = CycloPadic::one(3, p, prec);
        assert_eq!(prod.eq_mod(&one, (prec - 2) as i64), Tri::Equal);
    }

    #[test]
    fn galois_commutes_with_mul() {
        let p = 5u64;
        let prec = 6u32;
        let a = CycloPadic::monomial(25, p, prec, 1, BigUint::from(3u64))
            .add(&CycloPadic::one(25, p, prec));
        let b = CycloPadic::monomial(25, p, prec, 7, BigUint::from(2u64));
        let lhs = a.mul(&b).galois(7).unwrap();
        let rhs = a.galois(7).unwrap().mul(&b.galois(7).unwrap());
        assert_eq!(lhs.eq_mod(&rhs, prec as i64), Tri::Equal);
    }

    #[test]
    fn shift_tracking() {
        let p = 5u64;
        let x = CycloPadic::one(5, p, 6).mul_p_pow(-2); // 1/25
        assert_eq!(x.value_precision(), 4);
        let y = x.mul_p_pow(2);
        assert_eq!(y.eq_mod(&CycloPadic::one(5, p, 4), 4), Tri::Equal);
    }
}
