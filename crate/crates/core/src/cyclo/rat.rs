//! Exact elements of Q(zeta_m) on the power basis mod Phi_m.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ctx::{cyclo_ctx, CycloCtx};
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct CycloRat {
    pub ctx: Arc<CycloCtx>,
    pub coeffs: Vec<BigRational>,
}

impl std::fmt::Debug for CycloRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CycloRat(m={}, [", self.ctx.m)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " {}*x^{}", c, i)?;
            }
        }
        write!(f, " ])")
    }
}

impl CycloRat {
    pub fn zero(m: u64) -> Self {
        let ctx = cyclo_ctx(m);
        let coeffs = vec![BigRational::zero(); ctx.phi];
        CycloRat { ctx, coeffs }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_rational(m: u64, c: BigRational) -> Self {
        let mut z = Self::zero(m);
        z.add_monomial_assign(0, &c);
        z
    }

    /// The image of zeta_m^k, i.e. the canonical reduction of x^k.
    pub fn root_power(m: u64, k: u64) -> Self {
        let mut z = Self::zero(m);
        z.add_monomial_assign(k, &BigRational::one());
        z
    }

    pub fn add_monomial_assign(&mut self, exp: u64, c: &BigRational) {
        for &(i, v) in self.ctx.rep(exp) {
            self.coeffs[i as usize] += c * BigRational::from(BigInt::from(v));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(c) when the element is the rational number c.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        assert_eq!(self.ctx.m, other.ctx.m, "modulus mismatch");
        CycloRat {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycloRat {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycloRat {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ctx.m, other.ctx.m, "modulus mismatch");
        let phi = self.ctx.phi;
        let mut conv = vec![BigRational::zero(); 2 * phi - 1];
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
        let mut out = vec![BigRational::zero(); phi];
        for (deg, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if deg < phi {
                out[deg] += c;
            } else {
                for &(i, v) in self.ctx.rep(deg as u64) {
                    out[i as usize] += &c * BigRational::from(BigInt::from(v));
                }
            }
        }
        CycloRat {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.ctx.m);
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

    /// Galois action sigma_a: zeta -> zeta^a; needs gcd(a, m) = 1.
    pub fn galois(&self, a: u64) -> Result<Self> {
        let m = self.ctx.m;
        if crate::arith::gcd(a % m.max(1), m) != 1 && m > 1 {
            return Err(Error::domain(format!("sigma_{a} needs gcd(a, {m}) = 1")));
        }
        let mut out = vec![BigRational::zero(); self.ctx.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(i, v) in self.ctx.rep(a % m * j as u64 % m) {
                out[i as usize] += c * BigRational::from(BigInt::from(v));
            }
        }
        Ok(CycloRat {
            ctx: self.ctx.clone(),
            coeffs: out,
        })
    }

    /// Express this element in the power basis of Q(zeta_target) when it
    /// lies in that subfield; hard error otherwise.
    pub fn descend(&self, target: u64) -> Result<CycloRat> {
        let m = self.ctx.m;
        assert!(m % target == 0, "target modulus must divide m");
        if target == m {
            return Ok(self.clone());
        }
        let tctx = cyclo_ctx(target);
        let step = m / target;
        // Columns: canonical reps (in modulus m) of the subfield basis x^(j*step).
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(tctx.phi);
        for j in 0..tctx.phi as u64 {
            let mut col = vec![BigRational::zero(); self.ctx.phi];
            for &(i, v) in self.ctx.rep(j * step) {
                col[i as usize] += BigRational::from(BigInt::from(v));
            }
            cols.push(col);
        }
        let sol = solve_exact(&cols, &self.coeffs).ok_or_else(|| {
            Error::internal(format!(
                "element does not lie in the subfield Q(zeta_{target})"
            ))
        })?;
        Ok(CycloRat {
            ctx: tctx,
            coeffs: sol,
        })
    }

    /// Image under the inclusion Q(zeta_m) -> Q(zeta_target) (m | target),
    /// sending x to x^(target/m) on basis monomials.
    pub fn lift_to(&self, target: u64) -> CycloRat {
        assert!(target % self.ctx.m == 0, "lift needs m | target");
        if target == self.ctx.m {
            return self.clone();
        }
        let step = target / self.ctx.m;
        let mut out = CycloRat::zero(target);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.add_monomial_assign(j as u64 * step, c);
            }
        }
        out
    }

    /// Trace to Q: the sum of all Galois conjugates, which must be rational.
    pub fn trace_to_q(&self) -> BigRational {
        let m = self.ctx.m;
        if m == 1 {
            return self.coeffs[0].clone();
        }
        let mut s = CycloRat::zero(m);
        for a in 1..m {
            if crate::arith::gcd(a, m) == 1 {
                s = s.add(&self.galois(a).unwrap());
            }
        }
        s.as_rational().expect("trace is rational")
    }

    pub fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

/// Solve sum_j x_j cols[j] = rhs exactly over Q; None if inconsistent.
pub fn solve_exact(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = rhs.len();
    let ncols = cols.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; ncols];
    let mut r = 0usize;
    for c in 0..ncols {
        let mut sel = None;
        for i in r..rows {
            if !a[i][c].is_zero() {
                sel = Some(i);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        a.swap(r, sel);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=ncols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == rows {
            break;
        }
    }
    // Consistency: rows beyond rank must have zero rhs.
    for i in r..rows {
        if !a[i][ncols].is_zero() {
            return None;
        }
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for c in 0..ncols {
        if pivot_of_col[c] != usize::MAX {
            sol[c] = a[pivot_of_col[c]][ncols].clone();
        }
    }
    // Verify (guards against free-variable underdetermination).
    for i in 0..rows {
        let mut acc = BigRational::zero();
        for c in 0..ncols {
            acc += &cols[c][i] * &sol[c];
        }
        if acc != rhs[i] {
            return None;
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn root_relations() {
        // zeta_3 + zeta_3^2 = -1
        let z1 = CycloRat::root_power(3, 1);
        let z2 = CycloRat::root_power(3, 2);
        let s = z1.add(&z2);
        assert_eq!(s.as_rational(), Some(q(-1, 1)));
        // geometric sum vanishes for m > 1
        for m in [4u64, 6, 9, 12, 20] {
            let mut s = CycloRat::zero(m);
            for k in 0..m {
                s = s.add(&CycloRat::root_power(m, k));
            }
            assert!(s.is_zero(), "sum of all m-th roots, m={m}");
        }
        assert_eq!(CycloRat::root_power(7, 0).as_rational(), Some(q(1, 1)));
    }

    #[test]
    fn galois_is_an_action() {
        let x = CycloRat::root_power(9, 1)
            .add(&CycloRat::root_power(9, 3).scale(&q(2, 5)));
        let ab = x.galois(2).unwrap().galois(5).unwrap();
        let direct = x.galois(10 % 9).unwrap();
        assert!(ab.eq(&direct));
        assert!(x.galois(1).unwrap().eq(&x));
        // conjugation is sigma_{m-1}
        let conj = CycloRat::root_power(9, 1).galois(8).unwrap();
        assert!(conj.eq(&CycloRat::root_power(9, 8)));
    }

    #[test]
    fn ring_axioms_spot_check() {
        let a = CycloRat::root_power(12, 1).add(&CycloRat::root_power(12, 5).scale(&q(3, 7)));
        let b = CycloRat::root_power(12, 2).sub(&CycloRat::one(12));
        let c = CycloRat::root_power(12, 7).scale(&q(-2, 1));
        let lhs = a.add(&b).mul(&c);
        let rhs = a.mul(&c).add(&b.mul(&c));
        assert!(lhs.eq(&rhs));
    }

    #[test]
    fn descend_recognizes_subfield_elements() {
        // zeta_9^3 = zeta_3 lives in Q(zeta_3)
        let z = CycloRat::root_power(9, 3);
        let d = z.descend(3).unwrap();
        assert!(d.eq(&CycloRat::root_power(3, 1)));
        // zeta_9 itself does not
        assert!(CycloRat::root_power(9, 1).descend(3).is_err());
    }
}
