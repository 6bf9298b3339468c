//! Group rings acting on cyclotomic elements: Q[G] and Z_p[G] for
//! G = (Z/mZ)^x, and Z_p[Gamma_n] for the cyclic p-part Gamma_n of order p^n
//! generated by gamma_0 = sigma_{1+q_0}.
//!
//! The same module houses the finite-level shadows of Iwasawa-algebra
//! elements: truncation of a power series g(T) modulo omega_n(T) =
//! (1+T)^(p^n) - 1 into Z_p[Gamma_n] (gamma_0 <-> 1+T), its inverse through
//! character sums of prescribed eigenvalues, the Stickelberger-type sums,
//! and the idempotents e_theta, e_chi, e_d with the norm-type operators.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{euler_phi, gcd, inv_mod, pow_mod};
use crate::chars::DirichletCharacter;
use crate::cyclo::{CycloPadic, CycloRat};
use crate::error::{Error, Result};
use crate::padic::{mod_inverse, pow_p, val_p, PadicScalar};
use crate::Tri;

/// Group descriptor for group-ring elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDesc {
    /// the full unit group (Z/mZ)^x, elements indexed by sorted unit reps
    Units { m: u64 },
    /// Gamma_n of order p^n with generator gamma_0 = sigma_{1+q0}; elements
    /// indexed by the exponent of gamma_0; q0 = p*d
    Gamma { p: u64, n: u32, q0: u64 },
}

impl GroupDesc {
    pub fn order(&self) -> usize {
        match self {
            GroupDesc::Units { m } => euler_phi(*m) as usize,
            GroupDesc::Gamma { p, n, .. } => (*p as usize).pow(*n),
        }
    }

    /// Unit representatives in index order.
    pub fn reps(&self) -> Vec<u64> {
        match self {
            GroupDesc::Units { m } => {
                let mm = (*m).max(1);
                (1..=mm).filter(|&a| gcd(a, mm) == 1).collect()
            }
            GroupDesc::Gamma { p, n, .. } => (0..(*p).pow(*n)).collect(),
        }
    }

    pub fn index_of(&self, elt: u64) -> usize {
        match self {
            GroupDesc::Units { m } => {
                let e = elt % m;
                self.reps().iter().position(|&r| r == e).expect("unit rep")
            }
            GroupDesc::Gamma { p, n, .. } => (elt % (*p).pow(*n)) as usize,
        }
    }

    /// The Galois exponent (acting on zeta_ring_m) of the group element with
    /// the given index; the ring modulus must divide the group modulus.
    pub fn galois_exponent(&self, idx: usize, ring_m: u64) -> u64 {
        match self {
            GroupDesc::Units { m } => {
                assert!(
                    m % ring_m == 0,
                    "group modulus {m} must be a multiple of ring modulus {ring_m}"
                );
                self.reps()[idx] % ring_m
            }
            GroupDesc::Gamma { q0, .. } => pow_mod(1 + q0, idx as u64, ring_m),
        }
    }
}

/// Group-ring element with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct GroupRingQ {
    pub desc: GroupDesc,
    pub coeffs: Vec<BigRational>,
}

/// Group-ring element with p-adic coefficients (common p-power denominator
/// recorded in `shift`, residues mod p^prec).
#[derive(Clone, Debug)]
pub struct GroupRingP {
    pub desc: GroupDesc,
    pub p: u64,
    pub prec: u32,
    pub shift: u32,
    pub coeffs: Vec<BigUint>,
}

impl GroupRingQ {
    pub fn zero(desc: GroupDesc) -> Self {
        let n = desc.order();
        GroupRingQ {
            desc,
            coeffs: vec![BigRational::zero(); n],
        }
    }

    pub fn one(desc: GroupDesc) -> Self {
        let mut z = Self::zero(desc);
        let idx = match &z.desc {
            GroupDesc::Units { .. } => z.desc.index_of(1),
            GroupDesc::Gamma { .. } => 0,
        };
        z.coeffs[idx] = BigRational::one();
        z
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.desc, other.desc);
        GroupRingQ {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.desc, other.desc);
        GroupRingQ {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        GroupRingQ {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.desc, other.desc);
        let mut out = Self::zero(self.desc.clone());
        match &self.desc {
            GroupDesc::Gamma { p, n, .. } => {
                let ord = (*p as usize).pow(*n);
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coeffs.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        out.coeffs[(i + j) % ord] += a * b;
                    }
                }
            }
            GroupDesc::Units { m } => {
                let reps = self.desc.reps();
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coeffs.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let k = self.desc.index_of(reps[i] * reps[j] % m);
                        out.coeffs[k] += a * b;
                    }
                }
            }
        }
        out
    }

    /// sigma_a as a basis element (Units) / gamma_0^t (Gamma).
    pub fn basis_elt(desc: GroupDesc, elt: u64) -> Self {
        let mut z = Self::zero(desc);
        let i = z.desc.index_of(elt);
        z.coeffs[i] = BigRational::one();
        z
    }

    /// Apply to a rational cyclotomic element: sum coeff(g) sigma_g(v).
    pub fn act(&self, v: &CycloRat) -> Result<CycloRat> {
        let m = v.ctx.m;
        let mut acc = CycloRat::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.desc.galois_exponent(i, m);
            acc = acc.add(&v.galois(e)?.scale(c));
        }
        Ok(acc)
    }

    /// Apply to a p-adic cyclotomic element.
    pub fn act_padic(&self, v: &CycloPadic) -> Result<CycloPadic> {
        let m = v.ctx.m;
        let p = v.p;
        let mut acc = CycloPadic::zero(m, p, v.prec);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.desc.galois_exponent(i, m);
            let vp = crate::padic::val_p(
                &c.denom().abs().to_biguint().unwrap(),
                p,
            )
            .unwrap();
            let unit_den = c.denom().abs().to_biguint().unwrap() / pow_p(p, vp);
            let g = v.galois(e)?;
            let modulus = pow_p(p, g.prec);
            let inv = mod_inverse(&(&unit_den % &modulus), &modulus)
                .ok_or_else(|| Error::domain("coefficient denominator not invertible"))?;
            let num = {
                let mut r = c.numer() % BigInt::from(modulus.clone());
                if r.is_negative() {
                    r += BigInt::from(modulus.clone());
                }
                r.to_biguint().unwrap()
            };
            let term = g.scale_biguint(&(num * inv % &modulus)).mul_p_pow(-(vp as i64));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Restriction to a smaller level (Units m -> Units m'; Gamma n -> n').
    pub fn restrict(&self, target: GroupDesc) -> Self {
        let mut out = GroupRingQ::zero(target);
        match (&self.desc, &out.desc) {
            (GroupDesc::Units { m }, GroupDesc::Units { m: m2 }) => {
                assert!(m % m2 == 0);
                let reps = self.desc.reps();
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let k = out.desc.index_of(reps[i] % m2);
                    out.coeffs[k] += c;
                }
            }
            (GroupDesc::Gamma { p, n, .. }, GroupDesc::Gamma { p: p2, n: n2, .. }) => {
                assert!(p == p2 && n2 <= n);
                let ord2 = (*p as usize).pow(*n2);
                for (i, c) in self.coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        out.coeffs[i % ord2] += c;
                    }
                }
            }
            _ => panic!("incompatible restriction"),
        }
        out
    }

    pub fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a == b)
    }

    pub fn to_padic(&self, p: u64, prec: u32) -> Result<GroupRingP> {
        let mut shift = 0u32;
        for c in &self.coeffs {
            if !c.is_zero() {
                let v = val_p(&c.denom().abs().to_biguint().unwrap(), p).unwrap();
                shift = shift.max(v);
            }
        }
        let modulus = pow_p(p, prec);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let scaled = c * BigRational::from(BigInt::from(pow_p(p, shift)));
            let den = scaled.denom().abs().to_biguint().unwrap();
            let inv = mod_inverse(&(&den % &modulus), &modulus)
                .ok_or_else(|| Error::domain("denominator not prime to p"))?;
            let mut r = scaled.numer() % BigInt::from(modulus.clone());
            if r.is_negative() {
                r += BigInt::from(modulus.clone());
            }
            coeffs.push(r.to_biguint().unwrap() * inv % &modulus);
        }
        Ok(GroupRingP {
            desc: self.desc.clone(),
            p,
            prec,
            shift,
            coeffs,
        })
    }
}

impl GroupRingP {
    pub fn zero(desc: GroupDesc, p: u64, prec: u32) -> Self {
        let n = desc.order();
        GroupRingP {
            desc,
            p,
            prec,
            shift: 0,
            coeffs: vec![BigUint::zero(); n],
        }
    }

    pub fn one(desc: GroupDesc, p: u64, prec: u32) -> Self {
        let mut z = Self::zero(desc, p, prec);
        let idx = match &z.desc {
            GroupDesc::Units { .. } => z.desc.index_of(1),
            GroupDesc::Gamma { .. } => 0,
        };
        z.coeffs[idx] = BigUint::one();
        z
    }

    pub fn basis_elt(desc: GroupDesc, p: u64, prec: u32, elt: u64) -> Self {
        let mut z = Self::zero(desc, p, prec);
        let i = z.desc.index_of(elt);
        z.coeffs[i] = BigUint::one();
        z
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.desc, other.desc);
        assert_eq!(self.p, other.p);
        let s = self.shift.max(other.shift);
        (self.rescale_shift(s), other.rescale_shift(s))
    }

    fn rescale_shift(&self, s: u32) -> Self {
        let d = s - self.shift;
        if d == 0 {
            return self.clone();
        }
        let f = pow_p(self.p, d);
        GroupRingP {
            desc: self.desc.clone(),
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
        GroupRingP {
            desc: a.desc.clone(),
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
        GroupRingP {
            desc: a.desc.clone(),
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
        GroupRingP {
            desc: self.desc.clone(),
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
        assert_eq!(self.desc, other.desc);
        let prec = self.prec.min(other.prec);
        let m = pow_p(self.p, prec);
        let mut out = Self::zero(self.desc.clone(), self.p, prec);
        out.shift = self.shift + other.shift;
        match &self.desc {
            GroupDesc::Gamma { p, n, .. } => {
                let ord = (*p as usize).pow(*n);
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coeffs.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let k = (i + j) % ord;
                        out.coeffs[k] = (&out.coeffs[k] + a * b) % &m;
                    }
                }
            }
            GroupDesc::Units { m: mm } => {
                let reps = self.desc.reps();
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coeffs.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let k = self.desc.index_of(reps[i] * reps[j] % mm);
                        out.coeffs[k] = (&out.coeffs[k] + a * b) % &m;
                    }
                }
            }
        }
        out
    }

    pub fn scale_scalar(&self, c: &PadicScalar) -> Self {
        assert_eq!(self.p, c.p);
        let prec = self.prec.min(c.prec);
        let m = pow_p(self.p, prec);
        GroupRingP {
            desc: self.desc.clone(),
            p: self.p,
            prec,
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|x| x * &c.residue % &m).collect(),
        }
    }

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
        GroupRingP {
            desc: self.desc.clone(),
            p: self.p,
            prec: self.prec + extra,
            shift: 0,
            coeffs: self.coeffs.iter().map(|c| c * &f).collect(),
        }
    }

    /// Apply to a p-adic cyclotomic element.
    pub fn act(&self, v: &CycloPadic) -> Result<CycloPadic> {
        let m = v.ctx.m;
        let mut acc = CycloPadic::zero(m, v.p, v.prec.min(self.prec));
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.desc.galois_exponent(i, m);
            acc = acc.add(&v.galois(e)?.scale_biguint(c));
        }
        Ok(acc.mul_p_pow(-(self.shift as i64)))
    }

    /// Is every coefficient p-integral (shift absorbed by residues)?
    pub fn is_integral(&self) -> Tri {
        if self.shift == 0 {
            return Tri::Equal;
        }
        let mut verdict = Tri::Equal;
        for c in &self.coeffs {
            match val_p(c, self.p) {
                None => {
                    if self.prec < self.shift + 4 {
                        verdict = Tri::Undecidable;
                    }
                }
                Some(v) if v >= self.shift => {}
                Some(_) => return Tri::Unequal,
            }
        }
        verdict
    }

    /// Clear an all-divisible shift (errors if not integral).
    pub fn into_integral(&self) -> Result<Self> {
        if self.shift == 0 {
            return Ok(self.clone());
        }
        if self.is_integral() == Tri::Unequal {
            return Err(Error::domain("element is not integral"));
        }
        let f = pow_p(self.p, self.shift);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = num_integer::Integer::div_rem(c, &f);
            if !r.is_zero() {
                return Err(Error::domain("element is not integral"));
            }
            coeffs.push(q);
        }
        Ok(GroupRingP {
            desc: self.desc.clone(),
            p: self.p,
            prec: self.prec - self.shift,
            shift: 0,
            coeffs,
        })
    }

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

    /// Restriction map (sums coefficients over the kernel).
    pub fn restrict(&self, target: GroupDesc) -> Self {
        let target2 = target.clone();
        let mut out = GroupRingP::zero(target, self.p, self.prec);
        out.shift = self.shift;
        let modulus = pow_p(self.p, self.prec);
        match (&self.desc, &target2) {
            (GroupDesc::Units { m }, GroupDesc::Units { m: m2 }) => {
                assert!(m % m2 == 0);
                let reps = self.desc.reps();
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let k = target2.index_of(reps[i] % m2);
                    out.coeffs[k] = (&out.coeffs[k] + c) % &modulus;
                }
            }
            (GroupDesc::Gamma { p, n, .. }, GroupDesc::Gamma { p: p2, n: n2, .. }) => {
                assert!(p == p2 && n2 <= n);
                let ord2 = (*p as usize).pow(*n2);
                for (i, c) in self.coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        out.coeffs[i % ord2] = (&out.coeffs[i % ord2] + c) % &modulus;
                    }
                }
            }
            _ => panic!("incompatible restriction"),
        }
        out
    }

    /// Valuation of the determinant of multiplication by self on the free
    /// module Z_p[Gamma_n] (used for |Z_p[Gamma_n]/(x)| = p^v).
    pub fn mult_det_valuation(&self) -> Result<i64> {
        let GroupDesc::Gamma { p, n, .. } = &self.desc else {
            return Err(Error::domain("determinant route needs a Gamma descriptor"));
        };
        let ord = (*p as usize).pow(*n);
        // columns: self * gamma_0^j in coefficient coordinates (cyclic shifts)
        let modulus = pow_p(self.p, self.prec);
        let mut mat: Vec<Vec<BigUint>> = Vec::with_capacity(ord);
        for j in 0..ord {
            let mut col = vec![BigUint::zero(); ord];
            for (i, c) in self.coeffs.iter().enumerate() {
                col[(i + j) % ord] = c.clone();
            }
            mat.push(col);
        }
        // p-adic elimination, tracking pivot valuations
        let mut total = 0i64;
        let mut rows: Vec<Vec<BigUint>> = (0..ord)
            .map(|i| (0..ord).map(|j| mat[j][i].clone()).collect())
            .collect();
        for col in 0..ord {
            let mut best: Option<(usize, u32)> = None;
            for (i, row) in rows.iter().enumerate().skip(col) {
                if let Some(v) = val_p(&row[col], self.p) {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((bi, v)) = best else {
                return Err(Error::UndecidableAtPrecision {
                    what: "singular multiplication matrix at precision".into(),
                    precision: self.prec,
                });
            };
            rows.swap(col, bi);
            total += v as i64;
            let unit = &rows[col][col] / pow_p(self.p, v);
            let inv = mod_inverse(&unit, &modulus).expect("unit inverts");
            let pivot_row: Vec<BigUint> = rows[col].iter().map(|x| x * &inv % &modulus).collect();
            for i in col + 1..ord {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = &rows[i][col] / pow_p(self.p, v);
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    let t = y * &q % &modulus;
                    *x = ((&*x + &modulus) - t) % &modulus;
                }
            }
        }
        Ok(total - (self.shift as i64) * ord as i64)
    }
}

/// Norm element T_G = sum of all group elements.
pub fn norm_element_q(desc: GroupDesc) -> GroupRingQ {
    let mut z = GroupRingQ::zero(desc);
    for c in z.coeffs.iter_mut() {
        *c = BigRational::one();
    }
    z
}

/// The section of Delta inside (Z/MZ)^x: the unique element of prime-to-p
/// order congruent to delta mod q0 (M = p^(n+1) d, q0 = p d). Computed as
/// delta^(p^n u) with p^n u = 1 mod |Delta|, which kills the Gamma-part.
pub fn delta_section(delta: u64, p: u64, d: u64, n: u32) -> u64 {
    let m = p.pow(n + 1) * d;
    let delta_order = euler_phi(p * d);
    let pn = p.pow(n);
    let u = inv_mod(pn % delta_order, delta_order)
        .expect("p must not divide |Delta| = phi(pd)");
    pow_mod(delta, pn * u, m)
}

/// Idempotent e_theta = (1/|Delta|) sum thetabar(delta) section(delta) as an
/// element of Z_p[(Z/MZ)^x], M = p^(n+1) d. Requires ord(theta) | p - 1.
pub fn idempotent_delta(
    theta: &DirichletCharacter,
    p: u64,
    d: u64,
    n: u32,
    prec: u32,
) -> Result<GroupRingP> {
    let m = p.pow(n + 1) * d;
    let q0 = p * d;
    assert!(theta.modulus == q0 || q0 % theta.modulus == 0);
    let desc = GroupDesc::Units { m };
    let mut out = GroupRingP::zero(desc.clone(), p, prec);
    let modulus = pow_p(p, prec);
    let size = euler_phi(q0);
    let inv_size = mod_inverse(&BigUint::from(size), &modulus)
        .ok_or_else(|| Error::domain("|Delta| must be prime to p"))?;
    let bar = theta.inverse();
    for delta in 1..=q0 {
        if gcd(delta, q0) != 1 {
            continue;
        }
        let val = bar.eval_padic_scalar(delta % theta.modulus.max(1), p, prec)?;
        let s = delta_section(delta, p, d, n);
        let idx = desc.index_of(s);
        out.coeffs[idx] = (&out.coeffs[idx] + val.residue * &inv_size) % &modulus;
    }
    Ok(out)
}

/// Norm-type element T_Delta = sum over the Delta-section, in Z_p[(Z/MZ)^x].
pub fn t_delta(p: u64, d: u64, n: u32, prec: u32) -> GroupRingP {
    let m = p.pow(n + 1) * d;
    let q0 = p * d;
    let desc = GroupDesc::Units { m };
    let mut out = GroupRingP::zero(desc.clone(), p, prec);
    for delta in 1..=q0 {
        if gcd(delta, q0) != 1 {
            continue;
        }
        let s = delta_section(delta, p, d, n);
        let idx = desc.index_of(s);
        out.coeffs[idx] += BigUint::one();
    }
    out
}

/// Conductor-level idempotent e_i on Gamma_n (i = 0..n): difference of the
/// partial norm projectors (1/p^(n-k)) N_k for k = i, i-1.
pub fn idempotent_conductor_level(p: u64, n: u32, q0: u64, i: u32) -> GroupRingQ {
    assert!(i <= n);
    let desc = GroupDesc::Gamma { p, n, q0 };
    let ord = (p as usize).pow(n);
    // pi_k := (1/p^(n-k)) sum_{gamma in Gal(K_n/K_k)} gamma = projector onto level <= k
    let proj = |k: i64| -> GroupRingQ {
        let mut z = GroupRingQ::zero(desc.clone());
        if k < 0 {
            return z; // empty projector
        }
        let sub = (p as usize).pow(n - k as u32); // |Gal(K_n/K_k)| = p^(n-k)
        let w = BigRational::new(BigInt::one(), BigInt::from(sub as u64));
        let step = ord / sub;
        for t in 0..sub {
            z.coeffs[t * step % ord.max(1)] += &w;
        }
        z
    };
    proj(i as i64).sub(&proj(i as i64 - 1))
}

/// l_n = sum_{i=0..n} p^(n-i) e_i in Q_p[Gamma_n].
pub fn ell_operator(p: u64, n: u32, q0: u64) -> GroupRingQ {
    let desc = GroupDesc::Gamma { p, n, q0 };
    let mut acc = GroupRingQ::zero(desc);
    for i in 0..=n {
        let e = idempotent_conductor_level(p, n, q0, i);
        acc = acc.add(&e.scale(&BigRational::from(BigInt::from(p).pow(n - i))));
    }
    acc
}

/// Inverse companion sum_{i=0..n} p^(i-n) e_i (so that l_n times it is 1).
pub fn ell_operator_companion(p: u64, n: u32, q0: u64) -> GroupRingQ {
    let desc = GroupDesc::Gamma { p, n, q0 };
    let mut acc = GroupRingQ::zero(desc);
    for i in 0..=n {
        let e = idempotent_conductor_level(p, n, q0, i);
        let w = BigRational::new(BigInt::one(), BigInt::from(p).pow(n - i));
        acc = acc.add(&e.scale(&w));
    }
    acc
}

/// Stickelberger-type element (1/p^(n+1)) sum_{a coprime to p} a sigma_a
/// in Q[(Z/p^(n+1)Z)^x].
pub fn stickelberger_eps(p: u64, n: u32) -> GroupRingQ {
    let m = p.pow(n + 1);
    let desc = GroupDesc::Units { m };
    let mut out = GroupRingQ::zero(desc.clone());
    let den = BigRational::new(BigInt::one(), BigInt::from(m));
    for a in 1..m {
        if a % p == 0 {
            continue;
        }
        let idx = desc.index_of(a);
        out.coeffs[idx] += &den * BigRational::from(BigInt::from(a));
    }
    out
}

/// Twisted Stickelberger-type element on Gamma_n:
/// (1/p^(n+1)) sum_{a} a (theta omega^(-1))(a) gamma_n(a), with the Gamma_n
/// component gamma_n(a) computed by discrete log in 1 + pZ/p^(n+1).
/// Coefficients land in Z_p[theta]; integrality is checked by the caller
/// (it fails exactly for theta omega^(-1) = omega^(-1)).
pub fn stickelberger_eps_twisted(
    theta: &DirichletCharacter,
    p: u64,
    n: u32,
    prec: u32,
) -> Result<GroupRingP> {
    let m = p.pow(n + 1);
    let q0 = p;
    let desc = GroupDesc::Gamma { p, n, q0 };
    let omega = crate::chars::teich_character(p);
    let tw = theta
        .primitive_part()
        .restrict_to(p)
        .mul(&omega.inverse());
    let work = prec + n + 1;
    let modulus = pow_p(p, work);
    let g = crate::arith::primitive_root_odd_prime_power(p, 1);
    let zeta = crate::padic::teichmuller(g, p, work)?;
    let mut coeffs = vec![BigUint::zero(); (p as usize).pow(n)];
    for a in 1..m {
        if a % p == 0 {
            continue;
        }
        let Some(chi_exp) = tw.eval_exp(a % p) else {
            continue;
        };
        let val = zeta.pow_u64(chi_exp).residue;
        let t = gamma_component_exponent(a, p, n);
        let idx = t as usize;
        coeffs[idx] = (&coeffs[idx] + BigUint::from(a) * val) % &modulus;
    }
    Ok(GroupRingP {
        desc,
        p,
        prec: work,
        shift: n + 1,
        coeffs,
    })
}

/// The exponent t with gamma_n(a) = gamma_0^t: a * omega(a)^(-1) =
/// (1+p)^t mod p^(n+1) (d = 1 situation).
pub fn gamma_component_exponent(a: u64, p: u64, n: u32) -> u64 {
    let m = p.pow(n + 1);
    let w = crate::padic::teichmuller(a % p, p, n + 1)
        .expect("unit")
        .residue
        .to_u64()
        .expect("fits");
    let winv = inv_mod(w % m, m).expect("unit");
    let target = a % m * winv % m;
    // discrete log base 1+p in the cyclic group 1 + pZ/p^(n+1) of order p^n
    let mut x = 1u64;
    for t in 0..p.pow(n) {
        if x == target {
            return t;
        }
        x = x * (1 + p) % m;
    }
    panic!("discrete log must exist for principal units")
}

/// Truncated power series over Z_p in the variable T.
#[derive(Clone, Debug)]
pub struct TruncatedPowerSeries {
    pub p: u64,
    pub prec: u32,
    pub coeffs: Vec<BigUint>,
}

impl TruncatedPowerSeries {
    pub fn new(p: u64, prec: u32, coeffs: Vec<BigUint>) -> Self {
        let m = pow_p(p, prec);
        TruncatedPowerSeries {
            p,
            prec,
            coeffs: coeffs.into_iter().map(|c| c % &m).collect(),
        }
    }

    /// Image in Z_p[Gamma_n] under gamma_0 <-> 1+T: write
    /// g = sum_b a_n(b) (1+T)^b mod omega_n, return sum a_n(b) gamma_0^b.
    pub fn reduce_mod_omega(&self, n: u32, q0: u64) -> Result<GroupRingP> {
        let p = self.p;
        let ord = (p as usize).pow(n);
        if self.coeffs.len() < ord {
            return Err(Error::domain(format!(
                "truncation degree {} is below p^n = {ord}",
                self.coeffs.len()
            )));
        }
        let modulus = pow_p(p, self.prec);
        // Substitute T = S - 1 and reduce mod S^(p^n) - 1: accumulate
        // (S-1)^j by iterated multiplication in Z[S]/(S^ord - 1).
        let mut spow = vec![BigUint::zero(); ord]; // (S-1)^0 = 1
        spow[0] = BigUint::one();
        let mut acc = vec![BigUint::zero(); ord];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                for (k, s) in spow.iter().enumerate() {
                    acc[k] = (&acc[k] + c * s) % &modulus;
                }
            }
            if j + 1 < self.coeffs.len() {
                // multiply spow by (S - 1)
                let mut next = vec![BigUint::zero(); ord];
                for (k, s) in spow.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    next[(k + 1) % ord] = (&next[(k + 1) % ord] + s) % &modulus;
                    next[k] = ((&next[k] + &modulus) - (s % &modulus)) % &modulus;
                }
                spow = next;
            }
        }
        Ok(GroupRingP {
            desc: GroupDesc::Gamma { p, n, q0 },
            p,
            prec: self.prec,
            shift: 0,
            coeffs: acc,
        })
    }
}

/// Rebuild the unique element eps of Z_p[Gamma_n]-with-values with
/// e_chi eps = values(chi) e_chi for every character chi of Gamma_n. The
/// values live in a common p-adic cyclotomic ring containing mu_{p^n};
/// coefficients are checked to descend to scalars (Galois stability) and
/// returned as a Gamma_n group-ring element.
///
/// Character convention: chi runs over exponents c = 0..p^n-1 with
/// chi_c(gamma_0) = zeta_{p^n}^c, zeta_{p^n} = x^(ring_m / p^n).
pub fn element_from_l_values(
    values: &[CycloPadic],
    p: u64,
    n: u32,
    q0: u64,
) -> Result<GroupRingP> {
    let ord = (p as usize).pow(n);
    assert_eq!(values.len(), ord, "one value per character of Gamma_n");
    let ring_m = values[0].ctx.m;
    assert!(
        n == 0 || ring_m % p.pow(n) == 0,
        "value ring must contain mu_{{p^n}}"
    );
    let zeta_step = if n == 0 { 0 } else { ring_m / p.pow(n) };
    // coefficient of gamma_0^b: (1/p^n) sum_c values[c] zeta^(-cb)
    let mut scalars: Vec<(PadicScalar, u32)> = Vec::with_capacity(ord);
    for b in 0..ord {
        let mut acc: Option<CycloPadic> = None;
        for (c, v) in values.iter().enumerate() {
            let e = (ord - (c * b) % ord) % ord; // zeta^(-cb)
            let mono =
                CycloPadic::monomial(ring_m, p, v.prec, zeta_step * e as u64, BigUint::one());
            let term = v.mul(&mono);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        let acc = acc.expect("ord >= 1").mul_p_pow(-(n as i64));
        scalars.push(extract_scalar(&acc)?);
    }
    let max_shift = scalars.iter().map(|s| s.1).max().unwrap_or(0);
    let prec = scalars
        .iter()
        .map(|s| s.0.prec + (max_shift - s.1))
        .min()
        .unwrap_or(1);
    let modulus = pow_p(p, prec);
    let final_coeffs: Vec<BigUint> = scalars
        .into_iter()
        .map(|(s, sh)| s.residue * pow_p(p, max_shift - sh) % &modulus)
        .collect();
    Ok(GroupRingP {
        desc: GroupDesc::Gamma { p, n, q0 },
        p,
        prec,
        shift: max_shift,
        coeffs: final_coeffs,
    })
}

/// Check that a ring element is a scalar (only the constant coordinate may
/// be nonzero) and return it with its shift.
fn extract_scalar(x: &CycloPadic) -> Result<(PadicScalar, u32)> {
    for (i, c) in x.coeffs.iter().enumerate() {
        if i != 0 && !c.is_zero() {
            // tolerate junk below the precision floor? no: exact residues
            return Err(Error::domain(format!(
                "coefficient fails Galois descent: coordinate {i} is {c}"
            )));
        }
    }
    Ok((
        PadicScalar {
            p: x.p,
            prec: x.prec,
            residue: x.coeffs[0].clone(),
        },
        x.shift,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_desc(p: u64, n: u32) -> GroupDesc {
        GroupDesc::Gamma { p, n, q0: p }
    }

    #[test]
    fn idempotents_on_gamma() {
        let (p, n, q0) = (3u64, 2u32, 3u64);
        // completeness: sum of e_i = 1
        let mut acc = GroupRingQ::zero(gamma_desc(p, n));
        for i in 0..=n {
            acc = acc.add(&idempotent_conductor_level(p, n, q0, i));
        }
        assert!(acc.eq(&GroupRingQ::one(gamma_desc(p, n))));
        // orthogonality and idempotency
        for i in 0..=n {
            let ei = idempotent_conductor_level(p, n, q0, i);
            assert!(ei.mul(&ei).eq(&ei), "e_{i} idempotent");
            for j in 0..=n {
                if i != j {
                    let ej = idempotent_conductor_level(p, n, q0, j);
                    assert!(ei.mul(&ej).eq(&GroupRingQ::zero(gamma_desc(p, n))));
                }
            }
        }
        // l_n composed with its companion is the identity
        let l = ell_operator(p, n, q0);
        let comp = ell_operator_companion(p, n, q0);
        assert!(l.mul(&comp).eq(&GroupRingQ::one(gamma_desc(p, n))));
    }

    #[test]
    fn delta_idempotents() {
        let (p, d, n) = (5u64, 1u64, 1u32);
        let prec = 12u32;
        let chars = crate::chars::enumerate_characters(p);
        let mut total = GroupRingP::zero(GroupDesc::Units { m: p.pow(n + 1) }, p, prec);
        for theta in &chars {
            let e = idempotent_delta(theta, p, d, n, prec).unwrap();
            // idempotent
            assert_eq!(e.mul(&e).eq_mod(&e, prec as i64 - 2), Tri::Equal);
            total = total.add(&e);
        }
        // completeness
        let one = GroupRingP::one(GroupDesc::Units { m: p.pow(n + 1) }, p, prec);
        assert_eq!(total.eq_mod(&one, prec as i64 - 2), Tri::Equal);
        // orthogonality of two distinct
        let e0 = idempotent_delta(&chars[1], p, d, n, prec).unwrap();
        let e1 = idempotent_delta(&chars[2], p, d, n, prec).unwrap();
        let z = GroupRingP::zero(GroupDesc::Units { m: p.pow(n + 1) }, p, prec);
        assert_eq!(e0.mul(&e1).eq_mod(&z, prec as i64 - 2), Tri::Equal);
    }

    #[test]
    fn stickelberger_small_instance() {
        // p=3, n=0: (1/3)(sigma_1 + 2 sigma_2)
        let e = stickelberger_eps(3, 0);
        let r = BigRational::new(BigInt::one(), BigInt::from(3));
        assert_eq!(e.coeffs[0], r);
        assert_eq!(e.coeffs[1], &r * BigRational::from(BigInt::from(2)));
    }

    #[test]
    fn restriction_defect_of_stickelberger() {
        // restriction of eps_{n+1} to G_n equals eps_n + ((p-1)/2) N_n
        for p in [3u64, 5] {
            for n in [0u32, 1] {
                let big = stickelberger_eps(p, n + 1);
                let small = stickelberger_eps(p, n);
                let res = big.restrict(GroupDesc::Units { m: p.pow(n + 1) });
                let norm = norm_element_q(GroupDesc::Units { m: p.pow(n + 1) });
                let defect = BigRational::new(BigInt::from(p - 1), BigInt::from(2));
                let expect = small.add(&norm.scale(&defect));
                assert!(res.eq(&expect), "p={p}, n={n}");
            }
        }
    }

    #[test]
    fn series_reduction_basics() {
        let p = 5u64;
        let prec = 10u32;
        // g = 1 -> identity
        let g = TruncatedPowerSeries::new(p, prec, vec![BigUint::one(); 1]);
        let e = g.reduce_mod_omega(0, p).unwrap();
        assert_eq!(e.coeffs[0], BigUint::one());
        // g = 1 + T -> gamma_0
        let g = TruncatedPowerSeries::new(
            p,
            prec,
            vec![BigUint::one(), BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::zero()],
        );
        let e = g.reduce_mod_omega(1, p).unwrap();
        assert_eq!(e.coeffs[1], BigUint::one());
        assert!(e.coeffs[0].is_zero());
    }

    #[test]
    fn gamma_component_dlog() {
        let (p, n) = (5u64, 2u32);
        for a in [1u64, 2, 6, 26, 124, 101] {
            if a % p == 0 {
                continue;
            }
            let t = gamma_component_exponent(a, p, n);
            // check: a = omega(a) (1+p)^t mod p^(n+1)
            let m = p.pow(n + 1);
            let w = crate::padic::teichmuller(a % p, p, n + 1)
                .unwrap()
                .residue
                .to_u64()
                .unwrap();
            assert_eq!(w * pow_mod(1 + p, t, m) % m, a % m);
        }
    }
}
