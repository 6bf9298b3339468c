//! Structure of (Z/mZ)^x and Dirichlet characters on it.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::arith::{crt, divisors, euler_phi, factor, gcd, lcm, primitive_root_odd_prime_power};
use crate::cyclo::{CycloPadic, CycloRat};
use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicScalar};

/// One cyclic factor of (Z/mZ)^x with a discrete-log table on its prime-power part.
#[derive(Debug)]
pub struct CyclicFactor {
    /// generator as a unit mod m (congruent to 1 on the other prime powers)
    pub gen: u64,
    pub order: u64,
    /// the prime power q = p^a this factor lives on
    pub q: u64,
    /// generator reduced mod q
    gen_mod_q: u64,
    /// dlog table mod q for the cyclic part generated by gen_mod_q
    dlog: HashMap<u64, u64>,
}

/// (Z/mZ)^x as a product of cyclic factors with fixed generators.
#[derive(Debug)]
pub struct UnitGroup {
    pub m: u64,
    pub factors: Vec<CyclicFactor>,
    /// exponent of the group (lcm of factor orders), 1 for trivial groups
    pub exponent: u64,
}

static GROUP_CACHE: Lazy<RwLock<HashMap<u64, Arc<UnitGroup>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

pub fn ten_group(m: u64) -> Arc<UnitGroup> {
    if let Some(g) = GROUP_CACHE.read().unwrap().get(&m) {
        return g.clone();
    }
    let built = Arc::new(UnitGroup::build(m));
    let mut w = GROUP_CACHE.write().unwrap();
    w.entry(m).or_insert(built).clone()
}

impl UnitGroup {
    fn build(m: u64) -> UnitGroup {
        let mut factors = Vec::new();
        if m > 1 {
            for (p, a) in factor(m) {
                let q = p.pow(a);
                let cof = m / q;
                if p == 2 {
                    if a == 1 {
                        continue;
                    }
                    if a == 2 {
                        factors.push(Self::make_factor(m, q, cof, q - 1, 2));
                    } else {
                        factors.push(Self::make_factor(m, q, cof, q - 1, 2));
                        factors.push(Self::make_factor(m, q, cof, 5, 1 << (a - 2)));
                    }
                } else {
                    let g = primitive_root_odd_prime_power(p, a);
                    factors.push(Self::make_factor(m, q, cof, g, euler_phi(q)));
                }
            }
        }
        let exponent = factors.iter().fold(1u64, |e, f| lcm(e, f.order));
        UnitGroup {
            m,
            factors,
            exponent,
        }
    }

    fn make_factor(m: u64, q: u64, cof: u64, gen_mod_q: u64, order: u64) -> CyclicFactor {
        let gen = if cof == 1 {
            gen_mod_q % m
        } else {
            crt(1, cof, gen_mod_q % q, q)
        };
        let mut dlog = HashMap::new();
        let mut x = 1u64;
        for k in 0..order {
            dlog.entry(x).or_insert(k);
            x = x * (gen_mod_q % q) % q;
        }
        CyclicFactor {
            gen,
            order,
            q,
            gen_mod_q: gen_mod_q % q,
            dlog,
        }
    }

    /// Discrete log of `a` on each factor; None when gcd(a, m) > 1.
    pub fn dlogs(&self, a: u64) -> Option<Vec<u64>> {
        let a = a % self.m.max(1);
        if self.m <= 1 {
            return Some(vec![]);
        }
        if gcd(a, self.m) != 1 {
            return None;
        }
        let mut out = Vec::with_capacity(self.factors.len());
        let mut i = 0usize;
        while i < self.factors.len() {
            let f = &self.factors[i];
            let aq = a % f.q;
            if f.q % 2 == 0 && f.q >= 8 && f.gen_mod_q == f.q - 1 {
                // 2^a >= 8: joint decomposition aq = (-1)^s 5^k over <-1> x <5>
                let five = &self.factors[i + 1];
                debug_assert_eq!(five.q, f.q);
                match five.dlog.get(&aq) {
                    Some(&k) => {
                        out.push(0);
                        out.push(k);
                    }
                    None => {
                        let k = *five.dlog.get(&(f.q - aq)).expect("odd residue is +-5^k");
                        out.push(1);
                        out.push(k);
                    }
                }
                i += 2;
            } else {
                out.push(*f.dlog.get(&aq)?);
                i += 1;
            }
        }
        Some(out)
    }
}

/// A Dirichlet character mod m, stored by exponents on the fixed generators:
/// chi(gen_i) = zeta_{order_i}^{exps_i}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub exps: Vec<u64>,
}

impl DirichletCharacter {
    pub fn trivial(m: u64) -> Self {
        let g = ten_group(m);
        DirichletCharacter {
            modulus: m,
            exps: vec![0; g.factors.len()],
        }
    }

    pub fn group(&self) -> Arc<UnitGroup> {
        ten_group(self.modulus)
    }

    /// chi(a) as an exponent of zeta_E, E the group exponent; None when
    /// gcd(a, m) > 1 (the character value is 0 there).
    pub fn eval_exp(&self, a: u64) -> Option<u64> {
        let g = self.group();
        let dl = g.dlogs(a)?;
        let e = g.exponent;
        let mut acc: u128 = 0;
        for ((k, f), &x) in dl.iter().zip(&g.factors).zip(&self.exps) {
            acc += (*k as u128) * (x as u128) % (f.order as u128) * ((e / f.order) as u128);
        }
        Some((acc % e as u128) as u64)
    }

    /// Value as an exponent of zeta_target; requires ord(chi(a)) | target.
    pub fn eval_exp_in(&self, a: u64, target: u64) -> Option<u64> {
        let e = self.group().exponent;
        let t = self.eval_exp(a)?;
        let num = t as u128 * target as u128;
        assert!(
            num % e as u128 == 0,
            "character value of order {} does not embed in mu_{}",
            e / gcd(t, e),
            target
        );
        Some((num / e as u128 % target as u128) as u64)
    }

    pub fn order(&self) -> u64 {
        let g = self.group();
        let mut o = 1u64;
        for (f, &x) in g.factors.iter().zip(&self.exps) {
            o = lcm(o, f.order / gcd(f.order, x));
        }
        o
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&x| x == 0)
    }

    /// chi(-1) sign: +1 even, -1 odd.
    pub fn parity(&self) -> i32 {
        if self.modulus <= 2 {
            return 1;
        }
        let t = self.eval_exp(self.modulus - 1).expect("-1 is a unit");
        if t == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "same-modulus product only");
        let g = self.group();
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&g.factors)
            .map(|((a, b), f)| (a + b) % f.order)
            .collect();
        DirichletCharacter {
            modulus: self.modulus,
            exps,
        }
    }

    pub fn inverse(&self) -> Self {
        let g = self.group();
        let exps = self
            .exps
            .iter()
            .zip(&g.factors)
            .map(|(a, f)| (f.order - a % f.order) % f.order)
            .collect();
        DirichletCharacter {
            modulus: self.modulus,
            exps,
        }
    }

    /// Galois twist chi -> chi^s (raising all values to the s-th power).
    pub fn power(&self, s: u64) -> Self {
        let g = self.group();
        let exps = self
            .exps
            .iter()
            .zip(&g.factors)
            .map(|(a, f)| a * (s % f.order) % f.order)
            .collect();
        DirichletCharacter {
            modulus: self.modulus,
            exps,
        }
    }

    /// Smallest f | m such that chi factors through (Z/fZ)^x.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        'f: for f in divisors(m) {
            for a in 1..m.max(2) {
                if a % f == 1 % f && gcd(a, m) == 1 && self.eval_exp(a) != Some(0) {
                    continue 'f;
                }
            }
            return f;
        }
        m
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character of conductor f inducing chi.
    pub fn primitive_part(&self) -> DirichletCharacter {
        let f = self.conductor();
        self.restrict_to(f)
    }

    /// Express chi as a character mod `target` (conductor must divide target,
    /// target must divide... any target with cond | target works, via lifts).
    pub fn restrict_to(&self, target: u64) -> DirichletCharacter {
        assert!(
            self.conductor() <= target && target % self.conductor() == 0,
            "conductor must divide the target modulus"
        );
        let tg = ten_group(target);
        let m = self.modulus;
        let exps = tg
            .factors
            .iter()
            .map(|fac| {
                // lift fac.gen (unit mod target) to a unit mod lcm(m, target)
                // congruent to it mod target, then evaluate chi
                let big = lcm(m, target);
                let mut a = fac.gen % big;
                while gcd(a, big) != 1 || a % target != fac.gen % target {
                    a += target;
                }
                let lifted = self.eval_exp(a % m.max(1)).expect("lift is a unit");
                // convert exponent of zeta_{E_m} to exponent of zeta_{order}
                let e = self.group().exponent;
                let num = lifted as u128 * fac.order as u128;
                assert!(num % e as u128 == 0, "value order must divide factor order");
                (num / e as u128) as u64 % fac.order
            })
            .collect();
        DirichletCharacter {
            modulus: target,
            exps,
        }
    }

    /// Value embedded as a monomial of the cyclotomic ring Q[x]/Phi_L;
    /// requires ord(chi) | L. Zero element when gcd(a, m) > 1.
    pub fn eval_in_qring(&self, a: u64, ring_m: u64) -> CycloRat {
        match self.eval_exp_in(a, ring_m) {
            None => CycloRat::zero(ring_m),
            Some(t) => CycloRat::root_power(ring_m, t),
        }
    }

    /// Value as a Teichmüller scalar in Z_p; requires ord(chi) | p - 1.
    pub fn eval_padic_scalar(&self, a: u64, p: u64, prec: u32) -> Result<PadicScalar> {
        if (p - 1) % self.order() != 0 {
            return Err(Error::domain(format!(
                "character order {} does not divide p - 1 = {}",
                self.order(),
                p - 1
            )));
        }
        match self.eval_exp_in(a, p - 1) {
            None => Ok(PadicScalar::zero(p, prec)),
            Some(t) => {
                let g = primitive_root_odd_prime_power(p, 1);
                Ok(teichmuller(g, p, prec)?.pow_u64(t))
            }
        }
    }

    /// Value in Z_p[zeta_ring_m]: the prime-to-p part of the order embeds by
    /// Teichmüller (so it must divide p - 1), the p-part as a root of unity
    /// x^(ring_m / p^t).
    pub fn eval_in_padic_ring(
        &self,
        a: u64,
        ring_m: u64,
        p: u64,
        prec: u32,
    ) -> Result<CycloPadic> {
        let ord = self.order();
        let mut pt = 1u64;
        let mut s = ord;
        while s % p == 0 {
            s /= p;
            pt *= p;
        }
        if (p - 1) % s != 0 {
            return Err(Error::domain(format!(
                "character order {ord} does not embed: prime-to-p part {s} does not divide p-1"
            )));
        }
        if ring_m % pt != 0 {
            return Err(Error::domain(format!(
                "ring modulus {ring_m} lacks the p-power roots mu_{pt}"
            )));
        }
        let t = match self.eval_exp_in(a, ord) {
            None => return Ok(CycloPadic::zero(ring_m, p, prec)),
            Some(t) => t,
        };
        // zeta_ord = zeta_s^{cs} * zeta_{pt}^{cp} with cs (ord/s) + cp (ord/pt) = 1 mod ord
        let (cs, cp) = if pt == 1 {
            (1u64, 0u64)
        } else if s == 1 {
            (0u64, 1u64)
        } else {
            let inv = crate::arith::inv_mod(ord / s % s, s).expect("coprime parts");
            let cs = inv % s;
            // solve cp from cs (ord/s) + cp (ord/pt) = 1 mod ord
            let rest = (1 + ord as u128 * ord as u128
                - (cs as u128 * (ord / s) as u128) % (ord as u128))
                % ord as u128;
            let cp = rest / (ord / pt) as u128;
            debug_assert_eq!(
                (cs as u128 * (ord / s) as u128 + cp * (ord / pt) as u128) % ord as u128,
                1
            );
            (cs, cp as u64)
        };
        let scalar_exp = t as u128 * cs as u128 % s.max(1) as u128; // exponent of zeta_s
        let root_exp = t as u128 * cp as u128 % pt as u128; // exponent of zeta_{pt}
        let g = primitive_root_odd_prime_power(p, 1);
        let zs = if s == 1 {
            PadicScalar::one(p, prec)
        } else {
            teichmuller(g, p, prec)?.pow_u64(((p - 1) / s) * scalar_exp as u64)
        };
        let mono = CycloPadic::monomial(
            ring_m,
            p,
            prec,
            (ring_m / pt) * root_exp as u64 % ring_m,
            num_bigint::BigUint::from(1u32),
        );
        Ok(mono.scale_scalar(&zs))
    }
}

/// All phi(m) characters mod m in a deterministic (lexicographic) order,
/// trivial character first.
pub fn enumerate_characters(m: u64) -> Vec<DirichletCharacter> {
    let g = ten_group(m);
    let mut out = Vec::new();
    let orders: Vec<u64> = g.factors.iter().map(|f| f.order).collect();
    let total: u64 = orders.iter().product::<u64>().max(1);
    for idx in 0..total {
        let mut rest = idx;
        let mut exps = Vec::with_capacity(orders.len());
        for &o in &orders {
            exps.push(rest % o);
            rest /= o;
        }
        out.push(DirichletCharacter { modulus: m, exps });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_structures() {
        assert_eq!(ten_group(1).factors.len(), 0);
        assert_eq!(ten_group(5).factors.len(), 1);
        assert_eq!(ten_group(5).exponent, 4);
        assert_eq!(ten_group(8).factors.len(), 2);
        assert_eq!(ten_group(40).exponent, 4);
        assert_eq!(ten_group(245).exponent, 84);
    }

    #[test]
    fn character_counts_and_parity() {
        let chars = enumerate_characters(5);
        assert_eq!(chars.len(), 4);
        assert_eq!(chars.iter().filter(|c| c.is_trivial()).count(), 1);
        let quad: Vec<_> = chars.iter().filter(|c| c.order() == 2).collect();
        assert_eq!(quad.len(), 1);
        assert!(quad[0].is_even());
        let quartic: Vec<_> = chars.iter().filter(|c| c.order() == 4).collect();
        assert_eq!(quartic.len(), 2);
        assert!(quartic.iter().all(|c| !c.is_even()));
        // even characters mod p number (p-1)/2
        for p in [3u64, 5, 7, 11, 13] {
            let n_even = enumerate_characters(p).iter().filter(|c| c.is_even()).count();
            assert_eq!(n_even as u64, (p - 1) / 2);
        }
        assert_eq!(enumerate_characters(1).len(), 1);
    }

    #[test]
    fn multiplicativity_and_orthogonality() {
        for m in [5u64, 8, 12, 15, 21, 40] {
            for chi in enumerate_characters(m) {
                let e = ten_group(m).exponent;
                for a in 1..m {
                    for b in 1..m {
                        if gcd(a, m) == 1 && gcd(b, m) == 1 {
                            let lhs = chi.eval_exp(a * b % m).unwrap();
                            let rhs = (chi.eval_exp(a).unwrap() + chi.eval_exp(b).unwrap()) % e;
                            assert_eq!(lhs, rhs, "chi mod {m} at {a},{b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conductors() {
        // mod 12 = 4 * 3: conductors are 1, 3, 4, 12
        let mut conds: Vec<u64> = enumerate_characters(12).iter().map(|c| c.conductor()).collect();
        conds.sort_unstable();
        assert_eq!(conds, vec![1, 3, 4, 12]);
        // characters mod 2p all have conductor 1 or p
        for c in enumerate_characters(10) {
            assert!(c.conductor() == 1 || c.conductor() == 5);
        }
        // primitive restriction round-trips
        for c in enumerate_characters(45) {
            let prim = c.primitive_part();
            assert_eq!(prim.modulus, c.conductor());
            let back = prim.restrict_to(45);
            for a in 1..45 {
                if gcd(a, 45) == 1 {
                    assert_eq!(back.eval_exp(a), c.eval_exp(a));
                }
            }
        }
    }

    #[test]
    fn teichmuller_character_embedding_matches_scalar_lift() {
        let p = 7u64;
        let w = teich_char_for_test(p);
        for a in 1..p {
            let v = w.eval_padic_scalar(a, p, 6).unwrap();
            let t = teichmuller(a, p, 6).unwrap();
            assert_eq!(v, t, "omega({a})");
        }
    }

    fn teich_char_for_test(p: u64) -> DirichletCharacter {
        super::super::lvalues::teich_character(p)
    }
}
