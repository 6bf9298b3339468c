//! The registry of machine checks, one per verified statement, each
//! returning a [`VerificationReport`] with re-checkable witnesses.

pub mod section1;
pub mod section2;

use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use crate::chars::DirichletCharacter;
use crate::cyclo::{CycloPadic, CycloRat, DottedTCorrection, LogTable};
use crate::error::{Error, Result};
use crate::lab::report::{CheckStatus, VerificationReport};
use crate::lattice::default_precision;

/// Parameters of one check run.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Params {
    pub p: u64,
    #[serde(default = "one")]
    pub d: u64,
    #[serde(default)]
    pub n: u32,
    /// sub-level for the norm relation
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    /// working precision override
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    /// reading of the constant in the conductor-d twisted sum
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_correction: Option<bool>,
}

fn one() -> u64 {
    1
}

impl Params {
    pub fn new(p: u64, d: u64, n: u32) -> Params {
        Params {
            p,
            d,
            n,
            i: None,
            precision: None,
            scalar_correction: None,
        }
    }

    pub fn with_i(mut self, i: u32) -> Params {
        self.i = Some(i);
        self
    }

    pub fn dotted_mode(&self) -> DottedTCorrection {
        if self.scalar_correction == Some(true) {
            DottedTCorrection::ScalarDMinusOne
        } else {
            DottedTCorrection::FrobeniusMinusOne
        }
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("params serialize")
    }
}

/// Shared computational context for one (p, d, n) at one precision.
pub struct Ctx {
    pub p: u64,
    pub d: u64,
    pub n: u32,
    /// ring modulus q_n = p^(n+1) d
    pub m: u64,
    /// residue precision for building ring elements
    pub prec: u32,
    /// value-precision target of logarithms and comparisons
    pub target: u32,
    pub table: LogTable,
}

impl Ctx {
    pub fn new(params: &Params) -> Ctx {
        let Params { p, d, n, .. } = *params;
        let target = params.precision.unwrap_or_else(|| default_precision(p, n));
        let prec = crate::lab::units::residue_precision(p, n, target);
        let m = p.pow(n + 1) * d;
        Ctx {
            p,
            d,
            n,
            m,
            prec,
            target,
            table: LogTable::new(m, p, prec, target),
        }
    }

    /// Comparison precision: everything is asserted modulo p^(target - 8).
    pub fn tolerance(&self) -> i64 {
        self.target as i64 - 8
    }

    pub fn one(&self) -> CycloPadic {
        CycloPadic::one(self.m, self.p, self.prec)
    }

    pub fn monomial(&self, e: u64) -> CycloPadic {
        CycloPadic::monomial(self.m, self.p, self.prec, e, num_bigint::BigUint::from(1u32))
    }

    /// zeta_{q_n} = alpha zeta_{p^(n+1)} as a monomial exponent.
    pub fn zeta_qn_exp(&self) -> u64 {
        crate::cyclo::zeta_qi_exponent(self.p, self.d, self.n, self.n, 0)
    }

    /// The Delta-section Galois exponent of delta in (Z/q0)^x.
    pub fn section(&self, delta: u64) -> u64 {
        crate::group_ring::delta_section(delta, self.p, self.d, self.n)
    }

    /// Embed an exact element.
    pub fn embed(&self, x: &CycloRat) -> Result<CycloPadic> {
        CycloPadic::from_rat(&x.lift_to(self.m), self.p, self.prec)
    }

    /// chibar(a) as a Teichmüller scalar (requires ord | p-1).
    pub fn bar_scalar(&self, chi: &DirichletCharacter, a: u64) -> Result<crate::padic::PadicScalar> {
        chi.inverse()
            .eval_padic_scalar(a % chi.modulus.max(1), self.p, self.prec)
    }

    /// Second-kind character psi_c mod p^(n+1) with psi_c(gamma_0) = zeta_{p^n}^c.
    pub fn second_kind_character(&self, c: u64) -> DirichletCharacter {
        second_kind_character(self.p, self.d, self.n, c)
    }

    /// e_chi applied to a ring element, chi the character of Gamma_n with
    /// chi(gamma_0) = zeta_{p^n}^c.
    pub fn e_chi_apply(&self, c: u64, v: &CycloPadic) -> Result<CycloPadic> {
        let p = self.p;
        let n = self.n;
        let ord = p.pow(n);
        let q0 = self.p * self.d;
        let zeta_step = if n == 0 { 0 } else { self.m / ord };
        let mut acc: Option<CycloPadic> = None;
        for t in 0..ord {
            let g = crate::arith::pow_mod(1 + q0, t, self.m);
            let conj = v.galois(g)?;
            let e = if ord == 1 { 0 } else { (ord - (c * t) % ord) % ord };
            let mono = self.monomial(zeta_step * e % self.m.max(1));
            let term = conj.mul(&mono);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        Ok(acc.expect("ord >= 1").mul_p_pow(-(n as i64)))
    }

    /// The level k of the Gamma_n-character with exponent c (conductor of the
    /// associated second-kind character is p^(k+1), k = 0 for c = 0).
    pub fn chi_level(&self, c: u64) -> u32 {
        if c == 0 {
            return 0;
        }
        let ord = self.p.pow(self.n) / crate::arith::gcd(c, self.p.pow(self.n));
        let mut k = 0u32;
        let mut q = 1u64;
        while q < ord {
            q *= self.p;
            k += 1;
        }
        k
    }

    /// theta(F^j) as a Teichmüller scalar: theta evaluated at the integer
    /// congruent to p^j mod d and 1 mod p.
    pub fn theta_frob(
        &self,
        theta: &DirichletCharacter,
        j: u32,
    ) -> Result<crate::padic::PadicScalar> {
        if self.d == 1 {
            return Ok(crate::padic::PadicScalar::one(self.p, self.prec));
        }
        let c = crate::arith::crt(1, self.p, crate::arith::pow_mod(self.p, j as u64, self.d), self.d);
        theta.eval_padic_scalar(c % theta.modulus.max(1), self.p, self.prec)
    }
}

/// Teichmüller scalar realization of zeta_d^t for d | p-1.
pub fn scalar_root(p: u64, prec: u32, d: u64, t: u64) -> Result<crate::padic::PadicScalar> {
    assert!((p - 1) % d == 0, "needs d | p-1");
    let g = crate::arith::primitive_root_odd_prime_power(p, 1);
    Ok(crate::padic::teichmuller(g, p, prec)?.pow_u64((p - 1) / d * (t % d.max(1))))
}

/// Log cache for elements 1 - zeta_d^t zeta_{p^(n+1)}^j with the d-part a
/// Teichmüller scalar: everything lives in the field Q_p(zeta_{p^(n+1)}).
/// One log per (t, gcd-class of j); the rest are Galois translates on the
/// p-part (which fixes the scalar).
pub struct ScalarAlphaLogs {
    pub p: u64,
    pub d: u64,
    pub n: u32,
    pub prec: u32,
    pub target: u32,
    base: std::sync::RwLock<std::collections::HashMap<(u64, u64), CycloPadic>>,
}

impl ScalarAlphaLogs {
    pub fn new(p: u64, d: u64, n: u32, prec: u32, target: u32) -> Self {
        ScalarAlphaLogs {
            p,
            d,
            n,
            prec,
            target,
            base: std::sync::RwLock::new(std::collections::HashMap::new()),
        }
    }

    /// log(1 - zeta_d^t x^j); (t, j) != (0, 0) mod (d, p^(n+1)).
    pub fn log(&self, t: u64, j: u64) -> Result<CycloPadic> {
        let m = self.p.pow(self.n + 1);
        let t = t % self.d.max(1);
        let j = j % m;
        if t == 0 && j == 0 {
            return Err(Error::domain("log(1 - 1) is undefined"));
        }
        let g = crate::arith::gcd(j, m);
        let key = (t, g);
        let cached = self.base.read().unwrap().get(&key).cloned();
        let base = match cached {
            Some(b) => b,
            None => {
                let alpha = scalar_root(self.p, self.prec, self.d.max(1), t)?;
                let one = CycloPadic::one(m, self.p, self.prec);
                let root = CycloPadic::monomial(
                    m,
                    self.p,
                    self.prec,
                    g % m,
                    num_bigint::BigUint::from(1u32),
                );
                let x = one.sub(&root.scale_scalar(&alpha));
                let l = crate::cyclo::field_log(&x, self.target)?;
                self.base.write().unwrap().insert(key, l.clone());
                l
            }
        };
        if j == g || j == 0 {
            return Ok(base);
        }
        let cof = m / g;
        let mut u = (j / g) % cof;
        while crate::arith::gcd(u, m) != 1 {
            u += cof;
        }
        base.galois(u)
    }
}

/// Second-kind character mod p^(n+1) with value zeta_{p^n}^c at
/// gamma_0 = sigma_{1+pd}.
pub fn second_kind_character(p: u64, d: u64, n: u32, c: u64) -> DirichletCharacter {
    let ppow = p.pow(n + 1);
    let g = crate::arith::primitive_root_odd_prime_power(p, n + 1);
    // g = omega(g) * b0^(t_g) with b0 = (1+pd) mod p^(n+1)
    let b0 = (1 + p * d) % ppow;
    let w = crate::padic::teichmuller(g % p, p, n + 1)
        .expect("unit")
        .residue;
    let winv = crate::padic::mod_inverse(&w, &crate::padic::pow_p(p, n + 1)).unwrap();
    let target = num_traits::ToPrimitive::to_u64(&(num_bigint::BigUint::from(g) * winv
        % crate::padic::pow_p(p, n + 1)))
    .unwrap();
    let mut t_g = 0u64;
    let mut x = 1u64;
    while x != target {
        x = x * b0 % ppow;
        t_g += 1;
        assert!(t_g <= p.pow(n), "dlog must exist");
    }
    let dd = (p - 1) * p.pow(n);
    let e = (p - 1) as u128 * c as u128 % dd as u128 * t_g as u128 % dd as u128;
    DirichletCharacter {
        modulus: ppow,
        exps: vec![(e % dd as u128) as u64],
    }
}

/// eps_n(theta): the Gamma_n element with e_chi-eigenvalue L_p(1, theta chi)
/// for every character chi of Gamma_n, built from the L-values.
pub fn eps_from_l_values(
    ctx: &Ctx,
    theta: &DirichletCharacter,
) -> Result<crate::group_ring::GroupRingP> {
    let ord = ctx.p.pow(ctx.n);
    let mut values = Vec::with_capacity(ord as usize);
    for c in 0..ord {
        let psi = ctx.second_kind_character(c);
        let a = theta.restrict_to_common(ctx.m);
        let b = psi.restrict_to(ctx.m);
        let prod = a.mul(&b);
        let rec = crate::chars::lp_at_one(&prod, ctx.p, &ctx.table)?;
        values.push(rec.value);
    }
    crate::group_ring::element_from_l_values(&values, ctx.p, ctx.n, ctx.p * ctx.d)
}

/// Gauss sum of rho (conductor d2 p^j, d2 | p-1) with the prime-to-p root
/// realized as a Teichmüller scalar: an element of Z_p[zeta_{p^(n+1)}].
pub fn gauss_sum_scalar_alpha(
    rho: &DirichletCharacter,
    p: u64,
    n: u32,
    prec: u32,
) -> Result<CycloPadic> {
    let prim = rho.primitive_part();
    let f = prim.modulus;
    let ring = p.pow(n + 1);
    if f == 1 {
        return Ok(CycloPadic::one(ring, p, prec));
    }
    let mut ppart = 1u64;
    let mut d2 = f;
    while d2 % p == 0 {
        d2 /= p;
        ppart *= p;
    }
    assert!(d2 == 1 || (p - 1) % d2 == 0, "prime-to-p conductor must divide p-1");
    let mut acc = CycloPadic::zero(ring, p, prec);
    for a in 1..=f {
        if crate::arith::gcd(a, f) != 1 {
            continue;
        }
        let v = prim.eval_in_padic_ring(a % f, ring, p, prec)?;
        let alpha = scalar_root(p, prec, d2.max(1), if d2 == 1 { 0 } else { a % d2 })?;
        let mono = CycloPadic::monomial(
            ring,
            p,
            prec,
            if ppart == 1 { 0 } else { (ring / ppart) * (a % ppart) % ring },
            num_bigint::BigUint::from(1u32),
        );
        acc = acc.add(&v.mul(&mono).scale_scalar(&alpha));
    }
    Ok(acc)
}

/// L_p(1, rho) for an even nontrivial rho of conductor d2 p^j with d2 | p-1,
/// computed inside the field Q_p(zeta_{p^(n+1)}).
pub fn lp_at_one_scalar_alpha(
    rho: &DirichletCharacter,
    p: u64,
    d: u64,
    n: u32,
    logs: &ScalarAlphaLogs,
) -> Result<CycloPadic> {
    let prim = rho.primitive_part();
    if prim.is_trivial() || !prim.is_even() {
        return Err(Error::domain("needs an even nontrivial character"));
    }
    let f = prim.modulus;
    let ring = p.pow(n + 1);
    let prec = logs.prec;
    let mut ppart = 1u64;
    let mut d2 = f;
    while d2 % p == 0 {
        d2 /= p;
        ppart *= p;
    }
    assert!(d2 == 1 || d % d2 == 0, "prime-to-p conductor must divide d");
    let one = CycloPadic::one(ring, p, prec);
    let euler = if f % p == 0 {
        one.clone()
    } else {
        let chip = prim.eval_in_padic_ring(p % f, ring, p, prec)?;
        one.sub(&chip.mul_p_pow(-1))
    };
    let barred = prim.inverse();
    let mut s = CycloPadic::zero(ring, p, prec);
    for a in 1..f {
        if crate::arith::gcd(a, f) != 1 {
            continue;
        }
        // 1 - zeta_f^a with zeta_f = zeta_{d2}-scalar * zeta_{ppart}-ring
        let t = if d2 == 1 { 0 } else { (a % d2) * (d / d2) % d };
        let j = if ppart == 1 {
            0
        } else {
            (ring / ppart) * (a % ppart) % ring
        };
        let l = logs.log(t, j)?;
        let cv = barred.eval_in_padic_ring(a % f, ring, p, prec)?;
        s = s.add(&cv.mul(&l));
    }
    let tau = gauss_sum_scalar_alpha(&prim, p, n, prec)?;
    let vpf = crate::padic::val_p(&num_bigint::BigUint::from(f), p).unwrap_or(0);
    let funit = f / p.pow(vpf);
    let modulus = crate::padic::pow_p(p, prec);
    let inv = crate::padic::mod_inverse(
        &(num_bigint::BigUint::from(funit) % &modulus),
        &modulus,
    )
    .expect("prime-to-p part of f inverts");
    Ok(euler
        .mul(&tau)
        .mul(&s)
        .neg()
        .mul_p_pow(-(vpf as i64))
        .scale_biguint(&inv))
}

/// eps_n(theta) from scalar-alpha L-values (d | p-1 setting, field ring).
pub fn eps_from_l_values_scalar_alpha(
    theta: &DirichletCharacter,
    p: u64,
    d: u64,
    n: u32,
    logs: &ScalarAlphaLogs,
) -> Result<crate::group_ring::GroupRingP> {
    let ord = p.pow(n);
    let q0 = p * d;
    let mut values = Vec::with_capacity(ord as usize);
    for c in 0..ord {
        let psi = second_kind_character(p, d, n, c);
        let common = crate::arith::lcm(theta.modulus.max(1), psi.modulus);
        let prod = theta
            .restrict_to_common(common)
            .mul(&psi.restrict_to(common));
        values.push(lp_at_one_scalar_alpha(&prod, p, d, n, logs)?);
    }
    crate::group_ring::element_from_l_values(&values, p, n, q0)
}

/// e_chi applied inside the ring of modulus ring_m, for the Gamma_n-character
/// with chi(gamma_0) = zeta_{p^n}^c and gamma_0 = sigma_{1+q0}.
pub fn e_chi_apply_in(
    ring_m: u64,
    p: u64,
    n: u32,
    q0: u64,
    c: u64,
    v: &CycloPadic,
) -> Result<CycloPadic> {
    let ord = p.pow(n);
    let zeta_step = if n == 0 { 0 } else { ring_m / ord };
    let mut acc: Option<CycloPadic> = None;
    for t in 0..ord {
        let g = crate::arith::pow_mod(1 + q0, t, ring_m);
        let conj = v.galois(g)?;
        let e = if ord == 1 { 0 } else { (ord - (c * t) % ord) % ord };
        let mono = CycloPadic::monomial(
            ring_m,
            p,
            v.prec,
            zeta_step * e % ring_m.max(1),
            num_bigint::BigUint::from(1u32),
        );
        let term = conj.mul(&mono);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    Ok(acc.expect("ord >= 1").mul_p_pow(-(n as i64)))
}

impl DirichletCharacter {
    /// restrict_to with the induced character's conductor allowed to divide
    /// the target (plain convenience lift used by the checks).
    pub fn restrict_to_common(&self, target: u64) -> DirichletCharacter {
        self.primitive_part().restrict_to(target)
    }
}

/// One registered check.
pub struct CheckDef {
    pub id: &'static str,
    /// the mathematical statement, in plain ASCII
    pub statement: &'static str,
    pub runner: fn(&Params) -> Result<VerificationReport>,
    pub default_grid: fn() -> Vec<Params>,
    pub extended_grid: fn() -> Vec<Params>,
}

pub fn registry() -> Vec<CheckDef> {
    let mut v = section1::defs();
    v.extend(section2::defs());
    v
}

pub fn registry_ids() -> Vec<&'static str> {
    registry().iter().map(|d| d.id).collect()
}

pub fn find_check(id: &str) -> Result<CheckDef> {
    registry()
        .into_iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

/// Dispatch a check and record wall time; errors that are precision
/// shortfalls become undecidable reports instead of hard failures.
pub fn run_check(id: &str, params: &Params) -> Result<VerificationReport> {
    let def = find_check(id)?;
    let start = Instant::now();
    let mut report = match (def.runner)(params) {
        Ok(r) => r,
        Err(Error::UndecidableAtPrecision { what, precision }) => VerificationReport {
            check_id: id.to_string(),
            params: params.json(),
            status: CheckStatus::UndecidableAtPrecision,
            witness: json!({ "reason": what, "precision": precision }),
            precision: precision as i64,
            millis: 0,
        },
        Err(e) => return Err(e),
    };
    report.millis = start.elapsed().as_millis();
    report.check_id = id.to_string();
    Ok(report)
}

/// Helpers shared by the section modules.
pub(crate) fn report(
    id: &str,
    params: &Params,
    status: CheckStatus,
    witness: serde_json::Value,
    precision: i64,
) -> VerificationReport {
    VerificationReport {
        check_id: id.to_string(),
        params: params.json(),
        status,
        witness,
        precision,
        millis: 0,
    }
}

pub(crate) fn status_of(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Verified
    } else {
        CheckStatus::Falsified
    }
}

pub(crate) fn merge_tri(acc: &mut CheckStatus, t: crate::Tri) {
    match t {
        crate::Tri::Equal => {}
        crate::Tri::Undecidable => {
            if *acc == CheckStatus::Verified {
                *acc = CheckStatus::UndecidableAtPrecision;
            }
        }
        crate::Tri::Unequal => *acc = CheckStatus::Falsified,
    }
}
