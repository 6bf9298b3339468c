//! Checks for the minus-part theory: integrality and the twisted-sum
//! identities for e_chi(1/pi_n), the finite-level membership of the
//! distinguished minus element, and the exact Stickelberger-type index
//! computations in Z[G_n].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::{merge_tri, report, status_of, Ctx, Params};
use crate::arith::gcd;
use crate::chars::{bernoulli_b1_padic, h_minus, teich_character};
use crate::cyclo::{build_special, one_over_pi, CycloPadic, CycloRat, SpecialKind};
use crate::error::Result;
use crate::group_ring::{
    ell_operator_companion, idempotent_delta, stickelberger_eps, stickelberger_eps_twisted,
    GroupDesc, GroupRingP, GroupRingQ,
};
use crate::lab::report::{CheckStatus, VerificationReport};
use crate::lab::units::unit_log_lattice;
use crate::lattice::{ZLattice, ZMat};
use crate::padic::PadicScalar;
use crate::Tri;

pub fn defs() -> Vec<super::CheckDef> {
    vec![
        super::CheckDef {
            id: "minus-integrality",
            statement: "e_chi(1/pi_n) is integral for odd chi != omega^(-1), and fails \
                        integrality exactly at chi = omega^(-1)",
            runner: run_minus_integrality,
            default_grid: || grid(&[3, 5, 7], &[0, 1]),
            extended_grid: Vec::new,
        },
        super::CheckDef {
            id: "minus-identity",
            statement: "e_chi(1/pi_n) = eps_n(chi) e_chi(T_n) for odd chi != omega^(-1); \
                        (1 - (1+p)gamma_0) e_{omega^(-1)}(1/pi_n) = eps_n e_{omega^(-1)}(T_n) \
                        with eps_n integral and matching the L-value route",
            runner: run_minus_identity,
            default_grid: || grid(&[3, 5, 7], &[0, 1]),
            extended_grid: Vec::new,
        },
        super::CheckDef {
            id: "nu-membership",
            statement: "sum_i p^(i-n) e_i (1/pi - 1/pibar - 2(1+p)gamma_0 e_{omega^(-1)}(1/pi)) \
                        lies in the minus part of log U_n",
            runner: run_nu_membership,
            default_grid: || grid(&[3, 5], &[0, 1]),
            extended_grid: Vec::new,
        },
        super::CheckDef {
            id: "restriction-defect",
            statement: "eps_{n+1} restricted to G_n equals eps_n + ((p-1)/2) N_n, and \
                        (j-1) eps_{n+1} restricts to (j-1) eps_n (exact)",
            runner: run_restriction_defect,
            default_grid: || grid(&[3, 5, 7], &[0, 1]),
            extended_grid: Vec::new,
        },
        super::CheckDef {
            id: "stickelberger-ideal",
            statement: "Z[G_n] eps_n meet Z[G_n] = I eps_n for \
                        I = ({sigma_c - c*}, p^(n+1)) (exact)",
            runner: run_stickelberger_ideal,
            default_grid: || grid(&[3, 5, 7], &[0]),
            extended_grid: || grid(&[3], &[1]),
        },
        super::CheckDef {
            id: "minus-index-prop",
            statement: "[Z[G_n]^- : script-I^-] = h^-_{p^(n+1)} (exact integer index)",
            runner: run_minus_index_prop,
            default_grid: || grid(&[3, 5, 7], &[0]),
            extended_grid: || grid(&[3], &[1]),
        },
        super::CheckDef {
            id: "minus-2-power",
            statement: "[script-I^- : (1-j) script-I] = 2^(|G_n|/2 - 1) (exact)",
            runner: run_minus_2_power,
            default_grid: || grid(&[3, 5, 7], &[0]),
            extended_grid: || grid(&[3], &[1]),
        },
        super::CheckDef {
            id: "main-index-theorem",
            statement: "[E_n^- : C_n] = 2^(|G_n|/2 - 1) h^-_{p^(n+1)} with E_n = Z[G_n] T_n, \
                        C_n = I theta_n, theta_n = 1/pi_n - 1/pibar_n (exact)",
            runner: run_main_index_theorem,
            default_grid: || {
                vec![
                    Params::new(3, 1, 0),
                    Params::new(3, 1, 1),
                    Params::new(5, 1, 0),
                    Params::new(7, 1, 0),
                ]
            },
            extended_grid: || vec![Params::new(23, 1, 0)],
        },
    ]
}

fn grid(ps: &[u64], ns: &[u32]) -> Vec<Params> {
    let mut g = Vec::new();
    for &p in ps {
        for &n in ns {
            g.push(Params::new(p, 1, n));
        }
    }
    g
}

/// Odd characters of (Z/pZ)^x as powers of omega (odd exponents).
fn odd_exponents(p: u64) -> Vec<u64> {
    (1..p - 1).filter(|k| k % 2 == 1).collect()
}

// ---------------------------------------------------------------------------
// section 2.1

fn run_minus_integrality(params: &Params) -> Result<VerificationReport> {
    let ctx = Ctx::new(&Params::new(params.p, 1, params.n));
    let (p, n) = (ctx.p, ctx.n);
    let inv_pi = ctx.embed(&one_over_pi(p, n))?;
    let omega = teich_character(p);
    let mut status = CheckStatus::Verified;
    let mut rows = Vec::new();
    for k in odd_exponents(p) {
        let chi = omega.power(k);
        let e = idempotent_delta(&chi, p, 1, n, ctx.prec)?;
        let x = e.act(&inv_pi)?;
        let integral = x.min_coeff_val().map_or(true, |v| v >= x.shift);
        let excluded = k == p - 2; // chi = omega^(-1)
        if excluded {
            // expected non-integral
            if integral {
                status = CheckStatus::Falsified;
            }
        } else if !integral {
            status = CheckStatus::Falsified;
        }
        rows.push(json!({
            "omega_power": k,
            "integral": integral,
            "expected_nonintegral": excluded,
        }));
    }
    Ok(report(
        "minus-integrality",
        params,
        status,
        json!({ "characters": rows }),
        ctx.tolerance(),
    ))
}

fn run_minus_identity(params: &Params) -> Result<VerificationReport> {
    let ctx = Ctx::new(&Params::new(params.p, 1, params.n));
    let (p, n) = (ctx.p, ctx.n);
    let inv_pi = ctx.embed(&one_over_pi(p, n))?;
    let leo_t = ctx.embed(&build_special(SpecialKind::LeopoldtT, p, n).value)?;
    let omega = teich_character(p);
    let mut status = CheckStatus::Verified;
    let mut cases = 0usize;
    for k in odd_exponents(p) {
        let chi = omega.power(k);
        let e = idempotent_delta(&chi, p, 1, n, ctx.prec)?;
        let lhs_el = e.act(&inv_pi)?;
        let theta = chi.mul(&omega); // so that theta omega^(-1) = chi
        let eps = stickelberger_eps_twisted(&theta, p, n, ctx.prec)?;
        if k == p - 2 {
            // the excluded component: multiply through by 1 - (1+p) gamma_0
            let w = one_minus_1p_gamma0(p, n, eps.prec);
            let weps = w.mul(&eps);
            merge_tri(&mut status, weps.is_integral());
            let lhs = w.act(&lhs_el)?;
            let rhs = weps.act(&e.act(&leo_t)?)?;
            merge_tri(&mut status, lhs.eq_mod(&rhs, ctx.tolerance()));
            // cross-route: eigenvalues (1 - (1+p) zeta^c) B_{1, omega^(-1) psi_c}
            let route = twisted_eps_from_bernoulli(&ctx, &chi)?;
            merge_tri(&mut status, weps.eq_mod(&route, ctx.tolerance() - (n as i64 + 1)));
        } else {
            merge_tri(&mut status, eps.is_integral());
            let rhs = eps.act(&e.act(&leo_t)?)?;
            merge_tri(&mut status, lhs_el.eq_mod(&rhs, ctx.tolerance()));
            // cross-route against plain Bernoulli eigenvalues
            let route = plain_eps_from_bernoulli(&ctx, &chi)?;
            merge_tri(&mut status, eps.eq_mod(&route, ctx.tolerance() - (n as i64 + 1)));
            // restriction compatibility down one level
            if n >= 1 {
                let down = stickelberger_eps_twisted(&theta, p, n - 1, ctx.prec)?;
                let res = eps.restrict(GroupDesc::Gamma {
                    p,
                    n: n - 1,
                    q0: p,
                });
                merge_tri(&mut status, res.eq_mod(&down, ctx.tolerance() - 2));
            }
        }
        cases += 1;
    }
    Ok(report(
        "minus-identity",
        params,
        status,
        json!({ "characters": cases }),
        ctx.tolerance(),
    ))
}

/// 1 - (1+p) gamma_0 in Z_p[Gamma_n].
fn one_minus_1p_gamma0(p: u64, n: u32, prec: u32) -> GroupRingP {
    let desc = GroupDesc::Gamma { p, n, q0: p };
    let one = GroupRingP::one(desc.clone(), p, prec);
    let g = GroupRingP::basis_elt(desc, p, prec, 1)
        .scale_scalar(&PadicScalar::from_u64(p, prec, 1 + p));
    one.sub(&g)
}

/// Element with e_chi_c eigenvalue B_{1, chi psi_c} for the odd character chi.
fn plain_eps_from_bernoulli(ctx: &Ctx, chi: &crate::chars::DirichletCharacter) -> Result<GroupRingP> {
    let (p, n) = (ctx.p, ctx.n);
    let ring = p.pow(n + 1);
    let mut values = Vec::new();
    for c in 0..p.pow(n) {
        let psi = ctx.second_kind_character(c);
        let prod = chi.restrict_to_common(ring).mul(&psi);
        values.push(bernoulli_b1_padic(&prod, ring, p, ctx.prec)?);
    }
    crate::group_ring::element_from_l_values(&values, p, n, p)
}

/// Element with eigenvalues (1 - (1+p) zeta^c) B_{1, omega^(-1) psi_c}.
fn twisted_eps_from_bernoulli(
    ctx: &Ctx,
    chi: &crate::chars::DirichletCharacter,
) -> Result<GroupRingP> {
    let (p, n) = (ctx.p, ctx.n);
    let ring = p.pow(n + 1);
    let zeta_step = if n == 0 { 0 } else { ring / p.pow(n) };
    let mut values = Vec::new();
    for c in 0..p.pow(n) {
        let psi = ctx.second_kind_character(c);
        let prod = chi.restrict_to_common(ring).mul(&psi);
        let b = bernoulli_b1_padic(&prod, ring, p, ctx.prec)?;
        let one = CycloPadic::one(ring, p, ctx.prec);
        let zc = CycloPadic::monomial(ring, p, ctx.prec, zeta_step * c, BigUint::one())
            .scale_scalar(&PadicScalar::from_u64(p, ctx.prec, 1 + p));
        values.push(one.sub(&zc).mul(&b));
    }
    crate::group_ring::element_from_l_values(&values, p, n, p)
}

fn run_nu_membership(params: &Params) -> Result<VerificationReport> {
    let ctx = Ctx::new(&Params::new(params.p, 1, params.n));
    let (p, n) = (ctx.p, ctx.n);
    let m = ctx.m;
    let inv_pi = ctx.embed(&one_over_pi(p, n))?;
    let omega = teich_character(p);
    let e_winv = idempotent_delta(&omega.power(p - 2), p, 1, n, ctx.prec)?;
    let j = m - 1;
    // inner = 1/pi - j(1/pi) - 2(1+p) gamma_0 e_{omega^(-1)}(1/pi)
    let gamma0 = (1 + p) % m;
    let tw = e_winv
        .act(&inv_pi)?
        .galois(gamma0)?
        .scale_scalar(&PadicScalar::from_u64(p, ctx.prec, 2 * (1 + p)));
    let inner = inv_pi.sub(&inv_pi.galois(j)?).sub(&tw);
    let op = ell_operator_companion(p, n, p);
    let nu_log = op.act_padic(&inner)?;
    let mut status = CheckStatus::Verified;
    // minus part: j acts by -1
    merge_tri(
        &mut status,
        nu_log.galois(j)?.eq_mod(&nu_log.neg(), ctx.tolerance()),
    );
    // membership in log U_n, with a per-component diagnosis: the omega
    // component of the stated element misses the (gamma_0 - 1 - p) factor
    // that generates e_omega log U_n, so the literal membership fails there;
    // the element with that factor restored on the omega component passes.
    let units = unit_log_lattice(p, n, ctx.target)?;
    let literal = match nu_log.to_scaled_vector(n) {
        Ok(vec) => units.full.contains(&vec),
        Err(_) => Tri::Unequal,
    };
    merge_tri(&mut status, literal);
    let mut components = Vec::new();
    for k in odd_exponents(p) {
        let e = idempotent_delta(&omega.power(k), p, 1, n, ctx.prec)?;
        let part = e.act(&nu_log)?;
        let verdict = match part.to_scaled_vector(n) {
            Ok(vec) => format!("{:?}", units.full.contains(&vec)),
            Err(_) => "NotIntegral".to_string(),
        };
        components.push(json!({ "omega_power": k, "member": verdict }));
    }
    // repaired element: twist the omega component by (gamma_0 - 1 - p)
    let om_part = idempotent_delta(&omega, p, 1, n, ctx.prec)?.act(&nu_log)?;
    let om_twisted = om_part
        .galois(gamma0)?
        .sub(&om_part)
        .sub(&om_part.scale_scalar(&PadicScalar::from_u64(p, ctx.prec, p)));
    let repaired = nu_log.sub(&om_part).add(&om_twisted);
    let repaired_member = match repaired.to_scaled_vector(n) {
        Ok(vec) => units.full.contains(&vec),
        Err(_) => Tri::Unequal,
    };
    Ok(report(
        "nu-membership",
        params,
        status,
        json!({
            "literal_member": format!("{literal:?}"),
            "components": components,
            "repaired_member": format!("{repaired_member:?}"),
            "note": "the omega component of the stated element lacks the \
                     (gamma_0 - 1 - p) factor generating e_omega log U_n",
        }),
        ctx.tolerance(),
    ))
}

// ---------------------------------------------------------------------------
// section 2.2: exact lattices in Q[G_n] and Q(zeta)

struct StickCtx {
    p: u64,
    n: u32,
    m: u64,
    g: usize,
    desc: GroupDesc,
    eps: GroupRingQ,
    scale: BigInt,
}

impl StickCtx {
    fn new(p: u64, n: u32) -> StickCtx {
        let m = p.pow(n + 1);
        let desc = GroupDesc::Units { m };
        StickCtx {
            p,
            n,
            m,
            g: desc.order(),
            desc: desc.clone(),
            eps: stickelberger_eps(p, n),
            scale: BigInt::from(m),
        }
    }

    /// Coefficient vector scaled by p^(n+1) (must be integral afterwards).
    fn vec(&self, x: &GroupRingQ) -> Vec<BigInt> {
        x.coeffs
            .iter()
            .map(|c| {
                let v = c * BigRational::from(self.scale.clone());
                assert!(v.is_integer(), "scaled coefficient must be integral");
                v.to_integer()
            })
            .collect()
    }

    fn field_vec(&self, x: &CycloRat) -> Vec<BigInt> {
        x.coeffs
            .iter()
            .map(|c| {
                let v = c * BigRational::from(self.scale.clone());
                assert!(v.is_integer(), "scaled coefficient must be integral");
                v.to_integer()
            })
            .collect()
    }

    fn sigma(&self, a: u64) -> GroupRingQ {
        GroupRingQ::basis_elt(self.desc.clone(), a)
    }

    /// Z[G_n] as a scaled lattice.
    fn z_group_ring(&self) -> ZLattice {
        let rows: ZMat = (0..self.g)
            .map(|i| {
                let mut r = vec![BigInt::zero(); self.g];
                r[i] = self.scale.clone();
                r
            })
            .collect();
        ZLattice::from_generators(self.g, rows)
    }

    /// The ideal I = ({sigma_c - c*}, p^(n+1)) as a scaled lattice.
    fn ideal_i(&self) -> ZLattice {
        let reps = self.desc.reps();
        let mut rows: ZMat = Vec::new();
        for &b in &reps {
            for &c in &reps {
                let cstar = crate::arith::inv_mod(c, self.m).expect("unit");
                let elt = self
                    .sigma(b * c % self.m)
                    .sub(&self.sigma(b).scale(&BigRational::from(BigInt::from(cstar))));
                rows.push(self.vec(&elt));
            }
            rows.push(self.vec(&self.sigma(b).scale(&BigRational::from(BigInt::from(self.m)))));
        }
        ZLattice::from_generators(self.g, rows)
    }

    /// Z[G_n] eps_n as a scaled lattice.
    fn z_eps(&self) -> ZLattice {
        let reps = self.desc.reps();
        let rows: ZMat = reps
            .iter()
            .map(|&b| self.vec(&self.sigma(b).mul(&self.eps)))
            .collect();
        ZLattice::from_generators(self.g, rows)
    }

    /// Act on Z-lattice rows (interpreted as scaled group-ring elements) by a
    /// fixed rational element, returning the scaled image rows.
    fn act_rows(&self, lat: &ZLattice, by: &GroupRingQ) -> ZMat {
        lat.basis
            .iter()
            .map(|row| {
                let x = GroupRingQ {
                    desc: self.desc.clone(),
                    coeffs: row
                        .iter()
                        .map(|c| BigRational::new(c.clone(), self.scale.clone()))
                        .collect(),
                };
                self.vec(&x.mul(by))
            })
            .collect()
    }

    /// (j - 1) L for a scaled lattice L.
    fn j_minus_one(&self, lat: &ZLattice) -> ZLattice {
        let jm1 = self
            .sigma(self.m - 1)
            .sub(&GroupRingQ::one(self.desc.clone()));
        ZLattice::from_generators(self.g, self.act_rows(lat, &jm1))
    }
}

fn run_restriction_defect(params: &Params) -> Result<VerificationReport> {
    let (p, n) = (params.p, params.n);
    let big = stickelberger_eps(p, n + 1);
    let small = stickelberger_eps(p, n);
    let target = GroupDesc::Units { m: p.pow(n + 1) };
    let res = big.restrict(target.clone());
    let norm = crate::group_ring::norm_element_q(target.clone());
    let defect = BigRational::new(BigInt::from(p - 1), BigInt::from(2));
    let ok1 = res.eq(&small.add(&norm.scale(&defect)));
    // (j-1) eps_{n+1} restricts to (j-1) eps_n
    let mbig = p.pow(n + 2);
    let jm1_big = GroupRingQ::basis_elt(GroupDesc::Units { m: mbig }, mbig - 1)
        .sub(&GroupRingQ::one(GroupDesc::Units { m: mbig }));
    let jm1_small = GroupRingQ::basis_elt(target.clone(), p.pow(n + 1) - 1)
        .sub(&GroupRingQ::one(target.clone()));
    let lhs = jm1_big.mul(&big).restrict(target);
    let rhs = jm1_small.mul(&small);
    let ok2 = lhs.eq(&rhs);
    Ok(report(
        "restriction-defect",
        params,
        status_of(ok1 && ok2),
        json!({ "plain": ok1, "j_minus_one": ok2 }),
        0,
    ))
}

fn run_stickelberger_ideal(params: &Params) -> Result<VerificationReport> {
    let s = StickCtx::new(params.p, params.n);
    let z_eps = s.z_eps();
    let z_gr = s.z_group_ring();
    let script_i = z_eps.intersect(&z_gr);
    let i_lat = s.ideal_i();
    let i_eps = ZLattice::from_generators(s.g, s.act_rows(&i_lat, &s.eps));
    let ok = script_i.eq_lattice(&i_eps);
    Ok(report(
        "stickelberger-ideal",
        params,
        status_of(ok),
        json!({ "rank": script_i.rank() }),
        0,
    ))
}

fn run_minus_index_prop(params: &Params) -> Result<VerificationReport> {
    let s = StickCtx::new(params.p, params.n);
    let z_gr = s.z_group_ring();
    let script_i = s.z_eps().intersect(&z_gr);
    let z_minus = s.j_minus_one(&z_gr);
    let script_i_minus = script_i.intersect(&z_minus);
    let idx = z_minus.index_of(&script_i_minus)?;
    let h = BigInt::from(h_minus(params.p, params.n)?);
    Ok(report(
        "minus-index-prop",
        params,
        status_of(idx == h),
        json!({ "index": idx.to_string(), "h_minus": h.to_string() }),
        0,
    ))
}

fn run_minus_2_power(params: &Params) -> Result<VerificationReport> {
    let s = StickCtx::new(params.p, params.n);
    let z_gr = s.z_group_ring();
    let script_i = s.z_eps().intersect(&z_gr);
    let z_minus = s.j_minus_one(&z_gr);
    let script_i_minus = script_i.intersect(&z_minus);
    let one_minus_j_i = s.j_minus_one(&script_i);
    let idx = script_i_minus.index_of(&one_minus_j_i)?;
    let expect = BigInt::from(2u32).pow(s.g as u32 / 2 - 1);
    Ok(report(
        "minus-2-power",
        params,
        status_of(idx == expect),
        json!({ "index": idx.to_string(), "expected": expect.to_string() }),
        0,
    ))
}

fn run_main_index_theorem(params: &Params) -> Result<VerificationReport> {
    let (p, n) = (params.p, params.n);
    let s = StickCtx::new(p, n);
    let m = s.m;
    let phi = s.g;
    // E_n = Z[G] T_n and its minus part (j-1) E_n in the field space
    let t_n = build_special(SpecialKind::LeopoldtT, p, n).value;
    let mut e_rows: ZMat = Vec::new();
    for &a in &s.desc.reps() {
        let conj = t_n.galois(a)?;
        let minus = conj.galois(m - 1)?.sub(&conj);
        e_rows.push(s.field_vec(&minus));
    }
    let e_minus = ZLattice::from_generators(phi, e_rows);
    // theta_n = 1/pi - 1/pibar and C_n = I theta_n
    let inv_pi = one_over_pi(p, n);
    let theta_n = inv_pi.sub(&inv_pi.galois(m - 1)?);
    let i_lat = s.ideal_i();
    let mut c_rows: ZMat = Vec::new();
    for row in &i_lat.basis {
        let beta = GroupRingQ {
            desc: s.desc.clone(),
            coeffs: row
                .iter()
                .map(|c| BigRational::new(c.clone(), s.scale.clone()))
                .collect(),
        };
        c_rows.push(s.field_vec(&beta.act(&theta_n)?));
    }
    let c_n = ZLattice::from_generators(phi, c_rows);
    let idx = e_minus.index_of(&c_n)?;
    let h = BigInt::from(h_minus(p, n)?);
    let expect = BigInt::from(2u32).pow(phi as u32 / 2 - 1) * &h;
    let mut status = status_of(idx == expect);
    // element identity behind the construction: (j-1)(1/pi) = (j-1) eps(T_n)
    let lhs = inv_pi.galois(m - 1)?.sub(&inv_pi);
    let rhs = {
        let t = s.eps.act(&t_n)?;
        t.galois(m - 1)?.sub(&t)
    };
    if !lhs.eq(&rhs) {
        status = CheckStatus::Falsified;
    }
    Ok(report(
        "main-index-theorem",
        params,
        status,
        json!({
            "index": idx.to_string(),
            "expected": expect.to_string(),
            "h_minus": h.to_string(),
        }),
        0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stickelberger_smallest() {
        // p=3, n=0: |G_0| = 2, [E^- : C] = 2^0 * 1 = 1
        let r = run_main_index_theorem(&Params::new(3, 1, 0)).unwrap();
        assert_eq!(r.status, CheckStatus::Verified, "witness: {}", r.witness);
        let r = run_stickelberger_ideal(&Params::new(3, 1, 0)).unwrap();
        assert_eq!(r.status, CheckStatus::Verified);
    }
}
