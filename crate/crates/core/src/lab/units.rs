//! Log-image lattices of the principal-unit groups of Q_p(zeta_{p^(n+1)}).
//!
//! log U_n = log(1 + pi^2 O_n) is generated as a Z_p-module by logarithms of
//! the filtration units 1 + x pi^i. The generating recipe is not assumed
//! sufficient: the assembled lattice must reproduce the three known
//! component indices in p^(-n) e_theta O_n (p^(n p^n) away from theta = 1,
//! omega; one extra digit at theta = 1; n+1 extra digits at theta = omega)
//! and the recipe is enlarged automatically until it does. The group
//! V = 1 + p O_n with log V = p O_n is a built-in self-test on every build.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::Lazy;

use crate::arith::pow_mod;
use crate::cyclo::{field_log, CycloPadic};
use crate::error::{Error, Result};
use crate::group_ring::GroupRingP;
use crate::lattice::{PLattice, DEFAULT_SLACK};
use crate::padic::PadicScalar;

#[derive(Clone)]
pub struct UnitLogLattice {
    pub p: u64,
    pub n: u32,
    /// value-precision target the logs were computed to
    pub target: u32,
    /// logs of the generating units (elements of p^(-n) O_n)
    pub logs: Vec<CycloPadic>,
    /// the full lattice log U_n in coordinates w.r.t. p^(-n) O_n
    pub full: PLattice,
    /// index exponents of [p^(-n) e_{omega^k} O : e_{omega^k} log U_n], k = 0..p-2
    pub component_exponents: Vec<u32>,
}

static UNIT_CACHE: Lazy<RwLock<HashMap<(u64, u32, u32), Arc<UnitLogLattice>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Memoized construction (the lattice is reused by many checks).
pub fn unit_log_lattice(p: u64, n: u32, target: u32) -> Result<Arc<UnitLogLattice>> {
    if let Some(l) = UNIT_CACHE.read().unwrap().get(&(p, n, target)) {
        return Ok(l.clone());
    }
    let built = Arc::new(UnitLogLattice::build(p, n, target)?);
    let mut w = UNIT_CACHE.write().unwrap();
    Ok(w.entry((p, n, target)).or_insert(built).clone())
}

/// Residue precision used to build ring elements whose logs should be good
/// to `target` digits: the log costs v_p(e) = n digits plus the p-power
/// contraction steps, repaid up front here.
pub fn residue_precision(p: u64, n: u32, target: u32) -> u32 {
    let contraction = 2 * (64 - (2 * (p - 1) * p.pow(n)).leading_zeros()) + 6;
    target + n + contraction
}

impl UnitLogLattice {
    pub fn build(p: u64, n: u32, target: u32) -> Result<UnitLogLattice> {
        let m = p.pow(n + 1);
        let phi = ((p - 1) * p.pow(n)) as usize;
        let e = phi as u64;
        let prec = residue_precision(p, n, target);

        // V = 1 + p O self-test: log V must be exactly p O.
        let v_logs: Vec<CycloPadic> = (0..phi)
            .map(|j| {
                let u = CycloPadic::one(m, p, prec).add(&CycloPadic::monomial(
                    m,
                    p,
                    prec,
                    j as u64,
                    BigUint::from(p),
                ));
                field_log(&u, target)
            })
            .collect::<Result<_>>()?;
        let v_lat = plattice_from_elements(p, phi, n, &v_logs, DEFAULT_SLACK)?;
        // p O in p^(-n) O coordinates is p^(n+1) times the standard basis
        let p_o_rows: Vec<Vec<PadicScalar>> = (0..phi)
            .map(|j| {
                (0..phi)
                    .map(|i| {
                        if i == j {
                            PadicScalar {
                                p,
                                prec: prec + n + 1,
                                residue: crate::padic::pow_p(p, n + 1),
                            }
                        } else {
                            PadicScalar::zero(p, prec)
                        }
                    })
                    .collect()
            })
            .collect();
        let p_o = PLattice::from_generators(p, phi, n, p_o_rows, DEFAULT_SLACK)?;
        if v_lat.equals(&p_o) != crate::Tri::Equal {
            return Err(Error::internal("log V = p O self-test failed"));
        }

        // log U_n from the filtration recipe, enlarged until the component
        // indices certify sufficiency.
        let expected_total: u32 = (p as u32 - 1) * n * p.pow(n) as u32 + n + 2;
        let mut basis_sweep = 1usize; // how many power-basis multipliers per level
        let mut i_max = 2 * e;
        loop {
            let logs = Self::filtration_logs(p, n, m, prec, target, i_max, basis_sweep)?;
            let full = plattice_from_elements(p, phi, n, &logs, DEFAULT_SLACK)?;
            if full.rank() == phi {
                let got: u32 = full.pivots.iter().map(|&(_, v)| v).sum();
                if got == expected_total {
                    let component_exponents = Self::component_check(p, n, prec, &logs, &full)?;
                    return Ok(UnitLogLattice {
                        p,
                        n,
                        target,
                        logs,
                        full,
                        component_exponents,
                    });
                }
                if got < expected_total {
                    return Err(Error::internal(format!(
                        "log U_n lattice too large: index p^{got} < expected p^{expected_total}"
                    )));
                }
            }
            // enlarge the recipe
            if basis_sweep == 1 {
                basis_sweep = phi;
            } else if i_max < 8 * e {
                i_max *= 2;
            } else {
                return Err(Error::internal(
                    "filtration recipe exhausted without matching the known index",
                ));
            }
        }
    }

    fn filtration_logs(
        p: u64,
        n: u32,
        m: u64,
        prec: u32,
        target: u32,
        i_max: u64,
        basis_sweep: usize,
    ) -> Result<Vec<CycloPadic>> {
        let one = CycloPadic::one(m, p, prec);
        let pi = CycloPadic::monomial(m, p, prec, 1, BigUint::one()).sub(&one);
        let mut logs = Vec::new();
        let mut pi_pow = pi.mul(&pi); // pi^2
        for i in 2..=i_max {
            for j in 0..basis_sweep {
                let x = if j == 0 {
                    pi_pow.clone()
                } else {
                    pi_pow.mul(&CycloPadic::monomial(m, p, prec, j as u64, BigUint::one()))
                };
                let u = one.add(&x);
                logs.push(field_log(&u, target)?);
            }
            if i < i_max {
                pi_pow = pi_pow.mul(&pi);
            }
        }
        Ok(logs)
    }

    /// Recompute the three component indices and abort on mismatch.
    fn component_check(
        p: u64,
        n: u32,
        prec: u32,
        logs: &[CycloPadic],
        _full: &PLattice,
    ) -> Result<Vec<u32>> {
        let phi = ((p - 1) * p.pow(n)) as usize;
        let m = p.pow(n + 1);
        let mut exponents = Vec::with_capacity((p - 1) as usize);
        for k in 0..(p - 1) {
            let theta = crate::chars::teich_character(p).power(k);
            let e_theta = crate::group_ring::idempotent_delta(&theta, p, 1, n, prec)?;
            let ambient = component_ambient(p, n, m, phi, prec, &e_theta)?;
            let comp = project_elements(&e_theta, logs)?;
            let comp_lat = plattice_from_elements(p, phi, n, &comp, DEFAULT_SLACK)?;
            let got = ambient.index_exponent(&comp_lat)?;
            let expect = if k == 0 {
                n * p.pow(n) as u32 + 1
            } else if k == 1 {
                n * p.pow(n) as u32 + n + 1
            } else {
                n * p.pow(n) as u32
            };
            if got != expect {
                return Err(Error::internal(format!(
                    "component index mismatch at omega^{k}: got p^{got}, expected p^{expect}"
                )));
            }
            exponents.push(got);
        }
        Ok(exponents)
    }
}

/// Ambient component lattice p^(-n) e_theta O in p^(-n) O coordinates.
pub fn component_ambient(
    p: u64,
    n: u32,
    m: u64,
    phi: usize,
    prec: u32,
    e_theta: &GroupRingP,
) -> Result<PLattice> {
    let mut gens = Vec::with_capacity(phi);
    for j in 0..phi {
        let b = CycloPadic::monomial(m, p, prec, j as u64, BigUint::one());
        gens.push(e_theta.act(&b)?.mul_p_pow(-(n as i64)));
    }
    plattice_from_elements(p, phi, n, &gens, DEFAULT_SLACK)
}

/// Apply a group-ring operator to a list of elements.
pub fn project_elements(op: &GroupRingP, elems: &[CycloPadic]) -> Result<Vec<CycloPadic>> {
    elems.iter().map(|e| op.act(e)).collect()
}

/// Assemble a p-adic lattice from ring elements (coordinates w.r.t.
/// p^(-scale) O).
pub fn plattice_from_elements(
    p: u64,
    dim: usize,
    scale: u32,
    elems: &[CycloPadic],
    slack: u32,
) -> Result<PLattice> {
    let rows = elems
        .iter()
        .map(|e| e.to_scaled_vector(scale))
        .collect::<Result<Vec<_>>>()?;
    PLattice::from_generators(p, dim, scale, rows, slack)
}

/// The Gamma_n-orbit gamma_0^t(x), t = 0..p^n - 1, with gamma_0 = sigma_{1+q0}.
pub fn gamma_orbit(x: &CycloPadic, p: u64, n: u32, q0: u64) -> Result<Vec<CycloPadic>> {
    let m = x.ctx.m;
    (0..p.pow(n))
        .map(|t| x.galois(pow_mod(1 + q0, t, m)))
        .collect()
}

/// Logs of 1 - zeta^a for all units a (the cyclotomic generators), plus the
/// base log of 1 - zeta; everything via one logarithm and Galois translation.
pub fn cyclotomic_logs(
    p: u64,
    n: u32,
    prec: u32,
    target: u32,
) -> Result<(CycloPadic, Vec<CycloPadic>)> {
    let m = p.pow(n + 1);
    let one = CycloPadic::one(m, p, prec);
    let base = field_log(
        &one.sub(&CycloPadic::monomial(m, p, prec, 1, BigUint::one())),
        target,
    )?;
    let mut all = Vec::new();
    for a in 1..m {
        if a % p != 0 {
            all.push(base.galois(a)?);
        }
    }
    Ok((base, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_log_lattice_level_zero() {
        // p=5, n=0: [O : log U_0] = p^2 and component exponents (1, 1, 0, 0)
        let l = unit_log_lattice(5, 0, 20).unwrap();
        let total: u32 = l.full.pivots.iter().map(|&(_, v)| v).sum();
        assert_eq!(total, 2);
        assert_eq!(l.component_exponents, vec![1, 1, 0, 0]);
    }

    #[test]
    fn unit_log_lattice_level_one_p3() {
        // p=3, n=1: total exponent (p-1) n p^n + n + 2 = 6 + 3 = 9
        let l = unit_log_lattice(3, 1, 30).unwrap();
        let total: u32 = l.full.pivots.iter().map(|&(_, v)| v).sum();
        assert_eq!(total, 9);
        assert_eq!(l.component_exponents, vec![4, 5]);
    }
}
