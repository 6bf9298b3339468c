//! Shared context for arithmetic modulo the m-th cyclotomic polynomial.
//!
//! Elements are coefficient vectors of length phi(m) on the power basis
//! `1, x, ..., x^(phi-1)` of `Q[x]/Phi_m`. The context precomputes the
//! canonical representative of every power `x^j`, `0 <= j < m`, as a sparse
//! integer row; multiplication is schoolbook convolution followed by a
//! table-driven reduction, and the Galois action `x -> x^a` is a sparse
//! rewrite through the same table.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::arith::{euler_phi, factor};

pub struct CycloCtx {
    pub m: u64,
    pub phi: usize,
    /// Sparse canonical representative of x^j for j in 0..m.
    power_rep: Vec<Vec<(u32, i64)>>,
}

static CTX_CACHE: Lazy<RwLock<HashMap<u64, Arc<CycloCtx>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Fetch (building and caching on first use) the context for modulus m.
pub fn cyclo_ctx(m: u64) -> Arc<CycloCtx> {
    if let Some(c) = CTX_CACHE.read().unwrap().get(&m) {
        return c.clone();
    }
    let built = Arc::new(CycloCtx::build(m));
    let mut w = CTX_CACHE.write().unwrap();
    w.entry(m).or_insert(built).clone()
}

impl CycloCtx {
    fn build(m: u64) -> CycloCtx {
        assert!(m >= 1);
        let phi_m = if m == 1 { 1 } else { euler_phi(m) as usize };
        let cyc = cyclotomic_poly(m);
        assert_eq!(cyc.len(), phi_m + 1);
        // rep of x^phi: Phi is monic, so x^phi = -(lower part of Phi)
        let mut dense: Vec<Vec<i64>> = Vec::with_capacity(m as usize);
        for j in 0..phi_m {
            let mut row = vec![0i64; phi_m];
            row[j] = 1;
            dense.push(row);
        }
        if (phi_m as u64) < m {
            let rep_phi: Vec<i64> = cyc[..phi_m]
                .iter()
                .map(|c| {
                    let v = c.to_i64().expect("cyclotomic coefficient fits i64");
                    v.checked_neg().unwrap()
                })
                .collect();
            dense.push(rep_phi.clone());
            for _j in (phi_m + 1)..(m as usize) {
                let prev = dense.last().unwrap();
                let top = prev[phi_m - 1];
                let mut row = vec![0i64; phi_m];
                for i in 1..phi_m {
                    row[i] = prev[i - 1];
                }
                if top != 0 {
                    for i in 0..phi_m {
                        row[i] = row[i]
                            .checked_add(top.checked_mul(rep_phi[i]).expect("reduction overflow"))
                            .expect("reduction overflow");
                    }
                }
                dense.push(row);
            }
        }
        let power_rep = dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .filter(|(_, v)| *v != 0)
                    .map(|(i, v)| (i as u32, v))
                    .collect()
            })
            .collect();
        CycloCtx {
            m,
            phi: phi_m,
            power_rep,
        }
    }

    /// Canonical sparse representative of x^j (j taken mod m).
    pub fn rep(&self, j: u64) -> &[(u32, i64)] {
        &self.power_rep[(j % self.m) as usize]
    }
}

/// Coefficients of Phi_m, degree phi(m), over BigInt (monic, index = degree).
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    if m == 1 {
        return vec![BigInt::from(-1), BigInt::one()];
    }
    // Phi_m(x) for the squarefree radical, then substitute x^(m/rad).
    let fac = factor(m);
    let rad: u64 = fac.iter().map(|&(p, _)| p).product();
    let mut poly = vec![BigInt::from(-1), BigInt::one()]; // x - 1 = Phi_1
    let mut done = 1u64;
    for &(p, _) in &fac {
        // Phi_{done * p}(x) = Phi_done(x^p) / Phi_done(x)
        let subst = subst_power(&poly, p);
        poly = poly_div_exact(&subst, &poly);
        done *= p;
    }
    debug_assert_eq!(done, rad);
    if rad < m {
        poly = subst_power(&poly, m / rad);
    }
    poly
}

fn subst_power(poly: &[BigInt], k: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); (poly.len() - 1) * k as usize + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i * k as usize] = c.clone();
    }
    out
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quo[i - dd] = c.clone();
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[i - dd + j] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division not exact");
    quo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        let to_i64 = |v: Vec<BigInt>| v.iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i64(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(to_i64(cyclotomic_poly(3)), vec![1, 1, 1]);
        assert_eq!(to_i64(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(to_i64(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(to_i64(cyclotomic_poly(9)), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(to_i64(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(245).len(), 169);
    }

    #[test]
    fn power_reps_cycle() {
        let ctx = cyclo_ctx(9);
        // x^9 = 1
        assert_eq!(ctx.rep(9), ctx.rep(0));
        // x^6 = -x^3 - 1 from Phi_9 = x^6 + x^3 + 1
        assert_eq!(ctx.rep(6), &[(0u32, -1i64), (3, -1)]);
    }
}
