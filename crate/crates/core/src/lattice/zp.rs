//! Lattices over Z_p at finite precision.
//!
//! Rows are residue vectors modulo p^prec with respect to a scaled ambient
//! basis (ambient = p^(-scale) O for a fixed integral basis of O). The
//! echelon form pivots on the entry of minimal valuation per column, pivots
//! are normalized to exact powers of p, and every comparison carries a
//! precision slack: anything within `slack` digits of the precision ceiling
//! is reported undecidable rather than asserted.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{mod_inverse, pow_p, val_p, PadicScalar};
use crate::Tri;

pub const DEFAULT_SLACK: u32 = 8;

#[derive(Clone, Debug)]
pub struct PLattice {
    pub p: u64,
    pub prec: u32,
    pub dim: usize,
    /// ambient scale: vectors are coordinates w.r.t. p^(-scale) O
    pub scale: u32,
    pub slack: u32,
    /// echelon basis rows (residues mod p^prec)
    pub basis: Vec<Vec<BigUint>>,
    /// (pivot column, pivot valuation) per basis row, in column order
    pub pivots: Vec<(usize, u32)>,
}

impl PLattice {
    /// Echelonize generators; errors on a precision-degenerate pivot (an
    /// entry that is nonzero but within `slack` digits of the ceiling).
    pub fn from_generators(
        p: u64,
        dim: usize,
        scale: u32,
        rows_in: Vec<Vec<PadicScalar>>,
        slack: u32,
    ) -> Result<PLattice> {
        let mut prec = u32::MAX;
        for r in &rows_in {
            assert_eq!(r.len(), dim, "generator dimension mismatch");
            for x in r {
                assert_eq!(x.p, p);
                prec = prec.min(x.prec);
            }
        }
        if rows_in.is_empty() {
            prec = 1;
        }
        let modulus = pow_p(p, prec);
        let mut work: Vec<Vec<BigUint>> = rows_in
            .iter()
            .map(|r| r.iter().map(|x| &x.residue % &modulus).collect())
            .collect();
        let mut basis: Vec<Vec<BigUint>> = Vec::new();
        let mut pivots: Vec<(usize, u32)> = Vec::new();
        for col in 0..dim {
            // minimal-valuation pivot among remaining rows
            let mut best: Option<(usize, u32)> = None;
            for (i, row) in work.iter().enumerate() {
                if let Some(v) = val_p(&row[col], p) {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((bi, v)) = best else { continue };
            if v + slack >= prec {
                return Err(Error::DegeneratePivot {
                    valuation: v,
                    precision: prec,
                });
            }
            let mut row = work.swap_remove(bi);
            // normalize pivot to exactly p^v
            let unit = &row[col] / pow_p(p, v);
            let inv = mod_inverse(&unit, &modulus).expect("unit part inverts");
            for x in row.iter_mut() {
                *x = &*x * &inv % &modulus;
            }
            // eliminate the column from every other remaining row
            for other in work.iter_mut() {
                if other[col].is_zero() {
                    continue;
                }
                let q = &other[col] / pow_p(p, v);
                for (x, y) in other.iter_mut().zip(&row) {
                    let t = y * &q % &modulus;
                    *x = ((&*x + &modulus) - t) % &modulus;
                }
                debug_assert!(other[col].is_zero() || val_p(&other[col], p).unwrap() >= prec);
                other[col] = BigUint::zero();
            }
            basis.push(row);
            pivots.push((col, v));
        }
        // leftover rows must vanish at precision
        for row in &work {
            for x in row {
                if let Some(v) = val_p(x, p) {
                    if v + slack < prec {
                        return Err(Error::internal(
                            "non-eliminated generator survived echelon pass",
                        ));
                    }
                }
            }
        }
        // reduce entries of other rows in pivot columns for canonicality
        let nb = basis.len();
        for r in 0..nb {
            let (pc, pv) = pivots[r];
            let step = pow_p(p, pv);
            for i in 0..nb {
                if i == r {
                    continue;
                }
                if basis[i][pc].is_zero() {
                    continue;
                }
                let q = &basis[i][pc] / &step;
                if q.is_zero() {
                    continue;
                }
                let pr = basis[r].clone();
                for (x, y) in basis[i].iter_mut().zip(&pr) {
                    let t = y * &q % &modulus;
                    *x = ((&*x + &modulus) - t) % &modulus;
                }
            }
        }
        Ok(PLattice {
            p,
            prec,
            dim,
            scale,
            slack,
            basis,
            pivots,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduce v against the basis; returns (coefficients, remainder).
    fn reduce(&self, v: &[BigUint]) -> (Vec<BigUint>, Vec<BigUint>) {
        let modulus = pow_p(self.p, self.prec);
        let mut v: Vec<BigUint> = v.iter().map(|x| x % &modulus).collect();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for (row, &(pc, pv)) in self.basis.iter().zip(&self.pivots) {
            let q = &v[pc] / pow_p(self.p, pv);
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    let t = y * &q % &modulus;
                    *x = ((&*x + &modulus) - t) % &modulus;
                }
            }
            coeffs.push(q);
        }
        (coeffs, v)
    }

    /// Membership at precision (three-valued).
    pub fn contains(&self, v: &[PadicScalar]) -> Tri {
        let shared = v.iter().map(|x| x.prec).min().unwrap_or(self.prec);
        let test = self.prec.min(shared);
        let vv: Vec<BigUint> = v.iter().map(|x| x.residue.clone()).collect();
        let (_, rem) = self.reduce(&vv);
        self.judge_remainder(&rem, test)
    }

    fn judge_remainder(&self, rem: &[BigUint], test_prec: u32) -> Tri {
        let cut = test_prec.saturating_sub(self.slack);
        let m = pow_p(self.p, cut);
        for x in rem {
            if !(x % &m).is_zero() {
                return Tri::Unequal;
            }
        }
        Tri::Equal
    }

    pub fn contains_lattice(&self, other: &PLattice) -> Tri {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.scale, other.scale, "align ambient scales first");
        let mut verdict = Tri::Equal;
        let test = self.prec.min(other.prec);
        for row in &other.basis {
            let (_, rem) = self.reduce(row);
            match self.judge_remainder(&rem, test) {
                Tri::Unequal => return Tri::Unequal,
                Tri::Undecidable => verdict = Tri::Undecidable,
                Tri::Equal => {}
            }
        }
        verdict
    }

    /// Three-valued lattice equality with both containments certified.
    pub fn equals(&self, other: &PLattice) -> Tri {
        match (self.contains_lattice(other), other.contains_lattice(self)) {
            (Tri::Unequal, _) | (_, Tri::Unequal) => Tri::Unequal,
            (Tri::Undecidable, _) | (_, Tri::Undecidable) => Tri::Undecidable,
            _ => Tri::Equal,
        }
    }

    /// Index [self : other] as a power of p, requiring containment and equal
    /// rank; undecidable-at-precision when the exponent eats the slack.
    pub fn index_exponent(&self, other: &PLattice) -> Result<u32> {
        if self.rank() != other.rank() {
            return Err(Error::Rank(format!(
                "index needs equal ranks, got {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        if self.contains_lattice(other) == Tri::Unequal {
            return Err(Error::Containment(
                "sublattice is not contained at precision".into(),
            ));
        }
        let cols_self: Vec<usize> = self.pivots.iter().map(|&(c, _)| c).collect();
        let cols_other: Vec<usize> = other.pivots.iter().map(|&(c, _)| c).collect();
        if cols_self != cols_other {
            return Err(Error::Containment(
                "pivot supports differ: not the same Q_p-span".into(),
            ));
        }
        let s1: u32 = self.pivots.iter().map(|&(_, v)| v).sum();
        let s2: u32 = other.pivots.iter().map(|&(_, v)| v).sum();
        if s2 < s1 {
            return Err(Error::Containment("index would be fractional".into()));
        }
        let exp = s2 - s1;
        let head = self.prec.min(other.prec).saturating_sub(self.slack);
        if exp >= head {
            return Err(Error::UndecidableAtPrecision {
                what: format!("index exponent {exp} reaches the precision ceiling"),
                precision: head,
            });
        }
        Ok(exp)
    }

    /// Multiply all coordinates by p^(new_scale - scale) to move to a finer
    /// ambient scale (new_scale >= scale).
    pub fn rescale(&self, new_scale: u32) -> PLattice {
        assert!(new_scale >= self.scale);
        let d = new_scale - self.scale;
        if d == 0 {
            return self.clone();
        }
        let f = pow_p(self.p, d);
        let prec = self.prec + d;
        PLattice {
            p: self.p,
            prec,
            dim: self.dim,
            scale: new_scale,
            slack: self.slack,
            basis: self
                .basis
                .iter()
                .map(|r| r.iter().map(|x| x * &f).collect())
                .collect(),
            pivots: self.pivots.iter().map(|&(c, v)| (c, v + d)).collect(),
        }
    }

    /// Sublattice on which the linear functional (given by its values on the
    /// basis rows) vanishes; rank drops by one unless it already vanishes.
    pub fn kernel_of_functional(&self, values: &[PadicScalar]) -> Result<PLattice> {
        assert_eq!(values.len(), self.basis.len());
        let vals: Vec<Option<u32>> = values.iter().map(|x| x.valuation()).collect();
        let best = (0..values.len()).min_by_key(|&i| vals[i].unwrap_or(u32::MAX));
        let Some(bi) = best else {
            return PLattice::from_generators(self.p, self.dim, self.scale, vec![], self.slack);
        };
        if vals[bi].is_none() {
            // functional already vanishes at precision
            return Ok(self.clone());
        }
        let modulus = pow_p(self.p, self.prec);
        let vb = vals[bi].unwrap();
        let unit = &values[bi].residue / pow_p(self.p, vb);
        let inv = mod_inverse(&unit, &modulus).expect("unit inverts");
        let mut gens: Vec<Vec<PadicScalar>> = Vec::new();
        for (i, row) in self.basis.iter().enumerate() {
            if i == bi {
                continue;
            }
            let vi = &values[i].residue;
            if val_p(vi, self.p).unwrap_or(u32::MAX) < vb {
                return Err(Error::internal("minimal valuation selection failed"));
            }
            let q = vi / pow_p(self.p, vb) * &inv % &modulus;
            let new_row: Vec<PadicScalar> = row
                .iter()
                .zip(&self.basis[bi])
                .map(|(x, y)| {
                    let t = y * &q % &modulus;
                    PadicScalar {
                        p: self.p,
                        prec: self.prec,
                        residue: ((x + &modulus) - t) % &modulus,
                    }
                })
                .collect();
            gens.push(new_row);
        }
        PLattice::from_generators(self.p, self.dim, self.scale, gens, self.slack)
    }

    /// Digest of the echelon basis for report witnesses.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(format!(
            "p={};prec={};dim={};scale={}",
            self.p, self.prec, self.dim, self.scale
        ));
        for (row, &(c, v)) in self.basis.iter().zip(&self.pivots) {
            h.update(format!(";{}:{}:", c, v));
            for x in row {
                h.update(x.to_bytes_le());
                h.update(b",");
            }
        }
        hex_string(&h.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Solve sum_j x_j cols[j] = rhs over Z_p at precision, by valuation-pivoted
/// elimination. Returns None when the system is inconsistent at precision;
/// errors when a solution would need negative valuation (non-integral).
pub fn solve_padic_integral(
    p: u64,
    cols: &[Vec<PadicScalar>],
    rhs: &[PadicScalar],
    slack: u32,
) -> Result<Option<Vec<PadicScalar>>> {
    let ncols = cols.len();
    let rows = rhs.len();
    let mut prec = rhs.iter().map(|x| x.prec).min().unwrap_or(1);
    for c in cols {
        assert_eq!(c.len(), rows);
        for x in c {
            prec = prec.min(x.prec);
        }
    }
    let modulus = pow_p(p, prec);
    // augmented rows: [A | b]
    let mut a: Vec<Vec<BigUint>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigUint> = cols.iter().map(|c| (&c[i].residue) % &modulus).collect();
            row.push((&rhs[i].residue) % &modulus);
            row
        })
        .collect();
    // forward elimination on not-yet-pivoted rows; each pivot row keeps zeros
    // at all earlier pivot columns
    let mut pivots: Vec<(usize, usize, u32)> = Vec::new(); // (col, row, val)
    let mut used = vec![false; rows];
    for c in 0..ncols {
        let mut best: Option<(usize, u32)> = None;
        for (i, row) in a.iter().enumerate() {
            if used[i] {
                continue;
            }
            if let Some(v) = val_p(&row[c], p) {
                if v + slack < prec && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        used[bi] = true;
        let unit = &a[bi][c] / pow_p(p, v);
        let inv = mod_inverse(&unit, &modulus).expect("unit inverts");
        for x in a[bi].iter_mut() {
            *x = &*x * &inv % &modulus;
        }
        let pivot_row = a[bi].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if used[i] || row[c].is_zero() {
                continue;
            }
            let q = &row[c] / pow_p(p, v); // exact by pivot minimality
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                let t = y * &q % &modulus;
                *x = ((&*x + &modulus) - t) % &modulus;
            }
        }
        pivots.push((c, bi, v));
    }
    // consistency: unpivoted rows must have vanishing rhs (mod slack)
    let cut = pow_p(p, prec.saturating_sub(slack));
    for (i, row) in a.iter().enumerate() {
        if !used[i] && !(&row[ncols] % &cut).is_zero() {
            return Ok(None);
        }
    }
    // back-substitution in reverse pivot order; free variables are zero
    let mut sol_residues: Vec<Option<BigUint>> = vec![None; ncols];
    let mut min_prec = prec;
    for &(c, bi, v) in pivots.iter().rev() {
        let mut num = a[bi][ncols].clone();
        for c2 in c + 1..ncols {
            if a[bi][c2].is_zero() {
                continue;
            }
            if let Some(x2) = &sol_residues[c2] {
                let t = &a[bi][c2] * x2 % &modulus;
                num = ((num + &modulus) - t) % &modulus;
            }
        }
        if val_p(&num, p).unwrap_or(u32::MAX) < v {
            return Err(Error::domain(
                "solution is not integral at this precision",
            ));
        }
        sol_residues[c] = Some(num / pow_p(p, v));
        min_prec = min_prec.min(prec - v);
    }
    let sol = sol_residues
        .into_iter()
        .map(|r| PadicScalar {
            p,
            prec: min_prec,
            residue: r.unwrap_or_default() % pow_p(p, min_prec),
        })
        .collect();
    Ok(Some(sol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(p: u64, prec: u32, vals: &[i64]) -> Vec<PadicScalar> {
        vals.iter()
            .map(|&v| {
                PadicScalar::from_bigint(p, prec, &num_bigint::BigInt::from(v))
            })
            .collect()
    }

    #[test]
    fn hand_hnf_with_pivots_one_and_p() {
        // generators {(p,0),(0,p),(1,1)} over Z_p: pivots (1, p)
        let p = 5u64;
        let prec = 12u32;
        let gens = vec![
            scalars(p, prec, &[5, 0]),
            scalars(p, prec, &[0, 5]),
            scalars(p, prec, &[1, 1]),
        ];
        let l = PLattice::from_generators(p, 2, 0, gens, 2).unwrap();
        assert_eq!(l.pivots, vec![(0, 0), (1, 1)]);
        // index vs p * standard: [L : p Z^2] = p^2 / p = p
        let sub = PLattice::from_generators(
            p,
            2,
            0,
            vec![scalars(p, prec, &[5, 0]), scalars(p, prec, &[0, 5])],
            2,
        )
        .unwrap();
        assert_eq!(l.index_exponent(&sub).unwrap(), 1);
        assert_eq!(l.equals(&l), Tri::Equal);
        assert_eq!(l.equals(&sub), Tri::Unequal);
    }

    #[test]
    fn index_stability_across_precision() {
        let p = 3u64;
        for prec in [14u32, 24] {
            let l1 = PLattice::from_generators(
                p,
                2,
                0,
                vec![scalars(p, prec, &[1, 4]), scalars(p, prec, &[0, 9])],
                4,
            )
            .unwrap();
            let l2 = PLattice::from_generators(
                p,
                2,
                0,
                vec![scalars(p, prec, &[3, 12]), scalars(p, prec, &[0, 27])],
                4,
            )
            .unwrap();
            assert_eq!(l1.index_exponent(&l2).unwrap(), 2);
        }
    }

    #[test]
    fn membership_and_kernel() {
        let p = 5u64;
        let prec = 10u32;
        let l = PLattice::from_generators(
            p,
            3,
            0,
            vec![
                scalars(p, prec, &[1, 0, 2]),
                scalars(p, prec, &[0, 5, 1]),
            ],
            2,
        )
        .unwrap();
        assert_eq!(l.contains(&scalars(p, prec, &[1, 5, 3])), Tri::Equal);
        assert_eq!(l.contains(&scalars(p, prec, &[0, 1, 0])), Tri::Unequal);
        // functional f(row0) = 1, f(row1) = 5: kernel has rank 1
        let f = scalars(p, prec, &[1, 5]);
        let k = l.kernel_of_functional(&f).unwrap();
        assert_eq!(k.rank(), 1);
    }

    #[test]
    fn degenerate_pivot_detected() {
        let p = 5u64;
        let prec = 6u32;
        let gens = vec![scalars(p, prec, &[5i64.pow(5), 0])];
        assert!(matches!(
            PLattice::from_generators(p, 2, 0, gens, 3),
            Err(Error::DegeneratePivot { .. })
        ));
    }
}
