//! Integer lattices: Hermite normal form, Smith normal form, exact index,
//! intersection and kernel, all over BigInt with denominators cleared by the
//! caller (fraction-free throughout).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type ZMat = Vec<Vec<BigInt>>;

/// A full- or partial-rank lattice in Z^dim, canonicalized by row HNF.
#[derive(Clone, Debug)]
pub struct ZLattice {
    pub dim: usize,
    /// HNF basis rows: pivot columns strictly increasing, pivots positive,
    /// entries above each pivot reduced to [0, pivot).
    pub basis: ZMat,
    pub pivots: Vec<usize>,
}

impl ZLattice {
    pub fn from_generators(dim: usize, gens: ZMat) -> ZLattice {
        for g in &gens {
            assert_eq!(g.len(), dim, "generator dimension mismatch");
        }
        let (basis, pivots) = hnf(gens, dim);
        ZLattice { dim, basis, pivots }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn standard(dim: usize) -> ZLattice {
        let gens = (0..dim)
            .map(|i| {
                let mut row = vec![BigInt::zero(); dim];
                row[i] = BigInt::one();
                row
            })
            .collect();
        Self::from_generators(dim, gens)
    }

    /// Solve x * basis = v exactly over Z; None when v is outside the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut v = v.to_vec();
        let mut coords = vec![BigInt::zero(); self.basis.len()];
        for (r, &pc) in self.pivots.iter().enumerate() {
            let (q, rem) = v[pc].div_rem(&self.basis[r][pc]);
            if !rem.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for j in 0..self.dim {
                    let t = &self.basis[r][j] * &q;
                    v[j] -= t;
                }
            }
            coords[r] = q;
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &ZLattice) -> bool {
        other.basis.iter().all(|g| self.contains(g))
    }

    pub fn eq_lattice(&self, other: &ZLattice) -> bool {
        self.basis == other.basis && self.pivots == other.pivots
    }

    /// Index [self : other] for other a finite-index sublattice of self
    /// (same rank); errors on containment or rank violations.
    pub fn index_of(&self, other: &ZLattice) -> Result<BigInt> {
        if self.rank() != other.rank() {
            return Err(Error::Rank(format!(
                "index needs equal ranks, got {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let mut mat = Vec::with_capacity(other.basis.len());
        for g in &other.basis {
            let coords = self.coordinates(g).ok_or_else(|| {
                Error::Containment("sublattice generator outside the big lattice".into())
            })?;
            mat.push(coords);
        }
        let d = det_bareiss(mat)?;
        if d.is_zero() {
            return Err(Error::Rank("sublattice has lower rank".into()));
        }
        Ok(d.abs())
    }

    /// Sum of lattices (join).
    pub fn sum(&self, other: &ZLattice) -> ZLattice {
        assert_eq!(self.dim, other.dim);
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        ZLattice::from_generators(self.dim, gens)
    }

    /// Intersection via integer kernel of the stacked basis.
    pub fn intersect(&self, other: &ZLattice) -> ZLattice {
        assert_eq!(self.dim, other.dim);
        // rows of [A; B]; kernel vectors (u, v) with uA + vB = 0 give uA.
        let ra = self.basis.len();
        let mut stacked: ZMat = self.basis.clone();
        stacked.extend(other.basis.iter().map(|r| r.iter().map(|x| -x).collect()));
        let ker = kernel(&stacked);
        let gens: ZMat = ker
            .into_iter()
            .map(|k| {
                let mut v = vec![BigInt::zero(); self.dim];
                for (i, c) in k[..ra].iter().enumerate() {
                    for j in 0..self.dim {
                        v[j] += c * &self.basis[i][j];
                    }
                }
                v
            })
            .collect();
        ZLattice::from_generators(self.dim, gens)
    }

    /// Elementary divisors of the quotient self/other (other of finite index).
    pub fn quotient_divisors(&self, other: &ZLattice) -> Result<Vec<BigInt>> {
        if self.rank() != other.rank() {
            return Err(Error::Rank("quotient needs equal ranks".into()));
        }
        let mut mat = Vec::with_capacity(other.basis.len());
        for g in &other.basis {
            let coords = self.coordinates(g).ok_or_else(|| {
                Error::Containment("sublattice generator outside the big lattice".into())
            })?;
            mat.push(coords);
        }
        Ok(snf_diagonal(mat))
    }
}

/// Row Hermite normal form; returns (basis rows, pivot columns).
pub fn hnf(mut rows: ZMat, dim: usize) -> (ZMat, Vec<usize>) {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut basis: ZMat = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut work = rows;
    let mut col = 0usize;
    while col < dim && !work.is_empty() {
        // gather rows with nonzero entry in this column
        let mut has: Vec<usize> = (0..work.len())
            .filter(|&i| !work[i][col].is_zero())
            .collect();
        if has.is_empty() {
            col += 1;
            continue;
        }
        // reduce via gcd chain until one row remains nonzero in this column
        while has.len() > 1 {
            has.sort_by(|&a, &b| work[a][col].abs().cmp(&work[b][col].abs()));
            let small = has[0];
            let small_val = work[small][col].clone();
            for &i in &has[1..] {
                let q = div_round(&work[i][col], &small_val);
                if !q.is_zero() {
                    for j in 0..dim {
                        let t = &work[small][j] * &q;
                        work[i][j] -= t;
                    }
                }
            }
            has.retain(|&i| !work[i][col].is_zero());
        }
        let r = has[0];
        let mut row = work.remove(r);
        if row[col].is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
        basis.push(row);
        pivots.push(col);
        col += 1;
    }
    // reduce entries above pivots
    for r in (0..basis.len()).rev() {
        let pc = pivots[r];
        let pv = basis[r][pc].clone();
        for i in 0..r {
            let q = basis[i][pc].div_floor(&pv);
            if !q.is_zero() {
                for j in 0..basis[0].len() {
                    let t = &basis[r][j] * &q;
                    basis[i][j] -= t;
                }
            }
        }
    }
    (basis, pivots)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer division to shrink |a| below |b|
    let (q, r) = a.div_rem(b);
    if (&r * 2u32).abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(mut m: ZMat) -> Result<BigInt> {
    let n = m.len();
    if n == 0 {
        return Ok(BigInt::one());
    }
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = t.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
                let _ = r;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(sign * m[n - 1][n - 1].clone())
}

/// Integer kernel (row vectors u with u M = 0) of an r x c matrix.
pub fn kernel(m: &ZMat) -> ZMat {
    let r = m.len();
    if r == 0 {
        return vec![];
    }
    let c = m[0].len();
    // Transform [M | I] by the HNF row operations; kernel rows are the I-part
    // rows whose M-part became zero.
    let mut aug: ZMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            let mut id = vec![BigInt::zero(); r];
            id[i] = BigInt::one();
            v.extend(id);
            v
        })
        .collect();
    // plain gcd-style elimination on the first c columns
    let mut row_used = vec![false; r];
    for col in 0..c {
        loop {
            let mut cands: Vec<usize> = (0..r)
                .filter(|&i| !row_used[i] && !aug[i][col].is_zero())
                .collect();
            if cands.len() <= 1 {
                if let Some(&i) = cands.first() {
                    row_used[i] = true;
                }
                break;
            }
            cands.sort_by(|&a, &b| aug[a][col].abs().cmp(&aug[b][col].abs()));
            let small = cands[0];
            let small_val = aug[small][col].clone();
            for &i in &cands[1..] {
                let q = div_round(&aug[i][col], &small_val);
                if !q.is_zero() {
                    for j in 0..c + r {
                        let t = &aug[small][j] * &q;
                        aug[i][j] -= t;
                    }
                }
            }
        }
    }
    aug.into_iter()
        .filter(|row| row[..c].iter().all(|x| x.is_zero()))
        .map(|row| row[c..].to_vec())
        .collect()
}

/// Diagonal of the Smith normal form (elementary divisors, nonzero part).
pub fn snf_diagonal(mut m: ZMat) -> Vec<BigInt> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut out = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    while top < rows && left < cols {
        // find a nonzero pivot
        let mut piv = None;
        'search: for i in top..rows {
            for j in left..cols {
                if !m[i][j].is_zero() {
                    piv = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(left, pj);
        }
        // clear row and column at (top, left) by gcd reduction
        loop {
            let mut dirty = false;
            for i in top + 1..rows {
                if !m[i][left].is_zero() {
                    let q = div_round(&m[i][left], &m[top][left]);
                    for j in left..cols {
                        let t = &m[top][j] * &q;
                        m[i][j] -= t;
                    }
                    if !m[i][left].is_zero() {
                        m.swap(top, i);
                    }
                    dirty = true;
                }
            }
            for j in left + 1..cols {
                if !m[top][j].is_zero() {
                    let q = div_round(&m[top][j], &m[top][left]);
                    for i in top..rows {
                        let t = &m[i][left] * &q;
                        m[i][j] -= t;
                    }
                    if !m[top][j].is_zero() {
                        for row in m.iter_mut() {
                            row.swap(left, j);
                        }
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        out.push(m[top][left].abs());
        top += 1;
        left += 1;
    }
    // enforce divisibility chain
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..out.len().saturating_sub(1) {
            if out[i].is_zero() || out[i + 1].is_zero() {
                continue;
            }
            if !(&out[i + 1] % &out[i]).is_zero() {
                let g = out[i].gcd(&out[i + 1]);
                let l = &out[i] * &out[i + 1] / &g;
                out[i] = g;
                out[i + 1] = l;
                changed = true;
            }
        }
    }
    out.retain(|d| !d.is_zero());
    out
}

/// Clear denominators: scale rational rows to integer rows by the global lcm,
/// returning (rows, scale) with rows = scale * input.
pub fn clear_denominators(rows: &[Vec<BigRational>]) -> (ZMat, BigInt) {
    let mut scale = BigInt::one();
    for row in rows {
        for x in row {
            scale = scale.lcm(x.denom());
        }
    }
    let out = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let v = x * BigRational::from(scale.clone());
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    (out, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn lat(dim: usize, gens: &[&[i64]]) -> ZLattice {
        ZLattice::from_generators(
            dim,
            gens.iter()
                .map(|r| r.iter().map(|&x| z(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn hnf_canonical_under_row_mixups() {
        let a = lat(3, &[&[2, 0, 1], &[0, 3, 1], &[0, 0, 7]]);
        let b = lat(
            3,
            &[&[2, 3, 2], &[0, 3, 1], &[0, 0, 7], &[2, 0, 8], &[2, 3, 16]],
        );
        assert!(a.eq_lattice(&b));
    }

    #[test]
    fn index_and_divisors() {
        let l1 = lat(2, &[&[1, 0], &[0, 1]]);
        let l2 = lat(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(l1.index_of(&l2).unwrap(), z(6));
        assert_eq!(l1.index_of(&l1).unwrap(), z(1));
        let divs = l1.quotient_divisors(&l2).unwrap();
        assert_eq!(divs, vec![z(1), z(6)]);
        // containment violation reported
        let l3 = lat(2, &[&[1, 0], &[0, 1]]);
        assert!(l2.index_of(&l3).is_err());
    }

    #[test]
    fn duplicated_generators_and_p_zp_example() {
        let a = lat(2, &[&[5, 0], &[0, 5], &[1, 1]]);
        let b = lat(2, &[&[1, 1], &[0, 5]]);
        assert!(a.eq_lattice(&b));
        let dup = lat(2, &[&[1, 1], &[1, 1], &[0, 5]]);
        assert!(dup.eq_lattice(&b));
    }

    #[test]
    fn intersection() {
        let l1 = lat(2, &[&[1, 0], &[0, 1]]);
        let l2 = lat(2, &[&[2, 0], &[0, 2]]);
        assert!(l1.intersect(&l2).eq_lattice(&l2));
        let a = lat(2, &[&[2, 0], &[0, 1]]);
        let b = lat(2, &[&[1, 0], &[0, 2]]);
        let c = a.intersect(&b);
        assert!(c.eq_lattice(&lat(2, &[&[2, 0], &[0, 2]])));
        // partial rank: span{(1,1)} meet span{(1,-1)} = {0}... over Z: trivial
        let d = lat(2, &[&[1, 1]]).intersect(&lat(2, &[&[1, -1]]));
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn index_multiplicative_on_random_chains() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let dim = rng.gen_range(2..=5usize);
            let l1 = ZLattice::standard(dim);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, base: &ZLattice| {
                let gens: ZMat = (0..dim + 1)
                    .map(|_| {
                        // random integer combinations scaled to force finite index
                        let mut v = vec![BigInt::zero(); dim];
                        for (j, b) in base.basis.iter().enumerate() {
                            let c = z(rng.gen_range(-3i64..=3) * if j == 0 { 2 } else { 1 });
                            for (x, y) in v.iter_mut().zip(b) {
                                *x += &c * y;
                            }
                        }
                        v
                    })
                    .collect();
                let mut with_scaled = gens;
                for b in &base.basis {
                    with_scaled.push(b.iter().map(|x| x * z(6)).collect());
                }
                ZLattice::from_generators(dim, with_scaled)
            };
            let l2 = mk(&mut rng, &l1);
            let l3 = mk(&mut rng, &l2);
            let i12 = l1.index_of(&l2).unwrap();
            let i23 = l2.index_of(&l3).unwrap();
            let i13 = l1.index_of(&l3).unwrap();
            assert_eq!(i12 * i23, i13);
        }
    }
}
