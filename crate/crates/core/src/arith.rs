//! Small integer number theory shared by the ring and character modules:
//! factorization at desk scale, Euler phi, CRT, primitive roots and
//! discrete logs in (Z/mZ)^x.

/// Trial-division factorization; fine for the moduli this crate handles.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0u32;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(1)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let mut next = Vec::new();
        for d in &ds {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        ds = next;
    }
    ds.sort_unstable();
    ds
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mm = m as u128;
    let mut aa = (a % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * aa % mm;
        }
        aa = aa * aa % mm;
        e >>= 1;
    }
    let _ = &mut a;
    acc as u64
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    let mut t = t % m as i128;
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let phi = euler_phi(m);
    let mut order = phi;
    for (q, _) in factor(phi) {
        while order % q == 0 && pow_mod(a, order / q, m) == 1 {
            order /= q;
        }
    }
    order
}

/// Smallest primitive root modulo p^k (p an odd prime, k >= 1).
pub fn primitive_root_odd_prime_power(p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    let phi = euler_phi(m);
    'g: for g in 2..m {
        if g % p == 0 {
            continue;
        }
        for (q, _) in factor(phi) {
            if pow_mod(g, phi / q, m) == 1 {
                continue 'g;
            }
        }
        return g;
    }
    unreachable!("odd prime powers always have primitive roots")
}

/// CRT lift: x = r1 mod m1, x = r2 mod m2 with gcd(m1, m2) = 1.
pub fn crt(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    let m = m1 * m2;
    let inv = inv_mod(m1 % m2, m2).expect("crt moduli must be coprime");
    let diff = ((r2 + m2) - (r1 % m2)) % m2;
    (r1 + m1 * ((diff as u128 * inv as u128 % m2 as u128) as u64)) % m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(245), 168);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mult_order(7, 5), 4);
        assert_eq!(mult_order(2, 7), 3);
        assert_eq!(crt(2, 3, 3, 5), 8);
        assert_eq!(inv_mod(3, 25), Some(17));
        let g = primitive_root_odd_prime_power(5, 2);
        assert_eq!(mult_order(g, 25), 20);
    }
}
