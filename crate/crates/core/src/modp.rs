//! Arithmetic in prime fields below 2^63, used for randomized identity tests
//! and multi-modular determinants.

use rand::Rng;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat's little theorem; `p` must be prime and `a` nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn odd candidate in `[2^60, 2^61)`, advanced to the next prime.
pub fn random_prime_61<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let mut c = rng.gen_range(1u64 << 60..1u64 << 61) | 1;
        while c < 1u64 << 61 {
            if is_prime(c) {
                return c;
            }
            c += 2;
        }
    }
}

/// The `count` largest primes below 2^61, in decreasing order.
pub fn primes_below_2_61(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 61) - 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Determinant of a square matrix over GF(p) by Gaussian elimination.
pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| m[r][k] != 0) else {
            return 0;
        };
        if piv != k {
            m.swap(piv, k);
            det = sub_mod(0, det, p);
        }
        let pivot = m[k][k];
        det = mul_mod(det, pivot, p);
        let inv = inv_mod(pivot, p);
        for r in k + 1..n {
            if m[r][k] == 0 {
                continue;
            }
            let f = mul_mod(m[r][k], inv, p);
            for c in k..n {
                let t = mul_mod(f, m[k][c], p);
                m[r][c] = sub_mod(m[r][c], t, p);
            }
        }
    }
    det
}
