//! Word-size modular arithmetic with 128-bit intermediates, plus a few
//! factorisation helpers sized for desk-scale moduli.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
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

/// Prime factorisation by trial division. Adequate for the group orders that
/// show up here (p - 1 and powers of p).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        if n > 1 && is_prime(n) {
            break;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q * (q - 1))
}

/// Largest `e` with `p^e | n`; `n` must be nonzero.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

pub fn big_valuation(n: &BigUint, p: u64) -> u32 {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut e = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        e += 1;
    }
    e
}

/// Modulus that may or may not fit in a machine word.
#[derive(Clone, Debug)]
pub(crate) enum WideModulus {
    Word(u64),
    Big(BigUint),
}

impl WideModulus {
    pub fn power_of(p: u64, e: u32) -> Self {
        match p.checked_pow(e) {
            Some(m) => WideModulus::Word(m),
            None => WideModulus::Big(BigUint::from(p).pow(e)),
        }
    }

    /// `base^exp mod m` returned as a big integer when the modulus is big.
    pub fn pow(&self, base: u64, exp: u64) -> BigUint {
        match self {
            WideModulus::Word(m) => BigUint::from(pow_mod(base, exp, *m)),
            WideModulus::Big(m) => BigUint::from(base).modpow(&BigUint::from(exp), m),
        }
    }

    pub fn pow_word(&self, base: u64, exp: u64) -> Option<u64> {
        match self {
            WideModulus::Word(m) => Some(pow_mod(base, exp, *m)),
            WideModulus::Big(_) => None,
        }
    }
}
