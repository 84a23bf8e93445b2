//! Polynomials over GF(2) packed into 64-bit words, least significant word first.

use std::fmt;

/// Carry-less product of two words as a 128-bit value.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    ClmulTable::new(a).mul(b)
}

/// Multiples of a fixed word by every 4-bit polynomial.
pub(crate) struct ClmulTable([u128; 16]);

impl ClmulTable {
    #[inline]
    pub(crate) fn new(a: u64) -> Self {
        let mut t = [0u128; 16];
        let a = a as u128;
        for i in 1..16usize {
            t[i] = t[i & (i - 1)] ^ (a << i.trailing_zeros());
        }
        ClmulTable(t)
    }

    #[inline]
    pub(crate) fn mul(&self, b: u64) -> u128 {
        let mut acc = 0u128;
        for nib in (0..16).rev() {
            acc = (acc << 4) ^ self.0[((b >> (4 * nib)) & 0xf) as usize];
        }
        acc
    }
}

/// `out ^= a * b`; `out` must hold at least `a.len() + b.len()` words.
pub(crate) fn mul_acc(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let table = ClmulTable::new(ai);
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0 {
                continue;
            }
            let prod = table.mul(bj);
            out[i + j] ^= prod as u64;
            out[i + j + 1] ^= (prod >> 64) as u64;
        }
    }
}

/// Interleaves zero bits into the low 32 bits of `x`.
#[inline]
fn spread32(x: u64) -> u64 {
    let mut x = x & 0xffff_ffff;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// Squaring is linear over GF(2): spread every bit to an even position.
pub(crate) fn square_into(a: &[u64], out: &mut [u64]) {
    for (i, &w) in a.iter().enumerate() {
        out[2 * i] = spread32(w);
        out[2 * i + 1] = spread32(w >> 32);
    }
}

pub(crate) fn words_degree(w: &[u64]) -> Option<usize> {
    w.iter()
        .rposition(|&x| x != 0)
        .map(|i| 64 * i + 63 - w[i].leading_zeros() as usize)
}

/// `dst ^= src << shift`, growing `dst` as needed.
pub(crate) fn xor_shifted(dst: &mut Vec<u64>, src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let need = ws + src.len() + 1;
    if dst.len() < need {
        dst.resize(need, 0);
    }
    if bs == 0 {
        for (i, &s) in src.iter().enumerate() {
            dst[ws + i] ^= s;
        }
    } else {
        for (i, &s) in src.iter().enumerate() {
            dst[ws + i] ^= s << bs;
            dst[ws + i + 1] ^= s >> (64 - bs);
        }
    }
}

/// Bits `shift..` of `src`, shifted down to position 0.
pub(crate) fn shr_words(src: &[u64], shift: usize) -> Vec<u64> {
    let (ws, bs) = (shift / 64, shift % 64);
    if ws >= src.len() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(src.len() - ws);
    for i in ws..src.len() {
        let lo = src[i] >> bs;
        let hi = if bs != 0 && i + 1 < src.len() { src[i + 1] << (64 - bs) } else { 0 };
        out.push(lo | hi);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPoly {
    words: Vec<u64>,
}

impl BitPoly {
    pub fn zero() -> Self {
        BitPoly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn x() -> Self {
        Self::from_u64(2)
    }

    pub fn monomial(d: usize) -> Self {
        let mut p = Self::zero();
        p.set_bit(d, true);
        p
    }

    /// The polynomial whose coefficient bits are the bits of `w`.
    pub fn from_u64(w: u64) -> Self {
        Self::from_words(vec![w])
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = BitPoly { words };
        p.normalize();
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        words_degree(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    pub fn bit(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        if self.words.len() <= i / 64 {
            if !value {
                return;
            }
            self.words.resize(i / 64 + 1, 0);
        }
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
            self.normalize();
        }
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) =
            if self.words.len() >= other.words.len() { (self, other) } else { (other, self) };
        let mut words = long.words.clone();
        for (d, s) in words.iter_mut().zip(&short.words) {
            *d ^= s;
        }
        Self::from_words(words)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.words.len() + other.words.len()];
        mul_acc(&self.words, &other.words, &mut out);
        Self::from_words(out)
    }

    pub fn square(&self) -> Self {
        let mut out = vec![0u64; 2 * self.words.len()];
        square_into(&self.words, &mut out);
        Self::from_words(out)
    }

    pub fn shl(&self, n: usize) -> Self {
        let mut out = Vec::new();
        xor_shifted(&mut out, &self.words, n);
        Self::from_words(out)
    }

    /// Quotient and remainder of schoolbook long division.
    ///
    /// # Panics
    /// If `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.words.clone();
        let mut quot = BitPoly::zero();
        while let Some(d) = words_degree(&rem) {
            if d < dd {
                break;
            }
            quot.set_bit(d - dd, true);
            xor_shifted(&mut rem, &divisor.words, d - dd);
        }
        (quot, Self::from_words(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

impl fmt::Display for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(deg) = self.degree() else {
            return write!(f, "0");
        };
        let mut first = true;
        for i in (0..=deg).rev().filter(|&i| self.bit(i)) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({self})")
    }
}
