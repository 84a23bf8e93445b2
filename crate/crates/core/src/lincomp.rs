//! Linear complexity three ways: Berlekamp-Massey on the bits, the closed
//! form in `p` and `r`, and the monomial count of the defining polynomial.

use serde::Serialize;

use crate::defining::DefiningData;
use crate::error::{Error, Result};
use crate::quotients::{is_wieferich, two_order_profile, Params};
use crate::sequences::generate_threshold;

/// Shortest LFSR found by Berlekamp-Massey.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lfsr {
    pub linear_complexity: usize,
    /// `c_0 = 1, c_1, ..., c_L` with `s_n = c_1 s_{n-1} + ... + c_L s_{n-L}`.
    pub connection: Vec<bool>,
    /// Linear complexity of every prefix.
    pub profile: Vec<usize>,
}

impl Lfsr {
    /// Runs the recurrence from the first `L` bits of `seed`.
    pub fn extend(&self, seed: &[bool], len: usize) -> Vec<bool> {
        let l = self.linear_complexity;
        let mut out: Vec<bool> = seed[..l.min(seed.len())].to_vec();
        while out.len() < len {
            let n = out.len();
            let next = (1..=l).filter(|&i| self.connection[i]).fold(false, |acc, i| acc ^ out[n - i]);
            out.push(next);
        }
        out.truncate(len);
        out
    }
}

fn pack(bits: impl Iterator<Item = bool>, len: usize) -> Vec<u64> {
    let mut words = vec![0u64; len.div_ceil(64) + 1];
    for (i, b) in bits.enumerate() {
        if b {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

/// 64 bits of `words` starting at bit `off`, zero past the end.
#[inline]
fn window(words: &[u64], off: usize) -> u64 {
    let (w, b) = (off / 64, off % 64);
    let lo = words.get(w).copied().unwrap_or(0);
    if b == 0 {
        lo
    } else {
        (lo >> b) | (words.get(w + 1).copied().unwrap_or(0) << (64 - b))
    }
}

fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &s) in src.iter().enumerate() {
        if ws + i >= dst.len() {
            break;
        }
        dst[ws + i] ^= s << bs;
        if bs != 0 && ws + i + 1 < dst.len() {
            dst[ws + i + 1] ^= s >> (64 - bs);
        }
    }
}

/// Berlekamp-Massey over GF(2) on packed words. The discrepancy is the parity
/// of `popcount(C & window)` with the input stored bit-reversed.
pub fn berlekamp_massey(bits: &[bool]) -> Result<Lfsr> {
    let n_bits = bits.len();
    if n_bits == 0 {
        return Err(Error::InsufficientData { have: 0, need: 1 });
    }
    let reversed = pack(bits.iter().rev().copied(), n_bits);
    let words = n_bits.div_ceil(64) + 1;
    let mut c = vec![0u64; words];
    let mut b = vec![0u64; words];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut m: i64 = -1;
    let mut profile = Vec::with_capacity(n_bits);
    for n in 0..n_bits {
        // s_{n-i} sits at reversed bit (n_bits - 1 - n + i)
        let off = n_bits - 1 - n;
        let mut parity = 0u32;
        for (k, &ck) in c.iter().enumerate().take(l / 64 + 1) {
            parity ^= (ck & window(&reversed, off + 64 * k)).count_ones();
        }
        if parity & 1 == 1 {
            let t = c.clone();
            xor_shifted(&mut c, &b, (n as i64 - m) as usize);
            if 2 * l <= n {
                l = n + 1 - l;
                m = n as i64;
                b = t;
            }
        }
        profile.push(l);
    }
    let connection = (0..=l).map(|i| (c[i / 64] >> (i % 64)) & 1 == 1).collect();
    Ok(Lfsr { linear_complexity: l, connection, profile })
}

/// Parity of `m`.
pub fn epsilon(m: u64) -> u8 {
    (m % 2) as u8
}

/// `p^(r+1) - p + (p-1) * epsilon((p^r - 1)/2)`, valid for non-Wieferich `p`.
pub fn closed_form_lc(params: &Params) -> Result<u64> {
    let p = params.p();
    if is_wieferich(p) {
        let profile = two_order_profile(p, 1)?;
        return Err(Error::Wieferich { p, lambda: profile.lambda, t0: profile.t0 });
    }
    let eps = epsilon((params.class_count(params.r_frak()) - 1) / 2) as u64;
    Ok(params.period() - p + (p - 1) * eps)
}

/// Hamming weight of the defining polynomial G.
pub fn weight_of_g(dd: &DefiningData) -> u64 {
    dd.monomial_count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearComplexityReport {
    pub bm_value: u64,
    pub closed_form_value: u64,
    pub weight_value: u64,
    pub epsilon_flag: u8,
    pub agree: bool,
    /// The `r = 1` case of the closed form comes from earlier work on Fermat quotients.
    pub r1_prior_work: bool,
}

impl LinearComplexityReport {
    pub fn compute(dd: &DefiningData) -> Result<Self> {
        let params = dd.params();
        let doubled = generate_threshold(params, 2 * params.period() as usize);
        let bm_value = berlekamp_massey(doubled.bits())?.linear_complexity as u64;
        let closed_form_value = closed_form_lc(params)?;
        let weight_value = weight_of_g(dd);
        Ok(LinearComplexityReport {
            bm_value,
            closed_form_value,
            weight_value,
            epsilon_flag: epsilon((params.class_count(params.r_frak()) - 1) / 2),
            agree: bm_value == closed_form_value && closed_form_value == weight_value,
            r1_prior_work: params.r_frak() == 1,
        })
    }
}
