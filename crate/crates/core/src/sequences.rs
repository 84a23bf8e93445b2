//! The binary threshold sequence, generated from the quotient directly and
//! from class membership.

use crate::error::{Error, Result};
use crate::quotients::{find_normalized_root, CyclotomicPartition, Params};

/// A window of a periodic binary sequence starting at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarySequence {
    bits: Vec<bool>,
    asserted_period: u64,
    params: Params,
}

impl BinarySequence {
    pub fn new(params: Params, bits: Vec<bool>, asserted_period: u64) -> Self {
        BinarySequence { bits, asserted_period, params }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn asserted_period(&self) -> u64 {
        self.asserted_period
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// `e_u = 1` iff `2 Q_r(u) >= p^r`, for `u` in `[0, count)`.
pub fn generate_threshold(params: &Params, count: usize) -> BinarySequence {
    let r = params.r_frak();
    let pr = params.class_count(r);
    let quotient = params.quotient(r);
    let bits = (0..count as u64).map(|u| 2 * quotient.eval(u) >= pr).collect();
    BinarySequence::new(params.clone(), bits, params.period())
}

/// The same sequence, produced by marking every class in the upper half
/// `(p^r+1)/2 ..= p^r - 1`.
pub fn generate_cyclotomic(params: &Params, count: usize) -> Result<BinarySequence> {
    let root = find_normalized_root(params)?;
    let top = CyclotomicPartition::new(params, &root, params.r_frak())?;
    let period = params.period() as usize;
    let mut head = vec![false; period];
    for l in params.upper_half(params.r_frak()) {
        for &v in top.members(l).iter() {
            head[v as usize] = true;
        }
    }
    Ok(BinarySequence::new(params.clone(), tile(&head, count), params.period()))
}

/// Characteristic sequence of the class `D_i` at the top level.
pub fn indicator_sequence(params: &Params, i: u64, count: usize) -> Result<BinarySequence> {
    let classes = params.class_count(params.r_frak());
    if i >= classes {
        return Err(Error::IndexOutOfRange { index: i, bound: classes });
    }
    let root = find_normalized_root(params)?;
    let top = CyclotomicPartition::new(params, &root, params.r_frak())?;
    let mut head = vec![false; params.period() as usize];
    for &v in top.members(i).iter() {
        head[v as usize] = true;
    }
    Ok(BinarySequence::new(params.clone(), tile(&head, count), params.period()))
}

fn tile(head: &[bool], count: usize) -> Vec<bool> {
    head.iter().copied().cycle().take(count).collect()
}

/// Least period of the stored window. Needs at least two asserted periods.
pub fn detect_period(seq: &BinarySequence) -> Result<u64> {
    let need = 2 * seq.asserted_period() as usize;
    if seq.len() < need || seq.is_empty() {
        return Err(Error::InsufficientData { have: seq.len(), need: need.max(1) });
    }
    Ok(least_period(seq.bits()) as u64)
}

/// Smallest `t >= 1` with `s[i] = s[i + t]` for all valid `i`, from the
/// prefix function of `s`.
pub fn least_period(s: &[bool]) -> usize {
    if s.is_empty() {
        return 0;
    }
    let mut pi = vec![0usize; s.len()];
    for i in 1..s.len() {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    s.len() - pi[s.len() - 1]
}
