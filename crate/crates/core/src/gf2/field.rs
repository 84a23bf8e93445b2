use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::poly::{mul_acc, shr_words, square_into, words_degree, BitPoly};
use crate::error::{Error, Result};

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Reduction modulo `x^N + tail`, folding the high part back through `tail`.
/// Cheap when the tail is short, which the lexicographically smallest
/// irreducible modulus always is in practice.
#[derive(Clone, Debug)]
pub(crate) struct Reducer {
    degree: usize,
    words: usize,
    tail: Vec<u64>,
}

impl Reducer {
    pub(crate) fn new(modulus: &BitPoly) -> Self {
        let degree = modulus.degree().expect("nonzero modulus");
        let mut tail = modulus.clone();
        tail.set_bit(degree, false);
        Reducer { degree, words: degree.div_ceil(64).max(1), tail: tail.words().to_vec() }
    }

    /// Reduces `buf` in place and returns exactly `self.words` words.
    pub(crate) fn reduce(&self, mut buf: Vec<u64>) -> Vec<u64> {
        let n = self.degree;
        while let Some(d) = words_degree(&buf) {
            if d < n {
                break;
            }
            let high = shr_words(&buf, n);
            // clear bits >= n
            let (ws, bs) = (n / 64, n % 64);
            for w in buf.iter_mut().skip(ws + usize::from(bs != 0)) {
                *w = 0;
            }
            if bs != 0 {
                buf[ws] &= (1u64 << bs) - 1;
            }
            let need = high.len() + self.tail.len();
            if buf.len() < need {
                buf.resize(need, 0);
            }
            mul_acc(&high, &self.tail, &mut buf);
        }
        buf.resize(self.words, 0);
        buf
    }

    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len()];
        mul_acc(a, b, &mut out);
        self.reduce(out)
    }

    pub(crate) fn square(&self, a: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; 2 * a.len()];
        square_into(a, &mut out);
        self.reduce(out)
    }
}

/// GF(2^N) realised as GF(2)[x] modulo an irreducible polynomial of degree N.
pub struct FieldContext {
    id: u64,
    modulus: BitPoly,
    reducer: Reducer,
    group_order: BigUint,
}

impl FieldContext {
    /// Wraps a modulus that the caller has already certified irreducible.
    pub(crate) fn from_irreducible(modulus: BitPoly) -> Arc<Self> {
        let reducer = Reducer::new(&modulus);
        let group_order = (BigUint::one() << reducer.degree) - BigUint::one();
        Arc::new(FieldContext {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            modulus,
            reducer,
            group_order,
        })
    }

    /// Builds a context over an arbitrary modulus, checking irreducibility.
    pub fn with_modulus(modulus: BitPoly) -> Result<Arc<Self>> {
        let degree = modulus.degree().unwrap_or(0);
        if degree == 0 || degree > super::MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(degree));
        }
        if !super::is_irreducible(&modulus) {
            return Err(Error::Consistency(format!("{modulus} is reducible")));
        }
        Ok(Self::from_irreducible(modulus))
    }

    pub fn degree(&self) -> usize {
        self.reducer.degree
    }

    pub fn modulus(&self) -> &BitPoly {
        &self.modulus
    }

    /// `2^N - 1`.
    pub fn group_order(&self) -> &BigUint {
        &self.group_order
    }

    pub(crate) fn word_count(&self) -> usize {
        self.reducer.words
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { ctx: Arc::clone(self), w: vec![0; self.word_count()] }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.element(&BitPoly::one())
    }

    /// The residue of `poly` modulo the field modulus.
    pub fn element(self: &Arc<Self>, poly: &BitPoly) -> FieldElement {
        FieldElement { ctx: Arc::clone(self), w: self.reducer.reduce(poly.words().to_vec()) }
    }

    /// Parses the `gf2:<N>:<hex>` form written by [`FieldElement::to_hex`].
    pub fn parse_element(self: &Arc<Self>, s: &str) -> Result<FieldElement> {
        let rest = s
            .strip_prefix("gf2:")
            .ok_or_else(|| Error::Parse(format!("missing gf2: prefix in {s:?}")))?;
        let (deg, hex) =
            rest.split_once(':').ok_or_else(|| Error::Parse(format!("malformed element {s:?}")))?;
        let deg: usize = deg.parse().map_err(|_| Error::Parse(format!("bad degree in {s:?}")))?;
        if deg != self.degree() {
            return Err(Error::ContextMismatch);
        }
        let wc = self.word_count();
        if hex.len() != 16 * wc || !hex.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(Error::Parse(format!("expected {} lowercase hex digits", 16 * wc)));
        }
        let mut w = vec![0u64; wc];
        for (i, chunk) in hex.as_bytes().chunks(16).enumerate() {
            let text = std::str::from_utf8(chunk).expect("ascii");
            w[wc - 1 - i] = u64::from_str_radix(text, 16).expect("validated hex");
        }
        if words_degree(&w).is_some_and(|d| d >= deg) {
            return Err(Error::Parse(format!("element {s:?} is not reduced")));
        }
        Ok(FieldElement { ctx: Arc::clone(self), w })
    }
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("degree", &self.degree())
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// An element of a [`FieldContext`], stored as `ceil(N/64)` reduced words.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldContext>,
    w: Vec<u64>,
}

impl FieldElement {
    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn words(&self) -> &[u64] {
        &self.w
    }

    pub fn to_poly(&self) -> BitPoly {
        BitPoly::from_words(self.w.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.w[0] == 1 && self.w[1..].iter().all(|&x| x == 0)
    }

    fn same_context(&self, other: &Self) -> bool {
        self.ctx.id == other.ctx.id
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn with_words(&self, w: Vec<u64>) -> Self {
        FieldElement { ctx: Arc::clone(&self.ctx), w }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_words(self.w.iter().zip(&other.w).map(|(a, b)| a ^ b).collect()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_words(self.ctx.reducer.mul(&self.w, &other.w)))
    }

    pub fn square(&self) -> Self {
        self.with_words(self.ctx.reducer.square(&self.w))
    }

    /// `self^(2^k)`.
    pub fn frobenius(&self, k: usize) -> Self {
        let mut w = self.w.clone();
        for _ in 0..k {
            w = self.ctx.reducer.square(&w);
        }
        self.with_words(w)
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow_bits(64 - e.leading_zeros() as usize, |i| (e >> i) & 1 == 1)
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        self.pow_bits(e.bits() as usize, |i| e.bit(i as u64))
    }

    fn pow_bits(&self, nbits: usize, bit: impl Fn(usize) -> bool) -> Self {
        let red = &self.ctx.reducer;
        let mut acc = self.ctx.one().w;
        for i in (0..nbits).rev() {
            acc = red.square(&acc);
            if bit(i) {
                acc = red.mul(&acc, &self.w);
            }
        }
        self.with_words(acc)
    }

    /// `self^(2^N - 2)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let e = self.ctx.group_order() - BigUint::one();
        Ok(self.pow(&e))
    }

    /// True iff `self^(2^k) = self`, i.e. the element lies in GF(2^k).
    pub fn in_subfield(&self, k: usize) -> bool {
        self.frobenius(k) == *self
    }

    /// `gf2:<N>:<hex>`, most significant word first, 16 digits per word.
    pub fn to_hex(&self) -> String {
        let mut s = format!("gf2:{}:", self.ctx.degree());
        for w in self.w.iter().rev() {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_context(other) && self.w == other.w
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

// Operator forms panic on context mismatch; use try_add / try_mul to get an error instead.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field context mismatch")
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        assert!(self.same_context(rhs), "field context mismatch");
        for (a, b) in self.w.iter_mut().zip(&rhs.w) {
            *a ^= b;
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field context mismatch")
    }
}
