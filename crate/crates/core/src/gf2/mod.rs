//! Binary extension field arithmetic: modulus search, element orders,
//! roots of unity and subfield traces.

mod field;
mod poly;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

pub use field::{FieldContext, FieldElement};
pub(crate) use field::Reducer;
pub use poly::{clmul64, BitPoly};

use crate::error::{Error, Result};
use crate::quotients::arith::factorize;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 4096;

/// Rabin's test: `f` of degree `n` is irreducible iff `x^(2^n) = x mod f`
/// and `gcd(x^(2^(n/q)) - x, f) = 1` for every prime `q | n`.
pub fn is_irreducible(f: &BitPoly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let red = Reducer::new(f);
    let x = red.reduce(BitPoly::x().words().to_vec());
    let checkpoints: Vec<usize> = factorize(n as u64).iter().map(|&(q, _)| n / q as usize).collect();
    let mut saved = Vec::with_capacity(checkpoints.len());
    let mut cur = x.clone();
    for k in 1..=n {
        cur = red.square(&cur);
        if checkpoints.contains(&k) {
            saved.push(cur.clone());
        }
    }
    if cur != x {
        return false;
    }
    let xp = BitPoly::x();
    saved.into_iter().all(|s| BitPoly::from_words(s).add(&xp).gcd(f).is_one())
}

/// The context over the lexicographically smallest irreducible polynomial of
/// degree `n`, scanning `x^n + t` for `t = 0, 1, 2, ...`.
pub fn make_context(n: usize) -> Result<Arc<FieldContext>> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    if n == 1 {
        return Ok(FieldContext::from_irreducible(BitPoly::x()));
    }
    // For n >= 2, x^n + t needs a constant term (else x divides it) and an odd
    // number of terms (else x + 1 divides it).
    let mut t: u64 = 1;
    loop {
        if (t.count_ones() + 1) % 2 == 1 {
            let mut f = BitPoly::from_u64(t);
            f.set_bit(n, true);
            if is_irreducible(&f) {
                return Ok(FieldContext::from_irreducible(f));
            }
        }
        t = t.checked_add(2).ok_or_else(|| {
            Error::Consistency(format!("no irreducible of degree {n} with a 64-bit tail"))
        })?;
        if n < 64 && t >> n != 0 {
            return Err(Error::Consistency(format!("no irreducible of degree {n}")));
        }
    }
}

/// Exact order of a nonzero `a`, given that it divides `bound`.
pub fn element_order(a: &FieldElement, bound: u64) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::ZeroOrder);
    }
    if bound == 0 || !a.pow_u64(bound).is_one() {
        return Err(Error::OrderNotDividing { bound });
    }
    let mut order = bound;
    for (q, _) in factorize(bound) {
        while order.is_multiple_of(q) && a.pow_u64(order / q).is_one() {
            order /= q;
        }
    }
    Ok(order)
}

/// A primitive `m`-th root of unity: `c^((2^N - 1)/m)` for the first
/// candidate `c = 1, x, x+1, x^2, ...` whose power has order exactly `m`.
pub fn primitive_root_of_unity(ctx: &Arc<FieldContext>, m: u64) -> Result<FieldElement> {
    let degree = ctx.degree();
    let m_big = BigUint::from(m);
    if m == 0 || !(ctx.group_order() % &m_big).is_zero() {
        return Err(Error::NotDivisor { m, degree });
    }
    let cofactor = ctx.group_order() / &m_big;
    let limit: u64 = if degree < 64 { 1 << degree } else { u64::MAX };
    for c in 1..limit {
        let candidate = ctx.element(&BitPoly::from_u64(c)).pow(&cofactor);
        if element_order(&candidate, m)? == m {
            return Ok(candidate);
        }
    }
    Err(Error::Consistency(format!("no element of order {m} in GF(2^{degree})")))
}

/// `Tr_k^n(a) = a + a^(2^k) + ... + a^(2^((n/k - 1)k))`, certifying that `a`
/// lies in GF(2^n) and the result in GF(2^k).
pub fn trace_to_subfield(a: &FieldElement, n: usize, k: usize) -> Result<FieldElement> {
    let ambient = a.context().degree();
    if k == 0 || !n.is_multiple_of(k) || !ambient.is_multiple_of(n) {
        return Err(Error::TraceDegrees { n, k, ambient });
    }
    if !a.in_subfield(n) {
        return Err(Error::NotInSubfield(n));
    }
    let t = trace_unchecked(a, n, k);
    if !t.in_subfield(k) {
        return Err(Error::NotInSubfield(k));
    }
    Ok(t)
}

/// [`trace_to_subfield`] without divisibility or membership checks.
pub fn trace_unchecked(a: &FieldElement, n: usize, k: usize) -> FieldElement {
    let mut acc = a.clone();
    let mut conj = a.clone();
    for _ in 1..n / k {
        conj = conj.frobenius(k);
        acc += &conj;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(ctx: &Arc<FieldContext>, rng: &mut ChaCha8Rng) -> FieldElement {
        let words = (0..ctx.degree().div_ceil(64)).map(|_| rng.gen()).collect();
        ctx.element(&BitPoly::from_words(words))
    }

    /// All irreducible polynomials of degree <= `max`, by trial division.
    fn irreducibles_up_to(max: usize) -> Vec<BitPoly> {
        let mut irr: Vec<BitPoly> = Vec::new();
        for d in 1..=max {
            for t in 0..(1u64 << d) {
                let f = BitPoly::from_u64(t | (1 << d));
                let reducible = irr
                    .iter()
                    .take_while(|g| 2 * g.degree().unwrap() <= d)
                    .any(|g| f.rem(g).is_zero());
                if !reducible {
                    irr.push(f);
                }
            }
        }
        irr
    }

    #[test]
    fn smallest_moduli() {
        assert_eq!(make_context(1).unwrap().modulus(), &BitPoly::x());
        assert_eq!(make_context(2).unwrap().modulus(), &BitPoly::from_u64(0b111));
        assert_eq!(make_context(3).unwrap().modulus(), &BitPoly::from_u64(0b1011));
        assert_eq!(make_context(8).unwrap().modulus(), &BitPoly::from_u64(0x11b));
        assert!(matches!(make_context(0), Err(Error::DegreeOutOfRange(0))));
        assert!(matches!(make_context(MAX_DEGREE + 1), Err(Error::DegreeOutOfRange(_))));
    }

    #[test]
    fn modulus_18_passes_trial_division() {
        let ctx = make_context(18).unwrap();
        let f = ctx.modulus();
        let small = irreducibles_up_to(9);
        assert!(small.iter().all(|g| !f.rem(g).is_zero()));
        // and it is the first candidate that does
        let t = f.add(&BitPoly::monomial(18)).words()[0];
        for s in 0..t {
            let cand = BitPoly::from_u64(s | (1 << 18));
            assert!(small.iter().any(|g| cand.rem(g).is_zero()), "{cand} skipped");
        }
    }

    #[test]
    fn irreducibility_matches_trial_division_degree_10() {
        let small = irreducibles_up_to(5);
        for t in 0..(1u64 << 10) {
            let f = BitPoly::from_u64(t | (1 << 10));
            let oracle = small.iter().all(|g| !f.rem(g).is_zero());
            assert_eq!(is_irreducible(&f), oracle, "{f}");
        }
    }

    #[test]
    fn field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for n in [1usize, 7, 18, 64, 100, 130] {
            let ctx = make_context(n).unwrap();
            for _ in 0..50 {
                let a = random_element(&ctx, &mut rng);
                let b = random_element(&ctx, &mut rng);
                let c = random_element(&ctx, &mut rng);
                assert!((&a + &a).is_zero());
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert_eq!(a.square(), &a * &a);
                if !a.is_zero() {
                    assert!((&a * &a.inverse().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn lagrange_n18() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let ctx = make_context(18).unwrap();
        for _ in 0..20 {
            let a = random_element(&ctx, &mut rng);
            if !a.is_zero() {
                assert!(a.pow(ctx.group_order()).is_one());
            }
        }
        assert!(matches!(ctx.zero().inverse(), Err(Error::ZeroInverse)));
    }

    #[test]
    fn context_mismatch() {
        let a = make_context(5).unwrap().one();
        let b = make_context(5).unwrap().one();
        assert!(matches!(a.try_add(&b), Err(Error::ContextMismatch)));
        assert!(matches!(a.try_mul(&b), Err(Error::ContextMismatch)));
        assert_ne!(a, b);
    }

    #[test]
    fn roots_of_unity() {
        let ctx = make_context(18).unwrap();
        assert!(primitive_root_of_unity(&ctx, 1).unwrap().is_one());
        let beta = primitive_root_of_unity(&ctx, 27).unwrap();
        assert_eq!(element_order(&beta, 27).unwrap(), 27);
        assert_eq!(element_order(&beta.pow_u64(3), 27).unwrap(), 9);
        assert_eq!(element_order(&ctx.one(), 27).unwrap(), 1);
        assert!(matches!(primitive_root_of_unity(&ctx, 5), Err(Error::NotDivisor { .. })));
        assert!(matches!(element_order(&ctx.zero(), 27), Err(Error::ZeroOrder)));
        assert!(matches!(element_order(&beta, 9), Err(Error::OrderNotDividing { bound: 9 })));

        let ctx6 = make_context(6).unwrap();
        let b9 = primitive_root_of_unity(&ctx6, 9).unwrap();
        assert!(b9.pow_u64(9).is_one());
        assert!(!b9.pow_u64(3).is_one());
    }

    #[test]
    fn brute_force_orders_in_gf64() {
        let ctx = make_context(6).unwrap();
        for t in 1..64u64 {
            let a = ctx.element(&BitPoly::from_u64(t));
            let brute = (1..=63u64).find(|&k| a.pow_u64(k).is_one()).unwrap();
            assert_eq!(element_order(&a, 63).unwrap(), brute);
        }
    }

    #[test]
    fn subfield_sizes_by_enumeration() {
        let ctx = make_context(12).unwrap();
        for k in 1..=4usize {
            let fixed = (0..1u64 << 12)
                .filter(|&t| ctx.element(&BitPoly::from_u64(t)).in_subfield(k))
                .count();
            let expect = if 12 % k == 0 { 1usize << k } else { 1usize << gcd(12, k) };
            assert_eq!(fixed, expect, "k={k}");
        }
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn traces() {
        let ctx4 = make_context(2).unwrap();
        let x = ctx4.element(&BitPoly::x());
        assert!(trace_to_subfield(&x, 2, 1).unwrap().is_one());

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ctx = make_context(18).unwrap();
        for _ in 0..20 {
            let a = random_element(&ctx, &mut rng);
            let b = random_element(&ctx, &mut rng);
            assert_eq!(trace_to_subfield(&a, 18, 18).unwrap(), a);
            for k in [1usize, 2, 3, 6, 9] {
                let lhs = trace_to_subfield(&(&a + &b), 18, k).unwrap();
                let rhs = &trace_to_subfield(&a, 18, k).unwrap() + &trace_to_subfield(&b, 18, k).unwrap();
                assert_eq!(lhs, rhs);
                // transitivity Tr_1^18 = Tr_1^k o Tr_k^18
                let inner = trace_to_subfield(&a, 18, k).unwrap();
                assert_eq!(trace_to_subfield(&inner, k, 1).unwrap(), trace_to_subfield(&a, 18, 1).unwrap());
            }
        }
        let a = random_element(&ctx, &mut rng);
        assert!(matches!(trace_to_subfield(&a, 18, 4), Err(Error::TraceDegrees { .. })));
        assert!(matches!(trace_to_subfield(&a, 5, 1), Err(Error::TraceDegrees { .. })));
        let outside = ctx.element(&BitPoly::x());
        assert!(matches!(trace_to_subfield(&outside, 6, 2), Err(Error::NotInSubfield(6))));
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let ctx = make_context(100).unwrap();
        let a = random_element(&ctx, &mut rng);
        let text = a.to_hex();
        assert!(text.starts_with("gf2:100:"));
        assert_eq!(text.len(), "gf2:100:".len() + 32);
        assert_eq!(ctx.parse_element(&text).unwrap(), a);
        assert!(ctx.parse_element("gf2:99:00").is_err());
        assert!(ctx.parse_element(&text.to_uppercase()).is_err());
    }
}
