//! Euler quotients, primitive roots and the generalized cyclotomic classes
//! they induce on the units modulo `p^(r+1)`.

pub mod arith;

use std::borrow::Cow;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use arith::{gcd, mod_inverse, mul_mod, pow_mod, WideModulus};

/// Classes are stored as explicit sorted lists up to this modulus.
pub const MATERIALIZE_LIMIT: u64 = 1_000_000;

/// The pair `(p, r)` fixing one sequence family member, with derived moduli.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    p: u64,
    r_frak: u32,
    period: u64,
}

impl Params {
    pub fn new(p: u64, r_frak: u32) -> Result<Self> {
        if p < 3 || !arith::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if r_frak < 1 {
            return Err(Error::LevelZero);
        }
        let period = p
            .checked_pow(r_frak + 1)
            .ok_or_else(|| Error::OutOfRange(format!("{p}^{} overflows 64 bits", r_frak + 1)))?;
        Ok(Params { p, r_frak, period })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r_frak(&self) -> u32 {
        self.r_frak
    }

    /// `p^(r+1)`, the period of the sequence.
    pub fn period(&self) -> u64 {
        self.period
    }

    /// `p^(level+1)`, the modulus carrying the level-`level` classes.
    pub fn level_modulus(&self, level: u32) -> u64 {
        self.p.pow(level + 1)
    }

    /// `p^level`, the number of classes at a level.
    pub fn class_count(&self, level: u32) -> u64 {
        self.p.pow(level)
    }

    /// `p^(r+1)` for `1 <= r <= r_frak`.
    pub fn modulus_levels(&self) -> Vec<u64> {
        (1..=self.r_frak).map(|r| self.level_modulus(r)).collect()
    }

    /// Class indices whose union is the support of the sequence at `level`:
    /// `(p^level + 1)/2 ..= p^level - 1`.
    pub fn upper_half(&self, level: u32) -> std::ops::Range<u64> {
        let n = self.class_count(level);
        n.div_ceil(2)..n
    }

    /// `(p^r - 1)/2 mod 2`, the coefficient of the unit-exponent term of G.
    pub fn unit_term_parity(&self) -> bool {
        ((self.class_count(self.r_frak) - 1) / 2) % 2 == 1
    }

    pub fn quotient(&self, level: u32) -> QuotientEvaluator {
        QuotientEvaluator::new(self.p, level)
    }

    /// The level-`level` class of `u`, computed from the quotient itself.
    pub fn class_index(&self, u: u64, level: u32) -> ClassIndex {
        let m = self.level_modulus(level);
        let u = u % m;
        if u.is_multiple_of(self.p) {
            ClassIndex::NonUnit
        } else {
            ClassIndex::Class(self.quotient(level).eval(u))
        }
    }
}

/// Evaluates `Q_r(u)` for a fixed `(p, r)`.
///
/// Works modulo `p^(2r)`, which is enough to read off the quotient digit.
#[derive(Clone, Debug)]
pub struct QuotientEvaluator {
    p: u64,
    pr: u64,
    phi: u64,
    wide: WideModulus,
}

impl QuotientEvaluator {
    /// `p` must be an odd prime and `p^level` must fit in 64 bits.
    pub fn new(p: u64, level: u32) -> Self {
        let pr = p.pow(level);
        QuotientEvaluator { p, pr, phi: pr / p * (p - 1), wide: WideModulus::power_of(p, 2 * level) }
    }

    pub fn eval(&self, u: u64) -> u64 {
        if u.is_multiple_of(self.p) {
            return 0;
        }
        match self.wide.pow_word(u, self.phi) {
            Some(x) => (x - 1) / self.pr,
            None => {
                let x = self.wide.pow(u, self.phi);
                let q = (x - BigUint::one()) / BigUint::from(self.pr);
                (q % BigUint::from(self.pr)).try_into().expect("residue below p^r")
            }
        }
    }
}

/// `Q_r(u)`: the Euler quotient of `u` modulo `p^r`, with `Q_r(u) = 0` when `p | u`.
pub fn euler_quotient(u: u64, p: u64, r: u32) -> Result<u64> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if r < 1 {
        return Err(Error::LevelZero);
    }
    if p.checked_pow(r).is_none() {
        return Err(Error::OutOfRange(format!("{p}^{r} overflows 64 bits")));
    }
    Ok(QuotientEvaluator::new(p, r).eval(u))
}

/// Least `n >= 1` with `a^n = 1 (mod m)`.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m == 0 || gcd(a % m, m) != 1 {
        return Err(Error::NotCoprime { a, m });
    }
    if m == 1 {
        return Ok(1);
    }
    let group = arith::euler_phi(m);
    Ok(order_dividing(a, m, group))
}

/// Order of `a` mod `m`, given a multiple `bound` of that order.
pub(crate) fn order_dividing(a: u64, m: u64, bound: u64) -> u64 {
    let mut order = bound;
    for (q, _) in arith::factorize(bound) {
        while order.is_multiple_of(q) && pow_mod(a, order / q, m) == 1 {
            order /= q;
        }
    }
    order
}

/// A primitive root `g` modulo `p^(r+1)` with `Q_r(g) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedRoot {
    pub g: u64,
    /// `phi(p^(r+1))`, the order of `g`.
    pub witness_order: u64,
}

pub fn find_normalized_root(params: &Params) -> Result<NormalizedRoot> {
    let p = params.p();
    let modulus = params.period();
    let pr = params.class_count(params.r_frak());
    let phi = modulus / p * (p - 1);
    let phi_primes: Vec<u64> = arith::factorize(phi).into_iter().map(|(q, _)| q).collect();
    let is_primitive = |g: u64| phi_primes.iter().all(|&q| pow_mod(g, phi / q, modulus) != 1);

    let g = (2..modulus)
        .find(|&g| g % p != 0 && is_primitive(g))
        .ok_or_else(|| Error::Consistency(format!("no primitive root modulo {modulus}")))?;

    let quotient = params.quotient(params.r_frak());
    let a = quotient.eval(g);
    if a == 1 {
        return Ok(NormalizedRoot { g, witness_order: phi });
    }
    let a_inv = mod_inverse(a, pr).ok_or(Error::NotCoprime { a, m: pr })?;
    // a_inv + k0 * p^r for the smallest k0 giving an exponent coprime to phi
    let exponent = (0..p - 1)
        .map(|k0| a_inv + k0 * pr)
        .find(|&e| gcd(e, phi) == 1)
        .ok_or_else(|| Error::Consistency("no admissible k0 in normalization".into()))?;
    let g = pow_mod(g, exponent, modulus);
    debug_assert!(is_primitive(g));
    debug_assert_eq!(quotient.eval(g), 1);
    Ok(NormalizedRoot { g, witness_order: phi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassIndex {
    Class(u64),
    NonUnit,
}

impl ClassIndex {
    pub fn class(self) -> Option<u64> {
        match self {
            ClassIndex::Class(l) => Some(l),
            ClassIndex::NonUnit => None,
        }
    }
}

/// `Q_r(u mod p^(r+1))` for units, `NonUnit` for multiples of `p`.
pub fn class_index(params: &Params, u: u64, level: u32) -> ClassIndex {
    params.class_index(u, level)
}

#[derive(Clone, Debug)]
enum ClassStorage {
    Table { classes: Vec<Vec<u64>>, class_of: Vec<u32> },
    OnDemand { quotient: QuotientEvaluator },
}

const NON_UNIT: u32 = u32::MAX;

/// The classes `D_l^(r) = { g^(l + k p^r) mod p^(r+1) : 0 <= k < p-1 }` at one level.
#[derive(Clone, Debug)]
pub struct CyclotomicPartition {
    p: u64,
    level: u32,
    modulus: u64,
    class_count: u64,
    g: u64,
    storage: ClassStorage,
}

impl CyclotomicPartition {
    /// Builds the level-`level` partition from the generator form. `level`
    /// must not exceed `r_frak`, since `g` is normalized modulo `p^(r_frak+1)`.
    pub fn new(params: &Params, root: &NormalizedRoot, level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::LevelZero);
        }
        if level > params.r_frak() {
            return Err(Error::OutOfRange(format!(
                "level {level} exceeds r = {}",
                params.r_frak()
            )));
        }
        let p = params.p();
        let modulus = params.level_modulus(level);
        let class_count = params.class_count(level);
        let g = root.g % modulus;
        let storage = if modulus <= MATERIALIZE_LIMIT {
            let step = pow_mod(g, class_count, modulus);
            let mut class_of = vec![NON_UNIT; modulus as usize];
            let mut classes = Vec::with_capacity(class_count as usize);
            let mut lead = 1u64;
            for l in 0..class_count {
                let mut members = Vec::with_capacity((p - 1) as usize);
                let mut x = lead;
                for _ in 0..p - 1 {
                    members.push(x);
                    if class_of[x as usize] != NON_UNIT {
                        return Err(Error::Consistency(format!(
                            "{x} lands in classes {} and {l}",
                            class_of[x as usize]
                        )));
                    }
                    class_of[x as usize] = l as u32;
                    x = mul_mod(x, step, modulus);
                }
                members.sort_unstable();
                classes.push(members);
                lead = mul_mod(lead, g, modulus);
            }
            ClassStorage::Table { classes, class_of }
        } else {
            ClassStorage::OnDemand { quotient: params.quotient(level) }
        };
        Ok(CyclotomicPartition { p, level, modulus, class_count, g, storage })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `p^(level+1)`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^level`.
    pub fn class_count(&self) -> u64 {
        self.class_count
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.storage, ClassStorage::Table { .. })
    }

    /// Sorted members of `D_l`, with `l` taken modulo `p^level`.
    pub fn members(&self, l: u64) -> Cow<'_, [u64]> {
        let l = l % self.class_count;
        match &self.storage {
            ClassStorage::Table { classes, .. } => Cow::Borrowed(&classes[l as usize]),
            ClassStorage::OnDemand { .. } => {
                let step = pow_mod(self.g, self.class_count, self.modulus);
                let mut x = pow_mod(self.g, l, self.modulus);
                let mut v = Vec::with_capacity((self.p - 1) as usize);
                for _ in 0..self.p - 1 {
                    v.push(x);
                    x = mul_mod(x, step, self.modulus);
                }
                v.sort_unstable();
                Cow::Owned(v)
            }
        }
    }

    pub fn class_of(&self, u: u64) -> ClassIndex {
        let u = u % self.modulus;
        match &self.storage {
            ClassStorage::Table { class_of, .. } => match class_of[u as usize] {
                NON_UNIT => ClassIndex::NonUnit,
                l => ClassIndex::Class(l as u64),
            },
            ClassStorage::OnDemand { quotient } => {
                if u.is_multiple_of(self.p) {
                    ClassIndex::NonUnit
                } else {
                    ClassIndex::Class(quotient.eval(u))
                }
            }
        }
    }
}

/// Orders of 2 modulo successive powers of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoOrderProfile {
    pub p: u64,
    /// Order of 2 modulo `p`.
    pub lambda: u64,
    /// Largest `t` with the order of 2 modulo `p^t` still equal to `lambda`.
    pub t0: u32,
    /// Order of 2 modulo `p^r` for `r = 1..=r_max`.
    pub orders: Vec<u64>,
}

impl TwoOrderProfile {
    /// Order of 2 modulo `p^r` from the tower law: `lambda` up to `t0`, then
    /// multiplied by `p` at every further level.
    pub fn order_at(&self, r: u32) -> Option<u64> {
        if r <= self.t0 {
            Some(self.lambda)
        } else {
            self.p.checked_pow(r - self.t0)?.checked_mul(self.lambda)
        }
    }
}

pub fn two_order_profile(p: u64, r_max: u32) -> Result<TwoOrderProfile> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let lambda = multiplicative_order(2, p)?;
    let two_pow = BigUint::from(2u32).pow(lambda as u32) - BigUint::one();
    let t0 = arith::big_valuation(&two_pow, p);
    let mut profile = TwoOrderProfile { p, lambda, t0, orders: Vec::new() };
    for r in 1..=r_max {
        let modulus = p
            .checked_pow(r)
            .ok_or_else(|| Error::OutOfRange(format!("{p}^{r} overflows 64 bits")))?;
        let predicted = profile
            .order_at(r)
            .ok_or_else(|| Error::OutOfRange(format!("order of 2 mod {p}^{r} overflows")))?;
        let measured = multiplicative_order(2, modulus)?;
        if measured != predicted {
            return Err(Error::Consistency(format!(
                "order of 2 mod {p}^{r}: measured {measured}, tower law gives {predicted}"
            )));
        }
        profile.orders.push(measured);
    }
    Ok(profile)
}

/// True iff `2^(p-1) = 1 (mod p^2)`.
pub fn is_wieferich(p: u64) -> bool {
    let m = WideModulus::power_of(p, 2);
    m.pow(2, p - 1) == BigUint::one()
}
