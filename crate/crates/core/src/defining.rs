//! Class polynomials evaluated inside GF(2^N), the defining polynomial of the
//! threshold sequence and its trace representation.
//!
//! The ambient field has degree `N = lambda * p^r`, the order of 2 modulo
//! `p^(r+1)`, so every root of unity of order dividing `p^(r+1)` lives in one
//! context and lower levels use subfields of it.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gf2::{
    element_order, make_context, primitive_root_of_unity, trace_to_subfield, trace_unchecked,
    FieldContext, FieldElement,
};
use crate::quotients::arith::{mul_mod, pow_mod, valuation};
use crate::quotients::{
    find_normalized_root, is_wieferich, two_order_profile, ClassIndex, CyclotomicPartition,
    NormalizedRoot, Params,
};

/// Default ceiling on the ambient field degree.
pub const DEFAULT_MAX_DEGREE: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_degree: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_degree: DEFAULT_MAX_DEGREE }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TraceOptions {
    /// Check that every trace argument lies in the stated superfield and every
    /// trace value in the stated subfield.
    pub certify: bool,
    /// Allow `r = 1`, where the trace representation is only checked empirically.
    pub extended: bool,
}

impl TraceOptions {
    pub fn certified() -> Self {
        TraceOptions { certify: true, extended: false }
    }
}

/// `D_l^(r)(gamma) = sum of gamma^u over u in D_l^(r)`.
pub fn class_poly_eval(partition: &CyclotomicPartition, l: u64, gamma: &FieldElement) -> FieldElement {
    let mut acc = gamma.context().zero();
    for &u in partition.members(l).iter() {
        acc += &gamma.pow_u64(u);
    }
    acc
}

/// `D_l(gamma)` for every `l` at once: one pass over the units.
pub fn class_values(partition: &CyclotomicPartition, gamma: &FieldElement) -> Vec<FieldElement> {
    let ctx = gamma.context();
    let mut vals = vec![ctx.zero(); partition.class_count() as usize];
    let mut power = ctx.one();
    for u in 0..partition.modulus() {
        if let ClassIndex::Class(l) = partition.class_of(u) {
            vals[l as usize] += &power;
        }
        power = &power * gamma;
    }
    vals
}

/// `(D_i(gamma), D_{i+1}(gamma), ..., D_{i+p^r-1}(gamma))`, indices mod `p^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVector {
    pub level: u32,
    pub start: u64,
    pub values: Vec<FieldElement>,
}

impl ClassVector {
    pub fn new(partition: &CyclotomicPartition, start: u64, gamma: &FieldElement) -> Self {
        Self::from_class_values(partition.level(), start, &class_values(partition, gamma))
    }

    /// Rotates precomputed `D_0 .. D_{p^r-1}` values to start at `start`.
    pub fn from_class_values(level: u32, start: u64, all: &[FieldElement]) -> Self {
        let n = all.len();
        let s = (start % n as u64) as usize;
        let values = (0..n).map(|k| all[(s + k) % n].clone()).collect();
        ClassVector { level, start, values }
    }

    pub fn dot(&self, other: &ClassVector) -> FieldElement {
        let mut acc = self.values[0].context().zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += &(a * b);
        }
        acc
    }
}

/// `C_i(theta) . C_j(theta^(p^m))`.
pub fn inner_product(
    partition: &CyclotomicPartition,
    i: u64,
    j: u64,
    theta: &FieldElement,
    m: u32,
) -> FieldElement {
    let shifted = theta.pow_u64(partition.p().pow(m));
    ClassVector::new(partition, i, theta).dot(&ClassVector::new(partition, j, &shifted))
}

/// `sum_j Tr_{p^r}^{lambda p^r}(gamma^(g^(j p^r + l)))` for `0 <= j < (p-1)/lambda`.
pub fn class_poly_trace_form(
    partition: &CyclotomicPartition,
    lambda: u64,
    l: u64,
    gamma: &FieldElement,
    certify: bool,
) -> Result<FieldElement> {
    let p = partition.p();
    let modulus = partition.modulus();
    let pr = partition.class_count();
    let (n, k) = ((lambda * pr) as usize, pr as usize);
    let mut acc = gamma.context().zero();
    for j in 0..(p - 1) / lambda {
        let exponent = pow_mod(partition.generator(), j * pr + l, modulus);
        let y = gamma.pow_u64(exponent);
        let t = if certify { trace_to_subfield(&y, n, k)? } else { trace_unchecked(&y, n, k) };
        acc += &t;
    }
    Ok(acc)
}

/// The subgroup `U^(r) = {2^(j p^r)}` of `D_0^(r)` and the coset leaders
/// `g^(j p^r)` whose translates tile `D_0^(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub level: u32,
    pub subgroup: Vec<u64>,
    pub leaders: Vec<u64>,
}

pub fn coset_decomposition(params: &Params, root: &NormalizedRoot, level: u32) -> Result<CosetDecomposition> {
    let p = params.p();
    let profile = two_order_profile(p, 1)?;
    if is_wieferich(p) {
        return Err(Error::Wieferich { p, lambda: profile.lambda, t0: profile.t0 });
    }
    let partition = CyclotomicPartition::new(params, root, level)?;
    coset_decomposition_in(&partition, profile.lambda)
}

fn coset_decomposition_in(partition: &CyclotomicPartition, lambda: u64) -> Result<CosetDecomposition> {
    let (p, pr, modulus) = (partition.p(), partition.class_count(), partition.modulus());
    let step = pow_mod(2, pr, modulus);
    let mut subgroup = Vec::with_capacity(lambda as usize);
    let mut x = 1u64;
    for _ in 0..lambda {
        subgroup.push(x);
        x = mul_mod(x, step, modulus);
    }
    if x != 1 {
        return Err(Error::Consistency(format!("2^(lambda p^r) != 1 mod {modulus}")));
    }
    if let Some(&u) = subgroup.iter().find(|&&u| partition.class_of(u) != ClassIndex::Class(0)) {
        return Err(Error::Consistency(format!("{u} in U^(r) lies outside D_0")));
    }
    let leaders: Vec<u64> = (0..(p - 1) / lambda)
        .map(|j| pow_mod(partition.generator(), j * pr, modulus))
        .collect();
    let mut tiles: Vec<u64> = leaders
        .iter()
        .flat_map(|&a| subgroup.iter().map(move |&u| mul_mod(a, u, modulus)))
        .collect();
    tiles.sort_unstable();
    if tiles != *partition.members(0) {
        return Err(Error::Consistency("cosets of U^(r) do not tile D_0".into()));
    }
    Ok(CosetDecomposition { level: partition.level(), subgroup, leaders })
}

/// Everything needed to evaluate the defining polynomial G and the trace form.
///
/// G is kept as `(unit_term_parity, eta_table)`:
/// `G(x) = parity * sum_k x^(k p^r) + sum_r sum_l eta_l^(r) D_l^(r)(x^(p^(r_frak - r)))`.
#[derive(Clone, Debug)]
pub struct DefiningData {
    params: Params,
    root: NormalizedRoot,
    lambda: u64,
    t0: u32,
    ctx: Arc<FieldContext>,
    beta: FieldElement,
    powers: Vec<FieldElement>,
    partitions: Vec<CyclotomicPartition>,
    theta_classes: Vec<Vec<FieldElement>>,
    eta: Vec<Vec<FieldElement>>,
    unit_term_parity: bool,
}

pub fn build_defining_data(params: &Params) -> Result<DefiningData> {
    DefiningData::build(params, BuildOptions::default())
}

impl DefiningData {
    pub fn build(params: &Params, opts: BuildOptions) -> Result<Self> {
        let p = params.p();
        let r_frak = params.r_frak();
        let period = params.period();
        if is_wieferich(p) {
            let profile = two_order_profile(p, 1)?;
            return Err(Error::Wieferich { p, lambda: profile.lambda, t0: profile.t0 });
        }
        let profile = two_order_profile(p, r_frak + 1)?;
        let degree = profile.orders[r_frak as usize];
        if degree != profile.lambda * params.class_count(r_frak) {
            return Err(Error::Consistency(format!(
                "order of 2 mod p^(r+1) is {degree}, expected lambda * p^r"
            )));
        }
        if degree as usize > opts.max_degree {
            return Err(Error::OutOfRange(format!(
                "ambient degree {degree} exceeds the ceiling {}",
                opts.max_degree
            )));
        }
        let ctx = make_context(degree as usize)?;
        if !(ctx.group_order() % BigUint::from(period)).is_zero() {
            return Err(Error::Consistency(format!("{period} does not divide 2^{degree} - 1")));
        }
        let beta = primitive_root_of_unity(&ctx, period)?;
        if element_order(&beta, period)? != period {
            return Err(Error::Consistency("beta is not a primitive root of unity".into()));
        }

        let root = find_normalized_root(params)?;
        let partitions = (1..=r_frak)
            .map(|r| CyclotomicPartition::new(params, &root, r))
            .collect::<Result<Vec<_>>>()?;

        let mut powers = Vec::with_capacity(period as usize);
        let mut x = ctx.one();
        for _ in 0..period {
            powers.push(x.clone());
            x = &x * &beta;
        }

        let mut dd = DefiningData {
            params: params.clone(),
            root,
            lambda: profile.lambda,
            t0: profile.t0,
            ctx,
            beta,
            powers,
            partitions,
            theta_classes: Vec::new(),
            eta: Vec::new(),
            unit_term_parity: params.unit_term_parity(),
        };
        for r in 1..=r_frak {
            // theta_r = beta^(p^(r_frak - r)) has order p^(r+1)
            let vals = dd.class_values_at(r, p.pow(r_frak - r));
            let pr = params.class_count(r);
            let eta: Vec<FieldElement> = (0..pr)
                .map(|l| {
                    let mut acc = dd.ctx.zero();
                    for i in params.upper_half(r) {
                        acc += &vals[((i + l) % pr) as usize];
                    }
                    acc
                })
                .collect();
            if let Some(l) = eta.iter().position(FieldElement::is_zero) {
                return Err(Error::Consistency(format!("eta_{l}^({r}) vanishes")));
            }
            dd.theta_classes.push(vals);
            dd.eta.push(eta);
        }
        Ok(dd)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn root(&self) -> &NormalizedRoot {
        &self.root
    }

    /// Order of 2 modulo p.
    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn t0(&self) -> u32 {
        self.t0
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    /// `beta^(level_exponent)` with the exponent reduced mod the period.
    pub fn beta_pow(&self, e: u64) -> &FieldElement {
        &self.powers[(e % self.params.period()) as usize]
    }

    pub fn partition(&self, level: u32) -> &CyclotomicPartition {
        &self.partitions[level as usize - 1]
    }

    /// `eta_l^(level)`, `l` taken mod `p^level`.
    pub fn eta(&self, level: u32, l: u64) -> &FieldElement {
        let row = &self.eta[level as usize - 1];
        &row[(l % row.len() as u64) as usize]
    }

    /// Rows of the eta table, level 1 first.
    pub fn eta_table(&self) -> &[Vec<FieldElement>] {
        &self.eta
    }

    pub fn unit_term_parity(&self) -> bool {
        self.unit_term_parity
    }

    /// `theta_r = beta^(p^(r_frak - r))`, a primitive `p^(r+1)`-th root of unity.
    pub fn theta(&self, level: u32) -> &FieldElement {
        self.beta_pow(self.params.p().pow(self.params.r_frak() - level))
    }

    /// `D_l^(level)(beta^e)` for every `l`, from the cached powers of beta.
    pub fn class_values_at(&self, level: u32, e: u64) -> Vec<FieldElement> {
        let partition = self.partition(level);
        let period = self.params.period();
        let e = e % period;
        let mut vals = vec![self.ctx.zero(); partition.class_count() as usize];
        for l in 0..partition.class_count() {
            for &v in partition.members(l).iter() {
                vals[l as usize] += &self.powers[mul_mod(e, v, period) as usize];
            }
        }
        vals
    }

    fn unit_term(&self, u: u64) -> FieldElement {
        let (p, period) = (self.params.p(), self.params.period());
        let base = mul_mod(u % period, self.params.class_count(self.params.r_frak()), period);
        let mut acc = self.ctx.zero();
        for k in 1..p {
            acc += &self.powers[mul_mod(base, k, period) as usize];
        }
        acc
    }

    /// `G(beta^u)` as a field element.
    pub fn defining_value(&self, u: u64) -> FieldElement {
        let (p, r_frak, period) = (self.params.p(), self.params.r_frak(), self.params.period());
        let mut acc = if self.unit_term_parity { self.unit_term(u) } else { self.ctx.zero() };
        for r in 1..=r_frak {
            let e = mul_mod(u % period, p.pow(r_frak - r), period);
            let vals = self.class_values_at(r, e);
            for (eta, d) in self.eta[r as usize - 1].iter().zip(&vals) {
                if !d.is_zero() {
                    acc += &(eta * d);
                }
            }
        }
        acc
    }

    /// `G(beta^u)`, which must be a bit.
    pub fn defining_eval(&self, u: u64) -> Result<bool> {
        to_bit(&self.defining_value(u), u)
    }

    /// `G_i(beta^u)` for the indicator sequence of `D_i^(r_frak)`.
    pub fn indicator_defining_eval(&self, i: u64, u: u64) -> Result<bool> {
        let (p, r_frak, period) = (self.params.p(), self.params.r_frak(), self.params.period());
        let classes = self.params.class_count(r_frak);
        if i >= classes {
            return Err(Error::IndexOutOfRange { index: i, bound: classes });
        }
        let mut acc = self.unit_term(u);
        for r in 1..=r_frak {
            let e = mul_mod(u % period, p.pow(r_frak - r), period);
            let at_x = ClassVector::from_class_values(r, 0, &self.class_values_at(r, e));
            let at_theta = ClassVector::from_class_values(r, i, &self.theta_classes[r as usize - 1]);
            acc += &at_theta.dot(&at_x);
        }
        to_bit(&acc, u)
    }

    /// `e_u` from the trace representation, evaluated with Frobenius conjugates.
    pub fn trace_eval(&self, u: u64, opts: TraceOptions) -> Result<bool> {
        let (p, r_frak, period) = (self.params.p(), self.params.r_frak(), self.params.period());
        if r_frak < 2 && !opts.extended {
            return Err(Error::LevelTooSmall(r_frak));
        }
        let lambda = self.lambda;
        let cosets = (p - 1) / lambda;
        let g = self.root.g % period;
        let trace = |y: &FieldElement, n: u64, k: u64| -> Result<FieldElement> {
            if opts.certify {
                trace_to_subfield(y, n as usize, k as usize)
            } else {
                Ok(trace_unchecked(y, n as usize, k as usize))
            }
        };
        let u = u % period;
        let mut acc = self.ctx.zero();
        if self.unit_term_parity {
            let base = mul_mod(u, self.params.class_count(r_frak), period);
            for k in 0..cosets {
                let y = &self.powers[mul_mod(base, pow_mod(g, k, period), period) as usize];
                acc += &trace(y, lambda, 1)?;
            }
        }
        for r in 1..=r_frak {
            let pr = self.params.class_count(r);
            let base = mul_mod(u, p.pow(r_frak - r), period);
            for l in 0..pr {
                let mut inner = self.ctx.zero();
                for j in 0..cosets {
                    let e = mul_mod(base, pow_mod(g, j * pr + l, period), period);
                    inner += &trace(&self.powers[e as usize], lambda * pr, pr)?;
                }
                if !inner.is_zero() {
                    acc += &(self.eta(r, l) * &inner);
                }
            }
        }
        to_bit(&acc, u)
    }

    pub fn coset_decomposition(&self, level: u32) -> Result<CosetDecomposition> {
        coset_decomposition_in(self.partition(level), self.lambda)
    }

    /// Number of monomials of G, counted without expanding it.
    ///
    /// Exponents of the unit term have p-adic valuation `r_frak`, those of the
    /// level-`r` term valuation `r_frak - r`, so no two groups can cancel.
    pub fn monomial_count(&self) -> u64 {
        let (p, r_frak) = (self.params.p(), self.params.r_frak());
        let mut valuations = vec![valuation(self.params.class_count(r_frak), p)];
        let mut count = if self.unit_term_parity { p - 1 } else { 0 };
        let mut exponents = p - 1;
        for r in 1..=r_frak {
            let partition = self.partition(r);
            let v = partition.members(0)[0] * p.pow(r_frak - r);
            valuations.push(valuation(v, p));
            let nonzero = self.eta[r as usize - 1].iter().filter(|e| !e.is_zero()).count() as u64;
            count += (p - 1) * nonzero;
            exponents += (p - 1) * partition.class_count();
        }
        let mut sorted = valuations.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), valuations.len(), "exponent groups share a valuation");
        assert_eq!(exponents, self.params.period() - 1, "exponent groups do not cover Z_n \\ {{0}}");
        count
    }
}

fn to_bit(x: &FieldElement, u: u64) -> Result<bool> {
    if x.is_zero() {
        Ok(false)
    } else if x.is_one() {
        Ok(true)
    } else {
        Err(Error::NonBit { u })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{generate_threshold, indicator_sequence};

    #[test]
    fn eta_table_shapes() {
        let dd = build_defining_data(&Params::new(3, 1).unwrap()).unwrap();
        assert_eq!(dd.eta_table().iter().map(Vec::len).sum::<usize>(), 3);
        let dd = build_defining_data(&Params::new(3, 2).unwrap()).unwrap();
        assert_eq!(dd.eta_table().iter().map(Vec::len).sum::<usize>(), 12);
        assert!(dd.eta_table().iter().flatten().all(|e| !e.is_zero()));
        assert_eq!(dd.context().degree(), 18);
        assert_eq!(element_order(dd.beta(), 27).unwrap(), 27);
    }

    #[test]
    fn worked_example_parity() {
        let params = Params::new(5, 3).unwrap();
        assert_eq!((params.class_count(3) - 1) / 2, 62);
        assert!(!params.unit_term_parity());
    }

    #[test]
    fn class_values_match_direct_sums() {
        let dd = build_defining_data(&Params::new(3, 2).unwrap()).unwrap();
        for r in 1..=2 {
            let theta = dd.theta(r).clone();
            let part = dd.partition(r);
            let fast = dd.class_values_at(r, 3u64.pow(2 - r));
            let pass = class_values(part, &theta);
            for l in 0..part.class_count() {
                let direct = class_poly_eval(part, l, &theta);
                assert_eq!(fast[l as usize], direct);
                assert_eq!(pass[l as usize], direct);
            }
            assert!(class_poly_eval(part, 0, &dd.context().one()).is_zero());
        }
    }

    #[test]
    fn trace_form_of_class_polys() {
        let dd = build_defining_data(&Params::new(3, 1).unwrap()).unwrap();
        let part = dd.partition(1);
        for e in 0..9 {
            let gamma = dd.beta_pow(e);
            for l in 0..3 {
                assert_eq!(
                    class_poly_trace_form(part, dd.lambda(), l, gamma, true).unwrap(),
                    class_poly_eval(part, l, gamma)
                );
            }
        }
    }

    #[test]
    fn defining_pair_small() {
        for &(p, r) in &[(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
            let params = Params::new(p, r).unwrap();
            let dd = build_defining_data(&params).unwrap();
            let e = generate_threshold(&params, params.period() as usize);
            for u in 0..params.period() {
                assert_eq!(dd.defining_eval(u).unwrap(), e.bits()[u as usize], "({p},{r}) u={u}");
            }
        }
    }

    #[test]
    fn indicator_pair() {
        let params = Params::new(3, 2).unwrap();
        let dd = build_defining_data(&params).unwrap();
        for i in 0..9 {
            let s = indicator_sequence(&params, i, 27).unwrap();
            for u in 0..27 {
                assert_eq!(dd.indicator_defining_eval(i, u).unwrap(), s.bits()[u as usize]);
            }
        }
        assert!(matches!(dd.indicator_defining_eval(9, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn trace_representation() {
        let params = Params::new(3, 2).unwrap();
        let dd = build_defining_data(&params).unwrap();
        let e = generate_threshold(&params, 27);
        for u in 0..27 {
            assert_eq!(dd.trace_eval(u, TraceOptions::certified()).unwrap(), e.bits()[u as usize]);
            assert_eq!(dd.trace_eval(u, TraceOptions::default()).unwrap(), e.bits()[u as usize]);
        }
        assert!(!dd.trace_eval(0, TraceOptions::certified()).unwrap());
    }

    #[test]
    fn trace_needs_level_two_unless_extended() {
        let params = Params::new(5, 1).unwrap();
        let dd = build_defining_data(&params).unwrap();
        assert!(matches!(dd.trace_eval(1, TraceOptions::default()), Err(Error::LevelTooSmall(1))));
        let opts = TraceOptions { certify: true, extended: true };
        let e = generate_threshold(&params, 25);
        for u in 0..25 {
            assert_eq!(dd.trace_eval(u, opts).unwrap(), e.bits()[u as usize]);
        }
    }

    #[test]
    fn cosets() {
        let params = Params::new(5, 2).unwrap();
        let root = find_normalized_root(&params).unwrap();
        let dec = coset_decomposition(&params, &root, 1).unwrap();
        assert_eq!(dec.subgroup.len(), 4);
        assert_eq!(dec.leaders, vec![1]);
        for &u in &dec.subgroup {
            assert_eq!(params.class_index(u, 1), ClassIndex::Class(0));
        }
        // p = 7: lambda = 3, two cosets
        let params = Params::new(7, 2).unwrap();
        let root = find_normalized_root(&params).unwrap();
        for level in 1..=2 {
            let dec = coset_decomposition(&params, &root, level).unwrap();
            assert_eq!(dec.subgroup.len(), 3);
            assert_eq!(dec.leaders.len(), 2);
        }
    }

    #[test]
    fn wieferich_refused() {
        let params = Params::new(1093, 1).unwrap();
        match build_defining_data(&params) {
            Err(Error::Wieferich { p: 1093, lambda: 364, t0: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let root = find_normalized_root(&params).unwrap();
        assert!(matches!(coset_decomposition(&params, &root, 1), Err(Error::Wieferich { .. })));
    }

    #[test]
    fn degree_ceiling() {
        let params = Params::new(5, 3).unwrap();
        let opts = BuildOptions { max_degree: 100 };
        assert!(matches!(DefiningData::build(&params, opts), Err(Error::OutOfRange(_))));
    }
}
