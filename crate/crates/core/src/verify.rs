//! Exhaustive checks of every identity the construction relies on. Each
//! check returns `Err(counterexample)` on the first failure.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::defining::{class_poly_eval, class_poly_trace_form, class_values, BuildOptions, ClassVector, DefiningData, TraceOptions};
use crate::error::Error;
use crate::gf2::{element_order, FieldElement};
use crate::lincomp::LinearComplexityReport;
use crate::quotients::arith::{mod_inverse, valuation};
use crate::quotients::{
    find_normalized_root, is_wieferich, multiplicative_order, two_order_profile, ClassIndex,
    CyclotomicPartition, Params,
};
use crate::sequences::{detect_period, generate_cyclotomic, generate_threshold, indicator_sequence};

pub type Outcome = std::result::Result<(), String>;

fn fail<T>(e: Error) -> std::result::Result<T, String> {
    Err(format!("error: {e}"))
}

/// `Q_r(uv) = Q_r(u) + Q_r(v) (mod p^r)` over all unit pairs below `p^(r+1)`.
pub fn check_additivity(params: &Params, level: u32) -> Outcome {
    let (p, m, pr) = (params.p(), params.level_modulus(level), params.class_count(level));
    let q = params.quotient(level);
    let units: Vec<u64> = (1..m).filter(|u| u % p != 0).collect();
    let qs: Vec<u64> = units.iter().map(|&u| q.eval(u)).collect();
    for (a, &u) in units.iter().enumerate() {
        for (b, &v) in units.iter().enumerate() {
            if q.eval(u * v) != (qs[a] + qs[b]) % pr {
                return Err(format!("Q_{level}({u}*{v}) != Q({u}) + Q({v})"));
            }
        }
    }
    Ok(())
}

/// `Q_r(u + k p^r) = Q_r(u) - k p^(r-1) u^(-1) (mod p^r)` for units `u < p^r`, `0 <= k < p`.
pub fn check_shift_law(params: &Params, level: u32) -> Outcome {
    let (p, pr) = (params.p(), params.class_count(level));
    let q = params.quotient(level);
    for u in (1..pr).filter(|u| u % p != 0) {
        let inv = mod_inverse(u, pr).ok_or_else(|| format!("{u} not invertible"))?;
        for k in 0..p {
            let delta = (k * (pr / p) % pr) * inv % pr;
            let expect = (q.eval(u) + pr - delta) % pr;
            if q.eval(u + k * pr) != expect {
                return Err(format!("Q_{level}({u} + {k}*p^{level}) = {} != {expect}", q.eval(u + k * pr)));
            }
        }
    }
    Ok(())
}

/// Classes are disjoint, of size `p - 1`, cover the units, and each equals the
/// quotient fiber `{u : Q_r(u) = l}`.
pub fn check_partition(params: &Params, partition: &CyclotomicPartition) -> Outcome {
    let (p, m, level) = (params.p(), partition.modulus(), partition.level());
    let mut fibers = vec![Vec::new(); partition.class_count() as usize];
    for u in (1..m).filter(|u| u % p != 0) {
        match params.class_index(u, level) {
            ClassIndex::Class(l) => fibers[l as usize].push(u),
            ClassIndex::NonUnit => return Err(format!("unit {u} reported as non-unit")),
        }
    }
    let mut seen = vec![false; m as usize];
    for (l, fiber) in fibers.iter().enumerate() {
        let members = partition.members(l as u64);
        if members.len() as u64 != p - 1 {
            return Err(format!("|D_{l}| = {}", members.len()));
        }
        if *members != **fiber {
            return Err(format!("D_{l} differs from the quotient fiber"));
        }
        for &u in members.iter() {
            if std::mem::replace(&mut seen[u as usize], true) {
                return Err(format!("{u} in two classes"));
            }
        }
    }
    match (1..m).find(|&u| (u % p != 0) != seen[u as usize]) {
        Some(u) => Err(format!("{u} misplaced by the partition")),
        None => Ok(()),
    }
}

/// Every value in `Z_{p^r}` is attained by `Q_r` on the units.
pub fn check_epimorphism(params: &Params, level: u32) -> Outcome {
    let mut hit = vec![false; params.class_count(level) as usize];
    let q = params.quotient(level);
    for u in (1..params.level_modulus(level)).filter(|u| u % params.p() != 0) {
        hit[q.eval(u) as usize] = true;
    }
    match hit.iter().position(|h| !h) {
        Some(l) => Err(format!("class {l} is empty")),
        None => Ok(()),
    }
}

/// `Q_r(-1) = 0 (mod p^r)`.
pub fn check_q_minus_one(params: &Params, level: u32) -> Outcome {
    let q = params.quotient(level).eval(params.level_modulus(level) - 1);
    if q == 0 {
        Ok(())
    } else {
        Err(format!("Q_{level}(-1) = {q}"))
    }
}

/// `u D_l = D_{l + l'}` for `u` in `D_{l'}`.
pub fn check_translation(partition: &CyclotomicPartition) -> Outcome {
    let (m, n) = (partition.modulus(), partition.class_count());
    for u in 1..m {
        let ClassIndex::Class(lu) = partition.class_of(u) else { continue };
        for l in 0..n {
            let mut image: Vec<u64> = partition.members(l).iter().map(|&v| u * v % m).collect();
            image.sort_unstable();
            if *partition.members((l + lu) % n) != *image {
                return Err(format!("{u} * D_{l} != D_{}", (l + lu) % n));
            }
        }
    }
    Ok(())
}

/// `{u mod p^(r+1) : u in D_l^(r+1)} = D_{l mod p^r}^(r)`.
pub fn check_level_reduction(lower: &CyclotomicPartition, upper: &CyclotomicPartition) -> Outcome {
    let (m, n) = (lower.modulus(), lower.class_count());
    for l in 0..upper.class_count() {
        let mut reduced: Vec<u64> = upper.members(l).iter().map(|&u| u % m).collect();
        reduced.sort_unstable();
        reduced.dedup();
        if *lower.members(l % n) != *reduced {
            return Err(format!("D_{l}^({}) does not reduce onto D_{}^({})", upper.level(), l % n, lower.level()));
        }
    }
    Ok(())
}

/// Order of 2 modulo `p^r` follows the tower law for `r <= r_max`, and equals
/// `lambda p^(r-1)` when `p` is not a Wieferich prime.
pub fn check_two_order_tower(p: u64, r_max: u32) -> Outcome {
    let profile = two_order_profile(p, r_max).or_else(fail)?;
    for (i, &order) in profile.orders.iter().enumerate() {
        let r = i as u32 + 1;
        let direct = multiplicative_order(2, p.pow(r)).or_else(fail)?;
        if direct != order {
            return Err(format!("ord(2 mod {p}^{r}) = {direct}, profile says {order}"));
        }
        if !is_wieferich(p) && order != profile.lambda * p.pow(r - 1) {
            return Err(format!("ord(2 mod {p}^{r}) = {order} != lambda p^(r-1)"));
        }
    }
    Ok(())
}

pub fn check_cosets(dd: &DefiningData) -> Outcome {
    for r in 1..=dd.params().r_frak() {
        dd.coset_decomposition(r).or_else(fail)?;
    }
    Ok(())
}

pub fn check_definitions_agree(params: &Params) -> Outcome {
    let n = params.period() as usize;
    let a = generate_threshold(params, n);
    let b = generate_cyclotomic(params, n).or_else(fail)?;
    match (0..n).find(|&u| a.bits()[u] != b.bits()[u]) {
        Some(u) => Err(format!("definitions differ at u={u}")),
        None => Ok(()),
    }
}

pub fn check_period(params: &Params) -> Outcome {
    let seq = generate_threshold(params, 2 * params.period() as usize);
    let t = detect_period(&seq).or_else(fail)?;
    if t == params.period() {
        Ok(())
    } else {
        Err(format!("least period {t}, expected {}", params.period()))
    }
}

/// `sum_l D_l(gamma) = [ord(gamma) = p]` for representatives `theta^(p^k)` of
/// every order dividing `p^(r+1)`.
pub fn check_root_sums(partition: &CyclotomicPartition, theta: &FieldElement) -> Outcome {
    let (p, m) = (partition.p(), partition.modulus());
    for k in 0..=partition.level() + 1 {
        let gamma = theta.pow_u64(p.pow(k));
        let ord = element_order(&gamma, m).or_else(fail)?;
        if ord != m / p.pow(k) {
            return Err(format!("ord(theta^(p^{k})) = {ord}"));
        }
        let mut total = gamma.context().zero();
        for l in 0..partition.class_count() {
            total += &class_poly_eval(partition, l, &gamma);
        }
        let expect_one = ord == p;
        if !(total.is_one() && expect_one || total.is_zero() && !expect_one) {
            return Err(format!("sum of D_l at order {ord} is {total}"));
        }
    }
    Ok(())
}

/// The three case values of `C_i(theta) . C_j(theta^(p^m))`.
pub fn expected_inner_product(p: u64, level: u32, i: u64, j: u64, m: u32) -> bool {
    if m >= 1 {
        return false;
    }
    if level == 1 {
        return i != j;
    }
    let diff = i.abs_diff(j);
    diff != 0 && valuation(diff, p) == level - 1
}

pub fn check_inner_products(partition: &CyclotomicPartition, theta: &FieldElement, ms: &[u32]) -> Outcome {
    let (p, level, n) = (partition.p(), partition.level(), partition.class_count());
    let at_theta = class_values(partition, theta);
    for &m in ms {
        let at_shift = class_values(partition, &theta.pow_u64(p.pow(m)));
        for i in 0..n {
            let ci = ClassVector::from_class_values(level, i, &at_theta);
            for j in 0..n {
                let value = ci.dot(&ClassVector::from_class_values(level, j, &at_shift));
                let expect = expected_inner_product(p, level, i, j, m);
                if !(value.is_one() && expect || value.is_zero() && !expect) {
                    return Err(format!("r={level} m={m} i={i} j={j}: got {value}, expected {}", u8::from(expect)));
                }
            }
        }
    }
    Ok(())
}

pub fn check_defining_pair(dd: &DefiningData) -> Outcome {
    let params = dd.params();
    let e = generate_threshold(params, params.period() as usize);
    for u in 0..params.period() {
        if dd.defining_eval(u).or_else(fail)? != e.bits()[u as usize] {
            return Err(format!("G(beta^{u}) != e_{u}"));
        }
    }
    Ok(())
}

pub fn check_indicator_pairs(dd: &DefiningData, indices: &[u64]) -> Outcome {
    let params = dd.params();
    for &i in indices {
        let s = indicator_sequence(params, i, params.period() as usize).or_else(fail)?;
        for u in 0..params.period() {
            if dd.indicator_defining_eval(i, u).or_else(fail)? != s.bits()[u as usize] {
                return Err(format!("G_{i}(beta^{u}) != s_{u}"));
            }
        }
    }
    Ok(())
}

/// `sum_i C_i(theta_r) . C_0(beta^(u p^(r_frak - r))) = 0` at every level.
pub fn check_column_sums(dd: &DefiningData, us: impl IntoIterator<Item = u64>) -> Outcome {
    let (p, r_frak) = (dd.params().p(), dd.params().r_frak());
    for u in us {
        for r in 1..=r_frak {
            let theta_vals = dd.class_values_at(r, p.pow(r_frak - r));
            let x_vals = dd.class_values_at(r, u * p.pow(r_frak - r));
            let c0 = ClassVector::from_class_values(r, 0, &x_vals);
            let mut total = dd.context().zero();
            for i in 0..dd.params().class_count(r) {
                total += &ClassVector::from_class_values(r, i, &theta_vals).dot(&c0);
            }
            if !total.is_zero() {
                return Err(format!("column sum at level {r}, u={u} is {total}"));
            }
        }
    }
    Ok(())
}

/// `D_l(gamma)` by direct summation equals its trace form, for `gamma`
/// ranging over `theta_r^a` with `a` in the first few units.
pub fn check_class_trace_forms(dd: &DefiningData, samples: usize) -> Outcome {
    let p = dd.params().p();
    for r in 1..=dd.params().r_frak() {
        let partition = dd.partition(r);
        let theta = dd.theta(r);
        for a in (1..partition.modulus()).filter(|a| a % p != 0).take(samples) {
            let gamma = theta.pow_u64(a);
            for l in 0..partition.class_count() {
                let direct = class_poly_eval(partition, l, &gamma);
                let traced = class_poly_trace_form(partition, dd.lambda(), l, &gamma, true).or_else(fail)?;
                if direct != traced {
                    return Err(format!("level {r}, l={l}, gamma=theta^{a}"));
                }
            }
        }
    }
    Ok(())
}

pub fn check_eta_nonzero(dd: &DefiningData) -> Outcome {
    for (i, row) in dd.eta_table().iter().enumerate() {
        if let Some(l) = row.iter().position(FieldElement::is_zero) {
            return Err(format!("eta_{l}^({}) = 0", i + 1));
        }
    }
    Ok(())
}

pub fn check_trace_representation(dd: &DefiningData, opts: TraceOptions) -> Outcome {
    let params = dd.params();
    let e = generate_threshold(params, params.period() as usize);
    for u in 0..params.period() {
        if dd.trace_eval(u, opts).or_else(fail)? != e.bits()[u as usize] {
            return Err(format!("trace form at u={u} != e_{u}"));
        }
    }
    Ok(())
}

pub fn check_linear_complexity(dd: &DefiningData) -> Outcome {
    let report = LinearComplexityReport::compute(dd).or_else(fail)?;
    if !report.agree {
        return Err(format!(
            "bm={} closed_form={} weight={}",
            report.bm_value, report.closed_form_value, report.weight_value
        ));
    }
    if 2 * report.closed_form_value < dd.params().period() {
        return Err(format!("linear complexity {} below half the period", report.closed_form_value));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    #[serde(rename = "passed")]
    Passed,
    #[serde(rename = "failed")]
    Failed,
    #[serde(rename = "skipped: wieferich")]
    SkippedWieferich,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: CheckStatus,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteConfig {
    pub lemmas: bool,
    pub defining: bool,
    pub trace: bool,
    pub lincomp: bool,
    pub build: BuildOptions,
}

impl SuiteConfig {
    pub fn all() -> Self {
        SuiteConfig { lemmas: true, defining: true, trace: true, lincomp: true, build: BuildOptions::default() }
    }

    fn needs_field(&self) -> bool {
        self.lemmas || self.defining || self.trace || self.lincomp
    }
}

struct Runner {
    results: Vec<CheckResult>,
}

impl Runner {
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let passed = outcome.is_ok();
        self.results.push(CheckResult {
            check: name.into(),
            status: if passed { CheckStatus::Passed } else { CheckStatus::Failed },
            passed,
            counterexample: outcome.err(),
            elapsed: start.elapsed(),
        });
    }

    fn skip(&mut self, name: impl Into<String>) {
        self.results.push(CheckResult {
            check: name.into(),
            status: CheckStatus::SkippedWieferich,
            passed: true,
            counterexample: None,
            elapsed: Duration::ZERO,
        });
    }
}

/// Largest modulus for which the O(m^2) quotient and class-algebra checks run.
const EXHAUSTIVE_LIMIT: u64 = 3_000;

/// Runs the selected checks in a fixed order, building the field data on demand.
pub fn run_suite(params: &Params, cfg: &SuiteConfig) -> Vec<CheckResult> {
    run_suite_with(params, cfg, None)
}

/// As [`run_suite`], reusing `dd` when the caller has already built it.
pub fn run_suite_with(params: &Params, cfg: &SuiteConfig, dd: Option<&DefiningData>) -> Vec<CheckResult> {
    let mut runner = Runner { results: Vec::new() };
    let r_frak = params.r_frak();
    let p = params.p();
    let wieferich = is_wieferich(p);

    if cfg.lemmas {
        let root = find_normalized_root(params);
        runner.run("normalized_root", || {
            let root = root.as_ref().map_err(|e| e.to_string())?;
            for r in 1..=r_frak {
                if params.quotient(r).eval(root.g) != 1 {
                    return Err(format!("Q_{r}(g) != 1 for g={}", root.g));
                }
            }
            match multiplicative_order(root.g, params.period()) {
                Ok(o) if o == root.witness_order => Ok(()),
                other => Err(format!("order of g: {other:?}")),
            }
        });
        for r in (1..=r_frak).filter(|&r| params.level_modulus(r) <= EXHAUSTIVE_LIMIT) {
            runner.run(format!("quotient_additivity[r={r}]"), || check_additivity(params, r));
            runner.run(format!("quotient_shift_law[r={r}]"), || check_shift_law(params, r));
            runner.run(format!("quotient_minus_one[r={r}]"), || check_q_minus_one(params, r));
            runner.run(format!("epimorphism[r={r}]"), || check_epimorphism(params, r));
        }
        if let Ok(root) = &root {
            let parts: Vec<_> = (1..=r_frak).map(|r| CyclotomicPartition::new(params, root, r)).collect();
            for (i, part) in parts.iter().enumerate() {
                let r = i as u32 + 1;
                let Ok(part) = part else { continue };
                if part.modulus() > EXHAUSTIVE_LIMIT {
                    continue;
                }
                runner.run(format!("partition[r={r}]"), || check_partition(params, part));
                runner.run(format!("class_translation[r={r}]"), || check_translation(part));
                if let Some(Ok(upper)) = parts.get(i + 1) {
                    runner.run(format!("level_reduction[r={r}]"), || check_level_reduction(part, upper));
                }
            }
        }
        runner.run("two_order_tower", || check_two_order_tower(p, r_frak + 1));
        runner.run("definitions_agree", || check_definitions_agree(params));
        runner.run("least_period", || check_period(params));
    }

    if !cfg.needs_field() {
        return runner.results;
    }
    if wieferich {
        if cfg.lemmas {
            runner.skip("coset_decomposition");
        }
        if cfg.defining {
            runner.skip("defining_pair");
        }
        if cfg.trace {
            runner.skip("trace_representation");
        }
        if cfg.lincomp {
            runner.skip("linear_complexity");
        }
        return runner.results;
    }
    let built;
    let dd = match dd {
        Some(dd) => dd,
        None => match DefiningData::build(params, cfg.build) {
            Ok(d) => {
                built = d;
                &built
            }
            Err(e) => {
                runner.run("build_defining_data", || Err(e.to_string()));
                return runner.results;
            }
        },
    };
    let small = params.period() <= 256;

    if cfg.lemmas {
        runner.run("coset_decomposition", || check_cosets(dd));
        for r in 1..=r_frak {
            let part = dd.partition(r);
            runner.run(format!("root_of_unity_sums[r={r}]"), || check_root_sums(part, dd.theta(r)));
            if part.class_count() <= 125 {
                let ms: Vec<u32> = (0..=r + 1).collect();
                runner.run(format!("inner_products[r={r}]"), || check_inner_products(part, dd.theta(r), &ms));
            }
        }
        runner.run("class_trace_forms", || check_class_trace_forms(dd, if small { usize::MAX } else { 3 }));
    }
    if cfg.defining {
        runner.run("eta_nonzero", || check_eta_nonzero(dd));
        runner.run("defining_pair", || check_defining_pair(dd));
        let top = params.class_count(r_frak);
        let indices: Vec<u64> = if small {
            (0..top).collect()
        } else {
            let mut v = vec![0, 1, top.div_ceil(2), top - 1];
            v.dedup();
            v
        };
        runner.run("indicator_pairs", || check_indicator_pairs(dd, &indices));
        let us: Vec<u64> = if small { (0..params.period()).collect() } else { (0..params.period()).step_by(7).collect() };
        runner.run("column_sums", || check_column_sums(dd, us));
    }
    if cfg.trace {
        let opts = TraceOptions { certify: true, extended: r_frak == 1 };
        let name = if r_frak == 1 { "trace_representation[extended r=1]" } else { "trace_representation" };
        runner.run(name, || check_trace_representation(dd, opts));
    }
    if cfg.lincomp {
        runner.run("linear_complexity", || check_linear_complexity(dd));
    }
    runner.results
}
