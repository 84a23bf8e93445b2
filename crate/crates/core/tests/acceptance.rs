//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Reference values come from independent oracles below, never from
//! the library routine under test.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eulerseq::defining::TraceOptions;
use eulerseq::gf2::{element_order, make_context};
use eulerseq::lincomp::LinearComplexityReport;
use eulerseq::quotients::{find_normalized_root, is_wieferich, two_order_profile, CyclotomicPartition};
use eulerseq::sequences::{generate_cyclotomic, generate_threshold};
use eulerseq::verify;
use eulerseq::{DefiningData, FieldElement, Params};

const AXIOM_SEED: u64 = 0x6575_6c65_7273_6571;

/// `Q_r(u)` straight from the definition with big integers.
fn oracle_quotient(u: u64, p: u64, r: u32) -> u64 {
    if u.is_multiple_of(p) {
        return 0;
    }
    let pr = BigUint::from(p).pow(r);
    let modulus = &pr * &pr;
    let phi = &pr - &pr / BigUint::from(p);
    let x = BigUint::from(u).modpow(&phi, &modulus);
    let q = ((x + &modulus - 1u32) % &modulus) / &pr;
    u64::try_from(q % &pr).unwrap()
}

fn oracle_sequence(p: u64, r: u32) -> Vec<bool> {
    let pr = p.pow(r);
    (0..p * pr).map(|u| 2 * oracle_quotient(u, p, r) >= pr).collect()
}

fn oracle_lc(s: &[bool]) -> usize {
    // textbook Berlekamp-Massey over bytes
    let n = s.len();
    let s: Vec<u8> = s.iter().map(|&b| b as u8).collect();
    let (mut c, mut b) = (vec![0u8; n + 1], vec![0u8; n + 1]);
    c[0] = 1;
    b[0] = 1;
    let (mut l, mut m) = (0usize, 1usize);
    for i in 0..n {
        let d = (0..=l).fold(0u8, |acc, j| acc ^ (c[j] & s[i - j]));
        if d == 0 {
            m += 1;
            continue;
        }
        let t = c.clone();
        for j in 0..=n - m {
            c[j + m] ^= b[j];
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = t;
            m = 1;
        } else {
            m += 1;
        }
    }
    l
}

fn naive_class_sum(members: &[u64], gamma: &FieldElement) -> FieldElement {
    members.iter().fold(gamma.context().zero(), |acc, &e| &acc + &gamma.pow_u64(e))
}

fn params(p: u64, r: u32) -> Params {
    Params::new(p, r).unwrap()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn crit1() -> Outcome {
    let sets = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)];
    for (p, r) in sets {
        let pr = params(p, r);
        let n = pr.period() as usize;
        let oracle = oracle_sequence(p, r);
        let a = generate_threshold(&pr, n);
        let b = generate_cyclotomic(&pr, n).map_err(|e| e.to_string())?;
        if a.bits() != oracle.as_slice() || b.bits() != oracle.as_slice() {
            return Err(format!("mismatch at ({p},{r})"));
        }
    }
    Ok(format!("{} parameter sets bit-exact", sets.len()))
}

fn crit2() -> Outcome {
    let mut notes = Vec::new();
    for (p, r, degree) in [(3, 2, 18), (3, 3, 54), (5, 2, 100)] {
        let dd = DefiningData::build(&params(p, r), Default::default()).map_err(|e| e.to_string())?;
        if dd.context().degree() != degree {
            return Err(format!("({p},{r}) field degree {}", dd.context().degree()));
        }
        let oracle = oracle_sequence(p, r);
        for (u, &e) in oracle.iter().enumerate() {
            if dd.defining_eval(u as u64).map_err(|e| e.to_string())? != e {
                return Err(format!("({p},{r}) G(beta^{u}) != e_{u}"));
            }
        }
        notes.push(format!("({p},{r}) N={degree} T={}", oracle.len()));
    }
    Ok(notes.join(", "))
}

fn crit3() -> Outcome {
    let (p, r) = (5, 3);
    let pr = params(p, r);
    let dd = DefiningData::build(&pr, Default::default()).map_err(|e| e.to_string())?;
    if dd.context().degree() != 500 {
        return Err(format!("field degree {}", dd.context().degree()));
    }
    let seq = generate_threshold(&pr, pr.period() as usize);
    for (class, expect) in [(17, false), (85, true)] {
        let positions: Vec<u64> = (0..pr.period()).filter(|&u| u % p != 0 && oracle_quotient(u, p, r) == class).collect();
        if positions.len() as u64 != p - 1 {
            return Err(format!("class {class} has {} positions", positions.len()));
        }
        for &u in &positions {
            let g = dd.defining_eval(u).map_err(|e| e.to_string())?;
            if g != expect || seq.bits()[u as usize] != expect {
                return Err(format!("u={u} in class {class}: G={g}, e={}", seq.bits()[u as usize]));
            }
        }
    }
    Ok("N=500, classes 17 -> 0 and 85 -> 1 at all 8 positions".into())
}

fn crit4() -> Outcome {
    for (p, r) in [(3, 2), (5, 2)] {
        let dd = DefiningData::build(&params(p, r), Default::default()).map_err(|e| e.to_string())?;
        let oracle = oracle_sequence(p, r);
        for (u, &e) in oracle.iter().enumerate() {
            if dd.trace_eval(u as u64, TraceOptions::certified()).map_err(|e| e.to_string())? != e {
                return Err(format!("({p},{r}) trace form at u={u}"));
            }
        }
    }
    Ok("(3,2) and (5,2) full period, certified traces".into())
}

fn crit5() -> Outcome {
    let mut notes = Vec::new();
    for (p, r, expected) in [(3, 2, 24), (3, 3, 80), (5, 1, 20), (5, 2, 120)] {
        let dd = DefiningData::build(&params(p, r), Default::default()).map_err(|e| e.to_string())?;
        let report = LinearComplexityReport::compute(&dd).map_err(|e| e.to_string())?;
        let mut oracle = oracle_sequence(p, r);
        oracle.extend_from_within(..);
        let independent = oracle_lc(&oracle) as u64;
        let values = [report.bm_value, report.closed_form_value, report.weight_value, independent];
        if values.iter().any(|&v| v != expected) {
            return Err(format!("({p},{r}) bm/closed/weight/oracle = {values:?}, expected {expected}"));
        }
        notes.push(format!("({p},{r})={expected}"));
    }
    Ok(notes.join(" "))
}

fn crit6() -> Outcome {
    let mut count = 0;
    for (p, r, ms) in [(3u64, 2u32, vec![0u32, 1, 2]), (5, 1, vec![0, 1, 2])] {
        let dd = DefiningData::build(&params(p, r), Default::default()).map_err(|e| e.to_string())?;
        let part = dd.partition(r);
        let n = part.class_count();
        let theta = dd.theta(r).clone();
        if element_order(&theta, p.pow(r + 1)).map_err(|e| e.to_string())? != p.pow(r + 1) {
            return Err("theta is not a primitive root of unity".into());
        }
        for m in ms {
            let shifted = theta.pow_u64(p.pow(m));
            let a: Vec<_> = (0..n).map(|l| naive_class_sum(&part.members(l), &theta)).collect();
            let b: Vec<_> = (0..n).map(|l| naive_class_sum(&part.members(l), &shifted)).collect();
            for i in 0..n {
                for j in 0..n {
                    let dot = (0..n).fold(theta.context().zero(), |acc, t| {
                        &acc + &(&a[((i + t) % n) as usize] * &b[((j + t) % n) as usize])
                    });
                    let d = i.abs_diff(j);
                    let expect = match (m, r) {
                        (1.., _) => false,
                        (0, 1) => i != j,
                        _ => d % p.pow(r - 1) == 0 && d % p.pow(r) != 0,
                    };
                    if !(dot.is_one() && expect || dot.is_zero() && !expect) {
                        return Err(format!("({p},{r}) m={m} i={i} j={j}"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} inner products"))
}

fn crit7() -> Outcome {
    let mut count = 0;
    for (p, r) in [(3u64, 1u32), (3, 2), (5, 1)] {
        let pr = params(p, r);
        let root = find_normalized_root(&pr).map_err(|e| e.to_string())?;
        let part = CyclotomicPartition::new(&pr, &root, r).map_err(|e| e.to_string())?;
        let dd = DefiningData::build(&pr, Default::default()).map_err(|e| e.to_string())?;
        let theta = dd.theta(r);
        for k in 0..=r + 1 {
            let gamma = theta.pow_u64(p.pow(k));
            let ord = p.pow(r + 1 - k);
            // sum over all classes is the sum over all units
            let total = naive_class_sum(
                &(1..p.pow(r + 1)).filter(|u| u % p != 0).collect::<Vec<_>>(),
                &gamma,
            );
            let by_class = (0..part.class_count())
                .fold(gamma.context().zero(), |acc, l| &acc + &naive_class_sum(&part.members(l), &gamma));
            let expect = ord == p;
            if by_class != total || !(total.is_one() && expect || total.is_zero() && !expect) {
                return Err(format!("({p},{r}) order {ord}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} orders across 3 parameter sets"))
}

fn crit8() -> Outcome {
    let mut count = 0;
    for (p, r_frak) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let pr = params(p, r_frak);
        let root = find_normalized_root(&pr).map_err(|e| e.to_string())?;
        let parts: Vec<_> = (1..=r_frak).map(|r| CyclotomicPartition::new(&pr, &root, r).unwrap()).collect();
        for r in 1..=r_frak {
            let part = &parts[r as usize - 1];
            // independent quotient fibers against the partition
            for l in [0, 1, part.class_count() - 1] {
                let fiber: Vec<u64> = (1..part.modulus()).filter(|&u| u % p != 0 && oracle_quotient(u, p, r) == l).collect();
                if *part.members(l) != *fiber {
                    return Err(format!("({p},{r}) class {l} is not the quotient fiber"));
                }
            }
            let checks: [(&str, verify::Outcome); 6] = [
                ("additivity", verify::check_additivity(&pr, r)),
                ("shift law", verify::check_shift_law(&pr, r)),
                ("partition", verify::check_partition(&pr, part)),
                ("epimorphism", verify::check_epimorphism(&pr, r)),
                ("translation", verify::check_translation(part)),
                (
                    "level reduction",
                    parts.get(r as usize).map_or(Ok(()), |upper| verify::check_level_reduction(part, upper)),
                ),
            ];
            for (name, outcome) in checks {
                outcome.map_err(|e| format!("({p},{r}) {name}: {e}"))?;
                count += 1;
            }
        }
        verify::check_two_order_tower(p, r_frak + 1).map_err(|e| format!("({p}) order tower: {e}"))?;
        let dd = DefiningData::build(&pr, Default::default()).map_err(|e| e.to_string())?;
        verify::check_cosets(&dd).map_err(|e| format!("({p},{r_frak}) cosets: {e}"))?;
        verify::check_class_trace_forms(&dd, usize::MAX).map_err(|e| format!("({p},{r_frak}) trace identity: {e}"))?;
        count += 3;
    }
    Ok(format!("{count} exhaustive suites, zero counterexamples"))
}

fn crit9() -> Outcome {
    let primes: Vec<u64> = (3..5000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
    let found: Vec<u64> = primes.iter().copied().filter(|&p| is_wieferich(p)).collect();
    // independent: 2^(p-1) mod p^2 with big integers
    let oracle: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| BigUint::from(2u32).modpow(&BigUint::from(p - 1), &BigUint::from(p * p)) == BigUint::from(1u32))
        .collect();
    if found != [1093, 3511] || oracle != found {
        return Err(format!("found {found:?}, oracle {oracle:?}"));
    }
    let profile = two_order_profile(1093, 3).map_err(|e| e.to_string())?;
    if profile.lambda != 364 || profile.t0 != 2 {
        return Err(format!("lambda={} t0={}", profile.lambda, profile.t0));
    }
    Ok("{1093, 3511}; lambda(1093)=364, t0=2".into())
}

fn field_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);
    let ctx = make_context(500).map_err(|e| e.to_string())?;
    let random = |rng: &mut ChaCha8Rng| {
        let words: Vec<u64> = (0..ctx.degree().div_ceil(64)).map(|_| rng.gen()).collect();
        ctx.element(&eulerseq::BitPoly::from_words(words).rem(ctx.modulus()))
    };
    for t in 0..1000 {
        let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
        if &(&a * &b) * &c != &a * &(&b * &c) || &a * &(&b + &c) != &(&a * &b) + &(&a * &c) {
            return Err(format!("triple {t}"));
        }
        if !a.is_zero() && !(&a * &a.inverse().map_err(|e| e.to_string())?).is_one() {
            return Err(format!("inverse at triple {t}"));
        }
    }
    Ok(format!("1000 triples in GF(2^500), seed {AXIOM_SEED:#x}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 definitions agree", crit1, Duration::from_secs(5)),
        ("2 defining pair", crit2, Duration::from_secs(60)),
        ("3 worked example (5,3)", crit3, Duration::from_secs(1800)),
        ("4 trace representation", crit4, Duration::from_secs(120)),
        ("5 linear complexity triple", crit5, Duration::from_secs(10)),
        ("6 inner products", crit6, Duration::from_secs(60)),
        ("7 root-of-unity sums", crit7, Duration::from_secs(10)),
        ("8 class algebra suites", crit8, Duration::from_secs(30)),
        ("9 wieferich handling", crit9, Duration::from_secs(10)),
        ("field axioms", field_axioms, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(_) if elapsed > limit => ("FAIL", format!("over time limit {limit:?}")),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        failed += usize::from(status == "FAIL");
        println!("{status} criterion {name}: {detail} ({:.2?})", elapsed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
