//! Acceptance suite. Runs without the libtest harness so the per-criterion
//! lines always reach stdout; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Pow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use densprog::checks::periodic_set;
use densprog_core::density::{
    banach_sup_estimate, default_candidates, partial_sum_log, partial_sum_r, r_density_at,
    DEFAULT_EXACT_THRESHOLD,
};
use densprog_core::families::{
    gen_factorial_blocks, gen_mth_power_blocks, gen_pow2_blocks, gen_remark26_blocks,
    gen_sparse_blocks, gen_squared_seq, gen_squarefree, DEFAULT_SIEVE_CAP,
};
use densprog_core::search::{
    find_3term_geometric, find_geometric, find_power_ap, pow2_side_condition, power_side_condition,
    verify_no_pow2_approx, verify_no_power_approx, ApproxParams, DEFAULT_ELEMENT_CAP,
    DEFAULT_PAIR_BUDGET,
};
use densprog_core::transform::{ceil_root, log_image, log_image_has_zero, power_image};
use densprog_core::{DensityConfig, IntegerSet, Precision, RExponent, UnitFraction};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn pow2(n: u32) -> BigUint {
    BigUint::one() << n
}

fn rat(s: &str) -> BigRational {
    BigRational::from_str(s).unwrap()
}

fn rexp(n: u32, d: u32) -> RExponent {
    RExponent::new(n, d).unwrap()
}

fn frac(p: u32, q: u32) -> UnitFraction {
    UnitFraction::new(p, q).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn neumaier(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for t in terms {
        let u = s + t;
        if s.abs() >= t.abs() {
            c += (s - u) + t;
        } else {
            c += (t - u) + s;
        }
        s = u;
    }
    s + c
}

fn members_in(set: &IntegerSet, a: u64, b: u64) -> impl Iterator<Item = u64> + '_ {
    set.iter_u64().skip_while(move |&x| x < a).take_while(move |&x| x <= b)
}

fn log_uniform(rng: &mut ChaCha8Rng, max: u64) -> u64 {
    let e = rng.gen_range(0.0..(max as f64).ln());
    (e.exp() as u64).clamp(1, max)
}

const EXPONENTS: [(u32, u32); 5] = [(1, 4), (1, 3), (1, 2), (3, 4), (1, 1)];

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let limit = 1_000_000u64;
    let mut analytic = 0;
    for i in 0..200 {
        let pieces = rng.gen_range(1..=6);
        let pairs: Vec<(u64, u64)> = (0..pieces)
            .map(|_| {
                let lo = log_uniform(&mut rng, limit);
                let hi = (lo + log_uniform(&mut rng, limit)).min(limit);
                (lo, hi)
            })
            .collect();
        let set = IntegerSet::from_u64_pairs(&pairs).unwrap();
        let b = log_uniform(&mut rng, limit);
        let a = rng.gen_range(1..=b);
        let (p, q) = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
        let r = rexp(p, q);
        let rf = p as f64 / q as f64;
        // alternate between the default and a small threshold so both the
        // summed and the integral-bounded paths are exercised
        let thr = if i % 2 == 0 { DEFAULT_EXACT_THRESHOLD } else { 64 };
        if thr == 64 && b - a >= 64 {
            analytic += 1;
        }

        let brute = neumaier(members_in(&set, a, b).map(|x| (x as f64).powf(rf - 1.0)));
        let enc = partial_sum_r(&set, &big(a), &big(b), r, thr).map_err(|e| e.to_string())?;
        ensure(enc.contains_f64(brute), || {
            format!("instance {i}: r={p}/{q} [{a},{b}] brute {brute:e} outside [{:e}, {:e}]", enc.lo_f64(), enc.hi_f64())
        })?;
        let brute = neumaier(members_in(&set, a, b).map(|x| 1.0 / x as f64));
        let enc = partial_sum_log(&set, &big(a), &big(b), thr).map_err(|e| e.to_string())?;
        ensure(enc.contains_f64(brute), || {
            format!("instance {i}: log [{a},{b}] brute {brute:e} outside [{:e}, {:e}]", enc.lo_f64(), enc.hi_f64())
        })?;

        let single = IntegerSet::from_u64_pairs(&[(a, b)]).unwrap();
        let (af, bf) = (a as f64, b as f64);
        let w = partial_sum_r(&single, &big(a), &big(b), r, thr).unwrap().width_f64();
        let cap = af.powf(rf - 1.0) - bf.powf(rf - 1.0) + 1e-12;
        ensure(w <= cap, || format!("instance {i}: r={p}/{q} [{a},{b}] width {w:e} > {cap:e}"))?;
        let w = partial_sum_log(&single, &big(a), &big(b), thr).unwrap().width_f64();
        let cap = 1.0 / af - 1.0 / bf + 1e-12;
        ensure(w <= cap, || format!("instance {i}: log [{a},{b}] width {w:e} > {cap:e}"))?;
    }
    Ok(format!("200 instances, {analytic} through integral bounds"))
}

fn oracle_ceil_log2(x: u64) -> u64 {
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn oracle_ceil_root(x: u64, p: u32, q: u32) -> u64 {
    let target = (x as u128).pow(p);
    let mut y = (x as f64).powf(p as f64 / q as f64).ceil() as u64;
    while y > 0 && ((y - 1) as u128).pow(q) >= target {
        y -= 1;
    }
    while (y as u128).pow(q) < target {
        y += 1;
    }
    y
}

fn zoo(bound: u64) -> Vec<(String, IntegerSet)> {
    let b = big(bound);
    let p = Precision::default();
    let mut out = vec![
        ("factorial-blocks".into(), gen_factorial_blocks(&b)),
        ("squared-seq(2,1/2,1)".into(), gen_squared_seq(&big(2), rexp(1, 2), rexp(1, 1), &b, p).unwrap()),
        ("squared-seq(3,1/3,1/2)".into(), gen_squared_seq(&big(3), rexp(1, 3), rexp(1, 2), &b, p).unwrap()),
        ("pow2-blocks(2/5)".into(), gen_pow2_blocks(frac(2, 5), &b)),
        ("pow2-blocks(1/2)".into(), gen_pow2_blocks(frac(1, 2), &b)),
        ("sparse-blocks(2)".into(), gen_sparse_blocks(2, &b).unwrap()),
        ("sparse-blocks(3)".into(), gen_sparse_blocks(3, &b).unwrap()),
        ("mth-power-blocks(2,1/5)".into(), gen_mth_power_blocks(2, frac(1, 5), &b).unwrap()),
        ("mth-power-blocks(3,9/10)".into(), gen_mth_power_blocks(3, frac(9, 10), &b).unwrap()),
        ("squarefree".into(), gen_squarefree(&b, DEFAULT_SIEVE_CAP).unwrap()),
        ("remark26-blocks".into(), gen_remark26_blocks(&b)),
    ];
    for (m, res) in [(3u64, vec![1u64]), (2, vec![0]), (3, vec![0, 2])] {
        out.push((format!("periodic({m},{res:?})"), periodic_set(m, &res, bound)));
    }
    out
}

fn criterion_2() -> Outcome {
    let mut sets = 0;
    for (name, set) in zoo(100_000) {
        sets += 1;
        let want: BTreeSet<u64> = set.iter_u64().map(oracle_ceil_log2).filter(|&y| y > 0).collect();
        let got: BTreeSet<u64> = log_image(&set).iter_u64().collect();
        ensure(want == got, || format!("log image of {name} differs"))?;
        ensure(log_image_has_zero(&set) == set.member(&BigUint::one()), || format!("zero flag of {name}"))?;
        for (p, q) in [(1u32, 2u32), (1, 3), (2, 3), (3, 4), (1, 1)] {
            let want: BTreeSet<u64> = set.iter_u64().map(|x| oracle_ceil_root(x, p, q)).collect();
            let got: BTreeSet<u64> = power_image(&set, p, q).unwrap().iter_u64().collect();
            ensure(want == got, || format!("power image {p}/{q} of {name} differs"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..10_000 {
        let bits = rng.gen_range(1..=512u64);
        let x = rng.gen_biguint(bits) + 1u32;
        let q = rng.gen_range(1..=8u32);
        let p = rng.gen_range(1..=q);
        let y = ceil_root(&x, p, q).unwrap();
        let xp = Pow::pow(&x, p);
        ensure(Pow::pow(&y, q) >= xp && Pow::pow(&(&y - 1u32), q) < xp, || {
            format!("case {i}: ceil_root({x}, {p}/{q}) = {y} not certified")
        })?;
    }
    Ok(format!("{sets} zoo sets at 1e5, 10000 ceil_root cases"))
}

fn criterion_3() -> Outcome {
    let set = gen_pow2_blocks(frac(2, 5), &pow2(200));
    let mut n = 0;
    for l in 3..=6u32 {
        for min_a in 0..=30u64 {
            for min_d in 0..=30u64 {
                let cert = find_geometric(&set, l, &big(min_a), &big(min_d), DEFAULT_ELEMENT_CAP)
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("no progression for l={l} min_a={min_a} min_d={min_d}"))?;
                ensure(cert.a > big(min_a) && cert.d > big(min_d), || format!("bounds ignored at l={l}"))?;
                cert.validate(&set).map_err(|e| format!("l={l} min_a={min_a} min_d={min_d}: {e}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} certificates validated"))
}

fn criterion_4() -> Outcome {
    let set = gen_mth_power_blocks(2, frac(9, 10), &big(1_000_000)).unwrap();
    let eps = rat("1/2");
    let mut found = Vec::new();
    for l in 3..=5u32 {
        let cert = find_power_ap(&set, l, 2, &eps, &BigUint::ZERO, &BigUint::ZERO, DEFAULT_ELEMENT_CAP)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no progression for l={l}"))?;
        ensure(cert.params.c() == &rat("5/2") && cert.params.r() == (1, 2), || "wrong parameters".into())?;
        cert.validate(&set).map_err(|e| format!("l={l}: {e}"))?;
        found.push(format!("l={l} a={} d={}", cert.a, cert.d));
    }
    Ok(found.join(", "))
}

fn criterion_5() -> Outcome {
    let eps = rat("1/2");
    let bound = pow2(64);
    ensure(pow2_side_condition(&eps, frac(2, 5)), || "side condition fails".into())?;
    let set = gen_pow2_blocks(frac(2, 5), &bound);
    let rep = verify_no_pow2_approx(&set, &eps, &bound).map_err(|e| e.to_string())?;
    ensure(rep.passed(), || format!("pow2-blocks(2/5) failed: {:?}", rep.violation))?;
    let planted = IntegerSet::from_u64_pairs(&[(3, 3)]).unwrap();
    let bad = verify_no_pow2_approx(&planted, &eps, &bound).map_err(|e| e.to_string())?;
    ensure(!bad.passed(), || "{3} passed".into())?;
    Ok(format!("PASS up to 2^64 ({} powers), {{3}} rejected", rep.checked))
}

fn criterion_6() -> Outcome {
    let eps = rat("1/2");
    let bound = big(1_000_000);
    ensure(power_side_condition(2, &eps, frac(1, 5)), || "side condition fails".into())?;
    let set = gen_mth_power_blocks(2, frac(1, 5), &bound).unwrap();
    let rep = verify_no_power_approx(&set, 2, &eps, &bound).map_err(|e| e.to_string())?;
    ensure(rep.passed(), || format!("mth-power-blocks(2,1/5) failed: {:?}", rep.violation))?;
    let planted = IntegerSet::from_u64_pairs(&[(8, 8)]).unwrap();
    let bad = verify_no_power_approx(&planted, 2, &eps, &bound).map_err(|e| e.to_string())?;
    ensure(!bad.passed(), || "{8} passed".into())?;

    let horizon = big(100_000_000);
    let big_set = gen_mth_power_blocks(2, frac(1, 5), &horizon).unwrap();
    let est = r_density_at(&big_set, &horizon, rexp(1, 2), &DensityConfig::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = (est.value.lo_f64(), est.value.hi_f64());
    ensure((lo - 0.2).abs() <= 0.02 && (hi - 0.2).abs() <= 0.02, || {
        format!("r=1/2 density at 1e8 is [{lo}, {hi}]")
    })?;
    Ok(format!("verifier PASS/FAIL as expected, d_1/2(1e8) in [{lo:.6}, {hi:.6}]"))
}

fn criterion_7() -> Outcome {
    // a_7 = 2^64, so a_7^2 = 2^128; the block [a_6^2, (a_6+1)^2] starts at
    // 2^64 and has 2^33 + 2 elements
    let set = gen_squared_seq(&big(2), rexp(1, 2), rexp(1, 1), &pow2(128), Precision::default())
        .map_err(|e| e.to_string())?;
    let cands = default_candidates(&set);
    let cfg = DensityConfig::default();
    let n = pow2(33) + 1u32;
    let (s1, k) = banach_sup_estimate(&set, &n, Some(rexp(1, 1)), &cands, &cfg).map_err(|e| e.to_string())?;
    ensure(s1.value.lo_f64() >= 0.99, || format!("s=1 estimate {} at k={k}", s1.value.lo_f64()))?;
    let (half, _) = banach_sup_estimate(&set, &n, Some(rexp(1, 2)), &cands, &cfg).map_err(|e| e.to_string())?;
    ensure(half.value.hi_f64() <= 0.1, || format!("r=1/2 estimate {}", half.value.hi_f64()))?;
    Ok(format!(
        "n=2^33+1: s=1 sup >= {:.6} at k={k}, r=1/2 sup <= {:.3e}",
        s1.value.lo_f64(),
        half.value.hi_f64()
    ))
}

fn criterion_8() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_densprog"))
        .args(["--tolerance", "0.02", "check", "--suite", "all"])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let summary = stdout.lines().last().unwrap_or("").to_string();
    ensure(out.status.code() == Some(0), || {
        let failed: Vec<&str> = stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
        format!("exit {:?}; {}", out.status.code(), failed.join(" | "))
    })?;
    Ok(summary)
}

fn criterion_9() -> Outcome {
    let bound = big(1_000_000);
    let set = gen_squarefree(&bound, DEFAULT_SIEVE_CAP).map_err(|e| e.to_string())?;
    let est = r_density_at(&set, &bound, rexp(1, 1), &DensityConfig::default()).map_err(|e| e.to_string())?;
    let want = rat("607926/1000000");
    ensure(est.value.is_exact() && est.value.lo() == &want, || {
        format!("d_1(1e6) = [{}, {}]", est.value.lo(), est.value.hi())
    })?;
    let cert = find_geometric(&set, 4, &BigUint::ZERO, &BigUint::ZERO, DEFAULT_ELEMENT_CAP)
        .map_err(|e| e.to_string())?
        .ok_or("no geometric progression of length 4")?;
    cert.validate(&set).map_err(|e| e.to_string())?;
    let small = gen_squarefree(&big(10_000), DEFAULT_SIEVE_CAP).unwrap();
    let exact = find_3term_geometric(
        &small,
        &ApproxParams::exact(),
        &BigUint::ZERO,
        &BigUint::one(),
        &big(10_000),
        DEFAULT_PAIR_BUDGET,
    )
    .map_err(|e| e.to_string())?;
    ensure(exact.is_none(), || "exact 3-term geometric progression found".into())?;
    Ok(format!(
        "d_1(1e6) = 607926/10^6 exactly, l=4 at a={} d={}, no exact triple up to 1e4",
        cert.a, cert.d
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("enclosure soundness", criterion_1, 10),
        ("transform exactness", criterion_2, 10),
        ("geometric pipeline", criterion_3, 5),
        ("power pipeline", criterion_4, 10),
        ("no pow2 approximation", criterion_5, 5),
        ("no square approximation", criterion_6, 60),
        ("squared-seq separation", criterion_7, 10),
        ("inequality suites", criterion_8, 60),
        ("square-free baseline", criterion_9, 30),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(budget) {
                Err(format!("over the {budget}s budget; {detail}"))
            } else {
                Ok(detail)
            }
        });
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag} {name} ({:.2}s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
