//! Cross-module properties on the example families at desk scale.

use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use densprog_core::density::{banach_sup_estimate, default_candidates, r_density_at};
use densprog_core::families::{gen_factorial_blocks, gen_mth_power_blocks, gen_pow2_blocks};
use densprog_core::search::{
    find_geometric, find_power_ap, pow2_side_condition, power_side_condition, verify_no_pow2_approx,
    verify_no_power_approx, DEFAULT_ELEMENT_CAP,
};
use densprog_core::{DensityConfig, IntegerSet, RExponent, UnitFraction};

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn rat(s: &str) -> BigRational {
    BigRational::from_str(s).unwrap()
}

fn frac(p: u32, q: u32) -> UnitFraction {
    UnitFraction::new(p, q).unwrap()
}

#[test]
fn geometric_progressions_with_large_a_and_d() {
    for k in [50u32, 100, 200] {
        let set = gen_pow2_blocks(frac(2, 5), &(BigUint::one() << k));
        let k = k as u64;
        for l in 3..=6u64 {
            for min_d in (0..).take_while(|d| l * (d + 1) <= k) {
                let cap = k - l * (min_d + 1);
                // every 5th min_a plus the largest admissible one
                for min_a in (0..=cap).step_by(5).chain([cap]) {
                    let cert = find_geometric(&set, l as u32, &big(min_a), &big(min_d), DEFAULT_ELEMENT_CAP)
                        .unwrap()
                        .unwrap_or_else(|| panic!("K={k} l={l} min_a={min_a} min_d={min_d}"));
                    assert!(cert.a > big(min_a) && cert.d > big(min_d));
                    cert.validate(&set).unwrap();
                }
            }
        }
    }
}

#[test]
fn power_progressions_with_large_a_and_d() {
    let set = gen_mth_power_blocks(2, frac(9, 10), &big(1_000_000)).unwrap();
    let eps = rat("1/2");
    for l in 3..=5u32 {
        for min_a in (0..=50u64).step_by(10) {
            for min_d in (0..=50u64).step_by(10) {
                let cert = find_power_ap(&set, l, 2, &eps, &big(min_a), &big(min_d), DEFAULT_ELEMENT_CAP)
                    .unwrap()
                    .unwrap_or_else(|| panic!("l={l} min_a={min_a} min_d={min_d}"));
                assert!(cert.a > big(min_a) && cert.d > big(min_d));
                cert.validate(&set).unwrap();
            }
        }
    }
}

#[test]
fn pow2_family_avoids_powers_below_the_side_condition() {
    let eps = rat("1/2");
    let bound = BigUint::one() << 64u32;
    // log2(4/3) = 0.415...
    for delta in [frac(1, 10), frac(1, 5), frac(1, 3), frac(2, 5), frac(41, 100)] {
        assert!(pow2_side_condition(&eps, delta), "{delta}");
        let set = gen_pow2_blocks(delta, &bound);
        assert!(verify_no_pow2_approx(&set, &eps, &bound).unwrap().passed(), "{delta}");
    }
    assert!(!pow2_side_condition(&eps, frac(21, 50)));
    // above the threshold the verifier finds a violation
    let set = gen_pow2_blocks(frac(1, 2), &bound);
    assert!(!verify_no_pow2_approx(&set, &eps, &bound).unwrap().passed());
}

#[test]
fn power_family_avoids_powers_below_the_side_condition() {
    let eps = rat("1/2");
    let bound = big(1_000_000);
    for (m, deltas) in [(2u32, vec![frac(1, 10), frac(1, 5), frac(6, 25)]), (3, vec![frac(1, 10), frac(4, 25)])] {
        for delta in deltas {
            assert!(power_side_condition(m, &eps, delta), "m={m} {delta}");
            let set = gen_mth_power_blocks(m, delta, &bound).unwrap();
            assert!(verify_no_power_approx(&set, m, &eps, &bound).unwrap().passed(), "m={m} {delta}");
        }
    }
    assert!(!power_side_condition(2, &eps, frac(1, 4)));
}

fn periodic(modulus: u64, residues: &[u64], bound: u64) -> IntegerSet {
    let members = (1..=bound).filter(|x| residues.contains(&(x % modulus))).map(BigUint::from);
    IntegerSet::from_elements(members).unwrap()
}

#[test]
fn r_density_lower_bound_on_periodic_sets() {
    let cfg = DensityConfig::default();
    let n = 20_000u64;
    for (modulus, residues, alpha) in [(3u64, vec![0u64], 1.0 / 3.0), (2, vec![1], 0.5), (3, vec![0, 1], 2.0 / 3.0)] {
        let set = periodic(modulus, &residues, n);
        for (p, q) in [(1u32, 4u32), (1, 2), (3, 4)] {
            let r = RExponent::new(p, q).unwrap();
            let est = r_density_at(&set, &big(n), r, &cfg).unwrap();
            let floor = 1.0 - (1.0f64 - alpha).powf(r.to_f64()) - 0.01;
            assert!(est.value.hi_f64() >= floor, "mod {modulus} {residues:?} r={r}");
        }
    }
}

#[test]
fn factorial_blocks_separate_banach_and_log_banach() {
    let fact = |n: u64| (1..=n).map(BigUint::from).product::<BigUint>();
    let set = gen_factorial_blocks(&(fact(20) * 2u32));
    let cfg = DensityConfig::default();
    let cands = default_candidates(&set);
    let one = RExponent::new(1, 1).unwrap();
    for n in [5u64, 10, 15, 20] {
        let (est, k) = banach_sup_estimate(&set, &fact(n), Some(one), &cands, &cfg).unwrap();
        assert!(est.value.lo_f64() >= 1.0, "n={n}");
        assert_eq!(k, fact(n));
    }
    // a log-window [n!, n·n!] holds exactly the block [n!, 2n!], since (n+1)! > n·n!
    let set = gen_factorial_blocks(&(fact(400) * 2u32));
    let mut prev = f64::INFINITY;
    for n in [10u64, 50, 100, 400] {
        let (est, _) = banach_sup_estimate(&set, &big(n), None, &[fact(n)], &cfg).unwrap();
        let expect = std::f64::consts::LN_2 / (n as f64).ln();
        let v = est.value.mid_f64();
        assert!((v - expect).abs() < 1e-6, "n={n}: {v} vs ln2/ln n = {expect}");
        assert!(v < prev);
        prev = v;
    }
}
