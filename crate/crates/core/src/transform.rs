//! Exact images of interval unions under `x ↦ ⌈log₂ x⌉` and `x ↦ ⌈x^(p/q)⌉`.
//!
//! Both maps are nondecreasing and, for `p/q <= 1`, never skip an integer
//! between consecutive arguments, so the image of `[u, v]` is exactly the
//! integer interval between the images of its endpoints.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric;
use crate::set::{IntInterval, IntegerSet};

/// `⌈log₂ x⌉`, the bit length of `x - 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    assert!(!x.is_zero(), "ceil_log2 of zero");
    (x - 1u32).bits()
}

/// `⌈x^(p/q)⌉`: the smallest `y` with `y^q >= x^p`.
pub fn ceil_root(x: &BigUint, p: u32, q: u32) -> Result<BigUint> {
    check_exponent(p, q)?;
    Ok(numeric::ceil_root(x, p, q))
}

fn check_exponent(p: u32, q: u32) -> Result<()> {
    if p == 0 || q == 0 || p > q {
        return Err(Error::InvalidParameter(format!(
            "transform exponent {p}/{q} must lie in (0, 1]"
        )));
    }
    Ok(())
}

/// `log A = {⌈log₂ x⌉ : x ∈ A}` as a subset of ℕ.
///
/// The value 0 produced by `x = 1` is not a positive integer and is dropped;
/// see [`log_image_has_zero`].
pub fn log_image(set: &IntegerSet) -> IntegerSet {
    let raw = set
        .intervals()
        .iter()
        .filter_map(|iv| {
            let lo = ceil_log2(iv.lo()).max(1);
            let hi = ceil_log2(iv.hi());
            (hi >= lo).then(|| IntInterval::from_u64(lo, hi).expect("ordered"))
        })
        .collect();
    IntegerSet::normalize(raw)
}

/// Whether `1 ∈ A`, i.e. whether `log A` also contains 0.
pub fn log_image_has_zero(set: &IntegerSet) -> bool {
    set.member(&BigUint::one())
}

/// `A^(p/q) = {⌈x^(p/q)⌉ : x ∈ A}`.
pub fn power_image(set: &IntegerSet, p: u32, q: u32) -> Result<IntegerSet> {
    check_exponent(p, q)?;
    let raw = set
        .intervals()
        .iter()
        .map(|iv| {
            IntInterval::new(
                numeric::ceil_root(iv.lo(), p, q),
                numeric::ceil_root(iv.hi(), p, q),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegerSet::normalize(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn set(pairs: &[(u64, u64)]) -> IntegerSet {
        IntegerSet::from_u64_pairs(pairs).unwrap()
    }

    fn pairs(s: &IntegerSet) -> Vec<(u64, u64)> {
        s.to_u64_intervals().unwrap()
    }

    /// Independent oracle: smallest e with 2^e >= x, by repeated doubling.
    fn ceil_log2_oracle(x: u64) -> u64 {
        let mut e = 0;
        let mut p = 1u128;
        while p < x as u128 {
            p *= 2;
            e += 1;
        }
        e
    }

    /// Independent oracle: smallest y with y^q >= x^p, by linear search from a float guess.
    fn ceil_root_oracle(x: u64, p: u32, q: u32) -> u64 {
        let target = big(x).pow(p);
        let mut y = ((x as f64).powf(p as f64 / q as f64) as u64).saturating_sub(2);
        while big(y).pow(q) < target {
            y += 1;
        }
        y
    }

    #[test]
    fn ceil_log2_examples() {
        assert_eq!(ceil_log2(&big(1)), 0);
        assert_eq!(ceil_log2(&big(16)), 4);
        assert_eq!(ceil_log2(&big(17)), 5);
        assert_eq!(ceil_log2_oracle(17), 5);
    }

    #[test]
    fn ceil_root_examples() {
        assert_eq!(ceil_root(&big(10), 1, 2).unwrap(), big(4));
        assert_eq!(ceil_root(&big(16), 1, 2).unwrap(), big(4));
        // x = 2^10, p/q = 3/2 lies outside the transform range but the
        // underlying root is exact: 32768^2 = 2^30 = (2^10)^3.
        assert_eq!(numeric::ceil_root(&big(1 << 10), 3, 2), big(32768));
        assert!(ceil_root(&big(1 << 10), 3, 2).is_err());
        assert!(ceil_root(&big(5), 0, 2).is_err());
    }

    #[test]
    fn log_image_examples() {
        assert_eq!(pairs(&log_image(&set(&[(5, 16)]))), vec![(3, 4)]);
        // ⌈log₂ 1⌉ = 0 is reported separately
        assert!(log_image(&set(&[(1, 1)])).is_empty());
        assert!(log_image_has_zero(&set(&[(1, 1)])));
        for n in [3u64, 10, 40] {
            let block = set(&[((1 << n) + 1, 1 << (n + 1))]);
            assert_eq!(pairs(&log_image(&block)), vec![(n + 1, n + 1)]);
        }
    }

    #[test]
    fn power_image_examples() {
        assert_eq!(pairs(&power_image(&set(&[(101, 104)]), 1, 2).unwrap()), vec![(11, 11)]);
        assert_eq!(pairs(&power_image(&set(&[(77, 77)]), 1, 1).unwrap()), vec![(77, 77)]);
        assert_eq!(pairs(&power_image(&set(&[(4, 9)]), 1, 2).unwrap()), vec![(2, 3)]);
    }

    #[test]
    fn huge_interval_is_constant_time() {
        let lo = BigUint::one() << 4000usize;
        let hi = &lo << 5usize;
        let s = IntegerSet::from_pairs([(lo, hi)]).unwrap();
        let img = log_image(&s);
        assert_eq!(pairs(&img), vec![(4000, 4005)]);
        let img = power_image(&s, 1, 4).unwrap();
        assert_eq!(img.intervals().len(), 1);
    }

    fn raw_sets() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec((1u64..100_000, 0u64..3_000), 0..8)
            .prop_map(|v| v.into_iter().map(|(a, l)| (a, (a + l).min(100_000))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn images_match_enumeration(raw in raw_sets(), q in 1u32..5, p in 1u32..5) {
            prop_assume!(p <= q);
            let s = set(&raw);
            let members: Vec<u64> = s.iter_u64().collect();

            let expect: BTreeSet<u64> = members.iter().map(|&x| ceil_log2_oracle(x)).filter(|&e| e >= 1).collect();
            let got: BTreeSet<u64> = log_image(&s).iter_u64().collect();
            prop_assert_eq!(got, expect);

            let expect: BTreeSet<u64> = members.iter().map(|&x| ceil_root_oracle(x, p, q)).collect();
            let got: BTreeSet<u64> = power_image(&s, p, q).unwrap().iter_u64().collect();
            prop_assert_eq!(got, expect);
        }

        #[test]
        fn transforms_are_monotone(u in 1u64..u64::MAX / 2, d in 0u64..1_000_000, q in 1u32..7) {
            let (u, v) = (big(u), big(u + d));
            prop_assert!(ceil_log2(&u) <= ceil_log2(&v));
            prop_assert!(ceil_root(&u, 1, q).unwrap() <= ceil_root(&v, 1, q).unwrap());
        }
    }
}
