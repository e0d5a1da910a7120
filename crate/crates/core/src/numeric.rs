//! Certified real arithmetic on big integers.
//!
//! Real quantities are carried as fixed-point integers `F` meaning `F / 2^bits`
//! together with a one-unit error bar, so every bound produced here is exact
//! big-integer arithmetic followed by an explicit floor or ceiling. Nothing in
//! this module relies on the hardware rounding mode.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Working precision for fixed-point evaluation, with escalation by doubling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 128,
            cap_bits: 4096,
        }
    }
}

impl Precision {
    pub fn new(start_bits: u32, cap_bits: u32) -> Result<Self> {
        if start_bits == 0 || start_bits > cap_bits {
            return Err(Error::InvalidParameter(format!(
                "precision start {start_bits} must be positive and <= cap {cap_bits}"
            )));
        }
        Ok(Precision {
            start_bits,
            cap_bits,
        })
    }

    /// The escalation ladder `start, 2*start, ...` clamped to the cap.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap_bits;
        let mut next = Some(self.start_bits);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= cap {
                None
            } else {
                Some(cur.saturating_mul(2).min(cap))
            };
            Some(cur)
        })
    }
}

/// `floor(x^(num/den))`.
pub fn floor_root(x: &BigUint, num: u32, den: u32) -> BigUint {
    assert!(den > 0, "zero root index");
    x.pow(num).nth_root(den)
}

/// `ceil(x^(num/den))`: the smallest `y` with `y^den >= x^num`.
pub fn ceil_root(x: &BigUint, num: u32, den: u32) -> BigUint {
    assert!(den > 0, "zero root index");
    let target = x.pow(num);
    let y = target.nth_root(den);
    if y.pow(den) == target {
        y
    } else {
        y + 1u32
    }
}

/// Whether `x^(num/den)` is an integer.
pub fn is_integral_power(x: &BigUint, num: u32, den: u32) -> bool {
    let target = x.pow(num);
    target.nth_root(den).pow(den) == target
}

/// `floor(x^(num/den) * 2^bits)`; the true value lies in `[F, F+1) / 2^bits`.
pub fn root_fixed(x: &BigUint, num: u32, den: u32, bits: u32) -> BigUint {
    assert!(den > 0, "zero root index");
    let shifted = x.pow(num) << (bits as usize * den as usize);
    shifted.nth_root(den)
}

/// Largest integer `y` with `y^(p/q) <= base^(num/den) + add`.
///
/// When `base^(num/den)` is an integer the answer is computed exactly. Otherwise
/// `base^(num/den)` is irrational, `y^(p/q)` can never equal the right-hand side,
/// and refining a fixed-point enclosure of the right-hand side always separates
/// the candidates; the refinement gives up only at `precision.cap_bits`.
pub fn largest_with_power_le(
    base: &BigUint,
    (num, den): (u32, u32),
    add: &BigUint,
    (p, q): (u32, u32),
    precision: Precision,
) -> Result<BigUint> {
    let target = base.pow(num);
    let root = target.nth_root(den);
    if root.pow(den) == target {
        return Ok(floor_root(&(root + add), q, p));
    }
    for bits in precision.ladder() {
        let f = root_fixed(base, num, den, bits);
        let add_fixed = add << bits as usize;
        let t_lo = &f + &add_fixed;
        let t_hi = f + 1u32 + add_fixed;
        let shift = bits as usize * q as usize;
        let y_lo = (t_lo.pow(q) >> shift).nth_root(p);
        let y_hi = (t_hi.pow(q) >> shift).nth_root(p);
        if y_lo == y_hi {
            return Ok(y_lo);
        }
    }
    Err(Error::UndecidedComparison {
        cap_bits: precision.cap_bits,
    })
}

/// Lower and upper fixed-point bounds on `atanh(t)` for `0 <= t < 1/2`, with `t = tn / td`.
fn atanh_fixed(tn: &BigUint, td: &BigUint, bits: u32) -> (BigUint, BigUint) {
    let w = bits as usize;
    let scaled = tn << w;
    let (t_lo, rem) = scaled.div_rem(td);
    let t_hi = if rem.is_zero() { t_lo.clone() } else { &t_lo + 1u32 };

    // Lower bound: round every step down.
    let t2 = (&t_lo * &t_lo) >> w;
    let mut term = t_lo;
    let mut lo = BigUint::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        lo += &term / (2 * k + 1);
        term = (&term * &t2) >> w;
        k += 1;
    }

    // Upper bound: round every step up and add a geometric tail bound.
    let one = BigUint::one() << w;
    let t2_up = ceil_shift(&(&t_hi * &t_hi), w);
    let mut term = t_hi;
    let mut hi = BigUint::zero();
    let mut k = 0u32;
    let two = BigUint::from(2u32);
    while term > two {
        hi += ceil_div(&term, &BigUint::from(2 * k + 1));
        term = ceil_shift(&(&term * &t2_up), w);
        k += 1;
    }
    // Remaining terms are each at most `term * t^(2j)` and t^2 < 1/4.
    if !term.is_zero() {
        hi += term * 2u32 + 1u32;
    }
    debug_assert!(lo <= hi && hi < one);
    (lo, hi)
}

fn ceil_shift(x: &BigUint, w: usize) -> BigUint {
    let q = x >> w;
    if (&q << w) == *x {
        q
    } else {
        q + 1u32
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Fixed-point bounds `(lo, hi)` with `lo / 2^bits <= ln(v/u) <= hi / 2^bits`.
///
/// Requires `v >= u >= 1`.
pub fn ln_ratio_fixed(v: &BigUint, u: &BigUint, bits: u32) -> (BigUint, BigUint) {
    assert!(!u.is_zero() && v >= u, "ln_ratio_fixed needs v >= u >= 1");
    if v == u {
        return (BigUint::zero(), BigUint::zero());
    }
    // v / u = 2^e * m with m in [1, 2).
    let mut e = v.bits() - u.bits();
    if *v < (u << e as usize) {
        e -= 1;
    }
    let scaled_u = u << e as usize;
    let tn = v - &scaled_u;
    let td = v + &scaled_u;
    let (m_lo, m_hi) = atanh_fixed(&tn, &td, bits);
    let (l2_lo, l2_hi) = atanh_fixed(&BigUint::one(), &BigUint::from(3u32), bits);
    let lo = (l2_lo * e + m_lo) * 2u32;
    let hi = (l2_hi * e + m_hi) * 2u32;
    (lo, hi)
}

/// `F / 2^bits` as an exact rational.
pub fn fixed_to_ratio(f: BigInt, bits: u32) -> BigRational {
    BigRational::new(f, BigInt::one() << bits as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// Converts an exact rational to `f64`, rounding in the requested direction.
///
/// Magnitudes outside roughly `[2^-1000, 2^1000]` are clamped to values that
/// still bound the input from the requested side.
pub fn ratio_to_f64(x: &BigRational, dir: Round) -> f64 {
    let num = x.numer();
    let den = x.denom();
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    // Choose a shift so the quotient carries at least 64 significant bits.
    let shift = 64i64 + d.bits() as i64 - n.bits() as i64;
    let (nn, dd) = if shift >= 0 {
        (n << shift as usize, d.clone())
    } else {
        (n.clone(), d << (-shift) as usize)
    };
    let (q, r) = nn.div_rem(&dd);
    let drop = q.bits() as i64 - 53;
    let mut inexact = !r.is_zero();
    let mantissa = if drop > 0 {
        let m = &q >> drop as usize;
        if (&m << drop as usize) != q {
            inexact = true;
        }
        m
    } else {
        q.clone()
    };
    let drop = drop.max(0);
    let mut m = mantissa.to_u64().expect("mantissa fits in 64 bits");
    // Truncation moved the magnitude toward zero.
    let round_magnitude_up = matches!((dir, negative), (Round::Up, false) | (Round::Down, true));
    if inexact && round_magnitude_up {
        m += 1;
    }
    let exp = drop - shift;
    let magnitude = scale_pow2(m as f64, exp, round_magnitude_up);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// `m * 2^exp` for `m < 2^54`, clamping outside the comfortable exponent range.
fn scale_pow2(m: f64, exp: i64, away_from_zero: bool) -> f64 {
    if exp + 54 > 1000 {
        return if away_from_zero { f64::INFINITY } else { 2f64.powi(1000) };
    }
    if exp < -1000 {
        return if away_from_zero { 2f64.powi(-940) } else { 0.0 };
    }
    m * 2f64.powi(exp as i32)
}

pub fn f64_to_ratio(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Compensated (Kahan–Babuška–Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Rational `p / q` with `q > 0`, as a `BigRational`.
pub fn ratio(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn biguint_to_ratio(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}
