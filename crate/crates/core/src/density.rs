//! Certified partial sums and finite-horizon density estimates.
//!
//! The kernels enclose `Σ_{x ∈ A ∩ [a,b]} x^(r-1)` and `Σ 1/x`. A constituent
//! interval `[u, v]` shorter than the exact threshold is summed term by term with
//! compensated summation and a rigorous rounding-error bar. Longer intervals use
//! the integral sandwich for a decreasing integrand `f`:
//!
//! ```text
//! ∫_u^v f + f(v)  <=  Σ_{x=u}^{v} f(x)  <=  ∫_u^v f + f(u)
//! ```
//!
//! For `f(x) = x^(r-1)` with `r < 1` this is the right-sum/left-sum direction
//! (checked numerically: for u=10, v=1000, r=1/2 the left sum 57.0646 exceeds
//! the integral 56.9210, which exceeds the right sum 56.7800). The integrals
//! `(v^r - u^r)/r` and `ln(v/u)` are evaluated in fixed point with exact
//! big-integer roots, so the enclosures are sound for endpoints of any size.
//!
//! Every density value here is a finite-horizon quantity. Limits are never
//! claimed; Banach sups are lower bounds over a finite candidate list.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    f64_to_ratio, fixed_to_ratio, largest_with_power_le, ln_ratio_fixed, ratio_to_f64,
    root_fixed, NeumaierSum, Precision, Round,
};
use crate::set::IntegerSet;

/// Fractional bits used for fixed-point enclosure arithmetic.
pub const ENCLOSURE_BITS: u32 = 128;

/// Default length below which intervals are summed term by term.
pub const DEFAULT_EXACT_THRESHOLD: u64 = 1_000_000;

/// Largest endpoint bit length for which the floating-point path is used.
const FLOAT_PATH_MAX_BITS: u64 = 1000;

/// A closed real interval certified to contain a true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn exact(x: BigRational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::exact(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Containment test for a floating-point value, compared exactly.
    pub fn contains_f64(&self, x: f64) -> bool {
        x.is_finite() && self.contains(&f64_to_ratio(x))
    }

    /// Lower end rounded down to `f64`.
    pub fn lo_f64(&self) -> f64 {
        ratio_to_f64(&self.lo, Round::Down)
    }

    /// Upper end rounded up to `f64`.
    pub fn hi_f64(&self) -> f64 {
        ratio_to_f64(&self.hi, Round::Up)
    }

    pub fn width_f64(&self) -> f64 {
        ratio_to_f64(&self.width(), Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigInt::from(2);
        ratio_to_f64(&mid, Round::Down)
    }

    /// Product with a second enclosure; both must be non-negative.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        debug_assert!(self.lo >= BigRational::zero() && other.lo >= BigRational::zero());
        Enclosure {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Enclosure {
        Enclosure {
            lo: &self.lo * factor,
            hi: &self.hi * factor,
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

/// A rational exponent `r = num/den` with `0 < r <= 1`, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RExponent {
    num: u32,
    den: u32,
}

impl RExponent {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "exponent {num}/{den} must lie in (0, 1]"
            )));
        }
        let g = num.gcd(&den);
        Ok(RExponent {
            num: num / g,
            den: den / g,
        })
    }

    pub const fn one() -> Self {
        RExponent { num: 1, den: 1 }
    }

    /// `1/m`.
    pub fn reciprocal(m: u32) -> Result<Self> {
        Self::new(1, m)
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for RExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl PartialOrd for RExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse exponent {s:?}"));
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = n.parse().map_err(|_| bad())?;
        let d = d.parse().map_err(|_| bad())?;
        RExponent::new(n, d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// `[k, (k^r + n)^(1/r)]`
    RWindow,
    /// `[k, n k]`
    LogWindow,
    /// `[1, n]`
    Prefix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub k: BigUint,
    pub n: BigUint,
    pub kind: WindowKind,
}

impl WindowSpec {
    pub fn r_window(k: BigUint, n: BigUint) -> Self {
        WindowSpec {
            k,
            n,
            kind: WindowKind::RWindow,
        }
    }

    pub fn log_window(k: BigUint, n: BigUint) -> Self {
        WindowSpec {
            k,
            n,
            kind: WindowKind::LogWindow,
        }
    }

    pub fn prefix(n: BigUint) -> Self {
        WindowSpec {
            k: BigUint::one(),
            n,
            kind: WindowKind::Prefix,
        }
    }
}

/// A density functional evaluated on one window.
///
/// `value.hi` can exceed 1 at finite scale: an r-window of scale `n` holds
/// slightly more mass than `n/r` (e.g. `n + 1` integers when `r = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityEstimate {
    pub value: Enclosure,
    pub window: WindowSpec,
    /// Last integer of the summation window.
    pub window_end: BigUint,
    pub exponent: Option<RExponent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityConfig {
    pub exact_threshold: u64,
    pub precision: Precision,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            precision: Precision::default(),
        }
    }
}

#[derive(Clone, Copy)]
enum Summand {
    Power(RExponent),
    Reciprocal,
}

/// Accumulates fixed-point analytic pieces, exact counts, and one compensated
/// floating-point sum for the short intervals.
struct SumAccumulator {
    fixed_lo: BigUint,
    fixed_hi: BigUint,
    float_sum: NeumaierSum,
    float_terms: u64,
    float_max_ln: f64,
}

impl SumAccumulator {
    fn new() -> Self {
        SumAccumulator {
            fixed_lo: BigUint::zero(),
            fixed_hi: BigUint::zero(),
            float_sum: NeumaierSum::default(),
            float_terms: 0,
            float_max_ln: 0.0,
        }
    }

    fn add_interval(&mut self, u: &BigUint, v: &BigUint, summand: Summand, exact_threshold: u64) {
        let w = ENCLOSURE_BITS as usize;
        if let Summand::Power(r) = summand {
            if r.is_one() {
                let count = (v - u + 1u32) << w;
                self.fixed_lo += &count;
                self.fixed_hi += count;
                return;
            }
        }
        let short = (v - u)
            .to_u64()
            .is_some_and(|len| len < exact_threshold);
        if short && v.bits() <= FLOAT_PATH_MAX_BITS {
            self.add_terms(u, v, summand);
        } else {
            let (lo, hi) = match summand {
                Summand::Power(r) => power_sum_sandwich(u, v, r),
                Summand::Reciprocal => reciprocal_sum_sandwich(u, v),
            };
            self.fixed_lo += lo;
            self.fixed_hi += hi;
        }
    }

    fn add_terms(&mut self, u: &BigUint, v: &BigUint, summand: Summand) {
        let term: Box<dyn Fn(f64) -> f64> = match summand {
            Summand::Reciprocal => Box::new(|x: f64| 1.0 / x),
            Summand::Power(r) if r.num == 1 && r.den == 2 => Box::new(|x: f64| 1.0 / x.sqrt()),
            Summand::Power(r) => {
                let e = (r.num as f64 - r.den as f64) / r.den as f64;
                Box::new(move |x: f64| x.powf(e))
            }
        };
        match (u.to_u64(), v.to_u64()) {
            (Some(a), Some(b)) => {
                for x in a..=b {
                    self.float_sum.add(term(x as f64));
                }
                self.float_terms += b - a + 1;
                self.float_max_ln = self.float_max_ln.max((b as f64).ln());
            }
            _ => {
                let mut x = u.clone();
                while &x <= v {
                    self.float_sum.add(term(x.to_f64().expect("float path bound")));
                    x += 1u32;
                    self.float_terms += 1;
                }
                self.float_max_ln = self
                    .float_max_ln
                    .max(v.to_f64().expect("float path bound").ln());
            }
        }
    }

    fn finish(self) -> Enclosure {
        let mut lo = fixed_to_ratio(BigInt::from(self.fixed_lo), ENCLOSURE_BITS);
        let mut hi = fixed_to_ratio(BigInt::from(self.fixed_hi), ENCLOSURE_BITS);
        if self.float_terms > 0 {
            let s = self.float_sum.value();
            // Per-term error: argument conversion, exponent rounding, and the
            // library call, all within (4 + ln x) units of 2^-52 relative.
            // Summation error of the compensated sum of positive terms.
            let eps = f64::EPSILON;
            let n = self.float_terms as f64;
            let rel = eps * (4.0 + self.float_max_ln) + 2.0 * eps + n * eps * eps;
            let err = s * rel * 1.01;
            let s = f64_to_ratio(s);
            let err = f64_to_ratio(err);
            let flo = &s - &err;
            lo += if flo < BigRational::zero() {
                BigRational::zero()
            } else {
                flo
            };
            hi += s + err;
        }
        Enclosure { lo, hi }
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Fixed-point sandwich for `Σ_{x=u}^{v} x^(r-1)`, `r < 1`.
fn power_sum_sandwich(u: &BigUint, v: &BigUint, r: RExponent) -> (BigUint, BigUint) {
    let bits = ENCLOSURE_BITS;
    let fu = BigInt::from(root_fixed(u, r.num, r.den, bits));
    let fv = BigInt::from(root_fixed(v, r.num, r.den, bits));
    let num = BigInt::from(r.num);
    let den = BigInt::from(r.den);
    let one = BigInt::one();
    // (v^r - u^r)/r with v^r in [fv, fv+1) and u^r in [fu, fu+1).
    let integral_lo = floor_div(&((&fv - &fu - &one) * &den), &num).max(BigInt::zero());
    let integral_hi = ceil_div(&((&fv + &one - &fu) * &den), &num);
    // v^(r-1) = v^r / v and u^(r-1) = u^r / u.
    let ui = BigInt::from(u.clone());
    let vi = BigInt::from(v.clone());
    let tail_lo = floor_div(&fv, &vi);
    let tail_hi = ceil_div(&(&fu + &one), &ui);
    let lo = (integral_lo + tail_lo).to_biguint().expect("non-negative");
    let hi = (integral_hi + tail_hi).to_biguint().expect("non-negative");
    (lo, hi)
}

/// Fixed-point sandwich for `Σ_{x=u}^{v} 1/x`.
fn reciprocal_sum_sandwich(u: &BigUint, v: &BigUint) -> (BigUint, BigUint) {
    let bits = ENCLOSURE_BITS;
    let (ln_lo, ln_hi) = ln_ratio_fixed(v, u, bits);
    let one = BigUint::one() << bits as usize;
    let tail_lo = &one / v;
    let (q, r) = one.div_rem(u);
    let tail_hi = if r.is_zero() { q } else { q + 1u32 };
    (ln_lo + tail_lo, ln_hi + tail_hi)
}

fn check_window(a: &BigUint, b: &BigUint) -> Result<()> {
    if a > b {
        return Err(Error::InvalidWindow {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(())
}

fn partial_sum(
    set: &IntegerSet,
    a: &BigUint,
    b: &BigUint,
    summand: Summand,
    exact_threshold: u64,
) -> Result<Enclosure> {
    check_window(a, b)?;
    let window = set.intersect_window(a, b)?;
    let mut acc = SumAccumulator::new();
    for iv in window.intervals() {
        acc.add_interval(iv.lo(), iv.hi(), summand, exact_threshold);
    }
    Ok(acc.finish())
}

/// Encloses `Σ_{x ∈ A ∩ [a,b]} x^(r-1)`.
pub fn partial_sum_r(
    set: &IntegerSet,
    a: &BigUint,
    b: &BigUint,
    r: RExponent,
    exact_threshold: u64,
) -> Result<Enclosure> {
    partial_sum(set, a, b, Summand::Power(r), exact_threshold)
}

/// Encloses `Σ_{x ∈ A ∩ [a,b]} 1/x`.
pub fn partial_sum_log(
    set: &IntegerSet,
    a: &BigUint,
    b: &BigUint,
    exact_threshold: u64,
) -> Result<Enclosure> {
    partial_sum(set, a, b, Summand::Reciprocal, exact_threshold)
}

/// Enclosure of `r / n^r`.
fn r_over_n_pow_r(n: &BigUint, r: RExponent) -> Enclosure {
    if r.is_one() {
        return Enclosure::exact(BigRational::new(BigInt::one(), BigInt::from(n.clone())));
    }
    let bits = ENCLOSURE_BITS;
    let f = BigInt::from(root_fixed(n, r.num, r.den, bits));
    let scaled_num = BigInt::from(r.num) << bits as usize;
    let den = BigInt::from(r.den);
    Enclosure {
        lo: BigRational::new(scaled_num.clone(), &den * (&f + 1)),
        hi: BigRational::new(scaled_num, den * f),
    }
}

/// Enclosure of `1 / ln n`, `n >= 2`.
fn inv_ln(n: &BigUint) -> Enclosure {
    let bits = ENCLOSURE_BITS;
    let (lo, hi) = ln_ratio_fixed(n, &BigUint::one(), bits);
    let one = BigInt::one() << bits as usize;
    Enclosure {
        lo: BigRational::new(one.clone(), BigInt::from(hi)),
        hi: BigRational::new(one, BigInt::from(lo)),
    }
}

fn require_positive(n: &BigUint, what: &str) -> Result<()> {
    if n.is_zero() {
        return Err(Error::InvalidParameter(format!("{what} must be positive")));
    }
    Ok(())
}

fn require_log_scale(n: &BigUint) -> Result<()> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidParameter(
            "logarithmic scale n must be at least 2".into(),
        ));
    }
    Ok(())
}

/// `(r/n^r) Σ_{x ∈ A ∩ [1,n]} x^(r-1)`.
pub fn r_density_at(
    set: &IntegerSet,
    n: &BigUint,
    r: RExponent,
    cfg: &DensityConfig,
) -> Result<DensityEstimate> {
    require_positive(n, "horizon")?;
    let sum = partial_sum_r(set, &BigUint::one(), n, r, cfg.exact_threshold)?;
    Ok(DensityEstimate {
        value: sum.mul_nonneg(&r_over_n_pow_r(n, r)),
        window: WindowSpec::prefix(n.clone()),
        window_end: n.clone(),
        exponent: Some(r),
    })
}

/// `(1/ln n) Σ_{x ∈ A ∩ [1,n]} 1/x`.
pub fn log_density_at(
    set: &IntegerSet,
    n: &BigUint,
    cfg: &DensityConfig,
) -> Result<DensityEstimate> {
    require_log_scale(n)?;
    let sum = partial_sum_log(set, &BigUint::one(), n, cfg.exact_threshold)?;
    Ok(DensityEstimate {
        value: sum.mul_nonneg(&inv_ln(n)),
        window: WindowSpec::prefix(n.clone()),
        window_end: n.clone(),
        exponent: None,
    })
}

/// Largest integer not exceeding `(k^r + n)^(1/r)`.
pub fn r_window_end(
    k: &BigUint,
    n: &BigUint,
    r: RExponent,
    precision: Precision,
) -> Result<BigUint> {
    largest_with_power_le(k, (r.num, r.den), n, (r.num, r.den), precision)
}

/// `(r/n) Σ_{x ∈ A ∩ [k, (k^r+n)^(1/r)]} x^(r-1)`.
pub fn banach_r_window_value(
    set: &IntegerSet,
    w: &WindowSpec,
    r: RExponent,
    cfg: &DensityConfig,
) -> Result<DensityEstimate> {
    if w.kind != WindowKind::RWindow {
        return Err(Error::InvalidParameter("expected an r-window".into()));
    }
    require_positive(&w.k, "window start")?;
    require_positive(&w.n, "window scale")?;
    let end = r_window_end(&w.k, &w.n, r, cfg.precision)?;
    let sum = partial_sum_r(set, &w.k, &end, r, cfg.exact_threshold)?;
    let factor = BigRational::new(
        BigInt::from(r.num),
        BigInt::from(r.den) * BigInt::from(w.n.clone()),
    );
    Ok(DensityEstimate {
        value: sum.scale(&factor),
        window: w.clone(),
        window_end: end,
        exponent: Some(r),
    })
}

/// `L_{k,n}(A) = (1/ln n) Σ_{x ∈ A ∩ [k, nk]} 1/x`.
pub fn lbd_window_value(
    set: &IntegerSet,
    w: &WindowSpec,
    cfg: &DensityConfig,
) -> Result<DensityEstimate> {
    if w.kind != WindowKind::LogWindow {
        return Err(Error::InvalidParameter("expected a log-window".into()));
    }
    require_positive(&w.k, "window start")?;
    require_log_scale(&w.n)?;
    let end = &w.k * &w.n;
    let sum = partial_sum_log(set, &w.k, &end, cfg.exact_threshold)?;
    Ok(DensityEstimate {
        value: sum.mul_nonneg(&inv_ln(&w.n)),
        window: w.clone(),
        window_end: end,
        exponent: None,
    })
}

/// `{1}` together with the left endpoint of every interval of the set.
pub fn default_candidates(set: &IntegerSet) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    out.extend(set.intervals().iter().map(|iv| iv.lo().clone()));
    out.sort();
    out.dedup();
    out
}

/// Best window value over the candidate starting points.
///
/// Windows are r-windows when `r` is given and log-windows otherwise. The
/// result is a lower bound on the sup over all `k` at scale `n`. Windows are
/// ranked by certified lower end, then upper end; ties go to the smaller `k`.
pub fn banach_sup_estimate(
    set: &IntegerSet,
    n: &BigUint,
    r: Option<RExponent>,
    candidates: &[BigUint],
    cfg: &DensityConfig,
) -> Result<(DensityEstimate, BigUint)> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("candidate list is empty".into()));
    }
    let mut best: Option<DensityEstimate> = None;
    for k in candidates {
        let est = match r {
            Some(r) => banach_r_window_value(set, &WindowSpec::r_window(k.clone(), n.clone()), r, cfg)?,
            None => lbd_window_value(set, &WindowSpec::log_window(k.clone(), n.clone()), cfg)?,
        };
        let better = match &best {
            None => true,
            Some(b) => match est.value.lo().cmp(b.value.lo()) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match est.value.hi().cmp(b.value.hi()) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => est.window.k < b.window.k,
                },
            },
        };
        if better {
            best = Some(est);
        }
    }
    let best = best.expect("nonempty candidates");
    let k = best.window.k.clone();
    Ok((best, k))
}

/// Geometric horizon grid: `start, start*ratio, ...` while `<= limit`, with
/// `limit` appended as the final horizon. Consecutive horizons always grow.
pub fn horizon_grid(start: &BigUint, ratio: f64, limit: &BigUint) -> Result<Vec<BigUint>> {
    if ratio.partial_cmp(&1.0) != Some(Ordering::Greater) || !ratio.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "horizon ratio {ratio} must exceed 1"
        )));
    }
    require_positive(start, "horizon start")?;
    let ratio_q = f64_to_ratio(ratio);
    let mut out = Vec::new();
    let mut h = start.clone();
    while &h < limit {
        out.push(h.clone());
        let next = (BigRational::from_integer(BigInt::from(h.clone())) * &ratio_q)
            .floor()
            .to_integer()
            .to_biguint()
            .expect("positive");
        h = next.max(&h + 1u32);
    }
    out.push(limit.clone());
    Ok(out)
}
