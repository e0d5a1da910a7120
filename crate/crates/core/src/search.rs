//! Approximation predicates, progression search and certificates.
//!
//! `g` is a `(c, r)`-approximation of `x` when `x <= g < x + c·x^r`. Every
//! comparison here is decided in exact integer arithmetic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::UnitFraction;
use crate::numeric;
use crate::set::IntegerSet;
use crate::transform;

pub const DEFAULT_ELEMENT_CAP: u64 = 10_000_000;
pub const DEFAULT_PAIR_BUDGET: u64 = 100_000_000;

/// Decimal places kept (rounded down) when a certificate prints `x + c·x^r`.
const BOUND_DIGITS: u32 = 6;

/// Approximation parameters `c > 0` and `r = p/q >= 0`.
///
/// `r = 0` is accepted: it is what the power lift degenerates to at `m = 1`,
/// and with `c = 1` it expresses exact membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxParams {
    c: BigRational,
    p: u32,
    q: u32,
}

impl ApproxParams {
    pub fn new(c: BigRational, p: u32, q: u32) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidParameter(format!("approximation constant c = {c} must be positive")));
        }
        if q == 0 {
            return Err(Error::InvalidParameter("approximation exponent has zero denominator".into()));
        }
        let g = p.gcd(&q);
        let (p, q) = if p == 0 { (0, 1) } else { (p / g, q / g) };
        Ok(ApproxParams { c, p, q })
    }

    /// `(c, 1)`.
    pub fn linear(c: BigRational) -> Result<Self> {
        Self::new(c, 1, 1)
    }

    /// `(1, 0)`: `g` approximates `x` only when `g = x`.
    pub fn exact() -> Self {
        Self::new(BigRational::one(), 0, 1).expect("valid")
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }

    pub fn r(&self) -> (u32, u32) {
        (self.p, self.q)
    }

    fn c_parts(&self) -> (BigUint, BigUint) {
        (
            self.c.numer().to_biguint().expect("positive"),
            self.c.denom().to_biguint().expect("positive"),
        )
    }
}

impl fmt::Display for ApproxParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}/{})", self.c, self.p, self.q)
    }
}

/// `x <= g < x + c·x^(p/q)`, decided as `((g - x)·c_den)^q < c_num^q · x^p`.
pub fn is_approx(g: &BigUint, x: &BigUint, params: &ApproxParams) -> bool {
    if x > g {
        return false;
    }
    let (cn, cd) = params.c_parts();
    let lhs = ((g - x) * cd).pow(params.q);
    let rhs = cn.pow(params.q) * x.pow(params.p);
    lhs < rhs
}

/// Some member of `set` that `g` approximates.
///
/// Only the predecessor of `g` needs testing: `x + c·x^r` increases with `x`,
/// so if the largest member `<= g` fails, every smaller one fails too.
pub fn approx_witness(g: &BigUint, set: &IntegerSet, params: &ApproxParams) -> Option<BigUint> {
    let x = set.predecessor(g)?;
    is_approx(g, &x, params).then_some(x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APResult {
    pub a: BigUint,
    pub d: BigUint,
    pub l: u32,
}

impl APResult {
    pub fn terms(&self) -> impl Iterator<Item = BigUint> + '_ {
        (0..self.l).map(|n| &self.a + &self.d * n)
    }
}

fn check_length(l: u32) -> Result<()> {
    if l < 3 {
        return Err(Error::InvalidParameter(format!("progression length {l} must be at least 3")));
    }
    Ok(())
}

fn check_cap(set: &IntegerSet, cap: u64) -> Result<()> {
    let count = set.count();
    if count > BigUint::from(cap) {
        return Err(Error::ElementCapExceeded {
            count: count.to_string(),
            cap,
        });
    }
    Ok(())
}

/// Lexicographically least `(a, d)` with `a > min_a`, `d > min_d` and
/// `a, a+d, ..., a+(l-1)d` all in `set`.
pub fn find_ap(
    set: &IntegerSet,
    l: u32,
    min_a: &BigUint,
    min_d: &BigUint,
    element_cap: u64,
) -> Result<Option<APResult>> {
    check_length(l)?;
    check_cap(set, element_cap)?;
    let Some(max) = set.max() else {
        return Ok(None);
    };
    let span = l - 1;
    let d_start = min_d + 1u32;
    let a_start = min_a + 1u32;
    for iv in set.intervals() {
        if iv.hi() < &a_start {
            continue;
        }
        let mut a = iv.lo().max(&a_start).clone();
        while &a <= iv.hi() {
            if &a + &d_start * span > *max {
                return Ok(None);
            }
            let d_end = (max - &a) / span;
            let mut d = d_start.clone();
            while d <= d_end {
                if (1..l).all(|n| set.member(&(&a + &d * n))) {
                    return Ok(Some(APResult { a, d, l }));
                }
                d += 1u32;
            }
            a += 1u32;
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProgressionKind {
    /// Terms `2^(a + n·d)`.
    Geometric,
    /// Terms `(a + n·d)^m`.
    Power,
    /// Terms `a·d^n`, `n = 0, 1, 2`.
    GeometricTriple,
}

impl ProgressionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProgressionKind::Geometric => "geometric",
            ProgressionKind::Power => "power",
            ProgressionKind::GeometricTriple => "geometric-triple",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedTerm {
    pub g: BigUint,
    pub x: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionCertificate {
    pub kind: ProgressionKind,
    pub a: BigUint,
    pub d: BigUint,
    pub l: u32,
    pub m: Option<u32>,
    pub eps: Option<BigRational>,
    pub params: ApproxParams,
    pub terms: Vec<CertifiedTerm>,
}

impl ProgressionCertificate {
    fn build(
        kind: ProgressionKind,
        ap: &APResult,
        m: Option<u32>,
        eps: Option<BigRational>,
        params: ApproxParams,
        set: &IntegerSet,
    ) -> Result<Self> {
        let mut cert = ProgressionCertificate {
            kind,
            a: ap.a.clone(),
            d: ap.d.clone(),
            l: ap.l,
            m,
            eps,
            params,
            terms: Vec::with_capacity(ap.l as usize),
        };
        for g in cert.expected_terms()? {
            let x = approx_witness(&g, set, &cert.params).ok_or_else(|| Error::CertificationFailed {
                term: g.to_string(),
                reason: format!("no member of the set is approximated with parameters {}", cert.params),
            })?;
            cert.terms.push(CertifiedTerm { g, x });
        }
        Ok(cert)
    }

    /// The progression terms implied by `kind`, `a`, `d`, `l` and `m`.
    pub fn expected_terms(&self) -> Result<Vec<BigUint>> {
        let too_big = || Error::InvalidParameter("exponent does not fit in 64 bits".into());
        (0..self.l)
            .map(|n| match self.kind {
                ProgressionKind::Geometric => {
                    let e = (&self.a + &self.d * n).to_u64().ok_or_else(too_big)?;
                    Ok(BigUint::one() << e)
                }
                ProgressionKind::Power => {
                    let m = self.m.ok_or_else(|| Error::InvalidParameter("power certificate without m".into()))?;
                    Ok((&self.a + &self.d * n).pow(m))
                }
                ProgressionKind::GeometricTriple => Ok(&self.a * self.d.pow(n)),
            })
            .collect()
    }

    /// Re-checks the certificate against `set` from scratch.
    ///
    /// The approximation inequality is tested through an integer root rather
    /// than the power comparison used by [`is_approx`]:
    /// `(g - x)·c_den < ⌈(c_num^q · x^p)^(1/q)⌉` is equivalent to it.
    pub fn validate(&self, set: &IntegerSet) -> Result<()> {
        let expected = self.expected_terms()?;
        if expected.len() != self.terms.len() {
            return Err(Error::CertificationFailed {
                term: "-".into(),
                reason: format!("expected {} terms, found {}", expected.len(), self.terms.len()),
            });
        }
        let (cn, cd) = self.params.c_parts();
        let (p, q) = self.params.r();
        for (want, term) in expected.iter().zip(&self.terms) {
            let fail = |reason: String| Error::CertificationFailed {
                term: term.g.to_string(),
                reason,
            };
            if want != &term.g {
                return Err(fail(format!("term should be {want}")));
            }
            if !set.member(&term.x) {
                return Err(fail(format!("witness {} is not in the set", term.x)));
            }
            if term.x > term.g {
                return Err(fail(format!("witness {} exceeds the term", term.x)));
            }
            let reach = numeric::ceil_root(&(cn.pow(q) * term.x.pow(p)), 1, q);
            if (&term.g - &term.x) * &cd >= reach {
                return Err(fail(format!("term is not below {} + c·x^r", term.x)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), json!(self.kind.name()));
        obj.insert("a".into(), json!(self.a.to_string()));
        obj.insert("d".into(), json!(self.d.to_string()));
        obj.insert("l".into(), json!(self.l));
        if let Some(m) = self.m {
            obj.insert("m".into(), json!(m));
        }
        if let Some(eps) = &self.eps {
            obj.insert("eps".into(), json!(eps.to_string()));
        }
        let (p, q) = self.params.r();
        obj.insert("c".into(), json!(self.params.c().to_string()));
        obj.insert("r".into(), json!(format!("{p}/{q}")));
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                json!({
                    "g": t.g.to_string(),
                    "x": t.x.to_string(),
                    "bound": approx_bound_decimal(&t.x, &self.params),
                })
            })
            .collect();
        obj.insert("terms".into(), Value::Array(terms));
        Value::Object(obj)
    }
}

/// `x + c·x^r` rounded down to [`BOUND_DIGITS`] decimal places.
pub fn approx_bound_decimal(x: &BigUint, params: &ApproxParams) -> String {
    let (cn, cd) = params.c_parts();
    let (p, q) = params.r();
    let scale = BigUint::from(10u32).pow(BOUND_DIGITS);
    // ⌊c·x^(p/q)·10^k⌋ = ⌊⌊(c·10^k)^q · x^p⌋^(1/q)⌋
    let inner = (&cn * &scale).pow(q) * x.pow(p) / cd.pow(q);
    let scaled = x * &scale + inner.nth_root(q);
    let (int, frac) = scaled.div_rem(&scale);
    format!("{int}.{:0>width$}", frac.to_string(), width = BOUND_DIGITS as usize)
}

/// Geometric progression `{2^(a+nd)}` of `(1,1)`-approximations of members of
/// `set`, found as an arithmetic progression in `log_image(set)`.
pub fn find_geometric(
    set: &IntegerSet,
    l: u32,
    min_a: &BigUint,
    min_d: &BigUint,
    element_cap: u64,
) -> Result<Option<ProgressionCertificate>> {
    let logs = transform::log_image(set);
    let Some(ap) = find_ap(&logs, l, min_a, min_d, element_cap)? else {
        return Ok(None);
    };
    let params = ApproxParams::linear(BigRational::one())?;
    ProgressionCertificate::build(ProgressionKind::Geometric, &ap, None, None, params, set).map(Some)
}

/// Smallest `a >= 1` with `ε·z^(m-1) > Σ_{i=0}^{m-2} C(m,i)·z^i` at `z = a - 1`.
///
/// Dividing by `z^(m-1)` shows the condition is monotone in `z`, so it then
/// holds for every real `z >= a - 1`.
pub fn power_largeness_threshold(m: u32, eps: &BigRational) -> Result<BigUint> {
    if m == 0 || !eps.is_positive() {
        return Err(Error::InvalidParameter("need m >= 1 and eps > 0".into()));
    }
    if m == 1 {
        return Ok(BigUint::one());
    }
    let en = eps.numer().to_biguint().expect("positive");
    let ed = eps.denom().to_biguint().expect("positive");
    let binom: Vec<BigUint> = (0..=m - 2).map(|i| binomial(m, i)).collect();
    let holds = |z: &BigUint| {
        let sum: BigUint = binom.iter().enumerate().map(|(i, c)| c * z.pow(i as u32)).sum();
        &en * z.pow(m - 1) > &ed * sum
    };
    let mut hi = BigUint::one();
    while !holds(&hi) {
        hi <<= 1usize;
    }
    // smallest z in (hi/2, hi] that holds; z = 0 never does
    let mut lo = &hi >> 1usize;
    while &lo + 1u32 < hi {
        let mid = (&lo + &hi) >> 1usize;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi + 1u32)
}

fn binomial(n: u32, k: u32) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `{(a+nd)^m}` as an `(m+ε, (m-1)/m)`-approximate subset of `set`, found as
/// an arithmetic progression in `power_image(set, 1, m)` with `a` large enough
/// for the approximation to be guaranteed.
pub fn find_power_ap(
    set: &IntegerSet,
    l: u32,
    m: u32,
    eps: &BigRational,
    min_a: &BigUint,
    min_d: &BigUint,
    element_cap: u64,
) -> Result<Option<ProgressionCertificate>> {
    let threshold = power_largeness_threshold(m, eps)?;
    let roots = transform::power_image(set, 1, m)?;
    let min_a = min_a.max(&(threshold - 1u32)).clone();
    let Some(ap) = find_ap(&roots, l, &min_a, min_d, element_cap)? else {
        return Ok(None);
    };
    let c = BigRational::from_integer(BigInt::from(m)) + eps;
    let params = ApproxParams::new(c, m - 1, m)?;
    ProgressionCertificate::build(ProgressionKind::Power, &ap, Some(m), Some(eps.clone()), params, set).map(Some)
}

/// Least `(a, ratio)` with `a > min_a`, `ratio > min_ratio`, `a·ratio² <= bound`
/// such that `a`, `a·ratio`, `a·ratio²` each approximate a member of `set`.
///
/// Absence only covers the searched range.
pub fn find_3term_geometric(
    set: &IntegerSet,
    params: &ApproxParams,
    min_a: &BigUint,
    min_ratio: &BigUint,
    bound: &BigUint,
    pair_budget: u64,
) -> Result<Option<ProgressionCertificate>> {
    let first_ratio = min_ratio + 1u32;
    let first_sq = &first_ratio * &first_ratio;
    let mut pairs = 0u64;
    let mut a = min_a + 1u32;
    while &a * &first_sq <= *bound {
        if approx_witness(&a, set, params).is_some() {
            let mut ratio = first_ratio.clone();
            loop {
                let g1 = &a * &ratio;
                let g2 = &g1 * &ratio;
                if &g2 > bound {
                    break;
                }
                pairs += 1;
                if pairs > pair_budget {
                    return Err(Error::SearchSpaceExceeded { budget: pair_budget });
                }
                if approx_witness(&g1, set, params).is_some() && approx_witness(&g2, set, params).is_some() {
                    let ap = APResult { a, d: ratio, l: 3 };
                    let cert = ProgressionCertificate::build(
                        ProgressionKind::GeometricTriple,
                        &ap,
                        None,
                        None,
                        params.clone(),
                        set,
                    )?;
                    return Ok(Some(cert));
                }
                ratio += 1u32;
            }
        }
        a += 1u32;
    }
    Ok(None)
}

/// [`find_3term_geometric`] with parameters `(c, 1)` and both thresholds equal to `min_param`.
pub fn find_3term_geometric_approx(
    set: &IntegerSet,
    c: &BigRational,
    min_param: &BigUint,
    bound: &BigUint,
    pair_budget: u64,
) -> Result<Option<ProgressionCertificate>> {
    let params = ApproxParams::linear(c.clone())?;
    find_3term_geometric(set, &params, min_param, min_param, bound, pair_budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyStatus {
    Pass,
    Fail,
}

impl VerifyStatus {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyStatus::Pass => "PASS",
            VerifyStatus::Fail => "FAIL",
        }
    }
}

/// A power `g` (`2^k` or `a^m`) that approximates the member `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Name of the enumerated index, `"k"` or `"a"`.
    pub index_name: &'static str,
    pub index: BigUint,
    pub g: BigUint,
    pub x: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub status: VerifyStatus,
    pub violation: Option<Violation>,
    /// Number of powers whose predecessor was tested.
    pub checked: u64,
    pub bound: BigUint,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.status == VerifyStatus::Pass
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("status".into(), json!(self.status.name()));
        if let Some(v) = &self.violation {
            obj.insert(
                "violation".into(),
                json!({ v.index_name: v.index.to_string(), "g": v.g.to_string(), "x": v.x.to_string() }),
            );
        }
        obj.insert("checked".into(), json!(self.checked));
        obj.insert("bound".into(), json!(self.bound.to_string()));
        Value::Object(obj)
    }
}

/// Scans powers `g = index^m` or `2^index` up to `bound`.
///
/// If some power violates with witness `x` in the block `[u, v]`, then so does
/// the smallest power `>= u` (its predecessor is still `x`, or a larger member
/// of the same block, and it is closer). So only the first power at or after
/// each block's lower end needs testing, and the first violation found is the
/// first violation overall.
fn scan_powers(
    set: &IntegerSet,
    bound: &BigUint,
    params: &ApproxParams,
    index_name: &'static str,
    first_index_at_least: impl Fn(&BigUint) -> BigUint,
    power: impl Fn(&BigUint) -> BigUint,
) -> VerifyReport {
    let mut checked = 0;
    let mut last: Option<BigUint> = None;
    for iv in set.intervals() {
        let index = first_index_at_least(iv.lo());
        if last.as_ref() == Some(&index) {
            continue;
        }
        let g = power(&index);
        if &g > bound {
            break;
        }
        checked += 1;
        if let Some(x) = approx_witness(&g, set, params) {
            return VerifyReport {
                status: VerifyStatus::Fail,
                violation: Some(Violation { index_name, index, g, x }),
                checked,
                bound: bound.clone(),
            };
        }
        last = Some(index);
    }
    VerifyReport {
        status: VerifyStatus::Pass,
        violation: None,
        checked,
        bound: bound.clone(),
    }
}

fn check_eps(eps: &BigRational, upper: u32) -> Result<()> {
    if !eps.is_positive() || eps >= &BigRational::from_integer(BigInt::from(upper)) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, {upper})")));
    }
    Ok(())
}

/// Checks that no `2^k <= bound` (`k >= 1`) is a `(1-ε, 1)`-approximation of a member of `set`.
pub fn verify_no_pow2_approx(set: &IntegerSet, eps: &BigRational, bound: &BigUint) -> Result<VerifyReport> {
    check_eps(eps, 1)?;
    let params = ApproxParams::linear(BigRational::one() - eps)?;
    Ok(scan_powers(
        set,
        bound,
        &params,
        "k",
        |u| BigUint::from(transform::ceil_log2(u).max(1)),
        |k| BigUint::one() << k.to_u64().expect("exponent fits"),
    ))
}

/// Checks that no `a^m <= bound` is an `(m-ε, (m-1)/m)`-approximation of a member of `set`.
pub fn verify_no_power_approx(set: &IntegerSet, m: u32, eps: &BigRational, bound: &BigUint) -> Result<VerifyReport> {
    if m < 2 {
        return Err(Error::InvalidParameter("verify_no_power_approx needs m >= 2".into()));
    }
    check_eps(eps, m)?;
    let c = BigRational::from_integer(BigInt::from(m)) - eps;
    let params = ApproxParams::new(c, m - 1, m)?;
    Ok(scan_powers(
        set,
        bound,
        &params,
        "a",
        |u| numeric::ceil_root(u, 1, m).max(BigUint::one()),
        |a| a.pow(m),
    ))
}

/// `(2-ε)·2^δ < 2`, decided as `(2-ε)^q · 2^p < 2^q` for `δ = p/q`.
pub fn pow2_side_condition(eps: &BigRational, delta: UnitFraction) -> bool {
    let two = BigRational::from_integer(BigInt::from(2));
    let base = &two - eps;
    if !base.is_positive() {
        return true;
    }
    let lhs = num_traits::pow(base, delta.q() as usize) * num_traits::pow(two.clone(), delta.p() as usize);
    lhs < num_traits::pow(two, delta.q() as usize)
}

/// `δ < ε/m`.
pub fn power_side_condition(m: u32, eps: &BigRational, delta: UnitFraction) -> bool {
    let delta = BigRational::new(BigInt::from(delta.p()), BigInt::from(delta.q()));
    delta * BigInt::from(m) < *eps
}
