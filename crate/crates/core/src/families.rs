//! Exact generators for the example sets, each truncated at a caller bound.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::density::RExponent;
use crate::error::{Error, Result};
use crate::numeric::{self, Precision};
use crate::set::{IntInterval, IntegerSet};

pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

/// A rational `p/q` strictly between 0 and 1, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnitFraction {
    p: u32,
    q: u32,
}

impl UnitFraction {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 || p >= q {
            return Err(Error::InvalidParameter(format!(
                "delta {p}/{q} must lie strictly between 0 and 1"
            )));
        }
        let g = p.gcd(&q);
        Ok(UnitFraction { p: p / g, q: q / g })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }
}

impl fmt::Display for UnitFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl std::str::FromStr for UnitFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse fraction {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        UnitFraction::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    }
}

/// One of the example families together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    FactorialBlocks,
    SquaredSeq { a1: BigUint, r: RExponent, s: RExponent },
    Pow2Blocks { delta: UnitFraction },
    SparseBlocks { j: u64 },
    MthPowerBlocks { m: u32, delta: UnitFraction },
    Squarefree,
    Remark26Blocks,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::FactorialBlocks => "factorial-blocks",
            Family::SquaredSeq { .. } => "squared-seq",
            Family::Pow2Blocks { .. } => "pow2-blocks",
            Family::SparseBlocks { .. } => "sparse-blocks",
            Family::MthPowerBlocks { .. } => "mth-power-blocks",
            Family::Squarefree => "squarefree",
            Family::Remark26Blocks => "remark26-blocks",
        }
    }

    /// Parameters as `(key, value)` strings, in the same format the set-spec parser reads.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            Family::SquaredSeq { a1, r, s } => {
                vec![("a1", a1.to_string()), ("r", r.to_string()), ("s", s.to_string())]
            }
            Family::Pow2Blocks { delta } => vec![("delta", delta.to_string())],
            Family::SparseBlocks { j } => vec![("j", j.to_string())],
            Family::MthPowerBlocks { m, delta } => {
                vec![("m", m.to_string()), ("delta", delta.to_string())]
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let parts: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FamilyConfig {
    pub precision: Precision,
    pub sieve_cap: u64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            precision: Precision::default(),
            sieve_cap: DEFAULT_SIEVE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub bound: BigUint,
}

impl FamilySpec {
    pub fn new(family: Family, bound: BigUint) -> Self {
        FamilySpec { family, bound }
    }

    pub fn generate(&self, cfg: &FamilyConfig) -> Result<IntegerSet> {
        let b = &self.bound;
        let set = match &self.family {
            Family::FactorialBlocks => gen_factorial_blocks(b),
            Family::SquaredSeq { a1, r, s } => gen_squared_seq(a1, *r, *s, b, cfg.precision)?,
            Family::Pow2Blocks { delta } => gen_pow2_blocks(*delta, b),
            Family::SparseBlocks { j } => gen_sparse_blocks(*j, b)?,
            Family::MthPowerBlocks { m, delta } => gen_mth_power_blocks(*m, *delta, b)?,
            Family::Squarefree => gen_squarefree(b, cfg.sieve_cap)?,
            Family::Remark26Blocks => gen_remark26_blocks(b),
        };
        Ok(set.with_provenance(format!("{}; bound={}", self.family, self.bound)))
    }
}

/// Collects blocks `[lo, hi]`, clipping at `bound` and skipping empty ones.
struct BlockSink<'a> {
    bound: &'a BigUint,
    blocks: Vec<IntInterval>,
}

impl<'a> BlockSink<'a> {
    fn new(bound: &'a BigUint) -> Self {
        BlockSink {
            bound,
            blocks: Vec::new(),
        }
    }

    fn push(&mut self, lo: BigUint, hi: BigUint) {
        let lo = lo.max(BigUint::one());
        let hi = hi.min(self.bound.clone());
        if lo <= hi {
            self.blocks.push(IntInterval::new(lo, hi).expect("checked"));
        }
    }

    fn finish(self) -> IntegerSet {
        IntegerSet::normalize(self.blocks)
    }
}

/// `⋃_{n≥1} [n!, 2·n!]`.
pub fn gen_factorial_blocks(bound: &BigUint) -> IntegerSet {
    let mut sink = BlockSink::new(bound);
    let mut f = BigUint::one();
    let mut n = 1u32;
    while &f <= bound {
        sink.push(f.clone(), &f * 2u32);
        n += 1;
        f *= n;
    }
    sink.finish()
}

/// `⋃ [a_n^(1/(rs)), (a_n^(1/s) + 1)^(1/r)]` with `a_(n+1) = a_n²`, endpoints
/// rounded inward to integers.
pub fn gen_squared_seq(
    a1: &BigUint,
    r: RExponent,
    s: RExponent,
    bound: &BigUint,
    precision: Precision,
) -> Result<IntegerSet> {
    if *a1 < BigUint::from(2u32) {
        return Err(Error::InvalidParameter("squared-seq needs a1 >= 2".into()));
    }
    if r >= s {
        return Err(Error::InvalidParameter(format!(
            "squared-seq needs r < s, got r={r}, s={s}"
        )));
    }
    let (p1, q1, p2, q2) = (r.num(), r.den(), s.num(), s.den());
    let mut sink = BlockSink::new(bound);
    let mut a = a1.clone();
    loop {
        let lo = numeric::ceil_root(&a, q1 * q2, p1 * p2);
        if &lo > bound {
            break;
        }
        let hi = numeric::largest_with_power_le(&a, (q2, p2), &BigUint::one(), (p1, q1), precision)?;
        sink.push(lo, hi);
        a = &a * &a;
    }
    Ok(sink.finish())
}

/// `⋃_{n≥1} [2^n + 1, ⌊2^(n+δ)⌋]`.
pub fn gen_pow2_blocks(delta: UnitFraction, bound: &BigUint) -> IntegerSet {
    let (p, q) = (delta.p(), delta.q());
    let mut sink = BlockSink::new(bound);
    for n in 1u64.. {
        let lo = (BigUint::one() << n) + 1u32;
        if &lo > bound {
            break;
        }
        let hi = (BigUint::one() << (n * q as u64 + p as u64)).nth_root(q);
        sink.push(lo, hi);
    }
    sink.finish()
}

/// `⋃_{i≥0} [u_i, j·u_i]` with `u_0 = 2` and `u_(i+1) = (j·u_i)³ + 1`.
pub fn gen_sparse_blocks(j: u64, bound: &BigUint) -> Result<IntegerSet> {
    if j < 2 {
        return Err(Error::InvalidParameter("sparse-blocks needs j >= 2".into()));
    }
    let mut sink = BlockSink::new(bound);
    let mut u = BigUint::from(2u32);
    while &u <= bound {
        let top = &u * j;
        u = top.pow(3) + 1u32;
        sink.push(top.clone() / j, top);
    }
    Ok(sink.finish())
}

/// `⋃_{n≥1} [n^m + 1, (n+δ)^m)`.
pub fn gen_mth_power_blocks(m: u32, delta: UnitFraction, bound: &BigUint) -> Result<IntegerSet> {
    if m < 2 {
        return Err(Error::InvalidParameter("mth-power-blocks needs m >= 2".into()));
    }
    let (p, q) = (delta.p(), delta.q());
    let qm = BigUint::from(q).pow(m);
    let mut sink = BlockSink::new(bound);
    for n in 1u64.. {
        let lo = BigUint::from(n).pow(m) + 1u32;
        if &lo > bound {
            break;
        }
        // ⌈(n+δ)^m⌉ - 1 = ⌈((nq+p)^m) / q^m⌉ - 1
        let numer = (BigUint::from(n) * q + p).pow(m);
        let hi = Integer::div_ceil(&numer, &qm) - 1u32;
        sink.push(lo, hi);
    }
    Ok(sink.finish())
}

/// Square-free integers in `[1, bound]`.
pub fn gen_squarefree(bound: &BigUint, sieve_cap: u64) -> Result<IntegerSet> {
    let n = match bound.to_u64() {
        Some(n) if n <= sieve_cap => n,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "squarefree bound {bound} exceeds the sieve cap {sieve_cap}"
            )))
        }
    };
    if n == 0 {
        return Ok(IntegerSet::empty());
    }
    let size = n as usize + 1;
    let mut composite = vec![0u64; size.div_ceil(64)];
    let mut d = 2usize;
    while d * d <= n as usize {
        let step = d * d;
        let mut x = step;
        while x < size {
            composite[x / 64] |= 1 << (x % 64);
            x += step;
        }
        d += 1;
    }
    let is_free = |x: usize| composite[x / 64] & (1 << (x % 64)) == 0;
    let mut runs = Vec::new();
    let mut start = None;
    for x in 1..size {
        match (is_free(x), start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                runs.push((s as u64, x as u64 - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s as u64, n));
    }
    IntegerSet::from_u64_pairs(&runs)
}

/// `⋃_{n≥1} [2^(2^n), n·2^(2^n)]`: a set of upper density 1 whose logarithmic
/// density is small at every scale. The construction is our own choice.
pub fn gen_remark26_blocks(bound: &BigUint) -> IntegerSet {
    let mut sink = BlockSink::new(bound);
    for n in 1u32.. {
        let t = BigUint::one() << (1u64 << n);
        if &t > bound {
            break;
        }
        let top = &t * n;
        sink.push(t, top);
    }
    sink.finish()
}
