//! Finite subsets of the positive integers stored as sorted unions of
//! disjoint, non-adjacent integer intervals with arbitrary-precision endpoints.
//!
//! An interval `[lo, hi]` always means the integers `x` with `lo <= x <= hi`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntInterval {
    lo: BigUint,
    hi: BigUint,
}

impl IntInterval {
    pub fn new(lo: BigUint, hi: BigUint) -> Result<Self> {
        if lo.is_zero() || lo > hi {
            return Err(Error::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(IntInterval { lo, hi })
    }

    /// Convenience constructor for small endpoints.
    pub fn from_u64(lo: u64, hi: u64) -> Result<Self> {
        Self::new(BigUint::from(lo), BigUint::from(hi))
    }

    pub fn lo(&self) -> &BigUint {
        &self.lo
    }

    pub fn hi(&self) -> &BigUint {
        &self.hi
    }

    /// Number of integers in the interval.
    pub fn len(&self) -> BigUint {
        &self.hi - &self.lo + 1u32
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A normalized finite subset of ℕ.
///
/// Equality compares members only; the provenance tag is informational.
#[derive(Clone, Debug, Default)]
pub struct IntegerSet {
    intervals: Vec<IntInterval>,
    provenance: Option<String>,
}

impl PartialEq for IntegerSet {
    fn eq(&self, other: &Self) -> bool {
        self.intervals == other.intervals
    }
}

impl Eq for IntegerSet {}

impl IntegerSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts, merges overlapping and adjacent intervals, and returns the
    /// canonical representation.
    pub fn normalize(mut raw: Vec<IntInterval>) -> Self {
        raw.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<IntInterval> = Vec::with_capacity(raw.len());
        for iv in raw {
            if let Some(last) = out.last_mut() {
                if iv.lo <= &last.hi + 1u32 {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        IntegerSet {
            intervals: out,
            provenance: None,
        }
    }

    /// Builds a set from raw `(lo, hi)` pairs, rejecting `lo < 1` or `lo > hi`.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, BigUint)>,
    {
        let raw = pairs
            .into_iter()
            .map(|(lo, hi)| IntInterval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalize(raw))
    }

    pub fn from_u64_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        Self::from_pairs(pairs.iter().map(|&(a, b)| (BigUint::from(a), BigUint::from(b))))
    }

    pub fn from_elements<I>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = BigUint>,
    {
        Self::from_pairs(elements.into_iter().map(|x| (x.clone(), x)))
    }

    pub fn with_provenance(mut self, tag: impl Into<String>) -> Self {
        self.provenance = Some(tag.into());
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn intervals(&self) -> &[IntInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<&BigUint> {
        self.intervals.first().map(|iv| &iv.lo)
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.intervals.last().map(|iv| &iv.hi)
    }

    /// Total number of members.
    pub fn count(&self) -> BigUint {
        self.intervals.iter().map(IntInterval::len).sum()
    }

    /// Index of the first interval whose upper end is `>= x`.
    fn first_reaching(&self, x: &BigUint) -> usize {
        self.intervals.partition_point(|iv| &iv.hi < x)
    }

    pub fn member(&self, x: &BigUint) -> bool {
        self.intervals
            .get(self.first_reaching(x))
            .is_some_and(|iv| &iv.lo <= x)
    }

    /// Members of the set lying in `[a, b]`.
    pub fn intersect_window(&self, a: &BigUint, b: &BigUint) -> Result<IntegerSet> {
        if a > b {
            return Err(Error::InvalidWindow {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let mut out = Vec::new();
        for iv in &self.intervals[self.first_reaching(a)..] {
            if &iv.lo > b {
                break;
            }
            let lo = if &iv.lo < a { a.clone() } else { iv.lo.clone() };
            let hi = if &iv.hi > b { b.clone() } else { iv.hi.clone() };
            if lo.is_zero() {
                // a = 0 is tolerated as a window bound; members start at 1.
                if hi.is_zero() {
                    continue;
                }
                out.push(IntInterval { lo: BigUint::one(), hi });
            } else {
                out.push(IntInterval { lo, hi });
            }
        }
        Ok(IntegerSet {
            intervals: out,
            provenance: None,
        })
    }

    /// Largest member `<= y`.
    pub fn predecessor(&self, y: &BigUint) -> Option<BigUint> {
        let idx = self.first_reaching(y);
        if let Some(iv) = self.intervals.get(idx) {
            if &iv.lo <= y {
                return Some(y.clone());
            }
        }
        idx.checked_sub(1).map(|i| self.intervals[i].hi.clone())
    }

    /// Smallest member `>= y`.
    pub fn successor(&self, y: &BigUint) -> Option<BigUint> {
        let iv = self.intervals.get(self.first_reaching(y))?;
        Some(if &iv.lo <= y { y.clone() } else { iv.lo.clone() })
    }

    /// Intervals as `u64` pairs, or `None` if an endpoint does not fit in 64 bits.
    pub fn to_u64_intervals(&self) -> Option<Vec<(u64, u64)>> {
        self.intervals
            .iter()
            .map(|iv| Some((iv.lo.to_u64()?, iv.hi.to_u64()?)))
            .collect()
    }

    /// Enumerates members in ascending order. Intended for small sets.
    pub fn iter_u64(&self) -> impl Iterator<Item = u64> + '_ {
        self.intervals.iter().flat_map(|iv| {
            let lo = iv.lo.to_u64().expect("member exceeds u64");
            let hi = iv.hi.to_u64().expect("member exceeds u64");
            lo..=hi
        })
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{iv}")?;
        }
        write!(f, "}}")
    }
}
