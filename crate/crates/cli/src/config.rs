//! Run configuration: defaults, a `key = value` file, then flag overrides.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;

use densprog_core::density::DEFAULT_EXACT_THRESHOLD;
use densprog_core::families::DEFAULT_SIEVE_CAP;
use densprog_core::search::{DEFAULT_ELEMENT_CAP, DEFAULT_PAIR_BUDGET};
use densprog_core::{DensityConfig, Error, FamilyConfig, Precision, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum CandidatePolicy {
    /// `{1}` plus every interval's left endpoint.
    Endpoints,
    Explicit(Vec<BigUint>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision_start: u32,
    pub precision_cap: u32,
    pub exact_threshold: u64,
    pub element_cap: u64,
    pub pair_budget: u64,
    pub sieve_cap: u64,
    pub horizon_start: BigUint,
    pub horizon_ratio: f64,
    /// Keep at most this many horizons (the largest ones); 0 keeps all.
    pub horizon_count: usize,
    pub candidate_policy: CandidatePolicy,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = Precision::default();
        RunConfig {
            precision_start: p.start_bits,
            precision_cap: p.cap_bits,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            element_cap: DEFAULT_ELEMENT_CAP,
            pair_budget: DEFAULT_PAIR_BUDGET,
            sieve_cap: DEFAULT_SIEVE_CAP,
            horizon_start: BigUint::from(10u32),
            horizon_ratio: 2.0,
            horizon_count: 0,
            candidate_policy: CandidatePolicy::Endpoints,
            tolerance: 0.02,
            seed: 0,
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidParameter(format!("config {key} = {value:?} is not valid"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

impl RunConfig {
    /// Sets one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "precision_start" => self.precision_start = parse(key, value)?,
            "precision_cap" => self.precision_cap = parse(key, value)?,
            "exact_threshold" => self.exact_threshold = parse(key, value)?,
            "element_cap" => self.element_cap = parse(key, value)?,
            "pair_budget" => self.pair_budget = parse(key, value)?,
            "sieve_cap" => self.sieve_cap = parse(key, value)?,
            "horizon_start" => self.horizon_start = parse(key, value)?,
            "horizon_ratio" => self.horizon_ratio = parse(key, value)?,
            "horizon_count" => self.horizon_count = parse(key, value)?,
            "tolerance" => self.tolerance = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "candidates" => {
                self.candidate_policy = if value == "endpoints" {
                    CandidatePolicy::Endpoints
                } else {
                    let list = value
                        .split(',')
                        .map(|s| parse::<BigUint>(key, s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    if list.is_empty() || list.iter().any(|k| k == &BigUint::ZERO) {
                        return Err(bad(key, value));
                    }
                    CandidatePolicy::Explicit(list)
                };
            }
            other => return Err(Error::InvalidParameter(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Precision::new(self.precision_start, self.precision_cap)?;
        if !(self.horizon_ratio > 1.0 && self.horizon_ratio.is_finite()) {
            return Err(Error::InvalidParameter("horizon_ratio must exceed 1".into()));
        }
        if self.horizon_start == BigUint::ZERO {
            return Err(Error::InvalidParameter("horizon_start must be positive".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be non-negative".into()));
        }
        Ok(())
    }

    pub fn precision(&self) -> Precision {
        Precision::new(self.precision_start, self.precision_cap).expect("validated")
    }

    pub fn density(&self) -> DensityConfig {
        DensityConfig {
            exact_threshold: self.exact_threshold,
            precision: self.precision(),
        }
    }

    pub fn families(&self) -> FamilyConfig {
        FamilyConfig {
            precision: self.precision(),
            sieve_cap: self.sieve_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# sweep\ntolerance = 0.05\nhorizon_ratio=1.5  # finer\ncandidates = 1, 16, 256\n")
            .unwrap();
        assert_eq!(cfg.tolerance, 0.05);
        assert_eq!(cfg.horizon_ratio, 1.5);
        assert_eq!(
            cfg.candidate_policy,
            CandidatePolicy::Explicit(vec![1u32.into(), 16u32.into(), 256u32.into()])
        );
        cfg.set("tolerance", "0").unwrap();
        assert_eq!(cfg.tolerance, 0.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.set("element_cap", "-3").is_err());
        assert!(cfg.set("candidates", "0,4").is_err());
        assert!(cfg.apply_text("tolerance 0.1").is_err());
        cfg.set("horizon_ratio", "1").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.set("precision_start", "8192").unwrap();
        assert!(cfg.validate().is_err());
    }
}
