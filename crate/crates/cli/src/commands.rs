//! Subcommand implementations. Each returns the text to print and an exit status.

use std::fmt::Write as _;
use std::fs;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use densprog_core::density::{
    banach_sup_estimate, default_candidates, horizon_grid, log_density_at, r_density_at, DensityEstimate,
};
use densprog_core::families::Family;
use densprog_core::search::{self, find_3term_geometric_approx, find_geometric, find_power_ap};
use densprog_core::setspec::set_to_json;
use densprog_core::{transform, Error, IntegerSet, RExponent, Result, SetSpec};

use crate::config::{CandidatePolicy, RunConfig};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    NotFound = 1,
    InputError = 2,
    BudgetExceeded = 3,
}

impl Status {
    pub fn for_error(e: &Error) -> Status {
        match e {
            Error::UndecidedComparison { .. } | Error::ElementCapExceeded { .. } | Error::SearchSpaceExceeded { .. } => {
                Status::BudgetExceeded
            }
            // a failed certification means a wrong result, not bad input
            Error::CertificationFailed { .. } => Status::NotFound,
            _ => Status::InputError,
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub status: Status,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            status: Status::Success,
        }
    }

    fn json(v: &Value, status: Status) -> Self {
        Outcome {
            text: serde_json::to_string_pretty(v).expect("serializable") + "\n",
            status,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Reads a set spec given inline (starting with `{`) or as a file path.
pub fn load_setspec(arg: &str) -> Result<SetSpec> {
    if arg.trim_start().starts_with('{') {
        SetSpec::parse(arg)
    } else {
        let text = fs::read_to_string(arg).map_err(|e| Error::SetSpec(format!("cannot read {arg}: {e}")))?;
        SetSpec::parse(&text)
    }
}

/// The horizon for a command: `--bound`, else the family bound, else the set maximum.
fn resolve_bound(bound: Option<&BigUint>, spec: &SetSpec, set: &IntegerSet) -> Result<BigUint> {
    bound
        .or(spec.bound())
        .or(set.max())
        .cloned()
        .ok_or_else(|| Error::InvalidParameter("empty set: pass --bound to fix the horizon".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    R,
    Log,
    BanachR,
    Lbd,
}

impl DensityKind {
    fn name(&self) -> &'static str {
        match self {
            DensityKind::R => "r",
            DensityKind::Log => "log",
            DensityKind::BanachR => "banach-r",
            DensityKind::Lbd => "lbd",
        }
    }

    fn is_log(&self) -> bool {
        matches!(self, DensityKind::Log | DensityKind::Lbd)
    }
}

pub struct DensityRow {
    pub horizon: BigUint,
    pub k: BigUint,
    pub estimate: DensityEstimate,
}

/// Density curve over the configured horizon grid, ending at `bound`.
pub fn density_curve(
    set: &IntegerSet,
    kind: DensityKind,
    r: RExponent,
    bound: &BigUint,
    cfg: &RunConfig,
) -> Result<Vec<DensityRow>> {
    let dcfg = cfg.density();
    let two = BigUint::from(2u32);
    let start = if kind.is_log() {
        cfg.horizon_start.clone().max(two.clone())
    } else {
        cfg.horizon_start.clone()
    };
    if kind.is_log() && bound < &two {
        return Err(Error::InvalidParameter("logarithmic densities need a bound of at least 2".into()));
    }
    let mut grid = horizon_grid(&start, cfg.horizon_ratio, bound)?;
    if cfg.horizon_count > 0 && grid.len() > cfg.horizon_count {
        grid.drain(..grid.len() - cfg.horizon_count);
    }
    let candidates = match &cfg.candidate_policy {
        CandidatePolicy::Endpoints => default_candidates(set),
        CandidatePolicy::Explicit(list) => list.clone(),
    };
    grid.into_iter()
        .map(|h| {
            let (estimate, k) = match kind {
                DensityKind::R => (r_density_at(set, &h, r, &dcfg)?, BigUint::from(1u32)),
                DensityKind::Log => (log_density_at(set, &h, &dcfg)?, BigUint::from(1u32)),
                DensityKind::BanachR => banach_sup_estimate(set, &h, Some(r), &candidates, &dcfg)?,
                DensityKind::Lbd => banach_sup_estimate(set, &h, None, &candidates, &dcfg)?,
            };
            Ok(DensityRow { horizon: h, k, estimate })
        })
        .collect()
}

pub fn cmd_density(
    spec: &SetSpec,
    kind: DensityKind,
    r: RExponent,
    bound: Option<&BigUint>,
    format: OutputFormat,
    cfg: &RunConfig,
) -> Result<Outcome> {
    let set = spec.resolve(&cfg.families())?;
    let bound = resolve_bound(bound, spec, &set)?;
    let rows = density_curve(&set, kind, r, &bound, cfg)?;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("horizon,k,lo,hi,width\n");
            for row in &rows {
                let v = &row.estimate.value;
                writeln!(out, "{},{},{},{},{}", row.horizon, row.k, v.lo_f64(), v.hi_f64(), v.width_f64()).unwrap();
            }
            Ok(Outcome::ok(out))
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let v = &row.estimate.value;
                    let mut obj = json!({
                        "horizon": row.horizon.to_string(),
                        "k": row.k.to_string(),
                        "window_end": row.estimate.window_end.to_string(),
                        "lo": v.lo_f64(),
                        "hi": v.hi_f64(),
                        "width": v.width_f64(),
                    });
                    if v.is_exact() {
                        obj["exact"] = json!(v.lo().to_string());
                    }
                    obj
                })
                .collect();
            let mut report = json!({ "kind": kind.name(), "bound": bound.to_string(), "rows": rows });
            if !kind.is_log() {
                report["r"] = json!(r.to_string());
            }
            Ok(Outcome::json(&report, Status::Success))
        }
    }
}

#[derive(Clone, Debug)]
pub enum FindKind {
    Geometric,
    PowerAp { m: u32, eps: BigRational },
}

pub fn cmd_find(
    spec: &SetSpec,
    kind: &FindKind,
    l: u32,
    min_a: &BigUint,
    min_d: &BigUint,
    cfg: &RunConfig,
) -> Result<Outcome> {
    let set = spec.resolve(&cfg.families())?;
    let found = match kind {
        FindKind::Geometric => find_geometric(&set, l, min_a, min_d, cfg.element_cap)?,
        FindKind::PowerAp { m, eps } => find_power_ap(&set, l, *m, eps, min_a, min_d, cfg.element_cap)?,
    };
    match found {
        Some(cert) => {
            cert.validate(&set)?;
            let mut v = cert.to_json();
            v["status"] = json!("FOUND");
            Ok(Outcome::json(&v, Status::Success))
        }
        None => {
            let mut v = json!({
                "status": "NOT-FOUND",
                "l": l,
                "min_a": min_a.to_string(),
                "min_d": min_d.to_string(),
                "searched_up_to": set.max().map(|m| m.to_string()),
            });
            if let FindKind::PowerAp { m, eps } = kind {
                v["m"] = json!(m);
                v["eps"] = json!(eps.to_string());
            }
            Ok(Outcome::json(&v, Status::NotFound))
        }
    }
}

#[derive(Clone, Debug)]
pub enum VerifyKind {
    NoPow2 { eps: BigRational },
    NoMthPower { m: u32, eps: BigRational },
    No3Geo { c: BigRational, min_param: BigUint },
}

pub fn cmd_verify(spec: &SetSpec, kind: &VerifyKind, bound: Option<&BigUint>, cfg: &RunConfig) -> Result<Outcome> {
    let set = spec.resolve(&cfg.families())?;
    let bound = bound
        .or(spec.bound())
        .cloned()
        .ok_or_else(|| Error::InvalidParameter("verify needs --bound".into()))?;
    let family = match spec {
        SetSpec::Family(f) => Some(&f.family),
        SetSpec::Literal(_) => None,
    };
    let (mut v, passed) = match kind {
        VerifyKind::NoPow2 { eps } => {
            let rep = search::verify_no_pow2_approx(&set, eps, &bound)?;
            let mut v = rep.to_json();
            if let Some(Family::Pow2Blocks { delta }) = family {
                v["side_condition"] = json!(search::pow2_side_condition(eps, *delta));
            }
            (v, rep.passed())
        }
        VerifyKind::NoMthPower { m, eps } => {
            let rep = search::verify_no_power_approx(&set, *m, eps, &bound)?;
            let mut v = rep.to_json();
            if let Some(Family::MthPowerBlocks { m: fm, delta }) = family {
                if fm == m {
                    v["side_condition"] = json!(search::power_side_condition(*m, eps, *delta));
                }
            }
            (v, rep.passed())
        }
        VerifyKind::No3Geo { c, min_param } => {
            let found = find_3term_geometric_approx(&set, c, min_param, &bound, cfg.pair_budget)?;
            let mut v = json!({
                "status": if found.is_some() { "FAIL" } else { "PASS" },
                "bound": bound.to_string(),
                "c": c.to_string(),
                "min_param": min_param.to_string(),
                "note": "absence covers only a, ratio > min_param with a·ratio² <= bound",
            });
            if let Some(cert) = &found {
                cert.validate(&set)?;
                v["violation"] = cert.to_json();
            }
            (v, found.is_none())
        }
    };
    if let Some(kind) = family {
        v["set"] = json!(kind.to_string());
    }
    Ok(Outcome::json(&v, if passed { Status::Success } else { Status::NotFound }))
}

#[derive(Clone, Copy, Debug)]
pub enum TransformKind {
    Log,
    Power(RExponent),
}

pub fn cmd_transform(spec: &SetSpec, kind: TransformKind, format: OutputFormat, cfg: &RunConfig) -> Result<Outcome> {
    let set = spec.resolve(&cfg.families())?;
    let (image, zero) = match kind {
        TransformKind::Log => (transform::log_image(&set), Some(transform::log_image_has_zero(&set))),
        TransformKind::Power(r) => (transform::power_image(&set, r.num(), r.den())?, None),
    };
    match format {
        OutputFormat::Csv => Ok(Outcome::ok(intervals_csv(&image))),
        OutputFormat::Json => {
            let mut v = set_to_json(&image);
            if let Some(z) = zero {
                v["contains_zero"] = json!(z);
            }
            Ok(Outcome::json(&v, Status::Success))
        }
    }
}

pub fn cmd_gen(spec: &SetSpec, format: OutputFormat, cfg: &RunConfig) -> Result<Outcome> {
    let set = spec.resolve(&cfg.families())?;
    match format {
        OutputFormat::Csv => Ok(Outcome::ok(intervals_csv(&set))),
        OutputFormat::Json => Ok(Outcome::json(&set_to_json(&set), Status::Success)),
    }
}

fn intervals_csv(set: &IntegerSet) -> String {
    let mut out = String::from("lo,hi\n");
    for iv in set.intervals() {
        writeln!(out, "{},{}", iv.lo(), iv.hi()).unwrap();
    }
    out
}

pub fn cmd_check(suite: crate::checks::Suite, cfg: &RunConfig) -> Result<Outcome> {
    let results = crate::checks::run(suite, cfg)?;
    let mut out = String::new();
    for r in &results {
        writeln!(out, "{r}").unwrap();
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(
        out,
        "summary: {} checks, {} failed (tolerance {})",
        results.len(),
        failed,
        cfg.tolerance
    )
    .unwrap();
    Ok(Outcome {
        text: out,
        status: if failed == 0 { Status::Success } else { Status::NotFound },
    })
}
