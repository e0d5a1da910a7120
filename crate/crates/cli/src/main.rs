use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use densprog::checks::Suite;
use densprog::commands::{
    self, DensityKind, FindKind, Outcome, OutputFormat, Status, TransformKind, VerifyKind,
};
use densprog::config::RunConfig;
use densprog_core::{Error, RExponent, Result, SetSpec};

#[derive(Parser)]
#[command(name = "densprog", version, about = "Density estimates and approximate progressions in integer sets")]
struct Cli {
    /// Set spec: a JSON file path or inline JSON starting with `{`
    #[arg(long, global = true)]
    set: Option<String>,
    /// Horizon / search bound (decimal integer)
    #[arg(long, global = true)]
    bound: Option<BigUint>,
    /// Config file with `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Config override `key=value`; repeatable, applied after --config
    #[arg(long = "cfg", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    out: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityArg {
    R,
    Log,
    BanachR,
    Lbd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FindArg {
    Geometric,
    PowerAp,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    NoPow2,
    NoMthPower,
    #[value(name = "no-3geo")]
    No3geo,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Log,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Chain,
    Thm25,
    Prop31,
    Prop36,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Density curve over a horizon grid (CSV: horizon,k,lo,hi,width)
    Density {
        #[arg(long, value_enum)]
        kind: DensityArg,
        /// Exponent r in (0, 1], as p/q
        #[arg(long, default_value = "1")]
        r: RExponent,
    },
    /// Search for an approximate geometric or power progression
    Find {
        #[arg(long, value_enum)]
        kind: FindArg,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        eps: Option<BigRational>,
        #[arg(long, default_value = "0")]
        min_a: BigUint,
        #[arg(long, default_value = "0")]
        min_d: BigUint,
    },
    /// Check that no power approximates a member, or that no 3-term geometric progression does
    Verify {
        #[arg(long, value_enum)]
        kind: VerifyArg,
        #[arg(long)]
        eps: Option<BigRational>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value = "1")]
        c: BigRational,
        #[arg(long, default_value = "1")]
        min_param: BigUint,
    },
    /// Image of the set under ⌈log₂ x⌉ or ⌈x^r⌉
    Transform {
        #[arg(long, value_enum)]
        kind: TransformArg,
        #[arg(long, default_value = "1")]
        r: RExponent,
    },
    /// Generate a family truncation (or normalize any set spec)
    Gen {
        #[arg(long)]
        family: Option<String>,
        /// Family parameter `key=value`; repeatable
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run the finite-horizon inequality suites
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("--cfg expects key=value, got {kv:?}")))?;
        cfg.set(k, v)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn require_set(cli: &Cli) -> Result<SetSpec> {
    let arg = cli
        .set
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("this command needs --set".into()))?;
    commands::load_setspec(arg)
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = build_config(cli)?;
    let format = |default: OutputFormat| match cli.out {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => default,
    };
    match &cli.command {
        Command::Density { kind, r } => {
            let kind = match kind {
                DensityArg::R => DensityKind::R,
                DensityArg::Log => DensityKind::Log,
                DensityArg::BanachR => DensityKind::BanachR,
                DensityArg::Lbd => DensityKind::Lbd,
            };
            let spec = require_set(cli)?;
            commands::cmd_density(&spec, kind, *r, cli.bound.as_ref(), format(OutputFormat::Csv), &cfg)
        }
        Command::Find {
            kind,
            l,
            m,
            eps,
            min_a,
            min_d,
        } => {
            let kind = match kind {
                FindArg::Geometric => FindKind::Geometric,
                FindArg::PowerAp => FindKind::PowerAp {
                    m: require(*m, "m")?,
                    eps: require(eps.clone(), "eps")?,
                },
            };
            let spec = require_set(cli)?;
            commands::cmd_find(&spec, &kind, *l, min_a, min_d, &cfg)
        }
        Command::Verify {
            kind,
            eps,
            m,
            c,
            min_param,
        } => {
            let kind = match kind {
                VerifyArg::NoPow2 => VerifyKind::NoPow2 {
                    eps: require(eps.clone(), "eps")?,
                },
                VerifyArg::NoMthPower => VerifyKind::NoMthPower {
                    m: require(*m, "m")?,
                    eps: require(eps.clone(), "eps")?,
                },
                VerifyArg::No3geo => VerifyKind::No3Geo {
                    c: c.clone(),
                    min_param: min_param.clone(),
                },
            };
            let spec = require_set(cli)?;
            commands::cmd_verify(&spec, &kind, cli.bound.as_ref(), &cfg)
        }
        Command::Transform { kind, r } => {
            let kind = match kind {
                TransformArg::Log => TransformKind::Log,
                TransformArg::Power => TransformKind::Power(*r),
            };
            let spec = require_set(cli)?;
            commands::cmd_transform(&spec, kind, format(OutputFormat::Json), &cfg)
        }
        Command::Gen { family, params } => {
            let spec = match family {
                Some(name) => {
                    let mut map = Map::new();
                    for kv in params {
                        let (k, v) = kv
                            .split_once('=')
                            .ok_or_else(|| Error::InvalidParameter(format!("--param expects key=value, got {kv:?}")))?;
                        map.insert(k.trim().to_string(), Value::String(v.trim().to_string()));
                    }
                    let bound = require(cli.bound.as_ref(), "bound")?;
                    SetSpec::from_json(&json!({
                        "kind": "family",
                        "name": name,
                        "params": map,
                        "bound": bound.to_string(),
                    }))?
                }
                None => require_set(cli)?,
            };
            commands::cmd_gen(&spec, format(OutputFormat::Json), &cfg)
        }
        Command::Check { suite } => {
            let suite = match suite {
                SuiteArg::Chain => Suite::Chain,
                SuiteArg::Thm25 => Suite::Thm25,
                SuiteArg::Prop31 => Suite::Prop31,
                SuiteArg::Prop36 => Suite::Prop36,
                SuiteArg::All => Suite::All,
            };
            commands::cmd_check(suite, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::for_error(&e) as u8)
        }
    }
}
