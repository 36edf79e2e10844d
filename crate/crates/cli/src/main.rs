use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nilstrat_core::catalog::{self, AlgebraBundle, CatalogError};
use nilstrat_core::coadjoint::{
    flat_orbit_test, generic_jump_set, isotropy, jump_set, square_integrability_constant,
    Functional, GenericMode, JumpSet, SamplingConfig,
};
use nilstrat_core::lie::FlaggedAlgebra;
use nilstrat_core::linalg::parse_scalar_list;
use nilstrat_core::stepwise::{Stepwise, StepwiseError};
use nilstrat_core::suites::{selftest, SELFTEST_BOUND};

#[derive(Parser)]
#[command(name = "nilstrat", version, about = "Exact coadjoint-orbit invariants of nilpotent Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check structure constants and the flag.
    Validate { file: PathBuf },
    /// Dimensions, series, center and generic jump set.
    Info { file: PathBuf },
    /// Jump set and isotropy of a functional.
    Jumpset {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Generic jump set e(n).
    Generic {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Symbolic)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        bound: i64,
    },
    /// Whether generic coadjoint orbits are flat.
    Flat { file: PathBuf },
    /// Check the stepwise hypotheses of the bundle.
    Stepwise { file: PathBuf },
    /// Membership of a functional in X.
    Member {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Canonical orbit representative with a certificate.
    Canonical {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Square-integrability constant as (2π)^power / |Pf|.
    Constant {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Comma-separated one-based flag positions; defaults to the stepwise
        /// positions of V, or to the jump set of the functional.
        #[arg(long)]
        jump_set: Option<String>,
    },
    /// Run every applicable property suite.
    Selftest {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SELFTEST_BOUND)]
        bound: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Sampled,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Ok,
    CheckFailed,
    InputError,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::InputError => 2,
        }
    }
}

struct Outcome {
    status: Status,
    result: Value,
}

impl Outcome {
    fn ok(result: impl Serialize) -> Self {
        Outcome::with(Status::Ok, result)
    }

    fn check(passed: bool, result: impl Serialize) -> Self {
        Outcome::with(if passed { Status::Ok } else { Status::CheckFailed }, result)
    }

    fn with(status: Status, result: impl Serialize) -> Self {
        Outcome {
            status,
            result: serde_json::to_value(result).expect("reports serialize"),
        }
    }
}

/// Input problem reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Info { .. } => "info",
            Command::Jumpset { .. } => "jumpset",
            Command::Generic { .. } => "generic",
            Command::Flat { .. } => "flat",
            Command::Stepwise { .. } => "stepwise",
            Command::Member { .. } => "member",
            Command::Canonical { .. } => "canonical",
            Command::Constant { .. } => "constant",
            Command::Selftest { .. } => "selftest",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Command::Validate { file }
            | Command::Info { file }
            | Command::Jumpset { file, .. }
            | Command::Generic { file, .. }
            | Command::Flat { file }
            | Command::Stepwise { file }
            | Command::Member { file, .. }
            | Command::Canonical { file, .. }
            | Command::Constant { file, .. }
            | Command::Selftest { file, .. } => file,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Generic {
                mode: Mode::Sampled,
                seed,
                ..
            }
            | Command::Selftest { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

fn parse_xi(alg: &FlaggedAlgebra, text: &str) -> Result<Functional, InputError> {
    let coords = parse_scalar_list(text).map_err(|e| InputError(format!("--xi: {e}")))?;
    if coords.len() != alg.dim() {
        return Err(InputError(format!(
            "--xi has {} coordinates, algebra has dimension {}",
            coords.len(),
            alg.dim()
        )));
    }
    Ok(Functional::new(coords))
}

fn parse_jump_set(text: &str) -> Result<JumpSet, InputError> {
    let indices = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| InputError(format!("--jump-set: {e}")))?;
    Ok(JumpSet::new(indices))
}

fn stepwise_of(bundle: &AlgebraBundle, alg: &FlaggedAlgebra) -> Result<Stepwise, InputError> {
    let data = bundle
        .stepwise
        .as_ref()
        .ok_or_else(|| InputError("bundle has no stepwise data".into()))?;
    Ok(Stepwise::new(alg.clone(), data)?)
}

/// Errors that mean the functional fails a checked condition rather than bad input.
fn stepwise_failure(e: StepwiseError) -> Result<Outcome, InputError> {
    match e {
        StepwiseError::NotInX { .. }
        | StepwiseError::EliminationStuck { .. }
        | StepwiseError::CertificateFailed(_)
        | StepwiseError::PreconditionFailed(_) => Ok(Outcome::with(
            Status::CheckFailed,
            json!({ "error": e.to_string() }),
        )),
        other => Err(other.into()),
    }
}

fn run(command: &Command, text: &str) -> Result<Outcome, InputError> {
    let bundle = match catalog::parse_bundle(text) {
        Ok(b) => b,
        Err(CatalogError::Validation(msg)) if matches!(command, Command::Validate { .. }) => {
            return Ok(Outcome::with(
                Status::CheckFailed,
                json!({ "valid": false, "reason": msg }),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let alg = bundle.flagged()?;
    match command {
        Command::Validate { .. } => {
            let structure = bundle.algebra.validate_structure();
            let flag = bundle.flag.validate(&bundle.algebra)?;
            Ok(Outcome::check(
                structure.passed() && flag.ok,
                json!({ "valid": structure.passed() && flag.ok, "structure": structure, "flag": flag }),
            ))
        }
        Command::Info { .. } => {
            let series = bundle.algebra.series_and_center();
            let generic = generic_jump_set(&alg, GenericMode::Symbolic)?;
            Ok(Outcome::ok(json!({
                "name": bundle.algebra.name(),
                "provenance": bundle.provenance,
                "dim": alg.dim(),
                "basis": bundle.algebra.labels(),
                "nilpotency_class": bundle.algebra.validate_structure().nilpotency_class,
                "lower_central_dims": series.lower_central.iter().map(|s| s.dim()).collect::<Vec<_>>(),
                "center_dim": series.center.dim(),
                "generic_jump_set": generic,
                "stepwise_layers": bundle.stepwise.as_ref().map(|s| s.chain.clone()),
            })))
        }
        Command::Jumpset { xi, .. } => {
            let xi = parse_xi(&alg, xi)?;
            let j = jump_set(&alg, &xi)?;
            let iso = isotropy(&alg, &xi)?;
            Ok(Outcome::ok(json!({
                "jump_set": j,
                "orbit_dim": j.len(),
                "isotropy_dim": iso.isotropy.dim(),
            })))
        }
        Command::Generic {
            mode,
            trials,
            seed,
            bound,
            ..
        } => {
            let mode = match mode {
                Mode::Symbolic => GenericMode::Symbolic,
                Mode::Sampled => GenericMode::Sampled(SamplingConfig {
                    trials: *trials,
                    seed: *seed,
                    bound: *bound,
                }),
            };
            let e = generic_jump_set(&alg, mode)?;
            let mut result = json!({ "e": e });
            if let GenericMode::Sampled(cfg) = mode {
                result["trials"] = json!(cfg.trials);
                result["bound"] = json!(cfg.bound);
            }
            Ok(Outcome::ok(result))
        }
        Command::Flat { .. } => Ok(Outcome::ok(flat_orbit_test(&alg))),
        Command::Stepwise { .. } => {
            let report = stepwise_of(&bundle, &alg)?.check_hypotheses();
            Ok(Outcome::check(report.ok, report))
        }
        Command::Member { xi, .. } => {
            let s = stepwise_of(&bundle, &alg)?;
            let xi = parse_xi(&alg, xi)?;
            let member = s.x_membership(&xi)?;
            Ok(Outcome::check(
                member,
                json!({ "member": member, "jump_set": jump_set(&alg, &xi)? }),
            ))
        }
        Command::Canonical { xi, .. } => {
            let s = stepwise_of(&bundle, &alg)?;
            let xi = parse_xi(&alg, xi)?;
            match s.canonical_representative(&xi) {
                Ok(rep) => Ok(Outcome::ok(rep)),
                Err(e) => stepwise_failure(e),
            }
        }
        Command::Constant { xi, jump_set: e, .. } => {
            let xi = parse_xi(&alg, xi)?;
            let data = match (e, &bundle.stepwise) {
                (Some(e), _) => square_integrability_constant(&alg, &xi, &parse_jump_set(e)?),
                (None, Some(_)) => match stepwise_of(&bundle, &alg)?.main3_constant(&xi) {
                    Ok(d) => Ok(d),
                    Err(e) => return stepwise_failure(e),
                },
                (None, None) => square_integrability_constant(&alg, &xi, &jump_set(&alg, &xi)?),
            };
            match data {
                Ok(d) => Ok(Outcome::ok(json!({
                    "jump_set": d.jump_set,
                    "orbit_dim": d.orbit_dim,
                    "two_pi_power": d.two_pi_power.to_string(),
                    "pfaffian_abs": d.pfaffian_abs,
                }))),
                Err(e) => Ok(Outcome::with(Status::CheckFailed, json!({ "error": e.to_string() }))),
            }
        }
        Command::Selftest {
            trials, seed, bound, ..
        } => {
            if *trials == 0 {
                return Err(InputError("--trials must be at least 1".into()));
            }
            let report = selftest(
                &bundle,
                SamplingConfig {
                    trials: *trials,
                    seed: *seed,
                    bound: *bound,
                },
            )?;
            Ok(Outcome::check(report.ok, report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = &cli.command;
    let path = command.file();
    let bytes = fs::read(path);
    let digest = bytes.as_ref().ok().map(|b| hex::encode(Sha256::digest(b)));
    let outcome = match &bytes {
        Err(e) => Err(InputError(format!("cannot read {}: {e}", path.display()))),
        Ok(b) => match std::str::from_utf8(b) {
            Ok(text) => run(command, text),
            Err(e) => Err(InputError(format!("{} is not UTF-8: {e}", path.display()))),
        },
    };
    let (status, result) = match outcome {
        Ok(o) => (o.status, o.result),
        Err(InputError(msg)) => {
            eprintln!("nilstrat {}: {msg}", command.name());
            (Status::InputError, json!({ "error": msg }))
        }
    };
    let mut report = serde_json::Map::new();
    report.insert("command".into(), json!(command.name()));
    report.insert("input".into(), json!(path.display().to_string()));
    report.insert("input_sha256".into(), json!(digest));
    if let Some(seed) = command.seed() {
        report.insert("seed".into(), json!(seed));
    }
    report.insert("status".into(), json!(status));
    report.insert("result".into(), result);
    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(status.exit_code())
}
