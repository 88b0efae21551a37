//! Command-line front end: `riccati-lab <construct|verify|star|fuzz>`.
//!
//! Every run is deterministic: identical configuration (including the
//! fuzz seed) produces byte-identical CSV outputs. All file writes go to
//! the configured output directory; machine-readable failures are a
//! single `ERROR <code> <detail>` line on standard error with a nonzero
//! exit status (2 guard violations, 3 tolerance failures, 4 metric
//! signature violations, 1 anything else).

pub mod args;
mod commands;

use std::path::PathBuf;

use crate::astro::AstroError;
use crate::calculus::CalculusError;
use crate::cases::{Branch, CaseError};
use crate::exprlang::ParseError;
use crate::riccati::RiccatiError;
use crate::tol;

pub use commands::{cmd_construct, cmd_fuzz, cmd_star, cmd_verify};

/// Environment variable overriding the default quadrature tolerance.
pub const TOL_QUAD_ENV: &str = "RICCATI_LAB_TOL_QUAD";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out_dir: PathBuf,
    pub tol_quad: f64,
}

#[derive(Debug, Clone)]
pub enum Command {
    Construct(ConstructCfg),
    Verify(VerifyCfg),
    Star(StarCfg),
    Fuzz(FuzzCfg),
}

#[derive(Debug, Clone)]
pub struct ConstructCfg {
    pub case: u8,
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub f: String,
    /// C1/C3/C5/C7/C12 flags; at most the case's own may be set.
    pub constants: ConstantFlags,
    pub branch: Option<Branch>,
    pub interval: (f64, f64),
    pub x0: Option<f64>,
    /// Family constants for the `y(C=…)` columns of `case.csv`.
    pub family_cs: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ConstantFlags {
    pub c1: Option<f64>,
    pub c3: Option<f64>,
    pub c5: Option<f64>,
    pub c7: Option<f64>,
    pub c12: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VerifyCfg {
    pub construct: ConstructCfg,
    /// Family constant of the member compared against the oracle.
    pub family_c: f64,
}

#[derive(Debug, Clone)]
pub struct StarCfg {
    pub eta: String,
    pub delta: String,
    pub a0: f64,
    pub radius: f64,
    /// Direct metric slope; mutually exclusive with `case`.
    pub u: Option<String>,
    pub case: Option<u8>,
    pub f: Option<String>,
    pub constants: ConstantFlags,
    pub branch: Option<Branch>,
    /// Family constant used when solving via a case construction.
    pub family_c: f64,
}

#[derive(Debug, Clone)]
pub struct FuzzCfg {
    /// Empty means all ten cases.
    pub cases: Vec<u8>,
    pub n: usize,
    pub seed: u64,
}

/// Error with a stable machine-readable code and exit status.
#[derive(Debug, thiserror::Error)]
#[error("{detail}")]
pub struct CliError {
    pub code: &'static str,
    pub exit: i32,
    pub detail: String,
}

impl CliError {
    pub fn new(code: &'static str, exit: i32, detail: impl Into<String>) -> CliError {
        CliError {
            code,
            exit,
            detail: detail.into(),
        }
    }

    pub fn invalid(detail: impl Into<String>) -> CliError {
        CliError::new("SPEC", 1, detail)
    }

    /// The single-line form printed to standard error.
    pub fn error_line(&self) -> String {
        format!("ERROR {} {}", self.code, self.detail.replace('\n', " "))
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> CliError {
        CliError::new("PARSE", 1, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::new("IO", 1, e.to_string())
    }
}

impl From<CalculusError> for CliError {
    fn from(e: CalculusError) -> CliError {
        match &e {
            CalculusError::ToleranceNotMet { .. } => CliError::new("TOLERANCE", 3, e.to_string()),
            _ => CliError::new("NUMERIC", 1, e.to_string()),
        }
    }
}

impl From<RiccatiError> for CliError {
    fn from(e: RiccatiError) -> CliError {
        match &e {
            RiccatiError::ParticularNotASolution { .. } => {
                CliError::new("TOLERANCE", 3, e.to_string())
            }
            RiccatiError::ParticularVanishes { .. } => CliError::new("GUARD", 2, e.to_string()),
            RiccatiError::PoleAt { .. } => CliError::new("POLE", 1, e.to_string()),
            RiccatiError::Calculus(c) => c.clone().into(),
            _ => CliError::new("NUMERIC", 1, e.to_string()),
        }
    }
}

impl From<CaseError> for CliError {
    fn from(e: CaseError) -> CliError {
        match &e {
            CaseError::GuardViolation { .. } => CliError::new("GUARD", 2, e.to_string()),
            CaseError::RadicandNegative { .. } => CliError::new("RADICAND", 2, e.to_string()),
            CaseError::ConditionResidualTooLarge { .. } => {
                CliError::new("TOLERANCE", 3, e.to_string())
            }
            CaseError::InvalidSpec(_) => CliError::new("SPEC", 1, e.to_string()),
            CaseError::Riccati(r) => r.clone().into(),
            CaseError::Calculus(c) => c.clone().into(),
        }
    }
}

impl From<AstroError> for CliError {
    fn from(e: AstroError) -> CliError {
        match &e {
            AstroError::MetricSignatureViolation { .. } => {
                CliError::new("METRIC", 4, e.to_string())
            }
            AstroError::NotASolution { .. } => CliError::new("TOLERANCE", 3, e.to_string()),
            AstroError::IrregularAnisotropy { .. } => CliError::new("SPEC", 1, e.to_string()),
            AstroError::Invalid(_) => CliError::new("SPEC", 1, e.to_string()),
            AstroError::Riccati(r) => r.clone().into(),
            AstroError::Calculus(c) => c.clone().into(),
        }
    }
}

/// Run a configuration to completion, writing outputs into
/// `cfg.out_dir`. Returns the process exit code; failures are printed as
/// one `ERROR` line on standard error.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = match &cfg.command {
        Command::Construct(c) => cmd_construct(c, cfg),
        Command::Verify(c) => cmd_verify(c, cfg),
        Command::Star(c) => cmd_star(c, cfg),
        Command::Fuzz(c) => cmd_fuzz(c, cfg),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.error_line());
            e.exit
        }
    }
}

/// Resolve the quadrature tolerance: explicit flag, then the
/// `RICCATI_LAB_TOL_QUAD` environment variable, then the default.
pub fn resolve_tol_quad(flag: Option<f64>) -> Result<f64, CliError> {
    if let Some(v) = flag {
        return check_tol(v);
    }
    match std::env::var(TOL_QUAD_ENV) {
        Ok(s) => {
            let v: f64 = s
                .parse()
                .map_err(|_| CliError::invalid(format!("{TOL_QUAD_ENV}={s} is not a number")))?;
            check_tol(v)
        }
        Err(_) => Ok(tol::TOL_QUAD),
    }
}

fn check_tol(v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(format!(
            "quadrature tolerance must be positive and finite, got {v}"
        )))
    }
}
