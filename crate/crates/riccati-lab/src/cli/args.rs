//! Flag parsing: clap surface mapped onto [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cases::Branch;

use super::{
    resolve_tol_quad, CliError, Command, ConstantFlags, ConstructCfg, FuzzCfg, RunConfig, StarCfg,
    VerifyCfg,
};

#[derive(Debug, Parser)]
#[command(
    name = "riccati-lab",
    about = "Construct and verify closed-form Riccati solution families; model anisotropic stars",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,

    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Quadrature tolerance override (also RICCATI_LAB_TOL_QUAD).
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Build a coefficient triple and its closed-form solution family.
    Construct(ConstructArgs),
    /// Construct, then cross-check against the numeric oracle.
    Verify(VerifyArgs),
    /// Anisotropic star profile from eta/Delta and a metric slope.
    Star(StarArgs),
    /// Fuzz the case constructions with random guarded specs.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct CaseInputs {
    /// Case number (1-10).
    #[arg(long)]
    case: u8,

    /// Coefficient a(x) as an expression (cases that take it).
    #[arg(long)]
    a: Option<String>,

    /// Coefficient b(x) as an expression (cases that take it).
    #[arg(long)]
    b: Option<String>,

    /// Coefficient c(x) as an expression (cases that take it).
    #[arg(long)]
    c: Option<String>,

    /// Generating function (f1..f5 depending on the case).
    #[arg(long)]
    f: String,

    #[arg(long = "C1")]
    c1: Option<f64>,
    #[arg(long = "C3")]
    c3: Option<f64>,
    #[arg(long = "C5")]
    c5: Option<f64>,
    #[arg(long = "C7")]
    c7: Option<f64>,
    #[arg(long = "C12")]
    c12: Option<f64>,

    /// Square-root branch for cases 2, 4, 10 (case 3 is fixed to '-').
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,

    /// Working interval.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 1.0])]
    interval: Vec<f64>,

    /// Quadrature base point (default: left end of the interval).
    #[arg(long)]
    x0: Option<f64>,
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "+" | "plus" => Ok(Branch::Plus),
        "-" | "minus" => Ok(Branch::Minus),
        other => Err(format!("branch must be '+' or '-', got `{other}`")),
    }
}

impl CaseInputs {
    fn into_cfg(self, family_cs: Vec<f64>) -> ConstructCfg {
        ConstructCfg {
            case: self.case,
            a: self.a,
            b: self.b,
            c: self.c,
            f: self.f,
            constants: ConstantFlags {
                c1: self.c1,
                c3: self.c3,
                c5: self.c5,
                c7: self.c7,
                c12: self.c12,
            },
            branch: self.branch,
            interval: (self.interval[0], self.interval[1]),
            x0: self.x0,
            family_cs,
        }
    }
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[command(flatten)]
    inputs: CaseInputs,

    /// Family constants for the y columns of case.csv.
    #[arg(long = "Cs", value_delimiter = ',', num_args = 0..)]
    cs: Vec<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    inputs: CaseInputs,

    /// Family constant of the member compared against the oracle.
    #[arg(long = "C", default_value_t = 1.0)]
    family_c: f64,
}

#[derive(Debug, Args)]
struct StarArgs {
    /// Mass-function ratio eta(x) = m(r)/r^3 as an expression in x = r^2.
    #[arg(long)]
    eta: String,

    /// Anisotropy Delta(x) = p_perp - p_r as an expression.
    #[arg(long)]
    delta: String,

    /// Metric normalization A(x_eps) = A0.
    #[arg(long = "A0", default_value_t = 1.0)]
    a0: f64,

    /// Boundary radius.
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,

    /// Metric slope u(x) directly (mutually exclusive with --case).
    #[arg(long)]
    u: Option<String>,

    /// Solve for u via this case construction.
    #[arg(long)]
    case: Option<u8>,

    /// Generating function for --case.
    #[arg(long)]
    f: Option<String>,

    #[arg(long = "C1")]
    c1: Option<f64>,
    #[arg(long = "C3")]
    c3: Option<f64>,
    #[arg(long = "C5")]
    c5: Option<f64>,
    #[arg(long = "C7")]
    c7: Option<f64>,
    #[arg(long = "C12")]
    c12: Option<f64>,

    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,

    /// Family constant of the member used as u.
    #[arg(long = "Cfam", default_value_t = 1.0)]
    family_c: f64,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    /// Case number or 'all'.
    #[arg(long, default_value = "all")]
    case: String,

    /// Constructions per case.
    #[arg(long, default_value_t = 10)]
    n: usize,

    /// RNG seed (runs are reproducible per seed).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parse argv into a validated [`RunConfig`] (for tests and embedding).
pub fn parse_run_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    to_run_config(cli)
}

/// Parse the process arguments (exits with usage on flag errors).
pub fn parse_from_env() -> Result<RunConfig, CliError> {
    to_run_config(Cli::parse())
}

fn to_run_config(cli: Cli) -> Result<RunConfig, CliError> {
    let tol_quad = resolve_tol_quad(cli.tol_quad)?;
    let command = match cli.command {
        CliCommand::Construct(a) => Command::Construct(a.inputs.into_cfg(a.cs)),
        CliCommand::Verify(a) => Command::Verify(VerifyCfg {
            construct: a.inputs.into_cfg(Vec::new()),
            family_c: a.family_c,
        }),
        CliCommand::Star(a) => Command::Star(StarCfg {
            eta: a.eta,
            delta: a.delta,
            a0: a.a0,
            radius: a.radius,
            u: a.u,
            case: a.case,
            f: a.f,
            constants: ConstantFlags {
                c1: a.c1,
                c3: a.c3,
                c5: a.c5,
                c7: a.c7,
                c12: a.c12,
            },
            branch: a.branch,
            family_c: a.family_c,
        }),
        CliCommand::Fuzz(a) => {
            let cases = if a.case == "all" {
                Vec::new()
            } else {
                let n: u8 = a
                    .case
                    .parse()
                    .map_err(|_| CliError::invalid(format!("--case must be 1-10 or 'all', got `{}`", a.case)))?;
                vec![n]
            };
            Command::Fuzz(FuzzCfg {
                cases,
                n: a.n,
                seed: a.seed,
            })
        }
    };
    Ok(RunConfig {
        command,
        out_dir: cli.out,
        tol_quad,
    })
}
