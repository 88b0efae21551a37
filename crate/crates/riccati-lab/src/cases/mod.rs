//! Ten integrability case constructions.
//!
//! Each case completes a Riccati coefficient triple from two free
//! coefficients, a generating function, and (for some cases) a constant
//! and a branch sign. The completed triple satisfies an integral or
//! differential condition by construction, a particular solution can be
//! read off in closed form, and the general solution follows by one
//! quadrature.
//!
//! Which inputs a case consumes is data: see [`manifest`] for the
//! machine-readable schema (also shipped as `docs/case_manifest.json`).
//!
//! | case | solves for | generator | constant | branch |
//! |------|-----------|-----------|----------|--------|
//! | 1    | a         | f1        | C1       | -      |
//! | 2    | a         | f2        | -        | ±      |
//! | 3    | b         | f2        | C3       | fixed − |
//! | 4    | c         | f2        | C5       | ±      |
//! | 5    | a         | f3        | C7       | -      |
//! | 6    | b         | f3        | C7       | -      |
//! | 7    | a         | f4        | -        | -      |
//! | 8    | b         | f4        | -        | -      |
//! | 9    | c         | f4        | C12      | -      |
//! | 10   | a         | f5        | -        | ±      |
//!
//! Cases 3, 5, and 6 print a single square-root branch of their closed
//! form; that branch is a genuine solution only where the root matches the
//! sign of `b + 2c·y_p`, which the constructors enforce as a guard.

mod build;
mod checks;
mod manifest;
pub mod sampler;

pub use checks::{condition_sides, seed_relation_check, validate_condition};
pub use manifest::{manifest, manifest_json, BranchUse, CaseSchema};

use crate::calculus::{CalculusError, Interval, ScalarFunction};
use crate::riccati::{residual_sup, RiccatiError, RiccatiProblem, SolutionFamily};
use crate::tol;

#[derive(Debug, Clone, thiserror::Error)]
pub enum CaseError {
    #[error("invalid case spec: {0}")]
    InvalidSpec(String),
    #[error("guard violated: {guard} at x = {x}")]
    GuardViolation { guard: String, x: f64 },
    #[error("negative radicand at x = {x} (value {value:e})")]
    RadicandNegative { x: f64, value: f64 },
    #[error(
        "condition residual {residual:e} exceeds {tol:e}; quadrature tolerance is likely too loose"
    )]
    ConditionResidualTooLarge { residual: f64, tol: f64 },
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Case identifier, 1 through 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseId(u8);

impl CaseId {
    pub fn new(n: u8) -> Result<CaseId, CaseError> {
        if (1..=10).contains(&n) {
            Ok(CaseId(n))
        } else {
            Err(CaseError::InvalidSpec(format!(
                "case must be 1..=10, got {n}"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = CaseId> {
        (1..=10).map(CaseId)
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Square-root branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Inputs of one case construction.
///
/// Exactly the fields the chosen case consumes may be present (see the
/// schema table); [`construct`] rejects both missing and extraneous
/// inputs.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub case: CaseId,
    pub a: Option<ScalarFunction>,
    pub b: Option<ScalarFunction>,
    pub c: Option<ScalarFunction>,
    /// The generating function (f1 for case 1, f2 for 2-4, f3 for 5-6,
    /// f4 for 7-9, f5 for 10).
    pub generator: ScalarFunction,
    /// C1/C3/C5/C7/C12 where the case takes one; `None` means 0.
    pub constant: Option<f64>,
    pub branch: Option<Branch>,
    pub base_point: f64,
    pub interval: Interval,
}

impl CaseSpec {
    pub fn constant_value(&self) -> f64 {
        self.constant.unwrap_or(0.0)
    }

    /// Branch sign where applicable; case 3 defaults to the printed `-`
    /// branch.
    pub fn branch_sign(&self) -> f64 {
        self.branch.map(Branch::sign).unwrap_or(match self.case.0 {
            3 => -1.0,
            _ => 1.0,
        })
    }

    /// Schema validation against the case manifest.
    pub fn validate(&self) -> Result<(), CaseError> {
        let schema = &manifest()[(self.case.0 - 1) as usize];
        let present = [
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("c", self.c.is_some()),
        ];
        for (name, is_present) in present {
            let required = schema.free_coefficients.contains(&name);
            if required && !is_present {
                return Err(CaseError::InvalidSpec(format!(
                    "case {} requires coefficient `{name}`",
                    self.case
                )));
            }
            if !required && is_present {
                return Err(CaseError::InvalidSpec(format!(
                    "case {} does not take coefficient `{name}` (it is solved for or unused)",
                    self.case
                )));
            }
        }
        if schema.constant.is_none() && self.constant.is_some() {
            return Err(CaseError::InvalidSpec(format!(
                "case {} does not take a constant",
                self.case
            )));
        }
        match schema.branch {
            BranchUse::NotUsed => {
                if self.branch.is_some() {
                    return Err(CaseError::InvalidSpec(format!(
                        "case {} does not take a branch sign",
                        self.case
                    )));
                }
            }
            BranchUse::Selectable => {
                if self.branch.is_none() {
                    return Err(CaseError::InvalidSpec(format!(
                        "case {} requires a branch sign",
                        self.case
                    )));
                }
            }
            BranchUse::FixedMinus => {
                if self.branch == Some(Branch::Plus) {
                    return Err(CaseError::InvalidSpec(format!(
                        "case {}'s closed form is printed for the -√ branch only",
                        self.case
                    )));
                }
            }
        }
        if !self.interval.contains(self.base_point) {
            return Err(CaseError::InvalidSpec(format!(
                "base point {} outside [{}, {}]",
                self.base_point, self.interval.lo, self.interval.hi
            )));
        }
        for (name, f) in [
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
        ] {
            if let Some(f) = f {
                check_covers(name, f, self.interval)?;
            }
        }
        check_covers("generator", &self.generator, self.interval)?;
        Ok(())
    }
}

fn check_covers(name: &str, f: &ScalarFunction, iv: Interval) -> Result<(), CaseError> {
    let ok = f
        .interval()
        .intersect(&iv)
        .is_some_and(|overlap| overlap.lo <= iv.lo && overlap.hi >= iv.hi);
    if ok {
        Ok(())
    } else {
        Err(CaseError::InvalidSpec(format!(
            "input `{name}` (domain [{}, {}]) does not cover the working interval [{}, {}]",
            f.interval().lo,
            f.interval().hi,
            iv.lo,
            iv.hi
        )))
    }
}

/// Tolerances of one construction run.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub tol_quad: f64,
    pub tol_res: f64,
    pub tol_cond: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            tol_quad: tol::TOL_QUAD,
            tol_res: tol::TOL_RES,
            tol_cond: tol::TOL_COND,
        }
    }
}

/// A completed construction: the full coefficient triple, the particular
/// solution (with exact derivative), and the closed-form general solution
/// family in the case's integration constant.
#[derive(Debug, Clone)]
pub struct ConstructedCase {
    pub spec: CaseSpec,
    pub problem: RiccatiProblem,
    pub y_p: ScalarFunction,
    pub general: SolutionFamily,
    /// Normalized sup difference of the two sides of the case's defining
    /// condition, recomputed from the completed triple.
    pub condition_residual: f64,
}

/// Construct with default tolerances.
pub fn construct(spec: &CaseSpec) -> Result<ConstructedCase, CaseError> {
    construct_with(spec, &BuildOptions::default())
}

/// Build the completed triple, particular solution, and printed family
/// for `spec`, then cross-check the defining condition and the particular
/// solution's residual.
pub fn construct_with(spec: &CaseSpec, opts: &BuildOptions) -> Result<ConstructedCase, CaseError> {
    spec.validate()?;
    let mut cc = build::build(spec, opts)?;

    let (res, x) = residual_sup(&cc.problem, &cc.y_p, tol::CHECK_GRID)?;
    if res > opts.tol_res {
        return Err(CaseError::Riccati(RiccatiError::ParticularNotASolution {
            residual: res,
            x,
            tol: opts.tol_res,
        }));
    }

    let cond = validate_condition(&cc)?;
    cc.condition_residual = cond;
    if cond > opts.tol_cond {
        return Err(CaseError::ConditionResidualTooLarge {
            residual: cond,
            tol: opts.tol_cond,
        });
    }
    Ok(cc)
}

#[cfg(test)]
mod tests;
