//! The Riccati problem type, general-solution formulas, a numeric
//! integration oracle with pole detection, and solution-family
//! diagnostics.
//!
//! A Riccati equation is `y' = a(x) + b(x)·y + c(x)·y²`. One particular
//! solution unlocks the whole solution family through a single quadrature;
//! [`family_from_bc`], [`family_from_ac`], and [`family_from_ab`] build that
//! family in its three equivalent forms. Families have movable poles
//! (denominator zeros whose location depends on the integration constant);
//! poles are first-class reported events, located by denominator sign
//! change and bisection.

mod classical;
pub(crate) mod family;
mod oracle;

pub use classical::{
    detect_classical, detect_classical_with_grid, ClassicalReport, CoefficientSumFinding,
    DiscriminantFinding, LambdaMuFit,
};
pub use family::{
    family_from_ab, family_from_ac, family_from_bc, family_residual_sup, FamilyOptions,
    FormulaTag, SolutionFamily,
};
pub use oracle::{integrate_numeric, integrate_numeric_with, RkOptions, Termination, Trajectory};

use crate::calculus::{differentiate, CalculusError, Interval, ScalarFunction};
use crate::tol;

#[derive(Debug, Clone, thiserror::Error)]
pub enum RiccatiError {
    #[error("coefficient functions have no common interval")]
    NoCommonInterval,
    #[error("coefficient `{name}` failed at x = {x}: {message}")]
    CoefficientEvaluation {
        name: String,
        x: f64,
        message: String,
    },
    #[error(
        "candidate particular solution has residual {residual:e} at x = {x} (tolerance {tol:e})"
    )]
    ParticularNotASolution { residual: f64, x: f64, tol: f64 },
    #[error("particular solution vanishes near x = {x} (|y_p| = {value:e})")]
    ParticularVanishes { x: f64, value: f64 },
    #[error("family member C = {c} has a pole at x = {x}")]
    PoleAt { c: f64, x: f64 },
    #[error("degenerate quadruple: {which} has magnitude {value:e} at x = {x}")]
    DegenerateQuadruple { which: String, value: f64, x: f64 },
    #[error("direction {direction} is inconsistent with integrating from {x0} toward {x_end}")]
    BadDirection { direction: f64, x0: f64, x_end: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// A coefficient triple `(a, b, c)` on a common interval.
#[derive(Debug, Clone)]
pub struct RiccatiProblem {
    a: ScalarFunction,
    b: ScalarFunction,
    c: ScalarFunction,
    interval: Interval,
}

impl RiccatiProblem {
    /// Build from three coefficients; their domains must overlap, and each
    /// coefficient must be evaluable on a probe grid of the overlap.
    pub fn new(
        a: ScalarFunction,
        b: ScalarFunction,
        c: ScalarFunction,
    ) -> Result<RiccatiProblem, RiccatiError> {
        let interval = a
            .interval()
            .intersect(&b.interval())
            .and_then(|iv| iv.intersect(&c.interval()))
            .ok_or(RiccatiError::NoCommonInterval)?;
        let p = RiccatiProblem { a, b, c, interval };
        for x in interval.grid(9) {
            p.coeffs_at(x)?;
        }
        Ok(p)
    }

    pub fn a(&self) -> &ScalarFunction {
        &self.a
    }

    pub fn b(&self) -> &ScalarFunction {
        &self.b
    }

    pub fn c(&self) -> &ScalarFunction {
        &self.c
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn coeffs_at(&self, x: f64) -> Result<(f64, f64, f64), RiccatiError> {
        let one = |f: &ScalarFunction, name: &str| {
            f.eval(x).map_err(|e| RiccatiError::CoefficientEvaluation {
                name: name.to_string(),
                x,
                message: e.to_string(),
            })
        };
        Ok((one(&self.a, "a")?, one(&self.b, "b")?, one(&self.c, "c")?))
    }

    /// Right-hand side `a + b·y + c·y²` at `(x, y)`.
    pub fn rhs(&self, x: f64, y: f64) -> Result<f64, RiccatiError> {
        let (a, b, c) = self.coeffs_at(x)?;
        Ok(a + b * y + c * y * y)
    }
}

/// Residual `y'(x) - [a(x) + b(x)·y(x) + c(x)·y²(x)]`, with `y'` from the
/// exact derivative when `y` carries one, else central differences.
pub fn residual(p: &RiccatiProblem, y: &ScalarFunction, x: f64) -> Result<f64, RiccatiError> {
    let yv = y.eval(x)?;
    let dy = differentiate(y, x)?;
    Ok(dy - p.rhs(x, yv)?)
}

/// Sup of the normalized residual of `y` over an `n`-point grid:
/// `sup |residual| / (1 + sup |y|)`.
pub fn residual_sup(
    p: &RiccatiProblem,
    y: &ScalarFunction,
    n: usize,
) -> Result<(f64, f64), RiccatiError> {
    let mut worst = 0.0f64;
    let mut worst_x = p.interval.lo;
    let mut y_sup = 0.0f64;
    for x in p.interval.grid(n) {
        let r = residual(p, y, x)?.abs();
        y_sup = y_sup.max(y.eval(x)?.abs());
        if r > worst {
            worst = r;
            worst_x = x;
        }
    }
    Ok((worst / (1.0 + y_sup), worst_x))
}

/// Cross-ratio `((y1-y3)(y2-y4)) / ((y1-y4)(y2-y3))` at `x`.
///
/// For four solutions of the same Riccati equation this is constant in
/// `x`, which is the testable form of the classical statement that three
/// known solutions determine every other one without quadratures.
pub fn cross_ratio(
    y1: &ScalarFunction,
    y2: &ScalarFunction,
    y3: &ScalarFunction,
    y4: &ScalarFunction,
    x: f64,
) -> Result<f64, RiccatiError> {
    let v1 = y1.eval(x)?;
    let v2 = y2.eval(x)?;
    let v3 = y3.eval(x)?;
    let v4 = y4.eval(x)?;
    let scale = 1.0 + v1.abs().max(v2.abs()).max(v3.abs()).max(v4.abs());
    let d14 = v1 - v4;
    let d23 = v2 - v3;
    if d14.abs() < tol::EPS_DIV * scale {
        return Err(RiccatiError::DegenerateQuadruple {
            which: "y1 - y4".to_string(),
            value: d14.abs(),
            x,
        });
    }
    if d23.abs() < tol::EPS_DIV * scale {
        return Err(RiccatiError::DegenerateQuadruple {
            which: "y2 - y3".to_string(),
            value: d23.abs(),
            x,
        });
    }
    Ok(((v1 - v3) * (v2 - v4)) / (d14 * d23))
}

#[cfg(test)]
mod tests;
