//! Construction and verification of closed-form solution families for the
//! Riccati equation `y' = a(x) + b(x)·y + c(x)·y²`.
//!
//! The crate is organized around a small numeric kernel and a set of
//! coefficient-construction recipes:
//!
//! - [`exprlang`]: a parser/evaluator for one-variable scalar expressions
//!   with exact symbolic derivatives. Coefficients and generating functions
//!   enter the library as expression strings.
//! - [`calculus`]: numeric differentiation, adaptive quadrature, and
//!   reusable antiderivative objects. Every indefinite integral appearing in
//!   a closed-form solution is materialized as a [`calculus::CumulativeIntegral`].
//! - [`riccati`]: the problem type, the general-solution-from-particular
//!   formulas (three equivalent forms), an independent adaptive Runge-Kutta
//!   integrator with pole detection, classical integrability detectors, and
//!   the cross-ratio diagnostic.
//! - [`cases`]: ten integrability case constructions. Each case completes a
//!   coefficient triple from user-chosen free coefficients, a generating
//!   function, and constants, and returns a particular solution plus the
//!   closed-form general solution family.
//! - [`astro`]: the anisotropic relativistic star application. Maps a mass
//!   profile and anisotropy to a Riccati problem in the metric variable,
//!   reconstructs the metric, and checks physicality conditions.
//! - [`cli`]: the `riccati-lab` command-line front end (construct / verify /
//!   star / fuzz) with CSV and gnuplot-script output.

pub mod astro;
pub mod calculus;
pub mod cases;
pub mod cli;
pub mod exprlang;
pub mod riccati;
pub mod tol;

pub use calculus::{CumulativeIntegral, Interval, ScalarFunction};
pub use exprlang::Expr;
pub use riccati::{RiccatiProblem, SolutionFamily, Trajectory};
