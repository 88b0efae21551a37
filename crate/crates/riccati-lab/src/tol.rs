//! Default tolerances and numeric guards used across the crate.
//!
//! The quadrature, residual, and condition tolerances are chosen together:
//! closed-form families nest up to three quadrature layers, so the
//! end-to-end residual bar of `1e-6` needs each layer built at `1e-10`.

/// Adaptive quadrature tolerance for [`crate::calculus::antiderivative`].
pub const TOL_QUAD: f64 = 1e-10;

/// Residual tolerance for accepting a function as a solution of a Riccati
/// problem, relative to `1 + sup|y|`.
pub const TOL_RES: f64 = 1e-6;

/// Tolerance for coefficient identities (integrability conditions,
/// classical-condition detection), relative to `1 + ` the identity's scale.
pub const TOL_COND: f64 = 1e-9;

/// Denominators smaller than this (times the local scale) are treated as
/// vanishing: cross-ratio quadruples, division by a particular solution,
/// family denominators at a pole.
pub const EPS_DIV: f64 = 1e-9;

/// Half-width of the exclusion zone around a detected pole when taking sup
/// norms of a solution family.
pub const POLE_GUARD_RADIUS: f64 = 1e-2;

/// |y| threshold above which the numeric integrator declares blow-up.
pub const Y_BLOWUP: f64 = 1e8;

/// Relative tolerance of the embedded Runge-Kutta oracle.
pub const RK_RTOL: f64 = 1e-9;

/// Absolute tolerance of the embedded Runge-Kutta oracle.
pub const RK_ATOL: f64 = 1e-12;

/// Minimum step of the Runge-Kutta oracle, as a fraction of the interval
/// width. Step collapse below this is reported as a pole.
pub const H_MIN_FRACTION: f64 = 1e-13;

/// Tolerance for the exterior-metric matching check of a stellar profile.
pub const TOL_MATCH: f64 = 1e-6;

/// Boundary-pressure tolerance, relative to `max(1, sup|p_r|)`.
pub const TOL_BOUNDARY: f64 = 1e-6;

/// Guard quantities (case denominators, brackets) whose grid minimum falls
/// below this times `1 + sup` of the quantity are rejected as vanishing.
pub const EPS_GUARD: f64 = 1e-8;

/// Gradient magnitudes below this are "flat" for the equation-of-state
/// ratio dp/drho, which is then reported as indeterminate at that point.
pub const EPS_GRAD: f64 = 1e-10;

/// Number of grid points used by condition detectors.
pub const DETECT_GRID: usize = 129;

/// Number of grid points used by construction-time validation sweeps.
pub const CHECK_GRID: usize = 257;

/// Number of grid points of a stellar profile.
pub const PROFILE_GRID: usize = 513;
