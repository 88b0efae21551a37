//! Independent numeric oracle: adaptive embedded Runge-Kutta (Dormand-
//! Prince 5(4)) for scalar Riccati problems, with blow-up detection.
//!
//! Riccati solutions genuinely blow up at movable poles; the stepper
//! declares a pole when |y| exceeds a threshold or the step controller
//! collapses, and reports the last good abscissa.

use crate::tol;

use super::{RiccatiError, RiccatiProblem};

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedEnd,
    /// |y| exceeded the blow-up threshold or the step size collapsed; the
    /// payload is the last abscissa with a finite, sub-threshold sample.
    PoleDetected { last_good_x: f64 },
    StepFailure { x: f64 },
}

/// An accepted-step trace of one numeric integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Samples ordered by increasing `x`, all finite.
    pub samples: Vec<(f64, f64)>,
    pub termination: Termination,
    pub rtol: f64,
    pub atol: f64,
}

impl Trajectory {
    /// Value at the end of the trace (largest or smallest x depending on
    /// the integration direction is irrelevant: last accepted sample).
    pub fn last(&self) -> (f64, f64) {
        *self.samples.last().expect("trajectory has samples")
    }

    pub fn reached_end(&self) -> bool {
        matches!(self.termination, Termination::ReachedEnd)
    }

    pub fn pole(&self) -> Option<f64> {
        match self.termination {
            Termination::PoleDetected { last_good_x } => Some(last_good_x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    pub y_blowup: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions {
            rtol: tol::RK_RTOL,
            atol: tol::RK_ATOL,
            y_blowup: tol::Y_BLOWUP,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*: weights of the embedded error estimate
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrate `y' = a + b·y + c·y²` from `(x0, y0)` toward `x_end` with
/// default tolerances (rtol 1e-9, atol 1e-12).
pub fn integrate_numeric(
    p: &RiccatiProblem,
    x0: f64,
    y0: f64,
    direction: f64,
    x_end: f64,
) -> Result<Trajectory, RiccatiError> {
    integrate_numeric_with(p, x0, y0, direction, x_end, &RkOptions::default())
}

pub fn integrate_numeric_with(
    p: &RiccatiProblem,
    x0: f64,
    y0: f64,
    direction: f64,
    x_end: f64,
    opts: &RkOptions,
) -> Result<Trajectory, RiccatiError> {
    let iv = p.interval();
    for x in [x0, x_end] {
        if !iv.contains(x) {
            return Err(RiccatiError::Invalid(format!(
                "integration endpoint {x} outside [{}, {}]",
                iv.lo, iv.hi
            )));
        }
    }
    let dir = direction.signum();
    if dir == 0.0 || (x_end - x0) * dir <= 0.0 {
        return Err(RiccatiError::BadDirection {
            direction,
            x0,
            x_end,
        });
    }

    let h_min = tol::H_MIN_FRACTION * iv.width();
    let span = (x_end - x0).abs();
    let mut h = dir * (span / 100.0).min(0.1 * (1.0 + x0.abs()));
    let mut x = x0;
    let mut y = y0;
    let mut samples = vec![(x, y)];
    let rhs = |x: f64, y: f64| p.rhs(x, y);
    let mut k1 = rhs(x, y)?;

    let finish = |mut samples: Vec<(f64, f64)>, termination: Termination| {
        if dir < 0.0 {
            samples.reverse();
        }
        Ok(Trajectory {
            samples,
            termination,
            rtol: opts.rtol,
            atol: opts.atol,
        })
    };

    if y0.abs() > opts.y_blowup {
        return finish(samples, Termination::PoleDetected { last_good_x: x0 });
    }

    for _ in 0..opts.max_steps {
        if (x_end - x) * dir <= h_min {
            return finish(samples, Termination::ReachedEnd);
        }
        if (x_end - x).abs() < h.abs() {
            h = x_end - x;
        }
        if h.abs() < h_min {
            return finish(samples, Termination::PoleDetected { last_good_x: x });
        }

        let k2 = rhs(x + C2 * h, y + h * A21 * k1)?;
        let k3 = rhs(x + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
        let k4 = rhs(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
        let k5 = rhs(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
        let k6 = rhs(
            x + h,
            y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
        )?;
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let x_new = x + h;

        if !y_new.is_finite() {
            h *= 0.25;
            if h.abs() < h_min {
                return finish(samples, Termination::PoleDetected { last_good_x: x });
            }
            continue;
        }

        // FSAL stage, also the error estimate's k7
        let k7 = rhs(x_new, y_new)?;
        let err_raw = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sc = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let err = (err_raw / sc).abs();

        if err <= 1.0 {
            x = x_new;
            y = y_new;
            k1 = k7;
            if y.abs() > opts.y_blowup {
                let last_good_x = samples_last_x(&samples);
                return finish(samples, Termination::PoleDetected { last_good_x });
            }
            samples.push((x, y));
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    finish(samples, Termination::StepFailure { x })
}

fn samples_last_x(samples: &[(f64, f64)]) -> f64 {
    samples.last().map(|&(x, _)| x).expect("nonempty")
}
