//! Differentiation, adaptive quadrature, and reusable antiderivative
//! objects.
//!
//! [`ScalarFunction`] is the crate's working representation of a real
//! function of one real variable: an evaluator on an interval, an optional
//! exact derivative, and a label for diagnostics. [`CumulativeIntegral`]
//! materializes `F(x) = ∫ g` from a base point as an evaluable object; the
//! nested integral-of-exponential-of-integral expressions in closed-form
//! Riccati solutions are built by composing the two, innermost first, so
//! every layer is memoized on its own grid.

mod quad;

use std::sync::Arc;

pub use quad::{antiderivative, eval_integral, CumulativeIntegral};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(
            lo.is_finite() && hi.is_finite() && lo < hi,
            "invalid interval [{lo}, {hi}]"
        );
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Roundoff slack used when clamping query points to the interval.
    fn slack(&self) -> f64 {
        1e-12 * (1.0 + self.lo.abs() + self.hi.abs())
    }

    /// Clamp `x` into the interval if it is within roundoff slack of it.
    pub fn clamp_inside(&self, x: f64) -> Option<f64> {
        if self.contains(x) {
            Some(x)
        } else if x > self.lo - self.slack() && x < self.hi + self.slack() {
            Some(x.clamp(self.lo, self.hi))
        } else {
            None
        }
    }

    /// Intersection, if non-degenerate.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then(|| Interval::new(lo, hi))
    }

    /// `n` equally spaced points including both endpoints (`n >= 2`).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = self.width() / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lo + h * i as f64
                }
            })
            .collect()
    }
}

/// Evaluation failure at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointError {
    pub x: f64,
    pub message: String,
}

impl PointError {
    pub fn new(x: f64, message: impl Into<String>) -> PointError {
        PointError {
            x,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for PointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at x = {}: {}", self.x, self.message)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CalculusError {
    #[error("x = {x} is outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("integrand is not evaluable at x = {x}: {message}")]
    NonFiniteIntegrand { x: f64, message: String },
    #[error("quadrature tolerance not met on panel [{a}, {b}]: achieved error estimate {achieved:e}")]
    ToleranceNotMet { a: f64, b: f64, achieved: f64 },
    #[error("evaluation failed at x = {x}: {message}")]
    EvalFailed { x: f64, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

type EvalFn = Arc<dyn Fn(f64) -> Result<f64, PointError> + Send + Sync>;

/// An evaluable real function of one real variable on an interval, with an
/// optional exact derivative.
///
/// Cloning is cheap (shared closures). Evaluation is deterministic and
/// safe to call concurrently.
#[derive(Clone)]
pub struct ScalarFunction {
    label: String,
    interval: Interval,
    f: EvalFn,
    df: Option<EvalFn>,
    polynomial_hint: Option<bool>,
}

impl std::fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("interval", &self.interval)
            .field("exact_derivative", &self.df.is_some())
            .finish()
    }
}

impl ScalarFunction {
    /// From an infallible closure. Non-finite outputs are reported as
    /// evaluation failures.
    pub fn new(
        label: impl Into<String>,
        interval: Interval,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> ScalarFunction {
        Self::fallible(label, interval, move |x| Ok(f(x)))
    }

    /// From a closure that can fail pointwise.
    pub fn fallible(
        label: impl Into<String>,
        interval: Interval,
        f: impl Fn(f64) -> Result<f64, PointError> + Send + Sync + 'static,
    ) -> ScalarFunction {
        let wrapped = move |x: f64| {
            let v = f(x)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(PointError::new(x, "non-finite value"))
            }
        };
        ScalarFunction {
            label: label.into(),
            interval,
            f: Arc::new(wrapped),
            df: None,
            polynomial_hint: None,
        }
    }

    pub fn constant(label: impl Into<String>, interval: Interval, v: f64) -> ScalarFunction {
        ScalarFunction::new(label, interval, move |_| v).with_polynomial_hint(true)
    }

    pub fn with_derivative(
        mut self,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> ScalarFunction {
        self.df = Some(Arc::new(move |x| Ok(df(x))));
        self
    }

    pub fn with_derivative_fallible(
        mut self,
        df: impl Fn(f64) -> Result<f64, PointError> + Send + Sync + 'static,
    ) -> ScalarFunction {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_polynomial_hint(mut self, is_polynomial: bool) -> ScalarFunction {
        self.polynomial_hint = Some(is_polynomial);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> ScalarFunction {
        self.label = label.into();
        self
    }

    /// Restrict to a subinterval (shares the evaluators).
    pub fn restricted(&self, interval: Interval) -> ScalarFunction {
        let mut out = self.clone();
        out.interval = interval;
        out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.df.is_some()
    }

    pub fn polynomial_hint(&self) -> Option<bool> {
        self.polynomial_hint
    }

    /// Evaluate with a domain check.
    pub fn eval(&self, x: f64) -> Result<f64, CalculusError> {
        let x = self
            .interval
            .clamp_inside(x)
            .ok_or(CalculusError::OutOfDomain {
                x,
                lo: self.interval.lo,
                hi: self.interval.hi,
            })?;
        (self.f)(x).map_err(|e| CalculusError::EvalFailed {
            x: e.x,
            message: e.message,
        })
    }

    /// Evaluate without the domain check (used by quadrature internals,
    /// which generate their own points inside the interval).
    pub(crate) fn value(&self, x: f64) -> Result<f64, PointError> {
        (self.f)(x)
    }

    /// Exact derivative at `x`, if one is attached.
    pub fn exact_derivative(&self, x: f64) -> Option<Result<f64, CalculusError>> {
        self.df.as_ref().map(|df| {
            df(x).map_err(|e| CalculusError::EvalFailed {
                x: e.x,
                message: e.message,
            })
        })
    }
}

/// Derivative of `f` at `x`: the exact derivative when `f` carries one,
/// otherwise a 4th-order central difference with
/// `h = eps^(1/5)·(1 + |x|)`, shrunk if needed to keep the stencil inside
/// the domain.
pub fn differentiate(f: &ScalarFunction, x: f64) -> Result<f64, CalculusError> {
    let iv = f.interval();
    let x = iv.clamp_inside(x).ok_or(CalculusError::OutOfDomain {
        x,
        lo: iv.lo,
        hi: iv.hi,
    })?;
    if let Some(exact) = f.exact_derivative(x) {
        return exact;
    }
    let margin = (x - iv.lo).min(iv.hi - x);
    if margin <= 0.0 {
        return Err(CalculusError::OutOfDomain {
            x,
            lo: iv.lo,
            hi: iv.hi,
        });
    }
    let mut h = f64::EPSILON.powf(0.2) * (1.0 + x.abs());
    if 2.0 * h > margin {
        h = 0.5 * margin;
    }
    let ev = |t: f64| {
        f.value(t).map_err(|e| CalculusError::EvalFailed {
            x: e.x,
            message: e.message,
        })
    };
    let fm2 = ev(x - 2.0 * h)?;
    let fm1 = ev(x - h)?;
    let fp1 = ev(x + h)?;
    let fp2 = ev(x + 2.0 * h)?;
    Ok((-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h))
}

#[cfg(test)]
mod tests;
