//! Anisotropic relativistic star application.
//!
//! In the radial coordinate `x = r²`, a static spherically symmetric
//! interior with mass-function ratio `η(x) = m(r)/r³` and anisotropy
//! `Δ(x) = p_⊥ - p_r` reduces to a Riccati equation for the logarithmic
//! metric derivative `u = A'/A`:
//!
//! ```text
//! du/dx = (½η' + Δ/(4x))/(1 - 2xη) + (xη' + η)/(1 - 2xη) · u - u²
//! ```
//!
//! Geometric units `8πG = c = 1` throughout; no unit conversion layer.
//! Any solution `u` (for instance from one of the ten case
//! constructions, with `c ≡ -1` fixed by the mapping) reconstructs the
//! metric `A = A₀·e^{∫u}` and the matter profiles, which are then graded
//! against the standard physicality conditions.

use std::io::{self, Write};

use crate::calculus::{
    antiderivative, differentiate, CalculusError, Interval, PointError, ScalarFunction,
};
use crate::riccati::family::bisect_zero;
use crate::riccati::{residual_sup, RiccatiError, RiccatiProblem};
use crate::tol;

#[derive(Debug, Clone, thiserror::Error)]
pub enum AstroError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("metric signature violated: 1 - 2xη = {value:e} at x = {x}")]
    MetricSignatureViolation { x: f64, value: f64 },
    #[error("anisotropy irregular at the center: |Δ/x| = {ratio:e} at x = {x} and growing")]
    IrregularAnisotropy { x: f64, ratio: f64 },
    #[error("u does not solve the stellar equation: residual {residual:e} at x = {x}")]
    NotASolution { residual: f64, x: f64 },
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Star inputs: `η`, `Δ`, the metric normalization, and the boundary
/// radius. The working domain is `[x_ε, R²]` with `x_ε = 1e-6·R²`;
/// profiles carry one-sided limits toward the center.
#[derive(Debug, Clone)]
pub struct StellarModel {
    eta: ScalarFunction,
    delta: ScalarFunction,
    a0: f64,
    radius: f64,
    interval: Interval,
}

impl StellarModel {
    pub fn new(
        eta: ScalarFunction,
        delta: ScalarFunction,
        a0: f64,
        radius: f64,
    ) -> Result<StellarModel, AstroError> {
        if !(a0 > 0.0) {
            return Err(AstroError::Invalid(format!("A0 must be positive, got {a0}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(AstroError::Invalid(format!(
                "boundary radius must be positive, got {radius}"
            )));
        }
        let x_hi = radius * radius;
        let interval = Interval::new(1e-6 * x_hi, x_hi);
        for (name, f) in [("eta", &eta), ("delta", &delta)] {
            let covered = f
                .interval()
                .intersect(&interval)
                .is_some_and(|ov| ov.lo <= interval.lo && ov.hi >= interval.hi);
            if !covered {
                return Err(AstroError::Invalid(format!(
                    "{name} (domain [{}, {}]) does not cover [{}, {}]",
                    f.interval().lo,
                    f.interval().hi,
                    interval.lo,
                    interval.hi
                )));
            }
        }
        let model = StellarModel {
            eta,
            delta,
            a0,
            radius,
            interval,
        };
        model.check_signature()?;
        model.check_center_regularity()?;
        Ok(model)
    }

    pub fn eta(&self) -> &ScalarFunction {
        &self.eta
    }

    pub fn delta(&self) -> &ScalarFunction {
        &self.delta
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Working interval `[x_ε, R²]`.
    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// `V(x) = 1 - 2xη(x)`, with exact derivative when `η` carries one.
    pub fn metric_v(&self) -> ScalarFunction {
        let eta = self.eta.clone();
        let v = ScalarFunction::fallible("V", self.interval, move |x| {
            Ok(1.0 - 2.0 * x * eta.value(x)?)
        });
        let eta = self.eta.clone();
        v.with_derivative_fallible(move |x| {
            let de = differentiate(&eta, x).map_err(|e| PointError::new(x, e.to_string()))?;
            Ok(-2.0 * (eta.value(x)? + x * de))
        })
    }

    fn check_signature(&self) -> Result<(), AstroError> {
        let v = self.metric_v();
        let mut prev: Option<(f64, f64)> = None;
        for x in self.interval.grid(tol::PROFILE_GRID) {
            let vv = v.eval(x)?;
            if vv <= 0.0 {
                // refine toward the first crossing
                let x_star = match prev {
                    Some((px, pv)) if pv > 0.0 => {
                        let f = |t: f64| v.eval(t).ok();
                        bisect_zero(&f, px, x, 1e-12 * self.interval.width()).unwrap_or(x)
                    }
                    _ => x,
                };
                return Err(AstroError::MetricSignatureViolation {
                    x: x_star,
                    value: vv,
                });
            }
            prev = Some((x, vv));
        }
        Ok(())
    }

    /// `Δ/x` must stay bounded toward the center (the pressure equations
    /// carry `Δ/(4x)`). Sampled on a log-spaced ladder: a ratio that keeps
    /// growing as `x` shrinks marks an irregular model.
    fn check_center_regularity(&self) -> Result<(), AstroError> {
        let mut sup_delta = 0.0f64;
        for x in self.interval.grid(65) {
            sup_delta = sup_delta.max(self.delta.eval(x)?.abs());
        }
        let floor = 1e-6 * (1.0 + sup_delta) / self.interval.hi;
        let mut ladder = Vec::new();
        let mut x = self.interval.lo;
        while x <= 1e-3 * self.interval.hi {
            ladder.push(x);
            x *= 10.0;
        }
        if ladder.len() < 2 {
            return Ok(());
        }
        let ratio = |x: f64| -> Result<f64, AstroError> {
            Ok((self.delta.eval(x)? / x).abs())
        };
        let small = ratio(ladder[0])?;
        let large = ratio(*ladder.last().expect("nonempty"))?;
        if small > 50.0 * (large + floor) {
            return Err(AstroError::IrregularAnisotropy {
                x: ladder[0],
                ratio: small,
            });
        }
        Ok(())
    }
}

/// Map the star inputs onto the Riccati coefficient triple in `u`:
/// `a = (½η' + Δ/(4x))/V`, `b = (xη' + η)/V`, `c = -1`.
pub fn riccati_from_physics(model: &StellarModel) -> Result<RiccatiProblem, AstroError> {
    let iv = model.interval();
    let (eta, delta) = (model.eta().clone(), model.delta().clone());
    let a = ScalarFunction::fallible("a_star", iv, move |x| {
        let de = differentiate(&eta, x).map_err(|e| PointError::new(x, e.to_string()))?;
        let v = 1.0 - 2.0 * x * eta.value(x)?;
        if v <= 0.0 {
            return Err(PointError::new(x, format!("metric signature: V = {v:e}")));
        }
        Ok((0.5 * de + delta.value(x)? / (4.0 * x)) / v)
    });
    let eta = model.eta().clone();
    let b = ScalarFunction::fallible("b_star", iv, move |x| {
        let de = differentiate(&eta, x).map_err(|e| PointError::new(x, e.to_string()))?;
        let ev = eta.value(x)?;
        let v = 1.0 - 2.0 * x * ev;
        if v <= 0.0 {
            return Err(PointError::new(x, format!("metric signature: V = {v:e}")));
        }
        Ok((x * de + ev) / v)
    });
    let c = ScalarFunction::constant("-1", iv, -1.0).with_derivative(|_| 0.0);
    Ok(RiccatiProblem::new(a, b, c)?)
}

/// Metric function `A(x) = A₀·e^{∫u}` anchored at `x0` (`A(x0) = A₀`),
/// strictly positive, with exact derivative `u·A`.
pub fn metric_a(
    u: &ScalarFunction,
    a0: f64,
    x0: f64,
) -> Result<ScalarFunction, AstroError> {
    if !(a0 > 0.0) {
        return Err(AstroError::Invalid(format!("A0 must be positive, got {a0}")));
    }
    let iv = u.interval();
    let s = antiderivative(u, x0, iv, tol::TOL_QUAD)?;
    let sv = s.clone();
    let a = ScalarFunction::fallible("A", iv, move |x| {
        sv.eval(x)
            .map(|t| a0 * t.exp())
            .map_err(|e| PointError::new(x, e.to_string()))
    });
    let uu = u.clone();
    Ok(a.with_derivative_fallible(move |x| {
        let t = s.eval(x).map_err(|e| PointError::new(x, e.to_string()))?;
        Ok(uu.value(x)? * a0 * t.exp())
    }))
}

/// Verdict of one physicality condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Holds; `strict = false` marks degenerate equality (values or
    /// gradients that sit exactly on the boundary, e.g. a vacuum model).
    Holds { strict: bool },
    Fails { r: f64, what: String },
    /// Not decidable on this profile (e.g. sound speeds with dρ/dr ≡ 0).
    Indeterminate { what: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// Exterior-matching check (condition iv): `V(R) = 1 - 2m(R)/R` is the
/// substantive test; the lapse normalization is always repairable by
/// rescaling, so the report states the `A₀` that enforces
/// `A²(R) = 1 - 2m(R)/R`.
///
/// The matching formulas are the standard Schwarzschild reading; the
/// source equations do not spell them out.
#[derive(Debug, Clone)]
pub struct MatchingVerdict {
    pub holds: bool,
    /// `|V(R²) - (1 - 2m(R)/R)|`, normalized.
    pub v_mismatch: f64,
    /// The rescaled `A₀` that makes `A²(R) = 1 - 2m(R)/R`.
    pub required_a0: f64,
    /// `A(R²)` as computed with the model's `A₀`.
    pub a_at_boundary: f64,
}

/// The five physicality verdicts.
#[derive(Debug, Clone)]
pub struct PhysicalityReport {
    /// (i) ρ, p_r, p_⊥ positive inside the star.
    pub positivity: Verdict,
    /// (ii) dρ/dr, dp_r/dr, dp_⊥/dr negative.
    pub monotonicity: Verdict,
    /// (iii) 0 ≤ dp_r/dρ ≤ 1 and 0 ≤ dp_⊥/dρ ≤ 1.
    pub causality: Verdict,
    /// (iv) continuous match to the exterior metric.
    pub matching: MatchingVerdict,
    /// (v) p_r vanishes at the boundary.
    pub boundary_pressure: Verdict,
}

impl PhysicalityReport {
    pub fn all_hold(&self) -> bool {
        self.positivity.holds()
            && self.monotonicity.holds()
            && self.causality.holds()
            && self.matching.holds
            && self.boundary_pressure.holds()
    }
}

/// Sampled star profile with its physicality report. The continuous
/// evaluators are retained for violation bisection and diagnostics.
#[derive(Debug, Clone)]
pub struct StellarProfile {
    pub xs: Vec<f64>,
    pub rs: Vec<f64>,
    pub v: Vec<f64>,
    pub a_metric: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub p_r: Vec<f64>,
    pub p_perp: Vec<f64>,
    pub m: Vec<f64>,
    pub report: PhysicalityReport,
    rho_fn: ScalarFunction,
    p_r_fn: ScalarFunction,
    p_perp_fn: ScalarFunction,
    radius: f64,
}

impl StellarProfile {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rho_fn(&self) -> &ScalarFunction {
        &self.rho_fn
    }

    pub fn p_r_fn(&self) -> &ScalarFunction {
        &self.p_r_fn
    }

    pub fn p_perp_fn(&self) -> &ScalarFunction {
        &self.p_perp_fn
    }
}

/// Build the full profile for a model and a metric slope `u` that solves
/// the mapped Riccati equation (checked against [`riccati_from_physics`]
/// to the residual tolerance).
pub fn profile(model: &StellarModel, u: &ScalarFunction) -> Result<StellarProfile, AstroError> {
    let iv = model.interval();
    let p = riccati_from_physics(model)?;
    let (worst, x) = residual_sup(&p, u, tol::CHECK_GRID)?;
    if worst > tol::TOL_RES {
        return Err(AstroError::NotASolution { residual: worst, x });
    }

    let v_fn = model.metric_v();
    let a_fn = metric_a(u, model.a0(), iv.lo)?;

    let (vf, uf) = (v_fn.clone(), u.clone());
    let p_r_fn = ScalarFunction::fallible("p_r", iv, move |x| {
        let vv = vf.value(x)?;
        Ok(4.0 * vv * uf.value(x)? + (vv - 1.0) / x)
    });
    let vf = v_fn.clone();
    let rho_fn = ScalarFunction::fallible("rho", iv, move |x| {
        let vv = vf.value(x)?;
        let dv = differentiate(&vf, x).map_err(|e| PointError::new(x, e.to_string()))?;
        Ok((1.0 - vv) / x - 2.0 * dv)
    });
    let (prf, df) = (p_r_fn.clone(), model.delta().clone());
    let p_perp_fn = ScalarFunction::fallible("p_perp", iv, move |x| {
        Ok(prf.value(x)? + df.value(x)?)
    });

    // 2m(r) = ∫₀^r ξ²ρ dξ, with the integrand extended continuously to
    // ξ = 0 (ρ held at its x_ε value below the working interval).
    let radius = model.radius();
    let rf = rho_fn.clone();
    let x_eps = iv.lo;
    let mass_integrand =
        ScalarFunction::fallible("xi^2*rho/2", Interval::new(0.0, radius), move |xi| {
            let x = (xi * xi).max(x_eps);
            Ok(0.5 * xi * xi * rf.value(x)?)
        });
    let mass = antiderivative(&mass_integrand, 0.0, mass_integrand.interval(), tol::TOL_QUAD)?;

    let xs = iv.grid(tol::PROFILE_GRID);
    let n = xs.len();
    let mut cols = (
        Vec::with_capacity(n), // rs
        Vec::with_capacity(n), // v
        Vec::with_capacity(n), // a
        Vec::with_capacity(n), // u
        Vec::with_capacity(n), // rho
        Vec::with_capacity(n), // p_r
        Vec::with_capacity(n), // p_perp
        Vec::with_capacity(n), // m
    );
    for &x in &xs {
        let r = x.sqrt();
        cols.0.push(r);
        cols.1.push(v_fn.eval(x)?);
        cols.2.push(a_fn.eval(x)?);
        cols.3.push(u.eval(x)?);
        cols.4.push(rho_fn.eval(x)?);
        cols.5.push(p_r_fn.eval(x)?);
        cols.6.push(p_perp_fn.eval(x)?);
        cols.7.push(mass.eval(r)?);
    }
    let mut prof = StellarProfile {
        xs,
        rs: cols.0,
        v: cols.1,
        a_metric: cols.2,
        u: cols.3,
        rho: cols.4,
        p_r: cols.5,
        p_perp: cols.6,
        m: cols.7,
        report: PhysicalityReport {
            positivity: Verdict::Holds { strict: true },
            monotonicity: Verdict::Holds { strict: true },
            causality: Verdict::Holds { strict: true },
            matching: MatchingVerdict {
                holds: false,
                v_mismatch: f64::NAN,
                required_a0: f64::NAN,
                a_at_boundary: f64::NAN,
            },
            boundary_pressure: Verdict::Holds { strict: true },
        },
        rho_fn,
        p_r_fn,
        p_perp_fn,
        radius,
    };
    prof.report = physicality_report(&prof);
    Ok(prof)
}

/// Grade the five physicality conditions on a profile. Gradients are
/// finite differences on the profile grid in `r`; positivity violations
/// are localized by sign-change bisection of the continuous evaluators.
pub fn physicality_report(p: &StellarProfile) -> PhysicalityReport {
    PhysicalityReport {
        positivity: positivity_verdict(p),
        monotonicity: monotonicity_verdict(p),
        causality: causality_verdict(p),
        matching: matching_verdict(p),
        boundary_pressure: boundary_verdict(p),
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn positivity_verdict(p: &StellarProfile) -> Verdict {
    let mut strict = true;
    for (what, values, f) in [
        ("rho", &p.rho, &p.rho_fn),
        ("p_r", &p.p_r, &p.p_r_fn),
        ("p_perp", &p.p_perp, &p.p_perp_fn),
    ] {
        let floor = 1e-12 * (1.0 + scale_of(values));
        for (i, &v) in values.iter().enumerate() {
            if v < -floor {
                // bisect the first sign change bracketing this violation
                let r = if i > 0 && values[i - 1] >= 0.0 {
                    let g = |x: f64| f.eval(x).ok();
                    bisect_zero(&g, p.xs[i - 1], p.xs[i], 1e-12 * p.radius * p.radius)
                        .map(f64::sqrt)
                        .unwrap_or(p.rs[i])
                } else {
                    p.rs[i]
                };
                return Verdict::Fails {
                    r,
                    what: format!("{what} < 0"),
                };
            }
            if v <= floor {
                strict = false;
            }
        }
    }
    Verdict::Holds { strict }
}

/// Central finite differences of `q` against `r` on the profile grid.
fn grid_gradient(rs: &[f64], q: &[f64]) -> Vec<f64> {
    let n = rs.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (j, k) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        out.push((q[k] - q[j]) / (rs[k] - rs[j]));
    }
    out
}

fn monotonicity_verdict(p: &StellarProfile) -> Verdict {
    let mut strict = true;
    for (what, values) in [
        ("drho/dr", &p.rho),
        ("dp_r/dr", &p.p_r),
        ("dp_perp/dr", &p.p_perp),
    ] {
        let grad = grid_gradient(&p.rs, values);
        let floor = 1e-9 * (1.0 + scale_of(&grad));
        for (i, &g) in grad.iter().enumerate() {
            if g > floor {
                return Verdict::Fails {
                    r: p.rs[i],
                    what: format!("{what} > 0"),
                };
            }
            if g >= -floor {
                strict = false;
            }
        }
    }
    Verdict::Holds { strict }
}

fn causality_verdict(p: &StellarProfile) -> Verdict {
    let drho = grid_gradient(&p.rs, &p.rho);
    let dpr = grid_gradient(&p.rs, &p.p_r);
    let dpp = grid_gradient(&p.rs, &p.p_perp);
    let grad_floor = tol::EPS_GRAD * (1.0 + scale_of(&drho));
    let slack = 1e-9;
    let mut usable = 0usize;
    for i in 0..p.rs.len() {
        if drho[i].abs() <= grad_floor {
            continue;
        }
        usable += 1;
        for (what, dp) in [("dp_r/drho", dpr[i]), ("dp_perp/drho", dpp[i])] {
            let ratio = dp / drho[i];
            if !(-slack..=1.0 + slack).contains(&ratio) {
                return Verdict::Fails {
                    r: p.rs[i],
                    what: format!("{what} = {ratio:.6} outside [0, 1]"),
                };
            }
        }
    }
    if usable == 0 {
        Verdict::Indeterminate {
            what: "drho/dr vanishes on the whole grid".to_string(),
        }
    } else {
        Verdict::Holds { strict: true }
    }
}

fn matching_verdict(p: &StellarProfile) -> MatchingVerdict {
    let m_r = *p.m.last().expect("profile grid nonempty");
    let v_r = *p.v.last().expect("profile grid nonempty");
    let a_r = *p.a_metric.last().expect("profile grid nonempty");
    let exterior = 1.0 - 2.0 * m_r / p.radius;
    let v_mismatch = (v_r - exterior).abs() / (1.0 + v_r.abs());
    // A is anchored so that A(x_ε) = A0; scaling A0 scales A linearly,
    // so the A0 that puts A(R) on sqrt(1 - 2m/R) is recoverable from the
    // computed boundary value.
    let a0_used = p.a_metric[0];
    let required_a0 = if exterior > 0.0 {
        a0_used * exterior.sqrt() / a_r
    } else {
        f64::NAN
    };
    MatchingVerdict {
        holds: exterior > 0.0 && v_mismatch <= tol::TOL_MATCH,
        v_mismatch,
        required_a0,
        a_at_boundary: a_r,
    }
}

fn boundary_verdict(p: &StellarProfile) -> Verdict {
    let sup = scale_of(&p.p_r);
    let at_boundary = *p.p_r.last().expect("profile grid nonempty");
    if at_boundary.abs() <= tol::TOL_BOUNDARY * sup.max(1.0) {
        Verdict::Holds {
            strict: at_boundary != 0.0,
        }
    } else {
        Verdict::Fails {
            r: p.radius,
            what: format!("p_r(R) = {at_boundary:e}"),
        }
    }
}

/// Profile CSV export: `r,x,V,A,u,rho,p_r,p_perp,m`, one header row,
/// 17 significant digits, LF line endings.
pub fn write_profile_csv<W: Write>(p: &StellarProfile, out: &mut W) -> io::Result<()> {
    out.write_all(b"r,x,V,A,u,rho,p_r,p_perp,m\n")?;
    for i in 0..p.xs.len() {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.rs[i],
            p.xs[i],
            p.v[i],
            p.a_metric[i],
            p.u[i],
            p.rho[i],
            p.p_r[i],
            p.p_perp[i],
            p.m[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;
