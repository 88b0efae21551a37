//! General solution families from a particular solution.
//!
//! All three equivalent forms share the shape
//! `y(x; C) = y_p(x) + N(x) / (C - W(x))` with `N` an exponential of a
//! cumulative integral and `W` another cumulative integral; they differ in
//! which coefficients they consume:
//!
//! - `from_bc`: `N = e^{∫(b + 2c·y_p)}`, `W = ∫ c·N`
//! - `from_ac`: `N = y_p·e^{∫(c·y_p - a/y_p)}`, `W = ∫ c·y_p·E`
//! - `from_ab`: `N = y_p²·e^{-∫(b + 2a/y_p)}`, `W = ∫ (y_p' - a - b·y_p)·E`

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::calculus::{
    antiderivative, differentiate, Interval, PointError, ScalarFunction,
};
use crate::tol;

use super::{residual, RiccatiError, RiccatiProblem};

/// Which of the three equivalent general-solution formulas a family was
/// built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaTag {
    Gs,
    Gs1,
    Gs2,
}

/// Options shared by the family constructors.
#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Base point of every quadrature; defaults to the interval's left end.
    /// The family constant absorbs the choice.
    pub base_point: Option<f64>,
    pub tol_quad: f64,
    pub tol_res: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            base_point: None,
            tol_quad: tol::TOL_QUAD,
            tol_res: tol::TOL_RES,
        }
    }
}

/// A one-parameter solution family `y(x; C) = y_p(x) + N(x)/(C - W(x))`.
///
/// Immutable and cheap to clone; pole lists are computed lazily per `C`
/// and cached.
#[derive(Clone)]
pub struct SolutionFamily {
    label: String,
    tag: FormulaTag,
    shift: ScalarFunction,
    numer: ScalarFunction,
    w: ScalarFunction,
    interval: Interval,
    pole_cache: Arc<Mutex<HashMap<u64, Arc<Vec<f64>>>>>,
}

impl std::fmt::Debug for SolutionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionFamily")
            .field("label", &self.label)
            .field("tag", &self.tag)
            .field("interval", &self.interval)
            .finish()
    }
}

impl SolutionFamily {
    /// Assemble from parts. `shift` must be a particular solution of the
    /// underlying problem, `numer` the exponential factor, and `C - w` the
    /// denominator.
    pub fn from_parts(
        label: impl Into<String>,
        tag: FormulaTag,
        shift: ScalarFunction,
        numer: ScalarFunction,
        w: ScalarFunction,
        interval: Interval,
    ) -> SolutionFamily {
        SolutionFamily {
            label: label.into(),
            tag,
            shift,
            numer,
            w,
            interval,
            pole_cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tag(&self) -> FormulaTag {
        self.tag
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// The particular solution the family was grown from.
    pub fn particular(&self) -> &ScalarFunction {
        &self.shift
    }

    /// Denominator `C - W(x)`.
    pub fn denominator(&self, c: f64, x: f64) -> Result<f64, RiccatiError> {
        Ok(c - self.w.eval(x)?)
    }

    /// Evaluate the member with constant `C` at `x`. Evaluation within a
    /// vanishing-denominator zone reports the pole instead of an
    /// arbitrarily large value.
    pub fn eval(&self, c: f64, x: f64) -> Result<f64, RiccatiError> {
        let wv = self.w.eval(x)?;
        let den = c - wv;
        if den.abs() < tol::EPS_DIV * (1.0 + c.abs() + wv.abs()) {
            return Err(RiccatiError::PoleAt { c, x });
        }
        Ok(self.shift.eval(x)? + self.numer.eval(x)? / den)
    }

    /// The member with constant `C` as a standalone function. Carries an
    /// exact derivative when all three parts do.
    pub fn member(&self, c: f64) -> ScalarFunction {
        let me = self.clone();
        let f = move |x: f64| me.eval(c, x).map_err(|e| PointError::new(x, e.to_string()));
        let label = format!("{}[C={c:?}]", self.label);
        let sf = ScalarFunction::fallible(label, self.interval, f);
        if self.shift.has_exact_derivative()
            && self.numer.has_exact_derivative()
            && self.w.has_exact_derivative()
        {
            let fam = self.clone();
            sf.with_derivative_fallible(move |x| {
                let to_pe = |e: crate::calculus::CalculusError| PointError::new(x, e.to_string());
                let den = c - fam.w.eval(x).map_err(to_pe)?;
                let num = fam.numer.eval(x).map_err(to_pe)?;
                let d_shift = differentiate(&fam.shift, x).map_err(to_pe)?;
                let d_num = differentiate(&fam.numer, x).map_err(to_pe)?;
                let d_w = differentiate(&fam.w, x).map_err(to_pe)?;
                Ok(d_shift + (d_num * den + num * d_w) / (den * den))
            })
        } else {
            sf
        }
    }

    /// The constant whose member passes through `(x, y)`:
    /// `C = W(x) + N(x)/(y - y_p(x))`. A target on the particular
    /// solution itself has no finite constant.
    pub fn constant_for(&self, x: f64, y: f64) -> Result<f64, RiccatiError> {
        let shift = self.shift.eval(x)?;
        let n = self.numer.eval(x)?;
        let w = self.w.eval(x)?;
        let d = y - shift;
        if d.abs() < tol::EPS_DIV * (1.0 + y.abs() + shift.abs()) {
            return Err(RiccatiError::Invalid(format!(
                "target value {y} at x = {x} coincides with the particular solution; \
                 the matching constant is at infinity"
            )));
        }
        Ok(w + n / d)
    }

    /// Poles of the member with constant `C`: zeros of `C - W` located by
    /// grid scan and sign-change bisection (refined to `1e-10` of the
    /// interval width).
    pub fn poles(&self, c: f64) -> Vec<f64> {
        if let Some(hit) = self.pole_cache.lock().unwrap().get(&c.to_bits()) {
            return hit.as_ref().clone();
        }
        let den = |x: f64| -> Option<f64> { self.w.eval(x).ok().map(|wv| c - wv) };
        let grid = self.interval.grid(tol::CHECK_GRID);
        let mut poles = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &x in &grid {
            let Some(d) = den(x) else {
                prev = None;
                continue;
            };
            if d == 0.0 {
                poles.push(x);
                prev = Some((x, d));
                continue;
            }
            if let Some((px, pd)) = prev {
                if pd.signum() != d.signum() {
                    if let Some(root) = bisect_zero(&den, px, x, 1e-10 * self.interval.width()) {
                        poles.push(root);
                    }
                }
            }
            prev = Some((x, d));
        }
        poles.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * self.interval.width());
        let arc = Arc::new(poles.clone());
        self.pole_cache.lock().unwrap().insert(c.to_bits(), arc);
        poles
    }
}

/// Bisect a bracketed sign change of `f` down to width `tol`.
pub(crate) fn bisect_zero(
    f: &dyn Fn(f64) -> Option<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Option<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Some(mid);
        }
        if flo.signum() != fmid.signum() {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn check_particular(
    p: &RiccatiProblem,
    y_p: &ScalarFunction,
    opts: &FamilyOptions,
) -> Result<(), RiccatiError> {
    let mut worst = 0.0f64;
    let mut worst_x = p.interval().lo;
    for x in p.interval().grid(16) {
        let r = residual(p, y_p, x)?.abs();
        let scale = 1.0 + y_p.eval(x)?.abs();
        if r / scale > worst {
            worst = r / scale;
            worst_x = x;
        }
    }
    if worst > opts.tol_res {
        return Err(RiccatiError::ParticularNotASolution {
            residual: worst,
            x: worst_x,
            tol: opts.tol_res,
        });
    }
    Ok(())
}

fn base_point(interval: Interval, opts: &FamilyOptions) -> Result<f64, RiccatiError> {
    let x0 = opts.base_point.unwrap_or(interval.lo);
    if !interval.contains(x0) {
        return Err(RiccatiError::Invalid(format!(
            "base point {x0} outside [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    Ok(x0)
}

/// Exponential of a cumulative integral, with exact derivative
/// `s(x)·E(x)`.
pub(crate) fn exp_of_integral(
    s: &ScalarFunction,
    x0: f64,
    interval: Interval,
    tol_quad: f64,
    label: impl Into<String>,
) -> Result<ScalarFunction, RiccatiError> {
    let big_s = antiderivative(s, x0, interval, tol_quad)?;
    let sv = big_s.clone();
    let sf = ScalarFunction::fallible(label, interval, move |x| {
        sv.eval(x)
            .map(f64::exp)
            .map_err(|e| PointError::new(x, e.to_string()))
    });
    let sd = s.clone();
    let se = big_s;
    Ok(sf.with_derivative_fallible(move |x| {
        let e = se
            .eval(x)
            .map(f64::exp)
            .map_err(|er| PointError::new(x, er.to_string()))?;
        Ok(sd.value(x)? * e)
    }))
}

/// Product integrand `f·g` with exact derivative when both factors carry
/// one.
pub(crate) fn product(
    f: &ScalarFunction,
    g: &ScalarFunction,
    interval: Interval,
    label: impl Into<String>,
) -> ScalarFunction {
    let (fa, ga) = (f.clone(), g.clone());
    let sf = ScalarFunction::fallible(label, interval, move |x| Ok(fa.value(x)? * ga.value(x)?));
    if f.has_exact_derivative() && g.has_exact_derivative() {
        let (fa, ga) = (f.clone(), g.clone());
        sf.with_derivative_fallible(move |x| {
            let to_pe = |e: crate::calculus::CalculusError| PointError::new(x, e.to_string());
            Ok(differentiate(&fa, x).map_err(to_pe)? * ga.value(x)?
                + fa.value(x)? * differentiate(&ga, x).map_err(to_pe)?)
        })
    } else {
        sf
    }
}

/// General solution from coefficients `b`, `c` and a particular solution:
/// `y = y_p + E/(C - ∫c·E)` with `E = e^{∫(b + 2c·y_p)}`.
pub fn family_from_bc(
    p: &RiccatiProblem,
    y_p: &ScalarFunction,
    opts: &FamilyOptions,
) -> Result<SolutionFamily, RiccatiError> {
    check_particular(p, y_p, opts)?;
    let iv = p.interval();
    let x0 = base_point(iv, opts)?;
    let (b, c, yp) = (p.b().clone(), p.c().clone(), y_p.clone());
    let s = ScalarFunction::fallible("b+2c*y_p", iv, move |x| {
        Ok(b.value(x)? + 2.0 * c.value(x)? * yp.value(x)?)
    });
    let e = exp_of_integral(&s, x0, iv, opts.tol_quad, "E_bc")?;
    let ce = product(p.c(), &e, iv, "c*E");
    let w = antiderivative(&ce, x0, iv, opts.tol_quad)?.as_function();
    Ok(SolutionFamily::from_parts(
        "gs(b,c)",
        FormulaTag::Gs,
        y_p.clone(),
        e,
        w,
        iv,
    ))
}

fn check_nonvanishing(y_p: &ScalarFunction, iv: Interval) -> Result<(), RiccatiError> {
    let mut sup = 0.0f64;
    let grid = iv.grid(tol::CHECK_GRID);
    let mut vals = Vec::with_capacity(grid.len());
    for &x in &grid {
        let v = y_p.eval(x)?;
        sup = sup.max(v.abs());
        vals.push((x, v));
    }
    let floor = tol::EPS_DIV * (1.0 + sup);
    for (x, v) in vals {
        if v.abs() < floor {
            return Err(RiccatiError::ParticularVanishes { x, value: v.abs() });
        }
    }
    Ok(())
}

/// General solution from coefficients `a`, `c` and a nonvanishing
/// particular solution: `y = y_p + y_p·E/(C - ∫c·y_p·E)` with
/// `E = e^{∫(c·y_p - a/y_p)}`.
pub fn family_from_ac(
    p: &RiccatiProblem,
    y_p: &ScalarFunction,
    opts: &FamilyOptions,
) -> Result<SolutionFamily, RiccatiError> {
    check_particular(p, y_p, opts)?;
    let iv = p.interval();
    check_nonvanishing(y_p, iv)?;
    let x0 = base_point(iv, opts)?;
    let (a, c, yp) = (p.a().clone(), p.c().clone(), y_p.clone());
    let s = ScalarFunction::fallible("c*y_p-a/y_p", iv, move |x| {
        let ypv = yp.value(x)?;
        Ok(c.value(x)? * ypv - a.value(x)? / ypv)
    });
    let e = exp_of_integral(&s, x0, iv, opts.tol_quad, "E_ac")?;
    let numer = product(y_p, &e, iv, "y_p*E");
    let integrand = product(p.c(), &numer, iv, "c*y_p*E");
    let w = antiderivative(&integrand, x0, iv, opts.tol_quad)?.as_function();
    Ok(SolutionFamily::from_parts(
        "gs1(a,c)",
        FormulaTag::Gs1,
        y_p.clone(),
        numer,
        w,
        iv,
    ))
}

/// General solution from coefficients `a`, `b` and a nonvanishing
/// particular solution: `y = y_p + y_p²·E/(C - ∫(y_p' - a - b·y_p)·E)`
/// with `E = e^{-∫(b + 2a/y_p)}`.
pub fn family_from_ab(
    p: &RiccatiProblem,
    y_p: &ScalarFunction,
    opts: &FamilyOptions,
) -> Result<SolutionFamily, RiccatiError> {
    check_particular(p, y_p, opts)?;
    let iv = p.interval();
    check_nonvanishing(y_p, iv)?;
    let x0 = base_point(iv, opts)?;
    let (a, b, yp) = (p.a().clone(), p.b().clone(), y_p.clone());
    let s = ScalarFunction::fallible("-(b+2a/y_p)", iv, move |x| {
        Ok(-(b.value(x)? + 2.0 * a.value(x)? / yp.value(x)?))
    });
    let e = exp_of_integral(&s, x0, iv, opts.tol_quad, "E_ab")?;
    let numer = product(&product(y_p, y_p, iv, "y_p^2"), &e, iv, "y_p^2*E");
    let (a, b, yp, ev) = (p.a().clone(), p.b().clone(), y_p.clone(), e.clone());
    let integrand = ScalarFunction::fallible("(y_p'-a-b*y_p)*E", iv, move |x| {
        let dyp = differentiate(&yp, x).map_err(|er| PointError::new(x, er.to_string()))?;
        Ok((dyp - a.value(x)? - b.value(x)? * yp.value(x)?) * ev.value(x)?)
    });
    let w = antiderivative(&integrand, x0, iv, opts.tol_quad)?.as_function();
    Ok(SolutionFamily::from_parts(
        "gs2(a,b)",
        FormulaTag::Gs2,
        y_p.clone(),
        numer,
        w,
        iv,
    ))
}

/// Sup over an `n`-point grid of the normalized residual of the member
/// `y(·; C)`, excluding `guard`-radius neighborhoods of detected poles.
/// Returns `(sup residual / (1 + sup |y|), points used)`.
pub fn family_residual_sup(
    p: &RiccatiProblem,
    family: &SolutionFamily,
    c: f64,
    n: usize,
    guard: f64,
) -> Result<(f64, usize), RiccatiError> {
    let member = family.member(c);
    let poles = family.poles(c);
    let mut worst = 0.0f64;
    let mut y_sup = 0.0f64;
    let mut used = 0;
    for x in p.interval().grid(n) {
        if poles.iter().any(|&px| (x - px).abs() < guard) {
            continue;
        }
        let r = residual(p, &member, x)?.abs();
        y_sup = y_sup.max(member.eval(x)?.abs());
        worst = worst.max(r);
        used += 1;
    }
    Ok((worst / (1.0 + y_sup), used))
}
