//! The ten constructions: complete the coefficient triple, read off the
//! particular solution, and assemble the printed closed-form family.
//!
//! Every quadrature is anchored at the spec's base point; the construction
//! constants absorb the choice. The printed family always has the shape
//! `y_p + E/(C - ∫c·E)` where `E` is the exponential of the case's printed
//! exponent; the same `E` exponent equals `b + 2c·y_p` algebraically, which
//! is what the equivalence tests against the generic formula verify.

use crate::calculus::{antiderivative, differentiate, Interval, PointError, ScalarFunction};
use crate::riccati::family::{exp_of_integral, product};
use crate::riccati::{FormulaTag, RiccatiProblem, SolutionFamily};
use crate::tol;

use super::{BuildOptions, CaseError, CaseSpec, ConstructedCase};

pub(super) fn build(spec: &CaseSpec, opts: &BuildOptions) -> Result<ConstructedCase, CaseError> {
    assemble(spec, opts, parts(spec, opts)?)
}

/// Complete the triple without assembling the family (also the fresh
/// recomputation path of [`super::validate_condition`]).
pub(super) fn parts(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    Ok(match spec.case.get() {
        1 => case1(spec, opts)?,
        2 => case2(spec, opts)?,
        3 => case3(spec, opts)?,
        4 => case4(spec, opts)?,
        5 => case5(spec, opts)?,
        6 => case6(spec, opts)?,
        7 => case7(spec, opts)?,
        8 => case8(spec, opts)?,
        9 => case9(spec, opts)?,
        10 => case10(spec, opts)?,
        _ => unreachable!("CaseId is validated"),
    })
}

/// What each case builder hands back: the completed triple, the particular
/// solution, and the printed exponent integrand of the family numerator.
pub(super) struct Parts {
    pub(super) problem: RiccatiProblem,
    pub(super) y_p: ScalarFunction,
    pub(super) exponent: ScalarFunction,
}

fn assemble(
    spec: &CaseSpec,
    opts: &BuildOptions,
    parts: Parts,
) -> Result<ConstructedCase, CaseError> {
    let iv = spec.interval;
    let x0 = spec.base_point;
    let id = spec.case.get();
    let e = exp_of_integral(&parts.exponent, x0, iv, opts.tol_quad, format!("E{id}"))?;
    let ce = product(parts.problem.c(), &e, iv, "c*E");
    let w = antiderivative(&ce, x0, iv, opts.tol_quad)?.as_function();
    let family_constant = super::manifest()[(id - 1) as usize].family_constant;
    let general = SolutionFamily::from_parts(
        format!("case{id}({family_constant})"),
        FormulaTag::Gs,
        parts.y_p.clone(),
        e,
        w,
        iv,
    );
    Ok(ConstructedCase {
        spec: spec.clone(),
        problem: parts.problem,
        y_p: parts.y_p,
        general,
        condition_residual: 0.0,
    })
}

// ---- shared guards and closure helpers ----

pub(super) fn sqrt_guarded(v: f64, x: f64) -> Result<f64, PointError> {
    if v < -1e-9 {
        Err(PointError::new(x, format!("negative radicand {v:e}")))
    } else {
        Ok(v.max(0.0).sqrt())
    }
}

fn scan(
    q: &ScalarFunction,
    iv: Interval,
    what: &str,
) -> Result<Vec<(f64, f64)>, CaseError> {
    iv.grid(tol::CHECK_GRID)
        .into_iter()
        .map(|x| {
            q.eval(x).map(|v| (x, v)).map_err(|e| CaseError::GuardViolation {
                guard: format!("{what} is not evaluable ({e})"),
                x,
            })
        })
        .collect()
}

/// Reject when `q` vanishes or changes sign on the interval; the location
/// is bisected from the first offending bracket.
pub(super) fn guard_nonvanishing(
    q: &ScalarFunction,
    iv: Interval,
    name: &str,
) -> Result<(), CaseError> {
    let vals = scan(q, iv, name)?;
    let sup = vals.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    let floor = tol::EPS_GUARD * (1.0 + sup);
    for pair in vals.windows(2) {
        let ((x0, v0), (x1, v1)) = (pair[0], pair[1]);
        if v0.signum() != v1.signum() && v0 != 0.0 && v1 != 0.0 {
            let f = |x: f64| q.eval(x).ok();
            let root = crate::riccati::family::bisect_zero(&f, x0, x1, 1e-10 * iv.width())
                .unwrap_or(0.5 * (x0 + x1));
            return Err(CaseError::GuardViolation {
                guard: format!("{name} vanishes"),
                x: root,
            });
        }
    }
    if let Some(&(x, _)) = vals.iter().find(|&&(_, v)| v.abs() < floor) {
        return Err(CaseError::GuardViolation {
            guard: format!("{name} vanishes"),
            x,
        });
    }
    Ok(())
}

/// Require `sign·q >= -floor` everywhere (the printed-branch validity
/// regions of cases 3, 5, 6).
fn guard_sign(
    q: &ScalarFunction,
    iv: Interval,
    name: &str,
    sign: f64,
) -> Result<(), CaseError> {
    let vals = scan(q, iv, name)?;
    let sup = vals.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    let floor = tol::EPS_GUARD * (1.0 + sup);
    if let Some(&(x, _)) = vals.iter().find(|&&(_, v)| sign * v < -floor) {
        return Err(CaseError::GuardViolation {
            guard: name.to_string(),
            x,
        });
    }
    Ok(())
}

/// Reject when the radicand dips below roundoff-negative on the interval.
fn guard_radicand(r: &ScalarFunction, iv: Interval, name: &str) -> Result<(), CaseError> {
    let vals = scan(r, iv, name)?;
    let sup = vals.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    let floor = 1e-12 * (1.0 + sup);
    if let Some(&(x, v)) = vals.iter().find(|&&(_, v)| v < -floor) {
        return Err(CaseError::RadicandNegative { x, value: v });
    }
    Ok(())
}

fn cumulative(
    g: &ScalarFunction,
    x0: f64,
    iv: Interval,
    tol: f64,
) -> Result<ScalarFunction, CaseError> {
    Ok(antiderivative(g, x0, iv, tol)?.as_function())
}

fn all_exact(fs: &[&ScalarFunction]) -> bool {
    fs.iter().all(|f| f.has_exact_derivative())
}

fn to_pe(x: f64) -> impl Fn(crate::calculus::CalculusError) -> PointError {
    move |e| PointError::new(x, e.to_string())
}

// ---- case 1: a from b, c, f1, C1 ----

fn case1(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let c1 = spec.constant_value();
    let b = spec.b.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f1 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (bb, cc, ff) = (b.clone(), c.clone(), f1.clone());
    let seed = ScalarFunction::fallible("(f1-b^2)/(2c)", iv, move |x| {
        let bv = bb.value(x)?;
        Ok((ff.value(x)? - bv * bv) / (2.0 * cc.value(x)?))
    });
    let big_b = cumulative(&seed, spec.base_point, iv, opts.tol_quad)?;

    let (bigb, sd) = (big_b.clone(), seed.clone());
    let y_p = ScalarFunction::fallible("y_p[1]", iv, move |x| Ok(0.5 * (bigb.value(x)? - c1)))
        .with_derivative_fallible(move |x| Ok(0.5 * sd.value(x)?));

    let (bb, cc, ff, bigb) = (b.clone(), c.clone(), f1.clone(), big_b.clone());
    let a = ScalarFunction::fallible("a[1]", iv, move |x| {
        let g = bb.value(x)? + cc.value(x)? * (bigb.value(x)? - c1);
        Ok((ff.value(x)? - g * g) / (4.0 * cc.value(x)?))
    });

    let (bb, cc, bigb) = (b.clone(), c.clone(), big_b);
    let exponent = ScalarFunction::fallible("b+c*B", iv, move |x| {
        Ok(bb.value(x)? + cc.value(x)? * (bigb.value(x)? - c1))
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 2: a from b, c, f2, branch ----

fn case2(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let _ = opts;
    let iv = spec.interval;
    let sg = spec.branch_sign();
    let b = spec.b.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f2 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (bb, ff) = (b.clone(), f2.clone());
    let radicand = ScalarFunction::fallible("f2+b^2", iv, move |x| {
        let bv = bb.value(x)?;
        Ok(ff.value(x)? + bv * bv)
    });
    guard_radicand(&radicand, iv, "f2 + b^2")?;

    let (bb, cc, rad) = (b.clone(), c.clone(), radicand.clone());
    let y_p = ScalarFunction::fallible("y_p[2]", iv, move |x| {
        let r = sqrt_guarded(rad.value(x)?, x)?;
        Ok((-bb.value(x)? + sg * r) / (2.0 * cc.value(x)?))
    });
    let y_p = if all_exact(&[&b, &c, &f2]) {
        let (bb, cc, ff, rad) = (b.clone(), c.clone(), f2.clone(), radicand.clone());
        y_p.with_derivative_fallible(move |x| {
            let pe = to_pe(x);
            let bv = bb.value(x)?;
            let cv = cc.value(x)?;
            let db = differentiate(&bb, x).map_err(&pe)?;
            let dc = differentiate(&cc, x).map_err(&pe)?;
            let df = differentiate(&ff, x).map_err(&pe)?;
            let r = sqrt_guarded(rad.value(x)?, x)?;
            let u = -bv + sg * r;
            let du = -db + sg * (df + 2.0 * bv * db) / (2.0 * r);
            Ok((du * cv - u * dc) / (2.0 * cv * cv))
        })
    } else {
        y_p
    };

    let (ypd, cc, ff) = (y_p.clone(), c.clone(), f2.clone());
    let a = ScalarFunction::fallible("a[2]", iv, move |x| {
        let dyp = differentiate(&ypd, x).map_err(to_pe(x))?;
        Ok(dyp - ff.value(x)? / (4.0 * cc.value(x)?))
    });

    let rad = radicand;
    let exponent = ScalarFunction::fallible("sg*sqrt(f2+b^2)", iv, move |x| {
        Ok(sg * sqrt_guarded(rad.value(x)?, x)?)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 3: b from a, c, f2, C3 (printed -√ branch) ----

fn case3(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let c3 = spec.constant_value();
    let a = spec.a.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f2 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (aa, cc, ff) = (a.clone(), c.clone(), f2.clone());
    let seed = ScalarFunction::fallible("a+f2/(4c)", iv, move |x| {
        Ok(aa.value(x)? + ff.value(x)? / (4.0 * cc.value(x)?))
    });
    let bq = cumulative(&seed, spec.base_point, iv, opts.tol_quad)?;
    let bracket = ScalarFunction::fallible("int[a+f2/(4c)]-C3", iv, move |x| {
        Ok(bq.value(x)? - c3)
    });
    guard_nonvanishing(&bracket, iv, "bracket int[a+f2/(4c)]-C3")?;

    let (cc, ff, br) = (c.clone(), f2.clone(), bracket.clone());
    let b = ScalarFunction::fallible("b[3]", iv, move |x| {
        let cv = cc.value(x)?;
        let g = br.value(x)?;
        Ok((ff.value(x)? - 4.0 * cv * cv * g * g) / (4.0 * cv * g))
    });

    let (bb, cc, br) = (b.clone(), c.clone(), bracket.clone());
    let branch_region = ScalarFunction::fallible("b+2c*G", iv, move |x| {
        Ok(bb.value(x)? + 2.0 * cc.value(x)? * br.value(x)?)
    });
    guard_sign(&branch_region, iv, "printed branch requires b+2c*G <= 0", -1.0)?;

    let (bb, cc, ff, sd) = (b.clone(), c.clone(), f2.clone(), seed.clone());
    let y_p = ScalarFunction::fallible("y_p[3]", iv, move |x| {
        let bv = bb.value(x)?;
        let r = sqrt_guarded(ff.value(x)? + bv * bv, x)?;
        Ok(-(bv + r) / (2.0 * cc.value(x)?))
    })
    .with_derivative_fallible(move |x| sd.value(x));

    let (bb, ff) = (b.clone(), f2.clone());
    let exponent = ScalarFunction::fallible("-sqrt(f2+b^2)", iv, move |x| {
        let bv = bb.value(x)?;
        Ok(-sqrt_guarded(ff.value(x)? + bv * bv, x)?)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 4: c from a, b, f2, C5, branch ----

fn case4(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let sg = spec.branch_sign();
    let c5 = spec.constant_value();
    let a = spec.a.clone().unwrap().restricted(iv);
    let b = spec.b.clone().unwrap().restricted(iv);
    let f2 = spec.generator.clone().restricted(iv);

    let (bb, ff) = (b.clone(), f2.clone());
    let radicand = ScalarFunction::fallible("f2+b^2", iv, move |x| {
        let bv = bb.value(x)?;
        Ok(ff.value(x)? + bv * bv)
    });
    guard_radicand(&radicand, iv, "f2 + b^2")?;

    let (bb, rad) = (b.clone(), radicand.clone());
    let d = ScalarFunction::fallible("-b+sg*sqrt(f2+b^2)", iv, move |x| {
        Ok(-bb.value(x)? + sg * sqrt_guarded(rad.value(x)?, x)?)
    });
    guard_nonvanishing(&d, iv, "-b + sign*sqrt(f2+b^2)")?;

    let (ff, dd) = (f2.clone(), d.clone());
    let half_exp = ScalarFunction::fallible("-f2/(2D)", iv, move |x| {
        Ok(-ff.value(x)? / (2.0 * dd.value(x)?))
    });
    let p = exp_of_integral(&half_exp, spec.base_point, iv, opts.tol_quad, "P4")?;

    let ap = product(&a, &p, iv, "a*P");
    let bq = cumulative(&ap, spec.base_point, iv, opts.tol_quad)?;
    let q = ScalarFunction::fallible("C5+int[a*P]", iv, move |x| Ok(c5 + bq.value(x)?));
    guard_nonvanishing(&q, iv, "denominator C5 + int[a*P]")?;

    let (dd, pp, qq) = (d.clone(), p.clone(), q.clone());
    let c = ScalarFunction::fallible("c[4]", iv, move |x| {
        Ok(dd.value(x)? * pp.value(x)? / (2.0 * qq.value(x)?))
    });

    let (pp, qq) = (p.clone(), q.clone());
    let y_p = ScalarFunction::fallible("y_p[4]", iv, move |x| Ok(qq.value(x)? / pp.value(x)?));
    let (aa, ff, dd, ypv) = (a.clone(), f2.clone(), d.clone(), y_p.clone());
    let y_p = y_p.with_derivative_fallible(move |x| {
        Ok(aa.value(x)? + ypv.value(x)? * ff.value(x)? / (2.0 * dd.value(x)?))
    });

    let rad = radicand;
    let exponent = ScalarFunction::fallible("sg*sqrt(f2+b^2)", iv, move |x| {
        Ok(sg * sqrt_guarded(rad.value(x)?, x)?)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 5: a from b, c, f3, C7 (printed +√ branch) ----

fn case5(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let c7 = spec.constant_value();
    let b = spec.b.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f3 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (cc, ff) = (c.clone(), f3.clone());
    let seed = ScalarFunction::fallible("f3/(2c)", iv, move |x| {
        Ok(ff.value(x)? / (2.0 * cc.value(x)?))
    });
    let bh = cumulative(&seed, spec.base_point, iv, opts.tol_quad)?;
    let h = ScalarFunction::fallible("int[f3/(2c)]-C7", iv, move |x| Ok(bh.value(x)? - c7));

    let (bb, cc, hh) = (b.clone(), c.clone(), h.clone());
    let branch_region = ScalarFunction::fallible("b+c*H", iv, move |x| {
        Ok(bb.value(x)? + cc.value(x)? * hh.value(x)?)
    });
    guard_sign(&branch_region, iv, "printed branch requires b+c*H >= 0", 1.0)?;

    let (bb, cc, ff, hh) = (b.clone(), c.clone(), f3.clone(), h.clone());
    let a = ScalarFunction::fallible("a[5]", iv, move |x| {
        let bv = bb.value(x)?;
        let cv = cc.value(x)?;
        let hv = hh.value(x)?;
        Ok(0.25 * (ff.value(x)? / cv - 2.0 * bv * hv - cv * hv * hv))
    });

    let (bb, cc, hh, ffd, ccd) = (b.clone(), c.clone(), h.clone(), f3.clone(), c.clone());
    let y_p = ScalarFunction::fallible("y_p[5]", iv, move |x| {
        let bv = bb.value(x)?;
        let cv = cc.value(x)?;
        let hv = hh.value(x)?;
        let r = sqrt_guarded(bv * bv + cv * hv * (2.0 * bv + cv * hv), x)?;
        Ok((-bv + r) / (2.0 * cv))
    })
    .with_derivative_fallible(move |x| Ok(ffd.value(x)? / (4.0 * ccd.value(x)?)));

    let (bb, cc, hh) = (b.clone(), c.clone(), h);
    let exponent = ScalarFunction::fallible("sqrt(b^2+c*H*(2b+c*H))", iv, move |x| {
        let bv = bb.value(x)?;
        let cv = cc.value(x)?;
        let hv = hh.value(x)?;
        sqrt_guarded(bv * bv + cv * hv * (2.0 * bv + cv * hv), x)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 6: b from a, c, f3, C7 (printed -√ branch) ----

fn case6(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let c7 = spec.constant_value();
    let a = spec.a.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f3 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (cc, ff) = (c.clone(), f3.clone());
    let seed = ScalarFunction::fallible("f3/(2c)", iv, move |x| {
        Ok(ff.value(x)? / (2.0 * cc.value(x)?))
    });
    let bh = cumulative(&seed, spec.base_point, iv, opts.tol_quad)?;
    let h = ScalarFunction::fallible("int[f3/(2c)]-C7", iv, move |x| Ok(bh.value(x)? - c7));
    guard_nonvanishing(&h, iv, "bracket int[f3/(2c)]-C7")?;

    let (aa, cc, ff, hh) = (a.clone(), c.clone(), f3.clone(), h.clone());
    let b = ScalarFunction::fallible("b[6]", iv, move |x| {
        let av = aa.value(x)?;
        let cv = cc.value(x)?;
        let hv = hh.value(x)?;
        Ok((ff.value(x)? - 4.0 * av * cv - cv * cv * hv * hv) / (2.0 * cv * hv))
    });

    let (bb, cc, hh) = (b.clone(), c.clone(), h.clone());
    let branch_region = ScalarFunction::fallible("b+c*H", iv, move |x| {
        Ok(bb.value(x)? + cc.value(x)? * hh.value(x)?)
    });
    guard_sign(&branch_region, iv, "printed branch requires b+c*H <= 0", -1.0)?;

    let (aa, bb, cc, ff) = (a.clone(), b.clone(), c.clone(), f3.clone());
    let (ffd, ccd) = (f3.clone(), c.clone());
    let y_p = ScalarFunction::fallible("y_p[6]", iv, move |x| {
        let av = aa.value(x)?;
        let bv = bb.value(x)?;
        let cv = cc.value(x)?;
        let r = sqrt_guarded(bv * bv - 4.0 * av * cv + ff.value(x)?, x)?;
        Ok((-r - bv) / (2.0 * cv))
    })
    .with_derivative_fallible(move |x| Ok(ffd.value(x)? / (4.0 * ccd.value(x)?)));

    let (aa, bb, cc, ff) = (a.clone(), b.clone(), c.clone(), f3.clone());
    let exponent = ScalarFunction::fallible("-sqrt(b^2-4ac+f3)", iv, move |x| {
        let bv = bb.value(x)?;
        let r = sqrt_guarded(
            bv * bv - 4.0 * aa.value(x)? * cc.value(x)? + ff.value(x)?,
            x,
        )?;
        Ok(-r)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 7: a from b, c, f4 ----

fn case7(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let _ = opts;
    let iv = spec.interval;
    let b = spec.b.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f4 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let ratio = ratio_with_derivative(&f4, &c, iv);

    let (bb, cc, ff, rat) = (b.clone(), c.clone(), f4.clone(), ratio.clone());
    let a = ScalarFunction::fallible("a[7]", iv, move |x| {
        let cv = cc.value(x)?;
        let fv = ff.value(x)?;
        let dr = differentiate(&rat, x).map_err(to_pe(x))?;
        Ok((2.0 * cv * dr - fv * fv - 2.0 * bb.value(x)? * fv) / (4.0 * cv))
    });

    let (cc, ff, rat) = (c.clone(), f4.clone(), ratio);
    let y_p = ScalarFunction::fallible("y_p[7]", iv, move |x| {
        Ok(ff.value(x)? / (2.0 * cc.value(x)?))
    })
    .with_derivative_fallible(move |x| {
        Ok(0.5 * differentiate(&rat, x).map_err(to_pe(x))?)
    });

    let (bb, ff) = (b.clone(), f4);
    let exponent =
        ScalarFunction::fallible("b+f4", iv, move |x| Ok(bb.value(x)? + ff.value(x)?));

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 8: b from a, c, f4 ----

fn case8(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let _ = opts;
    let iv = spec.interval;
    let a = spec.a.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f4 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;
    guard_nonvanishing(&f4, iv, "generator f4")?;

    let ratio = ratio_with_derivative(&f4, &c, iv);

    let (aa, cc, ff, rat) = (a.clone(), c.clone(), f4.clone(), ratio.clone());
    let b = ScalarFunction::fallible("b[8]", iv, move |x| {
        let cv = cc.value(x)?;
        let fv = ff.value(x)?;
        let dr = differentiate(&rat, x).map_err(to_pe(x))?;
        Ok((cv * dr - 0.5 * fv * fv - 2.0 * aa.value(x)? * cv) / fv)
    });

    let (cc, ff, rat) = (c.clone(), f4.clone(), ratio);
    let y_p = ScalarFunction::fallible("y_p[8]", iv, move |x| {
        Ok(ff.value(x)? / (2.0 * cc.value(x)?))
    })
    .with_derivative_fallible(move |x| {
        Ok(0.5 * differentiate(&rat, x).map_err(to_pe(x))?)
    });

    let (bb, ff) = (b.clone(), f4);
    let exponent =
        ScalarFunction::fallible("b+f4", iv, move |x| Ok(bb.value(x)? + ff.value(x)?));

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

/// `f4/c` with an exact quotient-rule derivative when both inputs carry
/// one (cases 7 and 8 differentiate this ratio).
fn ratio_with_derivative(f4: &ScalarFunction, c: &ScalarFunction, iv: Interval) -> ScalarFunction {
    let (ff, cc) = (f4.clone(), c.clone());
    let ratio =
        ScalarFunction::fallible("f4/c", iv, move |x| Ok(ff.value(x)? / cc.value(x)?));
    if all_exact(&[f4, c]) {
        let (ff, cc) = (f4.clone(), c.clone());
        ratio.with_derivative_fallible(move |x| {
            let pe = to_pe(x);
            let fv = ff.value(x)?;
            let cv = cc.value(x)?;
            let dfv = differentiate(&ff, x).map_err(&pe)?;
            let dcv = differentiate(&cc, x).map_err(&pe)?;
            Ok((dfv * cv - fv * dcv) / (cv * cv))
        })
    } else {
        ratio
    }
}

// ---- case 9: c from a, b, f4, C12 ----

fn case9(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let iv = spec.interval;
    let c12 = spec.constant_value();
    let a = spec.a.clone().unwrap().restricted(iv);
    let b = spec.b.clone().unwrap().restricted(iv);
    let f4 = spec.generator.clone().restricted(iv);

    let (bb, ff) = (b.clone(), f4.clone());
    let half_exp = ScalarFunction::fallible("-(f4/2+b)", iv, move |x| {
        Ok(-(0.5 * ff.value(x)? + bb.value(x)?))
    });
    let p = exp_of_integral(&half_exp, spec.base_point, iv, opts.tol_quad, "P9")?;

    let ap = product(&a, &p, iv, "a*P");
    let bq = cumulative(&ap, spec.base_point, iv, opts.tol_quad)?;
    let q = ScalarFunction::fallible("C12+2*int[a*P]", iv, move |x| {
        Ok(c12 + 2.0 * bq.value(x)?)
    });
    guard_nonvanishing(&q, iv, "denominator C12 + 2*int[a*P]")?;

    let (ff, pp, qq) = (f4.clone(), p.clone(), q.clone());
    let c = ScalarFunction::fallible("c[9]", iv, move |x| {
        Ok(ff.value(x)? * pp.value(x)? / qq.value(x)?)
    });

    let (pp, qq) = (p.clone(), q.clone());
    let y_p = ScalarFunction::fallible("y_p[9]", iv, move |x| {
        Ok(0.5 * qq.value(x)? / pp.value(x)?)
    });
    let (aa, bb, ff, ypv) = (a.clone(), b.clone(), f4.clone(), y_p.clone());
    let y_p = y_p.with_derivative_fallible(move |x| {
        Ok(aa.value(x)? + ypv.value(x)? * (0.5 * ff.value(x)? + bb.value(x)?))
    });

    let (bb, ff) = (b.clone(), f4);
    let exponent =
        ScalarFunction::fallible("f4+b", iv, move |x| Ok(ff.value(x)? + bb.value(x)?));

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}

// ---- case 10: a from b, c, f5, branch ----

fn case10(spec: &CaseSpec, opts: &BuildOptions) -> Result<Parts, CaseError> {
    let _ = opts;
    let iv = spec.interval;
    let sg = spec.branch_sign();
    let b = spec.b.clone().unwrap().restricted(iv);
    let c = spec.c.clone().unwrap().restricted(iv);
    let f5 = spec.generator.clone().restricted(iv);
    guard_nonvanishing(&c, iv, "coefficient c")?;

    let (bb, cc, ff) = (b.clone(), c.clone(), f5.clone());
    let y_p = ScalarFunction::fallible("y_p[10]", iv, move |x| {
        Ok(-bb.value(x)? / (2.0 * cc.value(x)?) + sg * ff.value(x)?)
    });
    let y_p = if all_exact(&[&b, &c, &f5]) {
        let (bb, cc, ff) = (b.clone(), c.clone(), f5.clone());
        y_p.with_derivative_fallible(move |x| {
            let pe = to_pe(x);
            let bv = bb.value(x)?;
            let cv = cc.value(x)?;
            let db = differentiate(&bb, x).map_err(&pe)?;
            let dc = differentiate(&cc, x).map_err(&pe)?;
            let dfv = differentiate(&ff, x).map_err(&pe)?;
            Ok(-(db * cv - bv * dc) / (2.0 * cv * cv) + sg * dfv)
        })
    } else {
        y_p
    };

    let (bb, cc, ff, ypd) = (b.clone(), c.clone(), f5.clone(), y_p.clone());
    let a = ScalarFunction::fallible("a[10]", iv, move |x| {
        let bv = bb.value(x)?;
        let cv = cc.value(x)?;
        let fv = ff.value(x)?;
        let dyp = differentiate(&ypd, x).map_err(to_pe(x))?;
        Ok((bv * bv - 4.0 * cv * cv * fv * fv) / (4.0 * cv) + dyp)
    });

    let (cc, ff) = (c.clone(), f5);
    let exponent = ScalarFunction::fallible("2*sg*c*f5", iv, move |x| {
        Ok(2.0 * sg * cc.value(x)? * ff.value(x)?)
    });

    Ok(Parts {
        problem: RiccatiProblem::new(a, b, c)?,
        y_p,
        exponent,
    })
}
