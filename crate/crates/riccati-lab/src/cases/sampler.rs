//! Random case specs for fuzzing: degree-≤3 polynomials plus a bounded
//! trig term, with guards enforced by construction and rejection
//! sampling on `[0, 1]`.
//!
//! Everything is driven by a seeded ChaCha stream, so a (case, seed) pair
//! reproduces the exact same specs and metrics.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::calculus::{antiderivative, Interval, ScalarFunction};
use crate::exprlang;
use crate::riccati::{family_residual_sup, residual_sup, RiccatiError};
use crate::tol;

use super::{
    construct_with, seed_relation_check, Branch, BuildOptions, CaseError, CaseId, CaseSpec,
    ConstructedCase,
};

/// Residual thresholds a fuzzed construction must meet.
#[derive(Debug, Clone, Copy)]
pub struct FuzzTolerances {
    pub condition: f64,
    pub particular: f64,
    pub family: f64,
}

impl Default for FuzzTolerances {
    fn default() -> Self {
        FuzzTolerances {
            condition: 1e-9,
            particular: 1e-6,
            family: 1e-6,
        }
    }
}

/// One fuzzed construction's record.
#[derive(Debug, Clone)]
pub struct FuzzOutcome {
    pub case: CaseId,
    /// Hex digest of the generated spec's canonical source form.
    pub digest: String,
    pub condition_residual: f64,
    pub particular_residual: f64,
    pub family_residual: f64,
    pub seed_residual: f64,
    pub pass: bool,
}

/// The three residual metrics of one constructed case, measured the same
/// way the acceptance gate measures them.
pub fn metrics(
    cc: &ConstructedCase,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64, f64, f64), CaseError> {
    let (particular, _) = residual_sup(&cc.problem, &cc.y_p, tol::CHECK_GRID)?;
    let mut family = 0.0f64;
    for _ in 0..8 {
        let c: f64 = rng.gen_range(-3.0..3.0);
        let (r, _used) = family_residual_sup(
            &cc.problem,
            &cc.general,
            c,
            tol::CHECK_GRID,
            tol::POLE_GUARD_RADIUS,
        )?;
        family = family.max(r);
    }
    let seed = seed_relation_check(cc)?;
    Ok((cc.condition_residual, particular, family, seed))
}

/// Generate one guard-respecting random spec for `case`. Returns the spec
/// and its canonical source string (input of the digest).
pub fn random_spec(case: CaseId, rng: &mut ChaCha8Rng) -> Result<(CaseSpec, String), CaseError> {
    let iv = Interval::new(0.0, 1.0);
    let x0 = 0.0;
    let mk = |src: &str, label: &str| -> Result<ScalarFunction, CaseError> {
        exprlang::compile(src, label, iv)
            .map_err(|e| CaseError::InvalidSpec(format!("generated `{src}`: {e}")))
    };

    let bounded = |rng: &mut ChaCha8Rng, amp: f64| bounded_expr(rng, amp);
    let positive = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| positive_expr(rng, lo, hi);

    let (a_src, b_src, c_src, f_src, constant, branch): (
        Option<String>,
        Option<String>,
        Option<String>,
        String,
        Option<f64>,
        Option<Branch>,
    ) = match case.get() {
        1 => (
            None,
            Some(bounded(rng, 0.8)),
            Some(positive(rng, 0.6, 1.2)),
            bounded(rng, 1.5),
            Some(round6(rng.gen_range(-0.5..0.5))),
            None,
        ),
        2 => (
            None,
            Some(bounded(rng, 0.7)),
            Some(positive(rng, 0.6, 1.2)),
            positive(rng, 0.3, 1.0),
            None,
            Some(random_branch(rng)),
        ),
        3 => {
            let a = bounded(rng, 0.7);
            let c = positive(rng, 0.6, 1.2);
            let f = positive(rng, 0.3, 1.0);
            // C3 above sup ∫[a + f2/(4c)] keeps the bracket negative, and
            // with c > 0 that lands in the printed branch's region.
            let af = mk(&a, "a")?;
            let cf = mk(&c, "c")?;
            let ff = mk(&f, "f2")?;
            let seed = ScalarFunction::fallible("probe", iv, move |x| {
                Ok(af.value(x)? + ff.value(x)? / (4.0 * cf.value(x)?))
            });
            let q = antiderivative(&seed, x0, iv, 1e-8)?.as_function();
            let sup = sup_on_grid(&q, iv)?;
            let c3 = round6(sup + rng.gen_range(0.3..0.8));
            (Some(a), None, Some(c), f, Some(c3), None)
        }
        4 => {
            let a = bounded(rng, 0.7);
            let b = bounded(rng, 0.7);
            let f = positive(rng, 0.3, 1.0);
            let branch = random_branch(rng);
            let sg = branch.sign();
            let af = mk(&a, "a")?;
            let bf = mk(&b, "b")?;
            let ff = mk(&f, "f2")?;
            let half = ScalarFunction::fallible("probe", iv, move |x| {
                let bv = bf.value(x)?;
                let fv = ff.value(x)?;
                let d = -bv + sg * (fv + bv * bv).max(0.0).sqrt();
                Ok(-fv / (2.0 * d))
            });
            let s = antiderivative(&half, x0, iv, 1e-8)?.as_function();
            let ap = ScalarFunction::fallible("probe2", iv, move |x| {
                Ok(af.value(x)? * s.value(x)?.exp())
            });
            let q = antiderivative(&ap, x0, iv, 1e-8)?.as_function();
            let min = -sup_on_grid_neg(&q, iv)?;
            // C5 + ∫aP stays >= ~0.3
            let c5 = round6(0.3 + rng.gen_range(0.0..0.5) - min.min(0.0));
            (Some(a), Some(b), None, f, Some(c5), Some(branch))
        }
        5 => {
            let b = bounded(rng, 0.5);
            let c = positive(rng, 0.6, 1.2);
            let f = bounded(rng, 1.2);
            let bf = mk(&b, "b")?;
            let cf = mk(&c, "c")?;
            let ff = mk(&f, "f3")?;
            let cf2 = cf.clone();
            let seed = ScalarFunction::fallible("probe", iv, move |x| {
                Ok(ff.value(x)? / (2.0 * cf2.value(x)?))
            });
            let p = antiderivative(&seed, x0, iv, 1e-8)?.as_function();
            // b + c(P - C7) >= 0.3 pointwise
            let mut c7 = f64::INFINITY;
            for x in iv.grid(tol::CHECK_GRID) {
                let bv = bf.eval(x)?;
                let cv = cf.eval(x)?;
                let pv = p.eval(x)?;
                c7 = c7.min((bv + cv * pv - 0.3) / cv);
            }
            let c7 = round6(c7 - rng.gen_range(0.0..0.5));
            (None, Some(b), Some(c), f, Some(c7), None)
        }
        6 => {
            let a = format!("-({})", positive(rng, 0.4, 0.9));
            let c = positive(rng, 0.6, 1.2);
            let f = positive(rng, 0.3, 1.0);
            let cf = mk(&c, "c")?;
            let ff = mk(&f, "f3")?;
            let seed = ScalarFunction::fallible("probe", iv, move |x| {
                Ok(ff.value(x)? / (2.0 * cf.value(x)?))
            });
            let p = antiderivative(&seed, x0, iv, 1e-8)?.as_function();
            let sup = sup_on_grid(&p, iv)?;
            // H = P - C7 <= -0.3: with a < 0 < c that keeps b + cH < 0
            let c7 = round6(sup + rng.gen_range(0.3..0.8));
            (Some(a), None, Some(c), f, Some(c7), None)
        }
        7 => (
            None,
            Some(bounded(rng, 0.7)),
            Some(positive(rng, 0.6, 1.2)),
            bounded(rng, 1.0),
            None,
            None,
        ),
        8 => (
            Some(bounded(rng, 0.7)),
            None,
            Some(positive(rng, 0.6, 1.2)),
            positive(rng, 0.3, 1.0),
            None,
            None,
        ),
        9 => {
            let a = bounded(rng, 0.7);
            let b = bounded(rng, 0.5);
            let f = bounded(rng, 1.0);
            let af = mk(&a, "a")?;
            let bf = mk(&b, "b")?;
            let ff = mk(&f, "f4")?;
            let half = ScalarFunction::fallible("probe", iv, move |x| {
                Ok(-(0.5 * ff.value(x)? + bf.value(x)?))
            });
            let s = antiderivative(&half, x0, iv, 1e-8)?.as_function();
            let ap = ScalarFunction::fallible("probe2", iv, move |x| {
                Ok(af.value(x)? * s.value(x)?.exp())
            });
            let q = antiderivative(&ap, x0, iv, 1e-8)?.as_function();
            let min = -sup_on_grid_neg(&q, iv)?;
            let c12 = round6(0.3 + rng.gen_range(0.0..0.5) - 2.0 * min.min(0.0));
            (Some(a), Some(b), None, f, Some(c12), None)
        }
        10 => (
            None,
            Some(bounded(rng, 0.7)),
            Some(positive(rng, 0.6, 1.2)),
            bounded(rng, 0.8),
            None,
            Some(random_branch(rng)),
        ),
        _ => unreachable!(),
    };

    let mut source = format!("case={case};I=[0,1];x0=0");
    for (name, s) in [("a", &a_src), ("b", &b_src), ("c", &c_src)] {
        if let Some(s) = s {
            source.push_str(&format!(";{name}={s}"));
        }
    }
    source.push_str(&format!(";f={f_src}"));
    if let Some(k) = constant {
        source.push_str(&format!(";const={k:?}"));
    }
    if let Some(br) = branch {
        source.push_str(&format!(";branch={br}"));
    }

    let spec = CaseSpec {
        case,
        a: a_src.as_deref().map(|s| mk(s, "a")).transpose()?,
        b: b_src.as_deref().map(|s| mk(s, "b")).transpose()?,
        c: c_src.as_deref().map(|s| mk(s, "c")).transpose()?,
        generator: mk(&f_src, "f")?,
        constant,
        branch,
        base_point: x0,
        interval: iv,
    };
    Ok((spec, source))
}

/// Fuzz one case once: generate (with rejection), construct, measure.
pub fn run_case(
    case: CaseId,
    rng: &mut ChaCha8Rng,
    opts: &BuildOptions,
    tols: &FuzzTolerances,
) -> Result<FuzzOutcome, CaseError> {
    let (cc, source) = construct_random(case, rng, opts)?;
    let (condition, particular, family, seed) = metrics(&cc, rng)?;
    Ok(FuzzOutcome {
        case,
        digest: digest16(&source),
        condition_residual: condition,
        particular_residual: particular,
        family_residual: family,
        seed_residual: seed,
        pass: condition <= tols.condition && particular <= tols.particular && family <= tols.family,
    })
}

/// Generate-and-construct with rejection sampling (guard violations and
/// branch-region misses draw a new spec).
pub fn construct_random(
    case: CaseId,
    rng: &mut ChaCha8Rng,
    opts: &BuildOptions,
) -> Result<(ConstructedCase, String), CaseError> {
    let mut last_err = None;
    for _ in 0..60 {
        let (spec, source) = random_spec(case, rng)?;
        match construct_with(&spec, opts) {
            Ok(cc) => return Ok((cc, source)),
            Err(
                e @ (CaseError::GuardViolation { .. }
                | CaseError::RadicandNegative { .. }
                | CaseError::Calculus(_)
                | CaseError::Riccati(RiccatiError::ParticularNotASolution { .. })),
            ) => last_err = Some(e),
            Err(other) => return Err(other),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        CaseError::InvalidSpec("rejection sampling exhausted".to_string())
    }))
}

/// Run `n` fuzzed constructions for each listed case with one seeded
/// stream.
pub fn run_fuzz(
    cases: &[CaseId],
    n: usize,
    seed: u64,
    opts: &BuildOptions,
    tols: &FuzzTolerances,
) -> Result<Vec<FuzzOutcome>, CaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases.len() * n);
    for &case in cases {
        for _ in 0..n {
            out.push(run_case(case, &mut rng, opts, tols)?);
        }
    }
    Ok(out)
}

pub fn digest16(source: &str) -> String {
    let hash = Sha256::digest(source.as_bytes());
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn random_branch(rng: &mut ChaCha8Rng) -> Branch {
    if rng.gen_bool(0.5) {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

/// Six-decimal rounding keeps generated constants short and the printed
/// spec source exactly reproducible.
fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn bounded_expr(rng: &mut ChaCha8Rng, amp: f64) -> String {
    let c0 = round6(rng.gen_range(-0.35..0.35) * amp);
    let c1 = round6(rng.gen_range(-0.18..0.18) * amp);
    let c2 = round6(rng.gen_range(-0.12..0.12) * amp);
    let c3 = round6(rng.gen_range(-0.06..0.06) * amp);
    let trig_amp = round6(rng.gen_range(-0.3..0.3) * amp);
    let omega = round6(rng.gen_range(0.5..2.5));
    let trig = if rng.gen_bool(0.5) { "sin" } else { "cos" };
    format!("({c0:?})+({c1:?})*x+({c2:?})*x^2+({c3:?})*x^3+({trig_amp:?})*{trig}(({omega:?})*x)")
}

fn positive_expr(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> String {
    let base = round6(rng.gen_range(lo..hi));
    let dev = bounded_expr(rng, 0.45 * base);
    format!("{base:?}+{dev}")
}

fn sup_on_grid(f: &ScalarFunction, iv: Interval) -> Result<f64, CaseError> {
    let mut sup = f64::NEG_INFINITY;
    for x in iv.grid(tol::CHECK_GRID) {
        sup = sup.max(f.eval(x)?);
    }
    Ok(sup)
}

/// Minimum over the grid, returned negated (so callers can treat it like
/// a sup of the negative part).
fn sup_on_grid_neg(f: &ScalarFunction, iv: Interval) -> Result<f64, CaseError> {
    let mut inf = f64::INFINITY;
    for x in iv.grid(tol::CHECK_GRID) {
        inf = inf.min(f.eval(x)?);
    }
    Ok(-inf)
}
