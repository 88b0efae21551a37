//! Detectors for the classical integrability conditions that need no
//! generating function: vanishing coefficient sum, the quadratic
//! constant-ratio condition (which reduces the equation to Bernoulli
//! form), and the constant-discriminant condition for `c ≡ 1`.

use crate::calculus::{
    antiderivative, differentiate, PointError, ScalarFunction,
};
use crate::tol;

use super::family::exp_of_integral;
use super::{FormulaTag, RiccatiProblem, SolutionFamily};

/// Result of probing one problem for the classical conditions. Every
/// finding is `Some` only when its condition holds to tolerance on the
/// detection grid.
#[derive(Debug)]
pub struct ClassicalReport {
    /// `a + b + c ≡ 0`, with the explicit one-constant solution family.
    pub coefficient_sum: Option<CoefficientSumFinding>,
    /// `λ²c + λμb + μ²a ≡ 0` for some constants `(λ, μ)`; detection only
    /// (the substitution `y = λ/μ + u` yields a Bernoulli equation, whose
    /// solution path is out of scope here).
    pub lambda_mu: Option<LambdaMuFit>,
    /// `c ≡ 1` and `Δ = b² - 2b' - 4a` constant.
    pub constant_discriminant: Option<DiscriminantFinding>,
    /// Number of grid points the detection ran on.
    pub grid_points: usize,
}

impl ClassicalReport {
    pub fn any(&self) -> bool {
        self.coefficient_sum.is_some()
            || self.lambda_mu.is_some()
            || self.constant_discriminant.is_some()
    }
}

/// `a + b + c ≡ 0` holds; carries the explicit family
/// `y(x; K) = (K + J(x) - E(x)) / (K + J(x) + E(x))` with
/// `E = e^{∫(c-a)}` and `J = ∫(c+a)·E`.
#[derive(Debug)]
pub struct CoefficientSumFinding {
    pub residual: f64,
    pub family: SolutionFamily,
}

/// Constants `(λ, μ)`, normalized to `|λ| + |μ| = 1`, with the normalized
/// sup residual of `λ²c + λμb + μ²a` on the grid.
#[derive(Debug, Clone, Copy)]
pub struct LambdaMuFit {
    pub lambda: f64,
    pub mu: f64,
    pub residual: f64,
}

/// `c ≡ 1` and the discriminant `Δ = b² - 2b' - 4a` is constant.
#[derive(Debug)]
pub struct DiscriminantFinding {
    /// Grid mean of `Δ`.
    pub delta: f64,
    /// Sup deviation of `Δ` from its mean, normalized.
    pub variation: f64,
    /// Sup of `|c - 1|` on the grid.
    pub c_deviation: f64,
    /// The two explicit solutions `y_± = -(b ± √Δ)/2`, present when
    /// `Δ >= 0`.
    pub roots: Option<(ScalarFunction, ScalarFunction)>,
    /// `Δ < 0`: the roots are a complex pair, out of scope.
    pub complex_branch: bool,
    /// Whether `a` and `b` were declared polynomial by their source
    /// expressions (informational; the detector checks the analytic
    /// condition regardless).
    pub polynomial_inputs: Option<bool>,
}

/// Probe `p` on the default 129-point grid.
pub fn detect_classical(p: &RiccatiProblem) -> ClassicalReport {
    detect_classical_with_grid(p, tol::DETECT_GRID)
}

/// Probe `p` on an `n`-point grid. The boolean outcomes are insensitive
/// to the grid density for conditions that genuinely hold or fail.
pub fn detect_classical_with_grid(p: &RiccatiProblem, n: usize) -> ClassicalReport {
    let samples = match sample_coeffs(p, n) {
        Some(s) => s,
        None => {
            return ClassicalReport {
                coefficient_sum: None,
                lambda_mu: None,
                constant_discriminant: None,
                grid_points: n,
            }
        }
    };

    ClassicalReport {
        coefficient_sum: detect_sum(p, &samples),
        lambda_mu: detect_lambda_mu(&samples),
        constant_discriminant: detect_discriminant(p, &samples),
        grid_points: n,
    }
}

struct CoeffSamples {
    xs: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    scale: f64,
}

fn sample_coeffs(p: &RiccatiProblem, n: usize) -> Option<CoeffSamples> {
    let xs = p.interval().grid(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut scale = 0.0f64;
    for &x in &xs {
        let (av, bv, cv) = p.coeffs_at(x).ok()?;
        scale = scale.max(av.abs() + bv.abs() + cv.abs());
        a.push(av);
        b.push(bv);
        c.push(cv);
    }
    Some(CoeffSamples { xs, a, b, c, scale })
}

fn detect_sum(p: &RiccatiProblem, s: &CoeffSamples) -> Option<CoefficientSumFinding> {
    let mut sup = 0.0f64;
    for i in 0..s.xs.len() {
        sup = sup.max((s.a[i] + s.b[i] + s.c[i]).abs());
    }
    let residual = sup / (1.0 + s.scale);
    if residual > tol::TOL_COND {
        return None;
    }

    let iv = p.interval();
    let x0 = iv.lo;
    let (a, c) = (p.a().clone(), p.c().clone());
    let diff = ScalarFunction::fallible("c-a", iv, move |x| Ok(c.value(x)? - a.value(x)?));
    let e = exp_of_integral(&diff, x0, iv, tol::TOL_QUAD, "E_sum").ok()?;
    let (a, c, ev) = (p.a().clone(), p.c().clone(), e.clone());
    let integrand = ScalarFunction::fallible("(c+a)*E", iv, move |x| {
        Ok((c.value(x)? + a.value(x)?) * ev.value(x)?)
    });
    let j = antiderivative(&integrand, x0, iv, tol::TOL_QUAD).ok()?;

    // y = (K + J - E)/(K + J + E) = 1 - 2E/(K + J + E): shift 1,
    // numerator -2E, denominator K - (-(J + E)).
    let (jf, ef) = (j.as_function(), e.clone());
    let w = ScalarFunction::fallible("-(J+E)", iv, move |x| {
        Ok(-(jf.value(x)? + ef.value(x)?))
    });
    let (jf, ef) = (j.as_function(), e.clone());
    let w = w.with_derivative_fallible(move |x| {
        let to_pe = |er: crate::calculus::CalculusError| PointError::new(x, er.to_string());
        Ok(-(differentiate(&jf, x).map_err(to_pe)? + differentiate(&ef, x).map_err(to_pe)?))
    });
    let ev = e.clone();
    let numer = ScalarFunction::fallible("-2E", iv, move |x| Ok(-2.0 * ev.value(x)?));
    let ev = e;
    let numer = numer.with_derivative_fallible(move |x| {
        let to_pe = |er: crate::calculus::CalculusError| PointError::new(x, er.to_string());
        Ok(-2.0 * differentiate(&ev, x).map_err(to_pe)?)
    });
    let shift = ScalarFunction::constant("1", iv, 1.0).with_derivative(|_| 0.0);
    let family = SolutionFamily::from_parts(
        "classical-sum(K)",
        FormulaTag::Gs,
        shift,
        numer,
        w,
        iv,
    );
    Some(CoefficientSumFinding { residual, family })
}

fn lambda_mu_residual(s: &CoeffSamples, lambda: f64, mu: f64) -> f64 {
    let mut sup = 0.0f64;
    for i in 0..s.xs.len() {
        sup = sup
            .max((lambda * lambda * s.c[i] + lambda * mu * s.b[i] + mu * mu * s.a[i]).abs());
    }
    sup / (1.0 + s.scale)
}

fn detect_lambda_mu(s: &CoeffSamples) -> Option<LambdaMuFit> {
    let n = s.xs.len() as f64;
    let mut best: Option<LambdaMuFit> = None;
    let mut consider = |lambda: f64, mu: f64| {
        let norm = lambda.abs() + mu.abs();
        if norm == 0.0 {
            return;
        }
        let (l, m) = (lambda / norm, mu / norm);
        let residual = lambda_mu_residual(s, l, m);
        if best.map_or(true, |b| residual < b.residual) {
            best = Some(LambdaMuFit {
                lambda: l,
                mu: m,
                residual,
            });
        }
    };

    // Degenerate directions: pure λ needs c ≡ 0, pure μ needs a ≡ 0.
    consider(1.0, 0.0);
    consider(0.0, 1.0);

    // Least squares in t = λ/μ: minimize Σ (c·t² + b·t + a)², whose
    // stationary points are roots of a cubic.
    let (mut scc, mut scb, mut sbb, mut sca, mut sba) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..s.xs.len() {
        scc += s.c[i] * s.c[i];
        scb += s.c[i] * s.b[i];
        sbb += s.b[i] * s.b[i];
        sca += s.c[i] * s.a[i];
        sba += s.b[i] * s.a[i];
    }
    let (scc, scb, sbb, sca, sba) = (scc / n, scb / n, sbb / n, sca / n, sba / n);
    for t in cubic_real_roots(
        4.0 * scc,
        6.0 * scb,
        2.0 * (sbb + 2.0 * sca),
        2.0 * sba,
    ) {
        consider(t, 1.0);
    }

    best.filter(|f| f.residual <= tol::TOL_COND)
}

/// Real roots of `k3·t³ + k2·t² + k1·t + k0`, with graceful degradation
/// to the quadratic/linear cases.
fn cubic_real_roots(k3: f64, k2: f64, k1: f64, k0: f64) -> Vec<f64> {
    let scale = k3.abs().max(k2.abs()).max(k1.abs()).max(k0.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if k3.abs() < 1e-14 * scale {
        if k2.abs() < 1e-14 * scale {
            if k1.abs() < 1e-14 * scale {
                return Vec::new();
            }
            return vec![-k0 / k1];
        }
        let disc = k1 * k1 - 4.0 * k2 * k0;
        if disc < 0.0 {
            return Vec::new();
        }
        let s = disc.sqrt();
        return vec![(-k1 + s) / (2.0 * k2), (-k1 - s) / (2.0 * k2)];
    }
    // depressed form t = u - k2/(3k3): u³ + pu + q = 0
    let a = k2 / k3;
    let b = k1 / k3;
    let c = k0 / k3;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut roots = Vec::new();
    if disc > 0.0 {
        let s = disc.sqrt();
        let u = cbrt(-q / 2.0 + s) + cbrt(-q / 2.0 - s);
        roots.push(u + shift);
    } else if p == 0.0 && q == 0.0 {
        roots.push(shift);
    } else {
        // three real roots
        let r = (-p / 3.0).powf(1.5);
        let phi = ((-q / 2.0) / r).clamp(-1.0, 1.0).acos();
        let m = 2.0 * (-p / 3.0).sqrt();
        for k in 0..3 {
            roots.push(m * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift);
        }
    }
    roots
}

fn cbrt(v: f64) -> f64 {
    v.signum() * v.abs().powf(1.0 / 3.0)
}

fn detect_discriminant(p: &RiccatiProblem, s: &CoeffSamples) -> Option<DiscriminantFinding> {
    let mut c_dev = 0.0f64;
    let mut c_sup = 0.0f64;
    for &cv in &s.c {
        c_dev = c_dev.max((cv - 1.0).abs());
        c_sup = c_sup.max(cv.abs());
    }
    if c_dev > tol::TOL_COND * (1.0 + c_sup) {
        return None;
    }

    let mut deltas = Vec::with_capacity(s.xs.len());
    for (i, &x) in s.xs.iter().enumerate() {
        let db = differentiate(p.b(), x).ok()?;
        deltas.push(s.b[i] * s.b[i] - 2.0 * db - 4.0 * s.a[i]);
    }
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    let variation = deltas
        .iter()
        .map(|d| (d - mean).abs())
        .fold(0.0f64, f64::max)
        / (1.0 + mean.abs());
    if variation > tol::TOL_COND {
        return None;
    }

    let polynomial_inputs = match (p.a().polynomial_hint(), p.b().polynomial_hint()) {
        (Some(pa), Some(pb)) => Some(pa && pb),
        _ => None,
    };

    let roots = (mean >= 0.0).then(|| {
        let iv = p.interval();
        let sq = mean.sqrt();
        let mk = |sign: f64| {
            let b = p.b().clone();
            let f = ScalarFunction::fallible(
                format!("-(b{}sqrt(D))/2", if sign > 0.0 { "+" } else { "-" }),
                iv,
                move |x| Ok(-(b.value(x)? + sign * sq) / 2.0),
            );
            if p.b().has_exact_derivative() {
                let b = p.b().clone();
                f.with_derivative_fallible(move |x| {
                    let db = differentiate(&b, x)
                        .map_err(|e| PointError::new(x, e.to_string()))?;
                    Ok(-db / 2.0)
                })
            } else {
                f
            }
        };
        (mk(1.0), mk(-1.0))
    });

    Some(DiscriminantFinding {
        delta: mean,
        variation,
        c_deviation: c_dev,
        roots,
        complex_branch: mean < 0.0,
        polynomial_inputs,
    })
}
