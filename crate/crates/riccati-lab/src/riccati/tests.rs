use super::*;
use crate::calculus::ScalarFunction;
use crate::exprlang;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi)
}

fn constant_problem(a: f64, b: f64, c: f64, interval: Interval) -> RiccatiProblem {
    RiccatiProblem::new(
        ScalarFunction::constant("a", interval, a).with_derivative(|_| 0.0),
        ScalarFunction::constant("b", interval, b).with_derivative(|_| 0.0),
        ScalarFunction::constant("c", interval, c).with_derivative(|_| 0.0),
    )
    .unwrap()
}

#[test]
fn residual_of_constant_solution() {
    let p = constant_problem(0.0, 0.0, 0.0, iv(0.0, 1.0));
    let y = ScalarFunction::constant("7", iv(0.0, 1.0), 7.0);
    for x in [0.1, 0.5, 0.9] {
        assert_eq!(residual(&p, &y, x).unwrap(), 0.0);
    }
}

#[test]
fn residual_of_known_pole_solution() {
    // y' = y² solved by 1/(1-x)
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 0.9));
    let y = ScalarFunction::new("1/(1-x)", iv(0.0, 0.9), |x| 1.0 / (1.0 - x))
        .with_derivative(|x| 1.0 / ((1.0 - x) * (1.0 - x)));
    assert!(residual(&p, &y, 0.0).unwrap().abs() < 1e-14);
    assert!(residual(&p, &y, 0.5).unwrap().abs() < 1e-12);
}

#[test]
fn residual_of_tanh() {
    // y' = 1 - y² solved by tanh
    let p = constant_problem(1.0, 0.0, -1.0, iv(-1.0, 1.0));
    let y = ScalarFunction::new("tanh", iv(-1.0, 1.0), f64::tanh)
        .with_derivative(|x| 1.0 - x.tanh() * x.tanh());
    assert!(residual(&p, &y, 0.3).unwrap().abs() < 1e-10);
}

#[test]
fn family_bc_of_pure_square() {
    // y' = y², y_p ≡ 0: y(x; C) = 1/(C - x)
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 0.9));
    let y_p = ScalarFunction::constant("0", iv(0.0, 0.9), 0.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    assert!((fam.eval(2.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
    for x in iv(0.0, 0.9).grid(19) {
        let expected = 1.0 / (2.0 - x);
        assert!((fam.eval(2.0, x).unwrap() - expected).abs() < 1e-9 * (1.0 + expected));
    }
}

#[test]
fn family_bc_second_constant_root() {
    // y' = 1 - y², y_p ≡ 1; C = -1/2 selects the other constant root -1
    let p = constant_problem(1.0, 0.0, -1.0, iv(0.0, 1.0));
    let y_p = ScalarFunction::constant("1", iv(0.0, 1.0), 1.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    for x in iv(0.0, 1.0).grid(11) {
        assert!((fam.eval(-0.5, x).unwrap() + 1.0).abs() < 1e-9);
    }
}

#[test]
fn family_member_residual_property() {
    let p = constant_problem(1.0, 0.0, -1.0, iv(0.0, 1.0));
    let y_p = ScalarFunction::constant("1", iv(0.0, 1.0), 1.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    for c in [-2.0, -0.5, 0.3, 5.0] {
        let (r, used) = family_residual_sup(&p, &fam, c, 257, 1e-2).unwrap();
        assert!(r <= 1e-6, "C={c}: residual {r:e}");
        assert!(used > 200);
    }
}

#[test]
fn rejects_non_solution_particular() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 0.9));
    let wrong = ScalarFunction::constant("3", iv(0.0, 0.9), 3.0).with_derivative(|_| 0.0);
    assert!(matches!(
        family_from_bc(&p, &wrong, &FamilyOptions::default()),
        Err(RiccatiError::ParticularNotASolution { .. })
    ));
}

#[test]
fn family_ac_rejects_vanishing_particular() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 0.9));
    let y_p = ScalarFunction::constant("0", iv(0.0, 0.9), 0.0).with_derivative(|_| 0.0);
    assert!(matches!(
        family_from_ac(&p, &y_p, &FamilyOptions::default()),
        Err(RiccatiError::ParticularVanishes { .. })
    ));
}

fn match_and_compare(
    fam_a: &SolutionFamily,
    fam_b: &SolutionFamily,
    c_a: f64,
    interval: Interval,
    tol_cmp: f64,
) {
    let x_m = interval.lo + 0.37 * interval.width();
    let target = fam_a.eval(c_a, x_m).unwrap();
    let c_b = fam_b.constant_for(x_m, target).unwrap();
    for x in interval.grid(101) {
        let (ya, yb) = (fam_a.eval(c_a, x), fam_b.eval(c_b, x));
        if let (Ok(ya), Ok(yb)) = (ya, yb) {
            assert!(
                (ya - yb).abs() <= tol_cmp * (1.0 + ya.abs()),
                "mismatch at x={x}: {ya} vs {yb}"
            );
        }
    }
}

#[test]
fn three_formulas_agree_after_constant_matching() {
    let p = constant_problem(1.0, 0.0, -1.0, iv(0.0, 1.0));
    let y_p = ScalarFunction::constant("1", iv(0.0, 1.0), 1.0).with_derivative(|_| 0.0);
    let opts = FamilyOptions::default();
    let bc = family_from_bc(&p, &y_p, &opts).unwrap();
    let ac = family_from_ac(&p, &y_p, &opts).unwrap();
    let ab = family_from_ab(&p, &y_p, &opts).unwrap();
    assert_eq!(bc.tag(), FormulaTag::Gs);
    assert_eq!(ac.tag(), FormulaTag::Gs1);
    assert_eq!(ab.tag(), FormulaTag::Gs2);
    match_and_compare(&bc, &ac, 2.0, iv(0.0, 1.0), 1e-8);
    match_and_compare(&bc, &ab, 2.0, iv(0.0, 1.0), 1e-8);
    // nonconstant problem: y' = 1 + y/x·0 ... use expression coefficients
    let a = exprlang::compile("1+x^2", "a", iv(0.0, 1.0)).unwrap();
    let b = exprlang::compile("0", "b", iv(0.0, 1.0)).unwrap();
    let c = exprlang::compile("-1", "c", iv(0.0, 1.0)).unwrap();
    // y_p = x is a solution of y' = (1 + x²) + 0·y - y²  ⇔ 1 = 1 + x² - x²
    let p2 = RiccatiProblem::new(a, b, c).unwrap();
    let y_p2 = exprlang::compile("x", "y_p", iv(0.0, 1.0)).unwrap();
    // keep y_p away from zero for the ac/ab forms: shift the interval
    let a = exprlang::compile("1+x^2", "a", iv(0.5, 1.5)).unwrap();
    let b = exprlang::compile("0", "b", iv(0.5, 1.5)).unwrap();
    let c = exprlang::compile("-1", "c", iv(0.5, 1.5)).unwrap();
    let p3 = RiccatiProblem::new(a, b, c).unwrap();
    let y_p3 = exprlang::compile("x", "y_p", iv(0.5, 1.5)).unwrap();
    let bc2 = family_from_bc(&p2, &y_p2, &opts).unwrap();
    let (r, _) = family_residual_sup(&p2, &bc2, 3.0, 257, 1e-2).unwrap();
    assert!(r <= 1e-6);
    let bc3 = family_from_bc(&p3, &y_p3, &opts).unwrap();
    let ac3 = family_from_ac(&p3, &y_p3, &opts).unwrap();
    let ab3 = family_from_ab(&p3, &y_p3, &opts).unwrap();
    match_and_compare(&bc3, &ac3, 4.0, iv(0.5, 1.5), 1e-8);
    match_and_compare(&bc3, &ab3, 4.0, iv(0.5, 1.5), 1e-8);
}

#[test]
fn constant_for_rejects_particular_target() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 0.9));
    let y_p = ScalarFunction::constant("0", iv(0.0, 0.9), 0.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    assert!(fam.constant_for(0.2, 0.0).is_err());
    let c = fam.constant_for(0.0, 0.5).unwrap();
    assert!((c - 2.0).abs() < 1e-12);
}

#[test]
fn oracle_known_pole_location() {
    // y' = y², y(0) = 1 blows up at x = 1
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 2.0));
    let traj = integrate_numeric(&p, 0.0, 1.0, 1.0, 2.0).unwrap();
    let pole = traj.pole().expect("should report a pole");
    assert!((pole - 1.0).abs() <= 1e-3, "pole reported at {pole}");
    let (last_x, last_y) = traj.last();
    assert!(last_x <= 1.0 && last_y.abs() <= 1e8);
}

#[test]
fn oracle_matches_tanh() {
    let p = constant_problem(1.0, 0.0, -1.0, iv(0.0, 1.0));
    let traj = integrate_numeric(&p, 0.0, 0.0, 1.0, 1.0).unwrap();
    assert!(traj.reached_end());
    let (x_end, y_end) = traj.last();
    assert!((x_end - 1.0).abs() < 1e-9);
    assert!((y_end - 1.0f64.tanh()).abs() < 1e-8);
}

#[test]
fn oracle_backward_direction() {
    let p = constant_problem(1.0, 0.0, -1.0, iv(-1.0, 1.0));
    let traj = integrate_numeric(&p, 0.0, 0.0, -1.0, -1.0).unwrap();
    assert!(traj.reached_end());
    // samples are ordered by increasing x even when integrating backward
    assert!(traj
        .samples
        .windows(2)
        .all(|w| w[0].0 < w[1].0));
    let first = traj.samples.first().unwrap();
    assert!((first.0 + 1.0).abs() < 1e-9);
    assert!((first.1 - (-1.0f64).tanh()).abs() < 1e-8);
}

#[test]
fn oracle_direction_validation() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 1.0));
    assert!(matches!(
        integrate_numeric(&p, 0.0, 1.0, -1.0, 1.0),
        Err(RiccatiError::BadDirection { .. })
    ));
}

#[test]
fn oracle_vs_closed_form_nonautonomous() {
    // a = 1 - x², b = 0, c = 1: y_p = x, family x + e^(x²)/(C - ∫e^(ψ²))
    let a = exprlang::compile("1-x^2", "a", iv(0.0, 0.4)).unwrap();
    let b = exprlang::compile("0", "b", iv(0.0, 0.4)).unwrap();
    let c = exprlang::compile("1", "c", iv(0.0, 0.4)).unwrap();
    let p = RiccatiProblem::new(a, b, c).unwrap();
    let y_p = exprlang::compile("x", "y_p", iv(0.0, 0.4)).unwrap();
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();

    // member through y(0) = 1 (C₀ = 1); the pole sits outside [0, 0.4]
    let c0 = fam.constant_for(0.0, 1.0).unwrap();
    assert!((c0 - 1.0).abs() < 1e-12);
    let traj = integrate_numeric(&p, 0.0, 1.0, 1.0, 0.4).unwrap();
    assert!(traj.reached_end());
    for &(x, y) in &traj.samples {
        let cf = fam.eval(c0, x).unwrap();
        assert!(
            (cf - y).abs() <= 1e-6 * (1.0 + cf.abs()),
            "x={x}: closed form {cf} vs oracle {y}"
        );
    }

    // and the trajectory started on the particular solution stays on it
    let traj = integrate_numeric(&p, 0.0, 0.0, 1.0, 0.4).unwrap();
    for &(x, y) in &traj.samples {
        assert!((y - x).abs() <= 1e-7 * (1.0 + x.abs()));
    }
}

#[test]
fn pole_location_by_bisection() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 1.0));
    let y_p = ScalarFunction::constant("0", iv(0.0, 1.0), 0.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    // y = 1/(0.5 - x): pole at 0.5
    let poles = fam.poles(0.5);
    assert_eq!(poles.len(), 1);
    assert!((poles[0] - 0.5).abs() < 1e-9);
    assert!(matches!(
        fam.eval(0.5, poles[0]),
        Err(RiccatiError::PoleAt { .. })
    ));
    // far constant: no pole inside
    assert!(fam.poles(5.0).is_empty());
}

#[test]
fn cross_ratio_of_constants() {
    let interval = iv(0.0, 1.0);
    let mk = |v: f64| ScalarFunction::constant(format!("{v}"), interval, v);
    let (y1, y2, y3, y4) = (mk(1.0), mk(2.0), mk(3.0), mk(4.0));
    for x in [0.0, 0.33, 1.0] {
        let r = cross_ratio(&y1, &y2, &y3, &y4, x).unwrap();
        assert!((r - 4.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn cross_ratio_constant_across_family() {
    let p = constant_problem(0.0, 0.0, 1.0, iv(0.0, 1.0));
    let y_p = ScalarFunction::constant("0", iv(0.0, 1.0), 0.0).with_derivative(|_| 0.0);
    let fam = family_from_bc(&p, &y_p, &FamilyOptions::default()).unwrap();
    let members: Vec<_> = [2.0, 3.0, 5.0, 9.0].iter().map(|&c| fam.member(c)).collect();
    let r0 = cross_ratio(&members[0], &members[1], &members[2], &members[3], 0.0).unwrap();
    let r1 = cross_ratio(&members[0], &members[1], &members[2], &members[3], 1.0).unwrap();
    assert!((r0 - r1).abs() < 1e-10, "{r0} vs {r1}");
}

#[test]
fn cross_ratio_degenerate_quadruple() {
    let interval = iv(0.0, 1.0);
    let mk = |v: f64| ScalarFunction::constant(format!("{v}"), interval, v);
    let (y1, y2, y3) = (mk(1.0), mk(2.0), mk(3.0));
    let y4 = mk(1.0);
    assert!(matches!(
        cross_ratio(&y1, &y2, &y3, &y4, 0.5),
        Err(RiccatiError::DegenerateQuadruple { .. })
    ));
}

#[test]
fn classical_sum_condition() {
    // (1, -2, 1): y' = (y - 1)²
    let p = constant_problem(1.0, -2.0, 1.0, iv(0.0, 1.0));
    let report = detect_classical(&p);
    let sum = report.coefficient_sum.expect("sum condition holds");
    assert!(sum.residual <= 1e-9);
    // y ≡ 1 satisfies the equation and is the family's infinite-K limit
    let one = ScalarFunction::constant("1", iv(0.0, 1.0), 1.0).with_derivative(|_| 0.0);
    assert_eq!(residual(&p, &one, 0.5).unwrap(), 0.0);
    let big_k = sum.family.eval(1e9, 0.5).unwrap();
    assert!((big_k - 1.0).abs() < 1e-8);
    // finite-K members satisfy the equation
    for k in [-3.0, 0.5, 2.0, 10.0] {
        let (r, _) = family_residual_sup(&p, &sum.family, k, 257, 1e-2).unwrap();
        assert!(r <= 1e-6, "K={k}: residual {r:e}");
    }
}

#[test]
fn classical_constant_discriminant() {
    // (-1, 0, 1): Δ = 4, roots ∓1
    let p = constant_problem(-1.0, 0.0, 1.0, iv(0.0, 1.0));
    let report = detect_classical(&p);
    let disc = report.constant_discriminant.expect("discriminant holds");
    assert!((disc.delta - 4.0).abs() < 1e-12);
    assert!(!disc.complex_branch);
    let (y_plus, y_minus) = disc.roots.expect("real roots");
    for x in [0.1, 0.6] {
        assert!((y_plus.eval(x).unwrap() + 1.0).abs() < 1e-12);
        assert!((y_minus.eval(x).unwrap() - 1.0).abs() < 1e-12);
        assert!(residual(&p, &y_plus, x).unwrap().abs() < 1e-9);
        assert!(residual(&p, &y_minus, x).unwrap().abs() < 1e-9);
    }
}

#[test]
fn classical_discriminant_requires_unit_c() {
    let p = constant_problem(-1.0, 0.0, 2.0, iv(0.0, 1.0));
    let report = detect_classical(&p);
    assert!(report.constant_discriminant.is_none());
}

#[test]
fn classical_complex_branch_flagged() {
    // Δ = b² - 2b' - 4a = -4 < 0
    let p = constant_problem(1.0, 0.0, 1.0, iv(0.0, 1.0));
    let report = detect_classical(&p);
    let disc = report.constant_discriminant.expect("condition holds");
    assert!(disc.complex_branch);
    assert!(disc.roots.is_none());
    assert!((disc.delta + 4.0).abs() < 1e-12);
}

#[test]
fn classical_polynomial_hint_propagates() {
    let a = exprlang::compile("-1", "a", iv(0.0, 1.0)).unwrap();
    let b = exprlang::compile("0", "b", iv(0.0, 1.0)).unwrap();
    let c = exprlang::compile("1", "c", iv(0.0, 1.0)).unwrap();
    let p = RiccatiProblem::new(a, b, c).unwrap();
    let disc = detect_classical(&p).constant_discriminant.unwrap();
    assert_eq!(disc.polynomial_inputs, Some(true));
}

#[test]
fn lambda_mu_constant_case() {
    // a = -1, b = 0, c = 1: λ²·1 + μ²·(-1) = 0 at λ = ±μ
    let p = constant_problem(-1.0, 0.0, 1.0, iv(0.0, 1.0));
    let fit = detect_classical(&p).lambda_mu.expect("condition holds");
    assert!(fit.residual <= 1e-9);
    assert!((fit.lambda.abs() - 0.5).abs() < 1e-9);
    assert!((fit.mu.abs() - 0.5).abs() < 1e-9);
}

#[test]
fn lambda_mu_nonconstant_fit() {
    // enforce c + 2b·t + 4a·t²... condition λ²c + λμ b + μ²a ≡ 0 with
    // (λ, μ) = (1, 2): c + 2b + 4a ≡ 0, so b = -(c + 4a)/2
    let interval = iv(0.0, 1.0);
    let a = exprlang::compile("0.3*sin(x)", "a", interval).unwrap();
    let c = exprlang::compile("x+2", "c", interval).unwrap();
    let b = exprlang::compile("-((x+2)+4*0.3*sin(x))/2", "b", interval).unwrap();
    let p = RiccatiProblem::new(a, b, c).unwrap();
    let fit = detect_classical(&p).lambda_mu.expect("condition holds");
    assert!(fit.residual <= 1e-9, "residual {:e}", fit.residual);
    assert!(
        (fit.lambda / fit.mu - 0.5).abs() < 1e-6,
        "λ/μ = {}",
        fit.lambda / fit.mu
    );
}

#[test]
fn lambda_mu_rejects_generic_problem() {
    let a = exprlang::compile("1", "a", iv(0.0, 1.0)).unwrap();
    let b = exprlang::compile("x", "b", iv(0.0, 1.0)).unwrap();
    let c = exprlang::compile("1", "c", iv(0.0, 1.0)).unwrap();
    let p = RiccatiProblem::new(a, b, c).unwrap();
    let report = detect_classical(&p);
    assert!(report.lambda_mu.is_none());
    assert!(report.coefficient_sum.is_none());
    assert!(!report.any());
}

#[test]
fn detection_invariant_under_grid_density() {
    let problems = [
        constant_problem(1.0, -2.0, 1.0, iv(0.0, 1.0)),
        constant_problem(-1.0, 0.0, 1.0, iv(0.0, 1.0)),
        constant_problem(0.7, 0.3, -0.2, iv(0.0, 1.0)),
    ];
    for p in &problems {
        let r129 = detect_classical_with_grid(p, 129);
        let r257 = detect_classical_with_grid(p, 257);
        assert_eq!(
            r129.coefficient_sum.is_some(),
            r257.coefficient_sum.is_some()
        );
        assert_eq!(r129.lambda_mu.is_some(), r257.lambda_mu.is_some());
        assert_eq!(
            r129.constant_discriminant.is_some(),
            r257.constant_discriminant.is_some()
        );
    }
}

#[test]
fn problem_requires_common_interval() {
    let a = ScalarFunction::constant("a", iv(0.0, 1.0), 0.0);
    let b = ScalarFunction::constant("b", iv(2.0, 3.0), 0.0);
    let c = ScalarFunction::constant("c", iv(0.0, 1.0), 1.0);
    assert!(matches!(
        RiccatiProblem::new(a, b, c),
        Err(RiccatiError::NoCommonInterval)
    ));
}
