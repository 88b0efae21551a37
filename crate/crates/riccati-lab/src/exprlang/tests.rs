use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::calculus::Interval;

fn p(src: &str) -> Expr {
    parse(src).unwrap()
}

fn ev(src: &str, x: f64) -> f64 {
    p(src).eval(x).unwrap()
}

#[test]
fn polynomial_parse_and_eval() {
    let e = p("x^2+1");
    assert_eq!(
        e,
        Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Pow, Expr::Var, Expr::Num(2.0)),
            Expr::Num(1.0)
        )
    );
    assert_eq!(e.eval(2.0).unwrap(), 5.0);
}

#[test]
fn known_values() {
    assert_eq!(ev("exp(0)", 0.0), 1.0);
    assert!((ev("sin(pi/2)", 0.0) - 1.0).abs() < 1e-15);
    assert_eq!(ev("tanh(0)", 0.0), 0.0);
    assert!((ev("log(x)", std::f64::consts::E) - 1.0).abs() < 1e-15);
    assert_eq!(ev("pow(2, 10)", 0.0), 1024.0);
}

#[test]
fn precedence_table() {
    // ^ binds tighter than unary minus
    assert_eq!(
        p("-x^2"),
        Expr::neg(Expr::bin(BinOp::Pow, Expr::Var, Expr::Num(2.0)))
    );
    assert_eq!(ev("-x^2", 3.0), -9.0);
    // right-associative power
    assert_eq!(ev("2^3^2", 0.0), 512.0);
    // unary minus allowed in the exponent
    assert_eq!(ev("2^-3", 0.0), 0.125);
    // unary minus binds tighter than multiplication
    assert_eq!(ev("-2*x", 5.0), -10.0);
    assert_eq!(ev("2-x*3", 1.0), -1.0);
    assert_eq!(ev("(1+2)*x", 2.0), 6.0);
}

#[test]
fn no_implicit_multiplication() {
    let err = parse("2x").unwrap_err();
    match err {
        ParseError::Syntax { offset, .. } => assert_eq!(offset, 1),
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn unknown_identifier_offset() {
    match parse("1+foo(x)").unwrap_err() {
        ParseError::UnknownIdentifier { name, offset } => {
            assert_eq!(name, "foo");
            assert_eq!(offset, 2);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn empty_and_malformed() {
    assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
    assert!(matches!(parse("  "), Err(ParseError::Syntax { .. })));
    let err = parse("1+").unwrap_err();
    match err {
        ParseError::Syntax { expected, .. } => assert!(!expected.is_empty()),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse("(1+2").is_err());
    assert!(parse("sin x").is_err());
}

#[test]
fn trailing_garbage_reports_offset() {
    match parse("1+2 3").unwrap_err() {
        ParseError::Syntax { offset, .. } => assert_eq!(offset, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn scientific_literals() {
    assert_eq!(ev("1.5e2", 0.0), 150.0);
    assert_eq!(ev("2E-3", 0.0), 0.002);
    // 'e' directly after a number without digits falls back to the constant
    assert!((ev("2*e", 0.0) - 2.0 * std::f64::consts::E).abs() < 1e-15);
}

#[test]
fn domain_errors_carry_subexpression() {
    match p("1/x").eval(0.0).unwrap_err() {
        EvalError::Domain { subexpr, x, reason } => {
            assert_eq!(subexpr, "1.0/x");
            assert_eq!(x, 0.0);
            assert!(reason.contains("division"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        p("log(x-1)").eval(0.5),
        Err(EvalError::Domain { .. })
    ));
    assert!(matches!(
        p("sqrt(x)").eval(-1.0),
        Err(EvalError::Domain { .. })
    ));
}

#[test]
fn non_finite_reported() {
    assert!(matches!(
        p("exp(x)").eval(1000.0),
        Err(EvalError::NonFinite { .. })
    ));
    // (-2)^0.5 is NaN in powf
    assert!(matches!(
        p("(0-2)^0.5").eval(0.0),
        Err(EvalError::NonFinite { .. })
    ));
}

#[test]
fn derivative_examples() {
    assert_eq!(p("x^2").derive().to_string(), "2.0*x");
    let d = p("exp(2*x)").derive();
    assert!((d.eval(0.0).unwrap() - 2.0).abs() < 1e-15);
    let d = p("sin(x)").derive();
    assert_eq!(d.eval(0.0).unwrap(), 1.0);
}

#[test]
fn abs_derivative_is_sign() {
    let d = p("abs(x)").derive();
    assert_eq!(d.eval(2.0).unwrap(), 1.0);
    assert_eq!(d.eval(-2.0).unwrap(), -1.0);
    // undefined at zero: division by zero inside sign(u) = u/abs(u)
    assert!(d.eval(0.0).is_err());
}

#[test]
fn general_power_derivative() {
    // d/dx x^x = x^x (log x + 1)
    let d = p("x^x").derive();
    let x = 1.7;
    let expected = x.powf(x) * (x.ln() + 1.0);
    assert!((d.eval(x).unwrap() - expected).abs() < 1e-12 * expected.abs());
    // constant base
    let d = p("2^x").derive();
    let expected = 2.0f64.powf(x) * 2.0f64.ln();
    assert!((d.eval(x).unwrap() - expected).abs() < 1e-12 * expected.abs());
}

#[test]
fn polynomial_detection() {
    assert!(p("1 + 2*x - x^3").is_polynomial());
    assert!(p("(x+1)^2/3").is_polynomial());
    assert!(!p("sin(x)").is_polynomial());
    assert!(!p("x^0.5").is_polynomial());
    assert!(!p("1/x").is_polynomial());
}

#[test]
fn compiled_function_carries_exact_derivative() {
    let f = p("x^3").function("cube", Interval::new(-1.0, 2.0));
    assert!(f.has_exact_derivative());
    assert_eq!(f.polynomial_hint(), Some(true));
    assert_eq!(f.eval(1.5).unwrap(), 3.375);
    let d = crate::calculus::differentiate(&f, 1.0).unwrap();
    assert_eq!(d, 3.0);
}

// random tree generator for the derivative-vs-central-difference sweep

fn random_tree(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..4u8) {
            0 => Expr::Var,
            1 => Expr::Num((rng.gen_range(-3.0..3.0f64) * 100.0).round() / 100.0),
            2 => Expr::Const(Constant::Pi),
            _ => Expr::Var,
        };
    }
    match rng.gen_range(0..10u8) {
        0 => Expr::neg(random_tree(rng, depth - 1)),
        1..=4 => {
            let op = match rng.gen_range(0..5u8) {
                0 => BinOp::Add,
                1 => BinOp::Sub,
                2 => BinOp::Mul,
                3 => BinOp::Div,
                _ => BinOp::Pow,
            };
            let l = random_tree(rng, depth - 1);
            let r = if op == BinOp::Pow {
                // small integer exponents keep magnitudes sane
                Expr::Num(rng.gen_range(1..4u8) as f64)
            } else {
                random_tree(rng, depth - 1)
            };
            Expr::bin(op, l, r)
        }
        5..=8 => {
            let f = match rng.gen_range(0..8u8) {
                0 => Func::Exp,
                1 => Func::Sin,
                2 => Func::Cos,
                3 => Func::Tanh,
                4 => Func::Sinh,
                5 => Func::Cosh,
                6 => Func::Sqrt,
                _ => Func::Abs,
            };
            Expr::call(f, random_tree(rng, depth - 1))
        }
        _ => random_tree(rng, depth - 1),
    }
}

/// 1000 random trees: the symbolic derivative agrees with a central
/// difference wherever both evaluate, away from domain-error loci.
#[test]
fn derivative_matches_central_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    while checked < 1000 {
        let tree = random_tree(&mut rng, rng.gen_range(2..=6));
        let deriv = tree.derive();
        let x: f64 = rng.gen_range(-2.0..2.0);
        let h = 1e-5 * (1.0 + x.abs());

        // exclude domain-error loci (±1e-3) and runaway magnitudes where
        // a second-order difference loses all digits
        let window = [x - 1e-3, x - h, x, x + h, x + 1e-3];
        let vals: Option<Vec<f64>> = window.iter().map(|&t| tree.eval(t).ok()).collect();
        let Some(vals) = vals else { continue };
        if vals.iter().any(|v| v.abs() > 1e6) {
            continue;
        }
        let Ok(d) = deriv.eval(x) else { continue };
        if d.abs() > 1e6 {
            continue;
        }

        let central = |h: f64| -> Option<f64> {
            Some((tree.eval(x + h).ok()? - tree.eval(x - h).ok()?) / (2.0 * h))
        };
        let tol = 1e-6 * (1.0 + d.abs());
        let (Some(fd), Some(fd_half)) = (central(h), central(0.5 * h)) else {
            continue;
        };
        // only trust the difference quotient where it resolves itself
        if (fd - fd_half).abs() > 0.25 * tol {
            continue;
        }
        assert!(
            (d - fd).abs() <= tol,
            "tree `{tree}` at x={x}: symbolic {d} vs central {fd}"
        );
        checked += 1;
    }
}

// proptest strategies for print/parse round-tripping

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Var),
        (0u32..1000).prop_map(|n| Expr::Num(n as f64 / 10.0)),
        Just(Expr::Const(Constant::Pi)),
        Just(Expr::Const(Constant::E)),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 64, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::bin(BinOp::Add, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::bin(BinOp::Sub, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::bin(BinOp::Mul, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::bin(BinOp::Div, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::bin(BinOp::Pow, l, r)),
            inner.clone().prop_map(Expr::neg),
            (inner, 0u8..10).prop_map(|(e, f)| {
                let f = match f {
                    0 => Func::Exp,
                    1 => Func::Log,
                    2 => Func::Sin,
                    3 => Func::Cos,
                    4 => Func::Tan,
                    5 => Func::Tanh,
                    6 => Func::Sinh,
                    7 => Func::Cosh,
                    8 => Func::Sqrt,
                    _ => Func::Abs,
                };
                Expr::call(f, e)
            }),
        ]
    })
}

proptest! {
    /// parse ∘ print is the identity on trees.
    #[test]
    fn print_parse_roundtrip(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(&reparsed, &e, "printed as `{}`", printed);
    }

    /// Derived trees may contain folded negative literals; they survive
    /// a print/parse cycle modulo constant folding.
    #[test]
    fn derived_roundtrip_modulo_folding(e in arb_expr()) {
        let d = e.derive();
        let reparsed = parse(&d.to_string()).unwrap().fold_constants();
        prop_assert_eq!(&reparsed, &d);
    }
}
