//! Symbolic differentiation and constant folding.

use super::{BinOp, Expr, Func};

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn add(l: Expr, r: Expr) -> Expr {
    Expr::bin(BinOp::Add, l, r)
}

fn sub(l: Expr, r: Expr) -> Expr {
    Expr::bin(BinOp::Sub, l, r)
}

fn mul(l: Expr, r: Expr) -> Expr {
    Expr::bin(BinOp::Mul, l, r)
}

fn div(l: Expr, r: Expr) -> Expr {
    Expr::bin(BinOp::Div, l, r)
}

fn pow(l: Expr, r: Expr) -> Expr {
    Expr::bin(BinOp::Pow, l, r)
}

fn is_const(e: &Expr) -> bool {
    matches!(e, Expr::Num(_) | Expr::Const(_))
}

pub(super) fn derive(e: &Expr) -> Expr {
    match e {
        Expr::Var => num(1.0),
        Expr::Num(_) | Expr::Const(_) => num(0.0),
        Expr::Neg(u) => Expr::neg(derive(u)),
        Expr::Bin(op, u, v) => {
            let du = || derive(u);
            let dv = || derive(v);
            match op {
                BinOp::Add => add(du(), dv()),
                BinOp::Sub => sub(du(), dv()),
                BinOp::Mul => add(mul(du(), (**v).clone()), mul((**u).clone(), dv())),
                BinOp::Div => div(
                    sub(mul(du(), (**v).clone()), mul((**u).clone(), dv())),
                    pow((**v).clone(), num(2.0)),
                ),
                BinOp::Pow => {
                    if is_const(v) {
                        // n·u^(n-1)·u'
                        mul(
                            mul(
                                (**v).clone(),
                                pow((**u).clone(), sub((**v).clone(), num(1.0))),
                            ),
                            du(),
                        )
                    } else if is_const(u) {
                        // c^v·log(c)·v'
                        mul(
                            mul(e.clone(), Expr::call(Func::Log, (**u).clone())),
                            dv(),
                        )
                    } else {
                        // u^v·(v'·log(u) + v·u'/u)
                        mul(
                            e.clone(),
                            add(
                                mul(dv(), Expr::call(Func::Log, (**u).clone())),
                                div(mul((**v).clone(), du()), (**u).clone()),
                            ),
                        )
                    }
                }
            }
        }
        Expr::Call(f, u) => {
            let du = derive(u);
            let u = (**u).clone();
            let outer = match f {
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Log => return div(du, u),
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                Func::Tan => return div(du, pow(Expr::call(Func::Cos, u), num(2.0))),
                Func::Tanh => sub(num(1.0), pow(Expr::call(Func::Tanh, u), num(2.0))),
                Func::Sinh => Expr::call(Func::Cosh, u),
                Func::Cosh => Expr::call(Func::Sinh, u),
                Func::Sqrt => return div(du, mul(num(2.0), Expr::call(Func::Sqrt, u))),
                // sign(u) written as u/abs(u); undefined at u = 0
                Func::Abs => div(u.clone(), Expr::call(Func::Abs, u)),
            };
            mul(du, outer)
        }
    }
}

pub(super) fn fold(e: &Expr) -> Expr {
    match e {
        Expr::Var | Expr::Num(_) | Expr::Const(_) => e.clone(),
        Expr::Neg(u) => match fold(u) {
            Expr::Num(v) => num(-v),
            other => Expr::neg(other),
        },
        Expr::Call(f, u) => {
            let u = fold(u);
            if let Expr::Num(v) = u {
                let folded = match f {
                    Func::Exp => v.exp(),
                    Func::Log if v > 0.0 => v.ln(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Tanh => v.tanh(),
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Sqrt if v >= 0.0 => v.sqrt(),
                    Func::Abs => v.abs(),
                    _ => f64::NAN,
                };
                if folded.is_finite() {
                    return num(folded);
                }
                return Expr::call(*f, num(v));
            }
            Expr::call(*f, u)
        }
        Expr::Bin(op, l, r) => {
            let l = fold(l);
            let r = fold(r);
            if let (Expr::Num(a), Expr::Num(b)) = (&l, &r) {
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if *b != 0.0 {
                            a / b
                        } else {
                            f64::NAN
                        }
                    }
                    BinOp::Pow => a.powf(*b),
                };
                if v.is_finite() {
                    return num(v);
                }
            }
            match op {
                BinOp::Add => {
                    if l == Expr::Num(0.0) {
                        return r;
                    }
                    if r == Expr::Num(0.0) {
                        return l;
                    }
                }
                BinOp::Sub => {
                    if r == Expr::Num(0.0) {
                        return l;
                    }
                    if l == Expr::Num(0.0) {
                        return fold(&Expr::neg(r));
                    }
                }
                BinOp::Mul => {
                    if l == Expr::Num(0.0) || r == Expr::Num(0.0) {
                        return num(0.0);
                    }
                    if l == Expr::Num(1.0) {
                        return r;
                    }
                    if r == Expr::Num(1.0) {
                        return l;
                    }
                }
                BinOp::Div => {
                    if r == Expr::Num(1.0) {
                        return l;
                    }
                }
                BinOp::Pow => {
                    if r == Expr::Num(1.0) {
                        return l;
                    }
                    if r == Expr::Num(0.0) {
                        return num(1.0);
                    }
                }
            }
            Expr::bin(*op, l, r)
        }
    }
}
