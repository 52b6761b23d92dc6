use super::{BinaryOp, Expr, UnaryOp, Var};

fn c(v: f64) -> Expr {
    Expr::Const(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => c(0.0),
        (true, false) => b,
        (false, true) => a,
        _ => Expr::binary(BinaryOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.is_zero(), b.is_zero()) {
        (_, true) => a,
        (true, false) => Expr::unary(UnaryOp::Neg, b),
        _ => Expr::binary(BinaryOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return c(0.0);
    }
    Expr::binary(BinaryOp::Mul, a, b)
}

fn div(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        return c(0.0);
    }
    Expr::binary(BinaryOp::Div, a, b)
}

fn un(op: UnaryOp, a: Expr) -> Expr {
    Expr::unary(op, a)
}

pub(super) fn differentiate(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Const(_) => c(0.0),
        Expr::Var(v) => c(if *v == var { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return c(0.0);
            }
            let u = (**a).clone();
            match op {
                UnaryOp::Neg => un(UnaryOp::Neg, da),
                UnaryOp::Sin => mul(un(UnaryOp::Cos, u), da),
                UnaryOp::Cos => un(UnaryOp::Neg, mul(un(UnaryOp::Sin, u), da)),
                UnaryOp::Exp => mul(un(UnaryOp::Exp, u), da),
                UnaryOp::Log => div(da, u),
                UnaryOp::Sqrt => div(da, mul(c(2.0), un(UnaryOp::Sqrt, u))),
                UnaryOp::Abs => mul(un(UnaryOp::Sign, u), da),
                UnaryOp::Sign => c(0.0),
            }
        }
        Expr::Binary(op, a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            let (u, v) = ((**a).clone(), (**b).clone());
            match op {
                BinaryOp::Add => add(da, db),
                BinaryOp::Sub => sub(da, db),
                BinaryOp::Mul => add(mul(da, v), mul(u, db)),
                BinaryOp::Div => {
                    // (u'v - uv') / v^2
                    let num = sub(mul(da, v.clone()), mul(u, db));
                    div(num, Expr::binary(BinaryOp::Pow, v, c(2.0)))
                }
                BinaryOp::Pow => pow_derivative(u, v, da, db),
            }
        }
    }
}

fn pow_derivative(u: Expr, v: Expr, du: Expr, dv: Expr) -> Expr {
    if dv.is_zero() {
        if du.is_zero() {
            return c(0.0);
        }
        // v · u^(v-1) · u'
        let reduced = match v {
            Expr::Const(k) => c(k - 1.0),
            ref other => Expr::binary(BinaryOp::Sub, other.clone(), c(1.0)),
        };
        return mul(mul(v, Expr::binary(BinaryOp::Pow, u, reduced)), du);
    }
    let power = Expr::binary(BinaryOp::Pow, u.clone(), v.clone());
    if du.is_zero() {
        // u^v · ln(u) · v'
        return mul(mul(power, un(UnaryOp::Log, u)), dv);
    }
    // u^v · (v' ln u + v u'/u)
    let inner = add(mul(dv, un(UnaryOp::Log, u.clone())), div(mul(v, du), u));
    mul(power, inner)
}
