use lorentz_volume::expr::{BinaryOp, Expr, UnaryOp, Var};
use proptest::prelude::*;

/// Smooth trees over `t, x1, x2` with non-negative constants, so that every
/// tree is exactly what the parser would build from its printed form.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..40).prop_map(|k| Expr::constant(k as f64 / 8.0)),
        Just(Expr::var(Var::Time)),
        Just(Expr::var(Var::Space(0))),
        Just(Expr::var(Var::Space(1))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Mul, a, b)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Neg, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Cos, a)),
            // exp of a bounded argument keeps values moderate
            inner
                .clone()
                .prop_map(|a| Expr::unary(UnaryOp::Exp, Expr::unary(UnaryOp::Sin, a))),
            // division by something in [1, 3]
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                let den = Expr::binary(BinaryOp::Add, Expr::constant(2.0), Expr::unary(UnaryOp::Cos, b));
                Expr::binary(BinaryOp::Div, a, den)
            }),
            (inner, 0u32..4).prop_map(|(a, k)| Expr::binary(BinaryOp::Pow, a, Expr::constant(k as f64))),
        ]
    })
}

fn point() -> impl Strategy<Value = (f64, [f64; 2])> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(t, a, b)| (t, [a, b]))
}

fn eval_shifted(e: &Expr, var: Var, t: f64, x: [f64; 2], h: f64) -> f64 {
    match var {
        Var::Time => e.eval(t + h, &x).unwrap(),
        Var::Space(k) => {
            let mut y = x;
            y[k] += h;
            e.eval(t, &y).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn printed_trees_parse_back_identically(e in smooth_expr()) {
        let back = Expr::parse(&e.to_string(), 2).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn printed_derivatives_evaluate_identically(e in smooth_expr(), (t, x) in point()) {
        let d = e.differentiate(Var::Space(1));
        let back = Expr::parse(&d.to_string(), 2).unwrap();
        prop_assert_eq!(back.eval(t, &x).unwrap().to_bits(), d.eval(t, &x).unwrap().to_bits());
    }

    #[test]
    fn derivative_matches_richardson_difference(
        e in smooth_expr(),
        (t, x) in point(),
        which in 0usize..3,
    ) {
        let var = [Var::Time, Var::Space(0), Var::Space(1)][which];
        let exact = e.differentiate(var).eval(t, &x).unwrap();
        let f = |h: f64| eval_shifted(&e, var, t, x, h);
        let h = 1e-3;
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
        let approx = (4.0 * d2 - d1) / 3.0;
        let scale = 1.0 + exact.abs() + f(0.0).abs();
        prop_assert!((exact - approx).abs() <= 1e-6 * scale, "{} vs {} for {}", exact, approx, e);
    }

    #[test]
    fn dependence_is_consistent_with_derivative(e in smooth_expr(), which in 0usize..3) {
        let var = [Var::Time, Var::Space(0), Var::Space(1)][which];
        if !e.depends_on(var) {
            prop_assert!(e.differentiate(var).is_zero());
        }
    }
}
