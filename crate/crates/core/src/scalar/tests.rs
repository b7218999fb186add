use super::*;

fn p(s: &str) -> ScalarExpr {
    parse_scalar_in(s, &["x", "y", "z", "phi", "h", "t"]).unwrap()
}

#[test]
fn parses_product_of_sin_and_symbol() {
    let e = p("sin(phi)*h");
    match e.node() {
        Node::Mul(v) => {
            assert_eq!(v.len(), 2);
            assert!(matches!(v[0].node(), Node::Sin(_)));
            assert!(matches!(v[1].node(), Node::Sym(s) if &**s == "h"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn division_is_negative_power() {
    assert_eq!(p("1/z^2").simplify(), ScalarExpr::sym("z").powi(-2));
    assert_eq!(p("1/z^2").simplify().node(), &Node::Pow(ScalarExpr::sym("z"), -2));
}

#[test]
fn unbalanced_paren_reports_column() {
    let err = parse_scalar_in("cos(phi", &["phi"]).unwrap_err();
    assert_eq!(err.column, 8);
    assert_eq!(err.kind, ParseErrorKind::Syntax);
}

#[test]
fn unknown_identifier_named() {
    let err = parse_scalar_in("x + w", &["x"]).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
    assert_eq!(err.column, 5);
    let err = parse_scalar_in("tan(x)", &["x"]).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
}

#[test]
fn decimal_literals_are_exact() {
    assert_eq!(p("0.25").as_rational(), Some(BigRational::new(1.into(), 4.into())));
    assert_eq!(p("1e-3").as_rational(), Some(BigRational::new(1.into(), 1000.into())));
}

#[test]
fn calculus_identities() {
    assert_eq!(p("sin(phi)").diff("phi"), p("cos(phi)").simplify());
    assert_eq!(p("x*y^2").diff("y"), p("2*x*y").simplify());
    assert_eq!(p("z^(-1)").diff("z"), p("-(z^(-2))").simplify());
    assert_eq!(p("-z^(-2)").simplify(), ScalarExpr::sym("z").powi(-2));
    assert!(p("3").diff("x").is_zero());
}

#[test]
fn evaluation() {
    let pt = Point::from_pairs(&[("phi", 0.0), ("z", 0.0)]);
    assert_eq!(p("cos(phi)").eval(&pt), Ok(1.0));
    assert!(matches!(p("z^(-1)").eval(&pt), Err(EvalError::DivisionByZero(_))));
    assert_eq!(p("z^(-1)").eval_extended(&pt), Ok(f64::INFINITY));
    let neg = Point::from_pairs(&[("x", -1.0)]);
    assert!(matches!(p("log(x)").eval(&neg), Err(EvalError::LogDomain(_))));
    assert!(matches!(p("y").eval(&neg), Err(EvalError::UnknownSymbol(_))));
}

#[test]
fn pythagoras_simplifies() {
    assert!(p("sin(x)^2 + cos(x)^2 - 1").simplify().is_zero());
    assert_eq!(p("3*y*sin(x)^2 + 3*y*cos(x)^2").simplify(), p("3*y").simplify());
}

#[test]
fn opposite_exponents_cancel() {
    assert_eq!(p("x*z^(-1)*z").simplify(), p("x").simplify());
    assert!(p("exp(t)*exp(-t) - 1").simplify().is_zero());
    assert!(p("log(exp(x)) - x").simplify().is_zero());
}

#[test]
fn trig_sign_normalization() {
    assert_eq!(p("sin(-x)").simplify(), p("-sin(x)").simplify());
    assert_eq!(p("cos(-x)").simplify(), p("cos(x)").simplify());
}

#[test]
fn non_monomial_denominators() {
    let e = p("x/(1+x^2)").simplify();
    assert!(e.to_string().contains("/"), "{e}");
    let back = p(&e.to_string()).simplify();
    assert_eq!(back, e);
    let pt = Point::from_pairs(&[("x", 2.0)]);
    assert!((e.eval(&pt).unwrap() - 0.4).abs() < 1e-15);
    assert_eq!(p("2/(2+2*x)").simplify(), p("1/(1+x)").simplify());
}

#[test]
fn printing_round_trips_tricky_signs() {
    for s in [
        "-x^2 + 1",
        "-(x^2)*y",
        "x - y*z",
        "-3/4*x",
        "-x/y^2",
        "1/(x+y)^3 - 2",
        "(-x)^3",
        "-sin(x)^2*cos(y)",
        "exp(-2*t)*x",
        "-1/x",
    ] {
        let e = p(s).simplify();
        let printed = e.to_string();
        let back = p(&printed).simplify();
        assert_eq!(back, e, "{s} printed as {printed}");
    }
}

#[test]
fn simplify_is_idempotent_structurally() {
    let e = p("(x+1)^3*sin(y)^2 + cos(y)^2*(x+1)^3 - x/(y+2)");
    let s1 = e.simplify();
    let s2 = ScalarExpr::from_node(s1.node().clone()).simplify();
    assert_eq!(s1, s2);
}
