//! Property and oracle tests for symbolic scalars.

use bcontact::grid::{equal_on_grid, equal_on_points};
use bcontact::scalar::{parse_scalar_in, Node, ScalarExpr};
use bcontact::{Chart, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Random expression that is defined on all of R^3.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> ScalarExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            ScalarExpr::sym(VARS[rng.gen_range(0..3)])
        } else {
            ScalarExpr::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
        };
    }
    let a = random_expr(rng, depth - 1);
    let node = match rng.gen_range(0..9) {
        0 => Node::Add(vec![a, random_expr(rng, depth - 1)]),
        1 => Node::Mul(vec![a, random_expr(rng, depth - 1)]),
        2 => Node::Neg(a),
        3 => Node::Pow(a, rng.gen_range(1..=3)),
        4 => Node::Sin(a),
        5 => Node::Cos(a),
        6 => Node::Exp(ScalarExpr::from_node(Node::Sin(a))),
        7 => {
            let den = ScalarExpr::from_node(Node::Add(vec![ScalarExpr::int(2), ScalarExpr::from_node(Node::Cos(a))]));
            Node::Pow(den, -rng.gen_range(1..=2))
        }
        _ => {
            let sq = ScalarExpr::from_node(Node::Pow(a, 2));
            Node::Log(ScalarExpr::from_node(Node::Add(vec![ScalarExpr::int(1), sq])))
        }
    };
    ScalarExpr::from_node(node)
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::from_pairs(&[
        ("x", rng.gen_range(-1.0..1.0)),
        ("y", rng.gen_range(-1.0..1.0)),
        ("z", rng.gen_range(-1.0..1.0)),
    ])
}

fn cube() -> Chart {
    Chart::smooth(&VARS, &[(-1.0, 1.0); 3]).unwrap()
}

#[test]
fn derivative_matches_central_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 100 {
        let e = random_expr(&mut rng, 3);
        let p = random_point(&mut rng);
        let v = VARS[rng.gen_range(0..3)];
        let d = e.diff(v);
        let x0 = p.get(v).unwrap();
        let h = 1e-5;
        let fp = e.eval(&p.with(v, x0 + h)).unwrap();
        let fm = e.eval(&p.with(v, x0 - h)).unwrap();
        let fd = (fp - fm) / (2.0 * h);
        let exact = d.eval(&p).unwrap();
        let scale = 1.0_f64.max(exact.abs()).max(e.eval(&p).unwrap().abs());
        assert!(
            (fd - exact).abs() <= 1e-6 * scale,
            "d/d{v} of {e}: exact {exact}, fd {fd}"
        );
        checked += 1;
    }
}

#[test]
fn mixed_partials_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = cube().sample_box(100, 42);
    for _ in 0..30 {
        let e = random_expr(&mut rng, 3);
        let a = e.diff("x").diff("y");
        let b = e.diff("y").diff("x");
        let r = equal_on_points(&a, &b, &pts, 1e-8 * 1.0_f64.max(max_abs(&a, &pts)));
        assert!(r.equal, "{e}: {}", r.max_discrepancy);
    }
}

fn max_abs(e: &ScalarExpr, pts: &[Point]) -> f64 {
    pts.iter().filter_map(|p| e.eval(p).ok()).fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn simplify_preserves_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let e = random_expr(&mut rng, 3);
        let s = e.simplify();
        let tol = 1e-10 * 1.0_f64.max(max_abs(&e, &cube().sample_box(20, 1)));
        let r = equal_on_grid(&e, &s, &cube(), 100, tol);
        assert!(r.equal, "{e} vs {s}: {}", r.max_discrepancy);
        assert_eq!(s.simplify(), s);
    }
}

#[test]
fn print_parse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let e = random_expr(&mut rng, 3);
        for tree in [e.clone(), e.simplify()] {
            let printed = tree.to_string();
            let back = parse_scalar_in(&printed, &VARS).unwrap_or_else(|err| panic!("{printed}: {err}"));
            assert_eq!(back.simplify(), tree.simplify(), "printed as {printed}");
        }
    }
}

proptest! {
    #[test]
    fn sum_and_product_commute(seed_a in 0u64..1000, seed_b in 0u64..1000) {
        let a = random_expr(&mut ChaCha8Rng::seed_from_u64(seed_a), 2);
        let b = random_expr(&mut ChaCha8Rng::seed_from_u64(seed_b), 2);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_rule(seed_a in 0u64..1000, seed_b in 0u64..1000) {
        let a = random_expr(&mut ChaCha8Rng::seed_from_u64(seed_a), 2);
        let b = random_expr(&mut ChaCha8Rng::seed_from_u64(seed_b), 2);
        let lhs = (&a * &b).diff("x");
        let rhs = &a.diff("x") * &b + &a * &b.diff("x");
        prop_assert!((lhs - rhs).is_zero());
    }
}
