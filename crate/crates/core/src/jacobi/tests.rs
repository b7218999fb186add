use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::contact::{hamiltonian_field, reeb};
use crate::exterior::{parse_form, parse_vector, ChartMap};
use crate::scalar::parse_scalar;

fn chart(coords: &[&str], z: Option<(&str, u32)>) -> Arc<Chart> {
    let bounds = vec![(-1.0, 1.0); coords.len()];
    Arc::new(Chart::new(coords, &bounds, z).unwrap())
}

fn form(s: &str, c: &Arc<Chart>) -> BForm {
    parse_form(s, c).unwrap()
}

fn vector(s: &str, c: &Arc<Chart>) -> BMultiVector {
    parse_vector(s, c).unwrap()
}

fn cfg() -> GridConfig {
    GridConfig::default()
}

fn s2xs1() -> (Arc<Chart>, BForm) {
    let c = Arc::new(
        Chart::new(&["theta", "h", "phi"], &[(0.0, 2.0 * PI), (-0.5, 0.5), (0.0, 2.0 * PI)], Some(("h", 1)))
            .unwrap()
            .with_periodic(&["theta", "phi"]),
    );
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &c);
    (c, a)
}

#[test]
fn extended_phase_space_pair_is_jacobi() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let j = jacobi_from_contact(&form("D(t) + x1*B", &c), &cfg()).unwrap();
    let v = j.verification.unwrap();
    assert!(v.lambda_lambda < 1e-8 && v.lambda_reeb < 1e-8, "{v:?}");
}

#[test]
fn compact_example_pair_is_jacobi() {
    let (_, a) = s2xs1();
    let j = jacobi_from_contact(&a, &cfg()).unwrap();
    assert!(j.verification.unwrap().holds());
}

#[test]
fn sharp_of_dh_reproduces_hamiltonian_fields() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let a = form("D(t) + x1*B", &c);
    let j = jacobi_from_contact(&a, &cfg()).unwrap();
    let h = ScalarExpr::sym("x1");
    let lhs = j.sharp(&BForm::d_scalar(&c, &h)).unwrap().add(&j.reeb.scale(&h)).unwrap();
    let rhs = hamiltonian_field(&a, &h, &cfg()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().sweep(&cfg().all_points(&c)).max < 1e-8);

    let (s, a) = s2xs1();
    let j = jacobi_from_contact(&a, &cfg()).unwrap();
    let h = parse_scalar("h*sin(theta) + cos(phi)", &s).unwrap();
    let lhs = j.sharp(&BForm::d_scalar(&s, &h)).unwrap().add(&j.reeb.scale(&h)).unwrap();
    let rhs = hamiltonian_field(&a, &h, &cfg()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().sweep(&cfg().all_points(&s)).max < 1e-8);
}

#[test]
fn singular_reeb_model_pair() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let j = jacobi_from_contact(&form("B + x1*D(y1)", &c), &cfg()).unwrap();
    assert_eq!(j.reeb, vector("Z", &c));
    assert!(j.verification.unwrap().lambda_reeb < 1e-8);
}

fn restricted_to_z(l: &BMultiVector) -> BMultiVector {
    l.to_smooth_frame().substitute(&|n| (n == "z").then(ScalarExpr::zero))
}

#[test]
fn liouville_construction_on_the_singular_xi_model() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let a = form("D(x1) + y1*B", &c);
    let lj = jacobi_via_liouville(&a, &vector("y1*P(y1)", &c), &cfg()).unwrap();
    assert!(lj.discriminant.is_zero());
    assert!(lj.pair.verification.unwrap().holds());
    assert!(lj.lemma_consistent);
    // Π = z ∂y1∧∂z, i.e. ∂y1∧ζ
    assert_eq!(lj.pi, vector("W(P(y1), Z)", &c));
    let on_z = restricted_to_z(&lj.pair.lambda);
    assert_eq!(on_z, vector("y1*W(P(x1), P(y1))", on_z.chart()));
}

#[test]
fn liouville_construction_in_dimension_five() {
    let c = chart(&["x1", "y1", "x2", "y2", "z"], Some(("z", 1)));
    let x = vector("y1*P(y1) + y2*P(y2)", &c);
    // with −y2 dx2 the Liouville field satisfies ι_X dα = α − dx1
    let a = form("D(x1) + y1*B - y2*D(x2)", &c);
    let lj = jacobi_via_liouville(&a, &x, &cfg()).unwrap();
    assert_eq!(lj.pi, vector("W(P(y1), Z) + W(P(x2), P(y2))", &c));
    assert!(lj.pair.verification.unwrap().holds());
    let on_z = restricted_to_z(&lj.pair.lambda);
    let expected = vector("W(P(x2), P(y2)) + y1*W(P(x1), P(y1)) + y2*W(P(x1), P(y2))", on_z.chart());
    assert_eq!(on_z, expected);

    // with x2 dy2 the same field gives the Λ of the form itself
    let a = form("D(x1) + y1*B + x2*D(y2)", &c);
    let lj = jacobi_via_liouville(&a, &x, &cfg()).unwrap();
    assert!(lj.pair.verification.unwrap().holds());
    let direct = jacobi_from_contact(&a, &cfg()).unwrap();
    assert!(direct.lambda.sub(&lj.pair.lambda).unwrap().sweep(&cfg().all_points(&c)).max < 1e-7);
    let on_z = restricted_to_z(&lj.pair.lambda);
    let expected = vector("W(P(x2), P(y2)) + y1*W(P(x1), P(y1)) + x2*W(P(x1), P(x2))", on_z.chart());
    assert_eq!(on_z, expected);
}

#[test]
fn lichnerowicz_bracket_of_the_extended_phase_space_pair() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let j = jacobi_from_contact(&form("D(t) + x1*B", &c), &cfg()).unwrap();
    let rl = j.reeb.wedge(&j.lambda).unwrap();
    let ll = j.lambda.schouten_lichnerowicz(&j.lambda).unwrap();
    assert_eq!(ll, rl.scale(&ScalarExpr::int(2)));
    // the graded-Lie convention differs by sign on two bivectors
    assert_eq!(j.lambda.schouten(&j.lambda).unwrap(), rl.scale(&ScalarExpr::int(-2)));
}

#[test]
fn appendix_lemma_bracket_identity() {
    // [R∧X, R∧X] = 2 R∧[R,X]∧X; only its vanishing matters
    let c = chart(&["x", "y", "z"], Some(("z", 1)));
    let r = vector("P(x) + y*Z", &c);
    let x = vector("x*y*P(y) + sin(x)*Z", &c);
    let rx = r.wedge(&x).unwrap();
    let lhs = rx.schouten_lichnerowicz(&rx).unwrap();
    assert_eq!(vector("P(x)", &c).lie_bracket(&vector("x*P(y)", &c)).unwrap(), vector("P(y)", &c));
    let rhs = r.wedge(&r.lie_bracket(&x).unwrap()).unwrap().wedge(&x).unwrap().scale(&ScalarExpr::int(2));
    let pts = cfg().all_points(&c);
    assert!(rhs.sweep(&pts).max > 1.0);
    assert!(lhs.sub(&rhs).unwrap().sweep(&pts).max < 1e-10);
}

#[test]
fn nonzero_discriminant_breaks_the_identities() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let a = form("D(x1) + y1*B", &c);
    let pi = dual_bivector(&a, &vector("y1*P(y1)", &c), &cfg()).unwrap();
    let x1 = vector("y1*P(y1) + x1*Z", &c);
    let lj = assemble_via_dual(&a, &pi, &x1, &cfg()).unwrap();
    assert!(lj.discriminant_max > 1e-3);
    let p = lj.discriminant_argmax.clone().unwrap();
    let v = lj.pair.verify_on(&[p], 1e-7).unwrap();
    assert!(!v.holds(), "{v:?}");
    assert!(lj.lemma_consistent);
}

#[test]
fn non_liouville_fields_are_rejected() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let a = form("D(x1) + y1*B", &c);
    let err = jacobi_via_liouville(&a, &vector("P(x1)", &c), &cfg()).unwrap_err();
    assert!(matches!(err, JacobiError::NotLiouville(_)));
}

#[test]
fn transversality_separates_orders() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let j = jacobi_from_contact(&form("B + x1*D(y1)", &c), &cfg()).unwrap();
    assert_eq!(bjacobi_transversality(&j, &cfg()).unwrap().verdict, TransversalityVerdict::Transversal);
    let c2 = chart(&["x1", "y1", "z"], Some(("z", 2)));
    let j = jacobi_from_contact(&form("B + x1*D(y1)", &c2), &cfg()).unwrap();
    let r = bjacobi_transversality(&j, &cfg()).unwrap();
    assert_eq!(r.verdict, TransversalityVerdict::NotTransversal);
    assert!(r.min_gradient_on_z < 1e-6);
    let s = Arc::new(Chart::smooth(&["t", "x", "y"], &[(-1.0, 1.0); 3]).unwrap());
    let j = jacobi_from_contact(&form("D(t) + x*D(y)", &s), &cfg()).unwrap();
    assert_eq!(bjacobi_transversality(&j, &cfg()).unwrap().verdict, TransversalityVerdict::NoCriticalSet);
}

#[test]
fn poissonization_of_the_compact_example() {
    let (_, a) = s2xs1();
    let j = jacobi_from_contact(&a, &cfg()).unwrap();
    let p = poissonize(&j, &cfg()).unwrap();
    assert!(p.poisson_residual < 1e-8);
    assert!(p.homogeneity_residual < 1e-8);
    // Π² = 2 e^{−2τ} ∂τ∧Λ∧R, not −e^{−2τ} ∂τ∧Λ∧R
    assert!(p.top_power_binomial_residual < 1e-8);
    assert!(p.top_power_residual > 0.1);
}

#[test]
fn poissonization_of_the_zero_pair() {
    let c = chart(&["x", "y", "z"], Some(("z", 1)));
    let j = JacobiPair::new(BMultiVector::zero(&c, 2), BMultiVector::zero(&c, 1)).unwrap();
    assert!(poissonize(&j, &cfg()).unwrap().pi.is_zero());
}

#[test]
fn symplectization_factor() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let r = symplectize(&form("D(t) + x1*B", &c), &cfg()).unwrap();
    assert_eq!(r.t, "t1");
    assert!(r.closed);
    assert!(r.binomial_residual < 1e-8 && r.factorial_residual < 1e-8);
    assert!(r.liouville_residual < 1e-8 && r.recovery_residual < 1e-12);
    let c = chart(&["t", "x1", "x2", "y2", "z"], Some(("z", 1)));
    let r = symplectize(&form("D(t) + x1*B + x2*D(y2)", &c), &cfg()).unwrap();
    assert!(r.binomial_residual < 1e-8);
    assert!(r.factorial_residual > 0.1);
    let s = Arc::new(Chart::smooth(&["x", "y", "w"], &[(-1.0, 1.0); 3]).unwrap());
    let r = symplectize(&form("D(w) + x*D(y)", &s), &cfg()).unwrap();
    assert!(!r.omega.chart().is_singular());
}

fn r4() -> (Arc<Chart>, BForm, BMultiVector) {
    let w = chart(&["t", "x", "y", "z"], Some(("z", 1)));
    let omega = form("W(B, D(t)) + W(D(x), D(y))", &w);
    let x = vector("t*P(t) + x*P(x)", &w);
    (w, omega, x)
}

#[test]
fn hypersurfaces_of_r4() {
    let (w, omega, x) = r4();
    let h1 = Arc::new(Chart::new(&["s", "y", "z"], &[(0.2, 1.0), (-1.0, 1.0), (-1.0, 1.0)], Some(("z", 1))).unwrap());
    let e = |s: &str, c: &Arc<Chart>| parse_scalar(s, c).unwrap();
    let m1 = ChartMap::new(&h1, &w, vec![e("-s", &h1), e("1", &h1), e("y", &h1), e("z", &h1)]).unwrap();
    let r = liouville_contract(&omega, &x, &m1, &cfg()).unwrap();
    assert_eq!(r.alpha, form("D(y) + s*B", &h1));
    assert!(r.contact.is_contact());
    assert!(reeb_orthogonality_check(&omega, &x, &m1, &cfg()).unwrap().residual < 1e-8);

    let h2 = Arc::new(Chart::new(&["x", "y", "z"], &[(-1.0, 1.0); 3], Some(("z", 1))).unwrap());
    let m2 = ChartMap::new(&h2, &w, vec![e("-1", &h2), e("x", &h2), e("y", &h2), e("z", &h2)]).unwrap();
    let r = liouville_contract(&omega, &x, &m2, &cfg()).unwrap();
    assert_eq!(r.alpha, form("B + x*D(y)", &h2));
    assert!(reeb_orthogonality_check(&omega, &x, &m2, &cfg()).unwrap().holds);

    let bad = vector("x*P(y)", &w);
    assert!(matches!(reeb_orthogonality_check(&omega, &bad, &m2, &cfg()), Err(JacobiError::NotLiouville(_))));
}

#[test]
fn tangent_liouville_field_is_rejected() {
    let (w, omega, x) = r4();
    // X = t∂t + x∂x is tangent to {y = 0}
    let h = Arc::new(Chart::new(&["t", "x", "z"], &[(-1.0, 1.0); 3], Some(("z", 1))).unwrap());
    let e = |s: &str| parse_scalar(s, &h).unwrap();
    let m = ChartMap::new(&h, &w, vec![e("t"), e("x"), e("0"), e("z")]).unwrap();
    assert!(matches!(liouville_contract(&omega, &x, &m, &cfg()), Err(JacobiError::Tangent(_))));
}

#[test]
fn three_sphere_contraction() {
    let w = chart(&["x1", "y1", "x2", "y2"], Some(("x1", 1)));
    let omega = form("W(B, D(y1)) + W(D(x2), D(y2))", &w);
    let x = vector("1/2*Z + y1*P(y1) + 1/2*x2*P(x2) + 1/2*y2*P(y2)", &w);
    let h = Arc::new(Chart::new(&["u1", "u2", "u3"], &[(-0.5, 0.5); 3], Some(("u1", 1))).unwrap());
    let e = |s: &str| parse_scalar(s, &h).unwrap();
    let s = "(1 + u1^2 + u2^2 + u3^2)";
    let comps = vec![
        e(&format!("2*u1/{s}")),
        e(&format!("2*u2/{s}")),
        e(&format!("2*u3/{s}")),
        e(&format!("(u1^2 + u2^2 + u3^2 - 1)/{s}")),
    ];
    let phi = ChartMap::new(&h, &w, comps).unwrap().with_defining(e(&format!("2/{s}")), Some(e(&format!("{s}/2"))), 1);
    let r = liouville_contract(&omega, &x, &phi, &cfg()).unwrap();
    assert!(r.contact.is_contact(), "{:?}", r.contact.min_on);
    assert!(reeb_orthogonality_check(&omega, &x, &phi, &cfg()).unwrap().residual < 1e-8);
}

#[test]
fn leaves_of_the_local_models() {
    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let on = |y1: f64| c.point_from(&[("x1", 0.3), ("y1", y1), ("z", 0.0)]);
    let j = jacobi_from_contact(&form("D(x1) + (1 + y1)*B", &c), &cfg()).unwrap();
    assert_eq!(leaf_classify(&j, &on(0.5), 1e-7).unwrap().kind, LeafKind::LcsLeaf);
    let j = jacobi_from_contact(&form("D(x1) + y1*B", &c), &cfg()).unwrap();
    assert_eq!(leaf_classify(&j, &on(0.0), 1e-7).unwrap().kind, LeafKind::ContactLeaf);
    assert_eq!(leaf_classify(&j, &on(0.4), 1e-7).unwrap().kind, LeafKind::LcsLeaf);
    let j = jacobi_from_contact(&form("B + x1*D(y1)", &c), &cfg()).unwrap();
    for y in [-0.7, 0.0, 0.6] {
        assert_eq!(leaf_classify(&j, &on(y), 1e-7).unwrap().kind, LeafKind::LcsLeaf);
    }
    let _ = reeb(&form("B + x1*D(y1)", &c), &cfg()).unwrap();
}
