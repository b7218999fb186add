use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::exterior::{parse_form, parse_vector};

fn chart(coords: &[&str], z: Option<(&str, u32)>) -> Arc<Chart> {
    let bounds = vec![(-1.0, 1.0); coords.len()];
    Arc::new(Chart::new(coords, &bounds, z).unwrap())
}

fn s2xs1() -> Arc<Chart> {
    Arc::new(
        Chart::new(&["theta", "h", "phi"], &[(0.0, 2.0 * PI), (-0.5, 0.5), (0.0, 2.0 * PI)], Some(("h", 1)))
            .unwrap()
            .with_periodic(&["theta", "phi"]),
    )
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

#[test]
fn contact_coefficients() {
    let c = chart(&["t", "x", "z"], Some(("z", 1)));
    assert!(contact_coeff(&form("D(t) + x*B", &c)).unwrap().is_one());
    assert!(contact_coeff(&form("D(t)", &c)).unwrap().is_zero());
    let torus = chart(&["z", "y", "phi"], Some(("z", 2)));
    assert!(contact_coeff(&form("sin(phi)*B + cos(phi)*D(y)", &torus)).unwrap().is_one());
}

#[test]
fn contact_coeff_rejects_even_dimension() {
    let c = chart(&["x", "z"], Some(("z", 1)));
    assert!(matches!(contact_coeff(&form("B", &c)), Err(ContactError::Shape(_))));
}

#[test]
fn contact_verdicts() {
    let s = s2xs1();
    let r = is_contact(&form("sin(phi)*D(theta) + cos(phi)*B", &s), &cfg()).unwrap();
    assert_eq!(r.verdict, Verdict::Contact);
    assert!(r.min_off > 0.5 && r.min_on.unwrap() > 0.5);

    let c = chart(&["t", "x", "z"], Some(("z", 1)));
    assert!(is_contact(&form("D(t) + x*B", &c), &cfg()).unwrap().is_contact());
    assert_eq!(is_contact(&form("z*B", &c), &cfg()).unwrap().verdict, Verdict::NotContact);
    // smooth contact form dt + x dz read in the b-frame: c = ±z
    let r = is_contact(&form("D(t) + x*z*B", &c), &cfg()).unwrap();
    assert!(r.min_on.unwrap() < 1e-12 && r.min_off > 0.0);
    assert_eq!(r.verdict, Verdict::ContactAwayFromLocus);
}

#[test]
fn reeb_fields_of_the_local_models() {
    let c = chart(&["t", "x1", "x2", "y2", "z"], Some(("z", 1)));
    let r = reeb(&form("D(t) + x1*B + x2*D(y2)", &c), &cfg()).unwrap();
    assert_eq!(r, vector("P(t)", &c));

    let c = chart(&["x1", "y1", "z"], Some(("z", 1)));
    let r = reeb(&form("B + x1*D(y1)", &c), &cfg()).unwrap();
    assert_eq!(r, vector("Z", &c));

    let s = s2xs1();
    let r = reeb(&form("sin(phi)*D(theta) + cos(phi)*B", &s), &cfg()).unwrap();
    assert_eq!(r, vector("cos(phi)*Z + sin(phi)*P(theta)", &s));
}

#[test]
fn reeb_satisfies_its_equations() {
    let c = chart(&["z", "y", "phi"], Some(("z", 2)));
    let a = form("sin(phi)*B + cos(phi)*D(y)", &c);
    let r = reeb(&a, &cfg()).unwrap();
    let s = reeb_residual(&a, &r, &cfg().all_points(&c)).unwrap();
    assert!(s.max < 1e-8);
    let p = c.point_from(&[("z", 0.3), ("y", 0.1), ("phi", 0.7)]);
    let num = reeb_at(&a, &p).unwrap();
    for (k, v) in num.iter().enumerate() {
        assert!((r.component(k).eval(&p).unwrap() - v).abs() < 1e-10);
    }
}

#[test]
fn reeb_rejects_non_contact_forms() {
    let c = chart(&["t", "x", "z"], Some(("z", 1)));
    assert!(reeb(&form("D(t)", &c), &cfg()).is_err());
}

#[test]
fn hamiltonian_fields() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let a = form("D(t) + x1*B", &c);
    let one = hamiltonian_field(&a, &ScalarExpr::one(), &cfg()).unwrap();
    assert_eq!(one, reeb(&a, &cfg()).unwrap());
    assert!(hamiltonian_field(&a, &ScalarExpr::zero(), &cfg()).unwrap().is_zero());
    let h = ScalarExpr::sym("x1");
    let x = hamiltonian_field(&a, &h, &cfg()).unwrap();
    assert!(hamiltonian_residual(&a, &h, &x, &cfg()).unwrap() < 1e-8);
}

#[test]
fn hamiltonian_on_the_compact_example() {
    let s = s2xs1();
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &s);
    let h = crate::parse_scalar("sin(theta) + h*cos(phi)", &s).unwrap();
    let x = hamiltonian_field(&a, &h, &cfg()).unwrap();
    assert!(hamiltonian_residual(&a, &h, &x, &cfg()).unwrap() < 1e-8);
}

#[test]
fn point_classes_on_s2xs1() {
    let s = s2xs1();
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &s);
    let p = s.point_from(&[("theta", 1.0), ("h", 0.0), ("phi", PI / 2.0)]);
    assert_eq!(classify_point(&a, &p, &cfg()).unwrap().case, DarbouxCase::RegularReebSingularXi);
    let p = s.point_from(&[("theta", 1.0), ("h", 0.0), ("phi", 0.0)]);
    assert_eq!(classify_point(&a, &p, &cfg()).unwrap().case, DarbouxCase::SingularReeb);
    let p = s.point_from(&[("theta", 1.0), ("h", 0.0), ("phi", 1.0)]);
    assert_eq!(classify_point(&a, &p, &cfg()).unwrap().case, DarbouxCase::RegularReebRegularXi);
    let off = s.point_from(&[("theta", 1.0), ("h", 0.2), ("phi", 1.0)]);
    assert!(matches!(classify_point(&a, &off, &cfg()), Err(ContactError::NotOnZ(_))));
}

#[test]
fn extended_phase_space_class_on_x_zero() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let a = form("D(t) + x1*B", &c);
    let p = c.point_from(&[("t", 0.4), ("x1", 0.0), ("z", 0.0)]);
    assert_eq!(classify_point(&a, &p, &cfg()).unwrap().case, DarbouxCase::RegularReebSingularXi);
}

#[test]
fn regular_class_is_locally_constant() {
    let s = s2xs1();
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &s);
    let r = reeb(&a, &cfg()).unwrap();
    let p = s.point_from(&[("theta", 2.0), ("h", 0.0), ("phi", 1.0)]);
    for k in 0..20 {
        let dth = 0.01 * (k as f64 * 0.7).cos();
        let dph = 0.01 * (k as f64 * 0.7).sin();
        let q = s.point_from(&[("theta", 2.0 + dth), ("h", 0.0), ("phi", 1.0 + dph)]);
        assert_eq!(classify_with(&a, &r, &q, 1e-9).unwrap().case, DarbouxCase::RegularReebRegularXi);
    }
    assert_eq!(classify_with(&a, &r, &p, 1e-9).unwrap().case, DarbouxCase::RegularReebRegularXi);
}

#[test]
fn theta_on_s2xs1() {
    let s = s2xs1();
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &s);
    let t = theta_form(&a, &cfg()).unwrap();
    let slice = t.theta.chart().clone();
    assert_eq!(t.theta, form("W(D(phi), D(theta))", &slice));
    assert!(t.nondegenerate(0.5));
    assert_eq!(t.sign, 1);
    assert!(t.residual < 1e-8);
    assert!(t.clusters.len() >= 2, "{:?}", t.clusters);
}

#[test]
fn theta_on_extended_phase_space() {
    let c = chart(&["t", "x1", "z"], Some(("z", 1)));
    let t = theta_form(&form("D(t) + x1*B", &c), &cfg()).unwrap();
    let slice = t.theta.chart().clone();
    assert_eq!(t.theta, form("W(D(t), D(x1))", &slice));
    // ι_{∂t}(dt∧dx1) = dx1 = du
    assert_eq!(t.sign, 1);
    assert!(t.residual < 1e-12);
    assert!(t.clusters.is_empty());
}

#[test]
fn convexity_examples() {
    let s = s2xs1();
    let c = convexity_classify(&form("sin(phi)*D(theta) + cos(phi)*B", &s), &cfg()).unwrap();
    assert!(c.is_convex());
    let xy = chart(&["x", "y", "z"], Some(("z", 1)));
    let c = convexity_classify(&form("(1 + z)*B + x*D(y)", &xy), &cfg()).unwrap();
    assert!(c.is_almost_convex() && !c.is_convex());
    let c = convexity_classify(&form("B + z*x*D(y)", &xy), &cfg()).unwrap();
    assert!(!c.is_almost_convex());
    let ConvexityClass::NotAlmostConvex { offenders } = c else { unreachable!() };
    assert_eq!(offenders[0].name, "D(y)");
}

#[test]
fn verticalize_examples() {
    let c = Arc::new(Chart::smooth(&["t", "x", "y"], &[(-1.0, 1.0); 3]).unwrap());
    let inv = form("D(t) + x*D(y)", &c);
    assert_eq!(verticalize(&inv, "t", &cfg()).unwrap(), inv);
    assert_eq!(verticalize(&form("exp(t)*D(t) + exp(t)*x*D(y)", &c), "t", &cfg()).unwrap(), inv);
    assert!(matches!(
        verticalize(&form("D(t) + t*x*D(y)", &c), "t", &cfg()),
        Err(ContactError::NotContactVector(..))
    ));
}

#[test]
fn zero_clusters_respect_periodicity() {
    let c = Arc::new(Chart::smooth(&["a", "b"], &[(0.0, 2.0 * PI); 2]).unwrap().with_periodic(&["a", "b"]));
    // zeros at a ∈ {0, π} for every b: two circles
    let x = vector("sin(a)*P(a)", &c);
    assert_eq!(reeb_zero_clusters(&x, 40).len(), 2);
    let c2 = Arc::new(Chart::smooth(&["a", "b"], &[(0.0, 2.0 * PI); 2]).unwrap());
    // without wrap the a = 0 and a = 2π lines are separate
    let x = vector("sin(a)*P(a)", &c2);
    assert_eq!(reeb_zero_clusters(&x, 40).len(), 3);
}
