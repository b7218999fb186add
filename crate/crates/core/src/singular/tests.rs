use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::exterior::parse_form;

fn torus(m: u32) -> Arc<Chart> {
    Arc::new(
        Chart::new(&["z", "y", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], Some(("z", m)))
            .unwrap()
            .with_periodic(&["y", "phi"]),
    )
}

fn torus_form(m: u32) -> BForm {
    parse_form("sin(phi)*B + cos(phi)*D(y)", &torus(m)).unwrap()
}

/// `cos φ dt + sin φ dθ`, vertically invariant in `t`.
fn convex_surface_form() -> BForm {
    let chart = Arc::new(
        Chart::smooth(&["t", "theta", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)])
            .unwrap()
            .with_periodic(&["theta", "phi"]),
    );
    parse_form("cos(phi)*D(t) + sin(phi)*D(theta)", &chart).unwrap()
}

fn cfg() -> GridConfig {
    GridConfig::default()
}

fn profile(kind: ProfileKind, k: u32, eps: f64) -> Arc<ProfileFn> {
    Arc::new(build_profile(kind, k, eps).unwrap())
}

#[test]
fn profile_examples() {
    let f = profile(ProfileKind::DesingEven, 1, 1.0);
    for x in [-1.5, -2.0, -4.0] {
        assert!((f.value(x).unwrap() - (-1.0 / x - 2.0)).abs() < 1e-12);
    }
    let s = profile(ProfileKind::SingEven, 1, 0.1);
    assert!((s.value(0.05).unwrap() + 20.0).abs() < 1e-12);
    // inner piece x² − 2, the sign that makes the outer log|x| agree
    let g = profile(ProfileKind::DesingOdd, 0, 1.0);
    assert!((g.value(0.5).unwrap() + 1.75).abs() < 1e-12);
}

#[test]
fn profile_invariants_across_parameters() {
    for kind in [
        ProfileKind::DesingEven,
        ProfileKind::DesingOdd,
        ProfileKind::SingEven,
        ProfileKind::SingOdd,
        ProfileKind::SingOnesided,
    ] {
        for k in 0..=2 {
            for eps in [0.05, 0.1, 0.2] {
                match build_profile(kind, k, eps) {
                    Ok(p) => verify_profile(&p).unwrap(),
                    Err(e) => assert!(k < kind.min_k(), "{kind} k={k} ε={eps}: {e}"),
                }
            }
        }
    }
}

#[test]
fn desingularized_torus_is_contact_and_satisfies_the_identity() {
    let alpha = torus_form(2);
    for eps in [0.2, 0.1, 0.05] {
        let rep = desingularize(&alpha, &profile(ProfileKind::DesingEven, 1, eps), &cfg()).unwrap();
        assert!(rep.contact.as_ref().unwrap().is_contact(), "ε = {eps}");
        assert!(rep.coincidence_points > 0 && rep.coincidence_residual <= 1e-10);
        assert!(rep.identity_residual <= 1e-8, "{}", rep.identity_residual);
    }
}

#[test]
fn odd_desingularization_folds_along_z() {
    let rep = desingularize(&torus_form(1), &profile(ProfileKind::DesingOdd, 0, 0.1), &cfg()).unwrap();
    let fold = rep.fold.unwrap();
    assert_eq!(fold.verdict, FoldVerdict::Folded);
    assert_eq!(fold.components.len(), 1);
    let (name, lo, hi) = &fold.components[0].extent[0];
    assert_eq!(name, "z");
    assert!(lo.abs() < 1e-9 && hi.abs() < 1e-9);
}

#[test]
fn desingularization_rejects_non_almost_convex_and_wrong_parity() {
    let c = Arc::new(Chart::new(&["x", "y", "z"], &[(-1.0, 1.0); 3], Some(("z", 1))).unwrap());
    let alpha = parse_form("B + z*x*D(y)", &c).unwrap();
    let err = desingularize(&alpha, &profile(ProfileKind::DesingOdd, 0, 0.1), &cfg()).unwrap_err();
    assert!(matches!(err, SingularError::NotAlmostConvex(_)));
    let err = desingularize(&torus_form(2), &profile(ProfileKind::DesingOdd, 0, 0.1), &cfg()).unwrap_err();
    assert!(matches!(err, SingularError::Parity { .. }));
}

#[test]
fn fold_check_on_smooth_and_degenerate_input() {
    let c = Arc::new(Chart::smooth(&["x", "y", "z"], &[(-1.0, 1.0); 3]).unwrap());
    let rep = folded_check(&parse_form("D(z) + x*D(y)", &c).unwrap(), &cfg()).unwrap();
    assert_eq!(rep.verdict, FoldVerdict::NoFold);
    let line = Arc::new(Chart::smooth(&["z"], &[(-1.0, 1.0)]).unwrap());
    let err = folded_check(&parse_form("z*D(z)", &line).unwrap(), &cfg()).unwrap_err();
    assert!(matches!(err, SingularError::Dimension(_)));
}

#[test]
fn singularize_even_gives_one_convex_component() {
    let p = profile(ProfileKind::SingEven, 1, 0.1);
    let rep = singularize(&convex_surface_form(), "t", &p, &cfg()).unwrap();
    assert_eq!(rep.order, 2);
    assert_eq!(rep.components.len(), 1);
    let c = &rep.components[0];
    assert_eq!(c.chart.z_name(), Some("t"));
    assert!(c.contact.is_contact());
    assert!(c.convexity.is_convex());
    assert!(rep.coincidence_residual <= 1e-10);
    assert_eq!(rep.located_critical_points.len(), 1);
    assert!(rep.located_critical_points[0].abs() < 1e-6);
}

#[test]
fn singularize_odd_gives_two_components() {
    let eps = 0.2;
    let p = profile(ProfileKind::SingOdd, 0, eps);
    let rep = singularize(&convex_surface_form(), "t", &p, &cfg()).unwrap();
    assert_eq!(rep.order, 1);
    let centers: Vec<f64> = rep.components.iter().map(|c| c.center).collect();
    assert_eq!(centers.len(), 2);
    for c in &rep.components {
        assert!((c.center.abs() - 3.0 * eps / 8.0).abs() < 1e-12);
        assert!(c.contact.is_contact() && c.convexity.is_convex());
    }
    assert!(rep.coincidence_residual <= 1e-10);
    let located = &rep.located_critical_points;
    assert_eq!(located.len(), 2);
    assert!((located[0] + 3.0 * eps / 8.0).abs() < 1e-6 && (located[1] - 3.0 * eps / 8.0).abs() < 1e-6);
}

#[test]
fn one_sided_singularization_agrees_on_one_side_only() {
    let p = profile(ProfileKind::SingOnesided, 1, 0.1);
    let rep = singularize(&convex_surface_form(), "t", &p, &cfg()).unwrap();
    assert_eq!(rep.order, 3);
    assert!(rep.components[0].contact.is_contact());
    assert!(rep.coincidence_residual <= 1e-10);
    // ds_ε = −dt for t < −2ε
    assert!(rep.mirror_residual.unwrap() <= 1e-10);
}

#[test]
fn singularize_rejects_t_dependence() {
    let c = Arc::new(Chart::smooth(&["t", "x", "y"], &[(-1.0, 1.0); 3]).unwrap());
    let alpha = parse_form("(1 + t*t)*D(t) + x*D(y)", &c).unwrap();
    let err = singularize(&alpha, "t", &profile(ProfileKind::SingEven, 1, 0.1), &cfg()).unwrap_err();
    assert!(matches!(err, SingularError::NotVerticallyInvariant(..)));
}

#[test]
fn orientation_obstruction() {
    assert_eq!(orientation_obstruction_check(1, 1).verdict, ObstructionVerdict::Obstructed);
    assert_eq!(orientation_obstruction_check(3, 1).verdict, ObstructionVerdict::Obstructed);
    assert_eq!(orientation_obstruction_check(2, 1).verdict, ObstructionVerdict::Admissible);
    let two = orientation_obstruction_check(1, 2);
    assert_eq!(two.verdict, ObstructionVerdict::Admissible);
    assert_eq!(two.region_signs, vec![1, -1, 1]);
}

#[test]
fn desingularizing_a_singularization_is_contact_and_agrees_far_out() {
    for k in [1, 2] {
        let eps = 0.1;
        let alpha = convex_surface_form();
        let sing = singularize(&alpha, "t", &profile(ProfileKind::SingEven, k, eps), &cfg()).unwrap();
        let back = desingularize(&sing.components[0].form, &profile(ProfileKind::DesingEven, k, eps), &cfg()).unwrap();
        assert!(back.contact.as_ref().unwrap().is_contact(), "k = {k}");
        let pts: Vec<Point> = cfg()
            .all_points(back.form.chart())
            .into_iter()
            .filter(|p| p.get("t").unwrap().abs() > 2.0 * eps)
            .collect();
        let diff = back.form.sub(&alpha.on_chart(back.form.chart()).unwrap()).unwrap();
        assert!(diff.sweep(&pts).max <= 1e-8, "k = {k}");
    }
}

#[test]
fn convergence_on_the_torus() {
    let rep = convergence_report(&torus_form(2), &[0.2, 0.1, 0.05, 0.025], 0.5, &cfg()).unwrap();
    assert_eq!(rep.eps, vec![0.2, 0.1, 0.05, 0.025]);
    assert!(rep.decreasing.iter().all(|d| *d), "{:?}", rep.rows);
    assert!(rep.far_zero, "{:?}", rep.rows);
    assert!(rep.reeb_residual <= 1e-9, "{}", rep.reeb_residual);
    assert!(rep.rows.iter().all(|r| r.far >= 0.0 && r.full >= 0.0));
    // C⁰ ~ ε², C¹ ~ ε
    assert!((rep.slopes[0] - 2.0).abs() < 0.3 && (rep.slopes[1] - 1.0).abs() < 0.3, "{:?}", rep.slopes);
    let csv = rep.to_csv().unwrap();
    assert!(csv.starts_with("eps,j,sup_diff\n"));
    assert_eq!(csv.lines().count(), 1 + rep.rows.len());
}

#[test]
fn corollary_gives_two_fold_components() {
    let eps = 0.4;
    let rep = folded_from_convex(&convex_surface_form(), "t", eps, &cfg()).unwrap();
    assert_eq!(rep.fold.verdict, FoldVerdict::Folded);
    assert_eq!(rep.fold.components.len(), 2);
    for (c, sign) in rep.fold.components.iter().zip([-1.0, 1.0]) {
        let (_, lo, hi) = &c.extent[0];
        assert!((lo - sign * 3.0 * eps / 8.0).abs() < 1e-6 && (hi - sign * 3.0 * eps / 8.0).abs() < 1e-6);
    }
}
