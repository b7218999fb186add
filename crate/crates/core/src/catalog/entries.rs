//! Constructors for the catalog entries.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{CatalogEntry, Contraction, Data, Expectation, Pullback};
use crate::chart::Chart;
use crate::contact::DarbouxCase;
use crate::exterior::{parse_form, parse_vector, BForm, BMultiVector, ChartMap};
use crate::grid::GridConfig;
use crate::jacobi::{liouville_contract, JacobiPair, LeafKind, TransversalityVerdict};
use crate::scalar::{parse_scalar, ScalarExpr};

fn chart(coords: &[&str], bounds: &[(f64, f64)], z: Option<(&str, u32)>) -> Arc<Chart> {
    Arc::new(Chart::new(coords, bounds, z).expect("catalog chart"))
}

fn unit_box(coords: &[&str], z: &str, m: u32) -> Arc<Chart> {
    chart(coords, &vec![(-1.0, 1.0); coords.len()], Some((z, m)))
}

fn form(s: &str, c: &Arc<Chart>) -> BForm {
    parse_form(s, c).expect("catalog form")
}

fn vector(s: &str, c: &Arc<Chart>) -> BMultiVector {
    parse_vector(s, c).expect("catalog vector")
}

fn scalar(s: &str, c: &Chart) -> ScalarExpr {
    parse_scalar(s, c).expect("catalog scalar")
}

/// Checks shared by every contact entry.
fn contact_suite(dim3: bool, m: u32) -> Vec<Expectation> {
    let mut v = vec![
        Expectation::Contact,
        Expectation::ReebResidual { tol: 1e-8 },
        Expectation::Jacobi { tol: 1e-7 },
        Expectation::DdZero,
        Expectation::DecomposeRoundTrip,
        Expectation::Transversality(if m == 1 {
            TransversalityVerdict::Transversal
        } else {
            TransversalityVerdict::NotTransversal
        }),
    ];
    if dim3 {
        v.push(Expectation::Theta {
            expected: None,
            min_clusters: 0,
            tol: 1e-8,
        });
    }
    v
}

fn contact_entry(name: &'static str, note: &'static str, alpha: BForm, extra: Vec<Expectation>) -> CatalogEntry {
    let dim3 = alpha.dim() == 3;
    let m = alpha.chart().order();
    let mut expectations = contact_suite(dim3, m);
    expectations.extend(extra);
    CatalogEntry {
        name,
        note,
        data: Data::Form(alpha),
        expectations,
        contraction: None,
        pullback: None,
        pointwise: false,
    }
}

fn point(c: &Chart, pairs: &[(&str, f64)]) -> crate::scalar::Point {
    c.point_from(pairs)
}

pub(super) fn extended_phase_space_n1() -> CatalogEntry {
    let c = unit_box(&["t", "x1", "z"], "z", 1);
    let a = form("D(t) + x1*B", &c);
    let on = |x1: f64| point(&c, &[("t", 0.4), ("x1", x1), ("z", 0.0)]);
    contact_entry(
        "extended_phase_space_n1",
        "dt + x1 dz/z on R × bT*M, M a surface with critical curve z = 0",
        a,
        vec![
            Expectation::ReebEquals(vector("P(t)", &c)),
            Expectation::PointCase {
                point: on(0.0),
                case: DarbouxCase::RegularReebSingularXi,
            },
            Expectation::PointCase {
                point: on(0.5),
                case: DarbouxCase::RegularReebRegularXi,
            },
            Expectation::Leaf {
                point: on(0.0),
                kind: LeafKind::ContactLeaf,
            },
        ],
    )
}

pub(super) fn extended_phase_space_n2() -> CatalogEntry {
    let c = unit_box(&["t", "x1", "x2", "y2", "z"], "z", 1);
    let a = form("D(t) + x1*B + x2*D(y2)", &c);
    contact_entry(
        "extended_phase_space_n2",
        "dt + x1 dz/z + x2 dy2, the five-dimensional extended phase space",
        a,
        vec![Expectation::ReebEquals(vector("P(t)", &c))],
    )
}

pub(super) fn singular_reeb_n1() -> CatalogEntry {
    let c = unit_box(&["x1", "y1", "z"], "z", 1);
    let a = form("B + x1*D(y1)", &c);
    let on = point(&c, &[("x1", 0.3), ("y1", 0.2), ("z", 0.0)]);
    contact_entry(
        "singular_reeb_n1",
        "dz/z + x1 dy1: the kernel keeps full rank on z = 0 and R = z∂z",
        a,
        vec![
            Expectation::ReebEquals(vector("Z", &c)),
            Expectation::PointCase {
                point: on.clone(),
                case: DarbouxCase::SingularReeb,
            },
            Expectation::Leaf {
                point: on,
                kind: LeafKind::LcsLeaf,
            },
        ],
    )
}

pub(super) fn singular_reeb_n2() -> CatalogEntry {
    let c = unit_box(&["x1", "x2", "y1", "y2", "z"], "z", 1);
    let a = form("B + x1*D(y1) + x2*D(y2)", &c);
    contact_entry(
        "singular_reeb_n2",
        "dz/z + x1 dy1 + x2 dy2",
        a,
        vec![Expectation::ReebEquals(vector("Z", &c))],
    )
}

/// Local coordinates `(w, b, c)` near the unit sphere in the 3-ball:
/// `x = (1 − w) S(b, c)` with `S` the inverse stereographic projection from
/// the puncture `(1, 0, 0)`, followed by the inverse Möbius map to the
/// half-space. The defining function of the half-space pulls back to
/// `w (2 − w) q / N`.
fn mobius_map(target: &Arc<Chart>) -> ChartMap {
    let src = chart(&["w", "b", "c"], &[(-0.3, 0.3), (-1.0, 1.0), (-1.0, 1.0)], Some(("w", 1)));
    let q = "(1 + b^2 + c^2)";
    let n = format!("((1 - w)^2*{q} - 2*(1 - w)*({q} - 2) + {q})");
    let comps = [
        format!("w*(2 - w)*{q}/{n}"),
        format!("4*(1 - w)*b/{n}"),
        format!("4*(1 - w)*c/{n}"),
    ];
    // target order: (z, t, x1) for the first coordinate as the defining one
    let exprs: Vec<ScalarExpr> = comps.iter().map(|s| scalar(s, &src)).collect();
    let unit = scalar(&format!("(2 - w)*{q}/{n}"), &src);
    let unit_inv = scalar(&format!("{n}/((2 - w)*{q})"), &src);
    ChartMap::new(&src, target, exprs)
        .expect("Möbius map")
        .with_defining(unit, Some(unit_inv), 1)
}

fn mobius_entry(name: &'static str, note: &'static str, literal: &str, coords: [&str; 3]) -> CatalogEntry {
    let target = chart(&coords, &[(-1.0, 1.0); 3], Some(("z", 1)));
    let phi = mobius_map(&target);
    let alpha_t = form(literal, &target);
    let alpha = phi.pullback(&alpha_t).expect("pullback");
    let mut e = contact_entry(name, note, alpha, vec![Expectation::PullbackCommutesWithD { tol: 1e-8 }]);
    e.pullback = Some(Pullback { map: phi, form: alpha_t });
    e.pointwise = true;
    e
}

pub(super) fn mobius_ball_regular() -> CatalogEntry {
    mobius_entry(
        "mobius_ball_regular",
        "dt + x1 dz/z on the half-space pulled back to the 3-ball; critical set the unit sphere minus a point",
        "D(t) + x1*B",
        ["z", "t", "x1"],
    )
}

pub(super) fn mobius_ball_singular() -> CatalogEntry {
    mobius_entry(
        "mobius_ball_singular",
        "dz/z + x1 dy1 on the half-space pulled back to the 3-ball",
        "B + x1*D(y1)",
        ["z", "x1", "y1"],
    )
}

pub(super) fn s2xs1() -> CatalogEntry {
    let c = Arc::new(
        Chart::new(&["theta", "h", "phi"], &[(0.0, 2.0 * PI), (-0.5, 0.5), (0.0, 2.0 * PI)], Some(("h", 1)))
            .expect("chart")
            .with_periodic(&["theta", "phi"]),
    );
    let a = form("sin(phi)*D(theta) + cos(phi)*B", &c);
    let on = |phi: f64| point(&c, &[("theta", 1.0), ("h", 0.0), ("phi", phi)]);
    let mut e = contact_entry(
        "s2xs1",
        "sin φ dθ + cos φ dh/h on S² × S¹ near the equator h = 0",
        a,
        vec![
            Expectation::ReebEquals(vector("sin(phi)*P(theta) + cos(phi)*Z", &c)),
            Expectation::Theta {
                expected: Some("W(D(phi), D(theta))"),
                min_clusters: 2,
                tol: 1e-8,
            },
            Expectation::PointCase {
                point: on(PI / 2.0),
                case: DarbouxCase::RegularReebSingularXi,
            },
            Expectation::PointCase {
                point: on(0.0),
                case: DarbouxCase::SingularReeb,
            },
            Expectation::PointCase {
                point: on(1.0),
                case: DarbouxCase::RegularReebRegularXi,
            },
        ],
    );
    // the generic Θ check is superseded by the explicit one
    e.expectations.retain(|x| !matches!(x, Expectation::Theta { expected: None, .. }));
    e
}

pub(super) fn product_singular_reeb_r2() -> CatalogEntry {
    let c = unit_box(&["x1", "y1", "p", "q", "z"], "z", 1);
    contact_entry(
        "product_singular_reeb_r2",
        "(dz/z + x1 dy1) + p dq: a b-contact form times the exact symplectic plane",
        form("B + x1*D(y1) + p*D(q)", &c),
        vec![],
    )
}

pub(super) fn product_extended_r2() -> CatalogEntry {
    let c = unit_box(&["t", "x1", "p", "q", "z"], "z", 1);
    contact_entry(
        "product_extended_r2",
        "(dt + x1 dz/z) + p dq",
        form("D(t) + x1*B + p*D(q)", &c),
        vec![Expectation::ReebEquals(vector("P(t)", &c))],
    )
}

pub(super) fn darboux_1a() -> CatalogEntry {
    let c = unit_box(&["x1", "y1", "z"], "z", 1);
    let on = |y1: f64| point(&c, &[("x1", 0.3), ("y1", y1), ("z", 0.0)]);
    contact_entry(
        "darboux_1a",
        "dx1 + y1 dz/z: regular Reeb field, kernel singular along y1 = 0",
        form("D(x1) + y1*B", &c),
        vec![
            Expectation::ReebEquals(vector("P(x1)", &c)),
            Expectation::PointCase {
                point: on(0.0),
                case: DarbouxCase::RegularReebSingularXi,
            },
            Expectation::Leaf {
                point: on(0.0),
                kind: LeafKind::ContactLeaf,
            },
            Expectation::Leaf {
                point: on(0.4),
                kind: LeafKind::LcsLeaf,
            },
        ],
    )
}

pub(super) fn darboux_1b() -> CatalogEntry {
    let c = unit_box(&["x1", "y1", "z"], "z", 1);
    let on = |y1: f64| point(&c, &[("x1", 0.3), ("y1", y1), ("z", 0.0)]);
    contact_entry(
        "darboux_1b",
        "dx1 + (1 + y1) dz/z: regular Reeb field and regular kernel near y1 = 0",
        form("D(x1) + (1 + y1)*B", &c),
        vec![
            Expectation::PointCase {
                point: on(0.0),
                case: DarbouxCase::RegularReebRegularXi,
            },
            Expectation::Leaf {
                point: on(0.5),
                kind: LeafKind::LcsLeaf,
            },
        ],
    )
}

pub(super) fn darboux_2() -> CatalogEntry {
    let c = unit_box(&["x1", "y1", "z"], "z", 1);
    let on = point(&c, &[("x1", -0.6), ("y1", 0.1), ("z", 0.0)]);
    contact_entry(
        "darboux_2",
        "dz/z + x1 dy1: vanishing Reeb field on the critical set",
        form("B + x1*D(y1)", &c),
        vec![Expectation::PointCase {
            point: on,
            case: DarbouxCase::SingularReeb,
        }],
    )
}

fn r4() -> (Arc<Chart>, BForm, BMultiVector) {
    let w = unit_box(&["t", "x", "y", "z"], "z", 1);
    let omega = form("W(B, D(t)) + W(D(x), D(y))", &w);
    let x = vector("t*P(t) + x*P(x)", &w);
    (w, omega, x)
}

fn contraction_entry(
    name: &'static str,
    note: &'static str,
    omega: BForm,
    x: BMultiVector,
    map: ChartMap,
    expected: Option<&str>,
    extra: Vec<Expectation>,
    heavy: bool,
) -> CatalogEntry {
    let r = liouville_contract(&omega, &x, &map, &GridConfig::default()).expect("contraction");
    let mut more = vec![Expectation::ReebOrthogonality { tol: 1e-8 }];
    if let Some(lit) = expected {
        more.push(Expectation::FormEquals(form(lit, map.source())));
    }
    more.extend(extra);
    let mut e = contact_entry(name, note, r.alpha, more);
    e.contraction = Some(Contraction { omega, x, map });
    e.pointwise = heavy;
    e
}

pub(super) fn r4_slice_m1() -> CatalogEntry {
    let (w, omega, x) = r4();
    let h = chart(&["s", "y", "z"], &[(0.2, 1.0), (-1.0, 1.0), (-1.0, 1.0)], Some(("z", 1)));
    let comps = ["-s", "1", "y", "z"].iter().map(|s| scalar(s, &h)).collect();
    let map = ChartMap::new(&h, &w, comps).expect("slice");
    contraction_entry(
        "r4_slice_m1",
        "ι_X ω on the hyperplane x = 1 of (R⁴, dz/z∧dt + dx∧dy), X = t∂t + x∂x",
        omega,
        x,
        map,
        Some("D(y) + s*B"),
        vec![Expectation::ReebEquals(vector("P(y)", &h))],
        false,
    )
}

pub(super) fn r4_slice_m2() -> CatalogEntry {
    let (w, omega, x) = r4();
    let h = unit_box(&["x", "y", "z"], "z", 1);
    let comps = ["-1", "x", "y", "z"].iter().map(|s| scalar(s, &h)).collect();
    let map = ChartMap::new(&h, &w, comps).expect("slice");
    contraction_entry(
        "r4_slice_m2",
        "ι_X ω on the hyperplane t = −1 of (R⁴, dz/z∧dt + dx∧dy), X = t∂t + x∂x",
        omega,
        x,
        map,
        Some("B + x*D(y)"),
        vec![Expectation::ReebEquals(vector("Z", &h))],
        false,
    )
}

pub(super) fn s3() -> CatalogEntry {
    let w = unit_box(&["x1", "y1", "x2", "y2"], "x1", 1);
    let omega = form("W(B, D(y1)) + W(D(x2), D(y2))", &w);
    let x = vector("1/2*Z + y1*P(y1) + 1/2*x2*P(x2) + 1/2*y2*P(y2)", &w);
    let h = chart(&["u1", "u2", "u3"], &[(-0.5, 0.5); 3], Some(("u1", 1)));
    let s = "(1 + u1^2 + u2^2 + u3^2)";
    let comps = [
        format!("2*u1/{s}"),
        format!("2*u2/{s}"),
        format!("2*u3/{s}"),
        format!("(u1^2 + u2^2 + u3^2 - 1)/{s}"),
    ]
    .iter()
    .map(|e| scalar(e, &h))
    .collect();
    let map = ChartMap::new(&h, &w, comps)
        .expect("stereographic chart")
        .with_defining(scalar(&format!("2/{s}"), &h), Some(scalar(&format!("{s}/2"), &h)), 1);
    contraction_entry(
        "s3",
        "ι_X ω on the unit sphere of (R⁴, dx1/x1∧dy1 + dx2∧dy2), in stereographic coordinates from the south pole",
        omega,
        x,
        map,
        None,
        vec![],
        true,
    )
}

fn torus(m: u32, name: &'static str, note: &'static str, literal: &str, extra: Vec<Expectation>) -> CatalogEntry {
    let c = Arc::new(
        Chart::new(&["z", "y", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], Some(("z", m)))
            .expect("chart")
            .with_periodic(&["y", "phi"]),
    );
    let mut more = vec![Expectation::Convexity { convex: true }];
    more.extend(extra);
    contact_entry(name, note, form(literal, &c), more)
}

pub(super) fn torus3_m1() -> CatalogEntry {
    let on = |phi: f64| {
        let c = Chart::new(&["z", "y", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], Some(("z", 1))).expect("chart");
        c.point_from(&[("z", 0.0), ("y", 1.0), ("phi", phi)])
    };
    torus(
        1,
        "torus3_m1",
        "unit cotangent bundle of the b-torus: sin φ dx/sin x + cos φ dy near x = 0, with z = 2 tan(x/2) so that dx/sin x = dz/z",
        "sin(phi)*B + cos(phi)*D(y)",
        vec![
            Expectation::ReebEquals(parse_vector("sin(phi)*Z + cos(phi)*P(y)", &Arc::new(on_chart(1))).expect("vector")),
            Expectation::PointCase {
                point: on(PI / 2.0),
                case: DarbouxCase::SingularReeb,
            },
            Expectation::PointCase {
                point: on(1.0),
                case: DarbouxCase::RegularReebRegularXi,
            },
            Expectation::PointCase {
                point: on(0.0),
                case: DarbouxCase::RegularReebSingularXi,
            },
        ],
    )
}

fn on_chart(m: u32) -> Chart {
    Chart::new(&["z", "y", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], Some(("z", m)))
        .expect("chart")
        .with_periodic(&["y", "phi"])
}

pub(super) fn torus3_m1_second_component() -> CatalogEntry {
    torus(
        1,
        "torus3_m1_second_component",
        "the same form near x = π, with z = −2 cot(x/2) so that dx/sin x = −dz/z",
        "-sin(phi)*B + cos(phi)*D(y)",
        vec![],
    )
}

pub(super) fn torus3_m2() -> CatalogEntry {
    torus(
        2,
        "torus3_m2",
        "sin φ dz/z² + cos φ dy, the b² analogue of the torus form",
        "sin(phi)*B + cos(phi)*D(y)",
        vec![],
    )
}

pub(super) fn klein_pre_quotient() -> CatalogEntry {
    let c = Arc::new(
        Chart::new(&["z", "y", "theta"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], Some(("z", 1)))
            .expect("chart")
            .with_periodic(&["y", "theta"]),
    );
    contact_entry(
        "klein_pre_quotient",
        "cos θ dx/sin 2πx + sin θ dy on T² × S¹ before the quotient (x, y) ~ (1 − x, y) giving K × S¹; \
         here z = tan(πx) and y is rescaled by 2π, so the form is 2π times the original",
        form("cos(theta)*B + sin(theta)*D(y)", &c),
        vec![],
    )
}

pub(super) fn jacobi_model_even() -> CatalogEntry {
    let c = unit_box(&["x1", "x2", "z"], "z", 1);
    let lambda = vector("W(P(x2), P(x1)) - x2*W(P(x2), Z)", &c);
    let reeb = vector("Z", &c);
    CatalogEntry {
        name: "jacobi_model_even",
        note: "Λ = ∂x2∧∂x1 − x2 ∂x2∧R_N, R = R_N = z∂z: the even local model on U² × N with N one-dimensional",
        data: Data::Pair(JacobiPair::new(lambda, reeb).expect("pair")),
        expectations: vec![
            Expectation::Jacobi { tol: 1e-7 },
            Expectation::Transversality(TransversalityVerdict::Transversal),
        ],
        contraction: None,
        pullback: None,
        pointwise: false,
    }
}

pub(super) fn jacobi_model_odd() -> CatalogEntry {
    let c = unit_box(&["x0", "x1", "x2", "y", "z"], "z", 1);
    let lambda = vector("W(x2*P(x0) - P(x1), P(x2)) + W(Z, P(y)) + y*W(P(x0), P(y))", &c);
    let reeb = vector("P(x0)", &c);
    CatalogEntry {
        name: "jacobi_model_odd",
        note: "Λ = (x2∂x0 − ∂x1)∧∂x2 + Λ_N + R∧Z_N, R = ∂x0, with (N, Λ_N = z∂z∧∂y, Z_N = y∂y) homogeneous Poisson",
        data: Data::Pair(JacobiPair::new(lambda, reeb).expect("pair")),
        expectations: vec![
            Expectation::Jacobi { tol: 1e-7 },
            Expectation::Transversality(TransversalityVerdict::Transversal),
        ],
        contraction: None,
        pullback: None,
        pointwise: false,
    }
}
