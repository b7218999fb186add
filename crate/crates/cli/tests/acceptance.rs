//! Acceptance criteria 1–12, one line per criterion.
//!
//! Runs as a plain binary so that the lines are printed on success too.
//! A criterion listed in `KNOWN` is expected to fail in the recorded way;
//! the run fails if it passes unexpectedly or fails differently.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use bcontact::catalog::{self, CatalogEntry, Data};
use bcontact::contact::{reeb, reeb_residual, theta_form, theta_form_pointwise, Verdict};
use bcontact::exterior::{parse_form, parse_vector, BForm, Graded};
use bcontact::jacobi::{
    bjacobi_transversality, jacobi_from_contact, jacobi_via_liouville, liouville_contract, poissonize,
    reeb_orthogonality_check, PointwiseJacobi, TransversalityVerdict,
};
use bcontact::scalar::{Node, ScalarExpr};
use bcontact::singular::{
    build_profile, convergence_report, desingularize, folded_from_convex, orientation_obstruction_check,
    singularize, FoldVerdict, ObstructionVerdict, ProfileKind,
};
use bcontact::{Chart, GridConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

/// Failures that are expected, with the check that pins down how they fail.
struct Known {
    id: usize,
    reason: &'static str,
}

const KNOWN: &[Known] = &[Known {
    id: 5,
    reason: "literal top-power identity Π^{n+1} = −e^{−(n+1)τ}∂τ∧Λ^n∧R is off by the factor −(n+1); \
             the binomial form (n+1)e^{−(n+1)τ}∂τ∧Λ^n∧R holds",
}];

fn cfg() -> GridConfig {
    GridConfig::default()
}

/// Collects failures while a criterion runs.
#[derive(Default)]
struct Log {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Log {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> Outcome {
        let passed = self.failures.is_empty();
        let mut parts = self.notes;
        if !passed {
            let n = self.failures.len();
            let mut f = self.failures;
            f.truncate(4);
            parts.push(format!("{n} failure(s): {}", f.join("; ")));
        }
        Outcome {
            passed,
            detail: parts.join(", "),
        }
    }
}

fn contact_entries() -> Vec<CatalogEntry> {
    catalog::list_entries()
        .into_iter()
        .map(|n| catalog::get(n).unwrap())
        .filter(|e| e.form().is_some())
        .collect()
}

fn random_coeff(rng: &mut ChaCha8Rng, depth: u32, vars: &[&str]) -> ScalarExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.75) {
            ScalarExpr::sym(vars[rng.gen_range(0..vars.len())])
        } else {
            ScalarExpr::int(rng.gen_range(-3..=3))
        };
    }
    let a = random_coeff(rng, depth - 1, vars);
    let node = match rng.gen_range(0..5) {
        0 => Node::Add(vec![a, random_coeff(rng, depth - 1, vars)]),
        1 => Node::Mul(vec![a, random_coeff(rng, depth - 1, vars)]),
        2 => Node::Sin(a),
        3 => Node::Exp(ScalarExpr::from_node(Node::Cos(a))),
        _ => Node::Pow(a, 2),
    };
    ScalarExpr::from_node(node)
}

fn criterion_1() -> Outcome {
    let mut log = Log::default();
    let entries = contact_entries();
    for e in &entries {
        let a = e.form().unwrap();
        log.expect(a.ext_d().ext_d().is_zero(), || format!("d∘d ≠ 0 on {}", e.name));
        let (s, b) = a.decompose();
        log.expect(BForm::reassemble(&s, &b).ok().as_ref() == Some(a), || format!("round trip on {}", e.name));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let vars = ["x", "y", "z", "w"];
    for i in 0..50 {
        let m = 1 + (i % 3) as u32;
        let c = Arc::new(Chart::new(&vars, &[(-1.0, 1.0); 4], Some(("z", m))).unwrap());
        let degree = 1 + i % 3;
        let masks: Vec<u32> = (0u32..16).filter(|k| k.count_ones() as usize == degree).collect();
        let mut terms: Vec<(u32, ScalarExpr)> = Vec::new();
        for k in masks {
            if rng.gen_bool(0.7) {
                terms.push((k, random_coeff(&mut rng, 2, &vars)));
            }
        }
        let w: BForm = Graded::from_terms(&c, degree, terms);
        log.expect(w.ext_d().ext_d().is_zero(), || format!("d∘d ≠ 0 on random form {i}: {w}"));
        let (s, b) = w.decompose();
        log.expect(BForm::reassemble(&s, &b).ok() == Some(w.clone()), || format!("round trip on random form {i}"));
    }
    log.note(format!("{} catalog forms and 50 random forms", entries.len()));
    log.finish()
}

fn criterion_2() -> Outcome {
    let mut log = Log::default();
    let closed = [
        ("extended_phase_space_n1", "P(t)"),
        ("singular_reeb_n1", "Z"),
        ("s2xs1", "sin(phi)*P(theta) + cos(phi)*Z"),
    ];
    for (name, lit) in closed {
        let a = catalog::get(name).unwrap().form().unwrap().clone();
        let expected = parse_vector(lit, a.chart()).unwrap();
        let ok = reeb(&a, &cfg()).map(|r| r.sub(&expected).unwrap().is_zero()).unwrap_or(false);
        log.expect(ok, || format!("R ≠ {lit} on {name}"));
    }
    let mut worst: f64 = 0.0;
    for e in contact_entries() {
        let a = e.form().unwrap();
        let pts = cfg().all_points(a.chart());
        let res = if e.pointwise {
            PointwiseJacobi::new(a, &cfg()).and_then(|p| p.reeb_residual(&pts)).map_err(|x| x.to_string())
        } else {
            reeb(a, &cfg())
                .and_then(|r| reeb_residual(a, &r, &pts))
                .map_err(|x| x.to_string())
                .and_then(|s| if s.skipped.is_empty() { Ok(s.max) } else { Err("unevaluable points".into()) })
        };
        match res {
            Ok(v) => {
                worst = worst.max(v);
                log.expect(v < 1e-8, || format!("{}: residual {v:.2e}", e.name));
            }
            Err(err) => log.expect(false, || format!("{}: {err}", e.name)),
        }
    }
    log.note(format!("3 closed forms, max back-substitution residual {worst:.1e}"));
    log.finish()
}

fn criterion_3() -> Outcome {
    let mut log = Log::default();
    let mut count = 0;
    for e in contact_entries().into_iter().filter(|e| e.form().unwrap().dim() == 3) {
        count += 1;
        let a = e.form().unwrap();
        let t = if e.pointwise {
            theta_form_pointwise(a, &cfg())
        } else {
            theta_form(a, &cfg())
        };
        match t {
            Ok(t) => {
                log.expect(t.nondegenerate(1e-8), || format!("{}: area_min {:.2e}", e.name, t.area_min));
                log.expect(t.sign.abs() == 1, || format!("{}: sign {}", e.name, t.sign));
                log.expect(t.residual < 1e-8, || format!("{}: residual {:.2e}", e.name, t.residual));
                if e.name == "s2xs1" {
                    let expected = parse_form("W(D(phi), D(theta))", t.theta.chart()).unwrap();
                    log.expect(t.theta.sub(&expected).unwrap().is_zero(), || format!("s2xs1: Θ = {}", t.theta));
                    log.expect(t.clusters.len() >= 2, || format!("s2xs1: {} clusters", t.clusters.len()));
                    log.note(format!("S²×S¹: Θ = {}, {} zero clusters", t.theta, t.clusters.len()));
                }
            }
            Err(err) => log.expect(false, || format!("{}: {err}", e.name)),
        }
    }
    log.note(format!("{count} three-dimensional entries"));
    log.finish()
}

fn criterion_4() -> Outcome {
    let mut log = Log::default();
    let mut worst: f64 = 0.0;
    for e in contact_entries() {
        let a = e.form().unwrap();
        let v = if e.pointwise {
            PointwiseJacobi::new(a, &cfg()).and_then(|p| p.verify_on(&cfg().all_points(a.chart()), 1e-7))
        } else {
            jacobi_from_contact(a, &cfg()).map(|j| j.verification.unwrap())
        };
        match v {
            Ok(v) => {
                worst = worst.max(v.lambda_lambda).max(v.lambda_reeb);
                log.expect(v.lambda_lambda < 1e-7 && v.lambda_reeb < 1e-7, || format!("{}: {v:?}", e.name));
            }
            Err(err) => log.expect(false, || format!("{}: {err}", e.name)),
        }
    }
    let chart = |coords: &[&str]| Arc::new(Chart::new(coords, &vec![(-1.0, 1.0); coords.len()], Some(("z", 1))).unwrap());
    let liouville = [
        (chart(&["x1", "y1", "z"]), "D(x1) + y1*B", "y1*P(y1)"),
        (chart(&["t", "x1", "z"]), "D(t) + x1*B", "x1*P(x1)"),
        (chart(&["x1", "y1", "x2", "y2", "z"]), "D(x1) + y1*B + x2*D(y2)", "y1*P(y1) + y2*P(y2)"),
    ];
    for (c, a, x) in liouville {
        let alpha = parse_form(a, &c).unwrap();
        let x = parse_vector(x, &c).unwrap();
        match jacobi_via_liouville(&alpha, &x, &cfg()) {
            Ok(lj) => {
                let holds = lj.pair.verification.map_or(false, |v| v.holds());
                log.expect(lj.discriminant_max < 1e-7 && holds, || format!("lemma on {a}"));
                log.expect(lj.lemma_consistent, || format!("lemma inconsistent on {a}"));
            }
            Err(err) => log.expect(false, || format!("{a}: {err}")),
        }
    }
    log.note(format!("max identity residual {worst:.1e}, lemma checked on 3 Liouville fields"));
    log.finish()
}

/// Returns the outcome and whether a failure is exactly the recorded one.
fn criterion_5() -> (Outcome, bool) {
    let mut log = Log::default();
    let mut literal_only = true;
    let mut worst_literal: f64 = 0.0;
    let mut count = 0;
    for e in contact_entries().into_iter().filter(|e| !e.pointwise && e.form().unwrap().dim() == 3) {
        count += 1;
        let a = e.form().unwrap();
        match jacobi_from_contact(a, &cfg()).and_then(|j| poissonize(&j, &cfg())) {
            Ok(p) => {
                log.expect(p.poisson_residual < 1e-7, || format!("{}: [Π,Π] {:.2e}", e.name, p.poisson_residual));
                log.expect(p.homogeneity_residual < 1e-7, || {
                    format!("{}: L_TΠ + Π {:.2e}", e.name, p.homogeneity_residual)
                });
                literal_only &= p.poisson_residual < 1e-7
                    && p.homogeneity_residual < 1e-7
                    && p.top_power_binomial_residual < 1e-7;
                worst_literal = worst_literal.max(p.top_power_residual);
                log.expect(p.top_power_residual < 1e-7, || {
                    format!("{}: literal top power {:.2e}", e.name, p.top_power_residual)
                });
            }
            Err(err) => {
                literal_only = false;
                log.expect(false, || format!("{}: {err}", e.name));
            }
        }
    }
    log.note(format!("{count} pairs, [Π,Π] and L_TΠ = −Π hold, literal top-power residual up to {worst_literal:.2}"));
    (log.finish(), literal_only)
}

fn criterion_6() -> Outcome {
    let mut log = Log::default();
    let mut counts = [0usize; 2];
    for name in catalog::list_entries() {
        let e = catalog::get(name).unwrap();
        let m = e.chart().order();
        let verdict = match (&e.data, e.pointwise) {
            (Data::Form(a), true) => PointwiseJacobi::new(a, &cfg())
                .and_then(|p| p.transversality(a.chart(), &cfg()))
                .map(|t| (t.verdict, t.min_gradient_on_z)),
            (Data::Form(a), false) => jacobi_from_contact(a, &cfg())
                .and_then(|j| bjacobi_transversality(&j, &cfg()))
                .map(|t| (t.verdict, t.min_gradient_on_z)),
            (Data::Pair(j), _) => bjacobi_transversality(j, &cfg()).map(|t| (t.verdict, t.min_gradient_on_z)),
        };
        let want = if m == 1 {
            TransversalityVerdict::Transversal
        } else {
            TransversalityVerdict::NotTransversal
        };
        match verdict {
            Ok((v, grad)) => {
                counts[(m != 1) as usize] += 1;
                log.expect(v == want, || format!("{name} (m = {m}): {v:?}, gradient {grad:.2e}"));
                if m == 1 {
                    log.expect(grad >= 1e-6, || format!("{name}: gradient {grad:.2e}"));
                }
            }
            Err(err) => log.expect(false, || format!("{name}: {err}")),
        }
    }
    log.note(format!("{} m = 1 pairs transversal, {} m = 2 pairs not", counts[0], counts[1]));
    log.finish()
}

fn criterion_7() -> Outcome {
    let mut log = Log::default();
    for (name, lit) in [("r4_slice_m1", Some("D(y) + s*B")), ("r4_slice_m2", Some("B + x*D(y)")), ("s3", None)] {
        let e = catalog::get(name).unwrap();
        let c = e.contraction.as_ref().unwrap();
        match liouville_contract(&c.omega, &c.x, &c.map, &cfg()) {
            Ok(r) => {
                if let Some(lit) = lit {
                    let expected = parse_form(lit, c.map.source()).unwrap();
                    log.expect(r.alpha.sub(&expected).unwrap().is_zero(), || format!("{name}: α = {}", r.alpha));
                }
                log.expect(r.contact.verdict == Verdict::Contact, || format!("{name}: {:?}", r.contact.verdict));
            }
            Err(err) => log.expect(false, || format!("{name}: {err}")),
        }
        match reeb_orthogonality_check(&c.omega, &c.x, &c.map, &cfg()) {
            Ok(o) => log.expect(o.residual < 1e-8, || format!("{name}: orthogonality {:.2e}", o.residual)),
            Err(err) => log.expect(false, || format!("{name}: {err}")),
        }
    }
    log.note("M₁ → dy + s dz/z, M₂ → dz/z + x dy, S³ contact, Reeb orthogonality < 1e-8");
    log.finish()
}

fn profile(kind: ProfileKind, k: u32, eps: f64) -> Arc<bcontact::singular::ProfileFn> {
    Arc::new(build_profile(kind, k, eps).unwrap())
}

fn criterion_8() -> Outcome {
    let mut log = Log::default();
    let alpha = catalog::get("torus3_m2").unwrap().form().unwrap().clone();
    let eps = [0.2, 0.1, 0.05];
    for e in eps {
        match desingularize(&alpha, &profile(ProfileKind::DesingEven, 1, e), &cfg()) {
            Ok(d) => {
                log.expect(d.contact.as_ref().is_some_and(|c| c.verdict == Verdict::Contact), || format!("ε = {e}: not contact"));
                log.expect(d.coincidence_points > 0 && d.coincidence_residual <= 1e-10, || {
                    format!("ε = {e}: coincidence {:.2e}", d.coincidence_residual)
                });
                log.expect(d.identity_residual <= 1e-8, || format!("ε = {e}: identity {:.2e}", d.identity_residual));
            }
            Err(err) => log.expect(false, || format!("ε = {e}: {err}")),
        }
    }
    match convergence_report(&alpha, &eps, 0.5, &cfg()) {
        Ok(c) => {
            log.expect(c.decreasing.len() >= 2 && c.decreasing[0] && c.decreasing[1], || {
                format!("C⁰/C¹ not strictly decreasing: {:?}", c.decreasing)
            });
            log.expect(c.far_zero, || format!("|z| ≥ 0.5 discrepancy {:.2e}", c.far_max));
            let full = |j: u32| eps.iter().map(|&e| c.row(e, j).map_or(f64::NAN, |r| r.full)).collect::<Vec<_>>();
            log.note(format!(
                "contact for ε ∈ {{0.2, 0.1, 0.05}}, C⁰ {:.1e}/{:.1e}/{:.1e}, C¹ {:.1e}/{:.1e}/{:.1e} on the full box, {:.0e} on |z| ≥ 0.5",
                full(0)[0], full(0)[1], full(0)[2], full(1)[0], full(1)[1], full(1)[2], c.far_max
            ));
        }
        Err(err) => log.expect(false, || format!("convergence: {err}")),
    }
    log.finish()
}

fn criterion_9() -> Outcome {
    let mut log = Log::default();
    let alpha = catalog::get("torus3_m1").unwrap().form().unwrap().clone();
    match desingularize(&alpha, &profile(ProfileKind::DesingOdd, 0, 0.1), &cfg()) {
        Ok(d) => {
            let f = d.fold.unwrap();
            log.expect(f.verdict == FoldVerdict::Folded, || format!("{:?}", f.verdict));
            log.expect(f.components.len() == 1, || format!("{} fold components", f.components.len()));
            let zi = d.form.chart().index_of("z").unwrap();
            let cell = f.spacing[zi];
            for c in &f.components {
                let (_, lo, hi) = &c.extent[zi];
                log.expect(lo.abs() <= cell && hi.abs() <= cell, || format!("fold at z ∈ [{lo}, {hi}]"));
                log.expect(c.min_gradient >= 1e-6, || format!("|∇c| = {:.2e}", c.min_gradient));
            }
            log.note(format!("fold on z = 0 within cell {cell:.2e}, min |∇c| {:.2e}", f.min_gradient));
        }
        Err(err) => log.expect(false, || err.to_string()),
    }
    log.finish()
}

fn convex_surface_form() -> BForm {
    let chart = Arc::new(
        Chart::smooth(&["t", "theta", "phi"], &[(-1.0, 1.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)])
            .unwrap()
            .with_periodic(&["theta", "phi"]),
    );
    parse_form("cos(phi)*D(t) + sin(phi)*D(theta)", &chart).unwrap()
}

fn criterion_10() -> Outcome {
    let mut log = Log::default();
    let alpha = convex_surface_form();
    let eps = 0.1;
    for k in [1, 2] {
        match singularize(&alpha, "t", &profile(ProfileKind::SingEven, k, eps), &cfg()) {
            Ok(s) => {
                log.expect(s.order == 2 * k && s.components.len() == 1, || format!("k = {k}: components"));
                for c in &s.components {
                    log.expect(c.contact.verdict == Verdict::Contact, || format!("k = {k}: not contact"));
                    log.expect(c.convexity.is_convex(), || format!("k = {k}: {:?}", c.convexity));
                    log.expect(c.center == 0.0, || format!("k = {k}: center {}", c.center));
                }
                log.expect(
                    s.located_critical_points.len() == 1 && s.located_critical_points[0].abs() < 1e-6,
                    || format!("k = {k}: critical set {:?}", s.located_critical_points),
                );
                log.expect(s.coincidence_residual <= 1e-10, || format!("k = {k}: agreement {:.2e}", s.coincidence_residual));
            }
            Err(err) => log.expect(false, || format!("sing-even k = {k}: {err}")),
        }
    }
    match singularize(&alpha, "t", &profile(ProfileKind::SingOdd, 0, eps), &cfg()) {
        Ok(s) => {
            let loc = &s.located_critical_points;
            let at = 3.0 * eps / 8.0;
            log.expect(loc.len() == 2 && (loc[0] + at).abs() < 1e-6 && (loc[1] - at).abs() < 1e-6, || {
                format!("sing-odd critical points {loc:?}")
            });
            log.expect(s.components.iter().all(|c| c.contact.verdict == Verdict::Contact), || "sing-odd not contact".into());
        }
        Err(err) => log.expect(false, || format!("sing-odd: {err}")),
    }
    for m in 1..=4 {
        for comps in 1..=3 {
            let v = orientation_obstruction_check(m, comps).verdict;
            let want = if m % 2 == 1 && comps == 1 {
                ObstructionVerdict::Obstructed
            } else {
                ObstructionVerdict::Admissible
            };
            log.expect(v == want, || format!("obstruction (m = {m}, {comps} components): {v:?}"));
        }
    }
    log.note("sing-even k = 1, 2 convex b^{2k} on t = 0, sing-odd at t = ±3ε/8, obstruction table m ≤ 4");
    log.finish()
}

fn criterion_11() -> Outcome {
    let mut log = Log::default();
    let eps = 0.4;
    match folded_from_convex(&convex_surface_form(), "t", eps, &cfg()) {
        Ok(r) => {
            log.expect(r.fold.verdict == FoldVerdict::Folded, || format!("{:?}", r.fold.verdict));
            log.expect(r.fold.components.len() == 2, || format!("{} fold components", r.fold.components.len()));
            let centers: Vec<String> = r
                .fold
                .components
                .iter()
                .map(|c| format!("{:.4}", 0.5 * (c.extent[0].1 + c.extent[0].2)))
                .collect();
            log.note(format!("folded, components at t = {}", centers.join(", ")));
        }
        Err(err) => log.expect(false, || err.to_string()),
    }
    log.finish()
}

fn criterion_12() -> Outcome {
    let mut log = Log::default();
    let out = Command::new(env!("CARGO_BIN_EXE_bcontact"))
        .args(["catalog", "verify", "--all", "--no-timestamp"])
        .output()
        .expect("run bcontact");
    log.expect(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()));
    match serde_json::from_slice::<serde_json::Value>(&out.stdout) {
        Ok(v) => {
            let mut checks = 0;
            for entry in v["witnesses"].as_array().into_iter().flatten() {
                for c in entry["checks"].as_array().into_iter().flatten() {
                    checks += 1;
                    log.expect(c["passed"] == true, || format!("{} / {}", entry["name"], c["label"]));
                }
            }
            log.note(format!("{} entries, {checks} expectations", v["metrics"]["entries"]));
        }
        Err(err) => log.expect(false, || format!("report: {err}")),
    }
    log.finish()
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, Box<dyn Fn() -> (Outcome, bool)>)> = vec![
        (1, Box::new(|| (criterion_1(), false))),
        (2, Box::new(|| (criterion_2(), false))),
        (3, Box::new(|| (criterion_3(), false))),
        (4, Box::new(|| (criterion_4(), false))),
        (5, Box::new(criterion_5)),
        (6, Box::new(|| (criterion_6(), false))),
        (7, Box::new(|| (criterion_7(), false))),
        (8, Box::new(|| (criterion_8(), false))),
        (9, Box::new(|| (criterion_9(), false))),
        (10, Box::new(|| (criterion_10(), false))),
        (11, Box::new(|| (criterion_11(), false))),
        (12, Box::new(|| (criterion_12(), false))),
    ];
    let mut unexpected = 0;
    for (id, run) in criteria {
        let t = Instant::now();
        let (o, as_recorded) = run();
        let known = KNOWN.iter().find(|k| k.id == id);
        let status = if o.passed { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {id:>2}: {status} ({:.1}s) {}", t.elapsed().as_secs_f64(), o.detail);
        match (o.passed, known) {
            (true, None) => {}
            (false, Some(k)) if as_recorded => line.push_str(&format!(" [known: {}]", k.reason)),
            (true, Some(_)) => {
                unexpected += 1;
                line.push_str(" [recorded as failing but passed]");
            }
            (false, _) => unexpected += 1,
        }
        println!("{line}");
    }
    if unexpected == 0 {
        println!("acceptance: all criteria as expected");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected outcome(s)");
        ExitCode::FAILURE
    }
}
