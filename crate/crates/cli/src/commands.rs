//! One function per subcommand, each filling a [`Report`].

use std::sync::Arc;

use bcontact::catalog;
use bcontact::contact::{
    classify_point, hamiltonian_field, hamiltonian_residual, is_contact, reeb, reeb_residual, theta_form,
    theta_form_pointwise, Verdict,
};
use bcontact::exterior::BForm;
use bcontact::jacobi::{
    bjacobi_transversality, jacobi_from_contact, jacobi_via_liouville, liouville_contract, poissonize,
    reeb_orthogonality_check, symplectize, PointwiseJacobi, TransversalityVerdict,
};
use bcontact::singular::{
    build_profile, convergence_report, desingularize, folded_from_convex, singularize, FoldVerdict, ProfileKind,
};
use bcontact::GridConfig;
use serde_json::json;

use crate::input::{self, input_err, load_form_input, load_map, Failure, FormInput, Res};
use crate::report::{label, Report, RunConfig};
use crate::{CatalogAction, Command, Common, ProfileArgs};

pub fn run(cmd: &Command, cfg: RunConfig) -> Res<Report> {
    let mut r = Report::new(&name(cmd), cfg.clone());
    let grid = cfg.grid();
    match dispatch(cmd, &grid, &mut r) {
        Ok(()) => Ok(r),
        Err(Failure::Math(msg)) => {
            r.verdict("failed", false).metric("error", msg);
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

fn name(cmd: &Command) -> String {
    match cmd {
        Command::Check { .. } => "check",
        Command::Reeb { .. } => "reeb",
        Command::Hamiltonian { .. } => "hamiltonian",
        Command::Classify { .. } => "classify",
        Command::Theta { .. } => "theta",
        Command::Jacobi { .. } => "jacobi",
        Command::Transversality { .. } => "transversality",
        Command::Poissonize { .. } => "poissonize",
        Command::Symplectize { .. } => "symplectize",
        Command::Contract { .. } => "contract",
        Command::Desing { .. } => "desing",
        Command::Sing { .. } => "sing",
        Command::Converge { .. } => "converge",
        Command::Catalog { action } => match action {
            CatalogAction::List { .. } => "catalog list",
            CatalogAction::Show { .. } => "catalog show",
            CatalogAction::Verify { .. } => "catalog verify",
        },
    }
    .to_string()
}

fn dispatch(cmd: &Command, grid: &GridConfig, r: &mut Report) -> Res<()> {
    match cmd {
        Command::Check { common } => check(&alpha_input(common, r)?, grid, r),
        Command::Reeb { common, pointwise } => reeb_cmd(&alpha_input(common, r)?, *pointwise, grid, r),
        Command::Hamiltonian { common, hamiltonian } => {
            let f = alpha_input(common, r)?;
            r.input("hamiltonian", hamiltonian);
            hamiltonian_cmd(&f, hamiltonian, grid, r)
        }
        Command::Classify { common, point } => {
            let f = alpha_input(common, r)?;
            r.input("points", point);
            classify(&f, point, grid, r)
        }
        Command::Theta { common, pointwise } => theta(&alpha_input(common, r)?, *pointwise, grid, r),
        Command::Jacobi {
            common,
            vector,
            pointwise,
        } => {
            let f = alpha_input(common, r)?;
            if let Some(v) = vector {
                r.input("vector", v);
            }
            jacobi(&f, vector.as_deref(), *pointwise, grid, r)
        }
        Command::Transversality { common, pointwise } => {
            transversality(&alpha_input(common, r)?, *pointwise, grid, r)
        }
        Command::Poissonize { common } => poissonize_cmd(&alpha_input(common, r)?, grid, r),
        Command::Symplectize { common } => symplectize_cmd(&alpha_input(common, r)?, grid, r),
        Command::Contract {
            common,
            vector,
            map_file,
        } => {
            let f = form_input(common, r)?;
            r.input("vector", vector).input("map_file", map_file);
            contract(&f, vector, map_file, grid, r)
        }
        Command::Desing { common, profile } => {
            let f = alpha_input(common, r)?;
            r.input("profile", profile_inputs(profile));
            desing(&f, profile, grid, r)
        }
        Command::Sing {
            common,
            profile,
            t,
            fold,
        } => {
            let f = alpha_input(common, r)?;
            r.input("profile", profile_inputs(profile)).input("t", t).input("fold", fold);
            sing(&f, profile, t, *fold, grid, r)
        }
        Command::Converge {
            common,
            eps,
            kappa,
            csv,
        } => {
            let f = alpha_input(common, r)?;
            r.input("eps", eps).input("kappa", kappa);
            converge(&f, eps, *kappa, csv.as_deref(), grid, r)
        }
        Command::Catalog { action } => catalog_cmd(action, grid, r),
    }
}

fn form_input(c: &Common, r: &mut Report) -> Res<FormInput> {
    let f = load_form_input(c.chart.as_deref(), c.form.as_deref(), c.form_file.as_deref())?;
    r.input("chart", f.chart.as_ref()).input("form", &f.text);
    Ok(f)
}

fn alpha_input(c: &Common, r: &mut Report) -> Res<FormInput> {
    let f = form_input(c, r)?;
    f.one_form()?;
    Ok(f)
}

fn form_doc(form: &BForm) -> serde_json::Value {
    json!({ "chart": form.chart().as_ref(), "form": form })
}

fn check(f: &FormInput, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let rep = is_contact(&f.one_form()?, grid)?;
    r.metric("coeff", &rep.coeff)
        .metric("min_off", rep.min_off)
        .metric("min_on", rep.min_on);
    for w in &rep.witnesses {
        r.witness(w);
    }
    r.verdict(label(rep.verdict), rep.verdict == Verdict::Contact);
    Ok(())
}

fn reeb_cmd(f: &FormInput, pointwise: bool, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let points = grid.all_points(&f.chart);
    let residual = if pointwise {
        PointwiseJacobi::new(&alpha, grid)?.reeb_residual(&points)?
    } else {
        let field = reeb(&alpha, grid)?;
        let s = reeb_residual(&alpha, &field, &points)?;
        r.artifact("reeb", &field).metric("skipped", s.skipped.len());
        if !s.skipped.is_empty() {
            r.metric("residual", s.max).verdict("unevaluable", false);
            return Ok(());
        }
        s.max
    };
    r.metric("residual", residual).metric("points", points.len());
    r.verdict(if residual <= grid.tol { "solved" } else { "residual_too_large" }, residual <= grid.tol);
    Ok(())
}

fn hamiltonian_cmd(f: &FormInput, h: &str, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let h = input::scalar(h, &f.chart)?;
    let x = hamiltonian_field(&alpha, &h, grid)?;
    let residual = hamiltonian_residual(&alpha, &h, &x, grid)?;
    r.artifact("field", &x).metric("residual", residual);
    r.verdict(if residual <= grid.tol { "solved" } else { "residual_too_large" }, residual <= grid.tol);
    Ok(())
}

fn classify(f: &FormInput, points: &[String], grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let mut cases = Vec::new();
    for text in points {
        let p = input::point(text, &f.chart)?;
        let c = classify_point(&alpha, &p, grid)?;
        cases.push(c.case.label());
        r.witness(json!({ "point": p, "case": c.case.label(), "reeb": c.reeb, "u": c.u }));
    }
    r.metric("cases", cases).verdict("classified", true);
    Ok(())
}

fn theta(f: &FormInput, pointwise: bool, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let t = if pointwise {
        theta_form_pointwise(&alpha, grid)?
    } else {
        theta_form(&alpha, grid)?
    };
    r.artifact("theta", &t.theta).artifact("u", &t.u);
    if let Some(reeb) = &t.reeb {
        r.artifact("reeb", reeb);
    }
    r.metric("area_min", t.area_min)
        .metric("sign", t.sign)
        .metric("residual", t.residual)
        .metric("clusters", t.clusters.len());
    for c in &t.clusters {
        r.witness(c);
    }
    let ok = t.nondegenerate(grid.tol) && t.residual <= grid.tol;
    r.verdict(if ok { "nondegenerate" } else { "degenerate" }, ok);
    Ok(())
}

fn jacobi(f: &FormInput, vector: Option<&str>, pointwise: bool, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let v = match (vector, pointwise) {
        (Some(_), true) => return Err(input_err("--vector and --pointwise are exclusive")),
        (Some(x), false) => {
            let x = input::vector(x, &f.chart)?;
            let lj = jacobi_via_liouville(&alpha, &x, grid)?;
            r.artifact("lambda", &lj.pair.lambda)
                .artifact("reeb", &lj.pair.reeb)
                .artifact("pi", &lj.pi)
                .metric("discriminant_max", lj.discriminant_max)
                .metric("lemma_consistent", lj.lemma_consistent);
            lj.pair.verification
        }
        (None, true) => {
            let pw = PointwiseJacobi::new(&alpha, grid)?;
            Some(pw.verify_on(&grid.all_points(&f.chart), 1e-7)?)
        }
        (None, false) => {
            let pair = jacobi_from_contact(&alpha, grid)?;
            r.artifact("lambda", &pair.lambda).artifact("reeb", &pair.reeb);
            pair.verification
        }
    };
    let v = v.ok_or_else(|| Failure::Math("pair was not verified".into()))?;
    r.metric("lambda_lambda", v.lambda_lambda)
        .metric("lambda_reeb", v.lambda_reeb)
        .metric("jacobi_tol", v.tol);
    r.verdict(if v.holds() { "jacobi" } else { "not_jacobi" }, v.holds());
    Ok(())
}

fn transversality(f: &FormInput, pointwise: bool, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let (max_on, grad, min_off, verdict) = if pointwise {
        let t = PointwiseJacobi::new(&alpha, grid)?.transversality(&f.chart, grid)?;
        (t.max_on_z, t.min_gradient_on_z, t.min_off_z, t.verdict)
    } else {
        let pair = jacobi_from_contact(&alpha, grid)?;
        let t = bjacobi_transversality(&pair, grid)?;
        r.artifact("coeff", &t.coeff);
        (t.max_on_z, t.min_gradient_on_z, t.min_off_z, t.verdict)
    };
    r.metric("max_on_z", max_on)
        .metric("min_gradient_on_z", grad)
        .metric("min_off_z", min_off);
    r.verdict(label(verdict), verdict == TransversalityVerdict::Transversal);
    Ok(())
}

fn poissonize_cmd(f: &FormInput, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let pair = jacobi_from_contact(&f.one_form()?, grid)?;
    let p = poissonize(&pair, grid)?;
    r.artifact("chart", p.chart.as_ref())
        .artifact("pi", &p.pi)
        .input("tau", &p.tau)
        .metric("poisson_residual", p.poisson_residual)
        .metric("homogeneity_residual", p.homogeneity_residual)
        .metric("top_power_residual", p.top_power_residual)
        .metric("top_power_binomial_residual", p.top_power_binomial_residual);
    let ok = p.poisson_residual <= grid.tol && p.homogeneity_residual <= grid.tol;
    r.verdict(if ok { "poisson" } else { "not_poisson" }, ok);
    Ok(())
}

fn symplectize_cmd(f: &FormInput, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let s = symplectize(&f.one_form()?, grid)?;
    r.artifact("omega", form_doc(&s.omega))
        .artifact("top_coeff", &s.top_coeff)
        .metric("closed", s.closed)
        .metric("top_min", s.top_min)
        .metric("binomial_residual", s.binomial_residual)
        .metric("factorial_residual", s.factorial_residual)
        .metric("liouville_residual", s.liouville_residual)
        .metric("recovery_residual", s.recovery_residual);
    let ok = s.closed && s.top_min > 0.0 && s.liouville_residual <= grid.tol && s.recovery_residual <= grid.tol;
    r.verdict(if ok { "symplectic" } else { "not_symplectic" }, ok);
    Ok(())
}

fn contract(f: &FormInput, vector: &str, map_file: &std::path::Path, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let omega = f.form()?;
    if omega.degree() != 2 {
        return Err(input_err(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    let x = input::vector(vector, &f.chart)?;
    let map = load_map(map_file, &f.chart)?;
    let c = liouville_contract(&omega, &x, &map, grid)?;
    let o = reeb_orthogonality_check(&omega, &x, &map, grid)?;
    r.artifact("alpha", form_doc(&c.alpha))
        .metric("contact", label(c.contact.verdict))
        .metric("contact_min_off", c.contact.min_off)
        .metric("liouville_residual", c.liouville_residual)
        .metric("transversality_min", c.transversality_min)
        .metric("reeb_orthogonality_residual", o.residual);
    let ok = c.contact.verdict == Verdict::Contact && o.holds;
    r.verdict(if ok { "contact".to_string() } else { label(c.contact.verdict) }, ok);
    Ok(())
}

fn profile_inputs(p: &ProfileArgs) -> serde_json::Value {
    json!({ "kind": p.kind, "k": p.k, "eps": p.eps })
}

fn desing_kind(p: &ProfileArgs, m: u32) -> Res<(ProfileKind, u32)> {
    let kind = match p.kind.as_deref() {
        None if m % 2 == 0 => ProfileKind::DesingEven,
        None => ProfileKind::DesingOdd,
        Some("even") => ProfileKind::DesingEven,
        Some("odd") => ProfileKind::DesingOdd,
        Some(s) => ProfileKind::parse(s)
            .filter(|k| k.is_desing())
            .ok_or_else(|| input_err(format!("unknown desingularization kind `{s}`")))?,
    };
    let k = p.k.unwrap_or(match kind {
        ProfileKind::DesingEven => m / 2,
        _ => m.saturating_sub(1) / 2,
    });
    Ok((kind, k))
}

fn sing_kind(p: &ProfileArgs) -> Res<(ProfileKind, u32)> {
    let kind = match p.kind.as_deref().unwrap_or("even") {
        "even" => ProfileKind::SingEven,
        "odd" => ProfileKind::SingOdd,
        "onesided" => ProfileKind::SingOnesided,
        s => ProfileKind::parse(s)
            .filter(|k| !k.is_desing())
            .ok_or_else(|| input_err(format!("unknown singularization kind `{s}`")))?,
    };
    Ok((kind, p.k.unwrap_or(kind.min_k())))
}

fn desing(f: &FormInput, p: &ProfileArgs, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    let (kind, k) = desing_kind(p, f.chart.order())?;
    let profile = Arc::new(build_profile(kind, k, p.eps)?);
    let d = desingularize(&alpha, &profile, grid)?;
    r.artifact("form", form_doc(&d.form))
        .artifact("profile", &d.profile)
        .metric("order", d.order)
        .metric("convexity", &d.convexity)
        .metric("coincidence_residual", d.coincidence_residual)
        .metric("coincidence_points", d.coincidence_points)
        .metric("identity_residual", d.identity_residual);
    if let Some(c) = &d.contact {
        r.metric("contact_min_off", c.min_off).metric("contact", label(c.verdict));
        for w in &c.witnesses {
            r.witness(w);
        }
        r.verdict(label(c.verdict), c.verdict == Verdict::Contact);
    } else if let Some(fold) = &d.fold {
        r.metric("fold", fold);
        r.verdict(label(fold.verdict), fold.verdict == FoldVerdict::Folded);
    }
    Ok(())
}

fn sing(f: &FormInput, p: &ProfileArgs, t: &str, fold: bool, grid: &GridConfig, r: &mut Report) -> Res<()> {
    let alpha = f.one_form()?;
    if fold {
        let c = folded_from_convex(&alpha, t, p.eps, grid)?;
        r.artifact("form", json!({ "chart": c.fold_chart.as_ref(), "form": &c.form }))
            .metric("desing_eps", c.desing_eps)
            .metric("fold", &c.fold)
            .metric("fold_components", c.fold.components.len())
            .metric("critical_points", &c.sing.located_critical_points);
        let ok = c.fold.verdict == FoldVerdict::Folded;
        r.verdict(label(c.fold.verdict), ok);
        return Ok(());
    }
    let (kind, k) = sing_kind(p)?;
    let profile = Arc::new(build_profile(kind, k, p.eps)?);
    let s = singularize(&alpha, t, &profile, grid)?;
    let comps: Vec<_> = s
        .components
        .iter()
        .map(|c| {
            json!({
                "center": c.center,
                "coordinate": c.coordinate,
                "chart": c.chart.as_ref(),
                "form": &c.form,
                "contact": label(c.contact.verdict),
                "convexity": &c.convexity,
            })
        })
        .collect();
    r.artifact("components", comps)
        .artifact("profile", &s.profile)
        .artifact("u", &s.u)
        .artifact("beta", &s.beta)
        .metric("order", s.order)
        .metric("critical_points", &s.located_critical_points)
        .metric("agreement_threshold", s.agreement_threshold)
        .metric("coincidence_residual", s.coincidence_residual)
        .metric("mirror_residual", s.mirror_residual);
    let ok = s.components.iter().all(|c| c.contact.verdict == Verdict::Contact);
    r.verdict(if ok { "b_contact" } else { "not_contact" }, ok);
    Ok(())
}

fn converge(
    f: &FormInput,
    eps: &[f64],
    kappa: f64,
    csv: Option<&std::path::Path>,
    grid: &GridConfig,
    r: &mut Report,
) -> Res<()> {
    let c = convergence_report(&f.one_form()?, eps, kappa, grid)?;
    if let Some(path) = csv {
        let text = c.to_csv()?;
        std::fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        r.artifact("csv", path);
    }
    r.artifact("rows", &c.rows)
        .metric("slopes", &c.slopes)
        .metric("decreasing", &c.decreasing)
        .metric("far_zero", c.far_zero)
        .metric("far_max", c.far_max)
        .metric("reeb_residual", c.reeb_residual)
        .metric("points", c.points);
    let ok = c.decreasing.iter().all(|&d| d) && c.far_zero;
    r.verdict(if ok { "converging" } else { "not_converging" }, ok);
    Ok(())
}

fn catalog_cmd(action: &CatalogAction, grid: &GridConfig, r: &mut Report) -> Res<()> {
    match action {
        CatalogAction::List { .. } => {
            r.artifact("entries", catalog::list_entries()).verdict("listed", true);
        }
        CatalogAction::Show { name, .. } => {
            r.input("name", name);
            let e = catalog::get(name).map_err(input_err)?;
            r.artifact("entry", e.to_json()).verdict("shown", true);
        }
        CatalogAction::Verify { name, all, .. } => {
            let reports = match (name, all) {
                (Some(_), true) => return Err(input_err("give an entry name or --all, not both")),
                (None, false) => return Err(input_err("give an entry name or --all")),
                (Some(n), false) => {
                    r.input("name", n);
                    vec![catalog::verify_with(n, grid).map_err(input_err)?]
                }
                (None, true) => {
                    r.input("all", true);
                    catalog::verify_all(grid)
                }
            };
            let failed: Vec<&str> = reports.iter().filter(|x| !x.passed).map(|x| x.name.as_str()).collect();
            let checks: usize = reports.iter().map(|x| x.checks.len()).sum();
            r.metric("entries", reports.len()).metric("checks", checks).metric("failed", &failed);
            let ok = failed.is_empty();
            for rep in &reports {
                r.witness(rep);
            }
            r.verdict(if ok { "all_passed" } else { "failures" }, ok);
        }
    }
    Ok(())
}
