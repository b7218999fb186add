//! Named examples and local models, each bundled with the properties it is
//! expected to have.
//!
//! [`verify`] runs an entry's expectation suite and reports every check;
//! failures of the underlying computation count as failed checks rather than
//! errors.

mod entries;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::chart::Chart;
use crate::contact::{
    classify_point, convexity_classify, is_contact, reeb, reeb_residual, theta_form, theta_form_pointwise, DarbouxCase,
};
use crate::exterior::{parse_form, BForm, BMultiVector, ChartMap};
use crate::grid::{equal_on_points, GridConfig};
use crate::jacobi::{
    bjacobi_transversality, jacobi_from_contact, leaf_classify, reeb_orthogonality_check, JacobiPair, LeafKind,
    PointwiseJacobi, TransversalityVerdict,
};
use crate::scalar::{Point, ScalarExpr};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
}

/// What an entry carries.
#[derive(Clone, Debug)]
pub enum Data {
    Form(BForm),
    Pair(JacobiPair),
}

/// `α = φ*(ι_X ω)` on a hypersurface of a b-symplectic chart.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub omega: BForm,
    pub x: BMultiVector,
    pub map: ChartMap,
}

/// `α = φ*α'` for a form `α'` on the target of `φ`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub map: ChartMap,
    pub form: BForm,
}

#[derive(Clone, Debug)]
pub enum Expectation {
    Contact,
    /// Reeb field equal to the given one, symbolically or on the grid.
    ReebEquals(BMultiVector),
    /// `α(R) = 1` and `ι_R dα = 0` on the grid.
    ReebResidual { tol: f64 },
    PointCase { point: Point, case: DarbouxCase },
    /// `Θ|_Z` nondegenerate with a consistent sign; optionally equal to a
    /// literal on the slice chart and with at least `min_clusters` zero
    /// clusters of `R|_Z`.
    Theta {
        expected: Option<&'static str>,
        min_clusters: usize,
        tol: f64,
    },
    Jacobi { tol: f64 },
    Transversality(TransversalityVerdict),
    DdZero,
    DecomposeRoundTrip,
    Leaf { point: Point, kind: LeafKind },
    FormEquals(BForm),
    ReebOrthogonality { tol: f64 },
    PullbackCommutesWithD { tol: f64 },
    Convexity { convex: bool },
}

impl Expectation {
    pub fn label(&self) -> String {
        match self {
            Expectation::Contact => "contact".into(),
            Expectation::ReebEquals(r) => format!("reeb = {}", r.to_literal()),
            Expectation::ReebResidual { .. } => "reeb residual".into(),
            Expectation::PointCase { point, case } => format!("case {} at {point}", case.label()),
            Expectation::Theta { .. } => "theta".into(),
            Expectation::Jacobi { .. } => "jacobi identities".into(),
            Expectation::Transversality(v) => format!("transversality {v:?}"),
            Expectation::DdZero => "d∘d = 0".into(),
            Expectation::DecomposeRoundTrip => "decompose round trip".into(),
            Expectation::Leaf { point, kind } => format!("leaf {kind:?} at {point}"),
            Expectation::FormEquals(f) => format!("form = {}", f.to_literal()),
            Expectation::ReebOrthogonality { .. } => "reeb orthogonality".into(),
            Expectation::PullbackCommutesWithD { .. } => "pullback commutes with d".into(),
            Expectation::Convexity { convex } => format!("convex = {convex}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// What the entry models and how its coordinates were chosen.
    pub note: &'static str,
    pub data: Data,
    pub expectations: Vec<Expectation>,
    pub contraction: Option<Contraction>,
    pub pullback: Option<Pullback>,
    /// Reeb, Jacobi and `Θ` data are evaluated pointwise: the symbolic
    /// pair of these forms is too large to build.
    pub pointwise: bool,
}

impl CatalogEntry {
    pub fn chart(&self) -> &Arc<Chart> {
        match &self.data {
            Data::Form(f) => f.chart(),
            Data::Pair(j) => j.chart(),
        }
    }

    pub fn form(&self) -> Option<&BForm> {
        match &self.data {
            Data::Form(f) => Some(f),
            Data::Pair(_) => None,
        }
    }

    /// Chart and literal documents.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "name": self.name,
            "note": self.note,
            "chart": self.chart().to_json(),
            "pointwise": self.pointwise,
            "expectations": self.expectations.iter().map(Expectation::label).collect::<Vec<_>>(),
        });
        match &self.data {
            Data::Form(f) => v["form"] = json!(f.to_literal()),
            Data::Pair(j) => {
                v["lambda"] = json!(j.lambda.to_literal());
                v["reeb"] = json!(j.reeb.to_literal());
            }
        }
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub label: String,
    pub passed: bool,
    /// Measured quantity, when the check has one.
    pub value: Option<f64>,
    pub tol: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub name: String,
    pub note: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

type Ctor = fn() -> CatalogEntry;

const ENTRIES: &[(&str, Ctor)] = &[
    ("extended_phase_space_n1", entries::extended_phase_space_n1),
    ("extended_phase_space_n2", entries::extended_phase_space_n2),
    ("singular_reeb_n1", entries::singular_reeb_n1),
    ("singular_reeb_n2", entries::singular_reeb_n2),
    ("mobius_ball_regular", entries::mobius_ball_regular),
    ("mobius_ball_singular", entries::mobius_ball_singular),
    ("s2xs1", entries::s2xs1),
    ("product_singular_reeb_r2", entries::product_singular_reeb_r2),
    ("product_extended_r2", entries::product_extended_r2),
    ("darboux_1a", entries::darboux_1a),
    ("darboux_1b", entries::darboux_1b),
    ("darboux_2", entries::darboux_2),
    ("r4_slice_m1", entries::r4_slice_m1),
    ("r4_slice_m2", entries::r4_slice_m2),
    ("s3", entries::s3),
    ("torus3_m1", entries::torus3_m1),
    ("torus3_m1_second_component", entries::torus3_m1_second_component),
    ("torus3_m2", entries::torus3_m2),
    ("klein_pre_quotient", entries::klein_pre_quotient),
    ("jacobi_model_even", entries::jacobi_model_even),
    ("jacobi_model_odd", entries::jacobi_model_odd),
];

pub fn list_entries() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Result<CatalogEntry, CatalogError> {
    ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

pub fn verify(name: &str) -> Result<CatalogReport, CatalogError> {
    verify_with(name, &GridConfig::default())
}

pub fn verify_with(name: &str, cfg: &GridConfig) -> Result<CatalogReport, CatalogError> {
    Ok(verify_entry(&get(name)?, cfg))
}

/// Every entry, in catalog order.
pub fn verify_all(cfg: &GridConfig) -> Vec<CatalogReport> {
    ENTRIES.par_iter().map(|(_, f)| verify_entry(&f(), cfg)).collect()
}

pub fn verify_entry(entry: &CatalogEntry, cfg: &GridConfig) -> CatalogReport {
    let mut ctx = Ctx {
        entry,
        cfg,
        reeb: None,
        pair: None,
        pointwise: None,
    };
    let checks: Vec<CheckResult> = entry.expectations.iter().map(|e| ctx.check(e)).collect();
    CatalogReport {
        name: entry.name.to_string(),
        note: entry.note.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Lazily computed data shared between checks of one entry.
struct Ctx<'a> {
    entry: &'a CatalogEntry,
    cfg: &'a GridConfig,
    reeb: Option<Result<BMultiVector, String>>,
    pair: Option<Result<JacobiPair, String>>,
    pointwise: Option<Result<PointwiseJacobi, String>>,
}

fn outcome(passed: bool, value: Option<f64>, tol: Option<f64>, detail: String) -> Outcome {
    Ok((passed, value, tol, detail))
}

type Outcome = Result<(bool, Option<f64>, Option<f64>, String), String>;

fn symbolic_zero(coeffs: &[ScalarExpr]) -> bool {
    coeffs.iter().all(|c| c.simplify().is_zero())
}

/// Symbolic equality of coefficients, with a grid fallback for identities
/// the normal form does not see (such as `sin² + cos² = 1`).
fn equal_terms(a: &[(u32, ScalarExpr)], b: &[(u32, ScalarExpr)], points: &[Point], tol: f64) -> (bool, f64, &'static str) {
    let masks: std::collections::BTreeSet<u32> = a.iter().chain(b).map(|(m, _)| *m).collect();
    let get = |v: &[(u32, ScalarExpr)], m: u32| v.iter().find(|(k, _)| *k == m).map(|(_, c)| c.clone()).unwrap_or_else(ScalarExpr::zero);
    let diffs: Vec<ScalarExpr> = masks.iter().map(|&m| &get(a, m) - &get(b, m)).collect();
    if symbolic_zero(&diffs) {
        return (true, 0.0, "symbolic");
    }
    let worst = masks
        .iter()
        .map(|&m| {
            let c = equal_on_points(&get(a, m), &get(b, m), points, tol);
            if c.skipped.is_empty() { c.max_discrepancy } else { f64::INFINITY }
        })
        .fold(0.0, f64::max);
    (worst <= tol, worst, "grid")
}

fn terms<V: crate::exterior::Variance>(g: &crate::exterior::Graded<V>) -> Vec<(u32, ScalarExpr)> {
    g.terms().iter().map(|(m, c)| (*m, c.clone())).collect()
}

impl Ctx<'_> {
    fn form(&self) -> Result<&BForm, String> {
        self.entry.form().ok_or_else(|| "entry carries no form".to_string())
    }

    fn reeb(&mut self) -> Result<BMultiVector, String> {
        if self.reeb.is_none() {
            let r = self.form().and_then(|a| reeb(a, self.cfg).map_err(|e| e.to_string()));
            self.reeb = Some(r);
        }
        self.reeb.clone().expect("set")
    }

    fn pair(&mut self) -> Result<JacobiPair, String> {
        if self.pair.is_none() {
            let p = match &self.entry.data {
                Data::Pair(j) => Ok(j.clone()),
                Data::Form(a) => jacobi_from_contact(a, self.cfg).map_err(|e| e.to_string()),
            };
            self.pair = Some(p);
        }
        self.pair.clone().expect("set")
    }

    fn pointwise(&mut self) -> Result<PointwiseJacobi, String> {
        if self.pointwise.is_none() {
            let p = self.form().and_then(|a| PointwiseJacobi::new(a, self.cfg).map_err(|e| e.to_string()));
            self.pointwise = Some(p);
        }
        self.pointwise.clone().expect("set")
    }

    fn check(&mut self, e: &Expectation) -> CheckResult {
        let label = e.label();
        match self.run(e) {
            Ok((passed, value, tol, detail)) => CheckResult {
                label,
                passed,
                value,
                tol,
                detail,
            },
            Err(detail) => CheckResult {
                label,
                passed: false,
                value: None,
                tol: None,
                detail,
            },
        }
    }

    fn run(&mut self, e: &Expectation) -> Outcome {
        let cfg = self.cfg;
        let err = |e: &dyn std::fmt::Display| e.to_string();
        match e {
            Expectation::Contact => {
                let r = is_contact(self.form()?, cfg).map_err(|e| err(&e))?;
                outcome(r.is_contact(), Some(r.min_on.map_or(r.min_off, |v| v.min(r.min_off))), Some(cfg.tol), format!("{:?}", r.verdict))
            }
            Expectation::ReebEquals(want) => {
                let r = self.reeb()?;
                let pts = cfg.all_points(r.chart());
                let (ok, v, how) = equal_terms(&terms(&r), &terms(want), &pts, cfg.tol);
                outcome(ok, Some(v), Some(cfg.tol), format!("{how}: {}", r.to_literal()))
            }
            Expectation::ReebResidual { tol } if self.entry.pointwise => {
                let pw = self.pointwise()?;
                let v = pw.reeb_residual(&cfg.all_points(self.entry.chart())).map_err(|e| err(&e))?;
                outcome(v < *tol, Some(v), Some(*tol), "pointwise".into())
            }
            Expectation::ReebResidual { tol } => {
                let r = self.reeb()?;
                let a = self.form()?;
                let s = reeb_residual(a, &r, &cfg.all_points(a.chart())).map_err(|e| err(&e))?;
                outcome(s.max < *tol && s.skipped.is_empty(), Some(s.max), Some(*tol), format!("{} points", s.count))
            }
            Expectation::PointCase { point, case } => {
                let c = classify_point(self.form()?, point, cfg).map_err(|e| err(&e))?;
                outcome(c.case == *case, None, None, format!("found {}", c.case.label()))
            }
            Expectation::Theta {
                expected,
                min_clusters,
                tol,
            } => {
                let t = if self.entry.pointwise {
                    theta_form_pointwise(self.form()?, cfg)
                } else {
                    theta_form(self.form()?, cfg)
                }
                .map_err(|e| err(&e))?;
                let mut ok = t.nondegenerate(*tol) && t.residual < *tol && t.clusters.len() >= *min_clusters;
                let mut detail = format!(
                    "Θ = {}, s = {}, area_min = {:.3e}, clusters = {}",
                    t.theta.to_literal(),
                    t.sign,
                    t.area_min,
                    t.clusters.len()
                );
                if let Some(lit) = expected {
                    let want = parse_form(lit, t.theta.chart()).map_err(|e| err(&e))?;
                    let pts = cfg.all_points(t.theta.chart());
                    let (eq, _, how) = equal_terms(&terms(&t.theta), &terms(&want), &pts, *tol);
                    ok &= eq;
                    detail.push_str(&format!(", equals {lit}: {eq} ({how})"));
                }
                outcome(ok, Some(t.residual), Some(*tol), detail)
            }
            Expectation::Jacobi { tol } if self.entry.pointwise => {
                let pw = self.pointwise()?;
                let v = pw.verify_on(&cfg.all_points(self.entry.chart()), *tol).map_err(|e| err(&e))?;
                outcome(
                    v.holds(),
                    Some(v.lambda_lambda.max(v.lambda_reeb)),
                    Some(*tol),
                    format!("pointwise; [Λ,Λ]−2R∧Λ: {:.3e}, [Λ,R]: {:.3e}", v.lambda_lambda, v.lambda_reeb),
                )
            }
            Expectation::Jacobi { tol } => {
                let j = self.pair()?;
                let pts = cfg.all_points(j.chart());
                let v = j.verify_on(&pts, *tol).map_err(|e| err(&e))?;
                outcome(
                    v.holds(),
                    Some(v.lambda_lambda.max(v.lambda_reeb)),
                    Some(*tol),
                    format!("[Λ,Λ]−2R∧Λ: {:.3e}, [Λ,R]: {:.3e}", v.lambda_lambda, v.lambda_reeb),
                )
            }
            Expectation::Transversality(want) if self.entry.pointwise => {
                let pw = self.pointwise()?;
                let t = pw.transversality(self.entry.chart(), cfg).map_err(|e| err(&e))?;
                outcome(
                    t.verdict == *want,
                    Some(t.min_gradient_on_z),
                    Some(1e-6),
                    format!("pointwise; {:?}", t.verdict),
                )
            }
            Expectation::Transversality(want) => {
                let j = self.pair()?;
                let t = bjacobi_transversality(&j, cfg).map_err(|e| err(&e))?;
                outcome(
                    t.verdict == *want,
                    Some(t.min_gradient_on_z),
                    Some(1e-6),
                    format!("{:?}, max on Z {:.3e}", t.verdict, t.max_on_z),
                )
            }
            Expectation::DdZero => {
                let dd = self.form()?.ext_d().ext_d();
                outcome(symbolic_zero(&dd.coefficients()), None, None, "symbolic".into())
            }
            Expectation::DecomposeRoundTrip => {
                let a = self.form()?;
                let (x, y) = a.decompose();
                let back = BForm::reassemble(&x, &y).map_err(|e| err(&e))?;
                let same = &back == a;
                outcome(same, None, None, if same { "structural".into() } else { back.to_literal() })
            }
            Expectation::Leaf { point, kind } => {
                let j = self.pair()?;
                let l = leaf_classify(&j, point, 1e-8).map_err(|e| err(&e))?;
                outcome(l.kind == *kind, Some(l.residual), Some(1e-8), format!("{:?}", l.kind))
            }
            Expectation::FormEquals(want) => {
                let a = self.form()?;
                let pts = cfg.all_points(a.chart());
                let (ok, v, how) = equal_terms(&terms(a), &terms(want), &pts, cfg.tol);
                outcome(ok, Some(v), Some(cfg.tol), format!("{how}: {}", a.to_literal()))
            }
            Expectation::ReebOrthogonality { tol } => {
                let c = self.entry.contraction.as_ref().ok_or("entry has no contraction data")?;
                let r = reeb_orthogonality_check(&c.omega, &c.x, &c.map, &cfg.with_tol(*tol)).map_err(|e| err(&e))?;
                outcome(r.holds, Some(r.residual), Some(*tol), String::new())
            }
            Expectation::PullbackCommutesWithD { tol } => {
                let p = self.entry.pullback.as_ref().ok_or("entry has no pullback data")?;
                let lhs = p.map.pullback(&p.form.ext_d()).map_err(|e| err(&e))?;
                let rhs = p.map.pullback(&p.form).map_err(|e| err(&e))?.ext_d();
                let s = lhs.sub(&rhs).map_err(|e| err(&e))?.sweep(&cfg.all_points(p.map.source()));
                outcome(s.max < *tol && s.skipped.is_empty(), Some(s.max), Some(*tol), String::new())
            }
            Expectation::Convexity { convex } => {
                let c = convexity_classify(self.form()?, cfg).map_err(|e| err(&e))?;
                outcome(c.is_convex() == *convex, None, None, c.label().into())
            }
        }
    }
}
