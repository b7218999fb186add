//! Contact condition, Reeb and Hamiltonian fields, and the invariants of a
//! b^m-contact form along its critical hypersurface.
//!
//! Every vector field attached to a contact form solves the same linear
//! system: `α(Y) = a` stacked on `ι_Y dα = b`. Writing `dα = Σ_{j<k} A_jk
//! e_j∧e_k` and extending `A` antisymmetrically, the `k`-th component of
//! `ι_Y dα` is `Σ_j A_jk Y^j`. The system is overdetermined by one row and is
//! solved symbolically with grid-checked pivots (see [`crate::linsolve`]).

mod convex;
mod darboux;
#[cfg(test)]
mod tests;

use std::sync::Arc;

use serde::Serialize;

use crate::chart::Chart;
use crate::exterior::{BForm, BMultiVector, ExteriorError};
use crate::grid::{sweep, sweep_expr, GridConfig, Sweep};
use crate::linsolve::{self, SolveError};
use crate::scalar::{Point, ScalarExpr};

pub use convex::{convexity_classify, verticalize, ConvexityClass, Offender};
pub use darboux::{
    classify_point, classify_with, reeb_zero_clusters, theta_form, theta_form_pointwise, zero_clusters_by, DarbouxCase, PointClass, ThetaReport, ZeroCluster,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ContactError {
    #[error("expected a 1-form on an odd-dimensional chart: {0}")]
    Shape(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("linear solve failed: {0}")]
    Solve(#[from] SolveError),
    #[error("point {0} is not on the critical hypersurface")]
    NotOnZ(String),
    #[error("∂/∂{0} is not a contact vector field: residual {1:.3e}")]
    NotContactVector(String, f64),
    #[error("normalizing factor vanishes at {0}")]
    VanishingDivisor(String),
    #[error("{0}")]
    Invalid(String),
}

/// Outcome of the contact test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Contact,
    NotContact,
    ContactAwayFromLocus,
}

/// A labelled sample point with the value observed there.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub label: String,
    pub point: Point,
    pub value: f64,
}

impl Witness {
    pub fn new(label: &str, point: Point, value: f64) -> Witness {
        Witness {
            label: label.to_string(),
            point,
            value,
        }
    }
}

/// Result of [`is_contact`].
#[derive(Clone, Debug, Serialize)]
pub struct ContactReport {
    /// `c` with `α∧(dα)^n = c · e_0∧…∧e_2n` in the chart frame.
    pub coeff: ScalarExpr,
    pub min_off: f64,
    /// `None` on smooth charts.
    pub min_on: Option<f64>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl ContactReport {
    pub fn is_contact(&self) -> bool {
        self.verdict == Verdict::Contact
    }
}

fn check_shape(alpha: &BForm) -> Result<usize, ContactError> {
    let d = alpha.dim();
    if alpha.degree() != 1 || d % 2 == 0 {
        return Err(ContactError::Shape(format!("degree {} on a {d}-dimensional chart", alpha.degree())));
    }
    Ok((d - 1) / 2)
}

/// Top coefficient of `α∧(dα)^n`.
pub fn contact_coeff(alpha: &BForm) -> Result<ScalarExpr, ContactError> {
    let n = check_shape(alpha)?;
    let top = alpha.wedge(&alpha.ext_d().wedge_pow(n)?)?;
    Ok(top.top_coeff())
}

/// Grid test of `α∧(dα)^n ≠ 0` off and on the critical hypersurface.
pub fn is_contact(alpha: &BForm, cfg: &GridConfig) -> Result<ContactReport, ContactError> {
    let coeff = contact_coeff(alpha)?;
    let chart = alpha.chart();
    let off = sweep_expr(&coeff, &cfg.off_points(chart));
    let on = chart.is_singular().then(|| sweep_expr(&coeff, &cfg.on_points(chart)));
    let mut witnesses = Vec::new();
    let mut push = |label: &str, s: &Sweep| {
        if let Some(p) = &s.argmin {
            witnesses.push(Witness::new(label, p.clone(), s.min));
        }
        for p in s.skipped.iter().take(3) {
            witnesses.push(Witness::new("undefined", p.clone(), f64::NAN));
        }
    };
    push("argmin_off", &off);
    if let Some(on) = &on {
        push("argmin_on", on);
    }
    let all = on.clone().map_or(off.clone(), |on| off.clone().merge(on));
    let verdict = if coeff.is_zero() || (all.skipped.is_empty() && all.max < cfg.tol) {
        Verdict::NotContact
    } else if all.skipped.is_empty() && all.min >= cfg.tol {
        Verdict::Contact
    } else {
        Verdict::ContactAwayFromLocus
    };
    Ok(ContactReport {
        coeff,
        min_off: off.min,
        min_on: on.map(|s| s.min),
        verdict,
        witnesses,
    })
}

/// The linear system `[α; A^T] Y = b` shared by every contact vector field.
#[derive(Clone, Debug)]
pub struct ContactSystem {
    chart: Arc<Chart>,
    alpha: BForm,
    d_alpha: BForm,
    matrix: Vec<Vec<ScalarExpr>>,
    points: Vec<Point>,
    tol: f64,
}

impl ContactSystem {
    pub fn new(alpha: &BForm, cfg: &GridConfig) -> Result<ContactSystem, ContactError> {
        check_shape(alpha)?;
        let chart = alpha.chart().clone();
        let d = chart.dim();
        let d_alpha = alpha.ext_d();
        let mut matrix = vec![(0..d).map(|j| alpha.component(j)).collect::<Vec<_>>()];
        for k in 0..d {
            matrix.push((0..d).map(|j| two_form_entry(&d_alpha, j, k)).collect());
        }
        Ok(ContactSystem {
            points: cfg.all_points(&chart),
            chart,
            alpha: alpha.clone(),
            d_alpha,
            matrix,
            tol: cfg.tol,
        })
    }

    /// The same system with the normalization row `α(Y)` replaced by
    /// `γ(Y)`.
    pub fn with_normalization(alpha: &BForm, gamma: &BForm, cfg: &GridConfig) -> Result<ContactSystem, ContactError> {
        let mut sys = ContactSystem::new(alpha, cfg)?;
        gamma.same_chart(alpha)?;
        sys.matrix[0] = (0..alpha.dim()).map(|j| gamma.component(j)).collect();
        Ok(sys)
    }

    pub fn alpha(&self) -> &BForm {
        &self.alpha
    }

    pub fn d_alpha(&self) -> &BForm {
        &self.d_alpha
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn matrix(&self) -> &[Vec<ScalarExpr>] {
        &self.matrix
    }

    /// Right-hand side `(a, b)` for `α(Y) = a`, `ι_Y dα = b`.
    pub fn rhs(&self, a: ScalarExpr, b: &BForm) -> Vec<ScalarExpr> {
        std::iter::once(a).chain((0..self.chart.dim()).map(|k| b.component(k))).collect()
    }

    /// Solves for several right-hand sides at once.
    pub fn solve(&self, rhs: &[Vec<ScalarExpr>]) -> Result<Vec<BMultiVector>, ContactError> {
        let sol = linsolve::solve(&self.matrix, rhs, &self.points, self.tol)?;
        for p in &sol.weak_pivots {
            for b in rhs {
                let (_, r) = linsolve::solve_at(&self.matrix, b, p)?;
                if r > self.tol {
                    return Err(SolveError::SingularAt(p.to_string()).into());
                }
            }
        }
        Ok(sol.x.iter().map(|x| BMultiVector::vector(&self.chart, x)).collect())
    }

    /// Pointwise numeric solve, with residual.
    pub fn solve_at(&self, rhs: &[ScalarExpr], p: &Point) -> Result<(Vec<f64>, f64), ContactError> {
        Ok(linsolve::solve_at(&self.matrix, rhs, p)?)
    }

    pub fn reeb(&self) -> Result<BMultiVector, ContactError> {
        let rhs = self.rhs(ScalarExpr::one(), &BForm::zero(&self.chart, 1));
        Ok(self.solve(&[rhs])?.remove(0))
    }
}

/// `dα(e_j, e_k)`.
fn two_form_entry(w: &BForm, j: usize, k: usize) -> ScalarExpr {
    if j == k {
        ScalarExpr::zero()
    } else {
        w.coeff_of(&[j, k])
    }
}

/// Reeb field: `ι_R dα = 0`, `α(R) = 1`.
pub fn reeb(alpha: &BForm, cfg: &GridConfig) -> Result<BMultiVector, ContactError> {
    ContactSystem::new(alpha, cfg)?.reeb()
}

/// Reeb field at one point by a numeric solve.
pub fn reeb_at(alpha: &BForm, p: &Point) -> Result<Vec<f64>, ContactError> {
    let sys = ContactSystem::new(alpha, &GridConfig { off_z: 0, on_z: 0, ..GridConfig::default() })?;
    let rhs = sys.rhs(ScalarExpr::one(), &BForm::zero(alpha.chart(), 1));
    let (x, r) = sys.solve_at(&rhs, p)?;
    if r > 1e-8 {
        return Err(SolveError::SingularAt(p.to_string()).into());
    }
    Ok(x)
}

/// Largest of `|ι_R dα|` and `|α(R) − 1|` over the points.
pub fn reeb_residual(alpha: &BForm, r: &BMultiVector, points: &[Point]) -> Result<Sweep, ContactError> {
    let a = &alpha.pair(r)? - &ScalarExpr::one();
    let mut es = alpha.ext_d().interior(r)?.coefficients();
    es.push(a);
    Ok(crate::grid::sweep_exprs(&es, points))
}

/// Contact Hamiltonian field: `ι_X α = H`, `ι_X dα = −dH + R(H) α`.
pub fn hamiltonian_field(alpha: &BForm, h: &ScalarExpr, cfg: &GridConfig) -> Result<BMultiVector, ContactError> {
    let sys = ContactSystem::new(alpha, cfg)?;
    let r = sys.reeb()?;
    let b = hamiltonian_rhs(alpha, &r, h)?;
    Ok(sys.solve(&[sys.rhs(h.clone(), &b)])?.remove(0))
}

pub(crate) fn hamiltonian_rhs(alpha: &BForm, r: &BMultiVector, h: &ScalarExpr) -> Result<BForm, ContactError> {
    let dh = BForm::d_scalar(alpha.chart(), h);
    Ok(alpha.scale(&r.apply(h)).sub(&dh)?)
}

/// Largest residual of the Hamiltonian equations over the points.
pub fn hamiltonian_residual(alpha: &BForm, h: &ScalarExpr, x: &BMultiVector, cfg: &GridConfig) -> Result<f64, ContactError> {
    let r = reeb(alpha, cfg)?;
    let b = hamiltonian_rhs(alpha, &r, h)?;
    let lhs = alpha.ext_d().interior(x)?.sub(&b)?;
    let a = &alpha.pair(x)? - h;
    let mut es = lhs.coefficients();
    es.push(a);
    let pts = cfg.all_points(alpha.chart());
    Ok(sweep(&pts, |p| {
        es.iter().map(|e| e.eval(p).ok().map(f64::abs)).try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
    })
    .max)
}
