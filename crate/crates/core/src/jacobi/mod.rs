//! Jacobi structures of b-contact forms.
//!
//! A pair `(Λ, R)` is Jacobi when `[Λ,Λ] = 2R∧Λ` and `[Λ,R] = 0`, brackets
//! in Lichnerowicz's convention (see
//! [`BMultiVector::schouten_lichnerowicz`]). For a
//! contact form, `R` is the Reeb field and `Λ^#(γ) = Y_γ` with `α(Y_γ) = 0`
//! and `ι_{Y_γ} dα = −(γ − γ(R)α)`, so that `X_H = Λ^#(dH) + H R`.

mod pointwise;
mod symplectic;
#[cfg(test)]
mod tests;

use std::sync::Arc;

use serde::Serialize;

use crate::chart::Chart;
use crate::contact::{ContactError, ContactSystem};
use crate::exterior::{BForm, BMultiVector, ExteriorError};
use crate::grid::{sweep, sweep_exprs, GridConfig};
use crate::linsolve::least_squares;
use crate::scalar::{Point, ScalarExpr};

pub use pointwise::{
    schouten_at, schouten_lichnerowicz_at, Jet1, NumMultiVector, PointJacobi, PointwiseJacobi, PointwiseTransversality,
};
pub use symplectic::{
    liouville_contract, poissonize, reeb_orthogonality_check, symplectize, ContractReport, OrthogonalityReport,
    PoissonReport, SymplecticReport,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum JacobiError {
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("vector field is not Liouville: residual {0:.3e}")]
    NotLiouville(f64),
    #[error("vector field is tangent to the hypersurface near {0}")]
    Tangent(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::linsolve::SolveError> for JacobiError {
    fn from(e: crate::linsolve::SolveError) -> Self {
        JacobiError::Contact(e.into())
    }
}

/// Grid residuals of the two Jacobi identities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Verification {
    /// `max |[Λ,Λ] − 2R∧Λ|`.
    pub lambda_lambda: f64,
    /// `max |[Λ,R]|`.
    pub lambda_reeb: f64,
    pub tol: f64,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.lambda_lambda < self.tol && self.lambda_reeb < self.tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiPair {
    pub lambda: BMultiVector,
    pub reeb: BMultiVector,
    pub verification: Option<Verification>,
}

impl JacobiPair {
    pub fn new(lambda: BMultiVector, reeb: BMultiVector) -> Result<JacobiPair, JacobiError> {
        lambda.same_chart(&reeb)?;
        if lambda.degree() != 2 || reeb.degree() != 1 {
            return Err(JacobiError::Invalid("expected a bivector and a vector field".into()));
        }
        Ok(JacobiPair {
            lambda,
            reeb,
            verification: None,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.lambda.chart()
    }

    /// `[Λ,Λ] − 2R∧Λ` and `[Λ,R]`.
    pub fn defects(&self) -> Result<(BMultiVector, BMultiVector), JacobiError> {
        let ll = self.lambda.schouten_lichnerowicz(&self.lambda)?;
        let rl = self.reeb.wedge(&self.lambda)?.scale(&ScalarExpr::int(2));
        let lr = self.lambda.schouten(&self.reeb)?;
        Ok((ll.sub(&rl)?, lr))
    }

    /// Evaluates the identities on the points.
    pub fn verify_on(&self, points: &[Point], tol: f64) -> Result<Verification, JacobiError> {
        let (a, b) = self.defects()?;
        Ok(Verification {
            lambda_lambda: sweep_max(&a, points),
            lambda_reeb: sweep_max(&b, points),
            tol,
        })
    }

    /// Populates the verification record on the configured grid.
    pub fn verified(mut self, cfg: &GridConfig, tol: f64) -> Result<JacobiPair, JacobiError> {
        let pts = cfg.all_points(self.chart());
        self.verification = Some(self.verify_on(&pts, tol)?);
        Ok(self)
    }

    /// `Λ^#(γ) = Λ(γ, ·)`.
    pub fn sharp(&self, gamma: &BForm) -> Result<BMultiVector, JacobiError> {
        Ok(self.lambda.contract_form(gamma)?)
    }
}

/// Largest coefficient of a multivector over the points; undefined
/// evaluations count as infinite.
pub(crate) fn sweep_max(g: &BMultiVector, points: &[Point]) -> f64 {
    let s = sweep_exprs(&g.coefficients(), points);
    if s.skipped.is_empty() {
        s.max
    } else {
        f64::INFINITY
    }
}

/// Bivector with `Λ(e^j, e^k) = Y_j^k`.
fn bivector_from_columns(chart: &Arc<Chart>, ys: &[BMultiVector]) -> BMultiVector {
    let d = chart.dim();
    let mut terms = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            terms.push(((1u32 << j) | (1u32 << k), ys[j].component(k)));
        }
    }
    BMultiVector::from_terms(chart, 2, terms)
}

/// Solves `γ0(Y) = 0`, `ι_Y dα = −(e^j − R^j γ0)` for every frame covector.
fn dual_columns(sys: &ContactSystem, gamma0: &BForm, r: &BMultiVector) -> Result<Vec<BMultiVector>, JacobiError> {
    let chart = gamma0.chart();
    let rhs: Vec<Vec<ScalarExpr>> = (0..chart.dim())
        .map(|j| {
            let e = BForm::basis(chart, &[j]);
            let b = gamma0.scale(&r.component(j)).sub(&e)?;
            Ok(sys.rhs(ScalarExpr::zero(), &b))
        })
        .collect::<Result<_, ExteriorError>>()?;
    Ok(sys.solve(&rhs)?)
}

/// The Jacobi pair of a contact form, verified on the grid at `1e-7`.
pub fn jacobi_from_contact(alpha: &BForm, cfg: &GridConfig) -> Result<JacobiPair, JacobiError> {
    let sys = ContactSystem::new(alpha, cfg)?;
    let r = sys.reeb()?;
    let ys = dual_columns(&sys, alpha, &r)?;
    let lambda = bivector_from_columns(alpha.chart(), &ys);
    JacobiPair::new(lambda, r)?.verified(cfg, 1e-7)
}

/// `Λ = Π + R∧X` together with the discriminant `R∧[X,R]∧X`.
#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleJacobi {
    pub pair: JacobiPair,
    pub pi: BMultiVector,
    pub liouville_field: BMultiVector,
    pub discriminant: BMultiVector,
    /// Largest `|R∧[X,R]∧X|` on the grid and where it occurs.
    pub discriminant_max: f64,
    pub discriminant_argmax: Option<Point>,
    /// Whether "discriminant ≡ 0" and "identities hold" agree on the grid.
    pub lemma_consistent: bool,
}

/// Builds `Λ = Π + R∧X` from a Liouville field of `dα`. `Π` is dual to `dα`
/// on `ker γ0`, `γ0 = α − ι_X dα`.
pub fn jacobi_via_liouville(alpha: &BForm, x: &BMultiVector, cfg: &GridConfig) -> Result<LiouvilleJacobi, JacobiError> {
    let da = alpha.ext_d();
    let defect = da.lie_derivative(x)?.sub(&da)?;
    let pts = cfg.all_points(alpha.chart());
    let s = defect.sweep(&pts);
    if s.max > cfg.tol || !s.skipped.is_empty() {
        return Err(JacobiError::NotLiouville(s.max));
    }
    let pi = dual_bivector(alpha, x, cfg)?;
    assemble_via_dual(alpha, &pi, x, cfg)
}

/// `Π` dual to `dα` relative to the Liouville field `x`.
pub fn dual_bivector(alpha: &BForm, x: &BMultiVector, cfg: &GridConfig) -> Result<BMultiVector, JacobiError> {
    let gamma0 = alpha.sub(&alpha.ext_d().interior(x)?)?;
    let r = ContactSystem::new(alpha, cfg)?.reeb()?;
    let sys = ContactSystem::with_normalization(alpha, &gamma0, cfg)?;
    let ys = dual_columns(&sys, &gamma0, &r)?;
    Ok(bivector_from_columns(alpha.chart(), &ys))
}

/// `Π + R∧X` for arbitrary `Π`, `X`; used to exhibit the failure of the
/// identities when the discriminant is nonzero.
pub fn assemble_via_dual(
    alpha: &BForm,
    pi: &BMultiVector,
    x: &BMultiVector,
    cfg: &GridConfig,
) -> Result<LiouvilleJacobi, JacobiError> {
    let r = ContactSystem::new(alpha, cfg)?.reeb()?;
    let lambda = pi.add(&r.wedge(x)?)?;
    let pair = JacobiPair::new(lambda, r.clone())?.verified(cfg, 1e-7)?;
    let disc = r.wedge(&x.lie_bracket(&r)?)?.wedge(x)?;
    let pts = cfg.all_points(alpha.chart());
    let s = sweep_exprs(&disc.coefficients(), &pts);
    let disc_zero = s.max < cfg.tol.max(1e-7);
    let holds = pair.verification.map_or(false, |v| v.holds());
    Ok(LiouvilleJacobi {
        pair,
        pi: pi.clone(),
        liouville_field: x.clone(),
        discriminant: disc,
        discriminant_max: s.max,
        discriminant_argmax: s.argmax,
        lemma_consistent: disc_zero == holds,
    })
}

/// Outcome of the b-Jacobi transversality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransversalityVerdict {
    Transversal,
    NotTransversal,
    NoCriticalSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    /// Top coefficient of `Λ^n∧R` (odd dimension) or `Λ^n` (even) in the
    /// coordinate frame.
    pub coeff: ScalarExpr,
    pub max_on_z: f64,
    pub min_gradient_on_z: f64,
    pub min_off_z: f64,
    pub verdict: TransversalityVerdict,
}

/// Decides whether the top multivector of the pair cuts the zero section
/// transversally, with gradient threshold `1e-6`.
pub fn bjacobi_transversality(j: &JacobiPair, cfg: &GridConfig) -> Result<TransversalityReport, JacobiError> {
    let chart = j.chart();
    let d = chart.dim();
    let n = d / 2;
    let mut top = j.lambda.wedge_pow(n)?;
    if d % 2 == 1 {
        top = top.wedge(&j.reeb)?;
    }
    let smooth = top.to_smooth_frame();
    let coeff = smooth.top_coeff();
    let off = sweep(&cfg.off_points(chart), |p| coeff.eval(p).ok());
    let Some(z) = chart.z_name() else {
        let verdict = if off.min > cfg.tol && off.skipped.is_empty() {
            TransversalityVerdict::NoCriticalSet
        } else {
            TransversalityVerdict::NotTransversal
        };
        return Ok(TransversalityReport {
            coeff,
            max_on_z: 0.0,
            min_gradient_on_z: 0.0,
            min_off_z: off.min,
            verdict,
        });
    };
    let on_pts = cfg.on_points(chart);
    let on = sweep(&on_pts, |p| coeff.eval(p).ok());
    let grad = coeff.diff(z);
    let g = sweep(&on_pts, |p| grad.eval(p).ok());
    let vanishes = on.max <= cfg.tol && on.skipped.is_empty();
    let nonzero_off = off.min > 0.0 && off.skipped.is_empty();
    let verdict = if !vanishes && nonzero_off {
        TransversalityVerdict::NoCriticalSet
    } else if vanishes && nonzero_off && g.min >= 1e-6 && g.skipped.is_empty() {
        TransversalityVerdict::Transversal
    } else {
        TransversalityVerdict::NotTransversal
    };
    Ok(TransversalityReport {
        coeff,
        max_on_z: on.max,
        min_gradient_on_z: g.min,
        min_off_z: off.min,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LeafKind {
    /// Odd-dimensional leaf: `R ∉ Im Λ^#`.
    ContactLeaf,
    /// Even-dimensional leaf: `R ∈ Im Λ^#`.
    LcsLeaf,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafClass {
    pub kind: LeafKind,
    /// Least-squares residual of `Λ^#(γ) = R` at the point.
    pub residual: f64,
}

/// Decides `R ∈ Im Λ^#` at `p` by least squares in the coordinate frame.
pub fn leaf_classify(j: &JacobiPair, p: &Point, tol: f64) -> Result<LeafClass, JacobiError> {
    let lam = j.lambda.to_smooth_frame();
    let r = j.reeb.to_smooth_frame();
    let d = lam.dim();
    let eval = |e: ScalarExpr| e.eval(p).map_err(ExteriorError::from);
    let mut a = nalgebra::DMatrix::zeros(d, d);
    for jj in 0..d {
        for k in 0..d {
            if jj != k {
                // column γ_j, row k: Λ^#(e^j)^k = Λ(e^j, e^k)
                a[(k, jj)] = eval(lam.coeff_of(&[jj, k]))?;
            }
        }
    }
    let b = nalgebra::DVector::from_iterator(d, (0..d).map(|k| eval(r.component(k))).collect::<Result<Vec<_>, _>>()?);
    let (_, residual) = least_squares(&a, &b).ok_or_else(|| JacobiError::Invalid("least squares failed".into()))?;
    let kind = if residual > tol { LeafKind::ContactLeaf } else { LeafKind::LcsLeaf };
    Ok(LeafClass { kind, residual })
}

