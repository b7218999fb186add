//! Poissonization, symplectization and Liouville hypersurfaces.

use std::sync::Arc;

use serde::Serialize;

use super::{sweep_max, JacobiError, JacobiPair};
use crate::chart::Chart;
use crate::contact::{contact_coeff, is_contact, reeb, ContactReport};
use crate::exterior::{BForm, BMultiVector, ChartMap};
use crate::grid::{sweep, GridConfig};
use crate::scalar::ScalarExpr;

/// A coordinate name not used by the chart.
fn fresh(chart: &Chart, base: &str) -> String {
    if chart.index_of(base).is_none() {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}{k}")).find(|n| chart.index_of(n).is_none()).expect("unbounded")
}

fn extend(chart: &Arc<Chart>, base: &str) -> Result<(Arc<Chart>, String), JacobiError> {
    let name = fresh(chart, base);
    let ext = chart
        .extended(&name, (-1.0, 1.0))
        .map_err(|e| JacobiError::Invalid(e.to_string()))?;
    Ok((Arc::new(ext), name))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

#[derive(Clone, Debug, Serialize)]
pub struct PoissonReport {
    pub chart: Arc<Chart>,
    pub tau: String,
    pub pi: BMultiVector,
    /// `max |[Π,Π]|`.
    pub poisson_residual: f64,
    /// `max |L_T Π + Π|` with `T = ∂/∂τ`.
    pub homogeneity_residual: f64,
    /// `max |Π^{n+1} + e^{−(n+1)τ} ∂τ∧Λ^n∧R|`.
    pub top_power_residual: f64,
    /// `max |Π^{n+1} − (n+1) e^{−(n+1)τ} ∂τ∧Λ^n∧R|`.
    pub top_power_binomial_residual: f64,
}

/// `Π = e^{−τ}(Λ + ∂τ∧R)` on the chart extended by `τ ∈ [−1, 1]`.
pub fn poissonize(j: &JacobiPair, cfg: &GridConfig) -> Result<PoissonReport, JacobiError> {
    let (ext, tau) = extend(j.chart(), "tau")?;
    let lam = j.lambda.lift(&ext)?;
    let r = j.reeb.lift(&ext)?;
    let t = BMultiVector::partial(&ext, &tau)?;
    let e = (-ScalarExpr::sym(&tau)).exp();
    let pi = lam.add(&t.wedge(&r)?)?.scale(&e);
    let pts = cfg.all_points(&ext);
    let poisson_residual = sweep_max(&pi.schouten(&pi)?, &pts);
    let homogeneity_residual = sweep_max(&pi.lie_derivative(&t)?.add(&pi)?, &pts);
    let n = (j.chart().dim().saturating_sub(1)) / 2;
    let top = pi.wedge_pow(n + 1)?;
    let en = (&ScalarExpr::int(-(n as i64 + 1)) * &ScalarExpr::sym(&tau)).exp();
    let model = t.wedge(&lam.wedge_pow(n)?)?.wedge(&r)?.scale(&en);
    let top_power_residual = sweep_max(&top.add(&model)?, &pts);
    let binomial = model.scale(&ScalarExpr::int(n as i64 + 1));
    let top_power_binomial_residual = sweep_max(&top.sub(&binomial)?, &pts);
    Ok(PoissonReport {
        chart: ext,
        tau,
        pi,
        poisson_residual,
        homogeneity_residual,
        top_power_residual,
        top_power_binomial_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymplecticReport {
    pub chart: Arc<Chart>,
    pub t: String,
    pub omega: BForm,
    /// `dω = 0` symbolically.
    pub closed: bool,
    /// Top coefficient of `ω^{n+1}`.
    pub top_coeff: ScalarExpr,
    pub top_min: f64,
    /// Relative residual of `ω^{n+1} = ±(n+1) e^{(n+1)t} c(α)` (top coefficients).
    pub binomial_residual: f64,
    /// Relative residual of `ω^{n+1} = ±(n+1)! e^{(n+1)t} c(α)`.
    pub factorial_residual: f64,
    /// `max |L_{∂t} ω − ω|`.
    pub liouville_residual: f64,
    /// `max |ι_{∂t}ω|_{t=0} − α|`.
    pub recovery_residual: f64,
}

/// `ω = d(e^t α)` on the chart extended by `t ∈ [−1, 1]`.
pub fn symplectize(alpha: &BForm, cfg: &GridConfig) -> Result<SymplecticReport, JacobiError> {
    let c = contact_coeff(alpha)?;
    let (ext, t) = extend(alpha.chart(), "t")?;
    let a = alpha.lift(&ext)?;
    let et = ScalarExpr::sym(&t).exp();
    let omega = a.scale(&et).ext_d();
    let closed = omega.ext_d().is_zero();
    let n = (alpha.dim() - 1) / 2;
    let top_coeff = omega.wedge_pow(n + 1)?.top_coeff();
    let pts = cfg.all_points(&ext);
    let top = sweep(&pts, |p| top_coeff.eval(p).ok());
    let scaled = &(&ScalarExpr::int(n as i64 + 1) * &ScalarExpr::sym(&t)).exp() * &c;
    let rel = |k: i64| {
        let model = &scaled * &ScalarExpr::int(k);
        [1, -1]
            .into_iter()
            .map(|s| {
                sweep(&pts, |p| {
                    let m = model.eval(p).ok()?;
                    Some((top_coeff.eval(p).ok()? - s as f64 * m) / m.abs().max(1.0))
                })
                .max
            })
            .fold(f64::INFINITY, f64::min)
    };
    let dt = BMultiVector::partial(&ext, &t)?;
    let liouville_residual = omega.lie_derivative(&dt)?.sub(&omega)?.sweep(&pts).max;
    let zero = ScalarExpr::zero();
    let recovered = omega.interior(&dt)?.substitute(&|n| (n == t).then(|| zero.clone()));
    let recovery_residual = recovered.sub(&a)?.sweep(&pts).max;
    let binomial_residual = rel(n as i64 + 1);
    let factorial_residual = rel(factorial(n + 1));
    Ok(SymplecticReport {
        chart: ext,
        t,
        omega,
        closed,
        top_min: if top.skipped.is_empty() { top.min } else { 0.0 },
        top_coeff,
        binomial_residual,
        factorial_residual,
        liouville_residual,
        recovery_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractReport {
    pub alpha: BForm,
    pub contact: ContactReport,
    pub liouville_residual: f64,
    /// Smallest `|φ*(ι_X ω^{n+1})|` over the hypersurface grid.
    pub transversality_min: f64,
}

fn check_liouville(omega: &BForm, x: &BMultiVector, cfg: &GridConfig) -> Result<f64, JacobiError> {
    let pts = cfg.all_points(omega.chart());
    let s = omega.lie_derivative(x)?.sub(omega)?.sweep(&pts);
    if s.max > cfg.tol || !s.skipped.is_empty() {
        return Err(JacobiError::NotLiouville(s.max));
    }
    Ok(s.max)
}

/// `φ*(ι_X ω)` on a hypersurface transverse to a Liouville field.
pub fn liouville_contract(
    omega: &BForm,
    x: &BMultiVector,
    phi: &ChartMap,
    cfg: &GridConfig,
) -> Result<ContractReport, JacobiError> {
    let liouville_residual = check_liouville(omega, x, cfg)?;
    phi.verify(cfg)?;
    let k = omega.dim() / 2;
    let vol = phi.pullback(&omega.wedge_pow(k)?.interior(x)?)?;
    let c = vol.top_coeff();
    let s = sweep(&cfg.all_points(phi.source()), |p| c.eval(p).ok());
    if s.min < cfg.tol || !s.skipped.is_empty() {
        let at = s.argmin.or_else(|| s.skipped.first().cloned());
        return Err(JacobiError::Tangent(at.map(|p| p.to_string()).unwrap_or_default()));
    }
    let alpha = phi.pullback(&omega.interior(x)?)?;
    let contact = is_contact(&alpha, cfg)?;
    Ok(ContractReport {
        alpha,
        contact,
        liouville_residual,
        transversality_min: s.min,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    /// `max |ι_R φ*ω|` over the hypersurface grid.
    pub residual: f64,
    pub holds: bool,
}

/// Checks that the Reeb field of `φ*(ι_X ω)` lies in the symplectic
/// orthogonal of the hypersurface.
pub fn reeb_orthogonality_check(
    omega: &BForm,
    x: &BMultiVector,
    phi: &ChartMap,
    cfg: &GridConfig,
) -> Result<OrthogonalityReport, JacobiError> {
    let contracted = liouville_contract(omega, x, phi, cfg)?;
    let r = reeb(&contracted.alpha, cfg)?;
    let restricted = phi.pullback(omega)?;
    let residual = restricted.interior(&r)?.sweep(&cfg.all_points(phi.source())).max;
    Ok(OrthogonalityReport {
        residual,
        holds: residual < cfg.tol,
    })
}
