//! Convexity of the decomposition data and vertically invariant forms.

use serde::Serialize;

use super::ContactError;
use crate::exterior::BForm;
use crate::grid::{sweep, sweep_expr, GridConfig};
use crate::scalar::ScalarExpr;

/// A coefficient that depends on the defining coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct Offender {
    /// `u` or the frame slot name of the `β` component.
    pub name: String,
    /// `∂/∂z` of the coefficient.
    pub derivative: ScalarExpr,
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum ConvexityClass {
    Convex,
    AlmostConvex { u_offender: Offender },
    NotAlmostConvex { offenders: Vec<Offender> },
}

impl ConvexityClass {
    pub fn is_almost_convex(&self) -> bool {
        !matches!(self, ConvexityClass::NotAlmostConvex { .. })
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, ConvexityClass::Convex)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConvexityClass::Convex => "convex",
            ConvexityClass::AlmostConvex { .. } => "almost_convex",
            ConvexityClass::NotAlmostConvex { .. } => "not_almost_convex",
        }
    }
}

/// Decides whether `u` and `β` in `α = uσ + β` are independent of `z`.
pub fn convexity_classify(alpha: &BForm, cfg: &GridConfig) -> Result<ConvexityClass, ContactError> {
    let chart = alpha.chart();
    let z = chart
        .z_name()
        .ok_or_else(|| ContactError::Invalid("convexity needs a singular chart".into()))?;
    let points = cfg.all_points(chart);
    let offender = |name: String, c: &ScalarExpr| -> Option<Offender> {
        let d = c.diff(z);
        if d.is_zero() {
            return None;
        }
        let s = sweep_expr(&d, &points);
        (s.max > cfg.tol || !s.skipped.is_empty()).then_some(Offender {
            name,
            derivative: d,
            max_abs: s.max,
        })
    };
    let (a, b) = alpha.decompose();
    let offenders: Vec<Offender> = b
        .terms()
        .iter()
        .filter_map(|(m, c)| offender(b.slot_name(m.trailing_zeros() as usize), c))
        .collect();
    if !offenders.is_empty() {
        return Ok(ConvexityClass::NotAlmostConvex { offenders });
    }
    Ok(match offender("u".into(), &a.coeff(0)) {
        Some(u_offender) => ConvexityClass::AlmostConvex { u_offender },
        None => ConvexityClass::Convex,
    })
}

/// For a contact form whose `∂/∂t` is a contact vector field, returns the
/// `t`-invariant representative `u dt + β` of `ker α`.
pub fn verticalize(alpha: &BForm, t: &str, cfg: &GridConfig) -> Result<BForm, ContactError> {
    let chart = alpha.chart();
    let i = chart
        .index_of(t)
        .ok_or_else(|| ContactError::Invalid(format!("`{t}` is not a coordinate")))?;
    if chart.z_name() == Some(t) {
        return Err(ContactError::Invalid("the transverse coordinate must be smooth".into()));
    }
    let points = cfg.all_points(chart);
    let dt = alpha.derive_coeffs(chart.slot_of(t).expect("coordinate"));
    let wedge = dt.wedge(alpha)?;
    let s = wedge.sweep(&points);
    if s.max > cfg.tol || !s.skipped.is_empty() {
        return Err(ContactError::NotContactVector(t.to_string(), s.max));
    }
    let (lo, hi) = chart.bound(i);
    let t0 = if lo <= 0.0 && 0.0 <= hi { 0.0 } else { lo };
    let t0e = ScalarExpr::from_f64(t0);
    let out = alpha.substitute(&|n| (n == t).then(|| t0e.clone()));
    let coeffs = out.coefficients();
    let norm = sweep(&points, |p| {
        coeffs.iter().map(|c| c.eval(p).ok().map(f64::abs)).try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
    });
    if coeffs.is_empty() || norm.min < cfg.tol || !norm.skipped.is_empty() {
        let at = norm.argmin.or(norm.skipped.first().cloned()).map(|p| p.to_string()).unwrap_or_default();
        return Err(ContactError::VanishingDivisor(at));
    }
    Ok(out)
}
