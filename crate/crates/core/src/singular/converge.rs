//! Convergence of the desingularized Jacobi pair as `ε → 0`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::profile::{build_profile, ProfileKind};
use super::{desingularize, SingularError};
use crate::chart::{halton_point, Chart};
use crate::exterior::BMultiVector;
use crate::grid::GridConfig;
use crate::jacobi::jacobi_from_contact;
use crate::scalar::{Point, ScalarExpr};
use crate::exterior::BForm;

/// Profile derivatives are evaluated in floating point, so coinciding
/// coefficients agree to rounding rather than bit for bit.
pub const FAR_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    /// Order of the `z`-derivative.
    pub j: u32,
    /// Sup of the coefficient differences on `|z| >= κ`.
    pub far: f64,
    /// Sup over the whole box, in the smooth frame.
    pub full: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub k: u32,
    pub kappa: f64,
    /// Strictly decreasing.
    pub eps: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope of the full-box discrepancy against `ε`, per `j`.
    pub slopes: Vec<f64>,
    /// Whether the full-box discrepancy strictly decreases, per `j`.
    pub decreasing: Vec<bool>,
    /// Whether every discrepancy on `|z| >= κ` is at rounding level
    /// ([`FAR_ZERO_TOL`]) for `ε < κ/2`.
    pub far_zero: bool,
    pub far_max: f64,
    /// `max |R_ε^z − g/f_ε'(z)|` over all `ε`, with `g` the `ζ` coefficient
    /// of `R_α`.
    pub reeb_residual: f64,
    pub points: usize,
}

impl ConvergenceReport {
    pub fn row(&self, eps: f64, j: u32) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.eps == eps && r.j == j)
    }

    /// Columns `eps, j, sup_diff`, using the full-box sup.
    pub fn to_csv(&self) -> Result<String, SingularError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| SingularError::Invalid(e.to_string());
        w.write_record(["eps", "j", "sup_diff"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([r.eps.to_string(), r.j.to_string(), format!("{:e}", r.full)])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| SingularError::Invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| SingularError::Invalid(e.to_string()))
    }
}

fn sample_points(chart: &Chart, z: usize, eps: &[f64], seed: u64) -> Vec<Point> {
    let (lo, hi) = chart.bound(z);
    let mut zs: Vec<f64> = (0..=400).map(|i| lo + (hi - lo) * i as f64 / 400.0).collect();
    for &e in eps {
        zs.extend((0..=100).map(|i| -2.0 * e + 4.0 * e * i as f64 / 100.0).filter(|v| *v >= lo && *v <= hi));
    }
    let d = chart.dim();
    let others: Vec<Vec<f64>> = (0..8).map(|i| halton_point(i + 1, d, seed)).collect();
    let mut out = Vec::with_capacity(zs.len() * others.len());
    for &zv in &zs {
        for h in &others {
            let vals = (0..d)
                .map(|i| {
                    if i == z {
                        zv
                    } else {
                        let (a, b) = chart.bound(i);
                        a + (b - a) * h[i]
                    }
                })
                .collect();
            out.push(chart.point(vals));
        }
    }
    out
}

fn sup_diff(diff: &BMultiVector, z: &str, j: usize, pts: &[Point]) -> Result<f64, SingularError> {
    let coeffs: Vec<ScalarExpr> = diff.coefficients().iter().map(|c| c.diff_n(z, j)).collect();
    let mut best = 0.0_f64;
    for p in pts {
        for c in &coeffs {
            let v = c
                .eval(p)
                .map_err(|e| SingularError::Invalid(format!("discrepancy at {p}: {e}")))?;
            best = best.max(v.abs());
        }
    }
    Ok(best)
}

/// Tabulates `C^j` discrepancies, `j = 0..2k−1`, between the Jacobi pair of
/// the desingularization `α_ε` and that of `α`, for each `ε`.
pub fn convergence_report(alpha: &BForm, eps: &[f64], kappa: f64, cfg: &GridConfig) -> Result<ConvergenceReport, SingularError> {
    let chart = alpha.chart();
    let m = chart.order();
    if m == 0 || m % 2 != 0 {
        return Err(SingularError::Parity {
            profile: "desing-even".into(),
            order: m,
        });
    }
    let k = m / 2;
    let mut list = eps.to_vec();
    list.sort_by(|a, b| b.partial_cmp(a).expect("finite ε"));
    if list.windows(2).any(|w| w[0] == w[1]) || list.iter().any(|e| !(*e > 0.0)) {
        return Err(SingularError::Invalid("ε-list must be positive and distinct".into()));
    }
    let z = chart.z_name().expect("singular chart").to_string();
    let zi = chart.index_of(&z).expect("z");
    let smooth = Arc::new(chart.as_smooth());
    let reference = jacobi_from_contact(alpha, cfg)?;
    let lambda0 = reference.lambda.to_smooth_frame().on_chart(&smooth)?;
    let reeb0 = reference.reeb.to_smooth_frame().on_chart(&smooth)?;
    let g = reference.reeb.coeff(1);
    let pts = sample_points(&smooth, zi, &list, cfg.seed);
    let far: Vec<Point> = pts
        .iter()
        .filter(|p| p.get(&z).is_some_and(|v| v.abs() >= kappa))
        .cloned()
        .collect();

    let per_eps = list
        .par_iter()
        .map(|&e| -> Result<(Vec<ConvergenceRow>, f64), SingularError> {
            let profile = Arc::new(build_profile(ProfileKind::DesingEven, k, e)?);
            let rep = desingularize(alpha, &profile, cfg)?;
            let pair = jacobi_from_contact(&rep.form, cfg)?;
            let lam = pair.lambda.on_chart(&smooth)?;
            let reeb = pair.reeb.on_chart(&smooth)?;
            let dl = lam.sub(&lambda0)?;
            let dr = reeb.sub(&reeb0)?;
            let mut rows = Vec::new();
            for j in 0..(2 * k) as usize {
                let full = sup_diff(&dl, &z, j, &pts)?.max(sup_diff(&dr, &z, j, &pts)?);
                let farv = sup_diff(&dl, &z, j, &far)?.max(sup_diff(&dr, &z, j, &far)?);
                rows.push(ConvergenceRow {
                    eps: e,
                    j: j as u32,
                    far: farv,
                    full,
                });
            }
            let rz = reeb.coeff(1 << zi);
            let mut res = 0.0_f64;
            for p in &pts {
                let zv = p.get(&z).expect("z");
                let (Ok(a), Ok(gv), Ok(fp)) = (rz.eval(p), g.eval(p), profile.deriv(zv)) else {
                    return Err(SingularError::Invalid(format!("Reeb closed form at {p}")));
                };
                res = res.max((a - gv / fp).abs());
            }
            Ok((rows, res))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    let mut reeb_residual = 0.0_f64;
    for (r, res) in per_eps {
        rows.extend(r);
        reeb_residual = reeb_residual.max(res);
    }
    let mut slopes = Vec::new();
    let mut decreasing = Vec::new();
    for j in 0..2 * k {
        let col: Vec<(f64, f64)> = rows.iter().filter(|r| r.j == j).map(|r| (r.eps, r.full)).collect();
        decreasing.push(col.windows(2).all(|w| w[1].1 < w[0].1));
        slopes.push(loglog_slope(&col));
    }
    let far_max = rows
        .iter()
        .filter(|r| r.eps < kappa / 2.0)
        .map(|r| r.far)
        .fold(0.0, f64::max);
    let far_zero = far_max <= FAR_ZERO_TOL;
    Ok(ConvergenceReport {
        k,
        kappa,
        eps: list,
        rows,
        slopes,
        decreasing,
        far_zero,
        far_max,
        reeb_residual,
        points: pts.len(),
    })
}

fn loglog_slope(col: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = col
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
