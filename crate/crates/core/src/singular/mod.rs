//! Deformations between smooth, folded and b^m contact forms.
//!
//! [`desingularize`] replaces `σ = dz/z^m` by `df_ε` for a profile `f_ε`,
//! producing a smooth contact form (even `m`) or a folded one (odd `m`).
//! [`singularize`] goes the other way on a vertically invariant contact
//! form `u dt + β`, replacing `dt` by `ds_ε`.

mod converge;
mod fold;
pub mod jet;
mod profile;

#[cfg(test)]
mod tests;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::chart::Chart;
use crate::contact::{contact_coeff, convexity_classify, is_contact, ContactError, ContactReport, ConvexityClass, Verdict};
use crate::exterior::{BForm, ExteriorError};
use crate::grid::{sweep, GridConfig};
use crate::jacobi::JacobiError;
use crate::scalar::{Point, ScalarExpr};

pub use converge::{convergence_report, ConvergenceReport, ConvergenceRow, FAR_ZERO_TOL};
pub use fold::{folded_check, folded_check_with, folded_from_convex, CorollaryReport, FoldComponent, FoldReport, FoldVerdict};
pub use profile::{build_profile, verify_profile, Join, Parity, Piece, ProfileFn, ProfileKind, Weighted};

#[derive(Debug, Error)]
pub enum SingularError {
    #[error("{kind} profile: {clause}")]
    Invariant { kind: String, clause: String },
    #[error("profile {profile} does not match order {order}")]
    Parity { profile: String, order: u32 },
    #[error("form is not almost convex: {0}")]
    NotAlmostConvex(String),
    #[error("form is not vertically invariant in `{0}`: residual {1:.3e}")]
    NotVerticallyInvariant(String, f64),
    #[error("input is not contact: {0}")]
    NotContact(String),
    #[error("{0}")]
    Dimension(String),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::chart::ChartError> for SingularError {
    fn from(e: crate::chart::ChartError) -> Self {
        SingularError::Invalid(e.to_string())
    }
}

/// Result of [`desingularize`].
#[derive(Clone, Debug, Serialize)]
pub struct DesingReport {
    pub profile: Arc<ProfileFn>,
    pub order: u32,
    /// `α_ε` on the smooth chart.
    pub form: BForm,
    pub convexity: ConvexityClass,
    /// Even orders.
    pub contact: Option<ContactReport>,
    /// Odd orders.
    pub fold: Option<FoldReport>,
    /// Largest coefficient difference to `α` where `|z| > 2ε`.
    pub coincidence_residual: f64,
    pub coincidence_points: usize,
    /// Relative residual of `α_ε∧(dα_ε)^n = f_ε'(z) z^m α∧(dα)^n`.
    pub identity_residual: f64,
}

/// `u σ + β ↦ u f_ε'(z) dz + β` for an almost convex b^m form.
pub fn desingularize(alpha: &BForm, profile: &Arc<ProfileFn>, cfg: &GridConfig) -> Result<DesingReport, SingularError> {
    let chart = alpha.chart();
    let m = chart.order();
    let z = chart
        .z_name()
        .ok_or_else(|| SingularError::Invalid("desingularization needs a singular chart".into()))?
        .to_string();
    if !profile.kind.is_desing() || profile.order() != m {
        return Err(SingularError::Parity {
            profile: profile.name.clone(),
            order: m,
        });
    }
    let convexity = convexity_classify(alpha, cfg)?;
    if let ConvexityClass::NotAlmostConvex { offenders } = &convexity {
        let names: Vec<&str> = offenders.iter().map(|o| o.name.as_str()).collect();
        return Err(SingularError::NotAlmostConvex(format!("β components {} depend on {z}", names.join(", "))));
    }
    let smooth = Arc::new(chart.as_smooth());
    let (a, beta) = alpha.decompose();
    let u = a.coeff(0);
    let zs = ScalarExpr::sym(&z);
    let fprime = ScalarExpr::apply(profile.fn_ref(), 1, &zs);
    let form = beta
        .to_smooth_frame()
        .add(&BForm::d_coord(&smooth, &z)?.scale(&(&u * &fprime)))?;

    let original = alpha.to_smooth_frame();
    let far: Vec<Point> = smooth
        .sample_box(cfg.off_z.max(200) * 4, cfg.seed)
        .into_iter()
        .filter(|p| p.get(&z).is_some_and(|v| v.abs() > 2.0 * profile.eps))
        .collect();
    let coincidence_residual = form.sub(&original)?.sweep(&far).max;

    let lhs = contact_coeff(&form)?;
    let n = (alpha.dim() - 1) / 2;
    let base = alpha.wedge(&alpha.ext_d().wedge_pow(n)?)?.to_smooth_frame().top_coeff();
    let rhs = &(&fprime * &zs.powi(m as i64)) * &base;
    let pts = cfg.all_points(&smooth);
    let rel = sweep(&pts, |p| {
        let (l, r) = (lhs.eval(p).ok()?, rhs.eval(p).ok()?);
        Some((l - r).abs() / r.abs().max(1e-300))
    });
    let identity_residual = if rel.skipped.is_empty() { rel.max } else { f64::INFINITY };

    let (contact, fold) = if m % 2 == 0 {
        (Some(is_contact(&form, cfg)?), None)
    } else {
        (None, Some(folded_check(&form, cfg)?))
    };
    Ok(DesingReport {
        profile: profile.clone(),
        order: m,
        form,
        convexity,
        contact,
        fold,
        coincidence_residual,
        coincidence_points: far.len(),
        identity_residual,
    })
}

/// One critical component of a singularized form, on its own chart.
#[derive(Clone, Debug, Serialize)]
pub struct SingComponent {
    /// Position of the component in the original `t`.
    pub center: f64,
    /// Defining coordinate of the component chart (`t − center`).
    pub coordinate: String,
    pub chart: Arc<Chart>,
    pub form: BForm,
    pub contact: ContactReport,
    /// Classification on the tubular neighbourhood where `ds_ε` is a
    /// constant multiple of `σ`.
    pub convexity: ConvexityClass,
    pub tubular_half_width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingReport {
    pub profile: Arc<ProfileFn>,
    pub order: u32,
    pub t: String,
    pub u: ScalarExpr,
    pub beta: BForm,
    pub components: Vec<SingComponent>,
    /// `|t|` (or `t`, one-sided) beyond which `α_ε` must equal `α`.
    pub agreement_threshold: f64,
    pub coincidence_residual: f64,
    /// One-sided profiles only: residual of `ds_ε = −dt` for `t < −2ε`.
    pub mirror_residual: Option<f64>,
    /// Singular points of `ds_ε` found by scanning `1/s_ε'`.
    pub located_critical_points: Vec<f64>,
}

fn vertical_split(alpha: &BForm, t: &str, cfg: &GridConfig) -> Result<(ScalarExpr, BForm), SingularError> {
    let chart = alpha.chart();
    let slot = chart
        .slot_of(t)
        .ok_or_else(|| SingularError::Invalid(format!("`{t}` is not a coordinate")))?;
    let pts = cfg.all_points(chart);
    for c in alpha.coefficients() {
        if c.depends_on(t) {
            let s = crate::grid::sweep_expr(&c.diff(t), &pts);
            if s.max > cfg.tol || !s.skipped.is_empty() {
                return Err(SingularError::NotVerticallyInvariant(t.to_string(), s.max));
            }
        }
    }
    let u = alpha.coeff(1 << slot);
    let beta = BForm::from_terms(
        chart,
        1,
        alpha.terms().iter().filter(|(m, _)| **m != 1 << slot).map(|(m, c)| (*m, c.clone())),
    );
    Ok((u, beta))
}

/// Roots of `1/s'` in `[lo, hi]`: scan, then refine each local minimum of
/// `|1/s'|` by golden section and keep those that reach zero.
fn locate_poles(p: &ProfileFn, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let g = |x: f64| p.deriv(x).map(|d| 1.0 / d.abs()).unwrap_or(0.0);
    let h = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let scale = gs.iter().cloned().fold(0.0, f64::max);
    let mut out: Vec<f64> = Vec::new();
    for i in 1..n {
        if !(gs[i] <= gs[i - 1] && gs[i] <= gs[i + 1]) {
            continue;
        }
        let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..120 {
            let (c, d) = (b - r * (b - a), a + r * (b - a));
            if g(c) < g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        if g(x) <= 1e-9 * scale && out.last().is_none_or(|&y| x - y > 2.0 * h) {
            out.push(x);
        }
    }
    out
}

/// `u dt + β ↦ u ds_ε + β`, expressed on one b^m chart per critical
/// component.
pub fn singularize(alpha: &BForm, t: &str, profile: &Arc<ProfileFn>, cfg: &GridConfig) -> Result<SingReport, SingularError> {
    let chart = alpha.chart();
    if chart.is_singular() {
        return Err(SingularError::Invalid("singularization takes a smooth form".into()));
    }
    if profile.kind.is_desing() {
        return Err(SingularError::Parity {
            profile: profile.name.clone(),
            order: profile.order(),
        });
    }
    let (u, beta) = vertical_split(alpha, t, cfg)?;
    let input = is_contact(alpha, cfg)?;
    if input.verdict != Verdict::Contact {
        return Err(SingularError::NotContact(format!("verdict {:?}, min {:.3e}", input.verdict, input.min_off)));
    }
    let m = profile.order();
    let eps = profile.eps;
    let ti = chart.index_of(t).expect("checked");
    let (lo, hi) = chart.bound(ti);
    let odd_pair = profile.kind == ProfileKind::SingOdd;
    let mut components = Vec::new();
    for &center in &profile.poles {
        if !(lo < center && center < hi) {
            return Err(SingularError::Invalid(format!("critical point {t} = {center} outside [{lo}, {hi}]")));
        }
        let (coord, bounds, half) = if odd_pair {
            let name = fresh_name(chart, "w");
            let b = if center > 0.0 { (-center, hi - center) } else { (lo - center, -center) };
            (name, b, eps / 8.0)
        } else {
            (t.to_string(), (lo, hi), eps)
        };
        let coords: Vec<&str> = chart
            .coord_names()
            .map(|c| if c == t { coord.as_str() } else { c })
            .collect();
        let mut bs = chart.bounds().to_vec();
        bs[ti] = bounds;
        let periodic: Vec<&str> = (0..chart.dim())
            .filter(|&i| chart.is_periodic(i))
            .map(|i| coords[i])
            .collect();
        let sub = Arc::new(Chart::new(&coords, &bs, Some((&coord, m)))?.with_periodic(&periodic));
        let sub_smooth = Arc::new(sub.as_smooth());
        let b_smooth = BForm::from_terms(&sub_smooth, 1, beta.terms().iter().map(|(k, c)| (*k, c.clone())));
        let weight = ScalarExpr::apply(crate::scalar::FnRef(profile.weighted(center)), 0, &ScalarExpr::sym(&coord));
        let form = b_smooth
            .to_b_frame(&sub)?
            .add(&BForm::sigma(&sub)?.scale(&(&u * &weight)))?;
        let contact = is_contact(&form, cfg)?;
        let (zlo, zhi) = sub.bound(sub.index_of(&coord).expect("coordinate"));
        let tub = Arc::new(sub.with_bound(&coord, (zlo.max(-half), zhi.min(half)))?);
        let convexity = convexity_classify(&form.on_subchart(&tub)?, cfg)?;
        components.push(SingComponent {
            center,
            coordinate: coord,
            chart: sub,
            form,
            contact,
            convexity,
            tubular_half_width: half,
        });
    }

    let agreement_threshold = match profile.kind {
        ProfileKind::SingOdd => eps,
        _ => 2.0 * eps,
    };
    let samples = chart.sample_box(cfg.off_z.max(200) * 4, cfg.seed);
    let mut coincidence = 0.0_f64;
    let mut mirror = 0.0_f64;
    for c in &components {
        let coeff = c.form.coeff(1);
        for p in &samples {
            let tv = p.get(t).expect("coordinate");
            let w = tv - c.center;
            let own_side = !odd_pair || (tv > 0.0) == (c.center > 0.0);
            if !own_side {
                continue;
            }
            let q = c.chart.point(
                chart
                    .coord_names()
                    .map(|n| if n == t { w } else { p.get(n).expect("coordinate") })
                    .collect(),
            );
            let (Ok(a), Ok(b)) = (coeff.eval(&q), u.eval(p)) else { continue };
            let dt_coeff = a / w.powi(m as i32);
            let outside = match profile.kind {
                ProfileKind::SingOnesided => tv > agreement_threshold,
                _ => tv.abs() > agreement_threshold,
            };
            if outside {
                coincidence = coincidence.max((dt_coeff - b).abs());
            }
            if profile.kind == ProfileKind::SingOnesided && tv < -agreement_threshold {
                mirror = mirror.max((dt_coeff + b).abs());
            }
        }
    }
    let span = 2.0 * agreement_threshold;
    let located_critical_points = locate_poles(profile, lo.max(-span), hi.min(span), 4001);
    Ok(SingReport {
        profile: profile.clone(),
        order: m,
        t: t.to_string(),
        u,
        beta,
        components,
        agreement_threshold,
        coincidence_residual: coincidence,
        mirror_residual: (profile.kind == ProfileKind::SingOnesided).then_some(mirror),
        located_critical_points,
    })
}

fn fresh_name(chart: &Chart, base: &str) -> String {
    if chart.index_of(base).is_none() {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}{k}")).find(|n| chart.index_of(n).is_none()).expect("unbounded")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstructionVerdict {
    Obstructed,
    Admissible,
}

/// Sign of the smooth contact coefficient just below and above a critical
/// component of the model candidate.
#[derive(Clone, Debug, Serialize)]
pub struct SideSigns {
    pub position: f64,
    pub below: i32,
    pub above: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub order: u32,
    pub components: usize,
    /// Whether the complement of the critical set is connected in the
    /// stand-in (a single component).
    pub connected_complement: bool,
    pub sides: Vec<SideSigns>,
    /// Signs on the regions of the complement, left to right.
    pub region_signs: Vec<i32>,
    pub verdict: ObstructionVerdict,
}

/// Orientation test for b^m contact forms with a given number of critical
/// components. The candidate `σ_1∧…` has smooth contact coefficient
/// `∏_j (t − t_j)^{−m}` along a transversal.
pub fn orientation_obstruction_check(m: u32, components: usize) -> ObstructionReport {
    let ts: Vec<f64> = (0..components).map(|j| j as f64 - (components as f64 - 1.0) / 2.0).collect();
    let coeff = |t: f64| ts.iter().map(|tj| (t - tj).powi(-(m as i32))).product::<f64>();
    let sign = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    let d = 1e-3;
    let sides: Vec<SideSigns> = ts
        .iter()
        .map(|&p| SideSigns {
            position: p,
            below: sign(coeff(p - d)),
            above: sign(coeff(p + d)),
        })
        .collect();
    let mut region_signs = Vec::new();
    if let Some(first) = ts.first() {
        region_signs.push(sign(coeff(first - 0.5)));
        for w in ts.windows(2) {
            region_signs.push(sign(coeff(0.5 * (w[0] + w[1]))));
        }
        region_signs.push(sign(coeff(ts[ts.len() - 1] + 0.5)));
    }
    let connected_complement = components == 1;
    // with a connected complement both sides lie in one region, which a
    // nowhere-vanishing top form cannot give two signs
    let flips = sides.iter().any(|s| s.below != s.above);
    let verdict = if connected_complement && flips {
        ObstructionVerdict::Obstructed
    } else {
        ObstructionVerdict::Admissible
    };
    ObstructionReport {
        order: m,
        components,
        connected_complement,
        sides,
        region_signs,
        verdict,
    }
}
