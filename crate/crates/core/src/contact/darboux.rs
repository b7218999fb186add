//! Point classes on the critical hypersurface and the 2-form `Θ` of a
//! 3-dimensional b-contact form.

use std::sync::Arc;

use serde::Serialize;

use super::{reeb, ContactError, ContactSystem};
use crate::chart::Chart;
use crate::exterior::{BForm, BMultiVector};
use crate::grid::{sweep_expr, GridConfig};
use crate::scalar::{Point, ScalarExpr};

/// Local model of a b-contact form at a point of the critical set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DarbouxCase {
    /// `R_p ≠ 0` and `ζ ∈ ker α_p`.
    RegularReebSingularXi,
    /// `R_p ≠ 0` and `ζ ∉ ker α_p`.
    RegularReebRegularXi,
    /// `R_p = 0` as an ordinary vector.
    SingularReeb,
}

impl DarbouxCase {
    pub fn label(&self) -> &'static str {
        match self {
            DarbouxCase::RegularReebSingularXi => "1a",
            DarbouxCase::RegularReebRegularXi => "1b",
            DarbouxCase::SingularReeb => "2",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointClass {
    pub case: DarbouxCase,
    /// Components of `R(p)` in the coordinate frame.
    pub reeb: Vec<f64>,
    /// `u(p)` for `α = uσ + β`.
    pub u: f64,
}

/// Classifies `p ∈ Z` with the default zero tolerance `1e-9`.
pub fn classify_point(alpha: &BForm, p: &Point, cfg: &GridConfig) -> Result<PointClass, ContactError> {
    let r = reeb(alpha, cfg)?;
    classify_with(alpha, &r, p, 1e-9)
}

/// Classifies `p ∈ Z` given the Reeb field.
pub fn classify_with(alpha: &BForm, r: &BMultiVector, p: &Point, zero_tol: f64) -> Result<PointClass, ContactError> {
    let chart = alpha.chart();
    let z = chart
        .z_name()
        .ok_or_else(|| ContactError::Invalid("classification needs a singular chart".into()))?;
    if p.get(z).map_or(true, |v| v.abs() > 1e-12) {
        return Err(ContactError::NotOnZ(p.to_string()));
    }
    let smooth = r.to_smooth_frame();
    let reeb: Vec<f64> = (0..chart.dim())
        .map(|k| smooth.component(k).eval(p))
        .collect::<Result<_, _>>()
        .map_err(crate::exterior::ExteriorError::from)?;
    let u = alpha.component(0).eval(p).map_err(crate::exterior::ExteriorError::from)?;
    let case = if reeb.iter().all(|v| v.abs() <= zero_tol) {
        DarbouxCase::SingularReeb
    } else if u.abs() <= zero_tol {
        DarbouxCase::RegularReebSingularXi
    } else {
        DarbouxCase::RegularReebRegularXi
    };
    Ok(PointClass { case, reeb, u })
}

/// Connected set of lattice points where `R|_Z` vanishes to lattice
/// resolution.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroCluster {
    pub size: usize,
    /// Lattice point with the smallest `|R|`.
    pub representative: Point,
    pub min_norm: f64,
}

/// Data of the dimension-3 critical-set statement.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    /// `Θ = u dβ + β∧du` restricted to `Z`, on the slice chart.
    pub theta: BForm,
    /// `u|_Z`.
    pub u: ScalarExpr,
    /// `R|_Z` on the slice chart; `None` when evaluated pointwise.
    pub reeb: Option<BMultiVector>,
    /// Smallest `|Θ|` coefficient over the on-`Z` grid.
    pub area_min: f64,
    /// The sign `s` with `ι_{R|Z} Θ = s du`.
    pub sign: i32,
    pub residual: f64,
    pub clusters: Vec<ZeroCluster>,
}

impl ThetaReport {
    pub fn nondegenerate(&self, tol: f64) -> bool {
        self.area_min >= tol
    }
}

/// Computes `Θ|_Z`, the realized sign of `ι_{R|Z}Θ = s du`, and the zero
/// clusters of `R|_Z`.
pub fn theta_form(alpha: &BForm, cfg: &GridConfig) -> Result<ThetaReport, ContactError> {
    let chart = alpha.chart();
    if chart.dim() != 3 || !chart.is_singular() {
        return Err(ContactError::Shape("Θ needs a 3-dimensional singular chart".into()));
    }
    let z = chart.z_name().expect("singular").to_string();
    let at_z = |n: &str| (n == z).then(ScalarExpr::zero);
    let (a, b) = alpha.decompose();
    let beta = b.restrict_to_slice()?;
    let slice = beta.chart().clone();
    let u = a.coeff(0).substitute(&at_z);
    let du = BForm::d_scalar(&slice, &u);
    let theta = beta.ext_d().scale(&u).add(&beta.wedge(&du)?)?;
    let r = reeb(alpha, cfg)?.restrict_to_slice()?.on_chart(&slice)?;
    let on = cfg.on_points(chart);
    let area = sweep_expr(&theta.top_coeff(), &on);
    let contracted = theta.interior(&r)?;
    let mut best = (1, f64::INFINITY);
    for s in [1, -1] {
        let diff = contracted.sub(&du.scale(&ScalarExpr::int(s)))?;
        let res = diff.sweep(&on).max;
        if res < best.1 {
            best = (s as i32, res);
        }
    }
    let clusters = reeb_zero_clusters(&r, 48);
    Ok(ThetaReport {
        theta,
        u,
        reeb: Some(r),
        area_min: if area.skipped.is_empty() { area.min } else { 0.0 },
        sign: best.0,
        residual: best.1,
        clusters,
    })
}

/// [`theta_form`] with `R|_Z` obtained by a numeric solve at each point,
/// for forms whose symbolic Reeb field is too large to build.
pub fn theta_form_pointwise(alpha: &BForm, cfg: &GridConfig) -> Result<ThetaReport, ContactError> {
    let chart = alpha.chart();
    if chart.dim() != 3 || !chart.is_singular() {
        return Err(ContactError::Shape("Θ needs a 3-dimensional singular chart".into()));
    }
    let z = chart.z_name().expect("singular").to_string();
    let at_z = |n: &str| (n == z).then(ScalarExpr::zero);
    let (a, b) = alpha.decompose();
    let beta = b.restrict_to_slice()?;
    let slice = beta.chart().clone();
    let u = a.coeff(0).substitute(&at_z);
    let du = BForm::d_scalar(&slice, &u);
    let theta = beta.ext_d().scale(&u).add(&beta.wedge(&du)?)?;
    let sys = ContactSystem::new(alpha, &GridConfig { off_z: 0, on_z: 0, ..cfg.clone() })?;
    let rhs = sys.rhs(ScalarExpr::one(), &BForm::zero(chart, 1));
    // slice components of R at a point of Z
    let reeb_on_z = |p: &Point| -> Result<Vec<f64>, ContactError> {
        let (x, r) = sys.solve_at(&rhs, p)?;
        if r > 1e-8 {
            return Err(ContactError::Invalid(format!("inconsistent Reeb system at {p}")));
        }
        Ok(x[1..].to_vec())
    };
    let on = cfg.on_points(chart);
    let area = sweep_expr(&theta.top_coeff(), &on);
    let theta_c = theta.top_coeff();
    let mut res = [0.0_f64; 2];
    for p in &on {
        let r = reeb_on_z(p)?;
        let th = theta_c.eval(p).map_err(crate::exterior::ExteriorError::from)?;
        // ι_R(θ e¹∧e²) = θ (R¹ e² − R² e¹)
        let contracted = [-th * r[1], th * r[0]];
        for (k, s) in [1.0, -1.0].into_iter().enumerate() {
            for (slot, c) in contracted.iter().enumerate() {
                let want = du.component(slot).eval(p).map_err(crate::exterior::ExteriorError::from)?;
                res[k] = res[k].max((c - s * want).abs());
            }
        }
    }
    let (sign, residual) = if res[0] <= res[1] { (1, res[0]) } else { (-1, res[1]) };
    let full = |q: &Point| -> Point {
        let pairs: Vec<(&str, f64)> = slice.coord_names().map(|n| (n, q.get(n).unwrap_or(0.0))).collect();
        chart.point_from(&pairs).with(&z, 0.0)
    };
    let clusters = zero_clusters_by(&slice, 48, |q| reeb_on_z(&full(q)).ok());
    Ok(ThetaReport {
        theta,
        u,
        reeb: None,
        area_min: if area.skipped.is_empty() { area.min } else { 0.0 },
        sign,
        residual,
        clusters,
    })
}

/// Lattice over a chart box with `n` points per axis; periodic axes omit
/// the upper endpoint.
fn lattice(chart: &Chart, n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
    let axes = (0..chart.dim())
        .map(|i| {
            let (lo, hi) = chart.bound(i);
            let per = chart.is_periodic(i);
            let step = if per { (hi - lo) / n as f64 } else { (hi - lo) / (n - 1) as f64 };
            (0..n).map(|k| lo + step * k as f64).collect()
        })
        .collect();
    let periodic = (0..chart.dim()).map(|i| chart.is_periodic(i)).collect();
    (axes, periodic)
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// Clusters of near-zeros of a vector field on its (smooth) chart. A lattice
/// point counts as a near-zero when `|X|` is at most the largest change of
/// `X` to a lattice neighbour, so every zero is caught within one cell.
pub fn reeb_zero_clusters(x: &BMultiVector, n: usize) -> Vec<ZeroCluster> {
    let comps: Vec<ScalarExpr> = (0..x.dim()).map(|k| x.component(k)).collect();
    zero_clusters_by(x.chart(), n, |p| comps.iter().map(|c| c.eval(p).ok()).collect())
}

/// [`reeb_zero_clusters`] for a field given by its pointwise values.
pub fn zero_clusters_by(chart: &Arc<Chart>, n: usize, field: impl Fn(&Point) -> Option<Vec<f64>>) -> Vec<ZeroCluster> {
    let chart = chart.clone();
    let d = chart.dim();
    let (axes, periodic) = lattice(&chart, n);
    let total = n.pow(d as u32);
    let index = |idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * n + i);
    let unindex = |mut k: usize| {
        let mut idx = vec![0; d];
        for slot in (0..d).rev() {
            idx[slot] = k % n;
            k /= n;
        }
        idx
    };
    let points: Vec<Point> = (0..total)
        .map(|k| {
            let idx = unindex(k);
            chart.point(idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect())
        })
        .collect();
    let values: Vec<Option<Vec<f64>>> = points.iter().map(&field).collect();
    let neighbours = |k: usize| {
        let idx = unindex(k);
        let mut out = Vec::new();
        for a in 0..d {
            for delta in [-1i64, 1] {
                let j = idx[a] as i64 + delta;
                let j = if periodic[a] {
                    j.rem_euclid(n as i64)
                } else if j < 0 || j >= n as i64 {
                    continue;
                } else {
                    j
                };
                let mut nb = idx.clone();
                nb[a] = j as usize;
                out.push(index(&nb));
            }
        }
        out
    };
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let near: Vec<bool> = (0..total)
        .map(|k| {
            let Some(v) = &values[k] else { return false };
            let here = norm(v);
            let spread = neighbours(k)
                .into_iter()
                .filter_map(|j| values[j].as_ref())
                .map(|w| norm(&v.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>()))
                .fold(0.0_f64, f64::max);
            here <= 1e-9 || here <= spread
        })
        .collect();
    let mut parent: Vec<usize> = (0..total).collect();
    for k in (0..total).filter(|&k| near[k]) {
        for j in neighbours(k) {
            if near[j] {
                let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in (0..total).filter(|&k| near[k]) {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(k);
    }
    groups
        .into_values()
        .map(|members| {
            let best = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let na = values[a].as_deref().map_or(f64::INFINITY, norm);
                    let nb = values[b].as_deref().map_or(f64::INFINITY, norm);
                    na.total_cmp(&nb)
                })
                .expect("nonempty");
            ZeroCluster {
                size: members.len(),
                representative: points[best].clone(),
                min_norm: values[best].as_deref().map_or(f64::NAN, norm),
            }
        })
        .collect()
}
