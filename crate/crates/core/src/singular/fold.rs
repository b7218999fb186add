//! Fold hypersurfaces of smooth 1-forms and the folded-form pipeline.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::jet::Jet;
use super::profile::{build_profile, ProfileFn, ProfileKind, Weighted};
use super::{desingularize, singularize, DesingReport, SingReport, SingularError};
use crate::chart::Chart;
use crate::contact::contact_coeff;
use crate::exterior::BForm;
use crate::grid::GridConfig;
use crate::scalar::{FnRef, Point, ScalarExpr, SmoothFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldVerdict {
    /// No zero of the contact coefficient: contact everywhere.
    NoFold,
    /// Transverse zero set.
    Folded,
    /// Zeros without a sign change, or with vanishing gradient.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldComponent {
    pub size: usize,
    pub representative: Point,
    /// `(min, max)` of each coordinate over the located zeros.
    pub extent: Vec<(String, f64, f64)>,
    pub min_gradient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldReport {
    pub verdict: FoldVerdict,
    pub coeff: ScalarExpr,
    pub nodes_per_axis: usize,
    /// Grid spacing per coordinate.
    pub spacing: Vec<f64>,
    pub zero_count: usize,
    pub min_gradient: f64,
    /// Smallest `|c|` at grid nodes.
    pub min_abs: f64,
    pub components: Vec<FoldComponent>,
}

impl FoldReport {
    pub fn is_folded(&self) -> bool {
        self.verdict == FoldVerdict::Folded
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Locates the zero set of the contact coefficient of a smooth 1-form on a
/// tensor grid with about `40000` nodes.
pub fn folded_check(alpha: &BForm, cfg: &GridConfig) -> Result<FoldReport, SingularError> {
    let d = alpha.dim().max(1) as f64;
    let n = ((cfg.off_z.max(1) as f64 * 200.0).powf(1.0 / d).floor() as usize).clamp(8, 64);
    folded_check_with(alpha, n, cfg.tol)
}

/// [`folded_check`] with an explicit number of nodes per axis and gradient
/// threshold.
pub fn folded_check_with(alpha: &BForm, n: usize, grad_tol: f64) -> Result<FoldReport, SingularError> {
    let chart = alpha.chart().clone();
    if chart.is_singular() {
        return Err(SingularError::Invalid("fold detection takes a smooth form".into()));
    }
    if alpha.dim() < 3 {
        return Err(SingularError::Dimension(format!(
            "fold detection needs dimension 2n+1 >= 3, got {}",
            alpha.dim()
        )));
    }
    let coeff = contact_coeff(alpha)?;
    let d = chart.dim();
    let spacing: Vec<f64> = (0..d)
        .map(|i| {
            let (lo, hi) = chart.bound(i);
            (hi - lo) / (n - 1) as f64
        })
        .collect();
    let total = n.pow(d as u32);
    let coords = |mut idx: usize| -> Vec<usize> {
        let mut v = vec![0; d];
        for slot in v.iter_mut() {
            *slot = idx % n;
            idx /= n;
        }
        v
    };
    let at = |ix: &[usize]| -> Vec<f64> { (0..d).map(|i| chart.bound(i).0 + ix[i] as f64 * spacing[i]).collect() };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|k| coeff.eval(&chart.point(at(&coords(k)))).unwrap_or(f64::NAN))
        .collect();
    let min_abs = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let grads: Vec<ScalarExpr> = chart.coord_names().map(|c| coeff.diff(c)).collect();
    let grad_at = |p: &Point| -> f64 {
        grads
            .iter()
            .map(|g| g.eval(p).unwrap_or(f64::NAN).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    // sign changes along grid edges, refined by bisection
    let mut zeros: Vec<(Vec<f64>, Point)> = Vec::new();
    let mut touching = 0usize;
    for k in 0..total {
        let ix = coords(k);
        let v0 = values[k];
        if v0 == 0.0 {
            touching += 1;
        }
        let mut stride = 1;
        for axis in 0..d {
            if ix[axis] + 1 < n {
                let v1 = values[k + stride];
                if v0 * v1 < 0.0 {
                    let (mut a, mut b) = (0.0, 1.0);
                    let base = at(&ix);
                    let eval = |s: f64| {
                        let mut x = base.clone();
                        x[axis] += s * spacing[axis];
                        coeff.eval(&chart.point(x)).unwrap_or(f64::NAN)
                    };
                    let sa = eval(0.0).signum();
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        if eval(mid).signum() == sa {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    let mut index_pos: Vec<f64> = ix.iter().map(|&i| i as f64).collect();
                    index_pos[axis] += 0.5 * (a + b);
                    let mut x = base;
                    x[axis] += 0.5 * (a + b) * spacing[axis];
                    zeros.push((index_pos, chart.point(x)));
                }
            }
            stride *= n;
        }
    }

    // cluster in index units, wrapping periodic axes
    let m = zeros.len();
    let mut dsu = Dsu((0..m).collect());
    let reach = (d as f64).sqrt() + 1e-9;
    for i in 0..m {
        for j in (i + 1)..m {
            let dist2: f64 = (0..d)
                .map(|a| {
                    let mut delta = (zeros[i].0[a] - zeros[j].0[a]).abs();
                    if chart.is_periodic(a) {
                        delta = delta.min((n - 1) as f64 - delta);
                    }
                    delta * delta
                })
                .sum();
            if dist2 <= reach * reach {
                dsu.union(i, j);
            }
        }
    }
    let gradients: Vec<f64> = zeros.par_iter().map(|(_, p)| grad_at(p)).collect();
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..m {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    let mut components: Vec<FoldComponent> = groups
        .values()
        .map(|members| {
            let extent = (0..d)
                .map(|a| {
                    let vals = members.iter().map(|&i| zeros[i].1.values()[a]);
                    let lo = vals.clone().fold(f64::INFINITY, f64::min);
                    let hi = vals.fold(f64::NEG_INFINITY, f64::max);
                    (chart.name(a).to_string(), lo, hi)
                })
                .collect();
            FoldComponent {
                size: members.len(),
                representative: zeros[members[0]].1.clone(),
                extent,
                min_gradient: members.iter().map(|&i| gradients[i]).fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    components.sort_by(|a, b| a.representative.values().partial_cmp(b.representative.values()).unwrap());
    let min_gradient = gradients.iter().cloned().fold(f64::INFINITY, f64::min);
    let verdict = if m == 0 && touching == 0 && min_abs >= grad_tol {
        FoldVerdict::NoFold
    } else if m > 0 && touching == 0 && min_gradient >= grad_tol {
        FoldVerdict::Folded
    } else {
        FoldVerdict::Degenerate
    };
    Ok(FoldReport {
        verdict,
        coeff,
        nodes_per_axis: n,
        spacing,
        zero_count: m,
        min_gradient,
        min_abs,
        components,
    })
}

/// `t ↦ W_j(t − c_j) f_δ'(t − c_j)` on the half line containing `c_j`: the
/// `dt` coefficient after desingularizing both components of a
/// sing-odd form.
#[derive(Debug)]
struct Glued {
    name: String,
    halves: [(f64, Arc<Weighted>); 2],
    desing: Arc<ProfileFn>,
}

impl SmoothFn for Glued {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, order: u32, t: f64) -> Result<f64, String> {
        let n = order as usize;
        let (c, w) = if t >= 0.0 { &self.halves[1] } else { &self.halves[0] };
        let x = t - c;
        let j: Jet = &w.jet(x, n)? * &self.desing.jet(x, n + 1)?.shift_down();
        Ok(j.derivative(n))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub sing: SingReport,
    pub desing: Vec<DesingReport>,
    /// Width parameter of the desingularizing profile.
    pub desing_eps: f64,
    /// The folded form on the original chart.
    pub form: BForm,
    /// Chart of the fold search: `|t| <= ε`, outside of which the form is
    /// the input.
    pub fold_chart: Arc<Chart>,
    pub fold: FoldReport,
}

/// Singularizes a vertically invariant contact form with two b-components
/// and desingularizes both, giving a folded form with two fold components.
pub fn folded_from_convex(alpha: &BForm, t: &str, eps: f64, cfg: &GridConfig) -> Result<CorollaryReport, SingularError> {
    let sing_profile = Arc::new(build_profile(ProfileKind::SingOdd, 0, eps)?);
    let sing = singularize(alpha, t, &sing_profile, cfg)?;
    let desing_eps = eps / 16.0;
    let desing_profile = Arc::new(build_profile(ProfileKind::DesingOdd, 0, desing_eps)?);
    let desing = sing
        .components
        .iter()
        .map(|c| desingularize(&c.form, &desing_profile, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let halves = {
        let mut v: Vec<(f64, Arc<Weighted>)> = sing
            .components
            .iter()
            .map(|c| (c.center, sing_profile.weighted(c.center)))
            .collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        [v[0].clone(), v[1].clone()]
    };
    let glued = Arc::new(Glued {
        name: format!("{}_{}", sing_profile.name, desing_profile.name),
        halves,
        desing: desing_profile,
    });
    let chart = alpha.chart();
    let h = ScalarExpr::apply(FnRef(glued), 0, &ScalarExpr::sym(t));
    let form = sing.beta.add(&BForm::d_coord(chart, t)?.scale(&(&sing.u * &h)))?;
    let fold_chart = Arc::new(chart.with_bound(t, (-eps, eps))?);
    let fold = folded_check(&form.on_subchart(&fold_chart)?, cfg)?;
    Ok(CorollaryReport {
        sing,
        desing,
        desing_eps,
        form,
        fold_chart,
        fold,
    })
}
