//! Maps between charts and pullback of b-forms.

use std::sync::Arc;

use super::{BForm, ExteriorError};
use crate::chart::Chart;
use crate::grid::{sweep, GridConfig};
use crate::scalar::ScalarExpr;

/// A map `φ` from `source` to `target`, one expression per target coordinate.
///
/// When the target is singular, `z_target ∘ φ = unit · z_source^exponent`
/// must hold with a nowhere-vanishing `unit` (exponent 0 when the source is
/// smooth). `unit_inv` may be supplied to keep pulled-back coefficients in a
/// compact form; it defaults to `1/unit`.
#[derive(Clone, Debug)]
pub struct ChartMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    components: Vec<ScalarExpr>,
    unit: ScalarExpr,
    unit_inv: ScalarExpr,
    exponent: i64,
}

impl ChartMap {
    /// A map whose defining-function data is inferred: identity-like maps
    /// (`z_t ∘ φ` a rational multiple of `z_s`) and maps from smooth sources.
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<ChartMap, ExteriorError> {
        if components.len() != target.dim() {
            return Err(ExteriorError::Degree(format!(
                "{} components for a {}-dimensional target",
                components.len(),
                target.dim()
            )));
        }
        let allowed: Vec<&str> = source.coord_names().collect();
        for c in &components {
            for s in c.symbols() {
                if !allowed.contains(&&*s) {
                    return Err(ExteriorError::Unsupported(format!("`{s}` is not a source coordinate")));
                }
            }
        }
        let (unit, exponent) = match (target.singular(), source.singular()) {
            (None, _) => (ScalarExpr::one(), 0),
            (Some(t), None) => (components[t.index].clone(), 0),
            (Some(t), Some(s)) => {
                let zs = source.name(s.index);
                let zt = &components[t.index];
                let v = zt.symbol_valuation(zs);
                if v < 1 {
                    return Err(ExteriorError::Compatibility(format!(
                        "cannot infer a unit for {zt}; use with_defining"
                    )));
                }
                (zt.div_symbol_power(zs, v), v)
            }
        };
        let unit_inv = unit.recip();
        Ok(ChartMap {
            source: source.clone(),
            target: target.clone(),
            components: components.into_iter().map(|c| c.simplify()).collect(),
            unit,
            unit_inv,
            exponent,
        })
    }

    /// Sets the defining-function factorisation explicitly.
    pub fn with_defining(mut self, unit: ScalarExpr, unit_inv: Option<ScalarExpr>, exponent: i64) -> ChartMap {
        self.unit_inv = unit_inv.unwrap_or_else(|| unit.recip());
        self.unit = unit;
        self.exponent = exponent;
        self
    }

    pub fn identity(chart: &Arc<Chart>) -> ChartMap {
        let comps = chart.coord_names().map(ScalarExpr::sym).collect();
        ChartMap::new(chart, chart, comps).expect("identity map")
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn unit(&self) -> &ScalarExpr {
        &self.unit
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// `f ∘ φ` for a function of target coordinates.
    pub fn pull_scalar(&self, f: &ScalarExpr) -> ScalarExpr {
        let target = self.target.clone();
        let comps = self.components.clone();
        f.substitute(&move |n| target.index_of(n).map(|i| comps[i].clone()))
    }

    /// Grid check of `z_t ∘ φ = unit · z_s^e` and nonvanishing of the unit.
    pub fn verify(&self, cfg: &GridConfig) -> Result<(), ExteriorError> {
        let Some(t) = self.target.singular() else { return Ok(()) };
        let pts = cfg.all_points(&self.source);
        let zs = self.source.singular().map(|s| ScalarExpr::sym(self.source.name(s.index)));
        let rhs = match &zs {
            Some(z) => &self.unit * &z.powi(self.exponent),
            None => self.unit.clone(),
        };
        let lhs = &self.components[t.index];
        let diff = sweep(&pts, |p| Some(lhs.eval(p).ok()? - rhs.eval(p).ok()?));
        if diff.max > cfg.tol.max(1e-9) * 10.0 {
            return Err(ExteriorError::Compatibility(format!(
                "z_target∘φ differs from unit·z^e by {:.3e}",
                diff.max
            )));
        }
        let u = sweep(&pts, |p| self.unit.eval(p).ok());
        if !u.skipped.is_empty() || u.min < 1e-12 {
            let at = u.argmin.or_else(|| u.skipped.first().cloned());
            return Err(ExteriorError::Compatibility(format!(
                "unit vanishes or is undefined near {}",
                at.map(|p| p.to_string()).unwrap_or_default()
            )));
        }
        Ok(())
    }

    /// Pullbacks of the target frame covectors, one per target slot.
    fn frame_pullbacks(&self) -> Result<Vec<BForm>, ExteriorError> {
        let frame = self.target.frame();
        let mut out = Vec::with_capacity(frame.len());
        for (slot, &ci) in frame.iter().enumerate() {
            let form = match self.target.singular() {
                Some(t) if slot == 0 => self.sigma_pullback(t.order as i64)?,
                _ => BForm::d_scalar(&self.source, &self.components[ci]),
            };
            out.push(form);
        }
        Ok(out)
    }

    fn sigma_pullback(&self, mt: i64) -> Result<BForm, ExteriorError> {
        let u_pow = |k: i64| -> ScalarExpr {
            if k >= 0 {
                self.unit.powi(k)
            } else {
                self.unit_inv.powi(-k)
            }
        };
        let du = BForm::d_scalar(&self.source, &self.unit);
        match self.source.singular() {
            None => Ok(du.scale(&u_pow(-mt))),
            Some(s) => {
                let e = self.exponent;
                let z = ScalarExpr::sym(self.source.name(s.index));
                let t1 = du.scale(&(&u_pow(-mt) * &z.powi(e * (1 - mt))));
                let dz = BForm::d_coord(&self.source, self.source.name(s.index))?;
                let t2 = dz.scale(&(&(&ScalarExpr::int(e) * &u_pow(1 - mt)) * &z.powi(e - 1 - e * mt)));
                let total = t1.add(&t2)?;
                let zn = self.source.name(s.index);
                for c in total.terms().values() {
                    if c.symbol_valuation(zn) < 0 {
                        return Err(ExteriorError::NotSmooth(format!("σ pulls back with coefficient {c}")));
                    }
                }
                Ok(total)
            }
        }
    }

    /// `φ*ω` in the source b-frame.
    pub fn pullback(&self, omega: &BForm) -> Result<BForm, ExteriorError> {
        if **omega.chart() != *self.target {
            return Err(ExteriorError::ChartMismatch);
        }
        let pbs = self.frame_pullbacks()?;
        let mut out = BForm::zero(&self.source, omega.degree());
        for (m, c) in omega.terms() {
            let mut acc = BForm::scalar(&self.source, self.pull_scalar(c));
            for k in super::bits(*m) {
                acc = acc.wedge(&pbs[k])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}
