use std::sync::Arc;

use super::{below, bits, parity, BForm, BMultiVector, ExteriorError, Graded};
use crate::chart::Chart;
use crate::scalar::ScalarExpr;

/// `ι_x y` for a degree-1 element `x` of the dual kind: removes one slot with
/// the usual alternating sign.
pub(crate) fn contract<A: super::Variance, B: super::Variance>(x: &Graded<A>, y: &Graded<B>) -> Graded<B> {
    let mut out = Graded::<B>::zero(&y.chart, y.degree.saturating_sub(1));
    if y.degree == 0 {
        return out;
    }
    for (mask, f) in &y.terms {
        for k in bits(*mask) {
            let Some(xk) = x.terms.get(&(1 << k)) else { continue };
            let c = xk * f;
            let c = if parity(below(*mask, k)) > 0 { c } else { -c };
            out.insert(mask ^ (1 << k), c);
        }
    }
    out
}

/// Re-expresses a mask over `from` slots as a mask over `to` slots.
pub(crate) fn reframe(mask: u32, from: &[usize], to: &[usize]) -> (u32, i64) {
    let mut sign = 1;
    let mut out = 0u32;
    for k in bits(mask) {
        let coord = from[k];
        let j = to.iter().position(|&c| c == coord).expect("same coordinates");
        sign *= super::merge_sign(out, 1 << j);
        out |= 1 << j;
    }
    (out, sign)
}

impl BForm {
    /// The singular basis covector `σ = dz/z^m`.
    pub fn sigma(chart: &Arc<Chart>) -> Result<BForm, ExteriorError> {
        if !chart.is_singular() {
            return Err(ExteriorError::Unsupported("σ needs a singular chart".into()));
        }
        Ok(BForm::basis(chart, &[0]))
    }

    /// `d(coord)`; on a singular chart `dz = z^m σ`.
    pub fn d_coord(chart: &Arc<Chart>, name: &str) -> Result<BForm, ExteriorError> {
        let slot = chart
            .slot_of(name)
            .ok_or_else(|| ExteriorError::Unsupported(format!("`{name}` is not a coordinate")))?;
        let b = BForm::basis(chart, &[slot]);
        Ok(match chart.singular() {
            Some(s) if slot == 0 => b.scale(&ScalarExpr::sym(name).powi(s.order as i64)),
            _ => b,
        })
    }

    /// Differential of a function in the b-frame.
    pub fn d_scalar(chart: &Arc<Chart>, f: &ScalarExpr) -> BForm {
        BForm::scalar(chart, f.clone()).ext_d()
    }

    /// Extended exterior derivative: graded Leibniz with `dσ = 0`.
    pub fn ext_d(&self) -> BForm {
        let mut out = BForm::zero(&self.chart, self.degree + 1);
        if self.degree >= self.dim() {
            return out;
        }
        for (mask, f) in &self.terms {
            for k in 0..self.dim() {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let c = Self::frame_derivative(&self.chart, k, f);
                if c.is_zero() {
                    continue;
                }
                let c = if parity(below(*mask, k)) > 0 { c } else { -c };
                out.insert(mask | (1 << k), c);
            }
        }
        out
    }

    /// Contraction with a vector field.
    pub fn interior(&self, x: &BMultiVector) -> Result<BForm, ExteriorError> {
        self.same_chart_as(x)?;
        if x.degree != 1 {
            return Err(ExteriorError::Degree("interior needs a vector field".into()));
        }
        Ok(contract(x, self))
    }

    /// Full pairing with a multivector of the same degree.
    pub fn pair(&self, p: &BMultiVector) -> Result<ScalarExpr, ExteriorError> {
        self.same_chart_as(p)?;
        if self.degree != p.degree {
            return Err(ExteriorError::Degree("pairing needs equal degrees".into()));
        }
        Ok(self
            .terms
            .iter()
            .filter_map(|(m, f)| p.terms.get(m).map(|g| f * g))
            .sum())
    }

    /// Cartan formula `ι_X dω + d ι_X ω`.
    pub fn lie_derivative(&self, x: &BMultiVector) -> Result<BForm, ExteriorError> {
        let a = self.ext_d().interior(x)?;
        let b = self.interior(x)?.ext_d();
        a.add(&b)
    }

    /// Splits `ω = σ∧α + β` with `α`, `β` free of `σ`.
    pub fn decompose(&self) -> (BForm, BForm) {
        let mut alpha = BForm::zero(&self.chart, self.degree.saturating_sub(1));
        let mut beta = BForm::zero(&self.chart, self.degree);
        if !self.chart.is_singular() {
            return (alpha, self.clone());
        }
        for (m, c) in &self.terms {
            if m & 1 != 0 {
                alpha.terms.insert(m & !1, c.clone());
            } else {
                beta.terms.insert(*m, c.clone());
            }
        }
        (alpha, beta)
    }

    /// `σ∧α + β`.
    pub fn reassemble(alpha: &BForm, beta: &BForm) -> Result<BForm, ExteriorError> {
        let sigma = BForm::sigma(&alpha.chart)?;
        sigma.wedge(alpha)?.add(beta)
    }

    pub(crate) fn same_chart_as<V: super::Variance>(&self, other: &Graded<V>) -> Result<(), ExteriorError> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(ExteriorError::ChartMismatch)
        }
    }

    /// The same form in the coordinate frame of `chart.as_smooth()`
    /// (`σ ↦ z^{-m} dz`); coefficients may then carry negative powers of `z`.
    pub fn to_smooth_frame(&self) -> BForm {
        let smooth = Arc::new(self.chart.as_smooth());
        let Some(s) = self.chart.singular() else {
            return BForm { chart: smooth, ..self.clone() };
        };
        let from = self.chart.frame();
        let to = smooth.frame();
        let zinv = ScalarExpr::sym(self.chart.name(s.index)).powi(-(s.order as i64));
        let mut out = BForm::zero(&smooth, self.degree);
        for (m, c) in &self.terms {
            let (mm, sign) = reframe(*m, &from, &to);
            let mut v = if sign > 0 { c.clone() } else { -c };
            if m & 1 != 0 {
                v = &v * &zinv;
            }
            out.insert(mm, v);
        }
        out
    }

    /// Inverse of [`BForm::to_smooth_frame`]: `dz ↦ z^m σ` on a singular chart
    /// with the same coordinates.
    pub fn to_b_frame(&self, singular: &Arc<Chart>) -> Result<BForm, ExteriorError> {
        let Some(s) = singular.singular() else {
            return Err(ExteriorError::Unsupported("target chart is smooth".into()));
        };
        if self.chart.as_smooth() != singular.as_smooth() {
            return Err(ExteriorError::ChartMismatch);
        }
        let from = self.chart.frame();
        let to = singular.frame();
        let zm = ScalarExpr::sym(singular.name(s.index)).powi(s.order as i64);
        let mut out = BForm::zero(singular, self.degree);
        for (m, c) in &self.terms {
            let (mm, sign) = reframe(*m, &from, &to);
            let mut v = if sign > 0 { c.clone() } else { -c };
            if mm & 1 != 0 {
                v = &v * &zm;
            }
            out.insert(mm, v);
        }
        Ok(out)
    }

    /// The `σ`-free part restricted to `z = 0`, as a form on the critical
    /// slice chart.
    pub fn restrict_to_slice(&self) -> Result<BForm, ExteriorError> {
        let s = self
            .chart
            .singular()
            .ok_or_else(|| ExteriorError::Unsupported("smooth chart has no critical slice".into()))?;
        let slice = Arc::new(self.chart.critical_slice().expect("singular chart"));
        let z = self.chart.name(s.index).to_string();
        let mut out = BForm::zero(&slice, self.degree);
        for (m, c) in &self.terms {
            if m & 1 != 0 {
                continue;
            }
            let v = c.substitute(&|n| if n == z { Some(ScalarExpr::zero()) } else { None });
            out.insert(m >> 1, v);
        }
        Ok(out)
    }

    /// Lifts a form to a chart obtained by appending coordinates.
    pub fn lift(&self, extended: &Arc<Chart>) -> Result<BForm, ExteriorError> {
        lift_to(self, extended)
    }
}

impl BMultiVector {
    /// Lifts to a chart obtained by appending coordinates.
    pub fn lift(&self, extended: &Arc<Chart>) -> Result<BMultiVector, ExteriorError> {
        lift_to(self, extended)
    }
}

fn lift_to<V: super::Variance>(g: &Graded<V>, extended: &Arc<Chart>) -> Result<Graded<V>, ExteriorError> {
    let c = &g.chart;
    let ok = extended.dim() >= c.dim()
        && c.coord_names().zip(extended.coord_names()).all(|(a, b)| a == b)
        && c.singular() == extended.singular();
    if !ok {
        return Err(ExteriorError::ChartMismatch);
    }
    Ok(Graded {
        chart: extended.clone(),
        degree: g.degree,
        terms: g.terms.clone(),
        _v: std::marker::PhantomData,
    })
}
