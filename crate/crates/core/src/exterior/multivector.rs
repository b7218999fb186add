use std::sync::Arc;

use super::form::{contract, reframe};
use super::{bits, parity, BForm, BMultiVector, ExteriorError, Graded};
use crate::chart::Chart;
use crate::scalar::ScalarExpr;

impl BMultiVector {
    /// `ζ = z^m ∂z`.
    pub fn zeta(chart: &Arc<Chart>) -> Result<BMultiVector, ExteriorError> {
        if !chart.is_singular() {
            return Err(ExteriorError::Unsupported("ζ needs a singular chart".into()));
        }
        Ok(BMultiVector::basis(chart, &[0]))
    }

    /// `∂/∂coord` for a non-defining coordinate (or any coordinate of a
    /// smooth chart).
    pub fn partial(chart: &Arc<Chart>, name: &str) -> Result<BMultiVector, ExteriorError> {
        let slot = chart
            .slot_of(name)
            .ok_or_else(|| ExteriorError::Unsupported(format!("`{name}` is not a coordinate")))?;
        if chart.is_singular() && slot == 0 {
            return Err(ExteriorError::NotSmooth(format!("∂/∂{name} = {name}^(-m) ζ is not a b-vector field")));
        }
        Ok(BMultiVector::basis(chart, &[slot]))
    }

    /// Vector field from frame-slot components.
    pub fn vector(chart: &Arc<Chart>, comps: &[ScalarExpr]) -> BMultiVector {
        BMultiVector::from_terms(chart, 1, comps.iter().enumerate().map(|(k, c)| (1u32 << k, c.clone())))
    }

    /// Applies the vector field to a function.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        self.terms
            .iter()
            .map(|(m, c)| c * &Self::frame_derivative(&self.chart, m.trailing_zeros() as usize, f))
            .sum()
    }

    /// Right derivative `P ∂⃖θ_j` in the superfunction picture.
    fn right_derivative(&self, j: usize) -> BMultiVector {
        let mut out = BMultiVector::zero(&self.chart, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            if m & (1 << j) == 0 {
                continue;
            }
            let s = parity((m >> (j + 1)).count_ones());
            out.insert(m ^ (1 << j), if s > 0 { c.clone() } else { -c });
        }
        out
    }

    /// Schouten–Nijenhuis bracket, degree `p + q - 1`.
    pub fn schouten(&self, other: &BMultiVector) -> Result<BMultiVector, ExteriorError> {
        self.same_chart(other)?;
        let (p, q) = (self.degree, other.degree);
        if p == 0 || q == 0 {
            return Err(ExteriorError::Unsupported("bracket of degree-0 elements".into()));
        }
        let mut out = BMultiVector::zero(&self.chart, p + q - 1);
        let sign = if ((p - 1) * (q - 1)) % 2 == 0 { 1 } else { -1 };
        for j in 0..self.dim() {
            let a = self.right_derivative(j);
            if !a.is_zero() {
                out = out.add(&a.wedge(&other.derive_coeffs(j))?)?;
            }
            let b = other.right_derivative(j);
            if !b.is_zero() {
                let t = b.wedge(&self.derive_coeffs(j))?;
                out = if sign > 0 { out.sub(&t)? } else { out.add(&t)? };
            }
        }
        Ok(out)
    }

    /// Schouten bracket in Lichnerowicz's sign convention: equal to
    /// [`Self::schouten`] except for two even-degree arguments, where the sign
    /// flips. Jacobi pairs satisfy `[Λ,Λ] = 2R∧Λ` in this convention.
    pub fn schouten_lichnerowicz(&self, other: &BMultiVector) -> Result<BMultiVector, ExteriorError> {
        let b = self.schouten(other)?;
        Ok(if self.degree % 2 == 0 && other.degree % 2 == 0 { b.neg() } else { b })
    }

    /// Lie bracket of vector fields.
    pub fn lie_bracket(&self, other: &BMultiVector) -> Result<BMultiVector, ExteriorError> {
        if self.degree != 1 || other.degree != 1 {
            return Err(ExteriorError::Degree("Lie bracket needs vector fields".into()));
        }
        self.schouten(other)
    }

    /// `L_X P = [X, P]`.
    pub fn lie_derivative(&self, x: &BMultiVector) -> Result<BMultiVector, ExteriorError> {
        x.schouten(self)
    }

    /// `ι_γ P` for a 1-form `γ`; for a bivector this is `Λ^#(γ) = Λ(γ, ·)`.
    pub fn contract_form(&self, gamma: &BForm) -> Result<BMultiVector, ExteriorError> {
        gamma.same_chart_as(self)?;
        if gamma.degree != 1 {
            return Err(ExteriorError::Degree("contraction needs a 1-form".into()));
        }
        Ok(contract(gamma, self))
    }

    /// `Λ(γ, δ)` for a bivector.
    pub fn bivector_eval(&self, gamma: &BForm, delta: &BForm) -> Result<ScalarExpr, ExteriorError> {
        if self.degree != 2 {
            return Err(ExteriorError::Degree("bivector expected".into()));
        }
        let v = self.contract_form(gamma)?;
        delta.pair(&v)
    }

    /// Coefficients in the coordinate frame (`ζ ↦ z^m ∂z`); always smooth.
    pub fn to_smooth_frame(&self) -> BMultiVector {
        let smooth = Arc::new(self.chart.as_smooth());
        let Some(s) = self.chart.singular() else {
            return Graded { chart: smooth, ..self.clone() };
        };
        let from = self.chart.frame();
        let to = smooth.frame();
        let zm = ScalarExpr::sym(self.chart.name(s.index)).powi(s.order as i64);
        let mut out = BMultiVector::zero(&smooth, self.degree);
        for (m, c) in &self.terms {
            let (mm, sign) = reframe(*m, &from, &to);
            let mut v = if sign > 0 { c.clone() } else { -c };
            if m & 1 != 0 {
                v = &v * &zm;
            }
            out.insert(mm, v);
        }
        out
    }

    /// Inverse of [`BMultiVector::to_smooth_frame`] (`∂z ↦ z^{-m} ζ`);
    /// coefficients may acquire negative powers of `z`.
    pub fn to_b_frame(&self, singular: &Arc<Chart>) -> Result<BMultiVector, ExteriorError> {
        let Some(s) = singular.singular() else {
            return Err(ExteriorError::Unsupported("target chart is smooth".into()));
        };
        if self.chart.as_smooth() != singular.as_smooth() {
            return Err(ExteriorError::ChartMismatch);
        }
        let from = self.chart.frame();
        let to = singular.frame();
        let zinv = ScalarExpr::sym(singular.name(s.index)).powi(-(s.order as i64));
        let mut out = BMultiVector::zero(singular, self.degree);
        for (m, c) in &self.terms {
            let (mm, sign) = reframe(*m, &from, &to);
            let mut v = if sign > 0 { c.clone() } else { -c };
            if mm & 1 != 0 {
                v = &v * &zinv;
            }
            out.insert(mm, v);
        }
        Ok(out)
    }

    /// The field along the critical slice as a field on the slice chart:
    /// `ζ` terms vanish there as ordinary vectors and are dropped.
    pub fn restrict_to_slice(&self) -> Result<BMultiVector, ExteriorError> {
        let s = self
            .chart
            .singular()
            .ok_or_else(|| ExteriorError::Unsupported("smooth chart has no critical slice".into()))?;
        let slice = Arc::new(self.chart.critical_slice().expect("singular chart"));
        let z = self.chart.name(s.index).to_string();
        let mut out = BMultiVector::zero(&slice, self.degree);
        for (m, c) in &self.terms {
            if m & 1 != 0 {
                continue;
            }
            let v = c.substitute(&|n| if n == z { Some(ScalarExpr::zero()) } else { None });
            out.insert(m >> 1, v);
        }
        Ok(out)
    }

    /// Number of slots used, for diagnostics.
    pub fn support(&self) -> Vec<usize> {
        let mut all = 0u32;
        for m in self.terms.keys() {
            all |= m;
        }
        bits(all).collect()
    }
}
