//! Exterior algebra over the b^m frame of a chart.
//!
//! On a singular chart with defining coordinate `z` of order `m` the frame is
//! `σ = dz/z^m, dx_1, ..., dx_n` for covectors and `ζ = z^m ∂z, ∂x_1, ...`
//! for vectors, with `σ`/`ζ` in slot 0. Smooth charts use the coordinate frame
//! in chart order. A basis element `e_I` is a bitmask over slots, so all
//! singular behaviour lives in the basis and coefficients stay smooth.
//!
//! Because the b-frame is commuting (`[ζ, ∂x] = 0`), brackets use the
//! coordinate formulas with the frame derivations `b_k` in place of `∂_k`.

mod form;
mod literal;
mod map;
mod multivector;

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::chart::Chart;
use crate::grid::{sweep_exprs, Sweep};
use crate::scalar::{EvalError, ParseError, Point, ScalarExpr};

pub use literal::{parse_form, parse_vector};
pub use map::ChartMap;

/// Marker for covariant (form) storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Co;
/// Marker for contravariant (multivector) storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contra;

pub trait Variance: Clone + Copy + fmt::Debug + PartialEq + Send + Sync + 'static {
    const COVARIANT: bool;
}
impl Variance for Co {
    const COVARIANT: bool = true;
}
impl Variance for Contra {
    const COVARIANT: bool = false;
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExteriorError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("result is not smooth in the target frame: {0}")]
    NotSmooth(String),
    #[error("chart map violates the defining-function condition: {0}")]
    Compatibility(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Homogeneous element of the exterior algebra of the b-frame (forms for
/// [`Co`], multivector fields for [`Contra`]).
#[derive(Clone, PartialEq)]
pub struct Graded<V: Variance> {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<u32, ScalarExpr>,
    _v: PhantomData<V>,
}

/// A b^m-form.
pub type BForm = Graded<Co>;
/// A b^m-multivector field.
pub type BMultiVector = Graded<Contra>;

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |k| mask & (1 << k) != 0)
}

/// Sign of `e_a ∧ e_b` relative to `e_{a|b}` (requires `a & b == 0`).
pub(crate) fn merge_sign(a: u32, b: u32) -> i64 {
    let mut inversions = 0;
    for j in bits(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of elements of `mask` strictly below slot `k`.
pub(crate) fn below(mask: u32, k: usize) -> u32 {
    (mask & ((1u32 << k) - 1)).count_ones()
}

pub(crate) fn parity(n: u32) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<V: Variance> Graded<V> {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Graded {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
            _v: PhantomData,
        }
    }

    pub fn scalar(chart: &Arc<Chart>, f: ScalarExpr) -> Self {
        let mut g = Self::zero(chart, 0);
        g.insert(0, f);
        g
    }

    /// Basis element for a set of frame slots.
    pub fn basis(chart: &Arc<Chart>, slots: &[usize]) -> Self {
        let mut mask = 0u32;
        let mut sign = 1;
        for &s in slots {
            if mask & (1 << s) != 0 {
                return Self::zero(chart, slots.len());
            }
            sign *= merge_sign(mask, 1 << s);
            mask |= 1 << s;
        }
        let mut g = Self::zero(chart, slots.len());
        g.insert(mask, ScalarExpr::int(sign));
        g
    }

    /// Builds from `(mask, coefficient)` pairs; masks must have `degree` bits.
    pub fn from_terms(chart: &Arc<Chart>, degree: usize, terms: impl IntoIterator<Item = (u32, ScalarExpr)>) -> Self {
        let mut g = Self::zero(chart, degree);
        for (m, c) in terms {
            assert_eq!(m.count_ones() as usize, degree, "mask degree");
            g.insert(m, c);
        }
        g
    }

    fn insert(&mut self, mask: u32, c: ScalarExpr) {
        let entry = match self.terms.remove(&mask) {
            Some(old) => &old + &c,
            None => c.simplify(),
        };
        if !entry.is_zero() {
            self.terms.insert(mask, entry);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn terms(&self) -> &BTreeMap<u32, ScalarExpr> {
        &self.terms
    }

    pub fn coeff(&self, mask: u32) -> ScalarExpr {
        self.terms.get(&mask).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// Coefficient of the basis element listing `slots` (any order).
    pub fn coeff_of(&self, slots: &[usize]) -> ScalarExpr {
        let b = Self::basis(&self.chart, slots);
        match b.terms.iter().next() {
            None => ScalarExpr::zero(),
            Some((m, s)) => &self.coeff(*m) * s,
        }
    }

    /// Coefficient of the top-degree basis element.
    pub fn top_coeff(&self) -> ScalarExpr {
        self.coeff((1u32 << self.dim()) - 1)
    }

    /// Coefficient by slot index in degree 1.
    pub fn component(&self, slot: usize) -> ScalarExpr {
        self.coeff(1 << slot)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_chart(&self, other: &Self) -> Result<(), ExteriorError> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(ExteriorError::ChartMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.same_chart(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(ExteriorError::Degree(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = if self.is_zero() && self.degree != other.degree { Self::zero(&self.chart, other.degree) } else { self.clone() };
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        self.map_coeffs(|c| c * f)
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.same_chart(other)?;
        let mut out = Self::zero(&self.chart, self.degree + other.degree);
        if self.degree + other.degree > self.dim() {
            return Ok(out);
        }
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let s = merge_sign(*a, *b);
                let c = f * g;
                out.insert(a | b, if s > 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// `k`-fold wedge power.
    pub fn wedge_pow(&self, k: usize) -> Result<Self, ExteriorError> {
        let mut acc = Self::scalar(&self.chart, ScalarExpr::one());
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Frame derivation `b_k(f)`: `z^m ∂f/∂z` in the singular slot, a
    /// coordinate partial otherwise.
    pub fn frame_derivative(chart: &Chart, slot: usize, f: &ScalarExpr) -> ScalarExpr {
        let frame = chart.frame();
        let name = chart.name(frame[slot]);
        let d = f.diff(name);
        match chart.singular() {
            Some(s) if slot == 0 => &d * &ScalarExpr::sym(name).powi(s.order as i64),
            _ => d,
        }
    }

    /// Applies a frame derivation to every coefficient.
    pub fn derive_coeffs(&self, slot: usize) -> Self {
        let chart = self.chart.clone();
        self.map_coeffs(|c| Self::frame_derivative(&chart, slot, c))
    }

    /// Substitutes into every coefficient.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<ScalarExpr>) -> Self {
        self.map_coeffs(|c| c.substitute(f))
    }

    /// Every coefficient equal to zero after simplification.
    pub fn coefficients(&self) -> Vec<ScalarExpr> {
        self.terms.values().cloned().collect()
    }

    /// Numeric coefficients at a point.
    pub fn eval(&self, p: &Point) -> Result<Vec<(u32, f64)>, EvalError> {
        self.terms.iter().map(|(m, c)| Ok((*m, c.eval(p)?))).collect()
    }

    /// Largest coefficient magnitude over a sample set.
    pub fn sweep(&self, points: &[Point]) -> Sweep {
        sweep_exprs(&self.coefficients(), points)
    }

    /// Human-readable name of slot `k`.
    pub fn slot_name(&self, k: usize) -> String {
        let frame = self.chart.frame();
        let name = self.chart.name(frame[k]);
        match (self.chart.singular(), V::COVARIANT) {
            (Some(_), true) if k == 0 => "B".into(),
            (Some(_), false) if k == 0 => "Z".into(),
            (_, true) => format!("D({name})"),
            (_, false) => format!("P({name})"),
        }
    }

    /// Rebuilds the same element on an equal chart handle.
    /// The same coefficients on a chart with the same coordinates and
    /// singular data but a different box.
    pub fn on_subchart(&self, chart: &Arc<Chart>) -> Result<Self, ExteriorError> {
        if chart.names() != self.chart.names() || chart.singular() != self.chart.singular() {
            return Err(ExteriorError::ChartMismatch);
        }
        Ok(Graded {
            chart: chart.clone(),
            degree: self.degree,
            terms: self.terms.clone(),
            _v: PhantomData,
        })
    }

    pub fn on_chart(&self, chart: &Arc<Chart>) -> Result<Self, ExteriorError> {
        if **chart != *self.chart {
            return Err(ExteriorError::ChartMismatch);
        }
        Ok(Graded {
            chart: chart.clone(),
            degree: self.degree,
            terms: self.terms.clone(),
            _v: PhantomData,
        })
    }
}

impl<V: Variance> fmt::Debug for Graded<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<V: Variance> fmt::Display for Graded<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}


impl<V: Variance> serde::Serialize for Graded<V> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.to_literal())
    }
}
