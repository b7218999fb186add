//! The Jacobi pair of a contact form evaluated point by point.
//!
//! At each point the contact system `M Y = b` is solved numerically together
//! with its frame derivatives `M ∂Y = ∂b − (∂M) Y`, which is all the
//! brackets `[Λ,Λ]` and `[Λ,R]` need. Used where the symbolic pair is too
//! large to build.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{JacobiError, TransversalityVerdict, Verification};
use crate::contact::ContactSystem;
use crate::exterior::{merge_sign, parity, BForm};
use crate::grid::GridConfig;
use crate::scalar::{Point, ScalarExpr};

/// Multivector with numeric coefficients in the frame of a chart.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumMultiVector {
    pub degree: usize,
    pub terms: BTreeMap<u32, f64>,
}

impl NumMultiVector {
    pub fn zero(degree: usize) -> NumMultiVector {
        NumMultiVector {
            degree,
            terms: BTreeMap::new(),
        }
    }

    fn insert(&mut self, m: u32, v: f64) {
        if v != 0.0 {
            *self.terms.entry(m).or_insert(0.0) += v;
        }
    }

    pub fn add(&self, other: &NumMultiVector, s: f64) -> NumMultiVector {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.insert(*m, s * v);
        }
        out
    }

    pub fn scale(&self, s: f64) -> NumMultiVector {
        NumMultiVector {
            degree: self.degree,
            terms: self.terms.iter().map(|(m, v)| (*m, s * v)).collect(),
        }
    }

    pub fn wedge(&self, other: &NumMultiVector) -> NumMultiVector {
        let mut out = NumMultiVector::zero(self.degree + other.degree);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if a & b == 0 {
                    out.insert(a | b, merge_sign(*a, *b) as f64 * f * g);
                }
            }
        }
        out
    }

    fn right_derivative(&self, j: usize) -> NumMultiVector {
        let mut out = NumMultiVector::zero(self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            if m & (1 << j) != 0 {
                out.insert(m ^ (1 << j), parity((m >> (j + 1)).count_ones()) as f64 * c);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// A multivector's value and its frame derivatives `b_k` at a point.
#[derive(Clone, Debug)]
pub struct Jet1 {
    pub value: NumMultiVector,
    pub frame_derivs: Vec<NumMultiVector>,
}

/// Schouten–Nijenhuis bracket from first jets, same sign rule as
/// [`crate::exterior::BMultiVector::schouten`].
pub fn schouten_at(a: &Jet1, b: &Jet1) -> NumMultiVector {
    let (p, q) = (a.value.degree, b.value.degree);
    let sign = if ((p - 1) * (q - 1)) % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = NumMultiVector::zero(p + q - 1);
    for j in 0..a.frame_derivs.len() {
        out = out.add(&a.value.right_derivative(j).wedge(&b.frame_derivs[j]), 1.0);
        out = out.add(&b.value.right_derivative(j).wedge(&a.frame_derivs[j]), -sign);
    }
    out
}

/// Lichnerowicz convention: sign flipped for two even degrees.
pub fn schouten_lichnerowicz_at(a: &Jet1, b: &Jet1) -> NumMultiVector {
    let s = schouten_at(a, b);
    if a.value.degree % 2 == 0 && b.value.degree % 2 == 0 {
        s.scale(-1.0)
    } else {
        s
    }
}

/// `R` and `Λ` with first frame derivatives at one point.
#[derive(Clone, Debug)]
pub struct PointJacobi {
    pub reeb: Jet1,
    pub lambda: Jet1,
    /// Residual of the overdetermined system for `R`.
    pub reeb_residual: f64,
}

impl PointJacobi {
    /// `[Λ,Λ] − 2R∧Λ` and `[Λ,R]`.
    pub fn defects(&self) -> (NumMultiVector, NumMultiVector) {
        let ll = schouten_lichnerowicz_at(&self.lambda, &self.lambda);
        let rl = self.reeb.value.wedge(&self.lambda.value);
        let lr = schouten_at(&self.lambda, &self.reeb);
        (ll.add(&rl, -2.0), lr)
    }
}

/// The contact system of `α` with the frame derivatives of its entries.
#[derive(Clone, Debug)]
pub struct PointwiseJacobi {
    sys: ContactSystem,
    alpha: Vec<ScalarExpr>,
    d_alpha: Vec<Vec<ScalarExpr>>,
    d_matrix: Vec<Vec<Vec<ScalarExpr>>>,
    dim: usize,
    order: u32,
}

fn eval(e: &ScalarExpr, p: &Point) -> Result<f64, JacobiError> {
    e.eval(p).map_err(|err| JacobiError::Invalid(format!("{err} at {p}")))
}

fn eval_matrix(m: &[Vec<ScalarExpr>], p: &Point) -> Result<DMatrix<f64>, JacobiError> {
    let (r, c) = (m.len(), m[0].len());
    let mut out = DMatrix::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            out[(i, j)] = eval(&m[i][j], p)?;
        }
    }
    Ok(out)
}

impl PointwiseJacobi {
    pub fn new(alpha: &BForm, cfg: &GridConfig) -> Result<PointwiseJacobi, JacobiError> {
        let chart = alpha.chart();
        let sys = ContactSystem::new(alpha, &GridConfig { off_z: 0, on_z: 0, ..cfg.clone() })?;
        let dim = chart.dim();
        let deriv = |e: &ScalarExpr, k: usize| BForm::frame_derivative(chart, k, e);
        let d_matrix = (0..dim)
            .map(|k| sys.matrix().iter().map(|row| row.iter().map(|e| deriv(e, k)).collect()).collect())
            .collect();
        let comps: Vec<ScalarExpr> = (0..dim).map(|j| alpha.component(j)).collect();
        let d_alpha = (0..dim).map(|k| comps.iter().map(|e| deriv(e, k)).collect()).collect();
        Ok(PointwiseJacobi {
            sys,
            alpha: comps,
            d_alpha,
            d_matrix,
            dim,
            order: chart.order(),
        })
    }

    pub fn at(&self, p: &Point) -> Result<PointJacobi, JacobiError> {
        self.eval_at(p, true)
    }

    /// Values only; the frame derivatives are left at zero.
    pub fn values_at(&self, p: &Point) -> Result<PointJacobi, JacobiError> {
        self.eval_at(p, false)
    }

    fn eval_at(&self, p: &Point, derivs: bool) -> Result<PointJacobi, JacobiError> {
        let d = self.dim;
        let m = eval_matrix(self.sys.matrix(), p)?;
        let a: Vec<f64> = self.alpha.iter().map(|e| eval(e, p)).collect::<Result<_, _>>()?;
        let (dm, da): (Vec<DMatrix<f64>>, Vec<Vec<f64>>) = if derivs {
            (
                self.d_matrix.iter().map(|x| eval_matrix(x, p)).collect::<Result<_, _>>()?,
                self.d_alpha
                    .iter()
                    .map(|row| row.iter().map(|e| eval(e, p)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<_, _>>()?,
            )
        } else {
            (vec![DMatrix::zeros(d + 1, d); d], vec![vec![0.0; d]; d])
        };
        let svd = m.clone().svd(true, true);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(smin > 1e-12) {
            return Err(JacobiError::Invalid(format!("contact system degenerate at {p}")));
        }
        let solve = |b: &DVector<f64>| svd.solve(b, 1e-14).expect("full rank");
        // consistent overdetermined systems: M ∂Y = ∂b − (∂M) Y
        let jet = |b: DVector<f64>, db: Vec<DVector<f64>>| -> (DVector<f64>, Vec<DVector<f64>>) {
            let y = solve(&b);
            let dy = (0..d).map(|k| solve(&(&db[k] - &dm[k] * &y))).collect();
            (y, dy)
        };
        let mut e0 = DVector::zeros(d + 1);
        e0[0] = 1.0;
        let (r, dr) = jet(e0.clone(), vec![DVector::zeros(d + 1); d]);
        let reeb_residual = (&m * &r - &e0).amax();
        // Λ^#(e^j) = Y_j with α(Y_j) = 0, ι_{Y_j} dα = α R^j − e^j
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut b = DVector::zeros(d + 1);
            for i in 0..d {
                b[i + 1] = a[i] * r[j] - if i == j { 1.0 } else { 0.0 };
            }
            let db = (0..d)
                .map(|k| {
                    let mut v = DVector::zeros(d + 1);
                    for i in 0..d {
                        v[i + 1] = da[k][i] * r[j] + a[i] * dr[k][j];
                    }
                    v
                })
                .collect();
            cols.push(jet(b, db));
        }
        let vector = |v: &DVector<f64>| {
            let mut out = NumMultiVector::zero(1);
            for i in 0..d {
                out.insert(1 << i, v[i]);
            }
            out
        };
        let bivector = |pick: &dyn Fn(usize, usize) -> f64| {
            let mut out = NumMultiVector::zero(2);
            for j in 0..d {
                for k in j + 1..d {
                    out.insert((1 << j) | (1 << k), pick(j, k));
                }
            }
            out
        };
        let reeb = Jet1 {
            value: vector(&r),
            frame_derivs: dr.iter().map(vector).collect(),
        };
        let lambda = Jet1 {
            value: bivector(&|j, k| cols[j].0[k]),
            frame_derivs: (0..d).map(|s| bivector(&|j, k| cols[j].1[s][k])).collect(),
        };
        Ok(PointJacobi {
            reeb,
            lambda,
            reeb_residual,
        })
    }

    /// Largest residual of `α(R) = 1`, `ι_R dα = 0` over the points.
    pub fn reeb_residual(&self, points: &[Point]) -> Result<f64, JacobiError> {
        let v = points
            .par_iter()
            .map(|p| self.values_at(p).map(|j| j.reeb_residual))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(v.into_iter().fold(0.0, f64::max))
    }

    /// Both Jacobi identities on the points.
    pub fn verify_on(&self, points: &[Point], tol: f64) -> Result<Verification, JacobiError> {
        let v = points
            .par_iter()
            .map(|p| {
                let (a, b) = self.at(p)?.defects();
                Ok((a.max_abs(), b.max_abs()))
            })
            .collect::<Result<Vec<_>, JacobiError>>()?;
        Ok(Verification {
            lambda_lambda: v.iter().map(|x| x.0).fold(0.0, f64::max),
            lambda_reeb: v.iter().map(|x| x.1).fold(0.0, f64::max),
            tol,
        })
    }

    /// Top coefficient of `Λ^n (∧R)` in the b-frame.
    fn top_b(&self, p: &Point) -> Result<f64, JacobiError> {
        let j = self.values_at(p)?;
        let n = self.dim / 2;
        let mut top = NumMultiVector {
            degree: 0,
            terms: [(0u32, 1.0)].into(),
        };
        for _ in 0..n {
            top = top.wedge(&j.lambda.value);
        }
        if self.dim % 2 == 1 {
            top = top.wedge(&j.reeb.value);
        }
        Ok(top.terms.get(&((1u32 << self.dim) - 1)).copied().unwrap_or(0.0))
    }

    /// The transversality test of [`super::bjacobi_transversality`]. In the
    /// coordinate frame the top coefficient is `z^m c` with `c` the b-frame
    /// coefficient, so on `Z` it vanishes and its `z`-derivative is `c` for
    /// `m = 1` and `0` for `m ≥ 2`.
    pub fn transversality(&self, chart: &crate::chart::Chart, cfg: &GridConfig) -> Result<PointwiseTransversality, JacobiError> {
        let z = chart.z_name().map(str::to_string);
        let smooth_top = |p: &Point| -> Result<f64, JacobiError> {
            let c = self.top_b(p)?;
            Ok(match &z {
                Some(name) => p.get(name).unwrap_or(0.0).powi(self.order as i32) * c,
                None => c,
            })
        };
        let off: Vec<f64> = cfg
            .off_points(chart)
            .par_iter()
            .map(|p| smooth_top(p).map(f64::abs))
            .collect::<Result<_, _>>()?;
        let min_off_z = off.iter().cloned().fold(f64::INFINITY, f64::min);
        if z.is_none() {
            let verdict = if min_off_z > cfg.tol {
                TransversalityVerdict::NoCriticalSet
            } else {
                TransversalityVerdict::NotTransversal
            };
            return Ok(PointwiseTransversality {
                max_on_z: 0.0,
                min_gradient_on_z: 0.0,
                min_off_z,
                verdict,
            });
        }
        let grads: Vec<f64> = cfg
            .on_points(chart)
            .par_iter()
            .map(|p| {
                let c = self.top_b(p)?;
                Ok(if self.order == 1 { c.abs() } else { 0.0 })
            })
            .collect::<Result<_, JacobiError>>()?;
        let min_gradient_on_z = grads.iter().cloned().fold(f64::INFINITY, f64::min);
        let verdict = if min_off_z > 0.0 && min_gradient_on_z >= 1e-6 {
            TransversalityVerdict::Transversal
        } else {
            TransversalityVerdict::NotTransversal
        };
        Ok(PointwiseTransversality {
            max_on_z: 0.0,
            min_gradient_on_z,
            min_off_z,
            verdict,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointwiseTransversality {
    pub max_on_z: f64,
    pub min_gradient_on_z: f64,
    pub min_off_z: f64,
    pub verdict: TransversalityVerdict,
}
