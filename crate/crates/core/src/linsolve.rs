//! Linear systems with symbolic coefficients.
//!
//! Overdetermined-but-consistent systems `M x = b` (more rows than unknowns)
//! are solved by choosing a square row subset whose determinant is not
//! identically zero and is nonzero on the sample grid, then applying the
//! adjugate formula `x = adj(M_S) b_S / det(M_S)`. Rows left out are checked
//! for consistency on the grid. A pointwise numeric solver is provided for
//! cross-checks and for points where every symbolic pivot degenerates.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::grid::sweep;
use crate::scalar::{EvalError, Point, ScalarExpr};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolveError {
    #[error("system has {rows} rows but {cols} unknowns")]
    Shape { rows: usize, cols: usize },
    #[error("every square subsystem is singular")]
    Singular,
    #[error("singular system at {0}")]
    SingularAt(String),
    #[error("inconsistent system: residual {residual:.3e} at {at}")]
    Inconsistent { residual: f64, at: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Symbolic solution of `M x = b_k` for one or more right-hand sides.
#[derive(Clone, Debug)]
pub struct Solution {
    /// One solution vector per right-hand side.
    pub x: Vec<Vec<ScalarExpr>>,
    /// Rows of `M` used for the square subsystem.
    pub rows: Vec<usize>,
    pub det: ScalarExpr,
    /// Smallest `|det|` over the sample points.
    pub pivot_min: f64,
    /// Largest residual of the full system over the sample points.
    pub residual: f64,
    /// Points where the chosen determinant is below the pivot threshold.
    pub weak_pivots: Vec<Point>,
}

const PIVOT_FLOOR: f64 = 1e-12;

/// Determinant by cofactor expansion with memoized minors.
pub fn determinant(m: &[Vec<ScalarExpr>]) -> ScalarExpr {
    let n = m.len();
    if n == 0 {
        return ScalarExpr::one();
    }
    let mut memo = HashMap::new();
    minor(m, &(0..n).collect::<Vec<_>>(), (1u64 << n) - 1, &mut memo)
}

/// Determinant of the submatrix on `rows` (in order) and the column set `cols`.
fn minor(m: &[Vec<ScalarExpr>], rows: &[usize], cols: u64, memo: &mut HashMap<u64, ScalarExpr>) -> ScalarExpr {
    if cols == 0 {
        return ScalarExpr::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let depth = rows.len() - cols.count_ones() as usize;
    let r = rows[depth];
    let mut terms = Vec::new();
    let mut sign = 1;
    for c in 0..64 {
        if cols & (1 << c) == 0 {
            continue;
        }
        let a = &m[r][c];
        if !a.is_zero() {
            let sub = minor(m, rows, cols & !(1 << c), memo);
            if !sub.is_zero() {
                let t = a * &sub;
                terms.push(if sign > 0 { t } else { -t });
            }
        }
        sign = -sign;
    }
    let v: ScalarExpr = terms.into_iter().sum();
    memo.insert(cols, v.clone());
    v
}

/// Adjugate of a square matrix: `adj[i][j] = (-1)^{i+j} minor(j, i)`.
pub fn adjugate(m: &[Vec<ScalarExpr>]) -> Vec<Vec<ScalarExpr>> {
    let n = m.len();
    let mut adj = vec![vec![ScalarExpr::zero(); n]; n];
    for r in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&i| i != r).collect();
        let mut memo = HashMap::new();
        for c in 0..n {
            let cols = ((1u64 << n) - 1) & !(1 << c);
            let v = if n == 1 { ScalarExpr::one() } else { minor(m, &rows, cols, &mut memo) };
            adj[c][r] = if (r + c) % 2 == 0 { v } else { -v };
        }
    }
    adj
}

/// Row subsets of size `k` from `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

struct Candidate {
    rows: Vec<usize>,
    det: ScalarExpr,
    min: f64,
    weak: Vec<Point>,
}

impl Candidate {
    /// Lower is better: full-grid pivots first, then exact division, then
    /// shorter determinants, then larger pivots.
    fn rank(&self) -> (bool, bool, usize, f64) {
        (!self.weak.is_empty(), !self.det.is_monomial(), self.det.term_count(), -self.min)
    }
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    let (x, y) = (a.rank(), b.rank());
    (x.0, x.1, x.2).cmp(&(y.0, y.1, y.2)).then(x.3.total_cmp(&y.3)).is_lt()
}

/// Solves `M x = b_k` symbolically, pivots checked on `points`.
pub fn solve(m: &[Vec<ScalarExpr>], rhs: &[Vec<ScalarExpr>], points: &[Point], tol: f64) -> Result<Solution, SolveError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows < cols || cols == 0 || cols > 20 {
        return Err(SolveError::Shape { rows, cols });
    }
    // scaling a row (and its right-hand sides) keeps the solution and
    // keeps determinants free of nested inverse powers
    let mut m = m.to_vec();
    let mut rhs = rhs.to_vec();
    for r in 0..rows {
        let den = ScalarExpr::common_denominator(&m[r]);
        if !den.is_one() {
            for e in m[r].iter_mut() {
                *e = (&*e * &den).simplify();
            }
            for b in rhs.iter_mut() {
                b[r] = (&b[r] * &den).simplify();
            }
        }
    }
    let (m, rhs) = (&m[..], &rhs[..]);
    let mut best: Option<Candidate> = None;
    for subset in subsets(rows, cols) {
        let sub: Vec<Vec<ScalarExpr>> = subset.iter().map(|&r| m[r].clone()).collect();
        let det = determinant(&sub);
        if det.is_zero() {
            continue;
        }
        let s = sweep(points, |p| det.eval(p).ok());
        let mut weak: Vec<Point> = s.skipped.clone();
        if s.min < PIVOT_FLOOR {
            let d = det.clone();
            weak.extend(points.iter().filter(|p| d.eval(p).map(|v| v.abs() < PIVOT_FLOOR).unwrap_or(false)).cloned());
        }
        let cand = Candidate { rows: subset, det, min: s.min, weak };
        let done = cand.weak.is_empty() && cand.det.as_rational().is_some();
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
        if done {
            break;
        }
    }
    let best = best.ok_or(SolveError::Singular)?;
    let sub: Vec<Vec<ScalarExpr>> = best.rows.iter().map(|&r| m[r].clone()).collect();
    let adj = adjugate(&sub);
    let inv_det = best.det.recip();
    let x: Vec<Vec<ScalarExpr>> = rhs
        .iter()
        .map(|b| {
            (0..cols)
                .map(|i| {
                    let num: ScalarExpr = best.rows.iter().enumerate().map(|(k, &r)| &adj[i][k] * &b[r]).sum();
                    &num * &inv_det
                })
                .collect()
        })
        .collect();
    let residual = residual(m, rhs, &x, points)?;
    if residual.0 > tol {
        return Err(SolveError::Inconsistent {
            residual: residual.0,
            at: residual.1.map(|p| p.to_string()).unwrap_or_default(),
        });
    }
    Ok(Solution {
        x,
        rows: best.rows,
        det: best.det,
        pivot_min: best.min,
        residual: residual.0,
        weak_pivots: best.weak,
    })
}

/// Largest `|M x - b|` entry over the points (points where the solution is
/// undefined are ignored, they are reported as weak pivots instead).
fn residual(
    m: &[Vec<ScalarExpr>],
    rhs: &[Vec<ScalarExpr>],
    x: &[Vec<ScalarExpr>],
    points: &[Point],
) -> Result<(f64, Option<Point>), SolveError> {
    let s = sweep(points, |p| {
        let mv: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|e| e.eval(p)).collect::<Result<_, _>>()).collect::<Result<_, _>>().ok()?;
        let mut worst: f64 = 0.0;
        for (b, xs) in rhs.iter().zip(x) {
            let xv: Vec<f64> = xs.iter().map(|e| e.eval(p)).collect::<Result<_, _>>().ok()?;
            for (row, bi) in mv.iter().zip(b) {
                let lhs: f64 = row.iter().zip(&xv).map(|(a, b)| a * b).sum();
                let r = (lhs - bi.eval(p).ok()?).abs() / (1.0 + xv.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
                worst = worst.max(r);
            }
        }
        Some(worst)
    });
    Ok((s.max, s.argmax))
}

/// Numeric least-squares solve of `M x = b` at a point. Returns the
/// solution and the residual norm.
pub fn solve_at(m: &[Vec<ScalarExpr>], b: &[ScalarExpr], p: &Point) -> Result<(Vec<f64>, f64), SolveError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = DMatrix::zeros(rows, cols);
    for (i, r) in m.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            a[(i, j)] = e.eval(p)?;
        }
    }
    let bv = DVector::from_iterator(rows, b.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>, _>>()?);
    least_squares(&a, &bv).ok_or_else(|| SolveError::SingularAt(p.to_string()))
}

/// Minimum-norm least-squares solution and residual norm.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<(Vec<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let x = svd.solve(b, 1e-12).ok()?;
    let r = (a * &x - b).norm();
    Some((x.iter().copied().collect(), r))
}
