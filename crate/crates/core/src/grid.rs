//! Grid configuration and pointwise sweeps over sample sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::scalar::{Point, ScalarExpr};

/// Sampling and tolerance settings shared by every grid check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub off_z: usize,
    pub on_z: usize,
    pub seed: u64,
    pub z_margin: f64,
    pub tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            off_z: 200,
            on_z: 100,
            seed: 42,
            z_margin: 1e-3,
            tol: 1e-8,
        }
    }
}

impl GridConfig {
    pub fn off_points(&self, chart: &Chart) -> Vec<Point> {
        chart.sample_off_z(self.off_z, self.seed, self.z_margin)
    }

    pub fn on_points(&self, chart: &Chart) -> Vec<Point> {
        chart.sample_on_z(self.on_z, self.seed)
    }

    /// Off-slice and on-slice samples together.
    pub fn all_points(&self, chart: &Chart) -> Vec<Point> {
        let mut v = self.off_points(chart);
        v.extend(self.on_points(chart));
        v
    }

    pub fn with_tol(&self, tol: f64) -> GridConfig {
        GridConfig { tol, ..self.clone() }
    }
}

/// Extremes of `|f|` over a sample set.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub count: usize,
    pub max: f64,
    pub argmax: Option<Point>,
    pub min: f64,
    pub argmin: Option<Point>,
    pub skipped: Vec<Point>,
}

impl Sweep {
    pub fn empty() -> Sweep {
        Sweep {
            count: 0,
            max: 0.0,
            argmax: None,
            min: f64::INFINITY,
            argmin: None,
            skipped: Vec::new(),
        }
    }

    pub fn merge(mut self, other: Sweep) -> Sweep {
        self.count += other.count;
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin;
        }
        self.skipped.extend(other.skipped);
        self
    }
}

/// Evaluates `f` at every point (in parallel) and collects extremes of
/// `|f|`. Points where `f` fails are listed in `skipped`. Results do not
/// depend on the thread partition.
pub fn sweep<F>(points: &[Point], f: F) -> Sweep
where
    F: Fn(&Point) -> Option<f64> + Sync,
{
    let vals: Vec<Option<f64>> = points.par_iter().map(|p| f(p)).collect();
    let mut s = Sweep::empty();
    for (p, v) in points.iter().zip(vals) {
        match v {
            Some(v) if v.is_finite() => {
                let a = v.abs();
                s.count += 1;
                if a > s.max || s.argmax.is_none() {
                    s.max = a;
                    s.argmax = Some(p.clone());
                }
                if a < s.min {
                    s.min = a;
                    s.argmin = Some(p.clone());
                }
            }
            _ => s.skipped.push(p.clone()),
        }
    }
    s
}

/// Sweep of a single expression.
pub fn sweep_expr(e: &ScalarExpr, points: &[Point]) -> Sweep {
    sweep(points, |p| e.eval(p).ok())
}

/// Sweep of the largest absolute value among several expressions.
pub fn sweep_exprs(es: &[ScalarExpr], points: &[Point]) -> Sweep {
    sweep(points, |p| {
        let mut m: f64 = 0.0;
        for e in es {
            m = m.max(e.eval(p).ok()?.abs());
        }
        Some(m)
    })
}

/// Outcome of comparing two expressions on a sample set.
#[derive(Clone, Debug)]
pub struct GridComparison {
    pub equal: bool,
    pub max_discrepancy: f64,
    pub worst: Option<Point>,
    pub samples: usize,
    pub skipped: Vec<Point>,
}

pub fn equal_on_points(e1: &ScalarExpr, e2: &ScalarExpr, points: &[Point], tol: f64) -> GridComparison {
    let s = sweep(points, |p| Some(e1.eval(p).ok()? - e2.eval(p).ok()?));
    GridComparison {
        equal: s.max <= tol,
        max_discrepancy: s.max,
        worst: s.argmax,
        samples: s.count,
        skipped: s.skipped,
    }
}

/// Compares `e1` and `e2` at `n` low-discrepancy points of the chart box
/// (off the critical slice on singular charts).
pub fn equal_on_grid(e1: &ScalarExpr, e2: &ScalarExpr, chart: &Chart, n: usize, tol: f64) -> GridComparison {
    let cfg = GridConfig::default();
    let pts = chart.sample_off_z(n, cfg.seed, cfg.z_margin);
    equal_on_points(e1, e2, &pts, tol)
}
