//! Coordinate charts with an optional defining coordinate for the critical
//! hypersurface, and deterministic sampling of their domain boxes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::scalar::Point;

/// Defining coordinate `z` and singularity order `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Singular {
    pub index: usize,
    pub order: u32,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChartError {
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("coordinate `{0}` has an empty or non-finite interval")]
    BadInterval(String),
    #[error("box has {boxes} intervals for {coords} coordinates")]
    Arity { coords: usize, boxes: usize },
    #[error("defining coordinate `{0}` is not a chart coordinate")]
    UnknownZ(String),
    #[error("singularity order must be at least 1")]
    ZeroOrder,
    #[error("the interval of `{0}` must contain 0 in its interior")]
    ZNotInterior(String),
    #[error("`z` and `m` must be given together")]
    HalfSingular,
    #[error("invalid chart document: {0}")]
    Json(String),
}

/// Named coordinates, a closed domain box, and optional singular data.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    names: Arc<[Arc<str>]>,
    bounds: Vec<(f64, f64)>,
    singular: Option<Singular>,
    periodic: Vec<bool>,
}

/// JSON form of a chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub coords: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Coordinates whose interval is one period of an angle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periodic: Vec<String>,
}

impl Chart {
    pub fn new(
        coords: &[&str],
        bounds: &[(f64, f64)],
        singular: Option<(&str, u32)>,
    ) -> Result<Chart, ChartError> {
        if coords.len() != bounds.len() {
            return Err(ChartError::Arity {
                coords: coords.len(),
                boxes: bounds.len(),
            });
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(ChartError::DuplicateName(c.to_string()));
            }
            let (lo, hi) = bounds[i];
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ChartError::BadInterval(c.to_string()));
            }
        }
        let singular = match singular {
            None => None,
            Some((z, m)) => {
                let index = coords
                    .iter()
                    .position(|c| *c == z)
                    .ok_or_else(|| ChartError::UnknownZ(z.to_string()))?;
                if m == 0 {
                    return Err(ChartError::ZeroOrder);
                }
                let (lo, hi) = bounds[index];
                if !(lo < 0.0 && hi > 0.0) {
                    return Err(ChartError::ZNotInterior(z.to_string()));
                }
                Some(Singular { index, order: m })
            }
        };
        let names: Vec<Arc<str>> = coords.iter().map(|c| Arc::from(*c)).collect();
        Ok(Chart {
            names: names.into(),
            bounds: bounds.to_vec(),
            singular,
            periodic: vec![false; coords.len()],
        })
    }

    pub fn smooth(coords: &[&str], bounds: &[(f64, f64)]) -> Result<Chart, ChartError> {
        Chart::new(coords, bounds, None)
    }

    /// Marks coordinates as periodic (their interval is one period).
    pub fn with_periodic(mut self, names: &[&str]) -> Chart {
        for n in names {
            if let Some(i) = self.index_of(n) {
                self.periodic[i] = true;
            }
        }
        self
    }

    pub fn from_doc(doc: &ChartDoc) -> Result<Chart, ChartError> {
        let coords: Vec<&str> = doc.coords.iter().map(|s| s.as_str()).collect();
        let bounds: Vec<(f64, f64)> = doc.bounds.iter().map(|b| (b[0], b[1])).collect();
        let singular = match (&doc.z, doc.m) {
            (Some(z), Some(m)) => Some((z.as_str(), m)),
            (None, None) => None,
            _ => return Err(ChartError::HalfSingular),
        };
        let periodic: Vec<&str> = doc.periodic.iter().map(|s| s.as_str()).collect();
        for p in &periodic {
            if !coords.contains(p) {
                return Err(ChartError::Json(format!("periodic coordinate `{p}` is not a chart coordinate")));
            }
        }
        Ok(Chart::new(&coords, &bounds, singular)?.with_periodic(&periodic))
    }

    pub fn from_json(text: &str) -> Result<Chart, ChartError> {
        let doc: ChartDoc = serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        Chart::from_doc(&doc)
    }

    pub fn to_doc(&self) -> ChartDoc {
        ChartDoc {
            coords: self.names.iter().map(|s| s.to_string()).collect(),
            bounds: self.bounds.iter().map(|&(a, b)| [a, b]).collect(),
            z: self.singular.map(|s| self.names[s.index].to_string()),
            m: self.singular.map(|s| s.order),
            periodic: self
                .names
                .iter()
                .zip(&self.periodic)
                .filter(|(_, p)| **p)
                .map(|(n, _)| n.to_string())
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("chart serializes")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &Arc<[Arc<str>]> {
        &self.names
    }

    pub fn coord_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| &**s)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn bound(&self, i: usize) -> (f64, f64) {
        self.bounds[i]
    }

    pub fn singular(&self) -> Option<Singular> {
        self.singular
    }

    pub fn is_singular(&self) -> bool {
        self.singular.is_some()
    }

    pub fn order(&self) -> u32 {
        self.singular.map(|s| s.order).unwrap_or(0)
    }

    pub fn z_name(&self) -> Option<&str> {
        self.singular.map(|s| &*self.names[s.index])
    }

    pub fn is_periodic(&self, i: usize) -> bool {
        self.periodic[i]
    }

    /// Chart coordinate index of each b-frame slot: `z` first on singular
    /// charts, then the remaining coordinates in chart order.
    pub fn frame(&self) -> Vec<usize> {
        match self.singular {
            None => (0..self.dim()).collect(),
            Some(s) => std::iter::once(s.index)
                .chain((0..self.dim()).filter(|&i| i != s.index))
                .collect(),
        }
    }

    /// Frame slot of a coordinate.
    pub fn slot_of(&self, name: &str) -> Option<usize> {
        let i = self.index_of(name)?;
        self.frame().iter().position(|&j| j == i)
    }

    /// The same coordinates without singular data.
    pub fn as_smooth(&self) -> Chart {
        Chart {
            singular: None,
            ..self.clone()
        }
    }

    /// Same coordinates, new singular data.
    pub fn with_singular(&self, z: &str, m: u32) -> Result<Chart, ChartError> {
        let coords: Vec<&str> = self.coord_names().collect();
        let periodic: Vec<&str> = coords
            .iter()
            .zip(&self.periodic)
            .filter(|(_, p)| **p)
            .map(|(c, _)| *c)
            .collect();
        Ok(Chart::new(&coords, &self.bounds, Some((z, m)))?.with_periodic(&periodic))
    }

    /// Same chart with one interval replaced.
    pub fn with_bound(&self, name: &str, b: (f64, f64)) -> Result<Chart, ChartError> {
        let coords: Vec<&str> = self.coord_names().collect();
        let mut bounds = self.bounds.clone();
        let i = self.index_of(name).ok_or_else(|| ChartError::UnknownZ(name.to_string()))?;
        bounds[i] = b;
        let sing = self.singular.map(|s| (coords[s.index], s.order));
        let periodic: Vec<&str> = coords
            .iter()
            .zip(&self.periodic)
            .filter(|(_, p)| **p)
            .map(|(c, _)| *c)
            .collect();
        Ok(Chart::new(&coords, &bounds, sing)?.with_periodic(&periodic))
    }

    /// Appends a smooth coordinate, keeping singular data.
    pub fn extended(&self, name: &str, bound: (f64, f64)) -> Result<Chart, ChartError> {
        let mut coords: Vec<&str> = self.coord_names().collect();
        coords.push(name);
        let mut bounds = self.bounds.clone();
        bounds.push(bound);
        let sing = self.singular.map(|s| (self.name(s.index), s.order));
        let periodic: Vec<&str> = self
            .coord_names()
            .zip(&self.periodic)
            .filter(|(_, p)| **p)
            .map(|(c, _)| c)
            .collect();
        Ok(Chart::new(&coords, &bounds, sing)?.with_periodic(&periodic))
    }

    /// The critical slice as a smooth chart on the remaining coordinates.
    pub fn critical_slice(&self) -> Option<Chart> {
        let s = self.singular?;
        let coords: Vec<&str> = self
            .coord_names()
            .enumerate()
            .filter(|&(i, _)| i != s.index)
            .map(|(_, c)| c)
            .collect();
        let bounds: Vec<(f64, f64)> = (0..self.dim()).filter(|&i| i != s.index).map(|i| self.bounds[i]).collect();
        let periodic: Vec<&str> = (0..self.dim())
            .filter(|&i| i != s.index && self.periodic[i])
            .map(|i| self.name(i))
            .collect();
        Chart::smooth(&coords, &bounds).ok().map(|c| c.with_periodic(&periodic))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.coord_names().zip(&self.bounds).all(|(n, &(lo, hi))| match p.get(n) {
            Some(v) => v >= lo - 1e-12 && v <= hi + 1e-12,
            None => false,
        })
    }

    pub fn point(&self, values: Vec<f64>) -> Point {
        Point::new(self.names.clone(), values)
    }

    /// Point from `name = value` pairs; unspecified coordinates take the box
    /// midpoint.
    pub fn point_from(&self, pairs: &[(&str, f64)]) -> Point {
        let values = self
            .coord_names()
            .zip(&self.bounds)
            .map(|(n, &(lo, hi))| {
                pairs
                    .iter()
                    .find(|(m, _)| *m == n)
                    .map(|(_, v)| *v)
                    .unwrap_or(0.5 * (lo + hi))
            })
            .collect();
        self.point(values)
    }

    /// `n` low-discrepancy points of the whole box.
    pub fn sample_box(&self, n: usize, seed: u64) -> Vec<Point> {
        let d = self.dim();
        (0..n)
            .map(|i| {
                let u = halton_point(i, d, seed);
                let v = (0..d)
                    .map(|k| {
                        let (lo, hi) = self.bounds[k];
                        lo + u[k] * (hi - lo)
                    })
                    .collect();
                self.point(v)
            })
            .collect()
    }

    /// `n` points with `|z| >= margin * width(z)`. Identical to
    /// [`Chart::sample_box`] on smooth charts.
    pub fn sample_off_z(&self, n: usize, seed: u64, margin: f64) -> Vec<Point> {
        let Some(s) = self.singular else {
            return self.sample_box(n, seed);
        };
        let d = self.dim();
        let (lo, hi) = self.bounds[s.index];
        let gap = margin * (hi - lo);
        let l1 = (-gap - lo).max(0.0);
        let l2 = (hi - gap).max(0.0);
        (0..n)
            .map(|i| {
                let u = halton_point(i, d, seed);
                let v = (0..d)
                    .map(|k| {
                        if k == s.index {
                            let t = u[k] * (l1 + l2);
                            if t < l1 {
                                lo + t
                            } else {
                                gap + (t - l1)
                            }
                        } else {
                            let (a, b) = self.bounds[k];
                            a + u[k] * (b - a)
                        }
                    })
                    .collect();
                self.point(v)
            })
            .collect()
    }

    /// `n` points on the slice `z = 0`. Empty on smooth charts.
    pub fn sample_on_z(&self, n: usize, seed: u64) -> Vec<Point> {
        let Some(s) = self.singular else {
            return Vec::new();
        };
        let d = self.dim();
        (0..n)
            .map(|i| {
                let u = halton_point(i, d - 1, seed);
                let mut it = u.into_iter();
                let v = (0..d)
                    .map(|k| {
                        if k == s.index {
                            0.0
                        } else {
                            let (a, b) = self.bounds[k];
                            a + it.next().unwrap() * (b - a)
                        }
                    })
                    .collect();
                self.point(v)
            })
            .collect()
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton point `i` in `[0,1)^d`, rotated by a seed-dependent shift.
pub fn halton_point(i: usize, d: usize, seed: u64) -> Vec<f64> {
    (0..d)
        .map(|k| {
            let base = PRIMES[k % PRIMES.len()];
            let h = radical_inverse(i as u64 + 1, base);
            let shift = ((seed as f64) * (base as f64).sqrt()).fract();
            let u = (h + shift).fract();
            u.clamp(1e-9, 1.0 - 1e-9)
        })
        .collect()
}


impl Serialize for Chart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}
