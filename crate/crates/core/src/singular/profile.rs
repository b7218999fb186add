//! Profile functions for desingularization and singularization.
//!
//! A profile is assembled on `x >= 0` from analytic pieces and extended to
//! `x < 0` by parity. Consecutive prescribed pieces are connected by a
//! [`Join`]: the logarithm of the derivative is blended with a flat smooth
//! step and tilted by a bump so that the integral lands exactly on the next
//! piece. The result is `C^∞` and monotone on every join by construction.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::jet::Jet;
use super::SingularError;
use crate::scalar::{FnRef, SmoothFn};

/// Jet order used for all evaluations.
const ORDER: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    DesingEven,
    DesingOdd,
    SingEven,
    SingOdd,
    SingOnesided,
}

impl ProfileKind {
    pub fn label(self) -> &'static str {
        match self {
            ProfileKind::DesingEven => "desing-even",
            ProfileKind::DesingOdd => "desing-odd",
            ProfileKind::SingEven => "sing-even",
            ProfileKind::SingOdd => "sing-odd",
            ProfileKind::SingOnesided => "sing-onesided",
        }
    }

    pub fn parse(s: &str) -> Option<ProfileKind> {
        [
            ProfileKind::DesingEven,
            ProfileKind::DesingOdd,
            ProfileKind::SingEven,
            ProfileKind::SingOdd,
            ProfileKind::SingOnesided,
        ]
        .into_iter()
        .find(|k| k.label() == s)
    }

    /// Singularity order `m` served by this kind at parameter `k`.
    pub fn order(self, k: u32) -> u32 {
        match self {
            ProfileKind::DesingEven | ProfileKind::SingEven => 2 * k,
            _ => 2 * k + 1,
        }
    }

    pub fn min_k(self) -> u32 {
        match self {
            ProfileKind::DesingEven | ProfileKind::SingEven => 1,
            _ => 0,
        }
    }

    pub fn is_desing(self) -> bool {
        matches!(self, ProfileKind::DesingEven | ProfileKind::DesingOdd)
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

/// One analytic piece, in the profile's own variable.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Piece {
    /// `slope x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `a x² + c`
    Quadratic { a: f64, c: f64 },
    /// `coef (x − center)^power + offset`, `power < 0`
    Pole { coef: f64, center: f64, power: i32, offset: f64 },
    /// `log|x − center| + offset`
    Log { center: f64, offset: f64 },
    Join(Box<Join>),
}

impl Piece {
    pub fn jet(&self, x: f64, n: usize) -> Result<Jet, String> {
        let v = Jet::variable(x, n);
        Ok(match self {
            Piece::Affine { slope, intercept } => v.scale(*slope).offset(*intercept),
            Piece::Quadratic { a, c } => (&v * &v).scale(*a).offset(*c),
            Piece::Pole { coef, center, power, offset } => {
                if x == *center {
                    return Err(format!("pole at {center}"));
                }
                v.offset(-center).powi(*power).scale(*coef).offset(*offset)
            }
            Piece::Log { center, offset } => {
                if x == *center {
                    return Err(format!("logarithmic singularity at {center}"));
                }
                v.offset(-center).ln_abs().offset(*offset)
            }
            Piece::Join(j) => j.jet(x, n)?,
        })
    }

    pub fn value(&self, x: f64) -> Result<f64, String> {
        Ok(self.jet(x, 0)?.value())
    }

    /// Position of a pole of the derivative, if any.
    pub fn pole(&self) -> Option<f64> {
        match self {
            Piece::Pole { center, .. } | Piece::Log { center, .. } => Some(*center),
            _ => None,
        }
    }

    /// The constant `(x − c)^m f'(x)` when this is a pole piece of exact
    /// order `m` at `c`.
    fn weighted_constant(&self, m: u32) -> Option<f64> {
        match self {
            Piece::Pole { coef, power, .. } if 1 - power == m as i32 => Some(coef * *power as f64),
            Piece::Log { .. } if m == 1 => Some(1.0),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Piece::Affine { slope, intercept } => format!("{slope}*x + {intercept}"),
            Piece::Quadratic { a, c } => format!("{a}*x^2 + {c}"),
            Piece::Pole { coef, center, power, offset } => format!("{coef}*(x - {center})^({power}) + {offset}"),
            Piece::Log { center, offset } => format!("log|x - {center}| + {offset}"),
            Piece::Join(j) => format!("join[{} -> {}]", j.left.describe(), j.right.describe()),
        }
    }
}

const GL_NODES: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];
const PANELS: usize = 64;
/// `e^{-700}` is below the smallest normal double.
const FLAT: f64 = 1.0 / 700.0;

fn gauss(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL_NODES.iter().map(|&(x, w)| w * (f(m - r * x) + f(m + r * x))).sum::<f64>()
}

/// Flat smooth step on `[0, 1]` as a jet in `x`, where `s = (x − a) / len`.
fn step_jet(s: f64, len: f64, n: usize) -> Jet {
    if s <= 0.0 {
        return Jet::constant(0.0, n);
    }
    if s >= 1.0 {
        return Jet::constant(1.0, n);
    }
    let sj = Jet::variable(s, n).rescaled(1.0 / len);
    let one_minus = (-&sj).offset(1.0);
    let flat = |u: &Jet| {
        if u.value() < FLAT {
            Jet::constant(0.0, n)
        } else {
            u.recip().scale(-1.0).exp()
        }
    };
    let a = flat(&sj);
    let b = flat(&one_minus);
    a.div(&(&a + &b))
}

/// `e^{4 − 1/(s(1−s))}`, equal to 1 at `s = 1/2` and flat at both ends.
fn bump_jet(s: f64, len: f64, n: usize) -> Jet {
    if s <= 0.0 || s >= 1.0 {
        return Jet::constant(0.0, n);
    }
    let sj = Jet::variable(s, n).rescaled(1.0 / len);
    let q = &sj * &(-&sj).offset(1.0);
    if q.value() < FLAT {
        return Jet::constant(0.0, n);
    }
    q.recip().scale(-1.0).offset(4.0).exp()
}

/// Monotone `C^∞` connection of two pieces on `[a, b]`.
#[derive(Clone, Debug, Serialize)]
pub struct Join {
    pub a: f64,
    pub b: f64,
    pub left: Piece,
    pub right: Piece,
    /// Sign of the derivative on the join.
    pub sign: f64,
    /// Tilt coefficient solved so the value at `b` matches `right`.
    pub lambda: f64,
    pub start: f64,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl Join {
    pub fn new(a: f64, b: f64, left: Piece, right: Piece) -> Result<Join, String> {
        let la = left.jet(a, 1)?.derivative(1);
        let rb = right.jet(b, 1)?.derivative(1);
        let start = left.value(a)?;
        let target = right.value(b)? - start;
        let sign = la.signum();
        if la == 0.0 || rb.signum() != sign || target.signum() != sign {
            return Err(format!(
                "no monotone join on [{a}, {b}]: slopes {la}, {rb}, rise {target}"
            ));
        }
        let mut j = Join {
            a,
            b,
            left,
            right,
            sign,
            lambda: 0.0,
            start,
            cumulative: Vec::new(),
        };
        let len = (b - a) / PANELS as f64;
        let mut nodes = Vec::with_capacity(PANELS * 8);
        for p in 0..PANELS {
            let (lo, hi) = (a + p as f64 * len, a + (p + 1) as f64 * len);
            let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for &(x, w) in &GL_NODES {
                for y in [m - r * x, m + r * x] {
                    let base = j.log_rate(y, 0)?.value();
                    let bump = bump_jet((y - a) / (b - a), b - a, 0).value();
                    nodes.push((w * r, base, bump));
                }
            }
        }
        let total = |lam: f64| nodes.iter().map(|&(w, h, u)| w * (h + lam * u).exp()).sum::<f64>();
        let goal = target.abs();
        let (mut lo, mut hi) = (-1.0, 1.0);
        while total(lo) > goal {
            lo *= 2.0;
            if lo < -1e4 {
                return Err(format!("join on [{a}, {b}] cannot be tilted down to {goal}"));
            }
        }
        while total(hi) < goal {
            hi *= 2.0;
            if hi > 1e3 {
                return Err(format!("join on [{a}, {b}] cannot be tilted up to {goal}"));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < goal {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        j.lambda = 0.5 * (lo + hi);
        let mut acc = 0.0;
        j.cumulative.push(0.0);
        for p in 0..PANELS {
            let (lo, hi) = (a + p as f64 * len, a + (p + 1) as f64 * len);
            acc += gauss(lo, hi, |y| j.rate(y).unwrap_or(f64::NAN));
            j.cumulative.push(acc);
        }
        Ok(j)
    }

    /// Jet of `log |f'|` on the join.
    fn log_rate(&self, x: f64, n: usize) -> Result<Jet, String> {
        let len = self.b - self.a;
        let s = (x - self.a) / len;
        let l = self.left.jet(x, n + 1)?.shift_down().ln_abs();
        let r = self.right.jet(x, n + 1)?.shift_down().ln_abs();
        let phi = step_jet(s, len, n);
        let mix = &(&l * &(-&phi).offset(1.0)) + &(&r * &phi);
        Ok(&mix + &bump_jet(s, len, n).scale(self.lambda))
    }

    /// `|f'(x)|`.
    fn rate(&self, x: f64) -> Result<f64, String> {
        Ok(self.log_rate(x, 0)?.value().exp())
    }

    fn integral_to(&self, x: f64) -> Result<f64, String> {
        let len = (self.b - self.a) / PANELS as f64;
        let p = (((x - self.a) / len).floor() as usize).min(PANELS - 1);
        let lo = self.a + p as f64 * len;
        let mut err = None;
        let part = gauss(lo, x, |y| {
            self.rate(y).unwrap_or_else(|e| {
                err = Some(e);
                0.0
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(self.cumulative[p] + part),
        }
    }

    pub fn jet(&self, x: f64, n: usize) -> Result<Jet, String> {
        let value = self.start + self.sign * self.integral_to(x)?;
        if n == 0 {
            return Ok(Jet::constant(value, 0));
        }
        let rate = self.log_rate(x, n - 1)?.exp().scale(self.sign);
        Ok(rate.integrate(value))
    }
}

/// A profile `x ↦ amp · F(x / scale)` with `F` assembled from pieces on
/// `[0, ∞)` and extended by parity.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileFn {
    pub kind: ProfileKind,
    pub k: u32,
    pub eps: f64,
    pub name: String,
    pub parity: Parity,
    pub scale: f64,
    pub amp: f64,
    /// Segment start points (profile variable) and pieces.
    pub segments: Vec<(f64, Piece)>,
    /// Singular points in `x`.
    pub poles: Vec<f64>,
    pub descriptions: Vec<String>,
}

impl ProfileFn {
    fn piece_at(&self, y: f64) -> &Piece {
        let i = self.segments.iter().rposition(|(s, _)| *s <= y).unwrap_or(0);
        &self.segments[i].1
    }

    /// Jet of the profile at `x`, orders `0..=n`.
    pub fn jet(&self, x: f64, n: usize) -> Result<Jet, String> {
        let y = x.abs() / self.scale;
        let local = self.piece_at(y).jet(y, n)?.rescaled(1.0 / self.scale).scale(self.amp);
        if x >= 0.0 {
            return Ok(local);
        }
        let r = local.reflected();
        Ok(match self.parity {
            Parity::Odd => r.scale(-1.0),
            Parity::Even => r,
        })
    }

    pub fn value(&self, x: f64) -> Result<f64, String> {
        Ok(self.jet(x, 0)?.value())
    }

    pub fn deriv(&self, x: f64) -> Result<f64, String> {
        Ok(self.jet(x, 1)?.derivative(1))
    }

    /// Singularity order `m`.
    pub fn order(&self) -> u32 {
        self.kind.order(self.k)
    }

    pub fn fn_ref(self: &Arc<Self>) -> FnRef {
        FnRef(self.clone())
    }

    /// `w ↦ w^m f'(w + center)`, regular at a pole of order `m` at `center`.
    pub fn weighted(self: &Arc<Self>, center: f64) -> Arc<Weighted> {
        Arc::new(Weighted {
            name: format!("{}_w{}", self.name, fmt_num(center)),
            profile: self.clone(),
            center,
            m: self.order(),
        })
    }
}

impl SmoothFn for ProfileFn {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, order: u32, x: f64) -> Result<f64, String> {
        Ok(self.jet(x, (order as usize).max(1).min(ORDER))?.derivative(order as usize))
    }
}

/// `w^m f'(w + center)` for a profile `f` with a pole of order `m` at
/// `center`; the coefficient of `dw / w^m` in the b-frame.
#[derive(Debug)]
pub struct Weighted {
    pub name: String,
    pub profile: Arc<ProfileFn>,
    pub center: f64,
    pub m: u32,
}

impl Weighted {
    pub fn jet(&self, w: f64, n: usize) -> Result<Jet, String> {
        let p = &self.profile;
        let x = w + self.center;
        let y = x.abs() / p.scale;
        let piece = p.piece_at(y);
        let on_pole = piece
            .pole()
            .is_some_and(|c| (c * p.scale - self.center.abs()).abs() <= 1e-12 * (1.0 + c.abs()))
            && (self.center == 0.0 || x.signum() == self.center.signum());
        if on_pole {
            if let Some(k) = piece.weighted_constant(self.m) {
                let mut v = k * p.amp * p.scale.powi(self.m as i32 - 1);
                if x < 0.0 {
                    let rho = if p.parity == Parity::Odd { 1.0 } else { -1.0 };
                    v *= rho * if self.m % 2 == 1 { -1.0 } else { 1.0 };
                }
                return Ok(Jet::constant(v, n));
            }
        }
        let wm = Jet::variable(w, n).powi(self.m as i32);
        Ok(&wm * &p.jet(x, n + 1)?.shift_down())
    }
}

impl SmoothFn for Weighted {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, order: u32, w: f64) -> Result<f64, String> {
        Ok(self.jet(w, (order as usize).min(ORDER))?.derivative(order as usize))
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x}");
    s.replace('-', "m")
}

fn violation(kind: ProfileKind, clause: impl Into<String>) -> SingularError {
    SingularError::Invariant {
        kind: kind.label().to_string(),
        clause: clause.into(),
    }
}

/// Midpoint grid of `n` points on `[lo, hi]`.
fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + (i as f64 + 0.5) * h)
}

/// Builds a profile and verifies its defining properties.
pub fn build_profile(kind: ProfileKind, k: u32, eps: f64) -> Result<ProfileFn, SingularError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(violation(kind, format!("ε must be positive, got {eps}")));
    }
    if k < kind.min_k() {
        return Err(violation(kind, format!("k must be at least {}", kind.min_k())));
    }
    if k > 6 {
        return Err(violation(kind, "k above 6 is not supported"));
    }
    let kf = k as f64;
    let join = |a: f64, b: f64, l: &Piece, r: &Piece| -> Result<Piece, SingularError> {
        Join::new(a, b, l.clone(), r.clone())
            .map(|j| Piece::Join(Box::new(j)))
            .map_err(|e| violation(kind, e))
    };
    // singular piece of order 2k+1 centred at c
    let odd_pole = |c: f64| {
        if k == 0 {
            Piece::Log { center: c, offset: 0.0 }
        } else {
            Piece::Pole {
                coef: -1.0 / (2.0 * kf),
                center: c,
                power: -2 * k as i32,
                offset: 0.0,
            }
        }
    };
    let ident = Piece::Affine { slope: 1.0, intercept: 0.0 };
    let (parity, scale, amp, segments, poles) = match kind {
        ProfileKind::DesingEven => {
            let outer = Piece::Pole {
                coef: -1.0 / (2.0 * kf - 1.0),
                center: 0.0,
                power: -(2 * k as i32 - 1),
                offset: 2.0,
            };
            let segs = vec![
                (0.0, ident.clone()),
                (0.5, join(0.5, 1.0, &ident, &outer)?),
                (1.0, outer),
            ];
            (Parity::Odd, eps, eps.powi(-(2 * k as i32 - 1)), segs, vec![])
        }
        ProfileKind::DesingOdd => {
            let inner = Piece::Quadratic { a: 1.0, c: -2.0 };
            let outer = odd_pole(0.0);
            let segs = vec![(0.0, inner.clone()), (1.0, join(1.0, 2.0, &inner, &outer)?), (2.0, outer)];
            (Parity::Even, eps, eps.powi(-2 * k as i32), segs, vec![])
        }
        ProfileKind::SingEven => {
            let inner = Piece::Pole {
                coef: -1.0,
                center: 0.0,
                power: -(2 * k as i32 - 1),
                offset: 0.0,
            };
            let segs = vec![
                (0.0, inner.clone()),
                (eps, join(eps, 2.0 * eps, &inner, &ident)?),
                (2.0 * eps, ident.clone()),
            ];
            (Parity::Odd, 1.0, 1.0, segs, vec![0.0])
        }
        ProfileKind::SingOdd => {
            let c = 3.0 * eps / 8.0;
            let inner = Piece::Affine { slope: -8.0 / eps, intercept: 0.0 };
            let pole = odd_pole(c);
            let segs = vec![
                (0.0, inner.clone()),
                (eps / 8.0, join(eps / 8.0, eps / 4.0, &inner, &pole)?),
                (eps / 4.0, pole.clone()),
                (eps / 2.0, join(eps / 2.0, 3.0 * eps / 4.0, &pole, &ident)?),
                (3.0 * eps / 4.0, ident.clone()),
            ];
            (Parity::Odd, 1.0, 1.0, segs, vec![-c, c])
        }
        ProfileKind::SingOnesided => {
            let inner = odd_pole(0.0);
            let segs = vec![
                (0.0, inner.clone()),
                (eps, join(eps, 2.0 * eps, &inner, &ident)?),
                (2.0 * eps, ident.clone()),
            ];
            (Parity::Even, 1.0, 1.0, segs, vec![0.0])
        }
    };
    let descriptions = segments
        .iter()
        .map(|(s, p)| format!("from {}: {}", s * scale, p.describe()))
        .collect();
    let p = ProfileFn {
        kind,
        k,
        eps,
        name: format!("{}_k{k}_e{}", kind.label().replace('-', "_"), fmt_num(eps)),
        parity,
        scale,
        amp,
        segments,
        poles,
        descriptions,
    };
    verify_profile(&p)?;
    Ok(p)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

/// Re-checks every defining property of a profile numerically.
pub fn verify_profile(p: &ProfileFn) -> Result<(), SingularError> {
    let kind = p.kind;
    let fail = |c: String| Err(violation(kind, c));
    let eval = |x: f64| p.jet(x, 1).map_err(|e| violation(kind, e));
    let (eps, k) = (p.eps, p.k as i32);
    const N: usize = 1000;

    // parity
    for x in grid(0.0, 3.0 * eps, 50) {
        if p.poles.iter().any(|c| (x.abs() - c.abs()).abs() < 1e-9) {
            continue;
        }
        let (a, b) = (eval(x)?.value(), eval(-x)?.value());
        let want = if p.parity == Parity::Odd { -a } else { a };
        if !close(b, want, 1e-12) {
            return fail(format!("parity fails at x = {x}"));
        }
    }

    // joins: one-sided limits of each derivative agree at every junction
    let smooth_to = 4.min(2 * p.k as usize + 1);
    for (_, piece) in &p.segments {
        let Piece::Join(j) = piece else { continue };
        for at in [j.a, j.b] {
            let x = at * p.scale;
            let d = 1e-7 * (j.b - j.a) * p.scale;
            let left = p.jet(x - d, smooth_to).map_err(|e| violation(kind, e))?;
            let right = p.jet(x + d, smooth_to).map_err(|e| violation(kind, e))?;
            let slope = left.derivative(1).abs().max(right.derivative(1).abs());
            for order in 0..=smooth_to {
                let (l, r) = (left.derivative(order), right.derivative(order));
                let floor = 1e-6 * slope * p.scale.powi(1 - order as i32);
                if (l - r).abs() > 1e-4 * (l.abs() + r.abs()) + floor {
                    return fail(format!("derivative {order} jumps across the junction at {x}: {l} vs {r}"));
                }
            }
        }
    }

    match kind {
        ProfileKind::DesingEven => {
            for x in grid(-2.0 * eps, 2.0 * eps, N) {
                if eval(x)?.derivative(1) <= 0.0 {
                    return fail(format!("f' <= 0 at {x}"));
                }
            }
            for y in grid(1.0, 3.0, 40) {
                let f = p.value(y * eps).map_err(|e| violation(kind, e))? / p.amp;
                let want = -1.0 / ((2 * k - 1) as f64 * y.powi(2 * k - 1)) + 2.0;
                if !close(f, want, 1e-12) {
                    return fail(format!("outer piece differs at x = {y}"));
                }
                let g = p.value(-y * eps).map_err(|e| violation(kind, e))? / p.amp;
                if !close(g, -1.0 / ((2 * k - 1) as f64 * (-y).powi(2 * k - 1)) - 2.0, 1e-12) {
                    return fail(format!("outer piece differs at x = -{y}"));
                }
            }
        }
        ProfileKind::DesingOdd => {
            for y in grid(-1.0, 1.0, 40) {
                let f = p.value(y * eps).map_err(|e| violation(kind, e))? / p.amp;
                if !close(f, y * y - 2.0, 1e-12) {
                    return fail(format!("inner piece differs at x = {y}"));
                }
            }
            for y in grid(2.0, 4.0, 40) {
                let f = p.value(y * eps).map_err(|e| violation(kind, e))? / p.amp;
                let want = if k == 0 { y.ln() } else { -1.0 / (2.0 * k as f64 * y.powi(2 * k)) };
                if !close(f, want, 1e-12) {
                    return fail(format!("outer piece differs at x = {y}"));
                }
            }
            for x in grid(-3.0 * eps, 3.0 * eps, N) {
                if eval(x)?.derivative(1) * x <= 0.0 {
                    return fail(format!("f' has the wrong sign at {x}"));
                }
            }
            let near = grid(-0.1 * eps, 0.1 * eps, 100)
                .map(|x| eval(x).map(|j| (j.derivative(1) / x).abs()))
                .collect::<Result<Vec<_>, _>>()?;
            if near.iter().cloned().fold(f64::INFINITY, f64::min) * eps.powi(2 * k + 2) < 1.0 {
                return fail("f' does not vanish simply at 0".into());
            }
        }
        ProfileKind::SingEven => {
            for x in grid(2.0 * eps, 4.0 * eps, 40) {
                if p.value(x).ok() != Some(x) || p.value(-x).ok() != Some(-x) {
                    return fail(format!("s(x) != x at {x}"));
                }
            }
            for x in grid(0.0, eps, 40) {
                if !close(p.value(x).map_err(|e| violation(kind, e))?, -x.powi(-(2 * k - 1)), 1e-12) {
                    return fail(format!("inner piece differs at {x}"));
                }
            }
            for x in grid(-3.0 * eps, 3.0 * eps, N) {
                if eval(x)?.derivative(1) <= 0.0 {
                    return fail(format!("s' <= 0 at {x}"));
                }
            }
        }
        ProfileKind::SingOdd => {
            let c = 3.0 * eps / 8.0;
            for x in grid(0.75 * eps, eps, 40) {
                if p.value(x).ok() != Some(x) || p.value(-x).ok() != Some(-x) {
                    return fail(format!("s(t) != t at {x}"));
                }
            }
            for x in grid(eps / 4.0, eps / 2.0, 40) {
                let w = x - c;
                let want = if k == 0 { w.abs().ln() } else { -1.0 / (2.0 * k as f64 * w.powi(2 * k)) };
                if !close(p.value(x).map_err(|e| violation(kind, e))?, want, 1e-12) {
                    return fail(format!("singular piece differs at {x}"));
                }
            }
            for x in grid(-eps, eps, N) {
                if (x.abs() - c).abs() < 1e-9 {
                    continue;
                }
                if eval(x)?.derivative(1) == 0.0 {
                    return fail(format!("s' vanishes at {x}"));
                }
            }
        }
        ProfileKind::SingOnesided => {
            for x in grid(2.0 * eps, 4.0 * eps, 40) {
                if p.value(x).ok() != Some(x) {
                    return fail(format!("s(t) != t at {x}"));
                }
            }
            for x in grid(0.0, 3.0 * eps, N) {
                if eval(x)?.derivative(1) <= 0.0 {
                    return fail(format!("s' <= 0 at {x}"));
                }
            }
        }
    }
    Ok(())
}
