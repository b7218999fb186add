//! Truncated Taylor series in one variable.
//!
//! A [`Jet`] of order `n` stores `f(x0), f'(x0), f''(x0)/2!, ...,
//! f^{(n)}(x0)/n!`. Arithmetic propagates all coefficients, so derivatives of
//! compositions come out exactly up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, n: usize) -> Jet {
        let mut v = vec![0.0; n + 1];
        v[0] = c;
        Jet(v)
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64, n: usize) -> Jet {
        let mut j = Jet::constant(x, n);
        if n > 0 {
            j.0[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `f^{(k)}(x0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0.get(k).map_or(0.0, |c| c * factorial(k))
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn offset(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.0[0] += s;
        j
    }

    /// Jet of `f'`; one order shorter.
    pub fn shift_down(&self) -> Jet {
        if self.0.len() == 1 {
            return Jet(vec![0.0]);
        }
        Jet(self.0[1..].iter().enumerate().map(|(k, c)| c * (k + 1) as f64).collect())
    }

    /// Jet of an antiderivative with value `c0`; one order longer.
    pub fn integrate(&self, c0: f64) -> Jet {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(c0);
        v.extend(self.0.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Jet(v)
    }

    /// Truncates or zero-pads to order `n`.
    pub fn resized(&self, n: usize) -> Jet {
        let mut v = self.0.clone();
        v.resize(n + 1, 0.0);
        Jet(v)
    }

    /// `h ↦ f(x0 + s h)`.
    pub fn rescaled(&self, s: f64) -> Jet {
        let mut p = 1.0;
        Jet(self
            .0
            .iter()
            .map(|c| {
                let v = c * p;
                p *= s;
                v
            })
            .collect())
    }

    pub fn recip(&self) -> Jet {
        let n = self.order();
        let a = &self.0;
        let mut r = vec![0.0; n + 1];
        r[0] = 1.0 / a[0];
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
            r[k] = -s / a[0];
        }
        Jet(r)
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let a = &self.0;
        let mut e = vec![0.0; n + 1];
        e[0] = a[0].exp();
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    /// `log |f|`.
    pub fn ln_abs(&self) -> Jet {
        let n = self.order();
        let a = &self.0;
        let mut l = vec![0.0; n + 1];
        l[0] = a[0].abs().ln();
        for k in 1..=n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet(l)
    }

    pub fn powi(&self, e: i32) -> Jet {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Reflection `h ↦ f(x0 - h)`.
    pub fn reflected(&self) -> Jet {
        self.rescaled(-1.0)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.order().min(o.order());
        Jet((0..=n).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
