//! Canonical Laurent-polynomial normal form.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FnRef, Node, ScalarExpr};

pub(crate) type Q = BigRational;

/// Indivisible factor of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Atom {
    Sym(Arc<str>),
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    Exp(ScalarExpr),
    Log(ScalarExpr),
    Apply(FnRef, u32, ScalarExpr),
    /// A canonical multi-term sum with leading coefficient 1; only ever
    /// carries negative exponents.
    Den(ScalarExpr),
}

impl Atom {
    fn to_expr(&self) -> ScalarExpr {
        let node = match self {
            Atom::Sym(s) => Node::Sym(s.clone()),
            Atom::Sin(a) => Node::Sin(a.clone()),
            Atom::Cos(a) => Node::Cos(a.clone()),
            Atom::Exp(a) => Node::Exp(a.clone()),
            Atom::Log(a) => Node::Log(a.clone()),
            Atom::Apply(f, k, a) => Node::Apply(f.clone(), *k, a.clone()),
            Atom::Den(s) => return s.clone(),
        };
        let p = Poly::atom(self.clone(), 1);
        ScalarExpr::canonical_from(node, Arc::new(p))
    }
}

/// Sorted product of atoms with nonzero integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Mono(pub Vec<(Atom, i64)>);

impl Mono {
    fn single(a: Atom, e: i64) -> Mono {
        Mono(vec![(a, e)]).fix_exp()
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out).fix_exp()
    }

    fn powi(&self, e: i64) -> Mono {
        Mono(self.0.iter().map(|(a, k)| (a.clone(), k * e)).collect()).fix_exp()
    }

    /// Multiplies by `atom^d`.
    pub(crate) fn with_delta(&self, atom: &Atom, d: i64) -> Mono {
        let mut v = self.0.clone();
        match v.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) => {
                v[i].1 += d;
                if v[i].1 == 0 {
                    v.remove(i);
                }
            }
            Err(i) => {
                if d != 0 {
                    v.insert(i, (atom.clone(), d));
                }
            }
        }
        Mono(v)
    }

    fn exponent(&self, atom: &Atom) -> i64 {
        match self.0.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    /// Merges all exponential atoms into a single `exp(sum)`.
    fn fix_exp(self) -> Mono {
        let n_exp = self
            .0
            .iter()
            .filter(|(a, _)| matches!(a, Atom::Exp(_)))
            .count();
        let needs = n_exp > 1
            || self
                .0
                .iter()
                .any(|(a, e)| matches!(a, Atom::Exp(_)) && *e != 1);
        if !needs {
            return self;
        }
        let mut arg = Poly::default();
        let mut rest = Vec::with_capacity(self.0.len());
        for (a, e) in self.0 {
            if let Atom::Exp(x) = &a {
                arg = arg.add(&x.poly().scale(&Q::from_integer(BigInt::from(e))));
            } else {
                rest.push((a, e));
            }
        }
        if !arg.is_zero() {
            let x = from_poly(Arc::new(arg));
            let atom = Atom::Exp(x);
            let pos = rest.binary_search_by(|(a, _)| a.cmp(&atom)).unwrap_err();
            rest.insert(pos, (atom, 1));
        }
        Mono(rest)
    }
}

/// Finite sum of rational multiples of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn constant(c: Q) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::default(), c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom, e: i64) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::single(a, e), Q::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.0.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out.pythag();
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out.pythag();
        out
    }

    fn mul_mono(&self, m: &Mono, c: &Q) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            out.add_term(m1.mul(m), c1 * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn symbol_valuation(&self, name: &str) -> i64 {
        let atom = Atom::Sym(Arc::from(name));
        self.terms
            .keys()
            .map(|m| m.exponent(&atom))
            .min()
            .unwrap_or(0)
    }

    pub fn mul_symbol_power(&self, name: &str, j: i64) -> Poly {
        let atom = Atom::Sym(Arc::from(name));
        let m = Mono::default().with_delta(&atom, j);
        self.mul_mono(&m, &Q::one())
    }

    /// The monomial `∏ a^k`, `k >= 0` minimal, whose product with each
    /// polynomial has no negative exponents.
    pub fn denominator(polys: &[&Poly]) -> Poly {
        let mut worst: BTreeMap<&Atom, i64> = BTreeMap::new();
        for p in polys {
            for m in p.terms.keys() {
                for (a, e) in &m.0 {
                    if *e < 0 {
                        let w = worst.entry(a).or_insert(0);
                        *w = (*w).min(*e);
                    }
                }
            }
        }
        let mono = Mono(worst.into_iter().map(|(a, e)| (a.clone(), -e)).collect());
        let mut terms = BTreeMap::new();
        terms.insert(mono, Q::one());
        Poly { terms }
    }

    /// Rewrites `c*M*sin(a)^2 + c*M*cos(a)^2` into `c*M` until no pair is left.
    fn pythag(&mut self) {
        loop {
            let mut found = None;
            'outer: for (m, c) in &self.terms {
                for (a, e) in &m.0 {
                    if let Atom::Sin(arg) = a {
                        if *e >= 2 {
                            let base = m.with_delta(a, -2);
                            let partner = base.with_delta(&Atom::Cos(arg.clone()), 2);
                            if self.terms.get(&partner) == Some(c) {
                                found = Some((m.clone(), partner, base, c.clone()));
                                break 'outer;
                            }
                        }
                    }
                }
            }
            match found {
                None => break,
                Some((m, p, b, c)) => {
                    self.terms.remove(&m);
                    self.terms.remove(&p);
                    self.add_term(b, c);
                }
            }
        }
    }

    /// Partial derivative with respect to the symbol `x`.
    pub fn diff(&self, x: &str) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            for (a, e) in &m.0 {
                let da = atom_diff(a, x);
                if da.is_zero() {
                    continue;
                }
                let rest = m.with_delta(a, -1);
                let coeff = c * Q::from_integer(BigInt::from(*e));
                let t = da.mul_mono(&rest, &coeff);
                for (mm, cc) in t.terms {
                    out.add_term(mm, cc);
                }
            }
        }
        out.pythag();
        out
    }
}

fn atom_diff(a: &Atom, x: &str) -> Poly {
    match a {
        Atom::Sym(s) => {
            if &**s == x {
                Poly::constant(Q::one())
            } else {
                Poly::default()
            }
        }
        Atom::Sin(u) => {
            let du = u.poly().diff(x);
            if du.is_zero() {
                return du;
            }
            Poly::atom(Atom::Cos(u.clone()), 1).mul(&du)
        }
        Atom::Cos(u) => {
            let du = u.poly().diff(x);
            if du.is_zero() {
                return du;
            }
            Poly::atom(Atom::Sin(u.clone()), 1).mul(&du).neg()
        }
        Atom::Exp(u) => {
            let du = u.poly().diff(x);
            if du.is_zero() {
                return du;
            }
            Poly::atom(Atom::Exp(u.clone()), 1).mul(&du)
        }
        Atom::Log(u) => {
            let du = u.poly().diff(x);
            if du.is_zero() {
                return du;
            }
            du.mul(&pow_poly(&u.poly(), -1))
        }
        Atom::Apply(f, k, u) => {
            let du = u.poly().diff(x);
            if du.is_zero() {
                return du;
            }
            Poly::atom(Atom::Apply(f.clone(), k + 1, u.clone()), 1).mul(&du)
        }
        Atom::Den(s) => s.poly().diff(x),
    }
}

/// Integer power of a polynomial; negative powers of non-monomials become
/// `Den` atoms after pulling out the leading coefficient.
pub(crate) fn pow_poly(p: &Poly, e: i64) -> Poly {
    if e >= 0 {
        return p.pow(e as u32);
    }
    match p.terms.len() {
        0 => {
            // Formal 1/0: kept as an atom so evaluation reports the domain error.
            let zero = ScalarExpr::canonical_from(
                Node::Const(Q::zero()),
                Arc::new(Poly::default()),
            );
            Poly::atom(Atom::Den(zero), e)
        }
        1 => {
            let (m, c) = p.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            let cm = pow_q(c, e);
            let mm = m.powi(e);
            terms.insert(mm, cm);
            Poly { terms }
        }
        _ => {
            let lead = p.terms.values().next().unwrap().clone();
            let s0 = p.scale(&(Q::one() / &lead));
            let s = from_poly(Arc::new(s0));
            Poly::atom(Atom::Den(s), e).scale(&pow_q(&lead, e))
        }
    }
}

fn pow_q(c: &Q, e: i64) -> Q {
    let mut acc = Q::one();
    let base = if e < 0 { Q::one() / c } else { c.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

fn trig_arg(a: &ScalarExpr) -> ScalarExpr {
    a.simplify()
}

/// Builds the canonical polynomial of an arbitrary tree.
pub(crate) fn to_poly(e: &ScalarExpr) -> Poly {
    match e.node() {
        Node::Const(c) => Poly::constant(c.clone()),
        Node::Sym(s) => Poly::atom(Atom::Sym(s.clone()), 1),
        Node::Add(v) => {
            let mut acc = Poly::default();
            for t in v {
                acc = acc.add(&t.poly());
            }
            acc
        }
        Node::Mul(v) => {
            let mut acc = Poly::constant(Q::one());
            for t in v {
                acc = acc.mul(&t.poly());
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Node::Neg(a) => a.poly().neg(),
        Node::Pow(b, k) => match b.node() {
            // (S^j)^k with k < 0 must agree with S^(j*k) so that inverse powers
            // of sums stay in one canonical atom.
            Node::Pow(inner, j) if *k < 0 && *j > 0 => pow_poly(&inner.poly(), j * k),
            _ => pow_poly(&b.poly(), *k),
        },
        Node::Sin(a) => {
            let a = trig_arg(a);
            if a.is_zero() {
                Poly::default()
            } else if a.leading_sign_negative() {
                Poly::atom(Atom::Sin(-&a), 1).neg()
            } else {
                Poly::atom(Atom::Sin(a), 1)
            }
        }
        Node::Cos(a) => {
            let a = trig_arg(a);
            if a.is_zero() {
                Poly::constant(Q::one())
            } else if a.leading_sign_negative() {
                Poly::atom(Atom::Cos(-&a), 1)
            } else {
                Poly::atom(Atom::Cos(a), 1)
            }
        }
        Node::Exp(a) => {
            let a = a.simplify();
            if a.is_zero() {
                Poly::constant(Q::one())
            } else {
                Poly::atom(Atom::Exp(a), 1)
            }
        }
        Node::Log(a) => {
            let a = a.simplify();
            if a.is_one() {
                return Poly::default();
            }
            let p = a.poly();
            if p.terms.len() == 1 {
                let (m, c) = p.terms.iter().next().unwrap();
                if c.is_one() && m.0.len() == 1 && m.0[0].1 == 1 {
                    if let Atom::Exp(x) = &m.0[0].0 {
                        return x.poly().as_ref().clone();
                    }
                }
            }
            Poly::atom(Atom::Log(a), 1)
        }
        Node::Apply(f, k, a) => Poly::atom(Atom::Apply(f.clone(), *k, a.simplify()), 1),
    }
}

/// Canonical tree of a polynomial, with the polynomial cached on the result.
pub(crate) fn from_poly(p: Arc<Poly>) -> ScalarExpr {
    let mut terms: Vec<ScalarExpr> = Vec::with_capacity(p.terms.len());
    for (m, c) in &p.terms {
        let mut factors: Vec<ScalarExpr> = Vec::with_capacity(m.0.len() + 1);
        if m.0.is_empty() || !c.is_one() {
            factors.push(ScalarExpr::canonical_from(
                Node::Const(c.clone()),
                Arc::new(Poly::constant(c.clone())),
            ));
        }
        for (a, e) in &m.0 {
            let base = a.to_expr();
            if *e == 1 {
                factors.push(base);
            } else {
                let pp = Poly::atom(a.clone(), *e);
                factors.push(ScalarExpr::canonical_from(
                    Node::Pow(base, *e),
                    Arc::new(pp),
                ));
            }
        }
        let t = if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            ScalarExpr::from_node(Node::Mul(factors))
        };
        terms.push(t);
    }
    let node = match terms.len() {
        0 => Node::Const(Q::zero()),
        1 => terms.pop().unwrap().node().clone(),
        _ => Node::Add(terms),
    };
    ScalarExpr::canonical_from(node, p)
}
