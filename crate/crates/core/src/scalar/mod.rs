//! Symbolic scalar functions of chart coordinates.
//!
//! A [`ScalarExpr`] is an immutable, reference-counted expression tree with
//! exact rational constants. Every expression has a canonical form, a
//! Laurent polynomial over "atoms" (symbols, elementary-function applications
//! and inverse powers of irreducible sums), which is computed lazily and
//! cached. Arithmetic through the operator impls always returns canonical
//! trees, so structural equality of results is a sound zero test for
//! everything the rewrite system can normalize.

mod diff;
mod eval;
mod parse;
pub(crate) mod poly;
mod print;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

pub use eval::{EvalError, Point};
pub use parse::{parse_scalar, parse_scalar_in, ParseError, ParseErrorKind};
pub(crate) use parse::{parse_ast, Ast};

use poly::Poly;

/// A smooth real function of one variable that can be embedded in an
/// expression tree. Profile functions of the `singular` module implement this.
pub trait SmoothFn: Send + Sync + fmt::Debug {
    /// Unique name; two functions with the same name are considered equal.
    fn name(&self) -> &str;
    /// The `order`-th derivative at `x`.
    fn derivative(&self, order: u32, x: f64) -> Result<f64, String>;
}

/// Shared handle to a [`SmoothFn`], compared by name.
#[derive(Clone)]
pub struct FnRef(pub Arc<dyn SmoothFn>);

impl FnRef {
    pub fn name(&self) -> &str {
        self.0.name()
    }
}

impl fmt::Debug for FnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for FnRef {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}
impl Eq for FnRef {}
impl PartialOrd for FnRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FnRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name().cmp(other.name())
    }
}

/// Expression tree nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Const(BigRational),
    Sym(Arc<str>),
    Add(Vec<ScalarExpr>),
    Mul(Vec<ScalarExpr>),
    Neg(ScalarExpr),
    Pow(ScalarExpr, i64),
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    Exp(ScalarExpr),
    Log(ScalarExpr),
    /// `order`-th derivative of an embedded smooth function.
    Apply(FnRef, u32, ScalarExpr),
}

struct Inner {
    node: Node,
    canonical: bool,
    poly: OnceLock<Arc<Poly>>,
}

/// Immutable symbolic scalar expression.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Inner>);

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}
impl Eq for ScalarExpr {}
impl PartialOrd for ScalarExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ScalarExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl ScalarExpr {
    /// Wraps a node without simplifying.
    pub fn from_node(node: Node) -> Self {
        ScalarExpr(Arc::new(Inner {
            node,
            canonical: false,
            poly: OnceLock::new(),
        }))
    }

    pub(crate) fn canonical_from(node: Node, p: Arc<Poly>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(p);
        ScalarExpr(Arc::new(Inner {
            node,
            canonical: true,
            poly: cell,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_node(Node::Const(c)).simplify()
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// Exact rational approximation of a finite float (binary expansion).
    pub fn from_f64(x: f64) -> Self {
        let r = BigRational::from_float(x).expect("finite float");
        Self::constant(r)
    }

    pub fn sym(name: &str) -> Self {
        Self::from_node(Node::Sym(Arc::from(name))).simplify()
    }

    pub fn sin(&self) -> Self {
        Self::from_node(Node::Sin(self.clone())).simplify()
    }

    pub fn cos(&self) -> Self {
        Self::from_node(Node::Cos(self.clone())).simplify()
    }

    pub fn exp(&self) -> Self {
        Self::from_node(Node::Exp(self.clone())).simplify()
    }

    pub fn log(&self) -> Self {
        Self::from_node(Node::Log(self.clone())).simplify()
    }

    pub fn powi(&self, e: i64) -> Self {
        Self::from_node(Node::Pow(self.clone(), e)).simplify()
    }

    pub fn recip(&self) -> Self {
        self.powi(-1)
    }

    pub fn apply(f: FnRef, order: u32, arg: &ScalarExpr) -> Self {
        Self::from_node(Node::Apply(f, order, arg.clone())).simplify()
    }

    /// Canonical polynomial form (cached).
    pub(crate) fn poly(&self) -> Arc<Poly> {
        self.0
            .poly
            .get_or_init(|| Arc::new(poly::to_poly(self)))
            .clone()
    }

    /// Canonical form. Idempotent: `e.simplify().simplify() == e.simplify()`.
    pub fn simplify(&self) -> Self {
        if self.0.canonical {
            self.clone()
        } else {
            poly::from_poly(self.poly())
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.0.canonical
    }

    pub fn is_zero(&self) -> bool {
        self.poly().is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value if the expression simplifies to a rational constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.poly().as_constant()
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|c| c.to_f64())
    }

    /// True if the canonical form is a single term `c * monomial`.
    pub fn is_monomial(&self) -> bool {
        self.poly().terms.len() <= 1
    }

    /// Number of terms in the canonical form.
    pub fn term_count(&self) -> usize {
        self.poly().terms.len()
    }

    /// Coordinate symbols occurring anywhere in the tree.
    pub fn symbols(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Add(v) | Node::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a)
            | Node::Log(a)
            | Node::Apply(_, _, a) => a.collect_symbols(out),
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.simplify().symbols().iter().any(|s| &**s == name)
    }

    /// Replaces symbols by expressions and simplifies.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<ScalarExpr>) -> ScalarExpr {
        self.subst_tree(f).simplify()
    }

    fn subst_tree(&self, f: &dyn Fn(&str) -> Option<ScalarExpr>) -> ScalarExpr {
        let n = match self.node() {
            Node::Const(_) => return self.clone(),
            Node::Sym(s) => return f(s).unwrap_or_else(|| self.clone()),
            Node::Add(v) => Node::Add(v.iter().map(|e| e.subst_tree(f)).collect()),
            Node::Mul(v) => Node::Mul(v.iter().map(|e| e.subst_tree(f)).collect()),
            Node::Neg(a) => Node::Neg(a.subst_tree(f)),
            Node::Pow(a, e) => Node::Pow(a.subst_tree(f), *e),
            Node::Sin(a) => Node::Sin(a.subst_tree(f)),
            Node::Cos(a) => Node::Cos(a.subst_tree(f)),
            Node::Exp(a) => Node::Exp(a.subst_tree(f)),
            Node::Log(a) => Node::Log(a.subst_tree(f)),
            Node::Apply(g, k, a) => Node::Apply(g.clone(), *k, a.subst_tree(f)),
        };
        ScalarExpr::from_node(n)
    }

    /// Renames symbols (a substitution by symbols).
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> ScalarExpr {
        self.substitute(&|s| f(s).map(|n| ScalarExpr::sym(&n)))
    }

    /// Smallest monomial clearing every inverse power in `exprs`.
    pub fn common_denominator(exprs: &[ScalarExpr]) -> ScalarExpr {
        let polys: Vec<Arc<Poly>> = exprs.iter().map(|e| e.poly()).collect();
        let refs: Vec<&Poly> = polys.iter().map(|p| p.as_ref()).collect();
        poly::from_poly(Arc::new(Poly::denominator(&refs)))
    }

    /// Multiplicity of `name` as a polynomial factor: the largest `j` with
    /// `name^j` dividing every term of the canonical form (negative if some
    /// term carries an inverse power). Zero for the zero expression.
    pub fn symbol_valuation(&self, name: &str) -> i64 {
        self.poly().symbol_valuation(name)
    }

    /// Divides by `name^j` exactly at the level of the canonical form.
    pub fn div_symbol_power(&self, name: &str, j: i64) -> ScalarExpr {
        poly::from_poly(Arc::new(self.poly().mul_symbol_power(name, -j)))
    }

    /// Tree size, used to bound work in tests.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => 1,
            Node::Add(v) | Node::Mul(v) => 1 + v.iter().map(|e| e.size()).sum::<usize>(),
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a)
            | Node::Log(a)
            | Node::Apply(_, _, a) => 1 + a.size(),
        }
    }

    /// Sign of the leading coefficient of the canonical form.
    pub(crate) fn leading_sign_negative(&self) -> bool {
        self.poly()
            .terms
            .values()
            .next()
            .map(|c| c.is_negative())
            .unwrap_or(false)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                let f: fn(&Poly, &Poly) -> Poly = $body;
                poly::from_poly(Arc::new(f(&self.poly(), &rhs.poly())))
            }
        }
        impl ops::$tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$m(&rhs)
            }
        }
        impl ops::$tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                (&self).$m(rhs)
            }
        }
        impl ops::$tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add(b));
binop!(Sub, sub, |a, b| a.add(&b.neg()));
binop!(Mul, mul, |a, b| a.mul(b));

impl ops::Div<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: &ScalarExpr) -> ScalarExpr {
        self * &rhs.recip()
    }
}
impl ops::Div<ScalarExpr> for ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        &self / &rhs
    }
}

impl ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        poly::from_poly(Arc::new(self.poly().neg()))
    }
}
impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        let mut acc = Poly::default();
        for e in iter {
            acc = acc.add(&e.poly());
        }
        poly::from_poly(Arc::new(acc))
    }
}

impl std::iter::Product for ScalarExpr {
    fn product<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        let mut acc = Poly::constant(BigRational::one());
        for e in iter {
            acc = acc.mul(&e.poly());
        }
        poly::from_poly(Arc::new(acc))
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::int(n)
    }
}

pub(crate) fn rational_is_integer_nonneg(c: &BigRational) -> bool {
    c.is_integer() && !c.is_negative()
}

#[cfg(test)]
mod tests;

impl serde::Serialize for ScalarExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
