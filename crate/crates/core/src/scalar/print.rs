//! Infix printing that the parser reads back.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{rational_is_integer_nonneg, Node, ScalarExpr};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Product,
    Unary,
    Power,
    Atom,
}

fn level(e: &ScalarExpr) -> Level {
    match e.node() {
        Node::Const(c) => {
            if rational_is_integer_nonneg(c) {
                Level::Atom
            } else if c.is_integer() {
                Level::Unary
            } else {
                Level::Product
            }
        }
        Node::Sym(_)
        | Node::Sin(_)
        | Node::Cos(_)
        | Node::Exp(_)
        | Node::Log(_)
        | Node::Apply(..) => Level::Atom,
        Node::Add(v) => match v.len() {
            0 => Level::Atom,
            1 => level(&v[0]),
            _ => Level::Sum,
        },
        Node::Mul(v) => match v.len() {
            0 => Level::Atom,
            1 => level(&v[0]),
            _ => Level::Product,
        },
        Node::Neg(_) => Level::Unary,
        Node::Pow(_, k) => {
            if *k >= 0 {
                Level::Power
            } else {
                Level::Product
            }
        }
    }
}

fn wrap(e: &ScalarExpr, min: Level) -> String {
    let s = render(e);
    if level(e) < min {
        format!("({s})")
    } else {
        s
    }
}

/// Leading-sign classification used for `a - b` style output.
enum Signed_<'a> {
    Pos,
    NegConst(BigRational),
    NegOf(&'a ScalarExpr),
    NegProduct(Vec<ScalarExpr>),
}

fn split_sign(e: &ScalarExpr) -> Signed_<'_> {
    match e.node() {
        Node::Const(c) if c.is_negative() => Signed_::NegConst(-c),
        Node::Neg(a) => Signed_::NegOf(a),
        Node::Mul(v) if !v.is_empty() => match v[0].node() {
            Node::Const(c) if c.is_negative() => {
                let mut rest: Vec<ScalarExpr> = Vec::with_capacity(v.len());
                let a = -c;
                if !a.is_one() {
                    rest.push(ScalarExpr::from_node(Node::Const(a)));
                }
                rest.extend(v[1..].iter().cloned());
                Signed_::NegProduct(rest)
            }
            _ => Signed_::Pos,
        },
        _ => Signed_::Pos,
    }
}

fn render_product(factors: &[ScalarExpr], negate: bool) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in factors {
        match f.node() {
            Node::Pow(b, k) if *k < 0 => {
                let base = wrap(b, Level::Atom);
                if *k == -1 {
                    den.push(base);
                } else {
                    den.push(format!("{base}^{}", -k));
                }
            }
            Node::Const(c) if !c.is_negative() => num.push(render(f)),
            _ => {
                let s = wrap(f, Level::Power);
                if negate && num.is_empty() && level(f) < Level::Atom {
                    num.push(format!("({s})"));
                } else {
                    num.push(s);
                }
            }
        }
    }
    let mut out = String::new();
    if negate {
        out.push('-');
    }
    if num.is_empty() {
        out.push('1');
    } else {
        out.push_str(&num.join("*"));
    }
    for d in den {
        out.push('/');
        out.push_str(&d);
    }
    out
}

fn render_negated(abs: &ScalarExpr) -> String {
    match abs.node() {
        Node::Mul(v) if v.len() > 1 => render_product(v, true),
        _ => {
            let s = render(abs);
            if level(abs) == Level::Atom {
                format!("-{s}")
            } else {
                format!("-({s})")
            }
        }
    }
}

fn render_signed_term(e: &ScalarExpr, first: bool) -> String {
    match split_sign(e) {
        Signed_::Pos => {
            let s = wrap(e, Level::Product);
            if first {
                s
            } else {
                format!(" + {s}")
            }
        }
        sign => {
            let abs = match sign {
                Signed_::NegConst(c) => ScalarExpr::from_node(Node::Const(c)),
                Signed_::NegOf(a) => a.clone(),
                Signed_::NegProduct(v) => {
                    if v.len() == 1 {
                        v[0].clone()
                    } else {
                        ScalarExpr::from_node(Node::Mul(v))
                    }
                }
                Signed_::Pos => unreachable!(),
            };
            if first {
                render_negated(&abs)
            } else {
                format!(" - {}", wrap(&abs, Level::Product))
            }
        }
    }
}

fn render(e: &ScalarExpr) -> String {
    match e.node() {
        Node::Const(c) => c.to_string(),
        Node::Sym(s) => s.to_string(),
        Node::Add(v) => {
            if v.is_empty() {
                return "0".into();
            }
            let mut out = String::new();
            for (i, t) in v.iter().enumerate() {
                out.push_str(&render_signed_term(t, i == 0));
            }
            out
        }
        Node::Mul(v) => {
            if v.is_empty() {
                return "1".into();
            }
            match split_sign(e) {
                Signed_::NegProduct(rest) => {
                    if rest.is_empty() {
                        "-1".into()
                    } else {
                        render_product(&rest, true)
                    }
                }
                _ => render_product(v, false),
            }
        }
        Node::Neg(a) => {
            let s = render(a);
            if level(a) == Level::Atom {
                format!("-{s}")
            } else {
                format!("-({s})")
            }
        }
        Node::Pow(b, k) => {
            let base = wrap(b, Level::Atom);
            if *k >= 0 {
                format!("{base}^{k}")
            } else if *k == -1 {
                format!("1/{base}")
            } else {
                format!("1/{base}^{}", -k)
            }
        }
        Node::Sin(a) => format!("sin({})", render(a)),
        Node::Cos(a) => format!("cos({})", render(a)),
        Node::Exp(a) => format!("exp({})", render(a)),
        Node::Log(a) => format!("log({})", render(a)),
        Node::Apply(f, k, a) => {
            if *k == 0 {
                format!("{}({})", f.name(), render(a))
            } else {
                format!("{}^({k})({})", f.name(), render(a))
            }
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
