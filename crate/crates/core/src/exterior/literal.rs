//! Text literals for forms and multivector fields.
//!
//! Forms: `scalar * D(x)`, `scalar * B` (σ), `W(D(x), B)` for wedges.
//! Vectors: `scalar * P(x)` (∂/∂x), `scalar * Z` (ζ), `W(P(x), Z)`.
//! Sums, scalar factors and division by scalars follow the scalar grammar.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{BForm, BMultiVector, ExteriorError, Graded, Variance};
use crate::chart::Chart;
use crate::scalar::{parse_ast, Ast, ParseError, ScalarExpr};

enum Lit<V: Variance> {
    Scalar(ScalarExpr),
    El(Graded<V>),
}

trait Atoms: Variance {
    const SINGULAR: &'static str;
    const COORD: &'static str;
    fn singular(chart: &Arc<Chart>) -> Result<Graded<Self>, ExteriorError>;
    fn coord(chart: &Arc<Chart>, name: &str) -> Result<Graded<Self>, ExteriorError>;
}

impl Atoms for super::Co {
    const SINGULAR: &'static str = "B";
    const COORD: &'static str = "D";
    fn singular(chart: &Arc<Chart>) -> Result<BForm, ExteriorError> {
        BForm::sigma(chart)
    }
    fn coord(chart: &Arc<Chart>, name: &str) -> Result<BForm, ExteriorError> {
        BForm::d_coord(chart, name)
    }
}

impl Atoms for super::Contra {
    const SINGULAR: &'static str = "Z";
    const COORD: &'static str = "P";
    fn singular(chart: &Arc<Chart>) -> Result<BMultiVector, ExteriorError> {
        BMultiVector::zeta(chart)
    }
    fn coord(chart: &Arc<Chart>, name: &str) -> Result<BMultiVector, ExteriorError> {
        BMultiVector::partial(chart, name)
    }
}

fn sem(col: usize, msg: impl Into<String>) -> ExteriorError {
    ExteriorError::Parse(ParseError::semantic(col, msg))
}

fn to_el<V: Variance>(chart: &Arc<Chart>, l: Lit<V>) -> Graded<V> {
    match l {
        Lit::Scalar(s) => Graded::scalar(chart, s),
        Lit::El(e) => e,
    }
}

fn eval<V: Atoms>(ast: &Ast, chart: &Arc<Chart>) -> Result<Lit<V>, ExteriorError> {
    use Lit::*;
    Ok(match ast {
        Ast::Num(v, _) => Scalar(ScalarExpr::constant(v.clone())),
        Ast::Ident(name, col) => {
            if chart.index_of(name).is_some() {
                Scalar(ScalarExpr::sym(name))
            } else if name == V::SINGULAR {
                El(V::singular(chart).map_err(|e| sem(*col, e.to_string()))?)
            } else {
                return Err(ParseError::unknown(*col, name).into());
            }
        }
        Ast::Call(name, args, col) => {
            let one = |args: &[Ast]| -> Result<(), ExteriorError> {
                if args.len() == 1 {
                    Ok(())
                } else {
                    Err(ParseError::syntax(*col, format!("`{name}` takes one argument")).into())
                }
            };
            match name.as_str() {
                "sin" | "cos" | "exp" | "log" => {
                    one(args)?;
                    let Scalar(a) = eval::<V>(&args[0], chart)? else {
                        return Err(sem(*col, format!("`{name}` needs a scalar argument")));
                    };
                    Scalar(match name.as_str() {
                        "sin" => a.sin(),
                        "cos" => a.cos(),
                        "exp" => a.exp(),
                        _ => a.log(),
                    })
                }
                "W" => {
                    let mut acc: Option<Graded<V>> = None;
                    for a in args {
                        let e = to_el(chart, eval::<V>(a, chart)?);
                        acc = Some(match acc {
                            None => e,
                            Some(x) => x.wedge(&e)?,
                        });
                    }
                    El(acc.ok_or_else(|| sem(*col, "empty wedge"))?)
                }
                n if n == V::COORD => {
                    one(args)?;
                    let Ast::Ident(c, ccol) = &args[0] else {
                        return Err(sem(*col, format!("`{n}` needs a coordinate name")));
                    };
                    if chart.index_of(c).is_none() {
                        return Err(ParseError::unknown(*ccol, c).into());
                    }
                    El(V::coord(chart, c).map_err(|e| sem(*col, e.to_string()))?)
                }
                _ => return Err(ParseError::unknown(*col, name).into()),
            }
        }
        Ast::Add(a, b) | Ast::Sub(a, b) => {
            let (x, y) = (eval::<V>(a, chart)?, eval::<V>(b, chart)?);
            let neg = matches!(ast, Ast::Sub(..));
            match (x, y) {
                (Scalar(x), Scalar(y)) => Scalar(if neg { &x - &y } else { &x + &y }),
                (x, y) => {
                    let (x, y) = (to_el(chart, x), to_el(chart, y));
                    if x.degree != y.degree && !x.is_zero() && !y.is_zero() {
                        return Err(sem(ast.column(), format!("cannot add degree {} and degree {}", x.degree, y.degree)));
                    }
                    El(if neg { x.sub(&y)? } else { x.add(&y)? })
                }
            }
        }
        Ast::Mul(a, b) => match (eval::<V>(a, chart)?, eval::<V>(b, chart)?) {
            (Scalar(x), Scalar(y)) => Scalar(&x * &y),
            (Scalar(s), El(e)) | (El(e), Scalar(s)) => El(e.scale(&s)),
            (El(x), El(y)) => El(x.wedge(&y)?),
        },
        Ast::Div(a, b) => {
            let Scalar(d) = eval::<V>(b, chart)? else {
                return Err(sem(b.column(), "division by a non-scalar"));
            };
            match eval::<V>(a, chart)? {
                Scalar(x) => Scalar(&x / &d),
                El(e) => El(e.scale(&d.recip())),
            }
        }
        Ast::Neg(a, _) => match eval::<V>(a, chart)? {
            Scalar(x) => Scalar(-x),
            El(e) => El(e.neg()),
        },
        Ast::Pow(b, k, col) => match eval::<V>(b, chart)? {
            Scalar(x) => Scalar(x.powi(*k)),
            El(_) => return Err(sem(*col, "powers of forms are not supported; use W(...)")),
        },
    })
}

/// Parses a b-form literal on `chart`.
pub fn parse_form(text: &str, chart: &Arc<Chart>) -> Result<BForm, ExteriorError> {
    let ast = parse_ast(text)?;
    Ok(to_el(chart, eval::<super::Co>(&ast, chart)?))
}

/// Parses a b-multivector literal on `chart`.
pub fn parse_vector(text: &str, chart: &Arc<Chart>) -> Result<BMultiVector, ExteriorError> {
    let ast = parse_ast(text)?;
    Ok(to_el(chart, eval::<super::Contra>(&ast, chart)?))
}

/// Coefficient text that binds tighter than `*` without parentheses.
fn is_atomic(text: &str) -> bool {
    let body = text.strip_prefix('-').unwrap_or(text);
    !body.is_empty() && body.chars().all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '.')
}

impl<V: Variance> Graded<V> {
    /// Literal text that [`parse_form`] / [`parse_vector`] read back (for
    /// coefficients built from the scalar grammar).
    pub fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let names: Vec<String> = super::bits(*m).map(|k| self.slot_name(k)).collect();
            let atom = match names.len() {
                0 => String::new(),
                1 => names[0].clone(),
                _ => format!("W({})", names.join(", ")),
            };
            let part = if atom.is_empty() {
                format!("({c})")
            } else if c.is_one() {
                atom
            } else if c.as_rational().map(|r| r == -num_rational::BigRational::from_integer(BigInt::from(1))).unwrap_or(false) {
                format!("-{atom}")
            } else {
                let text = c.to_string();
                if is_atomic(&text) {
                    format!("{text}*{atom}")
                } else {
                    format!("({text})*{atom}")
                }
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}
