//! Deterministic floating-point evaluation.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{Node, ScalarExpr};

/// Assignment of real values to named coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    names: Arc<[Arc<str>]>,
    values: Vec<f64>,
}

impl Point {
    pub fn new(names: Arc<[Arc<str>]>, values: Vec<f64>) -> Self {
        assert_eq!(names.len(), values.len(), "point arity mismatch");
        Point { names, values }
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        let names: Vec<Arc<str>> = pairs.iter().map(|(n, _)| Arc::from(*n)).collect();
        Point {
            names: names.into(),
            values: pairs.iter().map(|(_, v)| *v).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| &**n == name)
            .map(|i| self.values[i])
    }

    pub fn names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Copy with one coordinate replaced.
    pub fn with(&self, name: &str, v: f64) -> Point {
        let mut p = self.clone();
        if let Some(i) = p.names.iter().position(|n| &**n == name) {
            p.values[i] = v;
        }
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (n, v) in self.names.iter().zip(&self.values) {
            m.insert(n.to_string(), serde_json::json!(v));
        }
        serde_json::Value::Object(m)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.names.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// Evaluation failure, carrying the offending subexpression.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("logarithm of non-positive value in {0}")]
    LogDomain(String),
    #[error("symbol `{0}` has no value at this point")]
    UnknownSymbol(String),
    #[error("function {name} failed: {message}")]
    Function { name: String, message: String },
    #[error("non-finite result in {0}")]
    NonFinite(String),
}

impl ScalarExpr {
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        self.eval_with(&|s| p.get(s), false)
    }

    /// Like [`ScalarExpr::eval`] but zero denominators give `±inf` instead of
    /// an error.
    pub fn eval_extended(&self, p: &Point) -> Result<f64, EvalError> {
        self.eval_with(&|s| p.get(s), true)
    }

    pub fn eval_with(
        &self,
        env: &dyn Fn(&str) -> Option<f64>,
        extended: bool,
    ) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Const(c) => c.to_f64().unwrap_or(f64::NAN),
            Node::Sym(s) => env(s).ok_or_else(|| EvalError::UnknownSymbol(s.to_string()))?,
            Node::Add(v) => {
                let mut acc = 0.0;
                for t in v {
                    acc += t.eval_with(env, extended)?;
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = 1.0;
                for t in v {
                    acc *= t.eval_with(env, extended)?;
                }
                acc
            }
            Node::Neg(a) => -a.eval_with(env, extended)?,
            Node::Pow(b, e) => {
                let x = b.eval_with(env, extended)?;
                if *e < 0 && x == 0.0 {
                    if extended {
                        return Ok(f64::INFINITY);
                    }
                    return Err(EvalError::DivisionByZero(b.to_string()));
                }
                powi(x, *e)
            }
            Node::Sin(a) => a.eval_with(env, extended)?.sin(),
            Node::Cos(a) => a.eval_with(env, extended)?.cos(),
            Node::Exp(a) => a.eval_with(env, extended)?.exp(),
            Node::Log(a) => {
                let x = a.eval_with(env, extended)?;
                if x <= 0.0 {
                    return Err(EvalError::LogDomain(self.to_string()));
                }
                x.ln()
            }
            Node::Apply(f, k, a) => {
                let x = a.eval_with(env, extended)?;
                f.0.derivative(*k, x).map_err(|message| EvalError::Function {
                    name: f.name().to_string(),
                    message,
                })?
            }
        };
        if v.is_nan() {
            return Err(EvalError::NonFinite(self.to_string()));
        }
        Ok(v)
    }
}

fn powi(x: f64, e: i64) -> f64 {
    if let Ok(k) = i32::try_from(e) {
        x.powi(k)
    } else {
        x.powf(e as f64)
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.values.len()))?;
        for (n, v) in self.names.iter().zip(&self.values) {
            m.serialize_entry(&**n, v)?;
        }
        m.end()
    }
}
