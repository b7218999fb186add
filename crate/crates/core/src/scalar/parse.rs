//! Recursive-descent parser for the infix scalar grammar.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := base ("^" integer)?
//! base   := number | ident | ident "(" args ")" | "(" expr ")" | "-" base
//! ```
//!
//! The parser first produces a generic [`Ast`] so the same front end serves
//! scalar, form and vector literals; callers interpret calls and identifiers.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Node, ScalarExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier(String),
    Semantic,
}

/// Parse failure with a 1-based column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} at column {column}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(column: usize, message: impl Into<String>) -> Self {
        ParseError {
            column,
            message: message.into(),
            kind: ParseErrorKind::Syntax,
        }
    }

    pub(crate) fn unknown(column: usize, name: &str) -> Self {
        ParseError {
            column,
            message: format!("unknown identifier `{name}`"),
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
        }
    }

    pub(crate) fn semantic(column: usize, message: impl Into<String>) -> Self {
        ParseError {
            column,
            message: message.into(),
            kind: ParseErrorKind::Semantic,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Ast {
    Num(BigRational, usize),
    Ident(String, usize),
    Call(String, Vec<Ast>, usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>, usize),
    Pow(Box<Ast>, i64, usize),
}

impl Ast {
    pub(crate) fn column(&self) -> usize {
        match self {
            Ast::Num(_, c) | Ast::Ident(_, c) | Ast::Call(_, _, c) | Ast::Neg(_, c) => *c,
            Ast::Pow(b, _, _) => b.column(),
            Ast::Add(a, _) | Ast::Sub(a, _) | Ast::Mul(a, _) | Ast::Div(a, _) => a.column(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Int(i64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let int_part: String = chars[start..i].iter().take_while(|c| c.is_ascii_digit()).collect();
            let mut exp10: i64 = 0;
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let mut sign = 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    if chars[j] == '-' {
                        sign = -1;
                    }
                    j += 1;
                }
                let ds = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > ds {
                    let digits: String = chars[ds..j].iter().collect();
                    exp10 = sign * digits.parse::<i64>().map_err(|_| ParseError::syntax(col, "exponent too large"))?;
                    i = j;
                }
            }
            let is_int = frac.is_empty() && exp10 == 0 && !chars[start..i].contains(&'.');
            let mantissa: BigInt = format!("{}{}", if int_part.is_empty() { "0" } else { &int_part }, frac)
                .parse()
                .map_err(|_| ParseError::syntax(col, "bad number"))?;
            let scale = exp10 - frac.len() as i64;
            let ten = BigInt::from(10);
            let value = if scale >= 0 {
                BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
            } else {
                BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
            };
            if is_int {
                if let Ok(k) = int_part.parse::<i64>() {
                    out.push((Tok::Int(k), col));
                    continue;
                }
            }
            out.push((Tok::Num(value), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(ParseError::syntax(col, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Op(d) if *d == c => {
                self.bump();
                Ok(())
            }
            Tok::End => Err(ParseError::syntax(self.col(), format!("expected `{c}`, found end of input"))),
            _ => Err(ParseError::syntax(self.col(), format!("expected `{c}`"))),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let base = self.base()?;
        if let Tok::Op('^') = self.peek() {
            let (_, col) = self.bump();
            let e = self.exponent()?;
            return Ok(Ast::Pow(Box::new(base), e, col));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = matches!(self.peek(), Tok::Op('('));
        if paren {
            self.bump();
        }
        let mut sign = 1;
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                sign = -1;
            }
            Tok::Op('+') => {
                self.bump();
            }
            _ => {}
        }
        let e = match self.bump() {
            (Tok::Int(k), _) => sign * k,
            (_, col) => return Err(ParseError::syntax(col, "expected integer exponent")),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(e)
    }

    fn base(&mut self) -> Result<Ast, ParseError> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Int(k) => Ok(Ast::Num(BigRational::from_integer(BigInt::from(k)), col)),
            Tok::Num(v) => Ok(Ast::Num(v, col)),
            Tok::Ident(name) => {
                if let Tok::Op('(') = self.peek() {
                    self.bump();
                    let mut args = Vec::new();
                    if !matches!(self.peek(), Tok::Op(')')) {
                        args.push(self.expr()?);
                        while let Tok::Op(',') = self.peek() {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(')')?;
                    Ok(Ast::Call(name, args, col))
                } else {
                    Ok(Ast::Ident(name, col))
                }
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op('-') => Ok(Ast::Neg(Box::new(self.base()?), col)),
            Tok::End => Err(ParseError::syntax(col, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::syntax(col, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses text into the generic syntax tree.
pub(crate) fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let mut lx = Lexer { toks: lex(text)?, pos: 0 };
    let e = lx.expr()?;
    match lx.peek() {
        Tok::End => Ok(e),
        _ => Err(ParseError::syntax(lx.col(), "unexpected trailing input")),
    }
}

pub(crate) fn ast_to_scalar(ast: &Ast, allowed: &dyn Fn(&str) -> bool) -> Result<ScalarExpr, ParseError> {
    let node = match ast {
        Ast::Num(v, _) => Node::Const(v.clone()),
        Ast::Ident(name, col) => {
            if !allowed(name) {
                return Err(ParseError::unknown(*col, name));
            }
            Node::Sym(name.as_str().into())
        }
        Ast::Call(name, args, col) => {
            let f = match name.as_str() {
                "sin" | "cos" | "exp" | "log" => name.as_str(),
                _ => return Err(ParseError::unknown(*col, name)),
            };
            if args.len() != 1 {
                return Err(ParseError::syntax(*col, format!("`{f}` takes one argument")));
            }
            let a = ast_to_scalar(&args[0], allowed)?;
            match f {
                "sin" => Node::Sin(a),
                "cos" => Node::Cos(a),
                "exp" => Node::Exp(a),
                _ => Node::Log(a),
            }
        }
        Ast::Add(a, b) => Node::Add(vec![ast_to_scalar(a, allowed)?, ast_to_scalar(b, allowed)?]),
        Ast::Sub(a, b) => Node::Add(vec![
            ast_to_scalar(a, allowed)?,
            ScalarExpr::from_node(Node::Neg(ast_to_scalar(b, allowed)?)),
        ]),
        Ast::Mul(a, b) => Node::Mul(vec![ast_to_scalar(a, allowed)?, ast_to_scalar(b, allowed)?]),
        Ast::Div(a, b) => Node::Mul(vec![
            ast_to_scalar(a, allowed)?,
            ScalarExpr::from_node(Node::Pow(ast_to_scalar(b, allowed)?, -1)),
        ]),
        Ast::Neg(a, _) => Node::Neg(ast_to_scalar(a, allowed)?),
        Ast::Pow(b, e, _) => Node::Pow(ast_to_scalar(b, allowed)?, *e),
    };
    Ok(ScalarExpr::from_node(node))
}

/// Parses a scalar expression whose identifiers must be among `coords`.
/// The raw parse tree is returned; call [`ScalarExpr::simplify`] for the
/// canonical form.
pub fn parse_scalar_in(text: &str, coords: &[&str]) -> Result<ScalarExpr, ParseError> {
    let ast = parse_ast(text)?;
    ast_to_scalar(&ast, &|n| coords.contains(&n))
}

/// Parses a scalar expression against a chart's coordinates.
pub fn parse_scalar(text: &str, chart: &crate::chart::Chart) -> Result<ScalarExpr, ParseError> {
    let names: Vec<&str> = chart.coord_names().collect();
    parse_scalar_in(text, &names)
}
