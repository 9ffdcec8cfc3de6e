//! Scalar expression language used to describe chart components.
//!
//! Expressions are built from integer, decimal and rational literals, the
//! three chart coordinates, `+ - * / ^`, unary minus, parentheses and the
//! elementary functions of [`Func`]. `^` is right-associative and binds
//! tighter than unary minus, so `-x^2` is `-(x^2)`.
//!
//! A division of two integer literals such as `1/2` is kept as an exact
//! [`ExprKind::Rational`] node and only lifted to `f64` at evaluation time.

mod eval;
mod parser;

use std::fmt;

pub use crate::jet::Func;
pub use eval::{eval_f64, eval_jet, EvalError};
pub use parser::{parse, parse_with_definitions, validate_coords, ParseError, ParseErrorKind};

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(u64),
    /// Finite, non-negative decimal literal.
    Decimal(f64),
    /// Exact quotient of two integer literals, denominator non-zero.
    Rational(u64, u64),
    /// Chart coordinate by index.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Expression tree node. Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    fn synthetic(kind: ExprKind) -> Self {
        Self::new(kind, Span::default())
    }

    /// A literal for an arbitrary finite constant (negative values become `Neg`).
    pub fn constant(value: f64) -> Self {
        let magnitude = value.abs();
        let lit = if magnitude.fract() == 0.0 && magnitude < 1e15 {
            Self::synthetic(ExprKind::Int(magnitude as u64))
        } else {
            Self::synthetic(ExprKind::Decimal(magnitude))
        };
        if value.is_sign_negative() && value != 0.0 {
            Self::synthetic(ExprKind::Neg(Box::new(lit)))
        } else {
            lit
        }
    }

    pub fn var(index: usize) -> Self {
        Self::synthetic(ExprKind::Var(index))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Expr) -> Self {
        Self::synthetic(ExprKind::Neg(Box::new(inner)))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Self::synthetic(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Self::synthetic(ExprKind::Call(func, Box::new(arg)))
    }

    /// `factor * self`, the shape used when rescaling components.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::binary(BinOp::Mul, Self::constant(factor), self.clone())
    }

    /// True if the tree mentions no coordinate.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Decimal(_) | ExprKind::Rational(..) => true,
            ExprKind::Var(_) => false,
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.is_constant(),
            ExprKind::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Decimal(_) | ExprKind::Rational(..) | ExprKind::Var(_) => 1,
            ExprKind::Neg(a) | ExprKind::Call(_, a) => 1 + a.depth(),
            ExprKind::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Renders the expression with the given coordinate names.
    ///
    /// The output parses back to an equal tree.
    pub fn display<'a>(&'a self, coords: &'a [String; 3]) -> Display<'a> {
        Display { expr: self, coords }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) | ExprKind::Rational(..) => 2,
            ExprKind::Neg(_) => 3,
            ExprKind::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    coords: &'a [String; 3],
}

impl Display<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
        let inner = Display {
            expr: child,
            coords: self.coords,
        };
        if child.precedence() < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr.kind {
            ExprKind::Int(n) => write!(f, "{n}"),
            // Debug always keeps a '.' or exponent, so it never reads back as Int.
            ExprKind::Decimal(v) => write!(f, "{v:?}"),
            ExprKind::Rational(p, q) => write!(f, "{p}/{q}"),
            ExprKind::Var(i) => f.write_str(&self.coords[*i]),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                self.child(f, a, 3)
            }
            ExprKind::Binary(op, a, b) => {
                let prec = self.expr.precedence();
                let (left_min, right_min) = if *op == BinOp::Pow {
                    (prec + 1, prec)
                } else {
                    (prec, prec + 1)
                };
                self.child(f, a, left_min)?;
                f.write_str(op.symbol())?;
                self.child(f, b, right_min)
            }
            ExprKind::Call(func, a) => {
                write!(f, "{func}(")?;
                self.child(f, a, 0)?;
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords() -> [String; 3] {
        ["x".into(), "y".into(), "z".into()]
    }

    fn roundtrip(src: &str) -> String {
        let c = coords();
        let e = parse(src, &c).unwrap();
        let printed = e.display(&c).to_string();
        let again = parse(&printed, &c).unwrap();
        assert_eq!(e, again, "{src} -> {printed}");
        printed
    }

    #[test]
    fn printer_inserts_needed_parens() {
        assert_eq!(roundtrip("-x^2"), "-x^2");
        assert_eq!(roundtrip("(-x)^2"), "(-x)^2");
        assert_eq!(roundtrip("(x^y)^z"), "(x^y)^z");
        assert_eq!(roundtrip("x^y^z"), "x^y^z");
        assert_eq!(roundtrip("x - (y - z)"), "x - (y - z)");
        assert_eq!(roundtrip("x*(1/2)"), "x*(1/2)");
        assert_eq!(roundtrip("1/2/3"), "1/2/3");
        assert_eq!(roundtrip("2/(1/2)"), "2/(1/2)");
        assert_eq!(roundtrip("x^(-y)"), "x^(-y)");
        assert_eq!(roundtrip("-(x*y)"), "-(x*y)");
        assert_eq!(roundtrip("exp(2*z)"), "exp(2*z)");
        assert_eq!(roundtrip("1.5e-7*x"), "1.5e-7*x");
        assert_eq!(roundtrip("2.0*x"), "2.0*x");
    }

    #[test]
    fn constants_print_and_reparse() {
        let c = coords();
        for v in [0.0, 3.0, -2.0, 0.25, -1e-9, 1e20] {
            let e = Expr::constant(v);
            let back = parse(&e.display(&c).to_string(), &c).unwrap();
            assert_eq!(e, back);
            assert_eq!(eval_f64(&back, [0.0; 3]).unwrap(), v);
        }
    }
}
