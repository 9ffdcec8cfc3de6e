use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinOp, Expr, ExprKind, Func, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnexpectedEnd,
    UnclosedParen,
    UnknownIdentifier(String),
    Arity { func: String, found: usize },
    InvalidLiteral(String),
    InvalidCoordinates(String),
}

/// Parse failure with the byte offset it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", describe(.kind, *.offset))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

fn describe(kind: &ParseErrorKind, offset: usize) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => format!("syntax error at offset {offset}: {msg}"),
        ParseErrorKind::UnexpectedEnd => {
            format!("syntax error at offset {offset}: expression ends unexpectedly")
        }
        ParseErrorKind::UnclosedParen => {
            format!("syntax error at offset {offset}: unclosed '('")
        }
        ParseErrorKind::UnknownIdentifier(name) => {
            format!("unknown identifier '{name}' at offset {offset}")
        }
        ParseErrorKind::Arity { func, found } => {
            format!("{func} takes 1 argument, found {found} at offset {offset}")
        }
        ParseErrorKind::InvalidLiteral(text) => {
            format!("invalid literal '{text}' at offset {offset}")
        }
        ParseErrorKind::InvalidCoordinates(msg) => format!("invalid coordinate names: {msg}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { value: f64, integer: Option<u64> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn err<T>(kind: ParseErrorKind, offset: usize) -> Result<T, ParseError> {
    Err(ParseError { kind, offset })
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            tokens.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut integral = true;
            if i < bytes.len() && bytes[i] == b'.' {
                integral = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value: f64 = match text.parse() {
                Ok(v) if f64::is_finite(v) => v,
                _ => return err(ParseErrorKind::InvalidLiteral(text.to_string()), start),
            };
            let integer = if integral { text.parse::<u64>().ok() } else { None };
            tokens.push(Token {
                tok: Tok::Number { value, integer },
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: Span::new(start, i),
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return err(
            ParseErrorKind::Syntax(format!("unexpected character '{ch}'")),
            start,
        );
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(tokens)
}

/// Checks that chart coordinate names are distinct identifiers and not function names.
pub fn validate_coords(coords: &[String; 3]) -> Result<(), ParseError> {
    for (i, name) in coords.iter().enumerate() {
        let valid = !name.is_empty()
            && name
                .bytes()
                .next()
                .is_some_and(|b| b.is_ascii_alphabetic() || b == b'_')
            && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_');
        if !valid {
            return err(
                ParseErrorKind::InvalidCoordinates(format!("'{name}' is not an identifier")),
                0,
            );
        }
        if Func::from_name(name).is_some() {
            return err(
                ParseErrorKind::InvalidCoordinates(format!("'{name}' is a function name")),
                0,
            );
        }
        if coords[..i].contains(name) {
            return err(
                ParseErrorKind::InvalidCoordinates(format!("'{name}' appears twice")),
                0,
            );
        }
    }
    Ok(())
}

/// Parses `source` over the given chart coordinates.
pub fn parse(source: &str, coords: &[String; 3]) -> Result<Expr, ParseError> {
    parse_with_definitions(source, coords, &BTreeMap::new())
}

/// Like [`parse`], but identifiers naming an entry of `definitions` are
/// replaced by that entry's tree.
pub fn parse_with_definitions(
    source: &str,
    coords: &[String; 3],
    definitions: &BTreeMap<String, Expr>,
) -> Result<Expr, ParseError> {
    validate_coords(coords)?;
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        coords,
        definitions,
    };
    if parser.peek().tok == Tok::Eof {
        return err(
            ParseErrorKind::Syntax("empty expression".into()),
            parser.peek().span.start,
        );
    }
    let expr = parser.expression(0)?;
    let next = parser.peek();
    if next.tok != Tok::Eof {
        let msg = match next.tok {
            Tok::RParen => "unmatched ')'".to_string(),
            _ => "expected an operator".to_string(),
        };
        return err(ParseErrorKind::Syntax(msg), next.span.start);
    }
    Ok(expr)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    coords: &'a [String; 3],
    definitions: &'a BTreeMap<String, Expr>,
}

const PREFIX_MINUS_BP: u8 = 5;

fn infix_binding(tok: &Tok) -> Option<(BinOp, u8, u8)> {
    match tok {
        Tok::Plus => Some((BinOp::Add, 1, 2)),
        Tok::Minus => Some((BinOp::Sub, 1, 2)),
        Tok::Star => Some((BinOp::Mul, 3, 4)),
        Tok::Slash => Some((BinOp::Div, 3, 4)),
        Tok::Caret => Some((BinOp::Pow, 8, 7)),
        _ => None,
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.cursor].clone();
        if t.tok != Tok::Eof {
            self.cursor += 1;
        }
        t
    }

    /// Offset reported when input runs out: the last token that asked for more.
    fn end_offset(&self) -> usize {
        if self.cursor == 0 {
            0
        } else {
            self.tokens[self.cursor - 1].span.start
        }
    }

    fn expression(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((op, lbp, rbp)) = infix_binding(&self.peek().tok) {
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expression(rbp)?;
            let span = lhs.span.join(rhs.span);
            lhs = match (op, &lhs.kind, &rhs.kind) {
                (BinOp::Div, ExprKind::Int(p), ExprKind::Int(q)) if *q != 0 => {
                    Expr::new(ExprKind::Rational(*p, *q), span)
                }
                _ => Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let token = self.bump();
        match token.tok {
            Tok::Number { value, integer } => Ok(Expr::new(
                match integer {
                    Some(n) => ExprKind::Int(n),
                    None => ExprKind::Decimal(value),
                },
                token.span,
            )),
            Tok::Minus => {
                let inner = self.expression(PREFIX_MINUS_BP)?;
                let span = token.span.join(inner.span);
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span))
            }
            Tok::LParen => {
                let inner = self.expression(0)?;
                let close = self.peek().clone();
                match close.tok {
                    Tok::RParen => {
                        self.bump();
                        Ok(Expr::new(inner.kind, token.span.join(close.span)))
                    }
                    Tok::Eof => err(ParseErrorKind::UnclosedParen, token.span.start),
                    _ => err(
                        ParseErrorKind::Syntax("expected ')'".into()),
                        close.span.start,
                    ),
                }
            }
            Tok::Ident(name) => self.identifier(name, token.span),
            Tok::Eof => {
                // reported at the last token that asked for more input
                err(ParseErrorKind::UnexpectedEnd, self.end_offset())
            }
            other => err(
                ParseErrorKind::Syntax(format!("unexpected {}", token_name(&other))),
                token.span.start,
            ),
        }
    }

    fn identifier(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::LParen {
            let Some(func) = Func::from_name(&name) else {
                return err(ParseErrorKind::UnknownIdentifier(name), span.start);
            };
            let open = self.bump();
            let mut args = Vec::new();
            if self.peek().tok != Tok::RParen {
                loop {
                    args.push(self.expression(0)?);
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                        continue;
                    }
                    break;
                }
            }
            let close = self.peek().clone();
            match close.tok {
                Tok::RParen => {
                    self.bump();
                }
                Tok::Eof => return err(ParseErrorKind::UnclosedParen, open.span.start),
                _ => {
                    return err(
                        ParseErrorKind::Syntax("expected ')'".into()),
                        close.span.start,
                    )
                }
            }
            if args.len() != 1 {
                return err(
                    ParseErrorKind::Arity {
                        func: name,
                        found: args.len(),
                    },
                    span.start,
                );
            }
            let arg = args.pop().unwrap();
            return Ok(Expr::new(
                ExprKind::Call(func, Box::new(arg)),
                span.join(close.span),
            ));
        }
        if let Some(index) = self.coords.iter().position(|c| *c == name) {
            return Ok(Expr::new(ExprKind::Var(index), span));
        }
        if let Some(def) = self.definitions.get(&name) {
            return Ok(Expr::new(def.kind.clone(), span));
        }
        if Func::from_name(&name).is_some() {
            return err(
                ParseErrorKind::Arity {
                    func: name,
                    found: 0,
                },
                span.start,
            );
        }
        err(ParseErrorKind::UnknownIdentifier(name), span.start)
    }
}

fn token_name(tok: &Tok) -> &'static str {
    match tok {
        Tok::Number { .. } => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::Comma => "','",
        Tok::Eof => "end of input",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> [String; 3] {
        ["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn single_variable() {
        let e = parse("x", &xyz()).unwrap();
        assert_eq!(e.kind, ExprKind::Var(0));
        assert_eq!(e.span, Span::new(0, 1));
    }

    #[test]
    fn exp_call() {
        let e = parse("exp(2*z)", &xyz()).unwrap();
        let want = Expr::call(
            Func::Exp,
            Expr::binary(BinOp::Mul, Expr::constant(2.0), Expr::var(2)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn unclosed_paren_reports_its_offset() {
        let e = parse("1 + (", &xyz()).unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.to_string().contains("offset 4"));
        let e = parse("(1 + 2", &xyz()).unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::UnclosedParen, 0));
        let e = parse("1 +", &xyz()).unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::UnexpectedEnd, 2));
    }

    #[test]
    fn unknown_identifiers() {
        let e = parse("x + w", &xyz()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!(e.offset, 4);
        let e = parse("foo(x)", &xyz()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
    }

    #[test]
    fn arity_mismatch() {
        let e = parse("sin(x, y)", &xyz()).unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::Arity {
                func: "sin".into(),
                found: 2
            }
        );
        let e = parse("cos()", &xyz()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { found: 0, .. }));
        let e = parse("2*exp", &xyz()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { found: 0, .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let c = xyz();
        // -x^2 = -(x^2)
        let e = parse("-x^2", &c).unwrap();
        assert!(matches!(&e.kind, ExprKind::Neg(inner) if matches!(inner.kind, ExprKind::Binary(BinOp::Pow, ..))));
        // x^y^z = x^(y^z)
        let e = parse("x^y^z", &c).unwrap();
        match &e.kind {
            ExprKind::Binary(BinOp::Pow, a, b) => {
                assert_eq!(a.kind, ExprKind::Var(0));
                assert!(matches!(b.kind, ExprKind::Binary(BinOp::Pow, ..)));
            }
            other => panic!("{other:?}"),
        }
        // x - y - z = (x - y) - z
        let e = parse("x - y - z", &c).unwrap();
        match &e.kind {
            ExprKind::Binary(BinOp::Sub, a, b) => {
                assert!(matches!(a.kind, ExprKind::Binary(BinOp::Sub, ..)));
                assert_eq!(b.kind, ExprKind::Var(2));
            }
            other => panic!("{other:?}"),
        }
        // x + y*z
        let e = parse("x + y*z", &c).unwrap();
        assert!(matches!(&e.kind, ExprKind::Binary(BinOp::Add, _, b) if matches!(b.kind, ExprKind::Binary(BinOp::Mul, ..))));
    }

    #[test]
    fn rational_literals_are_exact() {
        let c = xyz();
        assert_eq!(parse("1/2", &c).unwrap().kind, ExprKind::Rational(1, 2));
        assert_eq!(parse("(3)/(4)", &c).unwrap().kind, ExprKind::Rational(3, 4));
        // zero denominators are left to evaluation
        assert!(matches!(
            parse("1/0", &c).unwrap().kind,
            ExprKind::Binary(BinOp::Div, ..)
        ));
        assert!(matches!(
            parse("1.0/2", &c).unwrap().kind,
            ExprKind::Binary(BinOp::Div, ..)
        ));
    }

    #[test]
    fn definitions_are_inlined() {
        let c = xyz();
        let mut defs = BTreeMap::new();
        defs.insert("b".to_string(), parse("1/2", &c).unwrap());
        let e = parse_with_definitions("2*b*x", &c, &defs).unwrap();
        assert_eq!(e, parse("2*(1/2)*x", &c).unwrap());
    }

    #[test]
    fn bad_coordinates_rejected() {
        let bad: [String; 3] = ["x".into(), "x".into(), "z".into()];
        assert!(parse("x", &bad).is_err());
        let bad: [String; 3] = ["x".into(), "exp".into(), "z".into()];
        assert!(parse("x", &bad).is_err());
    }

    #[test]
    fn stray_tokens() {
        let c = xyz();
        assert!(parse("x y", &c).is_err());
        assert!(parse("x)", &c).is_err());
        assert!(parse("", &c).is_err());
        assert!(parse("x $ y", &c).is_err());
        assert!(parse("1e999", &c).is_err());
    }
}
