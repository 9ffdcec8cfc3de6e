use thiserror::Error;

use super::{BinOp, Expr, ExprKind, Span};
use crate::jet::{JetError, ScalarJet};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation failed at offset {}: {source}", .span.start)]
pub struct EvalError {
    pub span: Span,
    #[source]
    pub source: JetError,
}

fn at(span: Span) -> impl Fn(JetError) -> EvalError {
    move |source| EvalError { span, source }
}

/// Evaluates the expression on jets bound to the three coordinates.
///
/// All three jets must share an order; literals are lifted to that order.
pub fn eval_jet(expr: &Expr, assignment: &[ScalarJet; 3]) -> Result<ScalarJet, EvalError> {
    let order = assignment[0].order();
    for jet in &assignment[1..] {
        if jet.order() != order {
            return Err(EvalError {
                span: expr.span,
                source: JetError::OrderMismatch {
                    left: order,
                    right: jet.order(),
                },
            });
        }
    }
    eval_node(expr, assignment, order)
}

fn literal(value: f64, order: u8, span: Span) -> Result<ScalarJet, EvalError> {
    ScalarJet::constant(value, order).map_err(at(span))
}

fn eval_node(expr: &Expr, vars: &[ScalarJet; 3], order: u8) -> Result<ScalarJet, EvalError> {
    let span = expr.span;
    let out = match &expr.kind {
        ExprKind::Int(n) => literal(*n as f64, order, span)?,
        ExprKind::Decimal(v) => literal(*v, order, span)?,
        ExprKind::Rational(p, q) => literal(*p as f64 / *q as f64, order, span)?,
        ExprKind::Var(i) => vars[*i],
        ExprKind::Neg(a) => -eval_node(a, vars, order)?,
        ExprKind::Call(func, a) => eval_node(a, vars, order)?
            .apply(*func)
            .map_err(at(span))?,
        ExprKind::Binary(op, a, b) => {
            let lhs = eval_node(a, vars, order)?;
            let rhs = eval_node(b, vars, order)?;
            match op {
                BinOp::Add => lhs + rhs,
                BinOp::Sub => lhs - rhs,
                BinOp::Mul => lhs * rhs,
                BinOp::Div => lhs.try_div(&rhs).map_err(at(span))?,
                BinOp::Pow => lhs.pow(&rhs).map_err(at(span))?,
            }
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalError {
            span,
            source: JetError::NonFinite,
        })
    }
}

/// Plain floating-point evaluation with the same domain rules as [`eval_jet`].
pub fn eval_f64(expr: &Expr, point: [f64; 3]) -> Result<f64, EvalError> {
    let span = expr.span;
    let v = match &expr.kind {
        ExprKind::Int(n) => *n as f64,
        ExprKind::Decimal(v) => *v,
        ExprKind::Rational(p, q) => *p as f64 / *q as f64,
        ExprKind::Var(i) => point[*i],
        ExprKind::Neg(a) => -eval_f64(a, point)?,
        ExprKind::Call(func, a) => func.apply(eval_f64(a, point)?).map_err(at(span))?,
        ExprKind::Binary(op, a, b) => {
            let lhs = eval_f64(a, point)?;
            let rhs = eval_f64(b, point)?;
            match op {
                BinOp::Add => lhs + rhs,
                BinOp::Sub => lhs - rhs,
                BinOp::Mul => lhs * rhs,
                BinOp::Div => {
                    if rhs == 0.0 {
                        return Err(EvalError {
                            span,
                            source: JetError::DivisionByZero,
                        });
                    }
                    lhs / rhs
                }
                BinOp::Pow => pow_f64(lhs, rhs).map_err(at(span))?,
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError {
            span,
            source: JetError::NonFinite,
        })
    }
}

fn pow_f64(base: f64, exponent: f64) -> Result<f64, JetError> {
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        if exponent < 0.0 && base == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        return Ok(base.powi(exponent as i32));
    }
    if base <= 0.0 {
        return Err(JetError::Domain {
            func: "pow",
            value: base,
        });
    }
    Ok(base.powf(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn xyz() -> [String; 3] {
        ["x".into(), "y".into(), "z".into()]
    }

    fn point(p: [f64; 3], order: u8) -> [ScalarJet; 3] {
        [0, 1, 2].map(|i| ScalarJet::variable(p[i], i, order).unwrap())
    }

    #[test]
    fn product_rule() {
        let e = parse("x*y", &xyz()).unwrap();
        let j = eval_jet(&e, &point([2.0, 3.0, 0.0], 1)).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.partial([1, 0, 0]).unwrap(), 3.0);
        assert_eq!(j.partial([0, 1, 0]).unwrap(), 2.0);
        assert_eq!(j.partial([0, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn exp_of_two_z() {
        let e = parse("exp(2*z)", &xyz()).unwrap();
        let j = eval_jet(&e, &point([0.0; 3], 3)).unwrap();
        let want = [1.0, 2.0, 2.0, 4.0 / 3.0];
        for (k, w) in want.iter().enumerate() {
            let c = j.coefficient([0, 0, k as u8]).unwrap();
            assert!((c - w).abs() < 1e-15, "{k}: {c}");
        }
    }

    #[test]
    fn pole_is_division_error() {
        let e = parse("1/(x-1)", &xyz()).unwrap();
        let err = eval_jet(&e, &point([1.0, 0.0, 0.0], 3)).unwrap_err();
        assert_eq!(err.source, JetError::DivisionByZero);
        assert_eq!(err.span.start, 0);
        let err = eval_f64(&e, [1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err.source, JetError::DivisionByZero);
    }

    #[test]
    fn domain_errors() {
        let e = parse("log(x) + 1", &xyz()).unwrap();
        assert!(matches!(
            eval_jet(&e, &point([-1.0, 0.0, 0.0], 2)).unwrap_err().source,
            JetError::Domain { .. }
        ));
        let e = parse("sqrt(y)", &xyz()).unwrap();
        assert!(eval_f64(&e, [0.0, -2.0, 0.0]).is_err());
    }

    #[test]
    fn order_zero_matches_plain_evaluation() {
        let c = xyz();
        let src = "sin(x)*cosh(y) - z^3/(2 + x^2) + sqrt(1 + y^2)^(1/3) + tanh(z)*log(3 + x)";
        let e = parse(src, &c).unwrap();
        let p = [0.3, -0.7, 1.1];
        let j = eval_jet(&e, &point(p, 0)).unwrap();
        assert_eq!(j.order(), 0);
        assert_eq!(j.value(), eval_f64(&e, p).unwrap());
    }

    #[test]
    fn mismatched_assignment_orders() {
        let e = parse("x", &xyz()).unwrap();
        let mut vars = point([0.0; 3], 3);
        vars[2] = ScalarJet::variable(0.0, 2, 1).unwrap();
        assert!(matches!(
            eval_jet(&e, &vars).unwrap_err().source,
            JetError::OrderMismatch { .. }
        ));
    }
}
