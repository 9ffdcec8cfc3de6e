use paracurv::expr::{eval_f64, eval_jet, parse, BinOp, Expr, ExprKind, Func, Span};
use paracurv::jet::{ScalarJet, COEFF_COUNT};
use proptest::prelude::*;

fn coords() -> [String; 3] {
    ["x".into(), "y".into(), "z".into()]
}

fn jet_strategy() -> impl Strategy<Value = ScalarJet> {
    prop::collection::vec(-3.0..3.0f64, COEFF_COUNT).prop_map(|c| ScalarJet::from_coefficients(3, &c).unwrap())
}

fn close(a: &ScalarJet, b: &ScalarJet, tol: f64) -> bool {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #[test]
    fn jets_form_a_commutative_ring(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert!(close(&(a * b), &(b * a), 1e-14));
        prop_assert!(close(&((a + b) + c), &(a + (b + c)), 1e-14));
        prop_assert!(close(&((a * b) * c), &(a * (b * c)), 1e-12));
        prop_assert!(close(&(a * (b + c)), &(a * b + a * c), 1e-12));
        let zero = ScalarJet::constant(0.0, 3).unwrap();
        let one = ScalarJet::constant(1.0, 3).unwrap();
        prop_assert_eq!(a + zero, a);
        prop_assert_eq!(a * one, a);
        prop_assert!(close(&(a - a), &zero, 0.0));
    }

    #[test]
    fn reciprocal_inverts(a in jet_strategy(), shift in 0.5..3.0f64) {
        // push the value away from zero
        let a = a + if a.value() >= 0.0 { shift } else { -shift };
        let one = ScalarJet::constant(1.0, 3).unwrap();
        let inv = a.recip().unwrap();
        prop_assert!(close(&(a * inv), &one, 1e-10));
        prop_assert!(close(&a.try_div(&a).unwrap(), &one, 1e-10));
    }
}

fn lit_int(n: u64) -> Expr {
    Expr::new(ExprKind::Int(n), Span::default())
}

fn lit_dec(v: f64) -> Expr {
    Expr::new(ExprKind::Decimal(v), Span::default())
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::call(f, a)
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::binary(op, a, b)
}

/// Random trees of depth ≤ 6 whose values and derivatives stay moderate on
/// [-1, 1]³. Partial functions only see arguments inside their domain;
/// decimals are non-negative and no division has two integer literals.
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expr::var),
        (0u64..4).prop_map(lit_int),
        (10u32..300).prop_map(|k| lit_dec(f64::from(k) / 100.0)),
    ];
    leaf.prop_recursive(4, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinOp::Mul, call(Func::Tanh, a), b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                bin(BinOp::Div, a, bin(BinOp::Add, lit_dec(1.5), call(Func::Sin, b)))
            }),
            inner.clone().prop_map(|a| bin(BinOp::Pow, call(Func::Sin, a), lit_int(2))),
            inner.clone().prop_map(|a| call(Func::Sin, a)),
            inner.clone().prop_map(|a| call(Func::Cos, a)),
            inner.clone().prop_map(|a| call(Func::Exp, call(Func::Sin, a))),
            inner.clone().prop_map(|a| call(Func::Log, bin(BinOp::Add, lit_int(2), call(Func::Cos, a)))),
            inner.clone().prop_map(|a| call(Func::Sqrt, bin(BinOp::Add, lit_dec(1.25), call(Func::Sin, a)))),
            inner.clone().prop_map(|a| call(Func::Tan, bin(BinOp::Mul, lit_dec(0.5), call(Func::Sin, a)))),
            inner.clone().prop_map(|a| call(Func::Sinh, call(Func::Tanh, a))),
            inner.clone().prop_map(|a| call(Func::Cosh, call(Func::Tanh, a))),
            (inner.clone(), inner).prop_map(|(a, b)| {
                bin(BinOp::Pow, bin(BinOp::Add, lit_int(2), call(Func::Sin, a)), call(Func::Cos, b))
            }),
        ]
    })
    .prop_filter("depth at most 6", |e| e.depth() <= 6)
}

const STEP: f64 = 1e-4;
const REL: f64 = 1e-5;

fn jet_at(e: &Expr, p: [f64; 3]) -> ScalarJet {
    let vars: [ScalarJet; 3] = std::array::from_fn(|i| ScalarJet::variable(p[i], i, 3).unwrap());
    eval_jet(e, &vars).unwrap()
}

fn shifted(p: [f64; 3], axis: usize, h: f64) -> [f64; 3] {
    let mut q = p;
    q[axis] += h;
    q
}

fn plus(m: [u8; 3], axis: usize) -> [u8; 3] {
    let mut n = m;
    n[axis] += 1;
    n
}

fn lower_indices() -> Vec<[u8; 3]> {
    let mut v = vec![[0, 0, 0]];
    for i in 0..3 {
        v.push(plus([0, 0, 0], i));
        for j in i..3 {
            v.push(plus(plus([0, 0, 0], i), j));
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn jet_derivatives_match_central_differences(
        e in expr_strategy(),
        p in prop::array::uniform3(-1.0..1.0f64),
    ) {
        prop_assert!(e.depth() <= 6);
        let jet = jet_at(&e, p);
        prop_assert!((jet.value() - eval_f64(&e, p).unwrap()).abs() <= 1e-12 * (1.0 + jet.value().abs()));
        // Each partial up to order 3 against the central difference of the
        // next-lower partial.
        for m in lower_indices() {
            for axis in 0..3 {
                let up = plus(m, axis);
                let exact = jet.partial(up).unwrap();
                let fwd = jet_at(&e, shifted(p, axis, STEP)).partial(m).unwrap();
                let bwd = jet_at(&e, shifted(p, axis, -STEP)).partial(m).unwrap();
                let fd = (fwd - bwd) / (2.0 * STEP);
                prop_assert!(
                    (fd - exact).abs() <= REL * exact.abs().max(1.0),
                    "{} at {:?}: ∂^{:?} exact {} fd {}",
                    e.display(&coords()), p, up, exact, fd
                );
            }
        }
    }

    #[test]
    fn printing_then_parsing_is_identity(e in expr_strategy()) {
        let text = e.display(&coords()).to_string();
        let back = parse(&text, &coords()).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.display(&coords()).to_string(), text);
    }
}

