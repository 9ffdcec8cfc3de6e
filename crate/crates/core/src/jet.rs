//! Truncated multivariate Taylor arithmetic in three variables.
//!
//! A [`ScalarJet`] carries the Taylor coefficients of a scalar function at a
//! fixed expansion point, for every multi-index `(k1, k2, k3)` with
//! `k1 + k2 + k3 <= order`. The coefficient of a multi-index `m` is the
//! partial derivative `∂^m f` divided by `m1! m2! m3!`.
//!
//! Coefficients live in a dense array of 20 slots ordered by total degree, so
//! the slots valid for a jet of order `k` are always a prefix of the array.
//! Slots beyond the order are kept at zero.
//!
//! The `std::ops` implementations combine jets of different orders by
//! truncating to the lower one, which is the order up to which the result is
//! known. [`jet_arith`] is the strict entry point that rejects mismatched
//! orders. Everything that can fail (division, elementary functions) returns
//! a [`JetError`] instead of producing non-finite coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Highest supported truncation order.
pub const MAX_ORDER: u8 = 3;

/// Number of coefficients stored for a jet of [`MAX_ORDER`].
pub const COEFF_COUNT: usize = 20;

/// Number of multi-indices of total degree at most `k`, for `k = 0..=3`.
const PREFIX_LEN: [usize; 4] = [1, 4, 10, 20];

/// Multi-indices, sorted by total degree.
pub const MULTI_INDICES: [[u8; 3]; COEFF_COUNT] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const NONE: u8 = u8::MAX;

const fn degree(m: [u8; 3]) -> u8 {
    m[0] + m[1] + m[2]
}

const fn slot_of(m: [u8; 3]) -> u8 {
    let mut i = 0;
    while i < COEFF_COUNT {
        let n = MULTI_INDICES[i];
        if n[0] == m[0] && n[1] == m[1] && n[2] == m[2] {
            return i as u8;
        }
        i += 1;
    }
    NONE
}

/// `PRODUCT[i][j]` is the slot of `m_i + m_j`, or `NONE` past degree 3.
const PRODUCT: [[u8; COEFF_COUNT]; COEFF_COUNT] = {
    let mut table = [[NONE; COEFF_COUNT]; COEFF_COUNT];
    let mut i = 0;
    while i < COEFF_COUNT {
        let mut j = 0;
        while j < COEFF_COUNT {
            let a = MULTI_INDICES[i];
            let b = MULTI_INDICES[j];
            let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            if degree(sum) <= MAX_ORDER {
                table[i][j] = slot_of(sum);
            }
            j += 1;
        }
        i += 1;
    }
    table
};

/// `RAISE[axis][i]` is the slot of `m_i + e_axis`, or `NONE` past degree 3.
const RAISE: [[u8; COEFF_COUNT]; 3] = {
    let mut table = [[NONE; COEFF_COUNT]; 3];
    let mut axis = 0;
    while axis < 3 {
        let mut i = 0;
        while i < COEFF_COUNT {
            let mut m = MULTI_INDICES[i];
            m[axis] += 1;
            if degree(m) <= MAX_ORDER {
                table[axis][i] = slot_of(m);
            }
            i += 1;
        }
        axis += 1;
    }
    table
};

/// Errors raised by jet arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} is outside 0..=3")]
    OrderOutOfRange(u8),
    #[error("coordinate index {0} is outside 0..3")]
    AxisOutOfRange(usize),
    #[error("jet orders differ ({left} vs {right})")]
    OrderMismatch { left: u8, right: u8 },
    #[error("division by a jet whose value is zero")]
    DivisionByZero,
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("multi-index {index:?} exceeds jet order {order}")]
    IndexAboveOrder { index: [u8; 3], order: u8 },
    #[error("cannot differentiate an order-0 jet")]
    NoDerivativeLeft,
    #[error("non-finite jet coefficient")]
    NonFinite,
}

/// How a real value is lifted into a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    Constant,
    /// Coordinate with the given zero-based index.
    Coordinate(usize),
}

/// Arithmetic operations accepted by [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Elementary functions with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Plain evaluation, with the same domain rules as the jet version.
    pub fn apply(self, x: f64) -> Result<f64, JetError> {
        self.check_domain(x)?;
        let v = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Sqrt => x.sqrt(),
        };
        finite(v)
    }

    fn check_domain(self, x: f64) -> Result<(), JetError> {
        let ok = match self {
            Func::Log | Func::Sqrt => x > 0.0,
            Func::Tan => x.cos().abs() > 1e-12,
            _ => x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(JetError::Domain {
                func: self.name(),
                value: x,
            })
        }
    }

    /// `f^(k)(x) / k!` for `k = 0..=3`.
    fn taylor_coefficients(self, x: f64) -> [f64; 4] {
        let d = match self {
            Func::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            Func::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            Func::Tan => {
                let t = x.tan();
                let sec2 = 1.0 + t * t;
                [t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t)]
            }
            Func::Exp => {
                let e = x.exp();
                [e; 4]
            }
            Func::Log => [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)],
            Func::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            Func::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            Func::Tanh => {
                let t = x.tanh();
                let sech2 = 1.0 - t * t;
                [t, sech2, -2.0 * t * sech2, -2.0 * sech2 * (1.0 - 3.0 * t * t)]
            }
            Func::Sqrt => {
                let s = x.sqrt();
                [
                    s,
                    0.5 / s,
                    -0.25 / (s * s * s),
                    0.375 / (s * s * s * s * s),
                ]
            }
        };
        [d[0], d[1], d[2] / 2.0, d[3] / 6.0]
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn finite(v: f64) -> Result<f64, JetError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(JetError::NonFinite)
    }
}

fn check_order(order: u8) -> Result<(), JetError> {
    if order > MAX_ORDER {
        Err(JetError::OrderOutOfRange(order))
    } else {
        Ok(())
    }
}

/// Truncated Taylor expansion of a scalar at a point, in three variables.
#[derive(Clone, Copy, PartialEq)]
pub struct ScalarJet {
    order: u8,
    coeffs: [f64; COEFF_COUNT],
}

impl fmt::Debug for ScalarJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarJet")
            .field("order", &self.order)
            .field("coeffs", &self.coefficients())
            .finish()
    }
}

impl ScalarJet {
    /// Jet of a constant function.
    pub fn constant(value: f64, order: u8) -> Result<Self, JetError> {
        check_order(order)?;
        finite(value)?;
        Ok(Self::constant_unchecked(value, order))
    }

    pub(crate) fn constant_unchecked(value: f64, order: u8) -> Self {
        let mut coeffs = [0.0; COEFF_COUNT];
        coeffs[0] = value;
        Self { order, coeffs }
    }

    /// Jet of the coordinate function `x_axis` at the point where it equals `value`.
    pub fn variable(value: f64, axis: usize, order: u8) -> Result<Self, JetError> {
        if axis >= 3 {
            return Err(JetError::AxisOutOfRange(axis));
        }
        let mut jet = Self::constant(value, order)?;
        if order >= 1 {
            jet.coeffs[1 + axis] = 1.0;
        }
        Ok(jet)
    }

    pub fn lift(value: f64, role: Lift, order: u8) -> Result<Self, JetError> {
        match role {
            Lift::Constant => Self::constant(value, order),
            Lift::Coordinate(axis) => Self::variable(value, axis, order),
        }
    }

    /// Builds a jet from its coefficient prefix (length `C(order+3, 3)`).
    pub fn from_coefficients(order: u8, coefficients: &[f64]) -> Result<Self, JetError> {
        check_order(order)?;
        let n = PREFIX_LEN[order as usize];
        if coefficients.len() != n {
            return Err(JetError::OrderOutOfRange(order));
        }
        let mut coeffs = [0.0; COEFF_COUNT];
        for (slot, &c) in coeffs.iter_mut().zip(coefficients) {
            *slot = finite(c)?;
        }
        Ok(Self { order, coeffs })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Number of coefficients carried at this order.
    pub fn len(&self) -> usize {
        PREFIX_LEN[self.order as usize]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficients in degree order (see [`MULTI_INDICES`]).
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs[..self.len()]
    }

    /// Taylor coefficient of the multi-index `m`.
    pub fn coefficient(&self, m: [u8; 3]) -> Result<f64, JetError> {
        if degree(m) > self.order {
            return Err(JetError::IndexAboveOrder {
                index: m,
                order: self.order,
            });
        }
        Ok(self.coeffs[slot_of(m) as usize])
    }

    /// The partial derivative `∂^m` at the expansion point.
    pub fn partial(&self, m: [u8; 3]) -> Result<f64, JetError> {
        const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
        let c = self.coefficient(m)?;
        Ok(c * FACT[m[0] as usize] * FACT[m[1] as usize] * FACT[m[2] as usize])
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_finite())
    }

    /// True when every coefficient above degree 0 vanishes.
    pub fn is_constant(&self) -> bool {
        self.coefficients()[1..].iter().all(|&c| c == 0.0)
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: u8) -> Self {
        if order >= self.order {
            return *self;
        }
        let mut out = Self::constant_unchecked(0.0, order);
        let n = PREFIX_LEN[order as usize];
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Jet of `∂f/∂x_axis`, one order lower.
    pub fn derivative(&self, axis: usize) -> Result<Self, JetError> {
        if axis >= 3 {
            return Err(JetError::AxisOutOfRange(axis));
        }
        if self.order == 0 {
            return Err(JetError::NoDerivativeLeft);
        }
        let order = self.order - 1;
        let mut out = Self::constant_unchecked(0.0, order);
        for i in 0..PREFIX_LEN[order as usize] {
            let src = RAISE[axis][i] as usize;
            let factor = f64::from(MULTI_INDICES[i][axis] + 1);
            out.coeffs[i] = factor * self.coeffs[src];
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for c in &mut out.coeffs {
            *c *= k;
        }
        out
    }

    /// The jet minus its value: the nilpotent part.
    fn nilpotent(&self) -> Self {
        let mut out = *self;
        out.coeffs[0] = 0.0;
        out
    }

    /// `Σ_k series[k] · (self − self₀)^k`, truncated at the jet order.
    fn compose(&self, series: &[f64; 4]) -> Self {
        let h = self.nilpotent();
        let mut acc = Self::constant_unchecked(series[self.order as usize], self.order);
        for k in (0..self.order as usize).rev() {
            acc = acc * h;
            acc.coeffs[0] += series[k];
        }
        acc
    }

    fn checked(self) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::NonFinite)
        }
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        Self::constant_unchecked(1.0, self.order).try_div(self)
    }

    /// Division, truncated to the lower operand order.
    ///
    /// Solves `q · rhs = self` degree by degree, so the value is exactly
    /// `self₀ / rhs₀`.
    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        let b0 = rhs.value();
        if b0 == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let order = self.order.min(rhs.order);
        let n = PREFIX_LEN[order as usize];
        let mut q = Self::constant_unchecked(0.0, order);
        let mut acc = [0.0; COEFF_COUNT];
        for k in 0..n {
            let qk = (self.coeffs[k] - acc[k]) / b0;
            q.coeffs[k] = qk;
            if qk == 0.0 {
                continue;
            }
            let rest = order - degree(MULTI_INDICES[k]);
            for j in 1..PREFIX_LEN[rest as usize] {
                acc[PRODUCT[k][j] as usize] += qk * rhs.coeffs[j];
            }
        }
        q.checked()
    }

    pub fn apply(&self, func: Func) -> Result<Self, JetError> {
        let x0 = self.value();
        func.check_domain(x0)?;
        self.compose(&func.taylor_coefficients(x0)).checked()
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = Self::constant_unchecked(1.0, self.order);
        let mut base = *self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result.checked()
    }

    /// Real power with a constant exponent; the base must be positive.
    pub fn powf(&self, exponent: f64) -> Result<Self, JetError> {
        let x0 = self.value();
        if x0 <= 0.0 {
            return Err(JetError::Domain {
                func: "pow",
                value: x0,
            });
        }
        let c = exponent;
        let p = x0.powf(c);
        let series = [
            p,
            c * p / x0,
            c * (c - 1.0) * p / (x0 * x0) / 2.0,
            c * (c - 1.0) * (c - 2.0) * p / (x0 * x0 * x0) / 6.0,
        ];
        self.compose(&series).checked()
    }

    /// `self^exponent` for jet-valued exponents.
    ///
    /// Constant integer exponents use repeated multiplication, so negative
    /// bases are allowed there; everything else requires a positive base.
    pub fn pow(&self, exponent: &Self) -> Result<Self, JetError> {
        if exponent.is_constant() {
            let e = exponent.value();
            if e.fract() == 0.0 && e.abs() <= 64.0 {
                return self.truncate(exponent.order).powi(e as i32);
            }
            return self.truncate(exponent.order).powf(e);
        }
        let log = self.apply(Func::Log)?;
        (*exponent * log).apply(Func::Exp)
    }
}

/// Strict arithmetic on jets of equal order.
pub fn jet_arith(op: ArithOp, a: &ScalarJet, b: Option<&ScalarJet>) -> Result<ScalarJet, JetError> {
    if op == ArithOp::Neg {
        return Ok(-*a);
    }
    let b = b.ok_or(JetError::OrderMismatch {
        left: a.order,
        right: a.order,
    })?;
    if a.order != b.order {
        return Err(JetError::OrderMismatch {
            left: a.order,
            right: b.order,
        });
    }
    let out = match op {
        ArithOp::Add => *a + *b,
        ArithOp::Sub => *a - *b,
        ArithOp::Mul => *a * *b,
        ArithOp::Div => return a.try_div(b),
        ArithOp::Neg => unreachable!(),
    };
    out.checked()
}

pub fn jet_elementary(func: Func, a: &ScalarJet) -> Result<ScalarJet, JetError> {
    a.apply(func)
}

pub fn jet_partial(a: &ScalarJet, m: [u8; 3]) -> Result<f64, JetError> {
    a.partial(m)
}

impl Add for ScalarJet {
    type Output = ScalarJet;

    fn add(self, rhs: ScalarJet) -> ScalarJet {
        let order = self.order.min(rhs.order);
        let mut out = Self::constant_unchecked(0.0, order);
        for i in 0..PREFIX_LEN[order as usize] {
            out.coeffs[i] = self.coeffs[i] + rhs.coeffs[i];
        }
        out
    }
}

impl Sub for ScalarJet {
    type Output = ScalarJet;

    fn sub(self, rhs: ScalarJet) -> ScalarJet {
        let order = self.order.min(rhs.order);
        let mut out = Self::constant_unchecked(0.0, order);
        for i in 0..PREFIX_LEN[order as usize] {
            out.coeffs[i] = self.coeffs[i] - rhs.coeffs[i];
        }
        out
    }
}

impl Mul for ScalarJet {
    type Output = ScalarJet;

    fn mul(self, rhs: ScalarJet) -> ScalarJet {
        let order = self.order.min(rhs.order);
        let mut out = Self::constant_unchecked(0.0, order);
        let total = PREFIX_LEN[order as usize];
        for i in 0..total {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            let rest = order - degree(MULTI_INDICES[i]);
            for j in 0..PREFIX_LEN[rest as usize] {
                out.coeffs[PRODUCT[i][j] as usize] += a * rhs.coeffs[j];
            }
        }
        out
    }
}

impl Neg for ScalarJet {
    type Output = ScalarJet;

    fn neg(self) -> ScalarJet {
        self.scale(-1.0)
    }
}

impl Add<f64> for ScalarJet {
    type Output = ScalarJet;

    fn add(mut self, rhs: f64) -> ScalarJet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for ScalarJet {
    type Output = ScalarJet;

    fn sub(mut self, rhs: f64) -> ScalarJet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for ScalarJet {
    type Output = ScalarJet;

    fn mul(self, rhs: f64) -> ScalarJet {
        self.scale(rhs)
    }
}

impl AddAssign for ScalarJet {
    fn add_assign(&mut self, rhs: ScalarJet) {
        *self = *self + rhs;
    }
}

impl SubAssign for ScalarJet {
    fn sub_assign(&mut self, rhs: ScalarJet) {
        *self = *self - rhs;
    }
}
