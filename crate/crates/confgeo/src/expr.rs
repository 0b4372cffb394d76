//! Immutable expression trees over chart coordinates and the deformation
//! parameter `alpha`.
//!
//! An [`Expr`] is the symbolic currency of the whole engine: metric
//! components, Hamiltonians, tensor fields and first integrals are all
//! built from these nodes. Children are reference-counted, so cloning a
//! tree is cheap and sharing subtrees across threads is safe.
//!
//! There is deliberately no general simplifier. Construction folds
//! constants and prunes algebraic identities (`x + 0`, `1 * x`, `x^1`,
//! ...) to keep derivative output small; everything beyond that is
//! decided numerically by sampling (see [`crate::sample`]).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Numeric constant: an exact integer ratio or a double.
///
/// Ratios written in source (`3/4`, `-2`) stay exact under differentiation
/// and constant folding; anything with a decimal point is an f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Rat(i64, i64),
    Real(f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Num {
    pub fn int(n: i64) -> Num {
        Num::Rat(n, 1)
    }

    /// Normalized rational; panics on zero denominator.
    pub fn rat(num: i64, den: i64) -> Num {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Num::Rat(s * num / g, s * den / g)
    }

    pub fn value(&self) -> f64 {
        match *self {
            Num::Rat(n, d) => n as f64 / d as f64,
            Num::Real(x) => x,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(*self, Num::Rat(0, _)) || matches!(*self, Num::Real(x) if x == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(*self, Num::Rat(n, d) if n == d) || matches!(*self, Num::Real(x) if x == 1.0)
    }

    /// Exponent usable with integer power rules.
    pub fn as_integer(&self) -> Option<i64> {
        match *self {
            Num::Rat(n, 1) => Some(n),
            Num::Rat(_, _) => None,
            Num::Real(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some(x as i64),
            Num::Real(_) => None,
        }
    }

    fn binop(
        self,
        other: Num,
        exact: impl Fn(i64, i64, i64, i64) -> Option<(i64, i64)>,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Num {
        if let (Num::Rat(a, b), Num::Rat(c, d)) = (self, other) {
            if let Some((n, den)) = exact(a, b, c, d) {
                if den != 0 {
                    return Num::rat(n, den);
                }
            }
        }
        Num::Real(approx(self.value(), other.value()))
    }

    pub fn add(self, other: Num) -> Num {
        self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(d)?.checked_add(c.checked_mul(b)?)?, b.checked_mul(d)?)),
            |x, y| x + y,
        )
    }

    pub fn sub(self, other: Num) -> Num {
        self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(d)?.checked_sub(c.checked_mul(b)?)?, b.checked_mul(d)?)),
            |x, y| x - y,
        )
    }

    pub fn mul(self, other: Num) -> Num {
        self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(c)?, b.checked_mul(d)?)),
            |x, y| x * y,
        )
    }

    /// Exact division when both sides are rational and the divisor is nonzero.
    pub fn div(self, other: Num) -> Option<Num> {
        if other.is_zero() {
            return None;
        }
        Some(self.binop(
            other,
            |a, b, c, d| Some((a.checked_mul(d)?, b.checked_mul(c)?)),
            |x, y| x / y,
        ))
    }

    pub fn neg(self) -> Num {
        match self {
            Num::Rat(n, d) => Num::Rat(-n, d),
            Num::Real(x) => Num::Real(-x),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Num::Rat(n, 1) => write!(f, "{n}"),
            Num::Rat(n, d) => write!(f, "{n}/{d}"),
            // {:?} is the shortest representation that round-trips through
            // the parser bit-exactly.
            Num::Real(x) => write!(f, "{x:?}"),
        }
    }
}

/// Expression node. `Coord(i)` refers to the i-th coordinate of whatever
/// chart the expression is evaluated on (0-based); `Alpha` is the
/// deformation parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Num),
    Coord(usize),
    Alpha,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Abs(Arc<Expr>),
    Sign(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Tan(Arc<Expr>),
    Cot(Arc<Expr>),
    Ln(Arc<Expr>),
    Exp(Arc<Expr>),
}

/// Evaluation failure, reported with the offending subexpression.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("log of non-positive value {value} in `{expr}`")]
    LogDomain { expr: String, value: f64 },
    #[error("fractional power of negative base {base} in `{expr}`")]
    PowDomain { expr: String, base: f64 },
    #[error("coordinate x{} is exactly zero (outside the open domain) in `{expr}`", index + 1)]
    CoordinateZero { expr: String, index: usize },
    #[error("coordinate index {index} out of range for a {dim}-dimensional point")]
    CoordOutOfRange { index: usize, dim: usize },
    #[error("non-finite result in `{expr}`")]
    NonFinite { expr: String },
}

fn arc(e: Expr) -> Arc<Expr> {
    Arc::new(e)
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Num::int(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Const(Num::rat(n, d))
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Num::Real(x))
    }

    pub fn coord(i: usize) -> Expr {
        Expr::Coord(i)
    }

    pub fn alpha() -> Expr {
        Expr::Alpha
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(n) if n.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(n) if n.is_one())
    }

    fn as_const(&self) -> Option<Num> {
        match self {
            Expr::Const(n) => Some(*n),
            _ => None,
        }
    }

    /// `a + b` with constant folding and zero pruning.
    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::Const(x.add(y));
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        Expr::Add(arc(a), arc(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::Const(x.sub(y));
        }
        if b.is_zero() {
            return a;
        }
        Expr::Sub(arc(a), arc(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::Const(x.mul(y));
        }
        if a.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        Expr::Mul(arc(a), arc(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Some(q) = x.div(y) {
                return Expr::Const(q);
            }
        }
        if a.is_zero() && !b.is_zero() {
            return Expr::zero();
        }
        if b.is_one() {
            return a;
        }
        Expr::Div(arc(a), arc(b))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return base;
        }
        if base.is_one() {
            return Expr::one();
        }
        if let (Some(b), Some(e)) = (base.as_const(), exponent.as_const()) {
            if let Some(k) = e.as_integer() {
                if k.unsigned_abs() <= 8 {
                    let mut acc = Num::int(1);
                    for _ in 0..k.unsigned_abs() {
                        acc = acc.mul(b);
                    }
                    if k < 0 {
                        if let Some(inv) = Num::int(1).div(acc) {
                            return Expr::Const(inv);
                        }
                    } else {
                        return Expr::Const(acc);
                    }
                }
            }
        }
        Expr::Pow(arc(base), arc(exponent))
    }

    pub fn neg(a: Expr) -> Expr {
        if let Some(x) = a.as_const() {
            return Expr::Const(x.neg());
        }
        Expr::mul(Expr::int(-1), a)
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::Abs(arc(a))
    }

    pub fn sign(a: Expr) -> Expr {
        Expr::Sign(arc(a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(arc(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(arc(a))
    }

    pub fn tan(a: Expr) -> Expr {
        Expr::Tan(arc(a))
    }

    pub fn cot(a: Expr) -> Expr {
        Expr::Cot(arc(a))
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::Ln(arc(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(arc(a))
    }

    /// `|x_i|` as an expression.
    pub fn abs_coord(i: usize) -> Expr {
        Expr::abs(Expr::coord(i))
    }

    /// `|x_i|^e`, the weight factor appearing throughout the deformed
    /// structures.
    pub fn abs_coord_pow(i: usize, e: Expr) -> Expr {
        Expr::pow(Expr::abs_coord(i), e)
    }

    /// `alpha - 1`
    pub fn alpha_minus_one() -> Expr {
        Expr::sub(Expr::alpha(), Expr::one())
    }

    /// `1 - alpha`
    pub fn one_minus_alpha() -> Expr {
        Expr::sub(Expr::one(), Expr::alpha())
    }

    /// Evaluate at a point (`point[i]` is coordinate i) for a given alpha.
    ///
    /// Deterministic: identical arguments always produce bit-identical
    /// results. Domain violations carry the offending subexpression.
    pub fn eval(&self, point: &[f64], alpha: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(n) => n.value(),
            Expr::Coord(i) => {
                let x = *point
                    .get(*i)
                    .ok_or(EvalError::CoordOutOfRange { index: *i, dim: point.len() })?;
                if x == 0.0 {
                    return Err(EvalError::CoordinateZero { expr: self.print_default(), index: *i });
                }
                x
            }
            Expr::Alpha => alpha,
            Expr::Add(a, b) => a.eval(point, alpha)? + b.eval(point, alpha)?,
            Expr::Sub(a, b) => a.eval(point, alpha)? - b.eval(point, alpha)?,
            Expr::Mul(a, b) => a.eval(point, alpha)? * b.eval(point, alpha)?,
            Expr::Div(a, b) => {
                let den = b.eval(point, alpha)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { expr: self.print_default() });
                }
                a.eval(point, alpha)? / den
            }
            Expr::Pow(b, e) => {
                let base = b.eval(point, alpha)?;
                let expo = e.eval(point, alpha)?;
                if base > 0.0 {
                    base.powf(expo)
                } else if expo.fract() == 0.0 && expo.abs() < 1e9 {
                    if base == 0.0 && expo <= 0.0 {
                        return Err(EvalError::DivisionByZero { expr: self.print_default() });
                    }
                    base.powi(expo as i32)
                } else if base == 0.0 {
                    if expo > 0.0 {
                        0.0
                    } else {
                        return Err(EvalError::DivisionByZero { expr: self.print_default() });
                    }
                } else {
                    return Err(EvalError::PowDomain { expr: self.print_default(), base });
                }
            }
            Expr::Abs(a) => a.eval(point, alpha)?.abs(),
            Expr::Sign(a) => {
                let x = a.eval(point, alpha)?;
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Expr::Sin(a) => a.eval(point, alpha)?.sin(),
            Expr::Cos(a) => a.eval(point, alpha)?.cos(),
            Expr::Tan(a) => a.eval(point, alpha)?.tan(),
            Expr::Cot(a) => {
                let x = a.eval(point, alpha)?;
                let s = x.sin();
                if s == 0.0 {
                    return Err(EvalError::DivisionByZero { expr: self.print_default() });
                }
                x.cos() / s
            }
            Expr::Ln(a) => {
                let x = a.eval(point, alpha)?;
                if x <= 0.0 {
                    return Err(EvalError::LogDomain { expr: self.print_default(), value: x });
                }
                x.ln()
            }
            Expr::Exp(a) => a.eval(point, alpha)?.exp(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { expr: self.print_default() })
        }
    }

    /// Exact partial derivative with respect to coordinate `coord`.
    ///
    /// On the open domain `d|x|/dx = sign(x)` and `d sign(x)/dx = 0`.
    pub fn diff(&self, coord: usize) -> Expr {
        match self {
            Expr::Const(_) | Expr::Alpha => Expr::zero(),
            Expr::Coord(i) => {
                if *i == coord {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => Expr::add(a.diff(coord), b.diff(coord)),
            Expr::Sub(a, b) => Expr::sub(a.diff(coord), b.diff(coord)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul((**a).clone(), b.diff(coord)),
                Expr::mul(a.diff(coord), (**b).clone()),
            ),
            Expr::Div(a, b) => {
                let da = a.diff(coord);
                let db = b.diff(coord);
                if db.is_zero() {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(
                        Expr::mul(da, (**b).clone()),
                        Expr::mul((**a).clone(), db),
                    ),
                    Expr::pow((**b).clone(), Expr::int(2)),
                )
            }
            Expr::Pow(b, e) => {
                let db = b.diff(coord);
                let de = e.diff(coord);
                if de.is_zero() {
                    // e * b^(e-1) * b'
                    Expr::mul(
                        Expr::mul(
                            (**e).clone(),
                            Expr::pow((**b).clone(), Expr::sub((**e).clone(), Expr::one())),
                        ),
                        db,
                    )
                } else {
                    // b^e * (e' ln b + e b'/b); exponents that depend on the
                    // chart only occur with positive bases here.
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(de, Expr::ln((**b).clone())),
                            Expr::div(Expr::mul((**e).clone(), db), (**b).clone()),
                        ),
                    )
                }
            }
            Expr::Abs(a) => Expr::mul(Expr::sign((**a).clone()), a.diff(coord)),
            Expr::Sign(_) => Expr::zero(),
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.diff(coord)),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.diff(coord))),
            Expr::Tan(a) => Expr::mul(
                Expr::add(
                    Expr::one(),
                    Expr::pow(Expr::tan((**a).clone()), Expr::int(2)),
                ),
                a.diff(coord),
            ),
            Expr::Cot(a) => Expr::neg(Expr::mul(
                Expr::add(
                    Expr::one(),
                    Expr::pow(Expr::cot((**a).clone()), Expr::int(2)),
                ),
                a.diff(coord),
            )),
            Expr::Ln(a) => Expr::div(a.diff(coord), (**a).clone()),
            Expr::Exp(a) => Expr::mul(self.clone(), a.diff(coord)),
        }
    }

    /// The mu-th summand of the conformable differential:
    /// `alpha * |x_mu|^(alpha-1) * d(self)/dx_mu`.
    pub fn alpha_partial(&self, mu: usize) -> Expr {
        Expr::mul(
            Expr::mul(
                Expr::alpha(),
                Expr::abs_coord_pow(mu, Expr::alpha_minus_one()),
            ),
            self.diff(mu),
        )
    }

    /// True if any `Coord(i)` node appears in the tree.
    pub fn depends_on(&self, i: usize) -> bool {
        match self {
            Expr::Const(_) | Expr::Alpha => false,
            Expr::Coord(j) => *j == i,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(i) || b.depends_on(i)
            }
            Expr::Abs(a)
            | Expr::Sign(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Tan(a)
            | Expr::Cot(a)
            | Expr::Ln(a)
            | Expr::Exp(a) => a.depends_on(i),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Alpha => None,
            Expr::Coord(j) => Some(*j),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Abs(a)
            | Expr::Sign(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Tan(a)
            | Expr::Cot(a)
            | Expr::Ln(a)
            | Expr::Exp(a) => a.max_coord(),
        }
    }
}

/// The map `g(z) = |z|^(alpha-1) z` underlying the deformed arithmetic.
pub fn g_map(z: f64, alpha: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        z.abs().powf(alpha - 1.0) * z
    }
}

/// Inverse map `g^{-1}(Z) = |Z|^(1/alpha - 1) Z`.
pub fn g_inv(z: f64, alpha: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        z.abs().powf(1.0 / alpha - 1.0) * z
    }
}

/// alpha-addition: `g^{-1}(g(a) + g(b))`.
pub fn alpha_add(a: f64, b: f64, alpha: f64) -> f64 {
    g_inv(g_map(a, alpha) + g_map(b, alpha), alpha)
}

/// alpha-subtraction: `g^{-1}(g(a) - g(b))`.
pub fn alpha_sub(a: f64, b: f64, alpha: f64) -> f64 {
    g_inv(g_map(a, alpha) - g_map(b, alpha), alpha)
}

/// alpha-multiplication is the ordinary product.
pub fn alpha_mul(a: f64, b: f64, _alpha: f64) -> f64 {
    a * b
}

/// alpha-division is the ordinary quotient; `None` for a zero divisor.
pub fn alpha_div(a: f64, b: f64, _alpha: f64) -> Option<f64> {
    if b == 0.0 {
        None
    } else {
        Some(a / b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_constants_stay_exact() {
        let e = Expr::div(Expr::int(1), Expr::int(3));
        assert_eq!(e, Expr::rat(1, 3));
        let d = Expr::add(Expr::rat(1, 3), Expr::rat(1, 6));
        assert_eq!(d, Expr::rat(1, 2));
    }

    #[test]
    fn smart_constructors_prune_identities() {
        let x = Expr::coord(0);
        assert_eq!(Expr::add(x.clone(), Expr::zero()), x);
        assert_eq!(Expr::mul(x.clone(), Expr::one()), x);
        assert!(Expr::mul(x.clone(), Expr::zero()).is_zero());
        assert_eq!(Expr::pow(x.clone(), Expr::one()), x);
        assert!(Expr::pow(x, Expr::zero()).is_one());
    }

    #[test]
    fn eval_christoffel_closed_form() {
        // (alpha - 1)/q^1 at q^1 = 2, alpha = 0.7
        let e = Expr::div(Expr::alpha_minus_one(), Expr::coord(0));
        let v = e.eval(&[2.0], 0.7).unwrap();
        assert!((v - (-0.15)).abs() < 1e-15);
    }

    #[test]
    fn eval_alpha_one_collapses_abs_powers() {
        // |x|^(alpha-1) * x at alpha = 1 is x itself
        let e = Expr::mul(
            Expr::abs_coord_pow(0, Expr::alpha_minus_one()),
            Expr::coord(0),
        );
        for &x in &[0.3, 1.7, 2.9] {
            assert_eq!(e.eval(&[x], 1.0).unwrap(), x);
        }
    }

    #[test]
    fn eval_is_pure() {
        let e = Expr::pow(Expr::abs_coord(0), Expr::alpha_minus_one());
        let a = e.eval(&[1.234_567, 0.0], 0.61).unwrap();
        let b = e.eval(&[1.234_567, 0.0], 0.61).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn eval_domain_errors_name_subexpression() {
        let e = Expr::div(Expr::one(), Expr::sub(Expr::coord(0), Expr::int(2)));
        let err = e.eval(&[2.0], 0.7).unwrap_err();
        match err {
            EvalError::DivisionByZero { expr } => assert!(expr.contains("x1 - 2")),
            other => panic!("unexpected error {other:?}"),
        }
        let z = Expr::coord(1);
        assert!(matches!(
            z.eval(&[1.0, 0.0], 0.7),
            Err(EvalError::CoordinateZero { index: 1, .. })
        ));
    }

    #[test]
    fn diff_constant_is_zero() {
        assert!(Expr::rat(5, 3).diff(0).is_zero());
        assert!(Expr::Alpha.diff(2).is_zero());
    }

    #[test]
    fn diff_product_rule_structure() {
        // d(x*y)/dx = y
        let e = Expr::mul(Expr::coord(0), Expr::coord(1));
        let d = e.diff(0);
        let v = d.eval(&[3.0, 4.0], 0.7).unwrap();
        assert_eq!(v, 4.0);
    }

    /// Central finite difference used as the independent oracle for the
    /// symbolic derivative.
    fn central_diff(e: &Expr, point: &[f64], alpha: f64, coord: usize, h: f64) -> f64 {
        let mut plus = point.to_vec();
        let mut minus = point.to_vec();
        plus[coord] += h;
        minus[coord] -= h;
        (e.eval(&plus, alpha).unwrap() - e.eval(&minus, alpha).unwrap()) / (2.0 * h)
    }

    #[test]
    fn diff_matches_finite_difference_on_abs_power() {
        // d/dq ( |q|^(alpha-1) * q ) at q = 2, alpha = 0.7
        let e = Expr::mul(
            Expr::abs_coord_pow(0, Expr::alpha_minus_one()),
            Expr::coord(0),
        );
        let sym = e.diff(0).eval(&[2.0], 0.7).unwrap();
        let fd = central_diff(&e, &[2.0], 0.7, 0, 1e-6);
        assert!(
            (sym - fd).abs() <= 1e-7 * sym.abs().max(1.0),
            "sym {sym} vs fd {fd}"
        );
    }

    #[test]
    fn alpha_partial_power_rule() {
        // alpha_partial(x^m, x) = alpha * m * |x|^(alpha-1) * x^(m-1);
        // at alpha = 1 this is the plain power rule.
        let e = Expr::pow(Expr::coord(0), Expr::int(3));
        let ap = e.alpha_partial(0);
        let v1 = ap.eval(&[2.0], 1.0).unwrap();
        assert!((v1 - 12.0).abs() < 1e-12);
        let v = ap.eval(&[2.0], 0.7).unwrap();
        let expect = 0.7 * 3.0 * 2.0f64.powf(-0.3) * 4.0;
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn alpha_partial_of_constant_vanishes() {
        assert!(Expr::rat(7, 2).alpha_partial(3).is_zero());
    }

    #[test]
    fn alpha_arithmetic_against_composed_maps() {
        // Defining property and endpoint values of g.
        assert_eq!(g_map(0.0, 0.5), 0.0);
        assert_eq!(g_map(1.0, 0.5), 1.0);
        for &alpha in &[0.5, 0.7, 1.0] {
            // g(a (+) b) = g(a) + g(b) exactly (to rounding).
            let (a, b) = (2.0, 3.0);
            let s = alpha_add(a, b, alpha);
            let lhs = g_map(s, alpha);
            let rhs = g_map(a, alpha) + g_map(b, alpha);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            // neutral element
            assert!((alpha_add(0.0, b, alpha) - b).abs() < 1e-14);
        }
        // classical limit
        assert!((alpha_add(2.0, 3.0, 1.0) - 5.0).abs() < 1e-14);
        // explicit formula cross-check at alpha = 0.5:
        // g(2) = 2^(0.5-1)*2 = 2^0.5, g(3) = 3^0.5, sum s, g^{-1}(s) = s^(2-1)*s = s^2
        let s = 2f64.sqrt() + 3f64.sqrt();
        assert!((alpha_add(2.0, 3.0, 0.5) - s * s).abs() < 1e-12);
        assert_eq!(alpha_mul(2.0, 3.0, 0.5), 6.0);
        assert_eq!(alpha_div(3.0, 2.0, 0.5), Some(1.5));
        assert_eq!(alpha_div(3.0, 0.0, 0.5), None);
    }

    #[test]
    fn diff_independent_polynomial_oracle() {
        // eval of a random degree-3 polynomial agrees with a hand-coded
        // straight-line evaluator to 1e-14 relative on 100 points.
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // monomials: (coefficient, degrees per coordinate), total degree <= 3
        let mut monos = Vec::new();
        for _ in 0..6 {
            let c = rng.gen_range(-3..=3).max(1) as i64;
            let mut degs = [0usize; 3];
            let total = rng.gen_range(0..=3);
            for _ in 0..total {
                degs[rng.gen_range(0..3)] += 1;
            }
            monos.push((c, degs));
        }
        let mut e = Expr::zero();
        for (c, degs) in &monos {
            let mut t = Expr::int(*c);
            for (i, &d) in degs.iter().enumerate() {
                if d > 0 {
                    t = Expr::mul(t, Expr::pow(Expr::coord(i), Expr::int(d as i64)));
                }
            }
            e = Expr::add(e, t);
        }
        let straight_line = |p: &[f64]| -> f64 {
            monos
                .iter()
                .map(|(c, degs)| {
                    let mut v = *c as f64;
                    for (i, &d) in degs.iter().enumerate() {
                        for _ in 0..d {
                            v *= p[i];
                        }
                    }
                    v
                })
                .sum()
        };
        for _ in 0..100 {
            let p = [
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.5..3.0),
            ];
            let a = e.eval(&p, 0.7).unwrap();
            let b = straight_line(&p);
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
    }
}
