//! Coordinate expressions: the closed set of scalar formulas that every
//! tensor component is written in.
//!
//! Nodes are reference counted so that composite fields (for example the
//! components of `φX` or of a deformed metric) can share subtrees freely.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::JetScalar;

/// Scalar expression over chart coordinates `x0 … x(d-1)` and, for family
/// templates, named parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum CoordExpr {
    Const(f64),
    Var(usize),
    /// Family parameter; must be substituted before evaluation.
    Param(usize),
    Neg(Arc<CoordExpr>),
    Add(Arc<CoordExpr>, Arc<CoordExpr>),
    Sub(Arc<CoordExpr>, Arc<CoordExpr>),
    Mul(Arc<CoordExpr>, Arc<CoordExpr>),
    Div(Arc<CoordExpr>, Arc<CoordExpr>),
    Pow(Arc<CoordExpr>, i32),
    Sin(Arc<CoordExpr>),
    Cos(Arc<CoordExpr>),
    Exp(Arc<CoordExpr>),
    Log(Arc<CoordExpr>),
}

use CoordExpr::*;

/// Unary functions accepted by the parser and printer.
pub const FUNCTIONS: [&str; 4] = ["sin", "cos", "exp", "log"];

impl CoordExpr {
    pub fn zero() -> Self {
        Const(0.0)
    }

    pub fn one() -> Self {
        Const(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Const(c)
    }

    pub fn var(i: usize) -> Self {
        Var(i)
    }

    pub fn param(i: usize) -> Self {
        Param(i)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    // Folding constructors. They drop additive zeros and multiplicative
    // ones/zeros so that symbolically composed fields stay small.

    pub fn sum(a: CoordExpr, b: CoordExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Add(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn difference(a: CoordExpr, b: CoordExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x - y),
            (Some(x), _) if x == 0.0 => Self::negate(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Sub(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn product(a: CoordExpr, b: CoordExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Const(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Self::negate(b),
            (_, Some(y)) if y == -1.0 => Self::negate(a),
            _ => Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn quotient(a: CoordExpr, b: CoordExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Const(x / y),
            (_, Some(y)) if y == 1.0 => a,
            _ => Div(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn negate(a: CoordExpr) -> Self {
        match a {
            Const(c) => Const(-c),
            Neg(inner) => Arc::unwrap_or_clone(inner),
            other => Neg(Arc::new(other)),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        match (self.as_const(), n) {
            (_, 0) => Const(1.0),
            (_, 1) => self,
            (Some(c), n) if c != 0.0 || n > 0 => Const(c.powi(n)),
            _ => Pow(Arc::new(self), n),
        }
    }

    pub fn sin(self) -> Self {
        match self.as_const() {
            Some(c) => Const(c.sin()),
            None => Sin(Arc::new(self)),
        }
    }

    pub fn cos(self) -> Self {
        match self.as_const() {
            Some(c) => Const(c.cos()),
            None => Cos(Arc::new(self)),
        }
    }

    pub fn exp(self) -> Self {
        match self.as_const() {
            Some(c) => Const(c.exp()),
            None => Exp(Arc::new(self)),
        }
    }

    pub fn ln(self) -> Self {
        match self.as_const() {
            Some(c) if c > 0.0 => Const(c.ln()),
            _ => Log(Arc::new(self)),
        }
    }

    /// Sum of an iterator of expressions, folding constants.
    pub fn sum_all<I: IntoIterator<Item = CoordExpr>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), Self::sum)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Const(_) | Param(_) => None,
            Var(i) => Some(*i),
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) | Log(a) => a.max_var(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    pub fn has_params(&self) -> bool {
        match self {
            Param(_) => true,
            Const(_) | Var(_) => false,
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) | Log(a) => a.has_params(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.has_params() || b.has_params(),
        }
    }

    /// Replace every parameter node by its value. Constants are folded on
    /// the way back up.
    pub fn substitute_params(&self, values: &[f64]) -> Result<CoordExpr> {
        let rec = |a: &Arc<CoordExpr>| a.substitute_params(values);
        Ok(match self {
            Const(_) | Var(_) => self.clone(),
            Param(i) => Const(*values.get(*i).ok_or(Error::UnboundParameter(*i))?),
            Neg(a) => Self::negate(rec(a)?),
            Add(a, b) => Self::sum(rec(a)?, rec(b)?),
            Sub(a, b) => Self::difference(rec(a)?, rec(b)?),
            Mul(a, b) => Self::product(rec(a)?, rec(b)?),
            Div(a, b) => Self::quotient(rec(a)?, rec(b)?),
            Pow(a, n) => rec(a)?.powi(*n),
            Sin(a) => rec(a)?.sin(),
            Cos(a) => rec(a)?.cos(),
            Exp(a) => rec(a)?.exp(),
            Log(a) => rec(a)?.ln(),
        })
    }

    /// Plain value at a point.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.eval_as::<f64>(p)
    }

    /// Evaluate with any jet arithmetic. Domain obligations of `/`, `log`
    /// and negative powers are checked on the value part.
    pub fn eval_as<T: JetScalar>(&self, p: &[f64]) -> Result<T> {
        let dim = p.len();
        match self {
            Const(c) => Ok(T::constant(*c, dim)),
            Var(i) => {
                let v = *p.get(*i).ok_or(Error::VariableOutOfRange { index: *i, dim })?;
                Ok(T::variable(v, *i, dim))
            }
            Param(i) => Err(Error::UnboundParameter(*i)),
            Neg(a) => Ok(a.eval_as::<T>(p)?.neg()),
            Add(a, b) => Ok(a.eval_as::<T>(p)?.add(&b.eval_as::<T>(p)?)),
            Sub(a, b) => Ok(a.eval_as::<T>(p)?.sub(&b.eval_as::<T>(p)?)),
            Mul(a, b) => Ok(a.eval_as::<T>(p)?.mul(&b.eval_as::<T>(p)?)),
            Div(a, b) => {
                let num = a.eval_as::<T>(p)?;
                let den = b.eval_as::<T>(p)?;
                let v = den.value();
                if v == 0.0 || !v.is_finite() {
                    return Err(Error::Domain(format!("division by {v} at {p:?}")));
                }
                Ok(num.mul(&den.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))))
            }
            Pow(a, n) => {
                let base = a.eval_as::<T>(p)?;
                let v = base.value();
                let n = *n;
                if n < 0 && v == 0.0 {
                    return Err(Error::Domain(format!("zero raised to {n} at {p:?}")));
                }
                let nf = n as f64;
                let f1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
                let f2 = if n == 0 || n == 1 { 0.0 } else { nf * (nf - 1.0) * v.powi(n - 2) };
                Ok(base.compose(v.powi(n), f1, f2))
            }
            Sin(a) => {
                let x = a.eval_as::<T>(p)?;
                let v = x.value();
                Ok(x.compose(v.sin(), v.cos(), -v.sin()))
            }
            Cos(a) => {
                let x = a.eval_as::<T>(p)?;
                let v = x.value();
                Ok(x.compose(v.cos(), -v.sin(), -v.cos()))
            }
            Exp(a) => {
                let x = a.eval_as::<T>(p)?;
                let e = x.value().exp();
                Ok(x.compose(e, e, e))
            }
            Log(a) => {
                let x = a.eval_as::<T>(p)?;
                let v = x.value();
                if !(v > 0.0) {
                    return Err(Error::Domain(format!("log of {v} at {p:?}")));
                }
                Ok(x.compose(v.ln(), 1.0 / v, -1.0 / (v * v)))
            }
        }
    }

    /// Printable form using the given coordinate and parameter names.
    pub fn display<'a>(&'a self, names: &'a ExprNames) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait for CoordExpr {
            type Output = CoordExpr;
            fn $method(self, rhs: CoordExpr) -> CoordExpr {
                CoordExpr::$ctor(self, rhs)
            }
        }
        impl std::ops::$trait<f64> for CoordExpr {
            type Output = CoordExpr;
            fn $method(self, rhs: f64) -> CoordExpr {
                CoordExpr::$ctor(self, Const(rhs))
            }
        }
        impl std::ops::$trait<CoordExpr> for f64 {
            type Output = CoordExpr;
            fn $method(self, rhs: CoordExpr) -> CoordExpr {
                CoordExpr::$ctor(Const(self), rhs)
            }
        }
    };
}

binop!(Add, add, sum);
binop!(Sub, sub, difference);
binop!(Mul, mul, product);
binop!(Div, div, quotient);

impl std::ops::Neg for CoordExpr {
    type Output = CoordExpr;
    fn neg(self) -> CoordExpr {
        CoordExpr::negate(self)
    }
}

impl From<f64> for CoordExpr {
    fn from(c: f64) -> Self {
        Const(c)
    }
}

/// Names used when printing expressions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExprNames {
    pub coords: Vec<String>,
    pub params: Vec<String>,
}

impl ExprNames {
    pub fn new(coords: Vec<String>, params: Vec<String>) -> Self {
        Self { coords, params }
    }

    /// `x0, x1, …` with no parameters.
    pub fn indexed(dim: usize) -> Self {
        Self { coords: (0..dim).map(|i| format!("x{i}")).collect(), params: Vec::new() }
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a CoordExpr,
    names: &'a ExprNames,
}

impl DisplayExpr<'_> {
    fn child<'b>(&'b self, e: &'b CoordExpr) -> DisplayExpr<'b> {
        DisplayExpr { expr: e, names: self.names }
    }

    fn write_wrapped(&self, f: &mut fmt::Formatter<'_>, e: &CoordExpr, wrap: bool) -> fmt::Result {
        if wrap {
            write!(f, "({})", self.child(e))
        } else {
            write!(f, "{}", self.child(e))
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // Debug formatting of f64 is the shortest string that round-trips.
    write!(f, "{c:?}")
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.expr.precedence();
        match self.expr {
            Const(c) => write_number(f, *c),
            Var(i) => match self.names.coords.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{i}"),
            },
            Param(i) => match self.names.params.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "p{i}"),
            },
            Neg(a) => {
                f.write_str("-")?;
                // A bare literal after unary minus would reparse as a
                // negative constant, so literals are parenthesised.
                let wrap = a.precedence() < 3 || matches!(**a, Const(_));
                self.write_wrapped(f, a, wrap)
            }
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                let op = match self.expr {
                    Add(..) => " + ",
                    Sub(..) => " - ",
                    Mul(..) => "*",
                    _ => "/",
                };
                self.write_wrapped(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                self.write_wrapped(f, b, b.precedence() <= prec)
            }
            Pow(a, n) => {
                self.write_wrapped(f, a, a.precedence() <= 4)?;
                write!(f, "^{n}")
            }
            Sin(a) | Cos(a) | Exp(a) | Log(a) => {
                let name = match self.expr {
                    Sin(_) => "sin",
                    Cos(_) => "cos",
                    Exp(_) => "exp",
                    _ => "log",
                };
                write!(f, "{name}({})", self.child(a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> CoordExpr {
        CoordExpr::var(i)
    }

    #[test]
    fn folding_drops_neutral_elements() {
        assert_eq!(x(0) + 0.0, x(0));
        assert_eq!(1.0 * x(1), x(1));
        assert_eq!(0.0 * x(1).sin(), CoordExpr::zero());
        assert_eq!(-(-x(2)), x(2));
        assert_eq!(CoordExpr::constant(2.0).powi(3), CoordExpr::constant(8.0));
    }

    #[test]
    fn eval_checks_domains() {
        let inv = 1.0 / x(0);
        assert!(matches!(inv.eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(x(0).ln().eval(&[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(x(0).powi(-2).eval(&[0.0]), Err(Error::Domain(_))));
        assert_eq!(x(0).powi(2).eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_variable_is_an_error() {
        assert!(matches!(x(3).eval(&[1.0, 2.0]), Err(Error::VariableOutOfRange { .. })));
    }

    #[test]
    fn params_substitute_to_constants() {
        let e = CoordExpr::param(0) * x(0) + CoordExpr::param(1);
        assert!(e.has_params());
        assert!(matches!(e.eval(&[1.0]), Err(Error::UnboundParameter(0))));
        let s = e.substitute_params(&[2.0, 0.0]).unwrap();
        assert!(!s.has_params());
        assert_eq!(s, CoordExpr::constant(2.0) * x(0));
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let names = ExprNames::new(vec!["x".into(), "y".into()], vec![]);
        let e = (x(0) + x(1)) * x(0) - x(1).powi(2) / (x(0) - x(1));
        assert_eq!(e.display(&names).to_string(), "(x + y)*x - y^2/(x - y)");
        let n = -(x(0) * x(1));
        assert_eq!(n.display(&names).to_string(), "-(x*y)");
        let c = CoordExpr::constant(-0.5) * x(0);
        assert_eq!(c.display(&names).to_string(), "-0.5*x");
        let p = (x(0) + 1.0).powi(-2);
        assert_eq!(p.display(&names).to_string(), "(x + 1.0)^-2");
    }
}
