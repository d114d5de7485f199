//! Expression language for classical symbols `A(x, ξ)`.
//!
//! Variables are `x1..xm` (real space coordinates) and `k1..km` (frequency
//! components). `abs2(k)` is `Σ k_j²` and `normx2(x)` is `Σ x_j²`. Frequency
//! arguments may be complex: evaluation is literal, so `abs2(k)` stays
//! holomorphic and an expression evaluated at `ξ' + iτ` is its analytic
//! continuation.

mod eval;
mod parse;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use eval::EvalPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable {name} at byte {offset} exceeds dimension {dim}")]
    Dimension {
        name: String,
        offset: usize,
        dim: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative real argument {value} to a half-integer power or sqrt")]
    BranchCut { value: f64 },
    #[error("evaluation point has |x| = {x}, |ξ| = {xi}, expression dimension {dim}")]
    DimensionMismatch { x: usize, xi: usize, dim: usize },
    #[error("non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sqrt,
}

/// Integer or half-integer exponent, stored reduced (`den` is 1 or 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    pub num: i32,
    pub den: u8,
}

impl Exponent {
    pub fn integer(n: i32) -> Self {
        Exponent { num: n, den: 1 }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative real literal.
    Num(f64),
    /// The imaginary unit.
    Imag,
    /// `x_j`, one-based.
    X(usize),
    /// `k_j` (ξ_j), one-based.
    K(usize),
    Abs2,
    NormX2,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Literal for any finite real; negatives become `Neg(Num(|v|))`.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn complex(c: Complex64) -> Expr {
        match (c.re != 0.0, c.im != 0.0) {
            (_, false) => Expr::num(c.re),
            (false, true) => Expr::num(c.im) * Expr::Imag,
            (true, true) => Expr::num(c.re) + Expr::num(c.im) * Expr::Imag,
        }
    }

    pub fn pow(self, e: Exponent) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    /// Replaces `i` by `-i` throughout.
    pub fn conjugate(&self) -> Expr {
        match self {
            Expr::Imag => -Expr::Imag,
            Expr::Neg(a) => Expr::Neg(Box::new(a.conjugate())),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.conjugate()), Box::new(b.conjugate())),
            Expr::Pow(a, e) => Expr::Pow(Box::new(a.conjugate()), *e),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.conjugate())),
            other => other.clone(),
        }
    }

    fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Largest `x` and `k` indices referenced.
    pub fn max_indices(&self) -> (usize, usize) {
        match self {
            Expr::Num(_) | Expr::Imag | Expr::Abs2 | Expr::NormX2 => (0, 0),
            Expr::X(j) => (*j, 0),
            Expr::K(j) => (0, *j),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_indices(),
            Expr::Bin(_, a, b) => {
                let (ax, ak) = a.max_indices();
                let (bx, bk) = b.max_indices();
                (ax.max(bx), ak.max(bk))
            }
        }
    }

    /// True when the expression does not depend on any `k` variable.
    pub fn is_frequency_free(&self) -> bool {
        match self {
            Expr::K(_) | Expr::Abs2 => false,
            Expr::Num(_) | Expr::Imag | Expr::X(_) | Expr::NormX2 => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_frequency_free(),
            Expr::Bin(_, a, b) => a.is_frequency_free() && b.is_frequency_free(),
        }
    }

    /// True when the expression does not depend on any `x` variable.
    pub fn is_space_free(&self) -> bool {
        match self {
            Expr::X(_) | Expr::NormX2 => false,
            Expr::Num(_) | Expr::Imag | Expr::K(_) | Expr::Abs2 => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_space_free(),
            Expr::Bin(_, a, b) => a.is_space_free() && b.is_space_free(),
        }
    }

    /// Conservative check that the value is a non-negative real whenever all
    /// variables are real.
    pub fn nonnegative_on_reals(&self) -> bool {
        match self {
            Expr::Num(v) => *v >= 0.0,
            Expr::Abs2 | Expr::NormX2 => true,
            Expr::Imag | Expr::X(_) | Expr::K(_) | Expr::Neg(_) => false,
            Expr::Bin(BinOp::Add | BinOp::Mul | BinOp::Div, a, b) => {
                a.nonnegative_on_reals() && b.nonnegative_on_reals()
            }
            Expr::Bin(BinOp::Sub, _, _) => false,
            Expr::Pow(base, e) => {
                (e.is_integer() && e.num % 2 == 0 && base.is_real_on_reals())
                    || base.nonnegative_on_reals()
            }
            Expr::Call(Func::Exp, a) => a.is_real_on_reals(),
            Expr::Call(Func::Sqrt, a) => a.nonnegative_on_reals(),
        }
    }

    /// Conservative check that the value is real whenever all variables are real.
    pub fn is_real_on_reals(&self) -> bool {
        match self {
            Expr::Imag => false,
            Expr::Num(_) | Expr::X(_) | Expr::K(_) | Expr::Abs2 | Expr::NormX2 => true,
            Expr::Neg(a) | Expr::Call(Func::Exp, a) => a.is_real_on_reals(),
            Expr::Call(Func::Sqrt, a) => a.nonnegative_on_reals(),
            Expr::Pow(a, e) => {
                if e.is_integer() {
                    a.is_real_on_reals()
                } else {
                    a.nonnegative_on_reals()
                }
            }
            Expr::Bin(_, a, b) => a.is_real_on_reals() && b.is_real_on_reals(),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::bin($op, self, rhs)
            }
        }
    };
}

impl_binop!(Add, add, BinOp::Add);
impl_binop!(Sub, sub, BinOp::Sub);
impl_binop!(Mul, mul, BinOp::Mul);
impl_binop!(Div, div, BinOp::Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

// Fully parenthesized so that reparsing reproduces the tree exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Imag => f.write_str("i"),
            Expr::X(j) => write!(f, "x{j}"),
            Expr::K(j) => write!(f, "k{j}"),
            Expr::Abs2 => f.write_str("abs2(k)"),
            Expr::NormX2 => f.write_str("normx2(x)"),
            Expr::Neg(a) => write!(f, "(-({a}))"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, e) => write!(f, "(({a})^({}/{}))", e.num, e.den),
            Expr::Call(Func::Exp, a) => write!(f, "exp({a})"),
            Expr::Call(Func::Sqrt, a) => write!(f, "sqrt({a})"),
        }
    }
}

/// A parsed symbol expression together with its ambient dimension `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolExpr {
    ast: Expr,
    dim: usize,
}

impl SymbolExpr {
    pub fn parse(text: &str, dim: usize) -> Result<Self, ParseError> {
        parse_symbol(text, dim)
    }

    /// Wraps a programmatically built tree, checking variable bounds and
    /// half-integer power bases.
    pub fn from_ast(ast: Expr, dim: usize) -> Result<Self, ParseError> {
        // Round-tripping through text reuses every parse-time check.
        parse_symbol(&ast.to_string(), dim)
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, p: &EvalPoint) -> Result<Complex64, EvalError> {
        eval_symbol(self, p)
    }

    /// Evaluates at real `x` and complex `ξ` slices without building an [`EvalPoint`].
    pub fn eval_at(&self, x: &[f64], xi: &[Complex64]) -> Result<Complex64, EvalError> {
        eval::eval_slices(self, x, xi)
    }

    /// Evaluates at real `x` and real `ξ`.
    pub fn eval_real(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, EvalError> {
        let xi: Vec<Complex64> = xi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        eval::eval_slices(self, x, &xi)
    }

    /// The product `self * other` as a new expression.
    pub fn mul(&self, other: &SymbolExpr) -> SymbolExpr {
        SymbolExpr {
            ast: self.ast.clone() * other.ast.clone(),
            dim: self.dim.max(other.dim),
        }
    }

    /// The pointwise complex conjugate on real arguments: every `i` becomes
    /// `-i`. Principal roots and integer powers commute with conjugation
    /// away from the branch cut, which evaluation already rejects.
    pub fn conjugate(&self) -> SymbolExpr {
        SymbolExpr {
            ast: self.ast.conjugate(),
            dim: self.dim,
        }
    }

    /// `c * self` for a complex constant.
    pub fn scaled(&self, c: Complex64) -> SymbolExpr {
        SymbolExpr {
            ast: Expr::complex(c) * self.ast.clone(),
            dim: self.dim,
        }
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl Serialize for SymbolExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            text: String,
            dim: usize,
        }
        Repr {
            text: self.to_string(),
            dim: self.dim,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            text: String,
            dim: usize,
        }
        let r = Repr::deserialize(d)?;
        parse_symbol(&r.text, r.dim).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Exponent {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let bad = |message: &str| ParseError::Syntax {
            offset: 0,
            message: message.to_string(),
        };
        let n: i32 = n.parse().map_err(|_| bad("invalid exponent numerator"))?;
        let d: i32 = d.parse().map_err(|_| bad("invalid exponent denominator"))?;
        parse::reduce_exponent(n, d).ok_or_else(|| bad("only integer and half-integer powers are supported"))
    }
}

/// Parses `text` over dimension `dim`.
pub fn parse_symbol(text: &str, dim: usize) -> Result<SymbolExpr, ParseError> {
    if dim == 0 {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "dimension must be at least 1".into(),
        });
    }
    let ast = parse::Parser::new(text, dim)?.parse()?;
    Ok(SymbolExpr { ast, dim })
}

pub fn eval_symbol(expr: &SymbolExpr, p: &EvalPoint) -> Result<Complex64, EvalError> {
    eval::eval_slices(expr, &p.x, &p.xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_parses_to_literal() {
        let e = parse_symbol("1", 3).unwrap();
        assert_eq!(e.ast(), &Expr::Num(1.0));
        assert_eq!(e.eval_real(&[0.3, 0.1, 2.0], &[5.0, 1.0, 0.0]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn bessel_potential_structure() {
        let e = parse_symbol("(1 + abs2(k))^(1/2)", 2).unwrap();
        let expected = (Expr::Num(1.0) + Expr::Abs2).pow(Exponent { num: 1, den: 2 });
        assert_eq!(e.ast(), &expected);
        assert_eq!(e.eval_real(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn product_of_two_factors() {
        let e = parse_symbol("(k1 + i)*(k2 + i)", 2).unwrap();
        match e.ast() {
            Expr::Bin(BinOp::Mul, a, b) => {
                assert_eq!(**a, Expr::K(1) + Expr::Imag);
                assert_eq!(**b, Expr::K(2) + Expr::Imag);
            }
            other => panic!("unexpected tree {other:?}"),
        }
        // (1 + i)^2 = 2i
        let v = e.eval_real(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let oracle = c(1.0, 1.0) * c(1.0, 1.0);
        assert!((v - oracle).norm() < 1e-15);
        assert!((v - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn syntax_error_reports_offset() {
        match parse_symbol("1 + * 2", 1) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_symbol("", 1), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_symbol("(k1", 1), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn dimension_error() {
        match parse_symbol("k1 + x3", 2) {
            Err(ParseError::Dimension { name, offset, dim }) => {
                assert_eq!(name, "x3");
                assert_eq!(offset, 5);
                assert_eq!(dim, 2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_symbol("k0", 2), Err(ParseError::Dimension { .. })));
    }

    #[test]
    fn half_power_needs_nonnegative_base() {
        assert!(parse_symbol("(k1)^(1/2)", 1).is_err());
        assert!(parse_symbol("(k1 + i)^(1/2)", 1).is_err());
        assert!(parse_symbol("(1 + k1^2)^(-1/2)", 1).is_ok());
        assert!(parse_symbol("(k1)^(1/3)", 1).is_err());
        assert!(parse_symbol("(k1)^(4/2)", 1).is_ok());
    }

    #[test]
    fn negative_sqrt_is_reported() {
        let e = parse_symbol("sqrt(k1)", 1).unwrap();
        assert_eq!(
            e.eval_real(&[0.0], &[-4.0]),
            Err(EvalError::BranchCut { value: -4.0 })
        );
        assert_eq!(e.eval_real(&[0.0], &[4.0]).unwrap(), c(2.0, 0.0));
        // Off the cut the principal branch applies.
        let v = e.eval_at(&[0.0], &[c(-4.0, 1e-300)]).unwrap();
        assert!(v.im > 0.0);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = parse_symbol("1/k1", 1).unwrap();
        assert_eq!(e.eval_real(&[0.0], &[0.0]), Err(EvalError::DivisionByZero));
        let e = parse_symbol("k1^(-2)", 1).unwrap();
        assert_eq!(e.eval_real(&[0.0], &[0.0]), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn dimension_mismatch_at_eval() {
        let e = parse_symbol("k1", 2).unwrap();
        assert!(matches!(
            e.eval_real(&[0.0], &[1.0, 2.0]),
            Err(EvalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unicode_minus_and_whitespace() {
        let a = parse_symbol("(k1 + i)/(k1 − i)", 1).unwrap();
        let b = parse_symbol("(k1+i)/(k1-i)", 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complex_frequency_argument() {
        // abs2 continues holomorphically: (i)^2 = -1.
        let e = parse_symbol("1 + abs2(k)", 1).unwrap();
        let v = e.eval_at(&[0.0], &[c(0.0, 1.0)]).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn space_variables() {
        let e = parse_symbol("normx2(x) + abs2(k)", 2).unwrap();
        let v = e.eval_real(&[1.0, 2.0], &[3.0, 0.0]).unwrap();
        assert_eq!(v, c(14.0, 0.0));
        assert!(!e.ast().is_frequency_free());
        assert!(!e.ast().is_space_free());
    }

    #[test]
    fn printed_form_reparses() {
        for text in [
            "(1 + abs2(k))^(1/2)",
            "-x1^2 + exp(-normx2(x))*sqrt(1+abs2(k))",
            "(k1 + 0.25*i)/(k1 - 1e-7*i)",
            "2^(-3)",
        ] {
            let e = parse_symbol(text, 2).unwrap();
            let again = parse_symbol(&e.to_string(), 2).unwrap();
            assert_eq!(e, again, "{text}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = parse_symbol("(k1 + i)*(k2 + i)", 2).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let back: SymbolExpr = serde_json::from_str(&json).unwrap();
        assert_eq!(e, back);
    }
}
