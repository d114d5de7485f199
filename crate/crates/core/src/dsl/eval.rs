use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BinOp, EvalError, Expr, Func, SymbolExpr};

/// Point `(x, ξ)` with real `x` and complex `ξ`; `Im ξ` carries the `τ` of a
/// tube-domain continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub x: Vec<f64>,
    pub xi: Vec<Complex64>,
}

impl EvalPoint {
    pub fn new(x: Vec<f64>, xi: Vec<Complex64>) -> Self {
        EvalPoint { x, xi }
    }

    pub fn real(x: &[f64], xi: &[f64]) -> Self {
        EvalPoint {
            x: x.to_vec(),
            xi: xi.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(super) fn eval_slices(
    e: &SymbolExpr,
    x: &[f64],
    xi: &[Complex64],
) -> Result<Complex64, EvalError> {
    if x.len() != e.dim || xi.len() != e.dim {
        return Err(EvalError::DimensionMismatch {
            x: x.len(),
            xi: xi.len(),
            dim: e.dim,
        });
    }
    let v = walk(&e.ast, x, xi)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn walk(e: &Expr, x: &[f64], xi: &[Complex64]) -> Result<Complex64, EvalError> {
    Ok(match e {
        Expr::Num(v) => Complex64::new(*v, 0.0),
        Expr::Imag => Complex64::i(),
        Expr::X(j) => Complex64::new(x[j - 1], 0.0),
        Expr::K(j) => xi[j - 1],
        Expr::Abs2 => xi.iter().map(|k| k * k).sum(),
        Expr::NormX2 => Complex64::new(x.iter().map(|v| v * v).sum(), 0.0),
        Expr::Neg(a) => -walk(a, x, xi)?,
        Expr::Bin(op, a, b) => {
            let a = walk(a, x, xi)?;
            let b = walk(b, x, xi)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == ZERO {
                        return Err(EvalError::DivisionByZero);
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exp) => {
            let b = walk(base, x, xi)?;
            let b = if exp.is_integer() { b } else { principal_sqrt(b)? };
            if exp.num < 0 && b == ZERO {
                return Err(EvalError::DivisionByZero);
            }
            b.powi(exp.num)
        }
        Expr::Call(Func::Exp, a) => walk(a, x, xi)?.exp(),
        Expr::Call(Func::Sqrt, a) => principal_sqrt(walk(a, x, xi)?)?,
    })
}

fn principal_sqrt(z: Complex64) -> Result<Complex64, EvalError> {
    if z.im == 0.0 && z.re < 0.0 {
        return Err(EvalError::BranchCut { value: z.re });
    }
    Ok(z.sqrt())
}
