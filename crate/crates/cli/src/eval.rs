//! Forward evaluation of expressions into superfields at a base point, with
//! jet-overloaded arithmetic and Grassmann products for the odd symbols.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use supergc_core::grassmann::Parity;
use supergc_core::jet::BasePoint;
use supergc_core::superfield::{Superfield, SuperfieldError};
use supergc_core::GrassmannError;

use crate::expr::{BinOp, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("division by an element of odd or mixed parity")]
    OddDivision,
    #[error("power exponent must be a real constant")]
    NonRealExponent,
    #[error("odd generator xi{0} exceeds the configured generator count")]
    XiOutOfRange(u8),
    #[error("field {field} must be {expected:?}, got {actual:?}")]
    FieldParity {
        field: String,
        expected: Parity,
        actual: Parity,
    },
    #[error(transparent)]
    Superfield(#[from] SuperfieldError),
}

#[derive(Debug, Clone)]
pub struct EvalContext {
    pub k: usize,
    pub order: usize,
    pub at: BasePoint,
    pub params: BTreeMap<String, Complex64>,
}

impl EvalContext {
    fn constant(&self, v: Complex64) -> Superfield {
        Superfield::constant(self.k, self.at, self.order, v)
    }
}

/// Evaluate an expression to a constant complex number; used for exponents.
fn eval_const(expr: &Expr, ctx: &EvalContext) -> Result<Complex64, EvalError> {
    match expr {
        Expr::Number(v) => Ok(Complex64::new(*v, 0.0)),
        Expr::ImaginaryUnit => Ok(Complex64::new(0.0, 1.0)),
        Expr::Param(name) => ctx
            .params
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnknownIdentifier(name.clone())),
        Expr::Neg(inner) => Ok(-eval_const(inner, ctx)?),
        Expr::Bin(op, a, b) => {
            let a = eval_const(a, ctx)?;
            let b = eval_const(b, ctx)?;
            Ok(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powc(b),
            })
        }
        Expr::Exp(a) => Ok(eval_const(a, ctx)?.exp()),
        _ => Err(EvalError::NonRealExponent),
    }
}

pub fn eval_expr(expr: &Expr, ctx: &EvalContext) -> Result<Superfield, EvalError> {
    match expr {
        Expr::Number(v) => Ok(ctx.constant(Complex64::new(*v, 0.0))),
        Expr::ImaginaryUnit => Ok(ctx.constant(Complex64::new(0.0, 1.0))),
        Expr::Param(name) => {
            let v = ctx
                .params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnknownIdentifier(name.clone()))?;
            Ok(ctx.constant(v))
        }
        Expr::CoordPlus => Ok(Superfield::coordinate(ctx.k, ctx.at, ctx.order, true)),
        Expr::CoordMinus => Ok(Superfield::coordinate(ctx.k, ctx.at, ctx.order, false)),
        Expr::ThetaPlus => Ok(Superfield::theta(ctx.k, ctx.at, ctx.order, true)),
        Expr::ThetaMinus => Ok(Superfield::theta(ctx.k, ctx.at, ctx.order, false)),
        Expr::Xi(n) => Superfield::xi(ctx.k, ctx.at, ctx.order, *n).map_err(|e| match e {
            SuperfieldError::Grassmann(GrassmannError::GeneratorOutOfRange(_, _)) => {
                EvalError::XiOutOfRange(*n)
            }
            other => EvalError::Superfield(other),
        }),
        Expr::Neg(inner) => Ok(eval_expr(inner, ctx)?.neg()),
        Expr::Bin(op, a, b) => {
            match op {
                BinOp::Pow => {
                    let r = real_exponent(b, ctx)?;
                    let base = eval_expr(a, ctx)?;
                    apply_pow(&base, r)
                }
                _ => {
                    let lhs = eval_expr(a, ctx)?;
                    let rhs = eval_expr(b, ctx)?;
                    match op {
                        BinOp::Add => Ok(lhs.add(&rhs)?),
                        BinOp::Sub => Ok(lhs.sub(&rhs)?),
                        BinOp::Mul => Ok(lhs.mul(&rhs)?),
                        BinOp::Div => {
                            if rhs.value().parity() != Parity::Even {
                                return Err(EvalError::OddDivision);
                            }
                            Ok(lhs.mul(&rhs.invert()?)?)
                        }
                        BinOp::Pow => unreachable!(),
                    }
                }
            }
        }
        Expr::Exp(a) => Ok(eval_expr(a, ctx)?.exp()?),
        Expr::PowCall(a, b) => {
            let r = real_exponent(b, ctx)?;
            let base = eval_expr(a, ctx)?;
            apply_pow(&base, r)
        }
    }
}

fn real_exponent(expr: &Expr, ctx: &EvalContext) -> Result<f64, EvalError> {
    let v = eval_const(expr, ctx)?;
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(EvalError::NonRealExponent);
    }
    Ok(v.re)
}

fn apply_pow(base: &Superfield, r: f64) -> Result<Superfield, EvalError> {
    // small non-negative integer exponents work for every element
    if r.fract() == 0.0 && (0.0..=16.0).contains(&r) {
        let n = r as u32;
        let k = base.k();
        let mut out = Superfield::constant(k, base.base(), base.order(), Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out.mul(base)?;
        }
        return Ok(out);
    }
    Ok(base.powf(r)?)
}

/// Evaluate and check the declared parity of a named field.
pub fn eval_field(
    name: &str,
    expr: &Expr,
    expected: Parity,
    ctx: &EvalContext,
) -> Result<Superfield, EvalError> {
    let value = eval_expr(expr, ctx)?;
    let actual = value.value().parity();
    if value.max_abs() > 0.0 && actual != expected {
        return Err(EvalError::FieldParity {
            field: name.to_string(),
            expected,
            actual,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ctx() -> EvalContext {
        EvalContext {
            k: 6,
            order: 2,
            at: BasePoint::real(0.0, 0.0),
            params: BTreeMap::new(),
        }
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn evaluates_exponential_jet() {
        let e = parse("exp(xp)").unwrap();
        let v = eval_expr(&e, &ctx()).unwrap();
        // 1 + x+ + x+^2/2 at order 2
        let body = v.value().body();
        assert!((body.coeff(0, 0) - Complex64::new(1.0, 0.0)).norm() < TOL);
        assert!((body.coeff(1, 0) - Complex64::new(1.0, 0.0)).norm() < TOL);
        assert!((body.coeff(2, 0) - Complex64::new(0.5, 0.0)).norm() < TOL);
    }

    #[test]
    fn evaluates_odd_products() {
        let c = ctx();
        let v = eval_expr(&parse("xi1*xi2").unwrap(), &c).unwrap();
        let x1 = Superfield::xi(6, c.at, 2, 1).unwrap();
        let x2 = Superfield::xi(6, c.at, 2, 2).unwrap();
        assert!(v.approx_eq(&x1.mul(&x2).unwrap(), TOL));

        let v = eval_expr(&parse("thp*thm*exp(xm)").unwrap(), &c).unwrap();
        let tp = Superfield::theta(6, c.at, 2, true);
        let tm = Superfield::theta(6, c.at, 2, false);
        let em = eval_expr(&parse("exp(xm)").unwrap(), &c).unwrap();
        assert!(v.approx_eq(&tp.mul(&tm).unwrap().mul(&em).unwrap(), TOL));
    }

    #[test]
    fn odd_division_rejected() {
        let c = ctx();
        let e = parse("1/thp").unwrap();
        assert!(matches!(eval_expr(&e, &c), Err(EvalError::OddDivision)));
    }

    #[test]
    fn unknown_identifier_at_bind_time() {
        let c = ctx();
        let e = parse("nope * xp").unwrap();
        assert!(matches!(
            eval_expr(&e, &c),
            Err(EvalError::UnknownIdentifier(_))
        ));
    }

    #[test]
    fn parameters_bind() {
        let mut c = ctx();
        c.params
            .insert("a".to_string(), Complex64::new(2.0, 0.0));
        let v = eval_expr(&parse("a*xp").unwrap(), &c).unwrap();
        assert!((v.value().body().coeff(1, 0) - Complex64::new(2.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn parity_check_on_fields() {
        let c = ctx();
        let even = parse("1 + xi1*xi2").unwrap();
        assert!(eval_field("phi", &even, Parity::Even, &c).is_ok());
        let odd = parse("xi1").unwrap();
        assert!(matches!(
            eval_field("phi", &odd, Parity::Even, &c),
            Err(EvalError::FieldParity { .. })
        ));
    }

    #[test]
    fn integer_power_of_nilpotent_base() {
        let c = ctx();
        // (thp*thm)^2 = 0 without requiring an invertible body
        let v = eval_expr(&parse("(thp*thm)^2").unwrap(), &c).unwrap();
        assert!(v.is_zero(TOL));
    }
}
