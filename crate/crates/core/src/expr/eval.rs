use thiserror::Error;

use super::{BinaryOp, ExprNode, Func, Jet2};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is undefined at argument {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{op} is not differentiable at argument {arg}")]
    NonDifferentiable { op: &'static str, arg: f64 },
}

// |abs| argument below which the kink is considered hit.
const ABS_KINK: f64 = 1e-300;
// Integer exponents above this use the real power path.
const MAX_POWI: f64 = 1024.0;

fn is_constant(node: &ExprNode) -> bool {
    match node {
        ExprNode::Const(_) => true,
        ExprNode::Var => false,
        ExprNode::Neg(inner) => is_constant(inner),
        ExprNode::Binary { lhs, rhs, .. } => is_constant(lhs) && is_constant(rhs),
        ExprNode::Call { args, .. } => args.iter().all(is_constant),
    }
}

/// Value, first and second derivative of `ast` at `t`.
///
/// Singular derivatives are not errors here: `sqrt(t)` at 0 reports an
/// infinite slope and callers decide what that means.
pub fn eval_jet(ast: &ExprNode, t: f64) -> Result<Jet2, EvalError> {
    match ast {
        ExprNode::Const(c) => Ok(Jet2::constant(*c)),
        ExprNode::Var => Ok(Jet2::variable(t)),
        ExprNode::Neg(inner) => Ok(-eval_jet(inner, t)?),
        ExprNode::Binary { op, lhs, rhs } => {
            let l = eval_jet(lhs, t)?;
            match op {
                BinaryOp::Add => Ok(l + eval_jet(rhs, t)?),
                BinaryOp::Sub => Ok(l - eval_jet(rhs, t)?),
                BinaryOp::Mul => Ok(l * eval_jet(rhs, t)?),
                BinaryOp::Div => {
                    let r = eval_jet(rhs, t)?;
                    if r.v == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Ok(l / r)
                }
                BinaryOp::Pow => power(l, rhs, t),
            }
        }
        ExprNode::Call { func, args } => {
            if *func == Func::Pow {
                let base = eval_jet(&args[0], t)?;
                return power(base, &args[1], t);
            }
            let u = eval_jet(&args[0], t)?;
            apply(*func, u)
        }
    }
}

fn power(base: Jet2, exponent: &ExprNode, t: f64) -> Result<Jet2, EvalError> {
    if is_constant(exponent) {
        let p = eval_jet(exponent, t)?.v;
        if p.fract() == 0.0 && p.abs() <= MAX_POWI {
            if p < 0.0 && base.v == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            return Ok(base.powi(p as i32));
        }
        if base.v < 0.0 || (base.v == 0.0 && p < 0.0) || p.is_nan() {
            return Err(EvalError::Domain { op: "^", arg: base.v });
        }
        return Ok(base.powf(p));
    }
    if base.v <= 0.0 {
        return Err(EvalError::Domain { op: "^", arg: base.v });
    }
    let w = eval_jet(exponent, t)?;
    Ok((w * base.ln()).exp())
}

fn apply(func: Func, u: Jet2) -> Result<Jet2, EvalError> {
    let x = u.v;
    Ok(match func {
        Func::Sin => u.sin(),
        Func::Cos => u.cos(),
        Func::Tan => u.tan(),
        Func::Exp => u.exp(),
        Func::Log => {
            if x <= 0.0 {
                return Err(EvalError::Domain { op: "log", arg: x });
            }
            u.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::Domain { op: "sqrt", arg: x });
            }
            u.sqrt()
        }
        Func::Cbrt => u.cbrt(),
        Func::Abs => {
            if x.abs() < ABS_KINK {
                return Err(EvalError::NonDifferentiable { op: "abs", arg: x });
            }
            u.abs()
        }
        Func::Pow => unreachable!("pow is dispatched in eval_jet"),
    })
}

/// Plain value of `ast` at `t`; unlike [`eval_jet`] this is defined at the
/// kink of `abs`.
pub fn eval_value(ast: &ExprNode, t: f64) -> Result<f64, EvalError> {
    match ast {
        ExprNode::Const(c) => Ok(*c),
        ExprNode::Var => Ok(t),
        ExprNode::Neg(inner) => Ok(-eval_value(inner, t)?),
        ExprNode::Binary { op, lhs, rhs } => {
            let l = eval_value(lhs, t)?;
            match op {
                BinaryOp::Add => Ok(l + eval_value(rhs, t)?),
                BinaryOp::Sub => Ok(l - eval_value(rhs, t)?),
                BinaryOp::Mul => Ok(l * eval_value(rhs, t)?),
                BinaryOp::Div => {
                    let r = eval_value(rhs, t)?;
                    if r == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Ok(l / r)
                }
                BinaryOp::Pow => power_value(l, rhs, t),
            }
        }
        ExprNode::Call { func, args } => {
            let x = eval_value(&args[0], t)?;
            match func {
                Func::Pow => power_value(x, &args[1], t),
                Func::Abs => Ok(x.abs()),
                _ => apply(*func, Jet2::constant(x)).map(|j| j.v),
            }
        }
    }
}

fn power_value(base: f64, exponent: &ExprNode, t: f64) -> Result<f64, EvalError> {
    let p = eval_value(exponent, t)?;
    if p.fract() == 0.0 && p.abs() <= MAX_POWI {
        if p < 0.0 && base == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(base.powi(p as i32));
    }
    if is_constant(exponent) {
        if base < 0.0 || (base == 0.0 && p < 0.0) || p.is_nan() {
            return Err(EvalError::Domain { op: "^", arg: base });
        }
        return Ok(base.powf(p));
    }
    if base <= 0.0 {
        return Err(EvalError::Domain { op: "^", arg: base });
    }
    Ok(base.powf(p))
}
