//! Integrand handles shared by the rule, analysis and composite code.

use crate::expr::{eval_jet, eval_value, EvalError, ExprNode, Jet2};

/// A real function of one variable that may fail to evaluate.
pub trait RealFn: Sync {
    fn eval(&self, t: f64) -> Result<f64, EvalError>;
}

impl<F> RealFn for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(self(t))
    }
}

impl RealFn for ExprNode {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        eval_value(self, t)
    }
}

/// An integrand whose first two derivatives are available.
pub trait Integrand: RealFn {
    fn jet(&self, t: f64) -> Result<Jet2, EvalError>;

    /// Points where a derivative may jump; quadratures split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Integrand for ExprNode {
    fn jet(&self, t: f64) -> Result<Jet2, EvalError> {
        eval_jet(self, t)
    }
}

/// Integrand given directly by a jet-valued closure, e.g. a piecewise
/// polynomial whose derivatives are known in closed form.
pub struct JetFn<F> {
    f: F,
    breakpoints: Vec<f64>,
}

impl<F> JetFn<F>
where
    F: Fn(f64) -> Jet2 + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(f: F, breakpoints: Vec<f64>) -> Self {
        Self { f, breakpoints }
    }
}

impl<F> RealFn for JetFn<F>
where
    F: Fn(f64) -> Jet2 + Sync,
{
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok((self.f)(t).v)
    }
}

impl<F> Integrand for JetFn<F>
where
    F: Fn(f64) -> Jet2 + Sync,
{
    fn jet(&self, t: f64) -> Result<Jet2, EvalError> {
        Ok((self.f)(t))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// Which jet component to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn pick(self, j: &Jet2) -> f64 {
        match self {
            Order::First => j.d1,
            Order::Second => j.d2,
        }
    }

    /// The order one below; `First` maps to the function value.
    pub fn antiderivative(self, j: &Jet2) -> f64 {
        match self {
            Order::First => j.v,
            Order::Second => j.d1,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Order::First),
            2 => Some(Order::Second),
            _ => None,
        }
    }
}
