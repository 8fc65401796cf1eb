//! The optimal closed three-point rule on a single interval, its
//! first-derivative correction, and Simpson's rule for comparison.

use thiserror::Error;

use crate::constants::constants;
use crate::expr::EvalError;
use crate::function::RealFn;
use crate::kernels::{eval_k2, KernelParams};
use crate::quad::{gauss_kronrod, QuadError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at t = {at} (value {value})")]
    NonFinite { at: f64, value: f64 },
    #[error("integrand cannot be evaluated at t = {at}: {source}")]
    Eval {
        at: f64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, RuleError> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(RuleError::InvalidInterval { a, b })
        }
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Image of `s ∈ [0, 1]` under the affine map onto this interval.
    pub fn from_unit(&self, s: f64) -> f64 {
        self.a + s * self.length()
    }
}

/// Evaluate `f` at `t`, turning failures and non-finite values into
/// errors that name the point.
pub fn eval_at<F: RealFn + ?Sized>(f: &F, t: f64) -> Result<f64, RuleError> {
    let value = f.eval(t).map_err(|source| RuleError::Eval { at: t, source })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(RuleError::NonFinite { at: t, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleWeights {
    pub w_left: f64,
    pub w_mid: f64,
    pub w_right: f64,
}

impl RuleWeights {
    pub fn optimal() -> Self {
        let c = constants();
        Self {
            w_left: c.end_weight,
            w_mid: c.mid_weight,
            w_right: c.end_weight,
        }
    }

    pub fn simpson() -> Self {
        Self {
            w_left: 1.0 / 6.0,
            w_mid: 2.0 / 3.0,
            w_right: 1.0 / 6.0,
        }
    }

    pub fn apply<F: RealFn + ?Sized>(&self, f: &F, iv: &Interval) -> Result<f64, RuleError> {
        let fa = eval_at(f, iv.a)?;
        let fm = eval_at(f, iv.midpoint())?;
        let fb = eval_at(f, iv.b)?;
        Ok((self.w_left * fa + self.w_mid * fm + self.w_right * fb) * iv.length())
    }
}

/// `[√2/8 f(a) + (1 − √2/4) f((a+b)/2) + √2/8 f(b)] (b − a)`.
pub fn optimal_rule_estimate<F: RealFn + ?Sized>(f: &F, iv: &Interval) -> Result<f64, RuleError> {
    RuleWeights::optimal().apply(f, iv)
}

/// Correction `P = (b−a)²/96 · (4 − 3√2) · (f′(b) − f′(a))`.
pub fn correction_p(fprime_a: f64, fprime_b: f64, iv: &Interval) -> f64 {
    let l = iv.length();
    constants().correction_factor * l * l * (fprime_b - fprime_a)
}

pub fn simpson_estimate<F: RealFn + ?Sized>(f: &F, iv: &Interval) -> Result<f64, RuleError> {
    RuleWeights::simpson().apply(f, iv)
}

/// Error of the optimal rule written as `(b−a)³ ∫₀¹ K₂(s) f″(a + (b−a)s) ds`
/// and integrated numerically.
pub fn residual_via_kernel<F>(fpp: F, iv: &Interval) -> Result<f64, RuleError>
where
    F: Fn(f64) -> f64,
{
    let params = KernelParams::optimal();
    let integrand = |s: f64| {
        let k = eval_k2(&params, s.clamp(0.0, 1.0)).expect("clamped into [0, 1]");
        k * fpp(iv.from_unit(s))
    };
    let tol = Tolerance::new(1e-13, 1e-10);
    let left = gauss_kronrod(integrand, 0.0, 0.5, tol, 4000)?;
    let right = gauss_kronrod(integrand, 0.5, 1.0, tol, 4000)?;
    Ok((left.value + right.value) * iv.length().powi(3))
}
