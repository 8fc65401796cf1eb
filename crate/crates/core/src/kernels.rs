//! Peano kernels of the closed 3-point rule family on `[0, 1]`.
//!
//! All kernels have one branch on `[0, ½]` and another on `(½, 1]`; the
//! point `t = ½` is evaluated with the left branch. Norms and Chebyshev
//! functionals are obtained by exact integration of the polynomial pieces.

use thiserror::Error;

use crate::constants::constants;
use crate::piecewise::{Piece, PiecewisePoly, Poly};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum KernelError {
    #[error("kernel argument {0} lies outside [0, 1]")]
    OutsideUnitInterval(f64),
    #[error("kernel parameters must be finite")]
    NonFiniteParams,
}

/// Knots of the two parabolic branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self, KernelError> {
        if [alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            Ok(Self {
                alpha,
                beta,
                gamma,
                delta,
            })
        } else {
            Err(KernelError::NonFiniteParams)
        }
    }

    /// The symmetric one-parameter family `(0, β, 1 − β, 1)`.
    pub fn symmetric(beta: f64) -> Result<Self, KernelError> {
        Self::new(0.0, beta, 1.0 - beta, 1.0)
    }

    /// Knots of the optimal rule, `β = √2/4`.
    pub fn optimal() -> Self {
        let b = constants().beta_star;
        Self {
            alpha: 0.0,
            beta: b,
            gamma: 1.0 - b,
            delta: 1.0,
        }
    }

    /// Knots reproducing Simpson's rule, `β = 1/3`.
    pub fn simpson() -> Self {
        Self {
            alpha: 0.0,
            beta: 1.0 / 3.0,
            gamma: 2.0 / 3.0,
            delta: 1.0,
        }
    }
}

/// Which kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelId {
    K1(KernelParams),
    K2(KernelParams),
    P1,
    P2,
    P2Tilde,
}

fn check_unit(t: f64) -> Result<(), KernelError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(KernelError::OutsideUnitInterval(t))
    }
}

/// Second-order kernel `K₂(α, β, γ, δ, t)`.
pub fn eval_k2(params: &KernelParams, t: f64) -> Result<f64, KernelError> {
    check_unit(t)?;
    Ok(if t <= 0.5 {
        0.5 * (t - params.alpha) * (t - params.beta)
    } else {
        0.5 * (t - params.gamma) * (t - params.delta)
    })
}

/// First-order kernel `K₁(α, β, γ, δ, t)`.
pub fn eval_k1(params: &KernelParams, t: f64) -> Result<f64, KernelError> {
    check_unit(t)?;
    Ok(if t <= 0.5 {
        t - 0.5 * (params.alpha + params.beta)
    } else {
        t - 0.5 * (params.gamma + params.delta)
    })
}

/// `p₁`, the first-order kernel of the optimal rule.
pub fn eval_p1(t: f64) -> Result<f64, KernelError> {
    eval_k1(&KernelParams::optimal(), t)
}

/// `p₂`, the second-order kernel of the optimal rule.
pub fn eval_p2(t: f64) -> Result<f64, KernelError> {
    eval_k2(&KernelParams::optimal(), t)
}

/// `p̃₂ = p₂ − ∫p₂`, the zero-mean kernel of the corrected rule.
pub fn eval_p2_tilde(t: f64) -> Result<f64, KernelError> {
    let c = constants();
    Ok(eval_p2(t)? + c.sqrt2 / 32.0 - 1.0 / 24.0)
}

impl KernelId {
    pub fn eval(&self, t: f64) -> Result<f64, KernelError> {
        match self {
            KernelId::K1(p) => eval_k1(p, t),
            KernelId::K2(p) => eval_k2(p, t),
            KernelId::P1 => eval_p1(t),
            KernelId::P2 => eval_p2(t),
            KernelId::P2Tilde => eval_p2_tilde(t),
        }
    }

    /// Polynomial pieces on `[0, ½]` and `[½, 1]`.
    pub fn pieces(&self) -> PiecewisePoly {
        let (left, right) = match self {
            KernelId::K1(p) => (
                Poly::new(vec![-0.5 * (p.alpha + p.beta), 1.0]),
                Poly::new(vec![-0.5 * (p.gamma + p.delta), 1.0]),
            ),
            KernelId::K2(p) => (
                Poly::from_roots2(0.5, p.alpha, p.beta),
                Poly::from_roots2(0.5, p.gamma, p.delta),
            ),
            KernelId::P1 => {
                let c = constants().end_weight;
                (Poly::new(vec![-c, 1.0]), Poly::new(vec![c - 1.0, 1.0]))
            }
            KernelId::P2 => {
                let b = constants().beta_star;
                (
                    Poly::from_roots2(0.5, 0.0, b),
                    Poly::from_roots2(0.5, 1.0, 1.0 - b),
                )
            }
            KernelId::P2Tilde => {
                let c = constants();
                let shift = c.sqrt2 / 32.0 - 1.0 / 24.0;
                (
                    Poly::from_roots2(0.5, 0.0, c.beta_star).add_constant(shift),
                    Poly::from_roots2(0.5, 1.0, 1.0 - c.beta_star).add_constant(shift),
                )
            }
        };
        PiecewisePoly::new(vec![
            Piece {
                lo: 0.0,
                hi: 0.5,
                poly: left,
            },
            Piece {
                lo: 0.5,
                hi: 1.0,
                poly: right,
            },
        ])
    }
}

/// `∫₀¹ |k(t)| dt`.
pub fn kernel_l1_norm(id: &KernelId) -> f64 {
    id.pieces().abs_integral()
}

/// `sup_{t∈[0,1]} |k(t)|`.
pub fn kernel_sup_norm(id: &KernelId) -> f64 {
    id.pieces().sup_abs()
}

/// Chebyshev functional `T(k, k) = ∫k² − (∫k)²` on `[0, 1]`.
pub fn kernel_chebyshev_t(id: &KernelId) -> f64 {
    let pieces = id.pieces();
    let mean = pieces.integral();
    pieces.integral_of_square() - mean * mean
}

/// `∫₀¹ k(t) dt`.
pub fn kernel_mean(id: &KernelId) -> f64 {
    id.pieces().integral()
}
