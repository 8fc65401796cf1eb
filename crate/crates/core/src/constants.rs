//! Closed-form constants of the optimal rule and its kernels.
//!
//! Every value is built from `√2`, `√3` and `√6` at binary64 precision the
//! first time the table is touched. Other modules read from here instead of
//! repeating the expressions.

use std::sync::LazyLock;

/// Table of pinned constants.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub sqrt2: f64,
    pub sqrt3: f64,
    pub sqrt6: f64,
    /// Endpoint weight `√2/8`.
    pub end_weight: f64,
    /// Midpoint weight `1 − √2/4`.
    pub mid_weight: f64,
    /// Optimal interior knot `√2/4`.
    pub beta_star: f64,
    /// `(2−√2)/48`, the minimal L1 norm of the second-order kernel.
    pub optimal_l1: f64,
    /// `1/81`, the same norm at Simpson's knot `β = 1/3`.
    pub simpson_l1: f64,
    /// `‖p₁‖₁ = 5/16 − √2/8`.
    pub p1_l1: f64,
    /// `‖p₁‖∞ = 1/2 − √2/8`.
    pub p1_sup: f64,
    /// `T(p₁,p₁) = 11/96 − √2/16`.
    pub p1_chebyshev: f64,
    /// `∫₀¹ p₂ = 1/24 − √2/32`.
    pub p2_mean: f64,
    /// `‖p₂‖∞ = (2−√2)/16`.
    pub p2_sup: f64,
    /// `T(p₂,p₂) = 47/23040 − √2/768`.
    pub p2_chebyshev: f64,
    /// `‖p̃₂‖₁ = 5√6/96 − 29√3/432`.
    pub p2_tilde_l1: f64,
    /// `‖p̃₂‖∞ = 1/12 − √2/32`.
    pub p2_tilde_sup: f64,
    /// `(4 − 3√2)/96`, the factor of the first-derivative correction.
    pub correction_factor: f64,
    /// `(5 − 2√2)/32`, constant of the two-sided first-derivative range bound.
    pub first_range: f64,
}

impl Constants {
    fn compute() -> Self {
        let sqrt2 = 2f64.sqrt();
        let sqrt3 = 3f64.sqrt();
        let sqrt6 = 6f64.sqrt();
        Self {
            sqrt2,
            sqrt3,
            sqrt6,
            end_weight: sqrt2 / 8.0,
            mid_weight: 1.0 - sqrt2 / 4.0,
            beta_star: sqrt2 / 4.0,
            optimal_l1: (2.0 - sqrt2) / 48.0,
            simpson_l1: 1.0 / 81.0,
            p1_l1: 5.0 / 16.0 - sqrt2 / 8.0,
            p1_sup: 0.5 - sqrt2 / 8.0,
            p1_chebyshev: 11.0 / 96.0 - sqrt2 / 16.0,
            p2_mean: 1.0 / 24.0 - sqrt2 / 32.0,
            p2_sup: (2.0 - sqrt2) / 16.0,
            p2_chebyshev: 47.0 / 23040.0 - sqrt2 / 768.0,
            p2_tilde_l1: 5.0 * sqrt6 / 96.0 - 29.0 * sqrt3 / 432.0,
            p2_tilde_sup: 1.0 / 12.0 - sqrt2 / 32.0,
            correction_factor: (4.0 - 3.0 * sqrt2) / 96.0,
            first_range: (5.0 - 2.0 * sqrt2) / 32.0,
        }
    }
}

static TABLE: LazyLock<Constants> = LazyLock::new(Constants::compute);

/// The shared constants table.
pub fn constants() -> &'static Constants {
    &TABLE
}
