//! Minimisation of the kernel L1 norm over the symmetric knot family.
//!
//! `g(β) = ∫₀¹ |K₂(0, β, 1−β, 1, t)| dt` is piecewise polynomial in `β`:
//! linear for `β ≤ 0` and `β ≥ ½`, cubic in between. The closed form is
//! minimised analytically and then checked against a brute-force scan of
//! an independently integrated `g`.

use thiserror::Error;

use crate::constants::constants;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("closed form {closed} and numeric {numeric} disagree at beta = {beta}")]
    Inconsistent {
        beta: f64,
        closed: f64,
        numeric: f64,
    },
}

/// The three regions of the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `β ≤ 0`: `g = 1/24 − β/8`.
    NonPositive,
    /// `0 ≤ β ≤ ½`: `g = β³/3 − β/8 + 1/24`.
    Interior,
    /// `β ≥ ½`: `g = β/8 − 1/24`.
    UpperHalf,
}

/// How the minimiser was located.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseTrace {
    pub selected: Case,
    /// Infimum of `g` on `β ≤ 0` (attained at `β = 0`).
    pub floor_nonpositive: f64,
    /// Infimum of `g` on `β ≥ ½` (attained at `β = ½`).
    pub floor_upper: f64,
    /// Roots of `g′(β) = β² − 1/8`.
    pub stationary_points: [f64; 2],
    /// `g″(β*) = 2β*`.
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerResult {
    pub beta_star: f64,
    pub g_star: f64,
    pub case_trace: CaseTrace,
    pub oracle_beta: f64,
    pub oracle_gap: f64,
    /// Width of the final golden-section bracket.
    pub oracle_resolution: f64,
}

pub const ORACLE_GRID_POINTS: usize = 100_000;
pub const ORACLE_RANGE: (f64, f64) = (-1.0, 1.5);
pub const ORACLE_WIDTH: f64 = 1e-12;

pub fn case_of(beta: f64) -> Case {
    if beta <= 0.0 {
        Case::NonPositive
    } else if beta <= 0.5 {
        Case::Interior
    } else {
        Case::UpperHalf
    }
}

/// Closed-form `g(β)` from the case analysis.
pub fn g_closed_form(beta: f64) -> f64 {
    match case_of(beta) {
        Case::NonPositive => 1.0 / 24.0 - beta / 8.0,
        Case::Interior => beta * beta * beta / 3.0 - beta / 8.0 + 1.0 / 24.0,
        Case::UpperHalf => beta / 8.0 - 1.0 / 24.0,
    }
}

/// `g(β)` by direct integration of the kernel's absolute value.
///
/// Each half of the kernel is split at its root and the polynomial pieces
/// are integrated exactly in double-double arithmetic.
pub fn g_numeric(beta: f64) -> f64 {
    g_numeric_scaled(beta).to_f64() / 12.0
}

/// `12 · g(β)` in double-double precision.
fn g_numeric_scaled(beta: f64) -> Dd {
    let b = Dd::from(beta);
    let half = Dd::from(0.5);
    let one = Dd::from(1.0);
    let zero = Dd::from(0.0);

    // Left half: ½∫ t(t − β); 6·antiderivative = 2t³ − 3βt².
    let left_anti = |t: Dd| {
        let t2 = t * t;
        Dd::from(2.0) * t2 * t - Dd::from(3.0) * b * t2
    };
    let root = b.clamp(zero, half);
    let left = (left_anti(root) - left_anti(zero)).abs() + (left_anti(half) - left_anti(root)).abs();

    // Right half: ½∫ (t − c)(1 − t) with c = 1 − β;
    // 6·antiderivative = −2t³ + 3(1 + c)t² − 6ct.
    let c = one - b;
    let right_anti = |t: Dd| {
        let t2 = t * t;
        Dd::from(-2.0) * t2 * t + Dd::from(3.0) * (one + c) * t2 - Dd::from(6.0) * c * t
    };
    let root = c.clamp(half, one);
    let right =
        (right_anti(root) - right_anti(half)).abs() + (right_anti(one) - right_anti(root)).abs();

    // (1/2)·(1/6)·(left + right)
    left + right
}

/// Brute-force minimiser: grid scan followed by golden-section refinement.
///
/// Returns `(beta, final bracket width)`. Ties on the grid go to the
/// smaller `β`.
pub fn oracle_minimize() -> (f64, f64) {
    let (lo, hi) = ORACLE_RANGE;
    let n = ORACLE_GRID_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let node = |i: usize| lo + i as f64 * step;

    let mut best_i = 0;
    let mut best = g_numeric_scaled(node(0));
    for i in 1..n {
        let v = g_numeric_scaled(node(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }

    let a = node(best_i.saturating_sub(1));
    let b = node((best_i + 1).min(n - 1));
    golden_section(a, b, ORACLE_WIDTH)
}

fn golden_section(mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = g_numeric_scaled(x1);
    let mut f2 = g_numeric_scaled(x2);
    while b - a > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = g_numeric_scaled(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = g_numeric_scaled(x2);
        }
    }
    (0.5 * (a + b), b - a)
}

/// Locate the global minimiser of `g` and cross-check it.
pub fn minimize_g() -> Result<MinimizerResult, OptimizerError> {
    // g′(β) = β² − 1/8 vanishes at ±√(1/8); only the positive root lies in
    // the interior case, and g″ = 2β > 0 there.
    let beta_star = constants().beta_star;
    let g_star = g_closed_form(beta_star);

    let numeric = g_numeric(beta_star);
    if (g_star - numeric).abs() > 1e-10 {
        return Err(OptimizerError::Inconsistent {
            beta: beta_star,
            closed: g_star,
            numeric,
        });
    }

    let floor_nonpositive = g_closed_form(0.0);
    let floor_upper = g_closed_form(0.5);
    let selected = if g_star <= floor_nonpositive && g_star <= floor_upper {
        Case::Interior
    } else if floor_nonpositive <= floor_upper {
        Case::NonPositive
    } else {
        Case::UpperHalf
    };

    let (oracle_beta, oracle_resolution) = oracle_minimize();
    Ok(MinimizerResult {
        beta_star,
        g_star,
        case_trace: CaseTrace {
            selected,
            floor_nonpositive,
            floor_upper,
            stationary_points: [-beta_star, beta_star],
            curvature: 2.0 * beta_star,
        },
        oracle_beta,
        oracle_gap: (beta_star - oracle_beta).abs(),
        oracle_resolution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonComparison {
    pub g_optimal: f64,
    pub g_simpson: f64,
}

impl SimpsonComparison {
    pub fn ratio(&self) -> f64 {
        self.g_optimal / self.g_simpson
    }
}

/// Kernel L1 norms of the optimal rule and of Simpson's rule.
pub fn compare_simpson() -> SimpsonComparison {
    let cmp = SimpsonComparison {
        g_optimal: g_closed_form(constants().beta_star),
        g_simpson: g_closed_form(1.0 / 3.0),
    };
    assert!(cmp.g_optimal < cmp.g_simpson);
    cmp
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn clamp(self, lo: Dd, hi: Dd) -> Dd {
        if self < lo {
            lo
        } else if self > hi {
            hi
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl PartialEq for Dd {
    fn eq(&self, o: &Dd) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Dd) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            ord => ord,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel_l1_norm, KernelId, KernelParams};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_examples() {
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(g_closed_form(0.0), 1.0 / 24.0, epsilon = 1e-17);
        assert_abs_diff_eq!(g_closed_form(s2 / 4.0), (2.0 - s2) / 48.0, epsilon = 1e-17);
        assert_abs_diff_eq!(g_closed_form(1.0 / 3.0), 1.0 / 81.0, epsilon = 1e-17);
    }

    #[test]
    fn numeric_examples() {
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(g_numeric(s2 / 4.0), (2.0 - s2) / 48.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g_numeric(-1.0), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g_numeric(1.0), 1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_equals_numeric_on_random_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let beta: f64 = rng.gen_range(-2.0..2.0);
            assert_abs_diff_eq!(g_closed_form(beta), g_numeric(beta), epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_norm_equals_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let beta: f64 = rng.gen_range(-1.0..1.5);
            let id = KernelId::K2(KernelParams::symmetric(beta).unwrap());
            assert_abs_diff_eq!(kernel_l1_norm(&id), g_closed_form(beta), epsilon = 1e-12);
        }
    }

    #[test]
    fn continuity_at_case_boundaries() {
        let nonpositive = |b: f64| 1.0 / 24.0 - b / 8.0;
        let interior = |b: f64| b * b * b / 3.0 - b / 8.0 + 1.0 / 24.0;
        let upper = |b: f64| b / 8.0 - 1.0 / 24.0;
        assert_abs_diff_eq!(nonpositive(0.0), interior(0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(interior(0.5), upper(0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(g_closed_form(-1e-300), g_closed_form(1e-300), epsilon = 1e-15);
        assert_abs_diff_eq!(
            g_closed_form(0.5),
            g_closed_form(0.5 + f64::EPSILON),
            epsilon = 1e-15
        );
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-6;
        for k in 1..=20 {
            let beta = 0.5 * k as f64 / 21.0;
            let fd = (g_closed_form(beta + h) - g_closed_form(beta - h)) / (2.0 * h);
            assert_abs_diff_eq!(fd, beta * beta - 0.125, epsilon = 1e-6);
        }
    }

    #[test]
    fn minimizer_is_global_on_oracle_grid() {
        let res = minimize_g().unwrap();
        let (lo, hi) = ORACLE_RANGE;
        let step = (hi - lo) / (ORACLE_GRID_POINTS - 1) as f64;
        for i in 0..ORACLE_GRID_POINTS {
            let beta = lo + i as f64 * step;
            assert!(g_closed_form(res.beta_star) <= g_closed_form(beta));
        }
        assert_eq!(res.case_trace.selected, Case::Interior);
        assert_abs_diff_eq!(res.case_trace.floor_nonpositive, 1.0 / 24.0, epsilon = 1e-17);
        assert_abs_diff_eq!(res.case_trace.floor_upper, 1.0 / 48.0, epsilon = 1e-17);
        assert!(res.oracle_gap <= res.oracle_resolution);
        assert!(res.oracle_resolution <= ORACLE_WIDTH);
        assert_eq!(res.g_star, g_closed_form(res.beta_star));
    }

    #[test]
    fn simpson_comparison() {
        let cmp = compare_simpson();
        assert_abs_diff_eq!(cmp.g_optimal, 0.012_203_88, epsilon = 1e-8);
        assert_abs_diff_eq!(cmp.g_simpson, 0.012_345_7, epsilon = 1e-7);
        assert_abs_diff_eq!(cmp.ratio(), 0.988_515, epsilon = 1e-6);
        assert!(cmp.g_simpson - cmp.g_optimal > 0.0);
    }

    #[test]
    fn double_double_keeps_low_bits() {
        let x = Dd::from(1.0) + Dd::from(1e-20);
        assert_eq!(x.hi, 1.0);
        assert_eq!(x.lo, 1e-20);
        let third = 1.0 / 3.0;
        let y = Dd::from(third) * Dd::from(3.0) - Dd::from(1.0);
        assert_eq!(y.to_f64(), third.mul_add(3.0, -1.0));
    }
}
