//! Numerical integration primitives.
//!
//! * [`NeumaierSum`]: compensated accumulation for long panel sums.
//! * [`gauss_kronrod`]: globally adaptive 7/15-point Gauss–Kronrod, used
//!   for reference integrals of smooth integrands.
//! * [`tanh_sinh`]: double-exponential quadrature with step halving. It
//!   never samples the endpoints and converges for algebraic endpoint
//!   singularities, which is what derivative L2 norms run into.

use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },
    #[error("tolerance not met after {intervals} subintervals (estimate {estimate}, error {error})")]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerance of an adaptive integration: met when
/// `error ≤ max(abs, rel · |estimate|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs.max(self.rel * estimate.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: t })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = (WGK[7] * fc).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    // Rounding floor of the 15-point sum.
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    Ok(Segment {
        a,
        b,
        value,
        error: raw.max(floor),
    })
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The subinterval with the largest error estimate is bisected until the
/// summed error meets `tol` or `max_intervals` is reached.
pub fn gauss_kronrod<F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<QuadEstimate, QuadError>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            error: 0.0,
            intervals: 1,
        });
    }
    let first = kronrod15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let value = compensated_sum(heap.iter().map(|s| s.value));
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if error <= tol.target(value) {
            return Ok(QuadEstimate {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= max_intervals {
            return Err(QuadError::ToleranceNotMet {
                estimate: value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Subinterval cannot be split further in binary64.
            heap.push(worst);
            let value = compensated_sum(heap.iter().map(|s| s.value));
            return Err(QuadError::ToleranceNotMet {
                estimate: value,
                error,
                intervals: heap.len(),
            });
        }
        heap.push(kronrod15(&mut f, worst.a, mid)?);
        heap.push(kronrod15(&mut f, mid, worst.b)?);
    }
}

/// Outcome of a tanh-sinh integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhSinh {
    pub value: f64,
    /// Successive levels agreed to the requested tolerance and the sum
    /// tails decayed.
    pub converged: bool,
    /// Some sample inside the interval was not finite.
    pub saw_non_finite: bool,
    pub evaluations: usize,
    pub levels: usize,
}

const TS_MAX_ARG: f64 = 6.5;
// Below this argument the walk never stops early, so integrands that vanish
// around the centre are still sampled near the endpoints.
const TS_MIN_STOP_ARG: f64 = 3.0;
const TS_TAIL: f64 = 1e-18;

struct TanhSinhWalk {
    a: f64,
    b: f64,
    radius: f64,
    saw_non_finite: bool,
    evaluations: usize,
}

impl TanhSinhWalk {
    /// Sum of `w·f` over abscissae `±kh`, `k = first, first + stride, …`,
    /// walking outwards on both sides. Returns the sum and whether both
    /// tails decayed before the walk stopped.
    fn level<F: FnMut(f64) -> f64>(
        &mut self,
        f: &mut F,
        h: f64,
        first: usize,
        stride: usize,
        scale: f64,
    ) -> (f64, bool) {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut acc = NeumaierSum::new();
        let mut tails_ok = true;
        for left in [true, false] {
            let mut k = first;
            let mut last = 0.0f64;
            loop {
                let x = k as f64 * h;
                if x > TS_MAX_ARG {
                    break;
                }
                let u = half_pi * x.sinh();
                // r(1 − tanh u) without cancellation
                let gap = self.radius * (-u).exp() / u.cosh();
                let w = self.radius * h * half_pi * x.cosh() / (u.cosh() * u.cosh());
                if gap == 0.0 || w == 0.0 || !w.is_finite() {
                    break;
                }
                let t = if left { self.a + gap } else { self.b - gap };
                if t <= self.a.min(self.b) || t >= self.a.max(self.b) {
                    break;
                }
                let v = f(t);
                self.evaluations += 1;
                if !v.is_finite() {
                    self.saw_non_finite = true;
                    break;
                }
                let term = w * v;
                acc.add(term);
                last = term.abs();
                let reference = acc.value().abs().max(scale);
                if x > TS_MIN_STOP_ARG && last <= TS_TAIL * reference {
                    break;
                }
                k += stride;
            }
            let reference = acc.value().abs().max(scale);
            if last > 1e3 * TS_TAIL * reference {
                tails_ok = false;
            }
        }
        (acc.value(), tails_ok)
    }
}

/// Double-exponential integration of `f` over `[a, b]`, halving the step
/// until two successive levels agree to `tol`.
///
/// Samples are never taken at `a` or `b`. Non-finite samples truncate the
/// sum on that side; a sum whose last retained term is not negligible is
/// reported as unconverged, which is how divergent integrals show up.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: Tolerance, max_evaluations: usize) -> TanhSinh
where
    F: FnMut(f64) -> f64,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut walk = TanhSinhWalk {
        a,
        b,
        radius: 0.5 * (b - a),
        saw_non_finite: false,
        evaluations: 0,
    };

    let mut h = 1.0;
    let centre = f(0.5 * (a + b));
    walk.evaluations += 1;
    let mut total = NeumaierSum::new();
    if centre.is_finite() {
        total.add(walk.radius * h * half_pi * centre);
    } else {
        walk.saw_non_finite = true;
    }
    let (outer, _) = walk.level(&mut f, h, 1, 1, total.value().abs());
    total.add(outer);

    let mut previous = total.value();
    let mut levels = 0;
    let mut converged = false;
    while walk.evaluations < max_evaluations {
        levels += 1;
        h *= 0.5;
        let (odd, tails_ok) = walk.level(&mut f, h, 1, 2, previous.abs());
        // Halving the step halves the weights of the existing abscissae.
        let mut next = NeumaierSum::new();
        next.add(0.5 * previous);
        next.add(odd);
        let current = next.value();
        let diff = (current - previous).abs();
        previous = current;
        if levels >= 3 && tails_ok && centre.is_finite() && diff <= tol.target(current) {
            converged = true;
            break;
        }
    }

    TanhSinh {
        value: previous,
        converged,
        saw_non_finite: walk.saw_non_finite,
        evaluations: walk.evaluations,
        levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        let r = kronrod15(&mut |t: f64| t.powi(20), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 21.0, epsilon = 1e-16);
        let r = kronrod15(&mut |t: f64| t.powi(12), -1.0, 2.0).unwrap();
        assert_abs_diff_eq!(r.value, (2f64.powi(13) + 1.0) / 13.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_kronrod_on_smooth_and_peaked_integrands() {
        let tol = Tolerance::new(1e-14, 1e-13);
        let r = gauss_kronrod(f64::exp, 0.0, 1.0, tol, 200).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-14);
        let r = gauss_kronrod(|t: f64| 1.0 / (1e-4 + t * t), -1.0, 1.0, tol, 500).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((r.value - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn adaptive_kronrod_reports_non_finite() {
        let tol = Tolerance::new(1e-12, 1e-12);
        let r = gauss_kronrod(|t: f64| if t > 0.5 { f64::NAN } else { t }, 0.0, 1.0, tol, 50);
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn tanh_sinh_smooth() {
        let r = tanh_sinh(f64::exp, 0.0, 1.0, Tolerance::new(0.0, 1e-12), 1 << 20);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫₀¹ t^(−2/3) = 3
        let r = tanh_sinh(|t: f64| t.powf(-2.0 / 3.0), 0.0, 1.0, Tolerance::new(0.0, 1e-11), 1 << 20);
        assert!(r.converged, "{r:?}");
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-9);
        // ∫₀¹ ln t = −1
        let r = tanh_sinh(f64::ln, 0.0, 1.0, Tolerance::new(0.0, 1e-11), 1 << 20);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, -1.0, epsilon = 1e-10);
    }

    #[test]
    fn tanh_sinh_flags_divergence() {
        let r = tanh_sinh(|t: f64| 0.25 / t, 0.0, 1.0, Tolerance::new(0.0, 1e-10), 1 << 20);
        assert!(!r.converged, "{r:?}");
    }

    #[test]
    fn tanh_sinh_zero_integrand() {
        let r = tanh_sinh(|_| 0.0, -1.0, 3.0, Tolerance::new(0.0, 1e-10), 1 << 20);
        assert!(r.converged);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn tanh_sinh_reversed_and_shifted_interval() {
        let r = tanh_sinh(|t: f64| t * t, 2.0, 5.0, Tolerance::new(0.0, 1e-12), 1 << 20);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 39.0, epsilon = 1e-10);
    }
}
