//! Derivative information for the bound catalog: secants, sampled
//! derivative ranges, L2 norms and dispersions.

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{Datum, DerivativeInfo, Provenance};
use crate::expr::EvalError;
use crate::function::{Integrand, Order};
use crate::quad::{tanh_sinh, Tolerance};
use crate::rules::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("integrand cannot be evaluated at endpoint t = {at}: {source}")]
    Endpoint {
        at: f64,
        #[source]
        source: EvalError,
    },
    #[error("integrand is not finite at endpoint t = {at}")]
    NonFiniteEndpoint { at: f64 },
    #[error("inconsistent L2 estimate: squared dispersion {radicand} is negative")]
    NegativeRadicand { radicand: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub points_per_unit: usize,
    pub min_points: usize,
    /// Magnitude beyond which a sampled derivative counts as unbounded.
    pub unbounded_cutoff: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            points_per_unit: 10_001,
            min_points: 1001,
            unbounded_cutoff: 1e12,
        }
    }
}

impl SamplingConfig {
    pub fn points_for(&self, iv: &Interval) -> usize {
        let n = (self.points_per_unit as f64 * iv.length()).ceil();
        (n as usize).max(self.min_points).max(2)
    }
}

/// Relative tolerance of the L2 and dispersion quadratures.
pub const L2_REL_TOL: f64 = 1e-10;
/// Evaluation budget per quadrature.
pub const L2_MAX_EVALUATIONS: usize = 1 << 20;
// Splits allowed when a quadrature meets a non-finite interior sample.
const MAX_SPLIT_DEPTH: u32 = 4;
// Squared dispersions above −RADICAND_SLACK·scale are clamped to zero.
const RADICAND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Secants {
    pub s: f64,
    /// Absent when f′ is not finite at an endpoint.
    pub s1: Option<f64>,
}

fn endpoint_value<F: Integrand + ?Sized>(f: &F, t: f64) -> Result<f64, AnalysisError> {
    let v = f.eval(t).map_err(|source| AnalysisError::Endpoint { at: t, source })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(AnalysisError::NonFiniteEndpoint { at: t })
    }
}

fn endpoint_slope<F: Integrand + ?Sized>(f: &F, t: f64) -> Option<f64> {
    f.jet(t).ok().map(|j| j.d1).filter(|d| d.is_finite())
}

/// `S = (f(b) − f(a))/(b − a)` and `S₁ = (f′(b) − f′(a))/(b − a)`.
pub fn secants<F: Integrand + ?Sized>(f: &F, iv: &Interval) -> Result<Secants, AnalysisError> {
    let fa = endpoint_value(f, iv.a())?;
    let fb = endpoint_value(f, iv.b())?;
    let s1 = match (endpoint_slope(f, iv.a()), endpoint_slope(f, iv.b())) {
        (Some(da), Some(db)) => Some((db - da) / iv.length()),
        _ => None,
    };
    Ok(Secants {
        s: (fb - fa) / iv.length(),
        s1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledRange {
    pub lo: f64,
    pub hi: f64,
}

/// Min and max of f′ or f″ over a uniform grid. Absent when any sample is
/// not finite or exceeds the unbounded cutoff: a finite sample next to a
/// singularity is not a bound.
pub fn sample_range<F: Integrand + ?Sized>(
    f: &F,
    order: Order,
    iv: &Interval,
    cfg: &SamplingConfig,
) -> Option<SampledRange> {
    let n = cfg.points_for(iv);
    let step = iv.length() / (n - 1) as f64;
    let sample = |i: usize| -> Option<f64> {
        let t = if i == n - 1 { iv.b() } else { iv.a() + i as f64 * step };
        let v = order.pick(&f.jet(t).ok()?);
        (v.is_finite() && v.abs() <= cfg.unbounded_cutoff).then_some(v)
    };
    let (lo, hi) = (0..n)
        .into_par_iter()
        .map(|i| sample(i).map(|v| (v, v)))
        .try_reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| Some((x.0.min(y.0), x.1.max(y.1))),
        )?;
    Some(SampledRange { lo, hi })
}

/// Integration cells: `[lo, hi]` cut at the integrand's breakpoints.
fn cells<F: Integrand + ?Sized>(f: &F, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .filter(|&p| p > lo && p < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut left = lo;
    for c in cuts {
        out.push((left, c));
        left = c;
    }
    out.push((left, hi));
    out
}

fn integrate_cell<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, tol: Tolerance, depth: u32) -> Option<f64> {
    let r = tanh_sinh(g, lo, hi, tol, L2_MAX_EVALUATIONS);
    if r.converged {
        return Some(r.value);
    }
    // A lone bad sample (a kink hit exactly, say) is survivable by
    // splitting there; a divergent integral keeps failing.
    if r.saw_non_finite && depth < MAX_SPLIT_DEPTH {
        let mid = 0.5 * (lo + hi);
        let half = Tolerance::new(0.5 * tol.abs, tol.rel);
        let left = integrate_cell(g, lo, mid, half, depth + 1)?;
        let right = integrate_cell(g, mid, hi, half, depth + 1)?;
        return Some(left + right);
    }
    None
}

fn component<F: Integrand + ?Sized>(f: &F, order: Order, t: f64) -> f64 {
    f.jet(t).map(|j| order.pick(&j)).unwrap_or(f64::NAN)
}

/// `∫_lo^hi (g − c)²` where `g` is the chosen derivative of `f`.
/// `abs_floor` stops the refinement once the integral is at noise level.
pub fn centered_square_integral<F: Integrand + ?Sized>(
    f: &F,
    order: Order,
    lo: f64,
    hi: f64,
    centre: f64,
    abs_floor: f64,
) -> Option<f64> {
    let g = |t: f64| {
        let d = component(f, order, t) - centre;
        d * d
    };
    let pieces = cells(f, lo, hi);
    let floor = abs_floor / pieces.len() as f64;
    let mut total = 0.0;
    for (a, b) in pieces {
        total += integrate_cell(&g, a, b, Tolerance::new(floor, L2_REL_TOL), 0)?;
    }
    Some(total)
}

/// `∫_lo^hi g` for the chosen derivative `g`.
pub fn component_integral<F: Integrand + ?Sized>(f: &F, order: Order, lo: f64, hi: f64, abs_floor: f64) -> Option<f64> {
    let g = |t: f64| component(f, order, t);
    let pieces = cells(f, lo, hi);
    let floor = abs_floor / pieces.len() as f64;
    let mut total = 0.0;
    for (a, b) in pieces {
        total += integrate_cell(&g, a, b, Tolerance::new(floor, L2_REL_TOL), 0)?;
    }
    Some(total)
}

/// `‖g‖₂` for `g = f′` or `f″`; absent when the integral diverges.
pub fn l2_norm<F: Integrand + ?Sized>(f: &F, order: Order, iv: &Interval) -> Option<f64> {
    centered_square_integral(f, order, iv.a(), iv.b(), 0.0, 0.0).map(f64::sqrt)
}

/// `∫g` over `iv`: by the fundamental theorem of calculus when the
/// antiderivative is finite at both ends, else numerically.
pub(crate) fn mean_of<F: Integrand + ?Sized>(f: &F, order: Order, iv: &Interval, scale: f64) -> Option<f64> {
    let ends = (f.jet(iv.a()), f.jet(iv.b()));
    if let (Ok(ja), Ok(jb)) = ends {
        let (pa, pb) = (order.antiderivative(&ja), order.antiderivative(&jb));
        if pa.is_finite() && pb.is_finite() {
            return Some((pb - pa) / iv.length());
        }
    }
    component_integral(f, order, iv.a(), iv.b(), 1e-14 * scale).map(|s| s / iv.length())
}

/// Clamp a squared dispersion, rejecting clearly negative values.
pub fn clamp_radicand(radicand: f64, scale: f64) -> Result<f64, AnalysisError> {
    if radicand >= 0.0 {
        Ok(radicand)
    } else if radicand >= -RADICAND_SLACK * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(AnalysisError::NegativeRadicand { radicand })
    }
}

/// Mean of `g = f′` or `f″` over `iv` together with `σ(g) = √(∫(g − ḡ)²)`,
/// which equals `√((b−a) T(g, g))`.
pub fn mean_and_sigma<F: Integrand + ?Sized>(f: &F, order: Order, iv: &Interval) -> Option<(f64, f64)> {
    let norm2 = centered_square_integral(f, order, iv.a(), iv.b(), 0.0, 0.0)?;
    let mean = mean_of(f, order, iv, norm2.sqrt())?;
    // (g − ḡ)² is pure rounding noise when g is nearly constant
    let floor = 1e-24 * norm2;
    let spread = centered_square_integral(f, order, iv.a(), iv.b(), mean, floor)?;
    Some((mean, spread.max(0.0).sqrt()))
}

/// Dispersion of `g = f′` or `f″` about its mean.
pub fn sigma<F: Integrand + ?Sized>(f: &F, order: Order, iv: &Interval) -> Option<f64> {
    mean_and_sigma(f, order, iv).map(|(_, s)| s)
}

/// User-supplied analytic values that replace sampled ones.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub gamma1: Option<f64>,
    pub gamma1_upper: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma2_upper: Option<f64>,
    pub l2_fprime: Option<f64>,
    pub l2_fsecond: Option<f64>,
}

fn pick(user: Option<f64>, sampled: Option<f64>) -> Option<Datum> {
    user.map(Datum::user).or(sampled.map(Datum::sampled))
}

fn worst(a: &Datum, b: &Datum) -> Provenance {
    if a.is_rigorous() && b.is_rigorous() {
        if a.provenance == Provenance::UserSupplied || b.provenance == Provenance::UserSupplied {
            Provenance::UserSupplied
        } else {
            Provenance::Computed
        }
    } else {
        Provenance::Sampled
    }
}

/// σ from an L2 norm and the secant: `σ² = ‖g‖₂² − (b−a)·ḡ²`.
fn sigma_from_norm(
    norm: &Datum,
    mean: &Datum,
    iv: &Interval,
    name: &str,
    warnings: &mut Vec<String>,
) -> Option<Datum> {
    let n2 = norm.value * norm.value;
    let radicand = n2 - iv.length() * mean.value * mean.value;
    match clamp_radicand(radicand, n2) {
        Ok(r) => Some(Datum::new(r.sqrt(), worst(norm, mean))),
        Err(_) => {
            warnings.push(format!(
                "{name}: L2 norm {} is smaller than allowed by the secant {}; dispersion dropped",
                norm.value, mean.value
            ));
            None
        }
    }
}

/// Assemble everything the bound catalog consumes.
pub fn build_info<F: Integrand + ?Sized>(
    f: &F,
    iv: &Interval,
    overrides: &Overrides,
    cfg: &SamplingConfig,
) -> Result<DerivativeInfo, AnalysisError> {
    let sec = secants(f, iv)?;
    let r1 = sample_range(f, Order::First, iv, cfg);
    let r2 = sample_range(f, Order::Second, iv, cfg);

    let mut info = DerivativeInfo {
        gamma1: pick(overrides.gamma1, r1.map(|r| r.lo)),
        gamma1_upper: pick(overrides.gamma1_upper, r1.map(|r| r.hi)),
        gamma2: pick(overrides.gamma2, r2.map(|r| r.lo)),
        gamma2_upper: pick(overrides.gamma2_upper, r2.map(|r| r.hi)),
        secant: Some(Datum::computed(sec.s)),
        fprime_secant: sec.s1.map(Datum::computed),
        ..Default::default()
    };

    if let (Some(lo), Some(hi)) = (&info.gamma2, &info.gamma2_upper) {
        info.sup_fsecond = Some(Datum::new(lo.value.abs().max(hi.value.abs()), worst(lo, hi)));
    }

    let mut warnings = Vec::new();
    for (lo, hi, s, label) in [
        (info.gamma1, info.gamma1_upper, info.secant, "f'"),
        (info.gamma2, info.gamma2_upper, info.fprime_secant, "f''"),
    ] {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo.value > hi.value {
                warnings.push(format!("range of {label}: lower bound {} exceeds upper bound {}", lo.value, hi.value));
            }
        }
        if let (Some(lo), Some(s)) = (lo, s) {
            if lo.value > s.value {
                warnings.push(format!(
                    "lower bound {} of {label} exceeds its mean {} (mean value theorem)",
                    lo.value, s.value
                ));
            }
        }
        if let (Some(hi), Some(s)) = (hi, s) {
            if hi.value < s.value {
                warnings.push(format!(
                    "upper bound {} of {label} is below its mean {} (mean value theorem)",
                    hi.value, s.value
                ));
            }
        }
    }

    // f′: the mean is the secant S, always known.
    match overrides.l2_fprime {
        Some(norm) => {
            let norm = Datum::user(norm);
            info.l2_fprime = Some(norm);
            let mean = info.secant.expect("secant is always present");
            info.sigma_fprime = sigma_from_norm(&norm, &mean, iv, "f'", &mut warnings);
        }
        None => {
            info.l2_fprime = l2_norm(f, Order::First, iv).map(Datum::sampled);
            info.sigma_fprime = sigma(f, Order::First, iv).map(Datum::sampled);
        }
    }
    match overrides.l2_fsecond {
        Some(norm) => {
            let norm = Datum::user(norm);
            info.l2_fsecond = Some(norm);
            match info.fprime_secant {
                Some(mean) => info.sigma_fsecond = sigma_from_norm(&norm, &mean, iv, "f''", &mut warnings),
                // σ ≤ ‖f″‖₂ still holds
                None => info.sigma_fsecond = Some(norm),
            }
        }
        None => {
            info.l2_fsecond = l2_norm(f, Order::Second, iv).map(Datum::sampled);
            info.sigma_fsecond = sigma(f, Order::Second, iv).map(Datum::sampled);
        }
    }
    info.warnings = warnings;
    Ok(info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use approx::assert_abs_diff_eq;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn secant_examples() {
        let sq = parse("t^2").unwrap();
        assert_eq!(secants(&sq, &Interval::unit()).unwrap(), Secants { s: 1.0, s1: Some(2.0) });
        let root = parse("sqrt(t)").unwrap();
        assert_eq!(secants(&root, &Interval::unit()).unwrap(), Secants { s: 1.0, s1: None });
        let log = parse("log(t)").unwrap();
        assert!(matches!(
            secants(&log, &Interval::unit()),
            Err(AnalysisError::Endpoint { at, .. }) if at == 0.0
        ));
    }

    #[test]
    fn range_examples() {
        let cfg = SamplingConfig::default();
        let r = sample_range(&parse("t^2").unwrap(), Order::First, &Interval::unit(), &cfg).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 2.0));
        assert!(sample_range(&parse("sqrt(t)").unwrap(), Order::First, &Interval::unit(), &cfg).is_none());
        let pi = std::f64::consts::PI;
        let r = sample_range(&parse("sin(t)").unwrap(), Order::Second, &iv(0.0, pi), &cfg).unwrap();
        assert_abs_diff_eq!(r.lo, -1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(r.hi, 0.0, epsilon = 1e-7);
    }

    #[test]
    fn cutoff_disables_huge_derivatives() {
        let cfg = SamplingConfig {
            unbounded_cutoff: 5.0,
            ..Default::default()
        };
        let cube = parse("t^3").unwrap();
        let r = sample_range(&cube, Order::First, &Interval::unit(), &cfg).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 3.0));
        assert!(sample_range(&cube, Order::Second, &Interval::unit(), &cfg).is_none());
    }

    #[test]
    fn l2_examples() {
        let n = l2_norm(&parse("t^2").unwrap(), Order::First, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(n, (4.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        let n = l2_norm(&parse("cbrt(t^5)").unwrap(), Order::Second, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(n, (100.0f64 / 27.0).sqrt(), epsilon = 1e-9);
        let n = l2_norm(&parse("cbrt(sin(t^2))").unwrap(), Order::First, &Interval::unit()).unwrap();
        assert!(n.is_finite() && n <= 4.0 / 3.0);
        assert!(l2_norm(&parse("sqrt(t)").unwrap(), Order::First, &Interval::unit()).is_none());
    }

    #[test]
    fn sigma_examples() {
        let s = sigma(&parse("t^2").unwrap(), Order::First, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(s, (1.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        let s = sigma(&parse("3*t + 1").unwrap(), Order::First, &iv(-0.3, 1.1)).unwrap();
        assert!(s < 1e-10);
        let s = sigma(&parse("t^2").unwrap(), Order::Second, &Interval::unit()).unwrap();
        assert!(s < 1e-10);
    }

    #[test]
    fn pythagorean_identity_and_shift_invariance() {
        for src in ["t^4 - t", "exp(t)*sin(2*t)", "t^3 + 2*t^2"] {
            let f = parse(src).unwrap();
            let g = parse(&format!("{src} + 7*t")).unwrap();
            let range = iv(-0.4, 1.3);
            for order in [Order::First, Order::Second] {
                let s = sigma(&f, order, &range).unwrap();
                let n = l2_norm(&f, order, &range).unwrap();
                let mean = component_integral(&f, order, range.a(), range.b(), 0.0).unwrap() / range.length();
                assert_abs_diff_eq!(s * s + mean * mean * range.length(), n * n, epsilon = 1e-10 * n * n);
                if order == Order::First {
                    let shifted = sigma(&g, order, &range).unwrap();
                    assert_abs_diff_eq!(s, shifted, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn polynomial_ranges_and_norms() {
        // f = t⁴ − t³ on [0, 1]: f′ = 4t³ − 3t², f″ = 12t² − 6t
        let f = parse("t^4 - t^3").unwrap();
        let cfg = SamplingConfig::default();
        let r1 = sample_range(&f, Order::First, &Interval::unit(), &cfg).unwrap();
        assert_abs_diff_eq!(r1.lo, -0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(r1.hi, 1.0, epsilon = 1e-6);
        let r2 = sample_range(&f, Order::Second, &Interval::unit(), &cfg).unwrap();
        assert_abs_diff_eq!(r2.lo, -0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(r2.hi, 6.0, epsilon = 1e-6);
        // ∫(4t³−3t²)² = 16/7 − 4 + 9/5
        let n1 = l2_norm(&f, Order::First, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(n1 * n1, 16.0 / 7.0 - 4.0 + 9.0 / 5.0, epsilon = 1e-9);
        // ∫(12t²−6t)² = 144/5 − 36 + 12
        let n2 = l2_norm(&f, Order::Second, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(n2 * n2, 144.0 / 5.0 - 36.0 + 12.0, epsilon = 1e-9);
    }

    #[test]
    fn kink_in_the_middle_is_split() {
        // f′ = sign(t − 1/2), the kink sits on the tanh-sinh centre
        let f = parse("abs(t - 0.5)").unwrap();
        let n = l2_norm(&f, Order::First, &Interval::unit()).unwrap();
        assert_abs_diff_eq!(n, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn build_info_examples() {
        let cfg = SamplingConfig::default();
        let info = build_info(&parse("t^2").unwrap(), &Interval::unit(), &Overrides::default(), &cfg).unwrap();
        assert_eq!(info.secant.unwrap().provenance, Provenance::Computed);
        assert_eq!(info.fprime_secant.unwrap().provenance, Provenance::Computed);
        for d in [
            info.gamma1,
            info.gamma1_upper,
            info.gamma2,
            info.gamma2_upper,
            info.l2_fprime,
            info.l2_fsecond,
            info.sigma_fprime,
            info.sigma_fsecond,
            info.sup_fsecond,
        ] {
            assert_eq!(d.unwrap().provenance, Provenance::Sampled);
        }
        assert!(info.warnings.is_empty());

        let root = parse("sqrt(t)").unwrap();
        let info = build_info(&root, &Interval::unit(), &Overrides::default(), &cfg).unwrap();
        assert!(info.gamma1.is_none() && info.gamma1_upper.is_none());
        assert!(info.sigma_fprime.is_none());
        let ov = Overrides {
            gamma1: Some(0.5),
            ..Default::default()
        };
        let info = build_info(&root, &Interval::unit(), &ov, &cfg).unwrap();
        assert_eq!(info.gamma1, Some(Datum::user(0.5)));

        let ov = Overrides {
            gamma1: Some(5.0),
            ..Default::default()
        };
        let info = build_info(&parse("t^2").unwrap(), &Interval::unit(), &ov, &cfg).unwrap();
        assert!(info.warnings.iter().any(|w| w.contains("mean value")));
    }

    #[test]
    fn l2_override_feeds_sigma() {
        let cfg = SamplingConfig::default();
        let ov = Overrides {
            l2_fprime: Some((4.0f64 / 3.0).sqrt()),
            ..Default::default()
        };
        let info = build_info(&parse("t^2").unwrap(), &Interval::unit(), &ov, &cfg).unwrap();
        let s = info.sigma_fprime.unwrap();
        assert_eq!(s.provenance, Provenance::UserSupplied);
        assert_abs_diff_eq!(s.value, (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);

        let ov = Overrides {
            l2_fprime: Some(0.5),
            ..Default::default()
        };
        let info = build_info(&parse("t^2").unwrap(), &Interval::unit(), &ov, &cfg).unwrap();
        assert!(info.sigma_fprime.is_none());
        assert!(!info.warnings.is_empty());
    }
}
