//! Composite rule on a uniform partition, its telescoped correction, the
//! panel dispersions σₙ and ωₙ, and the composite error bounds.

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{build_info, centered_square_integral, component_integral, AnalysisError, Overrides, SamplingConfig};
use crate::bounds::{
    bound_first_lower, bound_first_range, bound_first_upper, bound_second_lower, bound_second_range,
    bound_second_sup, bound_second_upper, non_negative, BoundError, BoundTag, Datum, DerivativeInfo, ErrorBound,
};
use crate::constants::constants;
use crate::function::{Integrand, Order, RealFn};
use crate::quad::NeumaierSum;
use crate::rules::{correction_p, eval_at, optimal_rule_estimate, Interval, RuleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompositeError {
    #[error("panel count must be at least 1")]
    NoPanels,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

// Below this many nodes the evaluation stays on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeConfig {
    iv: Interval,
    n: usize,
}

impl CompositeConfig {
    pub fn new(iv: Interval, n: usize) -> Result<Self, CompositeError> {
        if n == 0 {
            return Err(CompositeError::NoPanels);
        }
        Ok(Self { iv, n })
    }

    pub fn interval(&self) -> &Interval {
        &self.iv
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.iv.length() / self.n as f64
    }

    /// `xᵢ = a + i·h`, with `xₙ = b` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.iv.b()
        } else {
            self.iv.a() + i as f64 * self.h()
        }
    }

    pub fn panel_midpoint(&self, i: usize) -> f64 {
        self.iv.a() + (i as f64 + 0.5) * self.h()
    }

    pub fn panel(&self, i: usize) -> Interval {
        Interval::new(self.node(i), self.node(i + 1)).expect("panels of a valid partition are non-degenerate")
    }
}

/// Evaluate `f` at `points(i)` for `i in 0..count` and sum in index order.
fn ordered_sum<F, P>(f: &F, count: usize, points: P) -> Result<f64, RuleError>
where
    F: RealFn + ?Sized,
    P: Fn(usize) -> f64 + Sync,
{
    let values: Vec<Result<f64, RuleError>> = if count >= PARALLEL_THRESHOLD {
        (0..count).into_par_iter().map(|i| eval_at(f, points(i))).collect()
    } else {
        (0..count).map(|i| eval_at(f, points(i))).collect()
    };
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v?);
    }
    Ok(acc.value())
}

/// Composite optimal rule in grouped form: endpoints once, interior
/// nodes with doubled end weight, and all `n` panel midpoints.
pub fn composite_estimate<F: RealFn + ?Sized>(f: &F, cfg: &CompositeConfig) -> Result<f64, RuleError> {
    let c = constants();
    let h = cfg.h();
    let ends = eval_at(f, cfg.iv.a())? + eval_at(f, cfg.iv.b())?;
    let interior = ordered_sum(f, cfg.n - 1, |i| cfg.node(i + 1))?;
    let mids = ordered_sum(f, cfg.n, |i| cfg.panel_midpoint(i))?;
    let mut acc = NeumaierSum::new();
    acc.add(c.end_weight * h * ends);
    acc.add(2.0 * c.end_weight * h * interior);
    acc.add(c.mid_weight * h * mids);
    Ok(acc.value())
}

/// The same sum taken panel by panel.
pub fn composite_estimate_per_panel<F: RealFn + ?Sized>(f: &F, cfg: &CompositeConfig) -> Result<f64, RuleError> {
    let mut acc = NeumaierSum::new();
    for i in 0..cfg.n {
        acc.add(optimal_rule_estimate(f, &cfg.panel(i))?);
    }
    Ok(acc.value())
}

/// `Pₙ = (b−a)²/(96n²) · (4 − 3√2) · (f′(b) − f′(a))`; the panel
/// corrections telescope to the endpoint derivatives.
pub fn composite_correction(fprime_a: f64, fprime_b: f64, cfg: &CompositeConfig) -> f64 {
    let n = cfg.n as f64;
    correction_p(fprime_a, fprime_b, &cfg.iv) / (n * n)
}

/// Sum of the panel corrections, for checking the telescoping.
pub fn summed_panel_corrections(fprime_at_nodes: &[f64], cfg: &CompositeConfig) -> f64 {
    assert_eq!(fprime_at_nodes.len(), cfg.n + 1);
    let mut acc = NeumaierSum::new();
    for i in 0..cfg.n {
        acc.add(correction_p(fprime_at_nodes[i], fprime_at_nodes[i + 1], &cfg.panel(i)));
    }
    acc.value()
}

/// Increment of the antiderivative of `g` (f for `First`, f′ for
/// `Second`) over `[lo, hi]`.
fn increment<F: Integrand + ?Sized>(f: &F, order: Order, lo: f64, hi: f64) -> Option<f64> {
    let at = |t: f64| f.jet(t).ok().map(|j| order.antiderivative(&j)).filter(|v| v.is_finite());
    match (at(lo), at(hi)) {
        (Some(p), Some(q)) => Some(q - p),
        _ => component_integral(f, order, lo, hi, 0.0),
    }
}

/// `(hi − lo) · ∫(g − Δ/(hi − lo))²`, the squared dispersion of one panel
/// written without the cancellation of `h‖g‖² − Δ²`.
fn panel_radicand<F: Integrand + ?Sized>(f: &F, order: Order, lo: f64, hi: f64, delta: f64) -> Option<f64> {
    let h = hi - lo;
    let centre = delta / h;
    let floor = 1e-24 * h * centre * centre;
    centered_square_integral(f, order, lo, hi, centre, floor).map(|v| h * v.max(0.0))
}

/// `σₙ = Σᵢ √(h‖g‖²_{[xᵢ,xᵢ₊₁]} − Δᵢ²)` with the norm taken per panel.
/// `Order::First` gives σₙ(f) (norms of f′), `Order::Second` σₙ(f′).
pub fn sigma_n<F: Integrand + ?Sized>(f: &F, order: Order, cfg: &CompositeConfig) -> Option<f64> {
    let terms: Vec<Option<f64>> = (0..cfg.n)
        .into_par_iter()
        .map(|i| {
            let (lo, hi) = (cfg.node(i), cfg.node(i + 1));
            let delta = increment(f, order, lo, hi)?;
            panel_radicand(f, order, lo, hi, delta).map(f64::sqrt)
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t?);
    }
    Some(acc.value())
}

/// `ωₙ = √((b−a)‖g‖² − Δ²/n)` with the norm over the whole interval,
/// evaluated as `√((b−a)∫(g − ḡ)² + Δ²(1 − 1/n))`.
pub fn omega_n<F: Integrand + ?Sized>(f: &F, order: Order, cfg: &CompositeConfig) -> Option<f64> {
    let (a, b) = (cfg.iv.a(), cfg.iv.b());
    let delta = increment(f, order, a, b)?;
    let spread = panel_radicand(f, order, a, b, delta)?;
    let n = cfg.n as f64;
    Some((spread + delta * delta * (1.0 - 1.0 / n)).sqrt())
}

/// ωₙ from a known global L2 norm: `√((b−a)‖g‖² − Δ²/n)`.
pub fn omega_n_from_norm(norm: f64, delta: f64, cfg: &CompositeConfig) -> Result<f64, AnalysisError> {
    let l = cfg.iv.length();
    let n2 = l * norm * norm;
    crate::analysis::clamp_radicand(n2 - delta * delta / cfg.n as f64, n2).map(f64::sqrt)
}

fn composite(bound: ErrorBound, divisor: f64, n: usize) -> ErrorBound {
    ErrorBound {
        value: bound.value / divisor,
        panels: n,
        ..bound
    }
}

/// `(2−√2)/(48n²) · M₂ · (b−a)³`
pub fn cb_second_sup(m2: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    let n = cfg.n as f64;
    Ok(composite(bound_second_sup(m2, &cfg.iv)?, n * n, cfg.n))
}

/// The three first-derivative range bounds with their `1/n` scaling.
pub fn cb_first_range(gamma1: f64, gamma1_upper: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_first_range(gamma1, gamma1_upper, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_first_lower(secant: f64, gamma1: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_first_lower(secant, gamma1, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_first_upper(gamma1_upper: f64, secant: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_first_upper(gamma1_upper, secant, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_first(gamma1: f64, gamma1_upper: f64, secant: f64, cfg: &CompositeConfig) -> Result<Vec<ErrorBound>, BoundError> {
    Ok(vec![
        cb_first_range(gamma1, gamma1_upper, cfg)?,
        cb_first_lower(secant, gamma1, cfg)?,
        cb_first_upper(gamma1_upper, secant, cfg)?,
    ])
}

/// `√(11/96 − √2/16) · (b−a)/n · σₙ(f)`
pub fn cb_gruss_first(sigma_n_val: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    let s = non_negative("sigma_n(f)", sigma_n_val)?;
    let value = constants().p1_chebyshev.sqrt() * cfg.iv.length() / cfg.n as f64 * s;
    Ok(ErrorBound::new(BoundTag::GrussFirst, value, cfg.n))
}

/// `√(11/96 − √2/16) · (b−a)/√n · ωₙ(f)`
pub fn cb_gruss_first_omega(omega_n_val: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    let w = non_negative("omega_n(f)", omega_n_val)?;
    let value = constants().p1_chebyshev.sqrt() * cfg.iv.length() / (cfg.n as f64).sqrt() * w;
    Ok(ErrorBound::new(BoundTag::GrussFirstOmega, value, cfg.n))
}

/// Second-derivative range bounds for `|S − Pₙ|` in the `1/n` form.
pub fn cb_second_range(gamma2: f64, gamma2_upper: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_second_range(gamma2, gamma2_upper, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_second_lower(fprime_secant: f64, gamma2: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_second_lower(fprime_secant, gamma2, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_second_upper(gamma2_upper: f64, fprime_secant: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    Ok(composite(bound_second_upper(gamma2_upper, fprime_secant, &cfg.iv)?, cfg.n as f64, cfg.n))
}

pub fn cb_second(gamma2: f64, gamma2_upper: f64, fprime_secant: f64, cfg: &CompositeConfig) -> Result<Vec<ErrorBound>, BoundError> {
    Ok(vec![
        cb_second_range(gamma2, gamma2_upper, cfg)?,
        cb_second_lower(fprime_secant, gamma2, cfg)?,
        cb_second_upper(gamma2_upper, fprime_secant, cfg)?,
    ])
}

/// `√(47/23040 − √2/768) · (b−a)²/n² · σₙ(f′)`
pub fn cb_gruss_second(sigma_n_fsecond: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    let s = non_negative("sigma_n(f')", sigma_n_fsecond)?;
    let n = cfg.n as f64;
    let value = constants().p2_chebyshev.sqrt() * cfg.iv.length().powi(2) / (n * n) * s;
    Ok(ErrorBound::new(BoundTag::GrussSecond, value, cfg.n))
}

/// `√(47/23040 − √2/768) · (b−a)²/(n√n) · ωₙ(f′)`
pub fn cb_gruss_second_omega(omega_n_fsecond: f64, cfg: &CompositeConfig) -> Result<ErrorBound, BoundError> {
    let w = non_negative("omega_n(f')", omega_n_fsecond)?;
    let n = cfg.n as f64;
    let value = constants().p2_chebyshev.sqrt() * cfg.iv.length().powi(2) / (n * n.sqrt()) * w;
    Ok(ErrorBound::new(BoundTag::GrussSecondOmega, value, cfg.n))
}

/// Smallest `n` for which the sup-norm composite bound is at most `tol`.
pub fn panels_for_tolerance(m2: f64, iv: &Interval, tol: f64) -> Result<usize, BoundError> {
    let tol = non_negative("tolerance", tol)?;
    let single = bound_second_sup(m2, iv)?.value;
    if single <= tol {
        return Ok(1);
    }
    if tol == 0.0 {
        return Err(BoundError::Negative { name: "tolerance", value: tol });
    }
    let mut n = (single / tol).sqrt().ceil() as usize;
    // guard against rounding in the square root
    while single / ((n as f64) * (n as f64)) > tol {
        n += 1;
    }
    while n > 1 && single / (((n - 1) as f64) * ((n - 1) as f64)) <= tol {
        n -= 1;
    }
    Ok(n)
}

/// Panel dispersions feeding the composite Grüss bounds. Names follow the
/// derivative whose norm enters: `sigma_n_fprime` is σₙ(f).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PanelDispersion {
    pub sigma_n_fprime: Option<Datum>,
    pub omega_n_fprime: Option<Datum>,
    pub sigma_n_fsecond: Option<Datum>,
    pub omega_n_fsecond: Option<Datum>,
}

impl PanelDispersion {
    pub fn compute<F: Integrand + ?Sized>(f: &F, info: &DerivativeInfo, cfg: &CompositeConfig) -> Self {
        let mut out = Self {
            sigma_n_fprime: sigma_n(f, Order::First, cfg).map(Datum::sampled),
            omega_n_fprime: omega_n(f, Order::First, cfg).map(Datum::sampled),
            sigma_n_fsecond: sigma_n(f, Order::Second, cfg).map(Datum::sampled),
            omega_n_fsecond: omega_n(f, Order::Second, cfg).map(Datum::sampled),
        };
        let l = cfg.iv.length();
        // a user-supplied global norm gives ωₙ without quadrature
        if let (Some(norm), Some(s)) = (info.l2_fprime, info.secant) {
            if norm.is_rigorous() {
                if let Ok(w) = omega_n_from_norm(norm.value, s.value * l, cfg) {
                    out.omega_n_fprime = Some(Datum::new(w, norm.provenance));
                }
            }
        }
        if let (Some(norm), Some(s1)) = (info.l2_fsecond, info.fprime_secant) {
            if norm.is_rigorous() {
                if let Ok(w) = omega_n_from_norm(norm.value, s1.value * l, cfg) {
                    out.omega_n_fsecond = Some(Datum::new(w, norm.provenance));
                }
            }
        }
        out
    }
}

/// Every composite bound whose inputs are available.
pub fn composite_bounds(
    info: &DerivativeInfo,
    disp: &PanelDispersion,
    cfg: &CompositeConfig,
) -> Result<Vec<ErrorBound>, BoundError> {
    let mut out = Vec::new();
    let mut push = |res: Result<ErrorBound, BoundError>, inputs: &[&Datum]| {
        if let Ok(b) = res {
            out.push(b.with_rigor(inputs.iter().all(|d| d.is_rigorous())));
        }
    };
    if let Some(m2) = &info.sup_fsecond {
        push(cb_second_sup(m2.value, cfg), &[m2]);
    }
    if let (Some(lo), Some(hi)) = (&info.gamma1, &info.gamma1_upper) {
        push(cb_first_range(lo.value, hi.value, cfg), &[lo, hi]);
    }
    if let (Some(s), Some(lo)) = (&info.secant, &info.gamma1) {
        push(cb_first_lower(s.value, lo.value, cfg), &[s, lo]);
    }
    if let (Some(hi), Some(s)) = (&info.gamma1_upper, &info.secant) {
        push(cb_first_upper(hi.value, s.value, cfg), &[hi, s]);
    }
    if let Some(s) = &disp.sigma_n_fprime {
        push(cb_gruss_first(s.value, cfg), &[s]);
    }
    if let Some(w) = &disp.omega_n_fprime {
        push(cb_gruss_first_omega(w.value, cfg), &[w]);
    }
    if let (Some(lo), Some(hi)) = (&info.gamma2, &info.gamma2_upper) {
        push(cb_second_range(lo.value, hi.value, cfg), &[lo, hi]);
    }
    if let (Some(s1), Some(lo)) = (&info.fprime_secant, &info.gamma2) {
        push(cb_second_lower(s1.value, lo.value, cfg), &[s1, lo]);
    }
    if let (Some(hi), Some(s1)) = (&info.gamma2_upper, &info.fprime_secant) {
        push(cb_second_upper(hi.value, s1.value, cfg), &[hi, s1]);
    }
    if let Some(s) = &disp.sigma_n_fsecond {
        push(cb_gruss_second(s.value, cfg), &[s]);
    }
    if let Some(w) = &disp.omega_n_fsecond {
        push(cb_gruss_second_omega(w.value, cfg), &[w]);
    }
    if out.is_empty() {
        return Err(BoundError::NoApplicableBound);
    }
    Ok(out)
}

/// Endpoint derivatives, when both are finite.
pub fn endpoint_slopes<F: Integrand + ?Sized>(f: &F, iv: &Interval) -> Option<(f64, f64)> {
    let d = |t: f64| f.jet(t).ok().map(|j| j.d1).filter(|v| v.is_finite());
    Some((d(iv.a())?, d(iv.b())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeReport {
    pub n: usize,
    pub h: f64,
    pub estimate: f64,
    /// Pₙ; absent when f′ is not finite at an endpoint.
    pub correction: Option<f64>,
    pub corrected: Option<f64>,
    pub dispersion: PanelDispersion,
    pub info: DerivativeInfo,
    pub bounds: Vec<ErrorBound>,
}

impl CompositeReport {
    pub fn bound(&self, tag: BoundTag) -> Option<&ErrorBound> {
        self.bounds.iter().find(|b| b.tag == tag)
    }
}

/// Estimate, correction and every applicable composite bound, given
/// derivative information for the whole interval.
pub fn composite_report_with_info<F: Integrand + ?Sized>(
    f: &F,
    cfg: &CompositeConfig,
    info: &DerivativeInfo,
) -> Result<CompositeReport, CompositeError> {
    let estimate = composite_estimate(f, cfg)?;
    let correction = endpoint_slopes(f, &cfg.iv).map(|(da, db)| composite_correction(da, db, cfg));
    let dispersion = PanelDispersion::compute(f, info, cfg);
    let bounds = composite_bounds(info, &dispersion, cfg).unwrap_or_default();
    Ok(CompositeReport {
        n: cfg.n,
        h: cfg.h(),
        estimate,
        correction,
        corrected: correction.map(|p| estimate + p),
        dispersion,
        info: info.clone(),
        bounds,
    })
}

pub fn composite_report<F: Integrand + ?Sized>(
    f: &F,
    cfg: &CompositeConfig,
    overrides: &Overrides,
    sampling: &SamplingConfig,
) -> Result<CompositeReport, CompositeError> {
    let info = build_info(f, &cfg.iv, overrides, sampling)?;
    composite_report_with_info(f, cfg, &info)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub estimate: f64,
    pub corrected: Option<f64>,
    pub abs_error: f64,
    pub abs_corrected_error: Option<f64>,
    pub bound_t4ab: Option<f64>,
    pub bound_t1p_range: Option<f64>,
    pub bound_t2p_sigma: Option<f64>,
    pub bound_t2p_omega: Option<f64>,
    pub bound_t3p_range: Option<f64>,
    pub bound_t4p_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub rows: Vec<StudyRow>,
    /// Log-log slope of |error| against n over the last four rows.
    pub slope_error: Option<f64>,
    pub slope_corrected: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x`; absent if any `y` is not
/// positive or fewer than two points are given.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || !(y > 0.0) || !y.is_finite()) {
        return None;
    }
    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

// Errors at or below this are rounding noise, not a convergence signal.
const SLOPE_NOISE_FLOOR: f64 = 1e-300;

/// Estimates, errors against `reference` and composite bounds for each
/// panel count.
pub fn convergence_study<F: Integrand + ?Sized>(
    f: &F,
    iv: &Interval,
    n_values: &[usize],
    reference: f64,
    overrides: &Overrides,
    sampling: &SamplingConfig,
) -> Result<Study, CompositeError> {
    if n_values.is_empty() {
        return Err(CompositeError::NoPanels);
    }
    let info = build_info(f, iv, overrides, sampling)?;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let cfg = CompositeConfig::new(*iv, n)?;
        let r = composite_report_with_info(f, &cfg, &info)?;
        let value = |tag| r.bound(tag).map(|b| b.value);
        rows.push(StudyRow {
            n,
            h: cfg.h(),
            estimate: r.estimate,
            corrected: r.corrected,
            abs_error: (reference - r.estimate).abs(),
            abs_corrected_error: r.corrected.map(|c| (reference - c).abs()),
            bound_t4ab: value(BoundTag::SecondSup),
            bound_t1p_range: value(BoundTag::FirstRange),
            bound_t2p_sigma: value(BoundTag::GrussFirst),
            bound_t2p_omega: value(BoundTag::GrussFirstOmega),
            bound_t3p_range: value(BoundTag::SecondRange),
            bound_t4p_sigma: value(BoundTag::GrussSecond),
        });
    }
    let tail = &rows[rows.len().saturating_sub(4)..];
    let fit = |pick: &dyn Fn(&StudyRow) -> Option<f64>| -> Option<f64> {
        let pts: Option<Vec<(f64, f64)>> = tail
            .iter()
            .map(|r| pick(r).filter(|e| *e > SLOPE_NOISE_FLOOR).map(|e| (r.n as f64, e)))
            .collect();
        loglog_slope(&pts?)
    };
    let slope_error = fit(&|r| Some(r.abs_error));
    let slope_corrected = fit(&|r| r.abs_corrected_error);
    Ok(Study {
        rows,
        slope_error,
        slope_corrected,
    })
}

/// Panels used for self-computed reference integrals.
pub const REFERENCE_PANELS: usize = 1 << 20;

/// Reference value of `∫f` from the composite rule on 2²⁰ panels,
/// corrected when the endpoint derivatives are finite.
pub fn reference_integral<F: Integrand + ?Sized>(f: &F, iv: &Interval) -> Result<f64, CompositeError> {
    let cfg = CompositeConfig::new(*iv, REFERENCE_PANELS)?;
    let est = composite_estimate(f, &cfg)?;
    Ok(match endpoint_slopes(f, iv) {
        Some((da, db)) => est + composite_correction(da, db, &cfg),
        None => est,
    })
}
