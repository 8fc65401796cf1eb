//! Error bounds for the optimal rule and its corrected form.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::constants::constants;
use crate::rules::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{lo_name} = {lo} exceeds {hi_name} = {hi}")]
    Inverted {
        lo_name: &'static str,
        lo: f64,
        hi_name: &'static str,
        hi: f64,
    },
    #[error("no error bound is computable from the available derivative information")]
    NoApplicableBound,
}

/// Where a datum came from. Only `UserSupplied` and `Computed` values
/// feed rigorous bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    UserSupplied,
    /// Exact formula in endpoint values, e.g. a secant.
    Computed,
    /// Grid sampling or numerical quadrature.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Datum {
    pub value: f64,
    pub provenance: Provenance,
}

impl Datum {
    pub fn new(value: f64, provenance: Provenance) -> Self {
        Self { value, provenance }
    }

    pub fn user(value: f64) -> Self {
        Self::new(value, Provenance::UserSupplied)
    }

    pub fn computed(value: f64) -> Self {
        Self::new(value, Provenance::Computed)
    }

    pub fn sampled(value: f64) -> Self {
        Self::new(value, Provenance::Sampled)
    }

    pub fn is_rigorous(&self) -> bool {
        self.provenance != Provenance::Sampled
    }
}

/// Derivative information consumed by the bound catalog.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DerivativeInfo {
    /// Lower and upper bound of f′.
    pub gamma1: Option<Datum>,
    #[serde(rename = "Gamma1")]
    pub gamma1_upper: Option<Datum>,
    /// Lower and upper bound of f″.
    pub gamma2: Option<Datum>,
    #[serde(rename = "Gamma2")]
    pub gamma2_upper: Option<Datum>,
    /// (f(b) − f(a)) / (b − a)
    pub secant: Option<Datum>,
    /// (f′(b) − f′(a)) / (b − a)
    pub fprime_secant: Option<Datum>,
    pub l2_fprime: Option<Datum>,
    pub l2_fsecond: Option<Datum>,
    pub sigma_fprime: Option<Datum>,
    pub sigma_fsecond: Option<Datum>,
    pub sup_fsecond: Option<Datum>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundTag {
    SecondSup,
    FirstRange,
    FirstLower,
    FirstUpper,
    GrussFirst,
    SecondRange,
    SecondLower,
    SecondUpper,
    GrussSecond,
    /// Composite first-derivative Grüss bound through ωₙ.
    GrussFirstOmega,
    /// Composite second-derivative Grüss bound through ωₙ.
    GrussSecondOmega,
}

impl BoundTag {
    pub fn applies_to(self) -> AppliesTo {
        match self {
            BoundTag::SecondRange
            | BoundTag::SecondLower
            | BoundTag::SecondUpper
            | BoundTag::GrussSecond
            | BoundTag::GrussSecondOmega => AppliesTo::QMinusP,
            _ => AppliesTo::Q,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundTag::SecondSup => "SecondSup",
            BoundTag::FirstRange => "FirstRange",
            BoundTag::FirstLower => "FirstLower",
            BoundTag::FirstUpper => "FirstUpper",
            BoundTag::GrussFirst => "GrussFirst",
            BoundTag::SecondRange => "SecondRange",
            BoundTag::SecondLower => "SecondLower",
            BoundTag::SecondUpper => "SecondUpper",
            BoundTag::GrussSecond => "GrussSecond",
            BoundTag::GrussFirstOmega => "GrussFirstOmega",
            BoundTag::GrussSecondOmega => "GrussSecondOmega",
        }
    }

    /// True for bounds that need two-sided or one-sided pointwise ranges.
    pub fn is_range_type(self) -> bool {
        matches!(
            self,
            BoundTag::FirstRange
                | BoundTag::FirstLower
                | BoundTag::FirstUpper
                | BoundTag::SecondRange
                | BoundTag::SecondLower
                | BoundTag::SecondUpper
        )
    }
}

impl fmt::Display for BoundTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which error functional a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AppliesTo {
    /// ∫f minus the rule.
    Q,
    /// ∫f minus the rule minus the correction.
    QMinusP,
}

impl fmt::Display for AppliesTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AppliesTo::Q => "Q",
            AppliesTo::QMinusP => "Q-P",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBound {
    pub tag: BoundTag,
    pub value: f64,
    pub applies_to: AppliesTo,
    pub rigorous: bool,
    /// Number of panels of the partition the bound refers to.
    pub panels: usize,
}

impl ErrorBound {
    pub(crate) fn new(tag: BoundTag, value: f64, panels: usize) -> Self {
        Self {
            tag,
            value,
            applies_to: tag.applies_to(),
            rigorous: true,
            panels,
        }
    }

    pub fn with_rigor(mut self, rigorous: bool) -> Self {
        self.rigorous = rigorous;
        self
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64, BoundError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(BoundError::Negative { name, value })
    }
}

/// `hi − lo`, rejecting inverted inputs. Differences at rounding level are
/// read as zero so that e.g. a secant that lands one ulp below an exact
/// derivative bound is not rejected.
pub(crate) fn gap(
    lo_name: &'static str,
    lo: f64,
    hi_name: &'static str,
    hi: f64,
) -> Result<f64, BoundError> {
    let d = hi - lo;
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if d.is_finite() && d >= -slack {
        Ok(d.max(0.0))
    } else {
        Err(BoundError::Inverted {
            lo_name,
            lo,
            hi_name,
            hi,
        })
    }
}

/// `(2−√2)/48 · M₂ · (b−a)³`
pub fn bound_second_sup(m2: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let m2 = non_negative("M2", m2)?;
    let value = constants().optimal_l1 * m2 * iv.length().powi(3);
    Ok(ErrorBound::new(BoundTag::SecondSup, value, 1))
}

/// `(Γ₁−γ₁)/32 · (5−2√2) · (b−a)²`
pub fn bound_first_range(gamma1: f64, gamma1_upper: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let range = gap("gamma1", gamma1, "Gamma1", gamma1_upper)?;
    let value = constants().first_range * range * iv.length().powi(2);
    Ok(ErrorBound::new(BoundTag::FirstRange, value, 1))
}

/// `(1/2 − √2/8)(S − γ₁)(b−a)²`
pub fn bound_first_lower(secant: f64, gamma1: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let d = gap("gamma1", gamma1, "S", secant)?;
    let value = constants().p1_sup * d * iv.length().powi(2);
    Ok(ErrorBound::new(BoundTag::FirstLower, value, 1))
}

/// `(1/2 − √2/8)(Γ₁ − S)(b−a)²`
pub fn bound_first_upper(gamma1_upper: f64, secant: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let d = gap("S", secant, "Gamma1", gamma1_upper)?;
    let value = constants().p1_sup * d * iv.length().powi(2);
    Ok(ErrorBound::new(BoundTag::FirstUpper, value, 1))
}

/// `√(11/96 − √2/16) · σ(f′) · (b−a)^{3/2}`
pub fn bound_gruss_first(sigma_fprime: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let sigma = non_negative("sigma(f')", sigma_fprime)?;
    let value = constants().p1_chebyshev.sqrt() * sigma * iv.length().powf(1.5);
    Ok(ErrorBound::new(BoundTag::GrussFirst, value, 1))
}

/// `(Γ₂−γ₂)/2 · (5√6/96 − 29√3/432) · (b−a)³`, bounding |Q − P|.
pub fn bound_second_range(gamma2: f64, gamma2_upper: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let range = gap("gamma2", gamma2, "Gamma2", gamma2_upper)?;
    let value = 0.5 * range * constants().p2_tilde_l1 * iv.length().powi(3);
    Ok(ErrorBound::new(BoundTag::SecondRange, value, 1))
}

/// `(1/12 − √2/32)(S₁ − γ₂)(b−a)³`, bounding |Q − P|.
pub fn bound_second_lower(fprime_secant: f64, gamma2: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let d = gap("gamma2", gamma2, "S1", fprime_secant)?;
    let value = constants().p2_tilde_sup * d * iv.length().powi(3);
    Ok(ErrorBound::new(BoundTag::SecondLower, value, 1))
}

/// `(1/12 − √2/32)(Γ₂ − S₁)(b−a)³`, bounding |Q − P|.
pub fn bound_second_upper(gamma2_upper: f64, fprime_secant: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let d = gap("S1", fprime_secant, "Gamma2", gamma2_upper)?;
    let value = constants().p2_tilde_sup * d * iv.length().powi(3);
    Ok(ErrorBound::new(BoundTag::SecondUpper, value, 1))
}

/// `√(47/23040 − √2/768) · σ(f″) · (b−a)^{5/2}`, bounding |Q − P|.
pub fn bound_gruss_second(sigma_fsecond: f64, iv: &Interval) -> Result<ErrorBound, BoundError> {
    let sigma = non_negative("sigma(f'')", sigma_fsecond)?;
    let value = constants().p2_chebyshev.sqrt() * sigma * iv.length().powf(2.5);
    Ok(ErrorBound::new(BoundTag::GrussSecond, value, 1))
}

fn rigorous(data: &[&Datum]) -> bool {
    data.iter().all(|d| d.is_rigorous())
}

/// Every bound whose inputs are present in `info`. Inputs that violate a
/// bound's precondition are skipped; `build_info` records them as
/// warnings.
pub fn best_bounds(info: &DerivativeInfo, iv: &Interval) -> Result<Vec<ErrorBound>, BoundError> {
    let mut out = Vec::new();
    let mut push = |res: Result<ErrorBound, BoundError>, inputs: &[&Datum]| {
        if let Ok(b) = res {
            out.push(b.with_rigor(rigorous(inputs)));
        }
    };
    if let Some(m2) = &info.sup_fsecond {
        push(bound_second_sup(m2.value, iv), &[m2]);
    }
    if let (Some(lo), Some(hi)) = (&info.gamma1, &info.gamma1_upper) {
        push(bound_first_range(lo.value, hi.value, iv), &[lo, hi]);
    }
    if let (Some(s), Some(lo)) = (&info.secant, &info.gamma1) {
        push(bound_first_lower(s.value, lo.value, iv), &[s, lo]);
    }
    if let (Some(hi), Some(s)) = (&info.gamma1_upper, &info.secant) {
        push(bound_first_upper(hi.value, s.value, iv), &[hi, s]);
    }
    if let Some(sigma) = &info.sigma_fprime {
        push(bound_gruss_first(sigma.value, iv), &[sigma]);
    }
    if let (Some(lo), Some(hi)) = (&info.gamma2, &info.gamma2_upper) {
        push(bound_second_range(lo.value, hi.value, iv), &[lo, hi]);
    }
    if let (Some(s1), Some(lo)) = (&info.fprime_secant, &info.gamma2) {
        push(bound_second_lower(s1.value, lo.value, iv), &[s1, lo]);
    }
    if let (Some(hi), Some(s1)) = (&info.gamma2_upper, &info.fprime_secant) {
        push(bound_second_upper(hi.value, s1.value, iv), &[hi, s1]);
    }
    if let Some(sigma) = &info.sigma_fsecond {
        push(bound_gruss_second(sigma.value, iv), &[sigma]);
    }
    if out.is_empty() {
        return Err(BoundError::NoApplicableBound);
    }
    Ok(out)
}

/// Smallest bound of the given class, if any.
pub fn tightest(bounds: &[ErrorBound], class: AppliesTo) -> Option<&ErrorBound> {
    bounds
        .iter()
        .filter(|b| b.applies_to == class)
        .min_by(|x, y| x.value.total_cmp(&y.value))
}
