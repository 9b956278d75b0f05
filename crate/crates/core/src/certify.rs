//! Verdicts for the absolute-continuity criteria.
//!
//! Radial projections have `L^p` densities when `dim_{l¹} λ > n − 1/p`; linear
//! projections have continuous densities when `dim_{l¹} λ > n − 1`.

use serde::{Deserialize, Serialize};

use crate::base::{BasePower, SymInt};
use crate::digits::DigitSet;
use crate::dimension::{crude_bound_for, grid_lower_bound, product_bound, rectangle_bound, DimensionBound};
use crate::error::{Error, Result, DEFAULT_BUDGET};
use crate::measure::{MissingDigitsSpec, ProductMeasureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    RadialLp { p_exp: u32 },
    LinearContinuous,
    TheoremA,
    TheoremB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    NotCertified,
    Inconclusive,
}

/// One per-factor bound considered while choosing the best.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub factor: usize,
    pub bound: DimensionBound,
    pub chosen: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub theorem: Theorem,
    pub bound_used: DimensionBound,
    pub threshold: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub candidates: Vec<Candidate>,
    pub notes: Vec<String>,
}

impl CertificateReport {
    fn new(theorem: Theorem, bound: DimensionBound, candidates: Vec<Candidate>, threshold: f64) -> Self {
        let margin = bound.value - threshold;
        let verdict = match (margin > 0.0, bound.rigorous) {
            (true, true) => Verdict::Certified,
            (true, false) => Verdict::Inconclusive,
            (false, _) => Verdict::NotCertified,
        };
        Self { theorem, bound_used: bound, threshold, margin, verdict, candidates, notes: vec![] }
    }

    /// Pretty JSON; identical input gives identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Controls the grid search used for enumerable factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Upper limit on digit-symbol evaluations per grid search.
    pub grid_cost: u64,
    pub budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { grid_cost: 20_000_000, budget: DEFAULT_BUDGET }
    }
}

/// Finest grid step within `grid_cost`, or `None` when the grid would be too coarse to help.
fn grid_step(factor: &MissingDigitsSpec, grid_cost: u64) -> Option<f64> {
    let p = factor.base.exact()?;
    let n = factor.ambient_dim as i32;
    let per_eval = (p as f64).powi(n);
    let per_axis = ((grid_cost as f64 / per_eval).powf(1.0 / n as f64) - 1.0).floor().min(10_000.0);
    (per_axis >= 50.0).then(|| 1.0 / per_axis)
}

/// Every applicable rigorous bound for one factor.
pub fn factor_candidates(factor: &MissingDigitsSpec, opts: &CertifyOptions) -> Vec<DimensionBound> {
    let mut out = Vec::new();
    if let Ok(b) = rectangle_bound(factor) {
        out.push(b);
    }
    if let Ok(b) = crude_bound_for(factor) {
        out.push(b);
    }
    if let Some(h) = grid_step(factor, opts.grid_cost) {
        if let Ok(b) = grid_lower_bound(factor, h, true, opts.budget) {
            out.push(b);
        }
    }
    out
}

/// Best rigorous bound per factor, summed over factors.
pub fn best_bound(spec: &ProductMeasureSpec, opts: &CertifyOptions) -> Result<(DimensionBound, Vec<Candidate>)> {
    let mut chosen = Vec::with_capacity(spec.factors.len());
    let mut candidates = Vec::new();
    for (i, factor) in spec.factors.iter().enumerate() {
        let options = factor_candidates(factor, opts);
        let best = options
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .ok_or_else(|| {
                Error::Unsupported(format!("no dimension bound applies to factor {i} (base {})", factor.base))
            })?;
        chosen.push(options[best].clone());
        candidates.extend(options.into_iter().enumerate().map(|(k, bound)| Candidate { factor: i, bound, chosen: k == best }));
    }
    Ok((product_bound(&chosen), candidates))
}

/// Radial `L^p` criterion: certified when the bound exceeds `n − 1/p`.
///
/// `p = 1` additionally needs `dim_H Π_x(λ) = n − 1`, which is not checked;
/// the report then compares against `n − 1` and stays inconclusive.
pub fn certify_radial_lp(spec: &ProductMeasureSpec, p_exp: u32, opts: &CertifyOptions) -> Result<CertificateReport> {
    if p_exp == 0 {
        return Err(Error::InvalidInput("exponent p must be >= 1".into()));
    }
    let n = spec.total_dim() as f64;
    let (bound, candidates) = best_bound(spec, opts)?;
    let mut report = CertificateReport::new(Theorem::RadialLp { p_exp }, bound, candidates, n - 1.0 / p_exp as f64);
    if p_exp == 1 {
        report.notes.push(format!(
            "L¹ case also needs dim_H Π_x(λ) = n − 1, which is not verified; dim_l1 > n − 1 check: {}",
            if report.margin > 0.0 { "passed" } else { "failed" }
        ));
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report)
}

/// Linear criterion: continuous projection densities when the bound exceeds `n − 1`.
pub fn certify_linear(spec: &ProductMeasureSpec, opts: &CertifyOptions) -> Result<CertificateReport> {
    let n = spec.total_dim() as f64;
    let (bound, candidates) = best_bound(spec, opts)?;
    Ok(CertificateReport::new(Theorem::LinearContinuous, bound, candidates, n - 1.0))
}

/// A named measure with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetCase {
    pub label: String,
    pub spec: ProductMeasureSpec,
    pub report: CertificateReport,
}

/// `λ_{b^e, {1, …, b^k}}` on the line.
fn interval_factor(b: u64, e: u32, k: u32) -> Result<MissingDigitsSpec> {
    let digits = DigitSet::interval(SymInt::Exact(1), SymInt::pow(b, k)?)?;
    MissingDigitsSpec::new(BasePower::new(b, e)?, digits, 1)
}

/// The measures of the two headline examples.
///
/// * `theorem-a`: `λ×λ` with `λ = λ_{10^10000, {1..10^8000}}`; radial `L²` criterion.
/// * `theorem-b`: `λ₁×λ₂` and `λ₁×λ₁` with `λ₁ = λ_{10^10000, {1..10^5005}}`,
///   `λ₂ = λ_{11^10000, {1..11^5005}}`; linear criterion.
pub fn preset(name: &str) -> Result<Vec<PresetCase>> {
    let opts = CertifyOptions::default();
    match name {
        "theorem-a" => {
            let lambda = interval_factor(10, 10_000, 8_000)?;
            let spec = ProductMeasureSpec::power(lambda, 2)?;
            let mut report = certify_radial_lp(&spec, 2, &opts)?;
            report.theorem = Theorem::TheoremA;
            Ok(vec![PresetCase { label: "λ×λ".into(), spec, report }])
        }
        "theorem-b" => {
            let l1 = interval_factor(10, 10_000, 5_005)?;
            let l2 = interval_factor(11, 10_000, 5_005)?;
            [("λ₁×λ₂", vec![l1.clone(), l2]), ("λ₁×λ₁", vec![l1.clone(), l1])]
                .into_iter()
                .map(|(label, factors)| {
                    let spec = ProductMeasureSpec::new(factors)?;
                    let mut report = certify_linear(&spec, &opts)?;
                    report.theorem = Theorem::TheoremB;
                    Ok(PresetCase { label: label.into(), spec, report })
                })
                .collect()
        }
        other => Err(Error::InvalidInput(format!("unknown preset '{other}' (expected theorem-a or theorem-b)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::BoundKind;

    fn cantor2() -> ProductMeasureSpec {
        ProductMeasureSpec::power(MissingDigitsSpec::simple(3, [0, 2]).unwrap(), 2).unwrap()
    }

    #[test]
    fn theorem_a() {
        let cases = preset("theorem-a").unwrap();
        let r = &cases[0].report;
        assert_eq!(r.verdict, Verdict::Certified);
        assert!((r.bound_used.value - 1.599067).abs() < 1e-5);
        assert!((r.margin - 0.099067).abs() < 1e-5);
        assert!(r.candidates.iter().any(|c| c.chosen && c.bound.kind == BoundKind::RectangleBound));
    }

    #[test]
    fn theorem_b() {
        let cases = preset("theorem-b").unwrap();
        assert_eq!(cases.len(), 2);
        assert!((cases[0].report.bound_used.value - 1.000084).abs() < 2e-6);
        assert!((cases[1].report.bound_used.value - 1.000067).abs() < 2e-6);
        assert!(cases.iter().all(|c| c.report.verdict == Verdict::Certified));
    }

    #[test]
    fn unknown_preset() {
        assert!(preset("theorem-c").is_err());
    }

    #[test]
    fn cantor_not_certified() {
        let opts = CertifyOptions::default();
        let r = certify_radial_lp(&cantor2(), 2, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::NotCertified);
        assert!((r.bound_used.value - 0.73814).abs() < 2e-3);
        let l = certify_linear(&cantor2(), &opts).unwrap();
        assert_eq!(l.verdict, Verdict::NotCertified);
        assert_eq!(l.threshold, 1.0);
    }

    #[test]
    fn l1_radial_is_inconclusive() {
        let r = certify_radial_lp(&preset("theorem-a").unwrap()[0].spec, 1, &CertifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.threshold, 1.0);
    }

    #[test]
    fn full_digit_squares() {
        let full = |p: u64| ProductMeasureSpec::power(MissingDigitsSpec::simple(p, 0..p).unwrap(), 2).unwrap();
        let small = certify_radial_lp(&full(10), 2, &CertifyOptions::default()).unwrap();
        assert_eq!(small.verdict, Verdict::NotCertified);
        assert!(small.bound_used.value > 1.2 && small.bound_used.value < 1.5);
        let large = certify_radial_lp(&full(1_000_000), 2, &CertifyOptions::default()).unwrap();
        assert_eq!(large.verdict, Verdict::Certified);
        assert!(large.candidates.iter().any(|c| c.chosen && c.bound.kind == BoundKind::RectangleBound));
    }

    #[test]
    fn deterministic_bytes() {
        let opts = CertifyOptions::default();
        let a = certify_linear(&cantor2(), &opts).unwrap().to_json();
        let b = certify_linear(&cantor2(), &opts).unwrap().to_json();
        assert_eq!(a, b);
    }
}
