//! Lower bounds for the l¹ Fourier dimension.
//!
//! All bounds come from `f(θ) = Σ_{i∈{0..p−1}^n} |g((i+θ)/p)|`: lattice sums of
//! `|λ̂|` over `p^k`-periods are at most `(sup f)^k`, hence
//! `dim_{l¹} ≥ n − log sup f / log p`. The crude and rectangle bounds replace
//! `sup f` by closed-form estimates and work for symbolic bases.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base::BasePower;
use crate::error::{check_budget, Error, Result};
use crate::fourier::{FactorSymbol, FourierEvaluator};
use crate::measure::{MissingDigitsSpec, ProductMeasureSpec};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    GridSup,
    CrudeBound,
    RectangleBound,
    L2Exact,
    ProductSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionBound {
    pub value: f64,
    pub kind: BoundKind,
    pub rigorous: bool,
    pub details: BTreeMap<String, Value>,
}

impl DimensionBound {
    /// Clamps `raw` into `[0, n]`; a clamp is recorded in `details`.
    fn clamped(raw: f64, n: f64, kind: BoundKind, rigorous: bool, mut details: BTreeMap<String, Value>) -> Self {
        let value = raw.clamp(0.0, n);
        if value != raw {
            details.insert("clamped_from".into(), json!(raw));
        }
        details.insert("raw".into(), json!(raw));
        Self { value, kind, rigorous, details }
    }

    pub fn was_clamped(&self) -> bool {
        self.details.contains_key("clamped_from")
    }
}

fn factor_dims(factor: &MissingDigitsSpec) -> Result<(u64, usize)> {
    Ok((factor.base.require_exact()?, factor.ambient_dim))
}

/// `f(θ)` as an exact finite sum of `p^n` digit-symbol moduli.
pub fn f_theta(factor: &MissingDigitsSpec, theta: &[f64]) -> Result<f64> {
    let (p, n) = factor_dims(factor)?;
    if theta.len() != n {
        return Err(Error::InvalidInput("θ dimension mismatch".into()));
    }
    check_budget((p as f64).powi(n as i32), crate::error::DEFAULT_BUDGET)?;
    let sym = FactorSymbol::new(factor);
    Ok(f_with(&sym, p, n, theta))
}

fn f_with(sym: &FactorSymbol, p: u64, n: usize, theta: &[f64]) -> f64 {
    let pf = p as f64;
    let total = (p as usize).pow(n as u32);
    let mut idx = vec![0u64; n];
    let mut eta = vec![0.0; n];
    let mut sum = 0.0;
    for _ in 0..total {
        for k in 0..n {
            eta[k] = (idx[k] as f64 + theta[k]) / pf;
        }
        sum += sym.eval(&eta).map(|g| g.norm()).unwrap_or(1.0);
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < p {
                break;
            }
            idx[k] = 0;
        }
    }
    sum
}

/// Result of maximizing `f` over `[0,1]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    /// Largest value of `f` found (grid plus golden-section refinement).
    pub sup_estimate: f64,
    /// Grid maximum plus the Lipschitz margin; at least the true supremum.
    pub certified_upper: f64,
    pub argmax: Vec<f64>,
    pub grid_step: f64,
    pub lipschitz: f64,
    pub grid_points: u64,
}

/// Maximizes `f` on a uniform grid with spacing at most `h`, refines the ten
/// best cells by golden-section search, and certifies with the Lipschitz
/// constant `p^n · 2πM/p`.
pub fn sup_f(factor: &MissingDigitsSpec, h: f64, budget: u64) -> Result<SupEstimate> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("grid step must be positive".into()));
    }
    let (p, n) = factor_dims(factor)?;
    let per_axis = (1.0 / h).ceil().max(1.0) as u64;
    let step = 1.0 / per_axis as f64;
    let axis_points = per_axis + 1;
    let grid_points = (axis_points as f64).powi(n as i32);
    check_budget(grid_points * (p as f64).powi(n as i32), budget)?;
    let grid_points = grid_points as u64;

    let sym = FactorSymbol::new(factor);
    let point = |flat: u64| -> Vec<f64> {
        let mut rest = flat;
        let mut th = vec![0.0; n];
        for k in (0..n).rev() {
            th[k] = (rest % axis_points) as f64 * step;
            rest /= axis_points;
        }
        th
    };
    let values = par::map_range(grid_points as usize, |i| f_with(&sym, p, n, &point(i as u64)));

    // ten best cells, ties broken toward the lexicographically smallest θ
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let grid_max = values[order[0]];
    let mut best = (grid_max, point(order[0] as u64));
    let refined = par::map_slice(&order[..order.len().min(10)], |&i| {
        refine(|t: &[f64]| f_with(&sym, p, n, t), point(i as u64), step)
    });
    for (v, t) in refined {
        if v > best.0 {
            best = (v, t);
        }
    }

    let ln_m = factor.ln_max_digit_norm();
    let max_norm = if ln_m == f64::NEG_INFINITY { 0.0 } else { ln_m.exp() };
    let lipschitz = (p as f64).powi(n as i32) * std::f64::consts::TAU * max_norm / p as f64;
    let certified_upper = (grid_max + lipschitz * step * (n as f64).sqrt() / 2.0).max(best.0);
    Ok(SupEstimate {
        sup_estimate: best.0,
        certified_upper,
        argmax: best.1,
        grid_step: step,
        lipschitz,
        grid_points,
    })
}

/// Coordinate-wise golden-section ascent within one grid cell of `start`.
fn refine(f: impl Fn(&[f64]) -> f64, start: Vec<f64>, step: f64) -> (f64, Vec<f64>) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x = start;
    let mut fx = f(&x);
    for _sweep in 0..2 {
        for k in 0..x.len() {
            let (mut a, mut b) = (x[k] - step, x[k] + step);
            let mut probe = x.clone();
            let eval = |t: f64, probe: &mut Vec<f64>| {
                probe[k] = t;
                f(probe)
            };
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let mut fc = eval(c, &mut probe);
            let mut fd = eval(d, &mut probe);
            for _ in 0..40 {
                if fc >= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = eval(c, &mut probe);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = eval(d, &mut probe);
                }
            }
            let t = 0.5 * (a + b);
            let ft = eval(t, &mut probe);
            if ft > fx {
                x[k] = t;
                fx = ft;
            }
        }
    }
    (fx, x)
}

/// `n − log sup f / log p` from [`sup_f`]. With `rigorous` the certified
/// upper value is used, otherwise the plain estimate.
pub fn grid_lower_bound(factor: &MissingDigitsSpec, h: f64, rigorous: bool, budget: u64) -> Result<DimensionBound> {
    let est = sup_f(factor, h, budget)?;
    let p = factor.base.log_value();
    let sup = if rigorous { est.certified_upper } else { est.sup_estimate };
    let n = factor.ambient_dim as f64;
    let details = BTreeMap::from([
        ("grid_step".to_string(), json!(est.grid_step)),
        ("grid_points".to_string(), json!(est.grid_points)),
        ("lipschitz".to_string(), json!(est.lipschitz)),
        ("sup_estimate".to_string(), json!(est.sup_estimate)),
        ("certified_upper".to_string(), json!(est.certified_upper)),
        ("argmax".to_string(), json!(est.argmax)),
    ]);
    Ok(DimensionBound::clamped(n - sup.ln() / p, n, BoundKind::GridSup, rigorous, details))
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn require_p_at_least_4(p: &BasePower) -> Result<()> {
    if p.exact().is_some_and(|v| v < 4) {
        return Err(Error::InvalidInput(format!("closed-form bounds need p >= 4, got {p}")));
    }
    Ok(())
}

/// Crude bound `n − log((t p^n + (2p log p)^n)/(p^n − t))/log p` for `#D = p^n − t`.
pub fn crude_bound(n: usize, p: &BasePower, t: u64) -> Result<DimensionBound> {
    let ln_p = p.log_value();
    let nf = n as f64;
    let ln_pn = nf * ln_p;
    let ln_t = (t as f64).ln();
    if ln_t >= ln_pn - 1e-12 {
        if let Some(pn) = p.exact().and_then(|v| v.checked_pow(n as u32)) {
            if t >= pn {
                return Err(Error::InvalidInput(format!("t = {t} leaves no digits (p^n = {pn})")));
            }
        } else {
            return Err(Error::InvalidInput(format!("t = {t} is not below p^n")));
        }
    }
    // ln(p^n − t) = n ln p + ln(1 − t p^{-n})
    let ln_card = ln_pn + (-(ln_t - ln_pn).exp()).ln_1p();
    crude_from_card(n, p, ln_card, Some(t))
}

/// Crude bound with `#D` given in log form; `t = p^n − #D`.
pub fn crude_bound_for(factor: &MissingDigitsSpec) -> Result<DimensionBound> {
    crude_from_card(factor.ambient_dim, &factor.base, factor.digits.ln_cardinality(), None)
}

fn crude_from_card(n: usize, p: &BasePower, ln_card: f64, t: Option<u64>) -> Result<DimensionBound> {
    require_p_at_least_4(p)?;
    let ln_p = p.log_value();
    let nf = n as f64;
    let ln_pn = nf * ln_p;
    // ln t = n ln p + ln(1 − #D/p^n)
    let ln_t = match t {
        Some(t) => (t as f64).ln(),
        None => ln_pn + (-(ln_card - ln_pn).exp_m1()).max(0.0).ln(),
    };
    let ln_numer = log_add(ln_t + ln_pn, nf * (2.0f64.ln() + ln_p + ln_p.ln()));
    let raw = nf - (ln_numer - ln_card) / ln_p;
    let details = BTreeMap::from([
        ("ln_t".to_string(), json!(if ln_t.is_finite() { Some(ln_t) } else { None })),
        ("ln_card".to_string(), json!(ln_card)),
        ("ln_p".to_string(), json!(ln_p)),
    ]);
    Ok(DimensionBound::clamped(raw, nf, BoundKind::CrudeBound, true, details))
}

/// `dim_H − n·ln(2 ln p)/ln p` for rectangle digit sets.
pub fn rectangle_bound(factor: &MissingDigitsSpec) -> Result<DimensionBound> {
    if !factor.digits.is_rectangle() {
        return Err(Error::InvalidInput("rectangle bound needs a rectangle digit set".into()));
    }
    require_p_at_least_4(&factor.base)?;
    let ln_p = factor.base.log_value();
    let n = factor.ambient_dim as f64;
    let dim_h = factor.hausdorff_dim();
    let penalty = n * (2.0 * ln_p).ln() / ln_p;
    let details = BTreeMap::from([
        ("hausdorff_dim".to_string(), json!(dim_h)),
        ("penalty".to_string(), json!(penalty)),
        ("ln_p".to_string(), json!(ln_p)),
    ]);
    Ok(DimensionBound::clamped(dim_h - penalty, n, BoundKind::RectangleBound, true, details))
}

/// Sum of per-factor bounds (products of measures add their l¹ dimensions).
pub fn product_bound(bounds: &[DimensionBound]) -> DimensionBound {
    if bounds.len() == 1 {
        return bounds[0].clone();
    }
    let value = bounds.iter().map(|b| b.value).sum();
    let rigorous = bounds.iter().all(|b| b.rigorous);
    let parts: Vec<Value> = bounds.iter().map(|b| json!({"kind": b.kind, "value": b.value})).collect();
    DimensionBound {
        value,
        kind: BoundKind::ProductSum,
        rigorous,
        details: BTreeMap::from([("factors".to_string(), Value::Array(parts))]),
    }
}

/// `dim_{l²} = dim_H` for these AD-regular measures.
pub fn l2_dimension(spec: &ProductMeasureSpec) -> DimensionBound {
    DimensionBound {
        value: spec.hausdorff_dim(),
        kind: BoundKind::L2Exact,
        rigorous: true,
        details: BTreeMap::new(),
    }
}

/// Which integer window each coordinate of `ξ` ranges over in [`partial_sum_s_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeWindow {
    /// `ξ_i ∈ {0, …, p^k − 1}`: one full period, where `S_k ≤ (sup f)^k` holds.
    Period,
    /// `|ξ_i| < p^k`; covers two periods, so only `S_k ≤ 2^n (sup f)^k` is guaranteed.
    Symmetric,
}

/// `Σ_ξ |λ̂(ξ + θ)|` over the lattice window of radius `p^k` (per factor base).
pub fn partial_sum_s_k(
    spec: &ProductMeasureSpec,
    theta: &[f64],
    k: u32,
    window: LatticeWindow,
    tol: f64,
    budget: u64,
) -> Result<f64> {
    let n = spec.total_dim();
    if theta.len() != n {
        return Err(Error::InvalidInput("θ dimension mismatch".into()));
    }
    let mut ranges = Vec::with_capacity(n);
    for f in &spec.factors {
        let p = f.base.require_exact()?;
        let radius = p
            .checked_pow(k)
            .ok_or(Error::Budget { needed: (p as f64).powi(k as i32), budget })?
            as i64;
        let (lo, hi) = match window {
            LatticeWindow::Period => (0, radius - 1),
            LatticeWindow::Symmetric => (1 - radius, radius - 1),
        };
        ranges.extend(std::iter::repeat_n((lo, hi), f.ambient_dim));
    }
    let total: f64 = ranges.iter().map(|(a, b)| (b - a + 1) as f64).product();
    check_budget(total, budget)?;
    let ev = FourierEvaluator::new(spec, tol);
    ev.require_enumerable()?;
    let sum = lattice_sum(&ranges, |xi| {
        let shifted: Vec<f64> = xi.iter().zip(theta).map(|(&x, &t)| x as f64 + t).collect();
        ev.modulus(&shifted)
    });
    Ok(sum)
}

/// Deterministic parallel sum of `f` over an integer box; rows along the last axis.
pub(crate) fn lattice_sum(ranges: &[(i64, i64)], f: impl Fn(&[i64]) -> f64 + Sync + Send) -> f64 {
    let n = ranges.len();
    let (last_lo, last_hi) = ranges[n - 1];
    let outer: Vec<u64> = ranges[..n - 1].iter().map(|(a, b)| (b - a + 1) as u64).collect();
    let rows: u64 = outer.iter().product();
    let row_sums = par::map_range(rows as usize, |r| {
        let mut rest = r as u64;
        let mut xi = vec![0i64; n];
        for k in (0..n - 1).rev() {
            xi[k] = ranges[k].0 + (rest % outer[k]) as i64;
            rest /= outer[k];
        }
        let vals: Vec<f64> = (last_lo..=last_hi)
            .map(|x| {
                xi[n - 1] = x;
                f(&xi)
            })
            .collect();
        par::pairwise_sum(&vals)
    });
    par::pairwise_sum(&row_sums)
}
