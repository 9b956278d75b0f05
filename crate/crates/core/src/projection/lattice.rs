//! Frequency-domain integrals of `|λ̂|` by lattice quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ShellDiagnostics;
use crate::error::{check_budget, Error, Result};
use crate::fourier::FourierEvaluator;
use crate::measure::ProductMeasureSpec;
use crate::par;

fn evaluator(spec: &ProductMeasureSpec, tol: f64) -> Result<FourierEvaluator> {
    let ev = FourierEvaluator::new(spec, tol);
    ev.require_enumerable()?;
    Ok(ev)
}

fn require_plane(spec: &ProductMeasureSpec) -> Result<()> {
    if spec.total_dim() != 2 {
        return Err(Error::Unsupported("this integral is implemented in the plane only".into()));
    }
    Ok(())
}

fn unit(theta: &[f64]) -> Result<[f64; 2]> {
    let len = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if theta.len() != 2 || !(len > 0.0) || !len.is_finite() {
        return Err(Error::InvalidInput("direction must be a nonzero plane vector".into()));
    }
    Ok([theta[0] / len, theta[1] / len])
}

/// Result of [`lp_criterion_integral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpIntegral {
    pub p_exp: u32,
    pub r_max: u64,
    /// Total over `|ξ| ≤ R_max`.
    pub partial: f64,
    /// `∫_{B} |ξ|^{−1/p} dξ` over the unit-volume ball replacing the `ξ = 0` term.
    pub origin_term: f64,
    pub lattice_points: u64,
    pub shells: ShellDiagnostics,
}

/// Volume of the unit ball in `ℝⁿ`.
fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `Σ_{0<|ξ|≤R} |λ̂(ξ)|·|ξ|^{−1/p}` over integer `ξ`, plus the origin cell, split into
/// dyadic shells.
pub fn lp_criterion_integral(
    spec: &ProductMeasureSpec,
    p_exp: u32,
    r_max: u64,
    tol: f64,
    budget: u64,
) -> Result<LpIntegral> {
    if p_exp == 0 {
        return Err(Error::InvalidInput("exponent p must be >= 1".into()));
    }
    if !r_max.is_power_of_two() {
        return Err(Error::InvalidInput(format!("R_max = {r_max} is not a power of two")));
    }
    let n = spec.total_dim();
    let s = 1.0 / p_exp as f64;
    if n as f64 <= s {
        return Err(Error::InvalidInput("|ξ|^{-1/p} is not integrable at the origin for n <= 1/p".into()));
    }
    let r = r_max as i64;
    let side = (2 * r + 1) as f64;
    check_budget(side.powi(n as i32), budget)?;
    let ev = evaluator(spec, tol)?;
    let shells = r_max.trailing_zeros() as usize + 1;
    let r2_max = (r * r) as u64;

    // rows over the first n−1 coordinates; each row bins its last-axis sweep by shell
    let outer = (2 * r + 1) as u64;
    let rows = outer.pow(n as u32 - 1);
    let per_row = par::map_range(rows as usize, |row| {
        let mut xi = vec![0i64; n];
        let mut rest = row as u64;
        for k in (0..n - 1).rev() {
            xi[k] = (rest % outer) as i64 - r;
            rest /= outer;
        }
        let head: u64 = xi[..n - 1].iter().map(|v| (v * v) as u64).sum();
        let mut sums = vec![0.0; shells];
        let mut weights = vec![0.0; shells];
        let mut count = 0u64;
        if head > r2_max {
            return (sums, weights, count);
        }
        let mut point = vec![0.0; n];
        for last in -r..=r {
            let r2 = head + (last * last) as u64;
            if r2 == 0 || r2 > r2_max {
                continue;
            }
            xi[n - 1] = last;
            for (p, &v) in point.iter_mut().zip(&xi) {
                *p = v as f64;
            }
            let radius = (r2 as f64).sqrt();
            let w = radius.powf(-s);
            let k = shell_of_square(r2);
            sums[k] += ev.modulus(&point) * w;
            weights[k] += w;
            count += 1;
        }
        (sums, weights, count)
    });

    let rho = unit_ball_volume(n).recip().powf(1.0 / n as f64);
    let origin_term = n as f64 * unit_ball_volume(n) * rho.powf(n as f64 - s) / (n as f64 - s);
    let mut contributions = Vec::with_capacity(shells);
    let mut floors = Vec::with_capacity(shells);
    for k in 0..shells {
        let c: Vec<f64> = per_row.iter().map(|(sums, _, _)| sums[k]).collect();
        let w: Vec<f64> = per_row.iter().map(|(_, ws, _)| ws[k]).collect();
        let origin = if k == 0 { origin_term } else { 0.0 };
        contributions.push(par::pairwise_sum(&c) + origin);
        floors.push(ev.tol() * par::pairwise_sum(&w));
    }
    let lattice_points = per_row.iter().map(|(_, _, c)| c).sum::<u64>() + 1;
    let partial = par::pairwise_sum(&contributions);
    Ok(LpIntegral {
        p_exp,
        r_max,
        partial,
        origin_term,
        lattice_points,
        shells: ShellDiagnostics::new(contributions, floors),
    })
}

/// Shell index of an integer squared radius: smallest `k` with `r² ≤ 4^k`.
fn shell_of_square(r2: u64) -> usize {
    let mut k = 0;
    while (1u64 << (2 * k)) < r2 {
        k += 1;
    }
    k
}

/// `|λ̂|` on integer points of the annulus `R ≤ |ξ| ≤ 2R`.
struct Annulus {
    points: Vec<([f64; 2], f64, f64)>,
}

impl Annulus {
    fn new(spec: &ProductMeasureSpec, r: f64, tol: f64, budget: u64) -> Result<Self> {
        require_plane(spec)?;
        if !(r >= 2.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!("stripe radius R = {r} must be at least 2")));
        }
        let reach = (2.0 * r).floor() as i64;
        let side = 2 * reach + 1;
        check_budget((side as f64).powi(2), budget)?;
        let ev = evaluator(spec, tol)?;
        let rows = par::map_range(side as usize, |i| {
            let a = i as i64 - reach;
            (-reach..=reach)
                .filter_map(|b| {
                    let xi = [a as f64, b as f64];
                    let radius = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                    (radius >= r && radius <= 2.0 * r).then(|| (xi, radius, ev.modulus(&xi)))
                })
                .collect::<Vec<_>>()
        });
        Ok(Self { points: rows.concat() })
    }

    fn total(&self) -> f64 {
        let v: Vec<f64> = self.points.iter().map(|p| p.2).collect();
        par::pairwise_sum(&v)
    }

    /// Sum over points with `|(θ, ξ/|ξ|)| ≤ 1/R`.
    fn stripe(&self, theta: [f64; 2], r: f64) -> f64 {
        let v: Vec<f64> = self
            .points
            .iter()
            .filter(|(xi, radius, _)| (xi[0] * theta[0] + xi[1] * theta[1]).abs() <= radius / r)
            .map(|p| p.2)
            .collect();
        par::pairwise_sum(&v)
    }
}

/// `Σ |λ̂(ξ)|` over integer `ξ` with `R ≤ |ξ| ≤ 2R` and `ξ/|ξ|` within the stripe
/// `|(θ, θ')| ≤ 1/R` of directions nearly orthogonal to `θ`.
pub fn stripe_integral(spec: &ProductMeasureSpec, theta: &[f64], r: f64, tol: f64, budget: u64) -> Result<f64> {
    let theta = unit(theta)?;
    Ok(Annulus::new(spec, r, tol, budget)?.stripe(theta, r))
}

/// A direction whose stripe integral reaches the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalDirection {
    /// Angle of `θ` in `[0, π)`.
    pub angle: f64,
    pub direction: [f64; 2],
    pub value: f64,
}

/// Stripe integrals over an angle grid and the directions above threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripeScan {
    pub radius: f64,
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    /// `R^{n−1−s₁+2ε}`.
    pub threshold: f64,
    pub annulus_total: f64,
    pub exceptional: Vec<ExceptionalDirection>,
}

impl StripeScan {
    /// `angle,stripe,exceptional` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle[rad],stripe_integral[lattice-sum],exceptional[bool]\n");
        for (a, v) in self.angles.iter().zip(&self.values) {
            out.push_str(&format!("{a:.12e},{v:.12e},{}\n", *v >= self.threshold));
        }
        out
    }
}

/// Directions `θ_k = kπ/count` with stripe integral `≥ R^{n−1−s₁+2ε}`.
pub fn exceptional_directions(
    spec: &ProductMeasureSpec,
    r: f64,
    eps: f64,
    s1: f64,
    angle_count: usize,
    tol: f64,
    budget: u64,
) -> Result<StripeScan> {
    if !(eps > 0.0) || angle_count == 0 {
        return Err(Error::InvalidInput("ε must be positive and the angle grid nonempty".into()));
    }
    let annulus = Annulus::new(spec, r, tol, budget)?;
    check_budget(annulus.points.len() as f64 * angle_count as f64, budget)?;
    let n = spec.total_dim() as f64;
    let threshold = r.powf(n - 1.0 - s1 + 2.0 * eps);
    let angles: Vec<f64> = (0..angle_count).map(|k| k as f64 * PI / angle_count as f64).collect();
    let values = par::map_slice(&angles, |&a| annulus.stripe([a.cos(), a.sin()], r));
    let exceptional = angles
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v >= threshold)
        .map(|(&angle, &value)| ExceptionalDirection { angle, direction: [angle.cos(), angle.sin()], value })
        .collect();
    Ok(StripeScan { radius: r, angles, values, threshold, annulus_total: annulus.total(), exceptional })
}

/// Result of [`slab_integral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabIntegral {
    pub value: f64,
    pub t_max: f64,
    /// Node spacing along the slab.
    pub along_step: f64,
    pub shells: ShellDiagnostics,
}

/// Slab half-width `|(θ, ξ)| ≤ 1/200`.
pub const SLAB_HALF_WIDTH: f64 = 1.0 / 200.0;

/// `∫ |λ̂|` over `{|(θ,ξ)| ≤ 1/200, |ξ| ≤ T}` in the plane.
///
/// The slab is far thinner than the unit lattice, so the quadrature uses a grid
/// aligned with it: spacing 1/2 along `θ^⊥` and a three-point Simpson rule
/// across the width.
pub fn slab_integral(spec: &ProductMeasureSpec, theta: &[f64], t_max: f64, tol: f64, budget: u64) -> Result<SlabIntegral> {
    require_plane(spec)?;
    let theta = unit(theta)?;
    if !(t_max >= 1.0) || !t_max.is_finite() {
        return Err(Error::InvalidInput("T_max must be at least 1".into()));
    }
    let step = 0.5;
    let half = (t_max / step).floor() as i64;
    check_budget(3.0 * (2 * half + 1) as f64, budget)?;
    let ev = evaluator(spec, tol)?;
    let perp = [-theta[1], theta[0]];
    let across = [(-SLAB_HALF_WIDTH, 1.0 / 6.0), (0.0, 4.0 / 6.0), (SLAB_HALF_WIDTH, 1.0 / 6.0)];
    let width = 2.0 * SLAB_HALF_WIDTH;
    let shells = ShellDiagnostics::shell_of(t_max) + 1;
    let nodes = par::map_range((2 * half + 1) as usize, |i| {
        let s = (i as i64 - half) as f64 * step;
        across
            .iter()
            .filter_map(|&(v, w)| {
                let xi = [s * perp[0] + v * theta[0], s * perp[1] + v * theta[1]];
                let radius = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                (radius <= t_max).then(|| {
                    let weight = w * width * step;
                    (ShellDiagnostics::shell_of(radius), ev.modulus(&xi) * weight, weight)
                })
            })
            .collect::<Vec<_>>()
    });
    let mut contributions = vec![Vec::new(); shells];
    let mut floors = vec![0.0; shells];
    for (k, c, w) in nodes.into_iter().flatten() {
        contributions[k].push(c);
        floors[k] += w * ev.tol();
    }
    let contributions: Vec<f64> = contributions.iter().map(|c| par::pairwise_sum(c)).collect();
    let value = par::pairwise_sum(&contributions);
    Ok(SlabIntegral { value, t_max, along_step: step, shells: ShellDiagnostics::new(contributions, floors) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MissingDigitsSpec;

    fn lebesgue2() -> ProductMeasureSpec {
        ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(3, 2).unwrap())
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn square_shells() {
        assert_eq!(shell_of_square(1), 0);
        assert_eq!(shell_of_square(2), 1);
        assert_eq!(shell_of_square(4), 1);
        assert_eq!(shell_of_square(5), 2);
    }

    #[test]
    fn lebesgue_lp_integral_only_origin() {
        let r = lp_criterion_integral(&lebesgue2(), 2, 16, 1e-12, 1 << 20).unwrap();
        assert!((r.partial - r.origin_term).abs() < 1e-9);
        assert!(r.shells.slopes[0].unwrap() < -20.0);
        assert_eq!(r.shells.convergence, super::super::Convergence::Convergent);
    }

    #[test]
    fn lebesgue_stripe_vanishes() {
        let v = stripe_integral(&lebesgue2(), &[1.0, 0.0], 8.0, 1e-12, 1 << 20).unwrap();
        assert!(v < 1e-9);
    }

    #[test]
    fn slab_monotone_in_t() {
        let cantor = ProductMeasureSpec::power(MissingDigitsSpec::simple(3, [0, 2]).unwrap(), 2).unwrap();
        let a = slab_integral(&cantor, &[1.0f64.cos(), 1.0f64.sin()], 16.0, 1e-10, 1 << 20).unwrap();
        let b = slab_integral(&cantor, &[1.0f64.cos(), 1.0f64.sin()], 32.0, 1e-10, 1 << 20).unwrap();
        assert!(b.value >= a.value);
    }
}
