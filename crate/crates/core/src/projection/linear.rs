//! Orthogonal projections `y ↦ (θ, y)` onto a line.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde_json::json;

use super::radial::{box_kernel, sample_depth};
use super::{linspace, trapezoid, Convergence, DensityProfile, ProfileAxis, ProfileFlag, ProfileMethod, ShellDiagnostics};
use crate::error::{check_budget, Error, Result};
use crate::fourier::FourierEvaluator;
use crate::measure::{sample, ProductMeasureSpec};
use crate::par;

fn unit(spec: &ProductMeasureSpec, theta: &[f64]) -> Result<Vec<f64>> {
    if spec.total_dim() != 2 {
        return Err(Error::Unsupported("linear projection densities are implemented in the plane only".into()));
    }
    let len = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if theta.len() != 2 || !(len > 0.0) || !len.is_finite() {
        return Err(Error::InvalidInput("direction must be a nonzero plane vector".into()));
    }
    Ok(theta.iter().map(|v| v / len).collect())
}

/// Interval containing `(θ, y)` for every `y` in the support hull.
fn projected_span(spec: &ProductMeasureSpec, theta: &[f64]) -> (f64, f64) {
    spec.support_hull().iter().zip(theta).fold((0.0, 0.0), |(a, b), (&(lo, hi), &t)| {
        (a + (lo * t).min(hi * t), b + (lo * t).max(hi * t))
    })
}

/// `points` offsets covering the projected support plus 10% on each side.
pub fn default_u_grid(spec: &ProductMeasureSpec, theta: &[f64], points: usize) -> Result<Vec<f64>> {
    let theta = unit(spec, theta)?;
    let (a, b) = projected_span(spec, &theta);
    let margin = 0.1 * (b - a).max(0.5);
    Ok(linspace(a - margin, b + margin, points.max(2)))
}

/// Density of `P_θ(λ)` by Fourier inversion of `t ↦ λ̂(tθ)` over `|t| ≤ T`.
pub fn linear_density(
    spec: &ProductMeasureSpec,
    theta: &[f64],
    u_grid: &[f64],
    t_max: f64,
    tol: f64,
    budget: u64,
) -> Result<DensityProfile> {
    linear_density_smoothed(spec, theta, u_grid, t_max, tol, None, budget)
}

/// As [`linear_density`], optionally convolved with the box kernel of
/// half-width `bandwidth` (multiplier `sin(2πht)/(2πht)`), which is what
/// [`linear_density_mc`] estimates.
pub fn linear_density_smoothed(
    spec: &ProductMeasureSpec,
    theta: &[f64],
    u_grid: &[f64],
    t_max: f64,
    tol: f64,
    bandwidth: Option<f64>,
    budget: u64,
) -> Result<DensityProfile> {
    let theta = unit(spec, theta)?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidInput("T_max must be positive".into()));
    }
    check_grid(u_grid)?;
    if bandwidth.is_some_and(|h| !(h > 0.0)) {
        return Err(Error::InvalidInput("bandwidth must be positive".into()));
    }
    let (a, b) = projected_span(spec, &theta);
    // node spacing keeps the aliasing period 1/dt at four support widths
    let dt = 1.0 / (4.0 * (b - a).max(0.25));
    let half = (t_max / dt).ceil() as i64;
    let nodes = (2 * half + 1) as usize;
    check_budget(nodes as f64 * (u_grid.len() as f64 + 1.0), budget)?;
    let ev = FourierEvaluator::new(spec, tol);
    ev.require_enumerable()?;

    let hat = par::map_range(nodes, |i| {
        let t = (i as i64 - half) as f64 * dt;
        let v = ev.eval(&[t * theta[0], t * theta[1]]).map(|v| v.value)?;
        let smooth = match bandwidth {
            Some(h) if t != 0.0 => (TAU * h * t).sin() / (TAU * h * t),
            _ => 1.0,
        };
        let w = if i == 0 || i == nodes - 1 { 0.5 * dt } else { dt };
        Ok((t, v, v * (smooth * w)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let inverted = par::map_slice(u_grid, |&u| {
        let terms: Vec<Complex64> = hat
            .iter()
            .map(|&(t, _, wv)| wv * Complex64::from_polar(1.0, TAU * u * t))
            .collect();
        let re: Vec<f64> = terms.iter().map(|c| c.re).collect();
        let im: Vec<f64> = terms.iter().map(|c| c.im).collect();
        (par::pairwise_sum(&re), par::pairwise_sum(&im))
    });
    let values: Vec<f64> = inverted.iter().map(|v| v.0).collect();
    let imag: Vec<f64> = inverted.iter().map(|v| v.1.abs()).collect();
    let residue = trapezoid(u_grid, &imag);

    // growth of ∫|λ̂(tθ)| dt over complete dyadic shells of t ≥ 0
    let shells = t_max.max(1.0).log2().floor() as usize + 1;
    let mut contributions = vec![Vec::new(); shells];
    let mut floors = vec![0.0; shells];
    for &(t, v, _) in hat.iter().filter(|h| h.0 >= 0.0) {
        let k = ShellDiagnostics::shell_of(t);
        if k < shells {
            contributions[k].push(v.norm() * dt);
            floors[k] += ev.tol() * dt;
        }
    }
    let diagnostics = ShellDiagnostics::new(contributions.iter().map(|c| par::pairwise_sum(c)).collect(), floors);

    let mut flags = Vec::new();
    if diagnostics.convergence == Convergence::NonConvergent {
        flags.push(ProfileFlag::NonConvergent);
    }
    if residue > 10.0 * ev.tol() {
        flags.push(ProfileFlag::ImaginaryResidue);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -ev.tol() {
        flags.push(ProfileFlag::NegativeDip);
    }
    let metadata = BTreeMap::from([
        ("direction".to_string(), json!(theta)),
        ("t_max".to_string(), json!(t_max)),
        ("dt".to_string(), json!(dt)),
        ("nodes".to_string(), json!(nodes)),
        ("tol".to_string(), json!(ev.tol())),
        ("bandwidth".to_string(), json!(bandwidth)),
        ("imaginary_residue".to_string(), json!(residue)),
        ("min_value".to_string(), json!(min)),
        ("shells".to_string(), json!(diagnostics)),
    ]);
    let mut profile = DensityProfile {
        axis: ProfileAxis::OffsetOnLine,
        grid: u_grid.to_vec(),
        values,
        method: ProfileMethod::FourierInversion,
        flags,
        metadata,
    };
    profile.check_mass();
    Ok(profile)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must have at least two strictly increasing points".into()));
    }
    Ok(())
}

/// Box-kernel estimate `#{|(θ,y_i) − u| ≤ h}/(2hN)` from `samples` points.
pub fn linear_density_mc(
    spec: &ProductMeasureSpec,
    theta: &[f64],
    u_grid: &[f64],
    samples: usize,
    bandwidth: f64,
    seed: u64,
) -> Result<DensityProfile> {
    let theta = unit(spec, theta)?;
    check_grid(u_grid)?;
    if !(bandwidth > 0.0) || samples == 0 {
        return Err(Error::InvalidInput("bandwidth and sample count must be positive".into()));
    }
    let depth = sample_depth(spec);
    let points = sample(spec, depth, samples, seed)?;
    let mut proj = par::map_slice(&points, |y| y[0] * theta[0] + y[1] * theta[1]);
    proj.sort_by(f64::total_cmp);
    let values = box_kernel(&proj, u_grid, bandwidth);
    let metadata = BTreeMap::from([
        ("direction".to_string(), json!(theta)),
        ("samples".to_string(), json!(samples)),
        ("bandwidth".to_string(), json!(bandwidth)),
        ("kernel".to_string(), json!("box")),
        ("seed".to_string(), json!(seed)),
        ("sample_depth".to_string(), json!(depth)),
    ]);
    let mut profile = DensityProfile {
        axis: ProfileAxis::OffsetOnLine,
        grid: u_grid.to_vec(),
        values,
        method: ProfileMethod::MonteCarlo,
        flags: vec![],
        metadata,
    };
    profile.check_mass();
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MissingDigitsSpec;

    fn triangle(u: f64) -> f64 {
        let s = 2f64.sqrt();
        (s - 2.0 * (u - s / 2.0).abs()).max(0.0)
    }

    #[test]
    fn triangle_oracle_has_unit_mass() {
        let g = linspace(-0.5, 2.0, 5001);
        let v: Vec<f64> = g.iter().map(|&u| triangle(u)).collect();
        assert!((trapezoid(&g, &v) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lebesgue_diagonal_is_triangular() {
        let spec = ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(2, 2).unwrap());
        let d = [1.0, 1.0];
        let grid = default_u_grid(&spec, &d, 401).unwrap();
        let p = linear_density(&spec, &d, &grid, 128.0, 1e-10, 1 << 30).unwrap();
        assert!(p.l1_distance_to(triangle) < 0.03, "{}", p.l1_distance_to(triangle));
        assert!((p.mass() - 1.0).abs() < 0.02);
        assert!(!p.has_flag(ProfileFlag::NonConvergent));
    }

    #[test]
    fn atom_mc_is_a_spike() {
        let atom = ProductMeasureSpec::power(MissingDigitsSpec::simple(3, [2]).unwrap(), 2).unwrap();
        let grid = linspace(0.0, 2.0, 801);
        let p = linear_density_mc(&atom, &[1.0, 0.0], &grid, 500, 0.01, 3).unwrap();
        let support: Vec<f64> = p.grid.iter().zip(&p.values).filter(|(_, v)| **v > 0.0).map(|(g, _)| *g).collect();
        assert!(support.iter().all(|g| (g - 1.0).abs() <= 0.01 + 1e-12));
        assert!((p.mass() - 1.0).abs() < 0.02);
    }
}
