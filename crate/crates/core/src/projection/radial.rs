//! Radial projections `Π_x(y) = (y−x)/|y−x|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{linspace, trapezoid, DensityProfile, ProfileAxis, ProfileMethod};
use crate::error::{Error, Result};
use crate::geometry::{Region, TubeSpec};
use crate::measure::{cylinder_mass_with, sample, Alphabet, MassInterval, ProductMeasureSpec};
use crate::par;

/// Euclidean distance from `x` to the box `hull`.
pub(crate) fn distance_to_box(x: &[f64], hull: &[(f64, f64)]) -> f64 {
    x.iter()
        .zip(hull)
        .map(|(&v, &(lo, hi))| {
            let d = (lo - v).max(v - hi).max(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn require_viewpoint(spec: &ProductMeasureSpec, x: &[f64], margin: f64) -> Result<()> {
    if x.len() != spec.total_dim() {
        return Err(Error::InvalidInput(format!(
            "viewpoint has {} coordinates, measure has {}",
            x.len(),
            spec.total_dim()
        )));
    }
    let d = distance_to_box(x, &spec.support_hull());
    if d < margin {
        return Err(Error::InvalidInput(format!(
            "viewpoint is {d:.3e} from the support hull; needs at least {margin:.3e}"
        )));
    }
    Ok(())
}

/// Depth at which every factor's cells are at most `δ/4` wide.
fn auto_depth(spec: &ProductMeasureSpec, delta: f64) -> usize {
    spec.factors
        .iter()
        .map(|f| ((4.0 / delta).ln() / f.base.log_value()).ceil().max(1.0) as usize)
        .max()
        .unwrap_or(1)
}

/// `f_δ(θ) = λ(T)/δ^{n−1}` as an enclosure from depth-`m` cylinders.
pub fn radial_tube_density(spec: &ProductMeasureSpec, tube: &TubeSpec, depth: usize, budget: u64) -> Result<MassInterval> {
    require_viewpoint(spec, &tube.center, tube.half_width)?;
    let alphabet = Alphabet::new(spec, budget)?;
    tube_density_with(&alphabet, tube, depth, budget)
}

fn tube_density_with(alphabet: &Alphabet, tube: &TubeSpec, depth: usize, budget: u64) -> Result<MassInterval> {
    let norm = tube.half_width.powi(tube.dim() as i32 - 1);
    let mass = cylinder_mass_with(alphabet, &Region::Tube(tube.clone()), depth, budget)?;
    Ok(mass.scale(1.0 / norm))
}

/// Angular window `[lo, hi]` (radians, unwrapped around the hull centre) that
/// contains every direction from `x` into the padded hull.
pub(crate) fn sector(x: &[f64], hull: &[(f64, f64)], pad: f64) -> Result<(f64, f64)> {
    let centre = [0.5 * (hull[0].0 + hull[0].1) - x[0], 0.5 * (hull[1].0 + hull[1].1) - x[1]];
    let reference = centre[1].atan2(centre[0]);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for cx in [hull[0].0, hull[0].1] {
        for cy in [hull[1].0, hull[1].1] {
            let a = unwrap((cy - x[1]).atan2(cx - x[0]), reference);
            lo = lo.min(a);
            hi = hi.max(a);
        }
    }
    let (lo, hi) = (lo - pad, hi + pad);
    if hi - lo >= PI {
        return Err(Error::InvalidInput("viewpoint sees the support over a half-plane or more".into()));
    }
    Ok((lo, hi))
}

/// `a` shifted by a multiple of 2π into `(reference − π, reference + π]`.
pub(crate) fn unwrap(a: f64, reference: f64) -> f64 {
    let mut d = (a - reference) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    reference + d
}

/// `∫ f_δ(θ)² dθ` over the directions that see the support (plane only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialL2 {
    /// Trapezoidal quadrature of squared enclosure midpoints.
    pub value: f64,
    /// Same quadrature with lower and upper enclosure ends.
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    pub profile: DensityProfile,
}

/// Tube densities on an angle grid with spacing at most `δ/(2·d_max)`, and the
/// quadrature of their squares.
pub fn radial_l2_norm(
    spec: &ProductMeasureSpec,
    x: &[f64],
    delta: f64,
    angle_grid_count: usize,
    budget: u64,
) -> Result<RadialL2> {
    if spec.total_dim() != 2 {
        return Err(Error::Unsupported("radial L² norms are implemented in the plane only".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("δ must be positive".into()));
    }
    require_viewpoint(spec, x, delta)?;
    let hull = spec.support_hull();
    let d_min = distance_to_box(x, &hull);
    let d_max = [hull[0].0, hull[0].1]
        .iter()
        .flat_map(|&cx| [hull[1].0, hull[1].1].map(|cy| ((cx - x[0]).powi(2) + (cy - x[1]).powi(2)).sqrt()))
        .fold(0.0, f64::max);
    let (lo, hi) = sector(x, &hull, (delta / d_min).min(1.0).asin())?;
    let spacing = delta / (2.0 * d_max.max(delta));
    let count = angle_grid_count.max(((hi - lo) / spacing).ceil() as usize + 1).max(2);
    let angles = linspace(lo, hi, count);
    let depth = auto_depth(spec, delta);
    let alphabet = Alphabet::new(spec, budget)?;
    let densities = par::map_slice(&angles, |&phi| {
        let tube = TubeSpec::planar([x[0], x[1]], phi, delta)?;
        tube_density_with(&alphabet, &tube, depth, budget)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let sq = |f: fn(&MassInterval) -> f64| -> f64 {
        let v: Vec<f64> = densities.iter().map(|m| f(m).powi(2)).collect();
        trapezoid(&angles, &v)
    };
    let value = sq(|m| m.midpoint());
    let lower = sq(|m| m.lower);
    let upper = sq(|m| m.upper);
    let metadata = BTreeMap::from([
        ("viewpoint".to_string(), json!(x)),
        ("delta".to_string(), json!(delta)),
        ("depth".to_string(), json!(depth)),
        ("angles".to_string(), json!(count)),
        ("lower".to_string(), json!(densities.iter().map(|m| m.lower).collect::<Vec<_>>())),
        ("upper".to_string(), json!(densities.iter().map(|m| m.upper).collect::<Vec<_>>())),
    ]);
    let profile = DensityProfile {
        axis: ProfileAxis::AngleOnSphere,
        grid: angles,
        values: densities.iter().map(|m| m.midpoint()).collect(),
        method: ProfileMethod::TubeCount,
        flags: vec![],
        metadata,
    };
    Ok(RadialL2 { value, lower, upper, depth, profile })
}

/// Sampling depth at which every factor's digits resolve below `2^{-40}`.
pub(crate) fn sample_depth(spec: &ProductMeasureSpec) -> usize {
    spec.factors
        .iter()
        .map(|f| (40.0 * 2f64.ln() / f.base.log_value()).ceil().max(1.0) as usize)
        .max()
        .unwrap_or(1)
}

/// Box-kernel estimate `#{|s_i − g| ≤ h} / (2hN)` at each grid point; `sorted` ascending.
pub(crate) fn box_kernel(sorted: &[f64], grid: &[f64], h: f64) -> Vec<f64> {
    let scale = 1.0 / (2.0 * h * sorted.len() as f64);
    par::map_slice(grid, |&g| {
        let a = sorted.partition_point(|&s| s < g - h);
        let b = sorted.partition_point(|&s| s <= g + h);
        (b - a) as f64 * scale
    })
}

/// Monte Carlo density of `Π_x(λ)` in the angle `φ` (plane only).
///
/// Box kernel of half-width `bandwidth`; the profile is renormalized to unit
/// mass and the raw mass recorded as `raw_mass`.
pub fn radial_density_mc(
    spec: &ProductMeasureSpec,
    x: &[f64],
    samples: usize,
    bandwidth: f64,
    seed: u64,
    grid_points: Option<usize>,
) -> Result<DensityProfile> {
    if spec.total_dim() != 2 {
        return Err(Error::Unsupported("radial densities are implemented in the plane only".into()));
    }
    if !(bandwidth > 0.0) || samples == 0 {
        return Err(Error::InvalidInput("bandwidth and sample count must be positive".into()));
    }
    require_viewpoint(spec, x, 0.0)?;
    let hull = spec.support_hull();
    if distance_to_box(x, &hull) == 0.0 {
        return Err(Error::InvalidInput("viewpoint lies on the support hull".into()));
    }
    let (lo, hi) = sector(x, &hull, bandwidth)?;
    let reference = 0.5 * (lo + hi);
    let depth = sample_depth(spec);
    let points = sample(spec, depth, samples, seed)?;
    let mut angles: Vec<f64> =
        par::map_slice(&points, |y| unwrap((y[1] - x[1]).atan2(y[0] - x[0]), reference));
    angles.sort_by(f64::total_cmp);
    let count = grid_points.unwrap_or(((hi - lo) / (0.5 * bandwidth)).ceil() as usize + 1).max(2);
    let grid = linspace(lo, hi, count);
    let mut values = box_kernel(&angles, &grid, bandwidth);
    let raw_mass = trapezoid(&grid, &values);
    if raw_mass > 0.0 {
        values.iter_mut().for_each(|v| *v /= raw_mass);
    }
    let metadata = BTreeMap::from([
        ("viewpoint".to_string(), json!(x)),
        ("samples".to_string(), json!(samples)),
        ("bandwidth".to_string(), json!(bandwidth)),
        ("kernel".to_string(), json!("box")),
        ("seed".to_string(), json!(seed)),
        ("sample_depth".to_string(), json!(depth)),
        ("raw_mass".to_string(), json!(raw_mass)),
    ]);
    let mut profile = DensityProfile {
        axis: ProfileAxis::AngleOnSphere,
        grid,
        values,
        method: ProfileMethod::MonteCarlo,
        flags: vec![],
        metadata,
    };
    profile.check_mass();
    Ok(profile)
}

/// Monte Carlo tube mass with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McMass {
    pub mass: f64,
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Fraction of sampled points inside `tube`.
pub fn tube_mass_mc(spec: &ProductMeasureSpec, tube: &TubeSpec, samples: usize, seed: u64) -> Result<McMass> {
    if tube.dim() != spec.total_dim() || samples == 0 {
        return Err(Error::InvalidInput("tube dimension mismatch or no samples".into()));
    }
    let points = sample(spec, sample_depth(spec), samples, seed)?;
    let hits = par::map_slice(&points, |y| u64::from(tube.contains(y))).iter().sum::<u64>();
    let mass = hits as f64 / samples as f64;
    let sigma = (mass * (1.0 - mass) / samples as f64).sqrt();
    Ok(McMass { mass, sigma, samples, seed })
}

/// Analytic angular density `(r₂² − r₁²)/2` of the uniform measure on an
/// axis-aligned box, where `[r₁, r₂]` is the ray's intersection with the box.
pub fn box_radial_density(x: &[f64], lo: &[f64], hi: &[f64], phi: f64) -> f64 {
    let dir = [phi.cos(), phi.sin()];
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for i in 0..2 {
        if dir[i].abs() < 1e-300 {
            if x[i] < lo[i] || x[i] > hi[i] {
                return 0.0;
            }
            continue;
        }
        let a = (lo[i] - x[i]) / dir[i];
        let b = (hi[i] - x[i]) / dir[i];
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    let area = (0..2).map(|i| hi[i] - lo[i]).product::<f64>();
    if t1 <= t0 {
        0.0
    } else {
        0.5 * (t1 * t1 - t0 * t0) / area
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MissingDigitsSpec;

    fn lebesgue2() -> ProductMeasureSpec {
        ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(3, 2).unwrap())
    }

    #[test]
    fn unwrap_stays_near_reference() {
        assert!((unwrap(-3.0, 3.0) - (2.0 * PI - 3.0)).abs() < 1e-12);
        assert!((unwrap(0.5, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lebesgue_diagonal_tube_brackets_area() {
        let delta = 0.05;
        let tube = TubeSpec::new(vec![-1.0, -1.0], vec![1.0, 1.0], delta).unwrap();
        let enc = radial_tube_density(&lebesgue2(), &tube, 6, 1 << 26).unwrap();
        let w = delta * 2f64.sqrt();
        let exact = (1.0 - (1.0 - w).powi(2)) / delta;
        assert!(enc.contains(exact), "{enc:?} vs {exact}");
        assert!(enc.width() < 0.1 * exact);
    }

    #[test]
    fn tube_missing_cube_is_zero() {
        let tube = TubeSpec::new(vec![-1.0, -1.0], vec![1.0, -1.0], 0.05).unwrap();
        let enc = radial_tube_density(&lebesgue2(), &tube, 4, 1 << 20).unwrap();
        assert_eq!((enc.lower, enc.upper), (0.0, 0.0));
    }

    #[test]
    fn viewpoint_too_close_rejected() {
        let tube = TubeSpec::new(vec![-0.01, 0.5], vec![1.0, 0.0], 0.05).unwrap();
        assert!(radial_tube_density(&lebesgue2(), &tube, 4, 1 << 20).is_err());
    }

    #[test]
    fn box_density_integrates_to_one() {
        let x = [-1.0, -1.0];
        let (lo, hi) = sector(&x, &[(0.0, 1.0), (0.0, 1.0)], 0.0).unwrap();
        let g = linspace(lo, hi, 4001);
        let v: Vec<f64> = g.iter().map(|&p| box_radial_density(&x, &[0.0, 0.0], &[1.0, 1.0], p)).collect();
        assert!((trapezoid(&g, &v) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn atom_mc_is_one_spike() {
        let atom = ProductMeasureSpec::power(MissingDigitsSpec::simple(3, [1]).unwrap(), 2).unwrap();
        let p = radial_density_mc(&atom, &[-1.0, 0.0], 1000, 0.01, 7, None).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-12);
        let target = 0.5f64.atan2(1.5);
        for (g, v) in p.grid.iter().zip(&p.values) {
            if *v > 0.0 {
                assert!((g - target).abs() <= 0.01 + 1e-12);
            }
        }
    }
}
