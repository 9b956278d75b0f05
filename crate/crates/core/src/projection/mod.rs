//! Projections of missing-digits measures.
//!
//! * [`radial`] – tube densities `f_δ(θ) = λ(T_θ^δ)/δ^{n−1}` seen from a viewpoint, their
//!   L² norms, and Monte Carlo angular densities.
//! * [`linear`] – densities of orthogonal projections by Fourier inversion and Monte Carlo.
//! * [`lattice`] – frequency-domain integrals: the L^p criterion integral, annulus
//!   stripes, slabs and exceptional directions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub mod lattice;
pub mod linear;
pub mod radial;

pub use lattice::{
    exceptional_directions, lp_criterion_integral, slab_integral, stripe_integral, ExceptionalDirection,
    LpIntegral, SlabIntegral, StripeScan,
};
pub use linear::{default_u_grid, linear_density, linear_density_mc, linear_density_smoothed};
pub use radial::{
    radial_density_mc, radial_l2_norm, radial_tube_density, tube_mass_mc, McMass, RadialL2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileAxis {
    AngleOnSphere,
    OffsetOnLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileMethod {
    TubeCount,
    MonteCarlo,
    FourierInversion,
}

/// Conditions that make a profile unreliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProfileFlag {
    /// Dyadic shells of `∫|λ̂|` do not decay over the last three slopes.
    NonConvergent,
    /// L¹ norm of the discarded imaginary part exceeds `10·tol`.
    ImaginaryResidue,
    /// Some value is below `−tol`.
    NegativeDip,
    /// Mass over the grid is outside `[0.98, 1.02]`.
    MassOutOfRange,
}

/// Sampled density on an ordered grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub axis: ProfileAxis,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: ProfileMethod,
    pub flags: Vec<ProfileFlag>,
    pub metadata: BTreeMap<String, Value>,
}

impl DensityProfile {
    /// Trapezoidal integral over the grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    pub fn has_flag(&self, flag: ProfileFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// Trapezoidal L¹ distance to another profile on the same grid.
    pub fn l1_distance(&self, other: &DensityProfile) -> f64 {
        let diff: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).collect();
        trapezoid(&self.grid, &diff)
    }

    /// Trapezoidal L¹ distance to a function.
    pub fn l1_distance_to(&self, f: impl Fn(f64) -> f64) -> f64 {
        let diff: Vec<f64> = self.grid.iter().zip(&self.values).map(|(&u, v)| (v - f(u)).abs()).collect();
        trapezoid(&self.grid, &diff)
    }

    /// `grid,value` CSV with a header naming axis units and method.
    pub fn to_csv(&self) -> String {
        let axis = match self.axis {
            ProfileAxis::AngleOnSphere => "angle[rad]",
            ProfileAxis::OffsetOnLine => "offset[unit]",
        };
        let method = match self.method {
            ProfileMethod::TubeCount => "tube-count",
            ProfileMethod::MonteCarlo => "monte-carlo",
            ProfileMethod::FourierInversion => "fourier-inversion",
        };
        let mut out = format!("{axis},density[{method}]\n");
        for (g, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{g:.12e},{v:.12e}\n"));
        }
        out
    }

    fn check_mass(&mut self) {
        let mass = self.mass();
        self.metadata.insert("mass".into(), mass.into());
        if !(0.98..=1.02).contains(&mass) {
            self.flags.push(ProfileFlag::MassOutOfRange);
        }
    }
}

/// Trapezoidal rule on a possibly nonuniform grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    let parts: Vec<f64> = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
        .collect();
    crate::par::pairwise_sum(&parts)
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Verdict of a dyadic-shell growth diagnosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convergence {
    /// The last four shells are negligible or decay on average.
    Convergent,
    /// The last four shells do not decay on average.
    NonConvergent,
    /// Fewer than four shells.
    Undetermined,
}

/// Contributions of dyadic shells `{2^{k−1} < |ξ| ≤ 2^k}` (shell 0: `|ξ| ≤ 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellDiagnostics {
    pub outer_radii: Vec<f64>,
    pub contributions: Vec<f64>,
    /// Largest contribution attributable to evaluation error alone.
    pub noise_floor: Vec<f64>,
    /// `log₂(c_k / c_{k−1})`; `None` when both shells are below their noise floor.
    pub slopes: Vec<Option<f64>>,
    /// Least-squares slope of `log₂ c_k` over the last four shells (the last
    /// three slopes); `None` when those shells are all negligible.
    pub trend: Option<f64>,
    pub convergence: Convergence,
}

impl ShellDiagnostics {
    pub fn new(contributions: Vec<f64>, noise_floor: Vec<f64>) -> Self {
        let outer_radii = (0..contributions.len()).map(|k| 2f64.powi(k as i32)).collect();
        let negligible: Vec<bool> = contributions.iter().zip(&noise_floor).map(|(c, f)| c <= f).collect();
        let log = |k: usize| contributions[k].max(noise_floor[k]).max(f64::MIN_POSITIVE).log2();
        let slopes: Vec<Option<f64>> = (1..contributions.len())
            .map(|k| (!(negligible[k] && negligible[k - 1])).then(|| log(k) - log(k - 1)))
            .collect();
        let len = contributions.len();
        let (trend, convergence) = if len < 4 {
            (None, Convergence::Undetermined)
        } else if negligible[len - 4..].iter().all(|&n| n) {
            (None, Convergence::Convergent)
        } else {
            // slope of the least-squares line through (k, log₂ c_k), k = 0..3
            let y: Vec<f64> = (len - 4..len).map(log).collect();
            let t = (-3.0 * y[0] - y[1] + y[2] + 3.0 * y[3]) / 10.0;
            let verdict = if t >= 0.0 { Convergence::NonConvergent } else { Convergence::Convergent };
            (Some(t), verdict)
        };
        Self { outer_radii, contributions, noise_floor, slopes, trend, convergence }
    }

    /// Dyadic shell index of a radius: 0 for `r ≤ 1`, else `⌈log₂ r⌉`.
    pub fn shell_of(r: f64) -> usize {
        if r <= 1.0 {
            0
        } else {
            let k = r.log2().ceil() as usize;
            // guard the rounding of log₂ at exact powers of two
            if 2f64.powi(k as i32 - 1) >= r {
                k - 1
            } else if 2f64.powi(k as i32) < r {
                k + 1
            } else {
                k
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_indices() {
        assert_eq!(ShellDiagnostics::shell_of(0.0), 0);
        assert_eq!(ShellDiagnostics::shell_of(1.0), 0);
        assert_eq!(ShellDiagnostics::shell_of(1.5), 1);
        assert_eq!(ShellDiagnostics::shell_of(2.0), 1);
        assert_eq!(ShellDiagnostics::shell_of(2.0001), 2);
        assert_eq!(ShellDiagnostics::shell_of(1024.0), 10);
    }

    #[test]
    fn convergence_rules() {
        let grow = ShellDiagnostics::new(vec![1.0, 2.0, 4.0, 8.0], vec![0.0; 4]);
        assert_eq!(grow.convergence, Convergence::NonConvergent);
        assert!((grow.trend.unwrap() - 1.0).abs() < 1e-12);
        let noisy = ShellDiagnostics::new(vec![1.0, 2.5, 2.0, 4.6], vec![0.0; 4]);
        assert!(noisy.slopes[1].unwrap() < 0.0);
        assert_eq!(noisy.convergence, Convergence::NonConvergent);
        let decay = ShellDiagnostics::new(vec![1.0, 1e-20, 0.0, 0.0], vec![1e-12; 4]);
        assert_eq!(decay.slopes[1], None);
        assert!(decay.slopes[0].unwrap() < -30.0);
        assert_eq!(decay.convergence, Convergence::Convergent);
        let short = ShellDiagnostics::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]);
        assert_eq!(short.convergence, Convergence::Undetermined);
    }

    #[test]
    fn trapezoid_of_line() {
        let g = linspace(0.0, 2.0, 11);
        let v: Vec<f64> = g.iter().map(|x| 3.0 * x).collect();
        assert!((trapezoid(&g, &v) - 6.0).abs() < 1e-12);
    }
}
