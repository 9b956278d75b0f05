//! Regions used for cylinder counting: axis-aligned boxes and tubes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a closed box sits relative to a closed region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Inside,
    Outside,
    Partial,
}

/// A rectangular tube `{ y : |(y−x)·θ| ≤ half_length, |(y−x)·e| ≤ δ for e ⊥ θ }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub center: Vec<f64>,
    pub direction: Vec<f64>,
    pub half_width: f64,
    pub half_length: f64,
    #[serde(skip)]
    frame: Vec<Vec<f64>>,
}

impl TubeSpec {
    /// Tube with the default half-length `|x| + √n`, the farthest a point of
    /// the unit cube can be from `x`.
    pub fn new(center: Vec<f64>, direction: Vec<f64>, half_width: f64) -> Result<Self> {
        let half_length = norm(&center) + (center.len() as f64).sqrt();
        Self::with_length(center, direction, half_width, half_length)
    }

    pub fn with_length(
        center: Vec<f64>,
        direction: Vec<f64>,
        half_width: f64,
        half_length: f64,
    ) -> Result<Self> {
        let n = center.len();
        if n == 0 || direction.len() != n {
            return Err(Error::InvalidInput("tube center and direction dimensions differ".into()));
        }
        if !(half_width > 0.0) || !(half_length >= half_width) {
            return Err(Error::InvalidInput(format!(
                "tube needs 0 < half_width <= half_length, got {half_width}, {half_length}"
            )));
        }
        let len = norm(&direction);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidInput("tube direction must be a nonzero vector".into()));
        }
        let direction: Vec<f64> = direction.iter().map(|v| v / len).collect();
        let frame = orthonormal_frame(&direction);
        Ok(Self { center, direction, half_width, half_length, frame })
    }

    /// Tube through `center` at angle `phi` (radians) in the plane.
    pub fn planar(center: [f64; 2], phi: f64, half_width: f64) -> Result<Self> {
        Self::new(center.to_vec(), vec![phi.cos(), phi.sin()], half_width)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn frame(&self) -> std::borrow::Cow<'_, [Vec<f64>]> {
        if self.frame.is_empty() {
            std::borrow::Cow::Owned(orthonormal_frame(&self.direction))
        } else {
            std::borrow::Cow::Borrowed(&self.frame)
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let rel: Vec<f64> = y.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let frame = self.frame();
        frame.iter().enumerate().all(|(k, axis)| {
            let limit = if k == 0 { self.half_length } else { self.half_width };
            dot(&rel, axis).abs() <= limit
        })
    }

    /// Box-vs-tube test. Exact in the plane; in higher dimensions `Partial` may
    /// be reported for a separated box.
    pub fn classify(&self, lo: &[f64], hi: &[f64]) -> Relation {
        let n = self.dim();
        let frame = self.frame();
        let mut inside = true;
        for (k, axis) in frame.iter().enumerate() {
            let limit = if k == 0 { self.half_length } else { self.half_width };
            let mut c = 0.0;
            let mut r = 0.0;
            for i in 0..n {
                c += (0.5 * (lo[i] + hi[i]) - self.center[i]) * axis[i];
                r += 0.5 * (hi[i] - lo[i]) * axis[i].abs();
            }
            if c - r > limit || c + r < -limit {
                return Relation::Outside;
            }
            if c - r < -limit || c + r > limit {
                inside = false;
            }
        }
        for i in 0..n {
            let reach: f64 = frame
                .iter()
                .enumerate()
                .map(|(k, axis)| {
                    let limit = if k == 0 { self.half_length } else { self.half_width };
                    limit * axis[i].abs()
                })
                .sum();
            if self.center[i] - reach > hi[i] || self.center[i] + reach < lo[i] {
                return Relation::Outside;
            }
        }
        if inside {
            Relation::Inside
        } else {
            Relation::Partial
        }
    }
}

/// A closed region for [`cylinder_mass`](crate::measure::cylinder_mass).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Tube(TubeSpec),
}

impl Region {
    pub fn unit_cube(n: usize) -> Self {
        Region::Box { lo: vec![0.0; n], hi: vec![1.0; n] }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Region::Box { lo: vec![a], hi: vec![b] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Tube(t) => t.dim(),
        }
    }

    pub fn classify(&self, lo: &[f64], hi: &[f64]) -> Relation {
        match self {
            Region::Box { lo: a, hi: b } => {
                let mut inside = true;
                for i in 0..a.len() {
                    if hi[i] < a[i] || lo[i] > b[i] {
                        return Relation::Outside;
                    }
                    if lo[i] < a[i] || hi[i] > b[i] {
                        inside = false;
                    }
                }
                if inside {
                    Relation::Inside
                } else {
                    Relation::Partial
                }
            }
            Region::Tube(t) => t.classify(lo, hi),
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b),
            Region::Tube(t) => t.contains(y),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `[θ, e_1, …, e_{n−1}]` by Gram–Schmidt against the coordinate axes.
fn orthonormal_frame(theta: &[f64]) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut frame = vec![theta.to_vec()];
    let mut axes: Vec<usize> = (0..n).collect();
    // start from the axes least aligned with θ
    axes.sort_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs()));
    for i in axes {
        if frame.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for u in &frame {
            let c = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let len = norm(&v);
        if len > 1e-8 {
            frame.push(v.into_iter().map(|a| a / len).collect());
        }
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal() {
        let f = orthonormal_frame(&[0.6, 0.0, 0.8]);
        assert_eq!(f.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(&f[i], &f[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn planar_tube_classification() {
        let t = TubeSpec::planar([-1.0, 0.5], 0.0, 0.1).unwrap();
        assert_eq!(t.classify(&[0.0, 0.45], &[0.1, 0.55]), Relation::Inside);
        assert_eq!(t.classify(&[0.0, 0.0], &[0.1, 0.3]), Relation::Outside);
        assert_eq!(t.classify(&[0.0, 0.55], &[0.1, 0.7]), Relation::Partial);
        // beyond the far end of the tube
        assert_eq!(t.classify(&[2.0, 0.45], &[2.1, 0.55]), Relation::Outside);
    }

    #[test]
    fn diagonal_tube_separation_is_exact_in_plane() {
        let t = TubeSpec::planar([-1.0, -1.0], std::f64::consts::FRAC_PI_4, 0.05).unwrap();
        // a box near (1, 0) is far from the diagonal
        assert_eq!(t.classify(&[0.9, 0.0], &[1.0, 0.1]), Relation::Outside);
        assert_eq!(t.classify(&[0.49, 0.49], &[0.51, 0.51]), Relation::Inside);
    }

    #[test]
    fn rejects_bad_tubes() {
        assert!(TubeSpec::planar([0.0, 0.0], 0.0, 0.0).is_err());
        assert!(TubeSpec::new(vec![0.0, 0.0], vec![0.0, 0.0], 0.1).is_err());
    }
}
