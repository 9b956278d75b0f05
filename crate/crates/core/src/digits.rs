//! Digit sets `D ⊂ {0, …, p−1}^n`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::base::{ln_interval_len, BasePower, SymInt};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DigitSet {
    /// Explicit digit vectors, kept sorted and deduplicated.
    Explicit { dim: usize, digits: Vec<Vec<u64>> },
    /// The one-dimensional range `lo..=hi`.
    Interval { lo: SymInt, hi: SymInt },
}

impl DigitSet {
    /// One-dimensional explicit set.
    pub fn scalars(digits: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::vectors(1, digits.into_iter().map(|d| vec![d]))
    }

    pub fn vectors(dim: usize, digits: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("digit vectors must have dimension >= 1".into()));
        }
        let mut digits: Vec<Vec<u64>> = digits.into_iter().collect();
        if digits.is_empty() {
            return Err(Error::EmptyDigitSet);
        }
        if let Some(bad) = digits.iter().find(|d| d.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "digit {bad:?} has {} coordinates, expected {dim}",
                bad.len()
            )));
        }
        digits.sort();
        let before = digits.len();
        digits.dedup();
        if digits.len() != before {
            return Err(Error::InvalidInput("duplicate digits".into()));
        }
        Ok(DigitSet::Explicit { dim, digits })
    }

    pub fn interval(lo: SymInt, hi: SymInt) -> Result<Self> {
        if lo.compare(&hi)? == Ordering::Greater {
            return Err(Error::EmptyDigitSet);
        }
        Ok(DigitSet::Interval { lo, hi })
    }

    /// `{0, …, p−1}^dim`.
    pub fn full(p: u64, dim: usize) -> Result<Self> {
        if dim == 1 {
            return Self::interval(SymInt::Exact(0), SymInt::Exact(p - 1));
        }
        let mut digits = vec![vec![]];
        for _ in 0..dim {
            digits = digits
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (0..p).map(move |d| {
                        let mut v = prefix.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
        }
        Self::vectors(dim, digits)
    }

    pub fn dim(&self) -> usize {
        match self {
            DigitSet::Explicit { dim, .. } => *dim,
            DigitSet::Interval { .. } => 1,
        }
    }

    pub fn ln_cardinality(&self) -> f64 {
        match self {
            DigitSet::Explicit { digits, .. } => (digits.len() as f64).ln(),
            DigitSet::Interval { lo, hi } => ln_interval_len(lo, hi),
        }
    }

    pub fn cardinality(&self) -> Option<u64> {
        match self {
            DigitSet::Explicit { digits, .. } => Some(digits.len() as u64),
            DigitSet::Interval { lo, hi } => Some(hi.exact()? - lo.exact()? + 1),
        }
    }

    /// Whether the set is a product of integer intervals.
    pub fn is_rectangle(&self) -> bool {
        match self {
            DigitSet::Interval { .. } => true,
            DigitSet::Explicit { dim, digits } => {
                let mut volume: u128 = 1;
                for k in 0..*dim {
                    let (lo, hi) = coord_range(digits, k);
                    volume = volume.saturating_mul((hi - lo + 1) as u128);
                }
                volume == digits.len() as u128
            }
        }
    }

    /// `lo..=hi` when the set is a consecutive one-dimensional range of machine integers.
    pub fn exact_interval(&self) -> Option<(u64, u64)> {
        match self {
            DigitSet::Interval { lo, hi } => Some((lo.exact()?, hi.exact()?)),
            DigitSet::Explicit { dim: 1, digits } => {
                let lo = digits[0][0];
                let hi = digits[digits.len() - 1][0];
                (hi - lo + 1 == digits.len() as u64).then_some((lo, hi))
            }
            DigitSet::Explicit { .. } => None,
        }
    }

    /// Per-coordinate `(min, max)` of the digits as floats (may be `inf` for huge symbolic bounds).
    pub fn coord_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            DigitSet::Explicit { dim, digits } => (0..*dim)
                .map(|k| {
                    let (lo, hi) = coord_range(digits, k);
                    (lo as f64, hi as f64)
                })
                .collect(),
            DigitSet::Interval { lo, hi } => vec![(sym_to_f64(lo), sym_to_f64(hi))],
        }
    }

    /// `ln max_{d∈D} |d|`; `-inf` when `D = {0}`.
    pub fn ln_max_norm(&self) -> f64 {
        match self {
            DigitSet::Explicit { digits, .. } => digits
                .iter()
                .map(|d| d.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
                .ln(),
            DigitSet::Interval { hi, .. } => hi.ln(),
        }
    }

    /// Materializes all digit vectors, refusing more than `budget` of them.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<Vec<u64>>> {
        match self {
            DigitSet::Explicit { digits, .. } => Ok(digits.clone()),
            DigitSet::Interval { lo, hi } => {
                let (Some(a), Some(b)) = (lo.exact(), hi.exact()) else {
                    return Err(Error::SymbolicBase(format!("digits {lo}..{hi}")));
                };
                crate::error::check_budget((b - a + 1) as f64, budget)?;
                Ok((a..=b).map(|d| vec![d]).collect())
            }
        }
    }

    /// Checks that every digit lies in `[0, p−1]` and the dimension is `n`.
    pub fn validate(&self, base: &BasePower, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::InvalidInput(format!(
                "digit set has dimension {}, factor declares n = {n}",
                self.dim()
            )));
        }
        let p = base.as_sym();
        let check = |d: &SymInt| -> Result<()> {
            if d.compare(&p)? != Ordering::Less {
                return Err(Error::DigitOutOfRange { digit: d.to_string(), base: base.to_string() });
            }
            Ok(())
        };
        match self {
            DigitSet::Explicit { digits, .. } => {
                for d in digits.iter().flatten() {
                    check(&SymInt::Exact(*d))?;
                }
            }
            DigitSet::Interval { hi, .. } => check(hi)?,
        }
        Ok(())
    }
}

fn coord_range(digits: &[Vec<u64>], k: usize) -> (u64, u64) {
    digits.iter().fold((u64::MAX, 0), |(lo, hi), d| (lo.min(d[k]), hi.max(d[k])))
}

fn sym_to_f64(v: &SymInt) -> f64 {
    match v.exact() {
        Some(x) => x as f64,
        None => v.ln().exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_validation() {
        assert_eq!(DigitSet::scalars([]), Err(Error::EmptyDigitSet));
        assert!(DigitSet::scalars([1, 1]).is_err());
        let d = DigitSet::scalars([2, 0]).unwrap();
        assert_eq!(d.cardinality(), Some(2));
        let p3 = BasePower::integer(3).unwrap();
        assert!(d.validate(&p3, 1).is_ok());
        let bad = DigitSet::scalars([0, 3]).unwrap();
        assert!(matches!(bad.validate(&p3, 1), Err(Error::DigitOutOfRange { .. })));
    }

    #[test]
    fn rectangles() {
        assert!(DigitSet::scalars([3, 4, 5]).unwrap().is_rectangle());
        assert!(!DigitSet::scalars([0, 2]).unwrap().is_rectangle());
        let square = DigitSet::vectors(2, [vec![0, 1], vec![1, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert!(square.is_rectangle());
        let ell = DigitSet::vectors(2, [vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!ell.is_rectangle());
        assert!(DigitSet::interval(SymInt::Exact(1), SymInt::pow(10, 8000).unwrap()).unwrap().is_rectangle());
    }

    #[test]
    fn symbolic_interval_range_check() {
        let p = BasePower::new(10, 10000).unwrap();
        let ok = DigitSet::interval(SymInt::Exact(1), SymInt::pow(10, 8000).unwrap()).unwrap();
        assert!(ok.validate(&p, 1).is_ok());
        let bad = DigitSet::interval(SymInt::Exact(1), SymInt::pow(10, 10000).unwrap()).unwrap();
        assert!(bad.validate(&p, 1).is_err());
    }

    #[test]
    fn exact_interval_detection() {
        assert_eq!(DigitSet::scalars([0, 1, 2, 3]).unwrap().exact_interval(), Some((0, 3)));
        assert_eq!(DigitSet::scalars([0, 2]).unwrap().exact_interval(), None);
    }

    #[test]
    fn full_set_in_two_dims() {
        let d = DigitSet::full(3, 2).unwrap();
        assert_eq!(d.cardinality(), Some(9));
        assert!(d.is_rectangle());
    }
}
