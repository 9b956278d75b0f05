//! Integer bases and digit bounds that may be far too large for machine words.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln(2^62)`: above this a power is kept symbolic.
const LN_EXACT_LIMIT: f64 = 62.0 * std::f64::consts::LN_2;

/// An integer `b^e`, stored symbolically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasePower {
    b: u64,
    e: u32,
}

impl BasePower {
    pub fn new(b: u64, e: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidInput(format!("base mantissa must be >= 2, got {b}")));
        }
        if e < 1 {
            return Err(Error::InvalidInput("base exponent must be >= 1".into()));
        }
        Ok(Self { b, e })
    }

    /// Plain integer base `p`.
    pub fn integer(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn mantissa(&self) -> u64 {
        self.b
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// `ln p = e ln b`.
    pub fn log_value(&self) -> f64 {
        self.e as f64 * (self.b as f64).ln()
    }

    /// `p` as an integer when it fits comfortably in 62 bits.
    pub fn exact(&self) -> Option<u64> {
        if self.log_value() > LN_EXACT_LIMIT + 1e-9 {
            return None;
        }
        self.b.checked_pow(self.e).filter(|&v| v <= 1u64 << 62)
    }

    /// Like [`exact`](Self::exact) but reports a symbolic base as an error.
    pub fn require_exact(&self) -> Result<u64> {
        self.exact().ok_or_else(|| Error::SymbolicBase(self.to_string()))
    }

    pub fn as_sym(&self) -> SymInt {
        match self.exact() {
            Some(v) => SymInt::Exact(v),
            None => SymInt::Power(*self),
        }
    }
}

impl fmt::Display for BasePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "{}", self.b)
        } else {
            write!(f, "{}^{}", self.b, self.e)
        }
    }
}

/// A nonnegative integer that is either a machine word or a symbolic power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymInt {
    Exact(u64),
    Power(BasePower),
}

impl SymInt {
    pub fn pow(b: u64, e: u32) -> Result<Self> {
        Ok(BasePower::new(b, e)?.as_sym())
    }

    pub fn exact(&self) -> Option<u64> {
        match self {
            SymInt::Exact(v) => Some(*v),
            SymInt::Power(p) => p.exact(),
        }
    }

    /// Natural log; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        match self {
            SymInt::Exact(v) => (*v as f64).ln(),
            SymInt::Power(p) => p.log_value(),
        }
    }

    /// Writes the value as `r^k` with `r` not itself a perfect power.
    fn root_form(&self) -> Option<(u64, u64)> {
        match self {
            SymInt::Exact(v) if *v >= 2 => {
                let (r, a) = primitive_root(*v);
                Some((r, a as u64))
            }
            SymInt::Exact(_) => None,
            SymInt::Power(p) => {
                let (r, a) = primitive_root(p.mantissa());
                Some((r, a as u64 * p.exponent() as u64))
            }
        }
    }

    /// Exact comparison. Two powers with different primitive roots are never
    /// equal, so the logarithms decide; a near-tie there is reported as an error.
    pub fn compare(&self, other: &SymInt) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return Ok(a.cmp(&b));
        }
        match (self.root_form(), other.root_form()) {
            (Some((r1, k1)), Some((r2, k2))) if r1 == r2 => Ok(k1.cmp(&k2)),
            _ => {
                let (a, b) = (self.ln(), other.ln());
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() <= 1e-12 * scale {
                    Err(Error::Unsupported(format!(
                        "cannot order {self} and {other} in double precision"
                    )))
                } else {
                    Ok(a.partial_cmp(&b).unwrap_or(Ordering::Equal))
                }
            }
        }
    }
}

impl fmt::Display for SymInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymInt::Exact(v) => write!(f, "{v}"),
            SymInt::Power(p) => write!(f, "{p}"),
        }
    }
}

/// `ln(hi - lo + 1)` for `lo <= hi`, stable when `hi` is symbolic.
pub fn ln_interval_len(lo: &SymInt, hi: &SymInt) -> f64 {
    if let (Some(a), Some(b)) = (lo.exact(), hi.exact()) {
        return ((b - a) as f64 + 1.0).ln();
    }
    // hi - lo + 1 = hi * (1 - lo/hi + 1/hi)
    let ln_hi = hi.ln();
    let lo_ratio = if matches!(lo, SymInt::Exact(0)) { 0.0 } else { (lo.ln() - ln_hi).exp() };
    ln_hi + (-lo_ratio + (-ln_hi).exp()).ln_1p()
}

/// Smallest `r` with `v = r^a`.
fn primitive_root(v: u64) -> (u64, u32) {
    let mut best = (v, 1);
    for a in 2..=63u32 {
        let r = (v as f64).powf(1.0 / a as f64).round() as u64;
        if r < 2 {
            break;
        }
        for cand in r.saturating_sub(1)..=r + 1 {
            if cand >= 2 && cand.checked_pow(a) == Some(v) {
                best = (cand, a);
            }
        }
    }
    best
}
