//! Positive integers whose digits are restricted in several bases at once.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::par;

/// True iff every base-`b` digit of `m` lies in `digits` (`0` has the single digit 0).
pub fn digits_ok(mut m: u64, base: u64, digits: &[u64]) -> bool {
    loop {
        if !digits.contains(&(m % base)) {
            return false;
        }
        m /= base;
        if m == 0 {
            return true;
        }
    }
}

/// One restriction: the base-`b` digits of `⌊t·n⌋` lie in `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub base: u64,
    pub digits: Vec<u64>,
    /// Exact scale `t ∈ (0, 1]`.
    #[serde(with = "ratio_string")]
    pub scale: Ratio<u64>,
    #[serde(skip)]
    mask: Vec<bool>,
}

mod ratio_string {
    use num_rational::Ratio;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }
}

impl Restriction {
    pub fn new(base: u64, digits: impl IntoIterator<Item = u64>, scale: Ratio<u64>) -> Result<Self> {
        if base < 3 {
            return Err(Error::InvalidInput(format!("base {base} is below 3")));
        }
        let mut digits: Vec<u64> = digits.into_iter().collect();
        digits.sort_unstable();
        digits.dedup();
        if digits.is_empty() {
            return Err(Error::EmptyDigitSet);
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange { digit: d.to_string(), base: base.to_string() });
        }
        if *scale.numer() == 0 || scale > Ratio::from_integer(1) {
            return Err(Error::InvalidInput(format!("scale {scale} is outside (0, 1]")));
        }
        let mut mask = vec![false; base as usize];
        digits.iter().for_each(|&d| mask[d as usize] = true);
        Ok(Self { base, digits, scale, mask })
    }

    fn allows(&self, mut m: u64) -> bool {
        loop {
            if !self.mask[(m % self.base) as usize] {
                return false;
            }
            m /= self.base;
            if m == 0 {
                return true;
            }
        }
    }

    /// `⌊t·n⌋` in exact integer arithmetic.
    fn scaled(&self, n: u64) -> u64 {
        (*self.scale.numer() as u128 * n as u128 / *self.scale.denom() as u128) as u64
    }

    fn accepts(&self, n: u64) -> bool {
        self.allows(self.scaled(n))
    }

    fn density(&self) -> f64 {
        self.digits.len() as f64 / self.base as f64
    }
}

/// Simultaneous restrictions `(b_i, D_i, t_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionSystem {
    pub restrictions: Vec<Restriction>,
}

impl RestrictionSystem {
    pub fn new(restrictions: Vec<Restriction>) -> Result<Self> {
        if restrictions.is_empty() {
            return Err(Error::InvalidInput("restriction system is empty".into()));
        }
        Ok(Self { restrictions })
    }

    /// Replaces the scales, given as exact fractions such as `"1"` or `"1/2"`.
    ///
    /// Decimal scales are rejected: `⌊t·n⌋` must be exact near integer boundaries.
    pub fn with_scales(mut self, scales: &str) -> Result<Self> {
        let parsed: Vec<Ratio<u64>> = scales
            .split(',')
            .map(|s| {
                let s = s.trim();
                if s.contains('.') || s.contains('e') {
                    return Err(Error::InvalidInput(format!("scale '{s}' must be an exact fraction like 1/2")));
                }
                s.parse::<Ratio<u64>>()
                    .map_err(|e| Error::InvalidInput(format!("scale '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        if parsed.len() != self.restrictions.len() {
            return Err(Error::InvalidInput(format!(
                "{} scales given for {} restrictions",
                parsed.len(),
                self.restrictions.len()
            )));
        }
        self.restrictions = self
            .restrictions
            .into_iter()
            .zip(parsed)
            .map(|(r, t)| Restriction::new(r.base, r.digits, t))
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn is_unscaled(&self) -> bool {
        self.restrictions.iter().all(|r| r.scale == Ratio::from_integer(1))
    }

    /// Whether `n` satisfies every restriction.
    pub fn accepts(&self, n: u64) -> bool {
        self.restrictions.iter().all(|r| r.accepts(n))
    }

    /// Index of the restriction with the smallest `#D/b`.
    fn driver(&self) -> usize {
        (0..self.restrictions.len())
            .min_by(|&a, &b| self.restrictions[a].density().total_cmp(&self.restrictions[b].density()))
            .unwrap_or(0)
    }
}

impl FromStr for RestrictionSystem {
    type Err = Error;

    /// Parses `"3:{0,1};5:{0,1,2}"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, message: msg };
        let restrictions = s
            .split(';')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                let (base, digits) = part
                    .split_once(':')
                    .ok_or_else(|| bad(format!("expected 'base:{{digits}}' in '{}'", part.trim())))?;
                let base: u64 = base.trim().parse().map_err(|_| bad(format!("bad base '{}'", base.trim())))?;
                let inner = digits
                    .trim()
                    .strip_prefix('{')
                    .and_then(|d| d.strip_suffix('}'))
                    .ok_or_else(|| bad(format!("digit set '{}' must be braced", digits.trim())))?;
                let digits = inner
                    .split(',')
                    .filter(|d| !d.trim().is_empty())
                    .map(|d| d.trim().parse::<u64>().map_err(|_| bad(format!("bad digit '{}'", d.trim()))))
                    .collect::<Result<Vec<_>>>()?;
                Restriction::new(base, digits, Ratio::from_integer(1))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(restrictions)
    }
}

impl fmt::Display for RestrictionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .restrictions
            .iter()
            .map(|r| {
                let d: Vec<String> = r.digits.iter().map(u64::to_string).collect();
                format!("{}:{{{}}}", r.base, d.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Members of `[1, N]` for an unscaled system, by digit DFS in the most
/// restrictive base followed by filtering in the others.
pub fn enumerate(system: &RestrictionSystem, limit: u64, budget: u64) -> Result<Vec<u64>> {
    if !system.is_unscaled() {
        return Err(Error::InvalidInput("scaled systems go through enumerate_scaled".into()));
    }
    let d = system.driver();
    let drive = &system.restrictions[d];
    let length = digit_length(limit, drive.base);
    check_budget((drive.digits.len() as f64).powi(length as i32), budget)?;
    let others: Vec<&Restriction> =
        system.restrictions.iter().enumerate().filter(|&(i, _)| i != d).map(|(_, r)| r).collect();
    let leading: Vec<u64> = drive.digits.iter().copied().filter(|&x| x != 0 && x <= limit).collect();
    let parts = par::map_slice(&leading, |&first| {
        let mut out = Vec::new();
        let mut stack = vec![first];
        while let Some(v) = stack.pop() {
            if others.iter().all(|r| r.allows(v)) {
                out.push(v);
            }
            if let Some(shifted) = v.checked_mul(drive.base) {
                for &digit in drive.digits.iter().rev() {
                    match shifted.checked_add(digit) {
                        Some(next) if next <= limit => stack.push(next),
                        _ => {}
                    }
                }
            }
        }
        out
    });
    let mut all: Vec<u64> = parts.concat();
    all.sort_unstable();
    Ok(all)
}

fn digit_length(mut n: u64, base: u64) -> u32 {
    let mut len = 1;
    while n >= base {
        n /= base;
        len += 1;
    }
    len
}

/// Members of `[1, N]` by a linear scan applying `⌊t_i n⌋` before each digit test.
pub fn enumerate_scaled(system: &RestrictionSystem, limit: u64, budget: u64) -> Result<Vec<u64>> {
    check_budget(limit as f64, budget)?;
    const CHUNK: u64 = 1 << 16;
    let chunks = limit.div_ceil(CHUNK);
    let parts = par::map_range(chunks as usize, |c| {
        let lo = c as u64 * CHUNK + 1;
        let hi = (lo + CHUNK - 1).min(limit);
        (lo..=hi).filter(|&n| system.accepts(n)).collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// DFS for unscaled systems, scan otherwise.
pub fn search(system: &RestrictionSystem, limit: u64, budget: u64) -> Result<Vec<u64>> {
    if system.is_unscaled() {
        enumerate(system, limit, budget)
    } else {
        enumerate_scaled(system, limit, budget)
    }
}

/// Count below one checkpoint and its growth exponent `log(count)/log N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub limit: u64,
    pub count: u64,
    pub exponent: Option<f64>,
}

/// Counts of members up to each checkpoint.
pub fn density_report(system: &RestrictionSystem, checkpoints: &[u64], budget: u64) -> Result<Vec<DensityRow>> {
    let max = checkpoints.iter().copied().max().unwrap_or(0);
    let members = search(system, max, budget)?;
    Ok(checkpoints
        .iter()
        .map(|&limit| {
            let count = members.partition_point(|&m| m <= limit) as u64;
            let exponent = (count > 0 && limit > 1).then(|| (count as f64).ln() / (limit as f64).ln());
            DensityRow { limit, count, exponent }
        })
        .collect())
}
