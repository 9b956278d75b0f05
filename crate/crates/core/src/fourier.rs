//! Fourier transforms of missing-digits measures.
//!
//! With `S = Σ_{i≥1} p^{-i} d_i` the transform factors as
//! `λ̂(ξ) = Π_{j≥1} g(ξ/p^j)` where `g(η) = (#D)^{-1} Σ_{d∈D} e^{-2πi(d,η)}`
//! is the digit symbol. The product is truncated at a depth chosen from the
//! geometric tail bound `|1 − g(η)| ≤ 2π·max|d|·|η|`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::geometry::norm;
use crate::measure::{MissingDigitsSpec, ProductMeasureSpec};
use crate::par;

/// Smallest tolerance honoured; anything below is raised to this.
pub const TOL_FLOOR: f64 = 1e-12;

/// Largest digit-string block the oracle enumerates in one piece.
const ORACLE_BLOCK: f64 = 65_536.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub value: Complex64,
    /// Bound on the truncation error.
    pub abs_error: f64,
}

impl FourierValue {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

/// `x − floor(x)`.
#[inline]
fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `c·r` reduced mod 1 into `[−½, ½]`, accurate even when `c` is large.
///
/// The symmetric range keeps small negative products exact, which a
/// `[0, 1)` reduction would round to `1 − ε`.
#[inline]
fn frac_mul(c: u64, r: f64) -> f64 {
    if c < 1 << 10 {
        return reduce(c as f64 * r);
    }
    let hi = (c & !0xFFFF_FFFF) as f64;
    let lo = (c & 0xFFFF_FFFF) as f64;
    let a = hi * r;
    let a_err = hi.mul_add(r, -a);
    let b = lo * r;
    let b_err = lo.mul_add(r, -b);
    reduce(reduce(a) + reduce(b) + a_err + b_err)
}

/// `η − round(η)`, exact for the magnitudes that occur here.
#[inline]
fn reduce(eta: f64) -> f64 {
    eta - eta.round()
}

#[inline]
fn cis_turns(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

#[derive(Debug, Clone)]
enum SymbolKind {
    /// `lo..=hi` in one dimension.
    Interval { lo: u64, count: u64 },
    Explicit(Vec<Vec<u64>>),
    /// Symbolic digits: only `g(0) = 1` is available.
    Opaque,
}

/// Precomputed per-factor data for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct FactorSymbol {
    kind: SymbolKind,
    dim: usize,
    /// `1/p`, zero when `p` is symbolic.
    inv_p: f64,
    ln_p: f64,
    ln_p_minus_1: f64,
    ln_max_norm: f64,
}

impl FactorSymbol {
    pub fn new(factor: &MissingDigitsSpec) -> Self {
        let kind = match factor.digits.exact_interval() {
            Some((lo, hi)) => SymbolKind::Interval { lo, count: hi - lo + 1 },
            None => match factor.digits.enumerate(crate::error::DEFAULT_BUDGET) {
                Ok(list) => SymbolKind::Explicit(list),
                Err(_) => SymbolKind::Opaque,
            },
        };
        let ln_p = factor.base.log_value();
        let (inv_p, ln_p_minus_1) = match factor.base.exact() {
            Some(p) => (1.0 / p as f64, ((p - 1) as f64).ln()),
            None => (0.0, ln_p),
        };
        Self { kind, dim: factor.ambient_dim, inv_p, ln_p, ln_p_minus_1, ln_max_norm: factor.ln_max_digit_norm() }
    }

    /// `g(η)`.
    pub fn eval(&self, eta: &[f64]) -> Result<Complex64> {
        match &self.kind {
            SymbolKind::Interval { lo, count } => Ok(interval_symbol(*lo, *count, eta[0])),
            SymbolKind::Explicit(digits) => {
                let r: Vec<f64> = eta.iter().map(|&x| reduce(x)).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for d in digits {
                    let t: f64 = d.iter().zip(&r).map(|(&dk, &rk)| frac_mul(dk, rk)).sum();
                    acc += cis_turns(-t);
                }
                Ok(acc / digits.len() as f64)
            }
            SymbolKind::Opaque => {
                if eta.iter().all(|&x| x == 0.0) {
                    Ok(Complex64::new(1.0, 0.0))
                } else {
                    Err(Error::Unsupported("digit symbol of a symbolic digit range at nonzero frequency".into()))
                }
            }
        }
    }

    /// Depth `J` with tail `Π_{j>J} g(ξ/p^j)` within `tol` of 1, and the tail bound.
    pub fn truncation(&self, xi_norm: f64, tol: f64) -> (usize, f64) {
        if xi_norm == 0.0 || self.ln_max_norm == f64::NEG_INFINITY {
            return (0, 0.0);
        }
        let tol = tol.max(TOL_FLOOR);
        // Σ_{j>J} |1−g(ξ/p^j)| ≤ 2πM|ξ| / (p^J (p−1)); |Π a_j − 1| ≤ exp(Σ) − 1.
        let ln_head = TAU.ln() + self.ln_max_norm + xi_norm.ln() - self.ln_p_minus_1;
        let needed = ln_head - tol.ln_1p().ln();
        let j = if needed <= 0.0 { 0 } else { (needed / self.ln_p).ceil() as usize };
        let tail = (ln_head - j as f64 * self.ln_p).exp();
        (j, tail.exp_m1())
    }

    /// `Π_{j=1}^{J} g(ξ/p^j)` and its error bound.
    pub fn transform(&self, xi: &[f64], tol: f64) -> Result<(Complex64, f64)> {
        let (depth, err) = self.truncation(norm(xi), tol);
        let mut eta: Vec<f64> = xi.to_vec();
        let mut value = Complex64::new(1.0, 0.0);
        for _ in 0..depth {
            eta.iter_mut().for_each(|x| *x *= self.inv_p);
            if self.inv_p == 0.0 {
                // p symbolic: ξ/p underflows and every remaining factor is 1
                break;
            }
            value *= self.eval(&eta)?;
        }
        Ok((value, err))
    }
}

/// `e^{-2πi lo η} (1/N) Σ_{k<N} e^{-2πi k η}` in Dirichlet-kernel form.
fn interval_symbol(lo: u64, count: u64, eta: f64) -> Complex64 {
    let r = reduce(eta);
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    // modulus sin(πNr)/(N sin(πr)), phase −2π(lo + (N−1)/2) r
    let half_turns = frac_mul(count, 0.5 * r);
    let ratio = (TAU * half_turns).sin() / (count as f64 * (PI * r).sin());
    let centre = lo as u128 * 2 + count as u128 - 1;
    let phase = if centre < 1 << 64 {
        frac_mul(centre as u64, 0.5 * r)
    } else {
        reduce(frac_mul(lo, r) + frac_mul(count - 1, 0.5 * r))
    };
    cis_turns(-phase) * ratio
}

/// Digit symbol `g(ξ)` of one factor.
pub fn digit_symbol(factor: &MissingDigitsSpec, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != factor.ambient_dim {
        return Err(Error::InvalidInput(format!(
            "frequency has {} coordinates, factor has {}",
            xi.len(),
            factor.ambient_dim
        )));
    }
    FactorSymbol::new(factor).eval(xi)
}

/// Truncation depth for `|ξ|` and `tol`.
pub fn truncation_depth(xi_norm: f64, tol: f64, factor: &MissingDigitsSpec) -> usize {
    FactorSymbol::new(factor).truncation(xi_norm, tol).0
}

/// Reusable evaluator of `λ̂` for a product measure.
#[derive(Debug, Clone)]
pub struct FourierEvaluator {
    symbols: Vec<FactorSymbol>,
    tol: f64,
    dim: usize,
}

impl FourierEvaluator {
    pub fn new(spec: &ProductMeasureSpec, tol: f64) -> Self {
        Self {
            symbols: spec.factors.iter().map(FactorSymbol::new).collect(),
            tol: tol.max(TOL_FLOOR),
            dim: spec.total_dim(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn eval(&self, xi: &[f64]) -> Result<FourierValue> {
        if xi.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "frequency has {} coordinates, measure has {}",
                xi.len(),
                self.dim
            )));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("frequency must be finite".into()));
        }
        let share = self.tol / self.symbols.len() as f64;
        let mut value = Complex64::new(1.0, 0.0);
        let mut err = 0.0;
        let mut offset = 0;
        for s in &self.symbols {
            let (v, e) = s.transform(&xi[offset..offset + s.dim], share)?;
            value *= v;
            err += e;
            offset += s.dim;
        }
        Ok(FourierValue { value, abs_error: err })
    }

    /// `|λ̂(ξ)|`, with errors treated as a programming fault.
    pub(crate) fn modulus(&self, xi: &[f64]) -> f64 {
        self.eval(xi).map(|v| v.norm()).unwrap_or(f64::NAN)
    }

    /// Checks that every factor can be evaluated away from the origin.
    pub(crate) fn require_enumerable(&self) -> Result<()> {
        if self.symbols.iter().any(|s| matches!(s.kind, SymbolKind::Opaque)) {
            return Err(Error::Unsupported("symbolic digit ranges cannot be evaluated at nonzero frequency".into()));
        }
        Ok(())
    }
}

/// `λ̂(ξ)` to within `tol`.
pub fn fourier_transform(spec: &ProductMeasureSpec, xi: &[f64], tol: f64) -> Result<FourierValue> {
    FourierEvaluator::new(spec, tol).eval(xi)
}

/// Evaluates a batch of frequencies in parallel; output order matches input.
pub fn fourier_batch(spec: &ProductMeasureSpec, points: &[Vec<f64>], tol: f64) -> Vec<Result<FourierValue>> {
    let ev = FourierEvaluator::new(spec, tol);
    par::map_slice(points, |xi| ev.eval(xi))
}

/// Brute-force transform from depth-`m` cylinders.
///
/// Averages `e^{-2πi(c,ξ)}` over the barycentres `c` of all depth-`m`
/// cylinders of each factor. Digit strings are enumerated explicitly in
/// blocks of at most 65 536 strings; block sums multiply.
pub fn fourier_oracle(spec: &ProductMeasureSpec, xi: &[f64], depth: usize, budget: u64) -> Result<Complex64> {
    if xi.len() != spec.total_dim() {
        return Err(Error::InvalidInput("frequency dimension mismatch".into()));
    }
    let mean = spec.mean()?;
    let mut total = Complex64::new(1.0, 0.0);
    let mut offset = 0;
    let mut work = 0.0;
    let mut plans = Vec::new();
    for f in &spec.factors {
        let p = f.base.require_exact()? as f64;
        let digits = f.digits.enumerate(budget)?;
        let per = (ORACLE_BLOCK.ln() / (digits.len() as f64).ln()).floor().max(1.0) as usize;
        let per = if digits.len() == 1 { depth.max(1) } else { per };
        let mut start = 1;
        while start <= depth {
            let len = per.min(depth + 1 - start);
            work += (digits.len() as f64).powi(len as i32);
            start += len;
        }
        plans.push((p, digits, per));
    }
    check_budget(work, budget)?;
    for (f, (p, digits, per)) in spec.factors.iter().zip(plans) {
        let n = f.ambient_dim;
        let xf = &xi[offset..offset + n];
        let mut start = 1;
        while start <= depth {
            let len = per.min(depth + 1 - start);
            total *= block_sum(&digits, p, xf, start, len);
            start += len;
        }
        // shift corners to barycentres: c + p^{-m} mean
        let scale = p.powi(-(depth as i32));
        let t: f64 = xf.iter().zip(&mean[offset..offset + n]).map(|(x, m)| x * m * scale).sum();
        total *= cis_turns(-t);
        offset += n;
    }
    Ok(total)
}

/// Average of `e^{-2πi Σ_{i=start}^{start+len-1} p^{-i}(d_i,ξ)}` over all digit strings.
fn block_sum(digits: &[Vec<u64>], p: f64, xi: &[f64], start: usize, len: usize) -> Complex64 {
    // per-level phase offsets in turns
    let levels: Vec<Vec<f64>> = (0..len)
        .map(|k| {
            let scale = p.powi(-((start + k) as i32));
            digits
                .iter()
                .map(|d| d.iter().zip(xi).map(|(&dk, &x)| dk as f64 * x * scale).sum::<f64>())
                .collect()
        })
        .collect();
    let count = digits.len();
    let total = count.pow(len as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; len];
    for _ in 0..total {
        let t: f64 = idx.iter().enumerate().map(|(k, &j)| levels[k][j]).sum();
        acc += cis_turns(-frac(t));
        for k in (0..len).rev() {
            idx[k] += 1;
            if idx[k] < count {
                break;
            }
            idx[k] = 0;
        }
    }
    acc / total as f64
}

/// Parses CSV rows `ξ_1,…,ξ_n`; a non-numeric first line is treated as a header.
pub fn read_frequency_csv(text: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == dim => out.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {dim} coordinates, found {}", v.len()),
                })
            }
            Err(_) if i == 0 && out.is_empty() => continue,
            Err(e) => return Err(Error::Parse { line: i + 1, message: e.to_string() }),
        }
    }
    Ok(out)
}

/// CSV with header `xi_1..xi_n, re, im, abs, err`.
pub fn format_batch_csv(points: &[Vec<f64>], values: &[FourierValue]) -> String {
    let dim = points.first().map_or(0, Vec::len);
    let mut out = String::new();
    let cols: Vec<String> = (1..=dim).map(|k| format!("xi_{k}[cycles/unit]")).collect();
    out.push_str(&cols.join(","));
    out.push_str(",re[product-formula],im[product-formula],abs[product-formula],err[truncation-bound]\n");
    for (xi, v) in points.iter().zip(values) {
        let coords: Vec<String> = xi.iter().map(|x| format!("{x}")).collect();
        out.push_str(&format!(
            "{},{:.15e},{:.15e},{:.15e},{:.3e}\n",
            coords.join(","),
            v.value.re,
            v.value.im,
            v.norm(),
            v.abs_error
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor_factor() -> MissingDigitsSpec {
        MissingDigitsSpec::simple(3, [0, 2]).unwrap()
    }

    #[test]
    fn interval_symbol_at_tiny_negative_frequency() {
        let f = MissingDigitsSpec::simple(5, [0, 1, 2, 3]).unwrap();
        for eta in [-5.3e-14, -2.6e-13, -1.3e-12, -4.1e-9, 3.7e-13] {
            let direct: Complex64 = (0..4).map(|d| cis_turns(-(d as f64) * eta)).sum::<Complex64>() / 4.0;
            let g = digit_symbol(&f, &[eta]).unwrap();
            assert!((g - direct).norm() < 1e-14, "{eta}: {g} vs {direct}");
        }
    }

    #[test]
    fn cantor_symbol_is_cosine() {
        let f = cantor_factor();
        for &x in &[0.1, 0.37, 1.0 / 3.0, 2.9, -4.2] {
            let g = digit_symbol(&f, &[x]).unwrap();
            assert!((g.norm() - (TAU * x).cos().abs()).abs() < 1e-14, "x = {x}");
        }
        assert!((digit_symbol(&f, &[1.0 / 3.0]).unwrap().norm() - 0.5).abs() < 1e-14);
        assert_eq!(digit_symbol(&f, &[0.0]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn complete_sums_vanish() {
        let f = MissingDigitsSpec::lebesgue(7, 1).unwrap();
        for k in 1..7 {
            assert!(digit_symbol(&f, &[k as f64 / 7.0]).unwrap().norm() < 1e-14);
        }
        let f2 = MissingDigitsSpec::lebesgue(4, 2).unwrap();
        assert!(digit_symbol(&f2, &[0.25, 0.5]).unwrap().norm() < 1e-14);
    }

    #[test]
    fn interval_closed_form_matches_direct_sum() {
        let interval = MissingDigitsSpec::simple(11, 2..=8).unwrap();
        let sym = FactorSymbol::new(&interval);
        assert!(matches!(sym.kind, SymbolKind::Interval { .. }));
        for &x in &[0.013, 0.25, 0.77, 3.3, -0.41] {
            let direct: Complex64 =
                (2..=8u64).map(|d| cis_turns(-(d as f64) * x)).sum::<Complex64>() / 7.0;
            assert!((sym.eval(&[x]).unwrap() - direct).norm() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn truncation_depth_examples() {
        // M = 2, p = 3: ceil(log_3(2π·2 / (2·1e-9))) = 21
        assert_eq!(truncation_depth(1.0, 1e-9, &cantor_factor()), 21);
        assert_eq!(truncation_depth(0.0, 1e-9, &cantor_factor()), 0);
        assert!(truncation_depth(5.0, 1e-6, &cantor_factor()) < truncation_depth(5.0, 1e-12, &cantor_factor()));
    }

    #[test]
    fn transform_at_origin_is_exact() {
        let spec = ProductMeasureSpec::power(cantor_factor(), 2).unwrap();
        let v = fourier_transform(&spec, &[0.0, 0.0], 1e-9).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert_eq!(v.abs_error, 0.0);
    }

    #[test]
    fn cantor_at_one_matches_cosine_product() {
        let spec = ProductMeasureSpec::single(cantor_factor());
        let v = fourier_transform(&spec, &[1.0], 1e-12).unwrap();
        let expected: f64 = (1..60).map(|j| (TAU / 3f64.powi(j)).cos().abs()).product();
        assert!((v.norm() - expected).abs() < 1e-11);
        assert!(v.abs_error <= 1e-12);
    }

    #[test]
    fn lebesgue_vanishes_at_integers() {
        let spec = ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(10, 1).unwrap());
        assert!(fourier_transform(&spec, &[5.0], 1e-10).unwrap().norm() <= 1e-9);
    }

    #[test]
    fn oracle_point_mass() {
        let spec = ProductMeasureSpec::single(MissingDigitsSpec::simple(5, [3]).unwrap());
        let atom = 3.0 / 4.0;
        let xi = 2.7;
        let o = fourier_oracle(&spec, &[xi], 6, 1000).unwrap();
        assert!((o - cis_turns(-atom * xi)).norm() < 1e-12);
        assert!((fourier_oracle(&spec, &[0.0], 6, 1000).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn oracle_agrees_with_product_formula() {
        let spec = ProductMeasureSpec::single(cantor_factor());
        let a = fourier_transform(&spec, &[1.0], 1e-12).unwrap().value;
        let b = fourier_oracle(&spec, &[1.0], 14, 1 << 20).unwrap();
        assert!((a - b).norm() <= 1e-5);
    }

    #[test]
    fn oracle_budget() {
        let spec = ProductMeasureSpec::single(cantor_factor());
        assert!(matches!(fourier_oracle(&spec, &[1.0], 30, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn symbolic_base_interval() {
        let spec = crate::config::parse_spec("base=10^10000 digits=1..10^8000 n=1").unwrap();
        assert_eq!(fourier_transform(&spec, &[0.0], 1e-9).unwrap().value, Complex64::new(1.0, 0.0));
        // ξ/p underflows, so the product is empty and λ̂ ≈ 1 up to the tail bound
        let v = fourier_transform(&spec, &[0.5], 1e-9).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert!(v.abs_error <= 1e-9);
        let small = crate::config::parse_spec("base=10^30 digits=1..1000 n=1").unwrap();
        let v = fourier_transform(&small, &[3.0], 1e-9).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let pts = read_frequency_csv("xi1,xi2\n0,0\n1.5,-2\n", 2).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.5, -2.0]]);
        assert!(read_frequency_csv("1,2,3\n", 2).is_err());
        let spec = ProductMeasureSpec::power(cantor_factor(), 2).unwrap();
        let vals: Vec<FourierValue> = fourier_batch(&spec, &pts, 1e-9).into_iter().map(|r| r.unwrap()).collect();
        let csv = format_batch_csv(&pts, &vals);
        assert!(csv.starts_with("xi_1[cycles/unit],xi_2[cycles/unit],re"));
        assert_eq!(csv.lines().count(), 3);
    }
}
