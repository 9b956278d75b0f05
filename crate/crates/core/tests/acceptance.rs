//! Acceptance criteria; each test prints one `PASS`/`FAIL` line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mdproj::certify::{best_bound, preset, CertifyOptions, Verdict};
use mdproj::dimension::{
    crude_bound, crude_bound_for, grid_lower_bound, l2_dimension, partial_sum_s_k, rectangle_bound, sup_f,
    LatticeWindow,
};
use mdproj::fourier::{fourier_oracle, fourier_transform};
use mdproj::graham::{digits_ok, enumerate, search, Restriction, RestrictionSystem};
use mdproj::projection::{
    default_u_grid, exceptional_directions, linear_density, linear_density_mc, linear_density_smoothed,
    radial_l2_norm, stripe_integral, ProfileFlag,
};
use mdproj::{BasePower, MissingDigitsSpec, ProductMeasureSpec, DEFAULT_BUDGET};

fn verdict(id: &str, what: &str, pass: bool, detail: String) {
    println!("{} criterion {id}: {what} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn cantor3() -> MissingDigitsSpec {
    MissingDigitsSpec::simple(3, [0, 2]).unwrap()
}

fn cantor5() -> MissingDigitsSpec {
    MissingDigitsSpec::simple(5, [0, 1, 2, 3]).unwrap()
}

fn squared(f: MissingDigitsSpec) -> ProductMeasureSpec {
    ProductMeasureSpec::power(f, 2).unwrap()
}

/// Lebesgue measure on [0,1]²: density of `(x+y)/√2` is a triangle on `[0, √2]`.
fn diagonal_triangle(u: f64) -> f64 {
    let s = 2f64.sqrt();
    (s - 2.0 * (u - s / 2.0).abs()).max(0.0)
}

#[test]
fn criterion_01_theorem_a() {
    let start = Instant::now();
    let cases = preset("theorem-a").unwrap();
    let r = &cases[0].report;
    let bound = r.bound_used.value;
    let pass = (bound - 1.59907).abs() <= 1e-4
        && bound > 1.5
        && r.verdict == Verdict::Certified
        && within(start, Duration::from_secs(1));
    verdict(
        "1",
        "theorem-a product bound 1.59907 ± 1e-4, certified, < 1 s",
        pass,
        format!("bound {bound:.6}, verdict {:?}, {:?}", r.verdict, start.elapsed()),
    );
}

#[test]
fn criterion_02_theorem_b() {
    let start = Instant::now();
    let cases = preset("theorem-b").unwrap();
    let a = cases[0].report.bound_used.value;
    let b = cases[1].report.bound_used.value;
    let pass = (a - 1.000084).abs() <= 2e-5
        && a > 1.0
        && (b - 1.000067).abs() <= 2e-5
        && cases.iter().all(|c| c.report.verdict == Verdict::Certified)
        && within(start, Duration::from_secs(1));
    verdict(
        "2",
        "theorem-b bounds 1.000084 / 1.000067 ± 2e-5, both certified, < 1 s",
        pass,
        format!("λ₁×λ₂ {a:.6}, λ₁×λ₁ {b:.6}, {:?}", start.elapsed()),
    );
}

#[test]
fn criterion_03_partial_sums_below_sup_power() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for factor in [cantor3(), cantor5()] {
        let sup = sup_f(&factor, 1e-4, DEFAULT_BUDGET).unwrap().certified_upper;
        let spec = ProductMeasureSpec::single(factor);
        for _ in 0..100 {
            let theta = [rng.random::<f64>()];
            for k in 1..=5 {
                let s = partial_sum_s_k(&spec, &theta, k, LatticeWindow::Period, 1e-12, DEFAULT_BUDGET).unwrap();
                worst = worst.max(s / sup.powi(k as i32));
            }
        }
    }
    let pass = worst <= 1.0 && within(start, Duration::from_secs(300));
    verdict(
        "3",
        "S_k ≤ (certified sup f)^k, k = 1..5, 100 shifts, two Cantor measures",
        pass,
        format!("worst ratio {worst:.4}, {:?}", start.elapsed()),
    );
}

#[test]
fn criterion_04a_crude_bound_p10() {
    let v = crude_bound(1, &BasePower::integer(10).unwrap(), 1).unwrap().value;
    verdict("4a", "crude bound (n=1, p=10, t=1) = 0.2056 ± 1e-3", (v - 0.2056).abs() <= 1e-3, format!("value {v:.5}"));
}

#[test]
fn criterion_04b_crude_bound_p1e6() {
    let v = crude_bound(1, &BasePower::integer(1_000_000).unwrap(), 1).unwrap().value;
    verdict("4b", "crude bound (n=1, p=10^6, t=1) > 0.99", v > 0.99, format!("value {v:.5}"));
}

#[test]
fn criterion_05_oracle_agreement() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for spec in [ProductMeasureSpec::single(cantor3()), squared(cantor5())] {
        let n = spec.total_dim();
        for _ in 0..200 {
            // uniform in the ball of radius 100
            let xi: Vec<f64> = loop {
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..=100.0)).collect();
                if v.iter().map(|x| x * x).sum::<f64>() <= 1e4 {
                    break v;
                }
            };
            let product = fourier_transform(&spec, &xi, 1e-12).unwrap().value;
            let oracle = fourier_oracle(&spec, &xi, 14, DEFAULT_BUDGET).unwrap();
            worst = worst.max((product - oracle).norm());
        }
    }
    let pass = worst <= 1e-5 && within(start, Duration::from_secs(60));
    verdict(
        "5",
        "product formula vs depth-14 oracle ≤ 1e-5 on 200 frequencies each",
        pass,
        format!("worst {worst:.2e}, {:?}", start.elapsed()),
    );
}

#[test]
fn criterion_06_bound_consistency() {
    let specs = [
        cantor3(),
        cantor5(),
        MissingDigitsSpec::simple(10, 0..9).unwrap(),
        MissingDigitsSpec::simple(7, [1, 2, 3, 4]).unwrap(),
        MissingDigitsSpec::lebesgue(4, 2).unwrap(),
        MissingDigitsSpec::simple(5, [2]).unwrap(),
    ];
    let mut excess = f64::NEG_INFINITY;
    for f in &specs {
        let dim = f.hausdorff_dim();
        let bounds = [
            grid_lower_bound(f, 1e-3, true, DEFAULT_BUDGET).ok(),
            grid_lower_bound(f, 1e-3, false, DEFAULT_BUDGET).ok(),
            crude_bound_for(f).ok(),
            rectangle_bound(f).ok(),
            Some(l2_dimension(&ProductMeasureSpec::single(f.clone()))),
        ];
        for b in bounds.into_iter().flatten() {
            excess = excess.max(b.value - dim);
        }
    }
    let grid = grid_lower_bound(&cantor3(), 1e-4, true, DEFAULT_BUDGET).unwrap().value;
    let atom = grid_lower_bound(&MissingDigitsSpec::simple(5, [2]).unwrap(), 1e-3, true, DEFAULT_BUDGET).unwrap();
    let pass = excess <= 1e-9 && (grid - 0.36907).abs() <= 1e-3 && atom.value == 0.0 && atom.was_clamped();
    verdict(
        "6",
        "bounds ≤ dim_H, Cantor grid bound 0.36907 ± 1e-3, single digit clamps to 0",
        pass,
        format!("max excess {excess:.2e}, grid {grid:.5}, single digit {} clamped {}", atom.value, atom.was_clamped()),
    );
}

#[test]
fn criterion_07_linear_projections() {
    let start = Instant::now();
    let budget = 1 << 34;
    let lebesgue = ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(2, 2).unwrap());
    let diagonal = [1.0, 1.0];
    let grid = default_u_grid(&lebesgue, &diagonal, 601).unwrap();
    let inversion = linear_density(&lebesgue, &diagonal, &grid, 128.0, 1e-10, budget).unwrap();
    let l1_fourier = inversion.l1_distance_to(diagonal_triangle);
    let mc = linear_density_mc(&lebesgue, &diagonal, &grid, 1_000_000, 0.01, 7).unwrap();
    let l1_mc = mc.l1_distance_to(diagonal_triangle);

    let cantor = squared(cantor3());
    let generic = [1f64.cos(), 1f64.sin()];
    let h = 0.01;
    let grid = default_u_grid(&cantor, &generic, 600).unwrap();
    let fourier = linear_density_smoothed(&cantor, &generic, &grid, 729.0, 1e-10, Some(h), budget).unwrap();
    let sampled = linear_density_mc(&cantor, &generic, &grid, 1_000_000, h, 11).unwrap();
    let l1_cantor = fourier.l1_distance(&sampled);

    let axis = [1.0, 0.0];
    let grid = default_u_grid(&cantor, &axis, 600).unwrap();
    let coordinate = linear_density(&cantor, &axis, &grid, 729.0, 1e-10, budget).unwrap();
    let flagged = coordinate.has_flag(ProfileFlag::NonConvergent);

    let pass = l1_fourier <= 0.03
        && l1_mc <= 0.03
        && l1_cantor <= 0.05
        && flagged
        && within(start, Duration::from_secs(300));
    verdict(
        "7",
        "Lebesgue diagonal triangle (Fourier and MC ≤ 3% L¹), Cantor² Fourier vs MC ≤ 0.05, coordinate flagged",
        pass,
        format!(
            "Fourier {l1_fourier:.4}, MC {l1_mc:.4}, Cantor² {l1_cantor:.4}, coordinate NonConvergent {flagged}, {:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_08_radial_stability() {
    let start = Instant::now();
    let budget = 1 << 34;
    let norms = |spec: &ProductMeasureSpec, x: [f64; 2], p: f64| {
        let a = radial_l2_norm(spec, &x, p.powi(-3), 0, budget).unwrap().value;
        let b = radial_l2_norm(spec, &x, p.powi(-4), 0, budget).unwrap().value;
        (a, b)
    };
    let lebesgue = ProductMeasureSpec::single(MissingDigitsSpec::lebesgue(3, 2).unwrap());
    let atom = squared(MissingDigitsSpec::simple(3, [0]).unwrap());
    let (l3, l4) = norms(&lebesgue, [-1.0, -1.0], 3.0);
    let (a3, a4) = norms(&atom, [-1.0, 0.5], 3.0);
    let (c3, c4) = norms(&squared(cantor5()), [-1.0, 0.5], 3.0);
    let drift = |a: f64, b: f64| (b - a).abs() / a;
    let pass = drift(l3, l4) <= 0.10
        && a4 >= 2.0 * a3
        && drift(c3, c4) <= 0.25
        && within(start, Duration::from_secs(600));
    verdict(
        "8",
        "radial L² drift δ=3^-3→3^-4: Lebesgue ≤ 10%, atom ≥ 2×, Cantor(5)² ≤ 25%",
        pass,
        format!(
            "Lebesgue {:.2}%, atom ×{:.2}, Cantor(5)² {:.2}%, {:?}",
            100.0 * drift(l3, l4),
            a4 / a3,
            100.0 * drift(c3, c4),
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_09_exceptional_directions() {
    let start = Instant::now();
    let spec = squared(cantor3());
    let budget = 1 << 34;
    let coordinate = stripe_integral(&spec, &[1.0, 0.0], 81.0, 1e-10, budget).unwrap();
    let generic = stripe_integral(&spec, &[1f64.cos(), 1f64.sin()], 81.0, 1e-10, budget).unwrap();
    let s1 = best_bound(&spec, &CertifyOptions::default()).unwrap().0.value;
    let scan = exceptional_directions(&spec, 81.0, 0.01, s1, 360, 1e-10, budget).unwrap();
    let found = |angle: f64| scan.exceptional.iter().any(|e| (e.angle - angle).abs() < 1e-9 || (e.angle - angle).abs() > PI - 1e-9);
    let ratio = coordinate / generic;
    let pass = ratio >= 5.0 && found(0.0) && found(FRAC_PI_2) && within(start, Duration::from_secs(120));
    verdict(
        "9",
        "Cantor² at R=81: coordinate stripes ≥ 5× generic and listed as exceptional",
        pass,
        format!(
            "ratio {ratio:.2}, axes listed {}/{}, {} exceptional of 360, {:?}",
            found(0.0),
            found(FRAC_PI_2),
            scan.exceptional.len(),
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_10_graham() {
    let start = Instant::now();
    let system: RestrictionSystem = "3:{0,1};5:{0,1,2}".parse().unwrap();
    let found = search(&system, 100, DEFAULT_BUDGET).unwrap();
    let example = found == [1, 10, 12, 27, 30, 31, 36, 37];

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    for _ in 0..50 {
        let restrictions: Vec<Restriction> = (0..rng.random_range(1..=3))
            .map(|_| {
                let base = rng.random_range(3..=10u64);
                let mut digits: Vec<u64> = (0..base).filter(|_| rng.random_bool(0.5)).collect();
                if digits.is_empty() {
                    digits.push(rng.random_range(0..base));
                }
                Restriction::new(base, digits, 1u64.into()).unwrap()
            })
            .collect();
        let system = RestrictionSystem::new(restrictions.clone()).unwrap();
        let limit = rng.random_range(1..=100_000u64);
        let brute: Vec<u64> = (1..=limit)
            .filter(|&m| restrictions.iter().all(|r| digits_ok(m, r.base, &r.digits)))
            .collect();
        if enumerate(&system, limit, DEFAULT_BUDGET).unwrap() != brute {
            mismatches += 1;
        }
    }

    let mut count_errors = 0;
    for (base, digits, k) in [(3u64, vec![0u64, 1], 10u32), (5, vec![0, 2, 4], 7), (10, vec![0, 1, 3, 7, 9], 5)] {
        let expected = (digits.len() as u64).pow(k) - 1;
        let single = RestrictionSystem::new(vec![Restriction::new(base, digits.clone(), 1u64.into()).unwrap()]).unwrap();
        let got = enumerate(&single, base.pow(k) - 1, DEFAULT_BUDGET).unwrap().len() as u64;
        if got != expected {
            count_errors += 1;
        }
    }
    let pass = example && mismatches == 0 && count_errors == 0 && within(start, Duration::from_secs(60));
    verdict(
        "10",
        "Graham example rows, DFS ≡ brute force on 50 systems, single-restriction counts",
        pass,
        format!("example {example}, mismatches {mismatches}, count errors {count_errors}, {:?}", start.elapsed()),
    );
}
