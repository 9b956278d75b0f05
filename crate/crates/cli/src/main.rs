//! `mdproj` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mdproj::certify::{certify_linear, certify_radial_lp, factor_candidates, preset, CertifyOptions, Verdict};
use mdproj::config::render_spec;
use mdproj::dimension::{
    crude_bound_for, grid_lower_bound, l2_dimension, partial_sum_s_k, product_bound, rectangle_bound, sup_f,
    LatticeWindow,
};
use mdproj::fourier::{fourier_batch, format_batch_csv, read_frequency_csv};
use mdproj::graham::{density_report, search, RestrictionSystem};
use mdproj::projection::{
    default_u_grid, exceptional_directions, linear_density_mc, linear_density_smoothed, linspace,
    lp_criterion_integral, radial_density_mc, radial_l2_norm, slab_integral, stripe_integral,
};
use mdproj::{parse_spec, Error, ProductMeasureSpec, DEFAULT_BUDGET};

const EXIT_USAGE: u8 = 64;
const EXIT_BUDGET: u8 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "mdproj",
    version,
    about = "Fourier dimension bounds and projections of missing-digits measures",
    after_help = "Re-run a recorded invocation with: mdproj --replay MANIFEST"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Measure specification file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Inline measure specification, e.g. "base=3 digits={0,2} n=1".
    #[arg(long, global = true, value_name = "TEXT", conflicts_with = "config")]
    spec: Option<String>,
    /// Seed for Monte Carlo and random θ.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
    /// Print JSON to stdout even for tabular commands.
    #[arg(long, global = true)]
    json: bool,
    /// Write the CSV table to PATH ("-" for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Maximum lattice points, grid cells or cylinders per computation.
    #[arg(long, global = true, value_name = "CELLS", default_value_t = DEFAULT_BUDGET, value_parser = parse_budget)]
    budget: u64,
    /// Write the run manifest to PATH instead of stderr.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bounds for the l¹ Fourier dimension of the configured measure.
    DimBound(DimBoundArgs),
    /// Certify the radial L^p or linear projection criterion.
    Certify(CertifyArgs),
    /// Evaluate the Fourier transform at given frequencies.
    FourierEval(FourierArgs),
    /// Tube densities and L² norm of a radial projection (plane).
    RadialDensity(RadialArgs),
    /// Density of a linear projection (plane).
    LinearDensity(LinearArgs),
    /// Stripe, slab and L^p criterion integrals of |λ̂|.
    StripeScan(StripeArgs),
    /// Integers with restricted digits in several bases.
    Graham(GrahamArgs),
    /// Certify one of the built-in example measures.
    Preset(PresetArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Method {
    All,
    Grid,
    Crude,
    Rectangle,
}

#[derive(Args, Debug)]
struct DimBoundArgs {
    #[arg(long, value_enum, default_value_t = Method::All)]
    method: Method,
    /// Grid step for the supremum search.
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
    /// Also check S_k ≤ (sup f)^k for k = 1..K at random shifts.
    #[arg(long, value_name = "K")]
    check_sk: Option<u32>,
    /// Number of random shifts for --check-sk.
    #[arg(long, default_value_t = 100)]
    shifts: usize,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("criterion").required(true).args(["radial", "linear"])))]
struct CertifyArgs {
    /// Radial L^p criterion with this exponent p.
    #[arg(long, value_name = "P")]
    radial: Option<u32>,
    /// Linear (continuous density) criterion.
    #[arg(long)]
    linear: bool,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("points").required(true).multiple(true).args(["xi", "input"])))]
struct FourierArgs {
    /// Frequency as comma-separated coordinates; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    xi: Vec<Point>,
    /// CSV file of frequencies, one per row.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct RadialArgs {
    /// Viewpoint outside the support, "x,y".
    #[arg(long, allow_hyphen_values = true)]
    viewpoint: Point,
    /// Tube half-width δ.
    #[arg(long, default_value_t = 1.0 / 27.0)]
    delta: f64,
    /// Minimum number of angles (refined automatically to resolve δ).
    #[arg(long, default_value_t = 0)]
    angles: usize,
    /// Monte Carlo angular density from this many samples instead of tube counts.
    #[arg(long, value_name = "SAMPLES")]
    mc: Option<usize>,
    /// Angular kernel half-width for --mc (default: δ).
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("dir").required(true).args(["direction", "angle"])))]
struct LinearArgs {
    /// Projection direction θ, "a,b".
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<Point>,
    /// Projection direction as an angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    /// Frequency cutoff T.
    #[arg(long, default_value_t = 729.0)]
    t_max: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long, allow_hyphen_values = true, requires = "u_max")]
    u_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "u_min")]
    u_max: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Monte Carlo estimate from this many samples instead of Fourier inversion.
    #[arg(long, value_name = "SAMPLES")]
    mc: Option<usize>,
    /// Box-kernel half-width: the Monte Carlo kernel, or a smoothing of the inversion.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StripeMode {
    /// Stripe integrals over an angle grid and the exceptional directions.
    Exceptional,
    /// One stripe integral.
    Stripe,
    /// The L^p criterion integral with dyadic slopes.
    Lp,
    /// The thin-slab integral with dyadic slopes.
    Slab,
}

#[derive(Args, Debug)]
struct StripeArgs {
    #[arg(long, value_enum, default_value_t = StripeMode::Exceptional)]
    mode: StripeMode,
    /// Annulus radius R.
    #[arg(long, default_value_t = 81.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// l¹ dimension bound s₁ (default: best certified bound).
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long, default_value_t = 360)]
    angles: usize,
    /// Direction θ for stripe and slab modes.
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<Point>,
    #[arg(long, default_value_t = 2)]
    p_exp: u32,
    /// Lattice radius for lp mode (power of two).
    #[arg(long, default_value_t = 1024)]
    r_max: u64,
    /// Slab length for slab mode.
    #[arg(long, default_value_t = 1024.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct GrahamArgs {
    /// Restrictions, e.g. "3:{0,1};5:{0,1,2}".
    #[arg(long)]
    system: String,
    #[arg(long)]
    limit: u64,
    /// Exact scales t_i, e.g. "1,1/2".
    #[arg(long)]
    scales: Option<String>,
    /// Also report counts and growth exponents at these limits.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// theorem-a or theorem-b.
    name: String,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(v >= 1.0) || v > u64::MAX as f64 {
        return Err(format!("budget {s} must be at least 1"));
    }
    Ok(v as u64)
}

/// Comma-separated coordinates.
#[derive(Debug, Clone)]
struct Point(Vec<f64>);

impl std::str::FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| format!("'{c}' is not a number")))
            .collect::<Result<_, _>>()
            .map(Point)
    }
}

/// What a subcommand produced.
struct Outcome {
    json: Value,
    csv: Option<String>,
    exit: u8,
}

impl Outcome {
    fn json(json: Value) -> Self {
        Self { json, csv: None, exit: 0 }
    }

    fn table(json: Value, csv: String) -> Self {
        Self { json, csv: Some(csv), exit: 0 }
    }
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    argv: Vec<String>,
    config: Option<String>,
    seed: u64,
    workers: Option<usize>,
    budget: u64,
    versions: Value,
    parallel: bool,
    wall_time_s: f64,
    outputs: Vec<String>,
    exit_code: u8,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Budget(_) => EXIT_BUDGET,
            Failure::Io(_) => 74,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let argv = match replay_argv(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let subcommand = subcommand_name(&cli.command).to_string();
    let mut outputs = Vec::new();
    let mut config = None;
    let result = run(&cli, &mut config, &mut outputs);
    let exit = match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    };
    let manifest = RunManifest {
        subcommand,
        argv,
        config,
        seed: cli.global.seed,
        workers: cli.global.workers,
        budget: cli.global.budget,
        versions: json!({ "mdproj": env!("CARGO_PKG_VERSION") }),
        parallel: mdproj::par::is_parallel(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs,
        exit_code: exit,
    };
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    match &cli.global.manifest {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write manifest {}: {e}", path.display());
            }
        }
        None => eprintln!("{text}"),
    }
    ExitCode::from(exit)
}

/// `mdproj --replay MANIFEST` re-runs the argv recorded in a manifest.
fn replay_argv(argv: Vec<String>) -> Result<Vec<String>, String> {
    if argv.len() != 3 || argv[1] != "--replay" {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&argv[2]).map_err(|e| format!("cannot read {}: {e}", argv[2]))?;
    let manifest: Value = serde_json::from_str(&text).map_err(|e| format!("bad manifest {}: {e}", argv[2]))?;
    serde_json::from_value(manifest["argv"].clone()).map_err(|e| format!("bad manifest argv: {e}"))
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::DimBound(_) => "dim-bound",
        Command::Certify(_) => "certify",
        Command::FourierEval(_) => "fourier-eval",
        Command::RadialDensity(_) => "radial-density",
        Command::LinearDensity(_) => "linear-density",
        Command::StripeScan(_) => "stripe-scan",
        Command::Graham(_) => "graham",
        Command::Preset(_) => "preset",
    }
}

fn run(cli: &Cli, config: &mut Option<String>, outputs: &mut Vec<String>) -> Result<u8, Failure> {
    let g = &cli.global;
    if let Some(k) = g.workers {
        set_workers(k)?;
    }
    let mut load = || -> Result<ProductMeasureSpec, Failure> {
        let text = match (&g.config, &g.spec) {
            (Some(path), _) => std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
            (None, Some(inline)) => inline.clone(),
            (None, None) => return Err(Failure::Usage("this subcommand needs --config FILE or --spec TEXT".into())),
        };
        let spec = parse_spec(&text)?;
        *config = Some(render_spec(&spec));
        Ok(spec)
    };
    let outcome = match &cli.command {
        Command::DimBound(a) => dim_bound(&load()?, a, g)?,
        Command::Certify(a) => certify(&load()?, a, g)?,
        Command::FourierEval(a) => fourier_eval(&load()?, a)?,
        Command::RadialDensity(a) => radial(&load()?, a, g)?,
        Command::LinearDensity(a) => linear(&load()?, a, g)?,
        Command::StripeScan(a) => stripes(&load()?, a, g)?,
        Command::Graham(a) => graham(a, g)?,
        Command::Preset(a) => presets(a)?,
    };
    emit(&outcome, g, outputs)?;
    Ok(outcome.exit)
}

#[cfg(feature = "parallel")]
fn set_workers(k: usize) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size worker pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn set_workers(k: usize) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    Ok(())
}

fn emit(outcome: &Outcome, g: &Global, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let pretty = || serde_json::to_string_pretty(&outcome.json).expect("output serializes");
    match (&outcome.csv, &g.csv) {
        (Some(csv), Some(path)) if path.as_os_str() != "-" => {
            std::fs::write(path, csv).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
            outputs.push(path.display().to_string());
            println!("{}", pretty());
        }
        (Some(csv), _) if !g.json => print!("{csv}"),
        _ => println!("{}", pretty()),
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Certified => 0,
        Verdict::NotCertified => 1,
        Verdict::Inconclusive => 2,
    }
}

fn options(g: &Global) -> CertifyOptions {
    CertifyOptions { budget: g.budget, ..CertifyOptions::default() }
}

fn dim_bound(spec: &ProductMeasureSpec, a: &DimBoundArgs, g: &Global) -> Result<Outcome, Failure> {
    let mut factors = Vec::new();
    let mut chosen = Vec::new();
    for (i, f) in spec.factors.iter().enumerate() {
        let bounds = match a.method {
            Method::All => factor_candidates(f, &options(g)),
            Method::Grid => vec![grid_lower_bound(f, a.grid_step, true, g.budget)?],
            Method::Crude => vec![crude_bound_for(f)?],
            Method::Rectangle => vec![rectangle_bound(f)?],
        };
        let best = bounds
            .iter()
            .max_by(|x, y| x.value.total_cmp(&y.value))
            .cloned()
            .ok_or_else(|| Failure::Usage(format!("no bound applies to factor {i}")))?;
        factors.push(json!({ "index": i, "base": f.base.to_string(), "bounds": bounds, "best": best }));
        chosen.push(best);
    }
    let mut out = json!({
        "hausdorff_dim": spec.hausdorff_dim(),
        "l2_dim": l2_dimension(spec),
        "factors": factors,
        "product": product_bound(&chosen),
    });
    if let Some(k) = a.check_sk {
        out["s_k_check"] = check_sk(spec, k, a, g)?;
    }
    Ok(Outcome::json(out))
}

/// `S_k(θ)` over one period against `(certified sup f)^k`, single-factor measures only.
fn check_sk(spec: &ProductMeasureSpec, k_max: u32, a: &DimBoundArgs, g: &Global) -> Result<Value, Failure> {
    use rand::{Rng, SeedableRng};
    let [factor] = spec.factors.as_slice() else {
        return Err(Failure::Usage("--check-sk needs a single-factor measure".into()));
    };
    let sup = sup_f(factor, a.grid_step, g.budget)?.certified_upper;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(g.seed);
    let n = spec.total_dim();
    let mut rows = Vec::new();
    let mut holds = true;
    for k in 1..=k_max {
        let mut worst: f64 = 0.0;
        for _ in 0..a.shifts {
            let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let s = partial_sum_s_k(spec, &theta, k, LatticeWindow::Period, 1e-12, g.budget)?;
            worst = worst.max(s / sup.powi(k as i32));
        }
        holds &= worst <= 1.0;
        rows.push(json!({ "k": k, "max_ratio": worst }));
    }
    Ok(json!({ "certified_sup": sup, "window": LatticeWindow::Period, "rows": rows, "holds": holds }))
}

fn certify(spec: &ProductMeasureSpec, a: &CertifyArgs, g: &Global) -> Result<Outcome, Failure> {
    let report = match a.radial {
        Some(p) => certify_radial_lp(spec, p, &options(g))?,
        None => certify_linear(spec, &options(g))?,
    };
    let exit = verdict_code(report.verdict);
    Ok(Outcome { json: serde_json::to_value(&report).expect("report serializes"), csv: None, exit })
}

fn fourier_eval(spec: &ProductMeasureSpec, a: &FourierArgs) -> Result<Outcome, Failure> {
    let mut points: Vec<Vec<f64>> = a.xi.iter().map(|p| p.0.clone()).collect();
    if let Some(path) = &a.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        points.extend(read_frequency_csv(&text, spec.total_dim())?);
    }
    let values = fourier_batch(spec, &points, a.tol).into_iter().collect::<Result<Vec<_>, _>>()?;
    let json = json!({ "points": points, "values": values, "tol": a.tol });
    Ok(Outcome::table(json, format_batch_csv(&points, &values)))
}

fn radial(spec: &ProductMeasureSpec, a: &RadialArgs, g: &Global) -> Result<Outcome, Failure> {
    match a.mc {
        Some(samples) => {
            let h = a.bandwidth.unwrap_or(a.delta);
            let p = radial_density_mc(spec, &a.viewpoint.0, samples, h, g.seed, None)?;
            let json = json!({ "method": p.method, "flags": p.flags, "metadata": p.metadata });
            Ok(Outcome::table(json, p.to_csv()))
        }
        None => {
            let r = radial_l2_norm(spec, &a.viewpoint.0, a.delta, a.angles, g.budget)?;
            let json = json!({
                "l2_norm_squared": r.value,
                "lower": r.lower,
                "upper": r.upper,
                "depth": r.depth,
                "angles": r.profile.grid.len(),
                "delta": a.delta,
            });
            Ok(Outcome::table(json, r.profile.to_csv()))
        }
    }
}

fn linear(spec: &ProductMeasureSpec, a: &LinearArgs, g: &Global) -> Result<Outcome, Failure> {
    let theta = match (&a.direction, a.angle) {
        (Some(d), _) => d.0.clone(),
        (None, Some(phi)) => vec![phi.cos(), phi.sin()],
        (None, None) => unreachable!("clap requires a direction"),
    };
    let grid = match (a.u_min, a.u_max) {
        (Some(lo), Some(hi)) if hi > lo => linspace(lo, hi, a.points.max(2)),
        (Some(_), Some(_)) => return Err(Failure::Usage("--u-max must exceed --u-min".into())),
        _ => default_u_grid(spec, &theta, a.points)?,
    };
    let p = match a.mc {
        Some(samples) => {
            let h = a.bandwidth.ok_or_else(|| Failure::Usage("--mc needs --bandwidth".into()))?;
            linear_density_mc(spec, &theta, &grid, samples, h, g.seed)?
        }
        None => linear_density_smoothed(spec, &theta, &grid, a.t_max, a.tol, a.bandwidth, g.budget)?,
    };
    let json = json!({ "method": p.method, "flags": p.flags, "mass": p.mass(), "metadata": p.metadata });
    Ok(Outcome::table(json, p.to_csv()))
}

fn stripes(spec: &ProductMeasureSpec, a: &StripeArgs, g: &Global) -> Result<Outcome, Failure> {
    let direction = || a.direction.clone().map(|d| d.0).ok_or_else(|| Failure::Usage("this mode needs --direction".into()));
    match a.mode {
        StripeMode::Exceptional => {
            let s1 = match a.s1 {
                Some(s) => s,
                None => mdproj::certify::best_bound(spec, &options(g))?.0.value,
            };
            let scan = exceptional_directions(spec, a.radius, a.eps, s1, a.angles, a.tol, g.budget)?;
            let json = json!({
                "radius": scan.radius,
                "s1": s1,
                "eps": a.eps,
                "threshold": scan.threshold,
                "annulus_total": scan.annulus_total,
                "exceptional": scan.exceptional,
            });
            let mut outcome = Outcome::table(json, scan.to_csv());
            outcome.exit = u8::from(scan.exceptional.is_empty());
            Ok(outcome)
        }
        StripeMode::Stripe => {
            let v = stripe_integral(spec, &direction()?, a.radius, a.tol, g.budget)?;
            Ok(Outcome::json(json!({ "radius": a.radius, "direction": direction()?, "stripe_integral": v })))
        }
        StripeMode::Lp => {
            let r = lp_criterion_integral(spec, a.p_exp, a.r_max, a.tol, g.budget)?;
            Ok(Outcome::json(serde_json::to_value(&r).expect("serializes")))
        }
        StripeMode::Slab => {
            let r = slab_integral(spec, &direction()?, a.t_max, a.tol, g.budget)?;
            Ok(Outcome::json(serde_json::to_value(&r).expect("serializes")))
        }
    }
}

fn graham(a: &GrahamArgs, g: &Global) -> Result<Outcome, Failure> {
    let mut system: RestrictionSystem = a.system.parse()?;
    if let Some(scales) = &a.scales {
        system = system.with_scales(scales)?;
    }
    let members = search(&system, a.limit, g.budget)?;
    let mut json = json!({ "system": system, "limit": a.limit, "count": members.len(), "members": members });
    if !a.checkpoints.is_empty() {
        json["density"] = serde_json::to_value(density_report(&system, &a.checkpoints, g.budget)?).expect("serializes");
    }
    let mut csv = String::from("n[integer]\n");
    for m in &members {
        csv.push_str(&format!("{m}\n"));
    }
    let mut outcome = Outcome::table(json, csv);
    outcome.exit = u8::from(members.is_empty());
    Ok(outcome)
}

fn presets(a: &PresetArgs) -> Result<Outcome, Failure> {
    let cases = preset(&a.name)?;
    let exit = cases.iter().map(|c| verdict_code(c.report.verdict)).max().unwrap_or(0);
    let json = json!({
        "preset": a.name,
        "cases": cases
            .iter()
            .map(|c| json!({ "label": c.label, "config": render_spec(&c.spec), "report": c.report }))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome { json, csv: None, exit })
}
