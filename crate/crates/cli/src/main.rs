use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use driftgeom::acceptance;
use driftgeom::config::Config;
use driftgeom::estimates::{
    gradient_bound_bracket, gradient_sweep, harnack_factor, liouville_decay_experiment, raw_bracket, CubicCoeffs,
    EstimateParams, HarnackConstants, LiouvillePreset,
};
use driftgeom::geodesics::{comparison_check, ComparisonOptions, ComparisonReport};
use driftgeom::geometry::{BoxDomain, ChartManifold, JetFn, PotentialVariant, VectorFieldSpec};
use driftgeom::jet::Jet;
use driftgeom::operators::Nonlinearity;
use driftgeom::report::{output_root, write_run, Csv, ExperimentReport, Verdict};
use driftgeom::solver::{solve_elliptic_2d, Boundary, SolveOptions};
use driftgeom::worked_examples::{
    counterexample_bound_check, counterexample_loggrad_growth, paraboloid_printed_vs_ad, square_grid,
};
use serde_json::json;

/// Drifted-Laplacian geometry checks and experiments.
///
/// Every run writes `report.json` (and CSV grids where relevant) to
/// `<out>/<experiment>-<config hash>`. The output root is `--out`, else
/// `$DRIFTGEOM_OUT`, else `./runs`. Exit status: 0 all verdicts pass,
/// 2 some verdict fails, 1 usage or numeric error.
#[derive(Parser, Debug)]
#[command(name = "driftgeom", version)]
struct Cli {
    /// Worker threads; 1 runs serially and is bit-reproducible.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output root directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity and closed-form checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Solve Δ_X u + F(u) = 0 on a chart square with Dirichlet data.
    Solve(SolveArgs),
    /// Gradient-estimate bracket, cubic roots and Harnack factor.
    Estimate(EstimateArgs),
    /// Solver-backed experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run the acceptance suite.
    Acceptance,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Bochner identity over the fixture matrix.
    Bochner,
    /// Drifted Laplacian comparison for the distance function.
    Comparison(FixtureArgs),
    /// Paraboloid closed forms against automatic differentiation.
    Appendix {
        /// Grid points per axis on [-3, 3]².
        #[arg(long)]
        grid: Option<usize>,
    },
    /// The unbounded-drift one-dimensional family.
    Counterexample {
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated increasing positive x values.
        #[arg(long)]
        x: Option<String>,
    },
}

#[derive(Args, Debug, Default)]
struct FixtureArgs {
    /// euclidean | hyperbolic | paraboloid
    #[arg(long)]
    manifold: Option<String>,
    /// zero | unit-x | rotation | grad-phi | grad-phi-alternate
    #[arg(long)]
    drift: Option<String>,
    /// Comma-separated base point.
    #[arg(long)]
    origin: Option<String>,
    /// Comma-separated radii.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    directions: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    drift: Option<String>,
    /// exp-x | constant:C | linear:C0,CX,CY
    #[arg(long)]
    boundary: Option<String>,
    /// zero | linear:C  (F(u) = C u)
    #[arg(long)]
    nonlinearity: Option<String>,
    /// Square `lo,hi`.
    #[arg(long)]
    rect: Option<String>,
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Ball radius; `inf` for the global estimate.
    #[arg(long = "R")]
    r: Option<f64>,
    /// Constant C(n); defaults to 8n.
    #[arg(long)]
    cn: Option<f64>,
    /// Distance for the Harnack factor.
    #[arg(long)]
    distance: Option<f64>,
    /// Print only the bracket without C(n).
    #[arg(long)]
    raw_bracket: bool,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Measured sup |∇ log u|² against C(n)·bracket across radii.
    GradientSweep {
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long)]
        intervals: Option<usize>,
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long)]
        nonlinearity: Option<String>,
        #[arg(long)]
        cn: Option<f64>,
    },
    /// Q_sup over B_{R/2} across radii.
    Liouville {
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long)]
        intervals: Option<usize>,
        /// oscillation | constant:C
        #[arg(long)]
        preset: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let display_only = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if display_only { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Config::default(),
    };
    let root = cli.out.clone().unwrap_or_else(output_root);
    let started = Instant::now();
    let (report, csvs) = match cli.command {
        Command::Acceptance => return run_acceptance(&root, cli.threads, started),
        Command::Verify(Verify::Bochner) => {
            cfg.check_keys(&[])?;
            criterion_report("verify_bochner", &cfg, 1)?
        }
        Command::Verify(Verify::Comparison(f)) => verify_comparison(&mut cfg, f)?,
        Command::Verify(Verify::Appendix { grid }) => {
            set(&mut cfg, "grid", grid);
            cfg.check_keys(&["grid"])?;
            let n = cfg.parse_or("grid", 41usize)?;
            cfg.set("grid", n);
            let rep = paraboloid_printed_vs_ad(&square_grid(3.0, n))?;
            let mut verdicts: Vec<Verdict> = rep
                .rows
                .iter()
                .map(|r| {
                    let v = Verdict::at_most(format!("{}{}", r.quantity, r.variant.map(|v| format!("[{}]", v.name())).unwrap_or_default()), r.max_abs_deviation, r.tolerance);
                    if r.asserted { v } else { v.informational() }
                })
                .collect();
            verdicts.push(Verdict::holds("discrepancy_section_nonempty", !rep.inconsistencies.is_empty(), "nonempty"));
            (ExperimentReport::new("verify_appendix", &cfg, &rep, verdicts)?, vec![])
        }
        Command::Verify(Verify::Counterexample { delta, x }) => {
            set(&mut cfg, "delta", delta);
            set(&mut cfg, "x", x);
            cfg.check_keys(&["delta", "x"])?;
            let delta = cfg.parse_or("delta", 0.5)?;
            let xs = cfg.list_or("x", &[5.0, 10.0, 20.0])?;
            cfg.set("delta", delta);
            cfg.set("x", join(&xs));
            let reach = xs.iter().copied().fold(1.0, f64::max);
            let samples: Vec<f64> = (0..200).map(|k| -reach + 2.0 * reach * k as f64 / 199.0).collect();
            let bound = counterexample_bound_check(delta, &samples, None)?;
            let growth = counterexample_loggrad_growth(delta, &xs)?;
            let verdicts = vec![
                Verdict::holds("b_within_bound", bound.bound_ok, "|b| <= (1+|x|)^δ/δ"),
                Verdict::holds("b_odd", bound.odd_ok, format!("|b(x)+b(-x)| <= {:e}", bound.odd_tolerance)),
                Verdict::holds("b_diverges", bound.divergence_ok, format!("b(x_max) >= {}", bound.divergence_threshold)),
                Verdict::holds("loggrad_strictly_increasing", growth.strictly_increasing, "increasing in x"),
                Verdict::at_most("gap_ratio", growth.gap_ratio, 0.5),
            ];
            let csv = Csv::new(
                "growth.csv",
                &["x", "b", "log_u", "log_derivative", "gap"],
                growth.rows.iter().map(|r| vec![r.x, r.b, r.log_u, r.log_derivative, r.gap]).collect(),
            );
            (ExperimentReport::new("verify_counterexample", &cfg, json!({ "bound": bound, "growth": growth }), verdicts)?, vec![csv])
        }
        Command::Solve(a) => solve(&mut cfg, a)?,
        Command::Estimate(a) => match estimate(&mut cfg, a)? {
            Some(r) => r,
            None => return Ok(true),
        },
        Command::Experiment(Experiment::GradientSweep { fixture, intervals, boundary, nonlinearity, cn }) => {
            set(&mut cfg, "intervals", intervals);
            set(&mut cfg, "boundary", boundary);
            set(&mut cfg, "nonlinearity", nonlinearity);
            set(&mut cfg, "cn", cn);
            let f = resolve_fixture(&mut cfg, fixture, &["intervals", "boundary", "nonlinearity", "cn"], "paraboloid", "grad-phi", &[1.0, 2.0])?;
            let intervals = cfg.parse_or("intervals", 64usize)?;
            let bc = cfg.get("boundary").unwrap_or("linear:1,0.125,0").to_string();
            let nl = cfg.get("nonlinearity").unwrap_or("zero").to_string();
            let cn: Option<f64> = cfg.get("cn").map(|_| cfg.parse_or("cn", 0.0)).transpose()?;
            cfg.set("intervals", intervals);
            cfg.set("boundary", &bc);
            cfg.set("nonlinearity", &nl);
            let m = manifold(&f.manifold, 2.0 * f.radii.iter().copied().fold(0.0, f64::max) + f.origin.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 0.5)?;
            let x = drift(&f.drift, &m)?;
            let rep = gradient_sweep(&m, &x, &parse_nonlinearity(&nl)?, &f.origin, &f.radii, &parse_boundary(&bc)?, intervals, cn, SolveOptions::default())?;
            let verdicts = rep.rows.iter().map(|r| Verdict::at_most(format!("q_sup[R={}]", r.params.r), r.experiment.q_sup, r.bound)).collect();
            let csv = Csv::new(
                "sweep.csv",
                &["R", "q_sup", "raw_bracket", "bound", "ratio"],
                rep.rows.iter().map(|r| vec![r.params.r, r.experiment.q_sup, r.raw_bracket, r.bound, r.ratio]).collect(),
            );
            (ExperimentReport::new("experiment_gradient_sweep", &cfg, &rep, verdicts)?, vec![csv])
        }
        Command::Experiment(Experiment::Liouville { fixture, intervals, preset }) => {
            set(&mut cfg, "intervals", intervals);
            set(&mut cfg, "preset", preset);
            let f = resolve_fixture(&mut cfg, fixture, &["intervals", "preset"], "paraboloid", "grad-phi", &[1.0, 2.0, 4.0])?;
            let intervals = cfg.parse_or("intervals", 128usize)?;
            let preset_s = cfg.get("preset").unwrap_or("oscillation").to_string();
            cfg.set("intervals", intervals);
            cfg.set("preset", &preset_s);
            let preset = match preset_s.split_once(':') {
                None if preset_s == "oscillation" => LiouvillePreset::Oscillation,
                Some(("constant", c)) => LiouvillePreset::Constant(c.trim().parse().context("preset constant")?),
                _ => bail!("unknown preset `{preset_s}` (oscillation | constant:C)"),
            };
            let m = manifold(&f.manifold, 2.0 * f.radii.iter().copied().fold(0.0, f64::max) + f.origin.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 0.5)?;
            let x = drift(&f.drift, &m)?;
            let rep = liouville_decay_experiment(&m, &x, &f.origin, &f.radii, preset, intervals, SolveOptions::default())?;
            let verdicts = vec![
                Verdict::holds("q_sup_decreasing_or_zero", rep.pass, "strictly decreasing in R, or identically 0"),
                Verdict::holds("hypotheses", rep.hypotheses_ok, "Ric_X >= -1e-9 and |X| shell max nonincreasing").informational(),
            ];
            let csv = Csv::new("liouville.csv", &["R", "q_sup"], f.radii.iter().zip(&rep.q_sup).map(|(r, q)| vec![*r, *q]).collect());
            (ExperimentReport::new("experiment_liouville", &cfg, &rep, verdicts)?, vec![csv])
        }
    };
    finish(&root, &report, started, &csvs)
}

fn finish(root: &Path, report: &ExperimentReport, started: Instant, csvs: &[Csv]) -> Result<bool> {
    let dir = write_run(root, report, started.elapsed().as_secs_f64(), csvs)?;
    for v in &report.verdicts {
        let tag = if v.pass { "PASS" } else if v.informational { "INFO" } else { "FAIL" };
        println!("{tag} {} = {} ({})", v.name, v.measured, v.rule);
    }
    println!("{} {}", if report.pass { "PASS" } else { "FAIL" }, dir.join("report.json").display());
    Ok(report.pass)
}

fn run_acceptance(root: &Path, threads: Option<usize>, started: Instant) -> Result<bool> {
    let report = acceptance::run_all(threads)?;
    let dir = root.join(format!("acceptance-threads-{}", threads.map_or("default".to_string(), |n| n.to_string())));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("report.json"), report.to_json()?)?;
    std::fs::write(dir.join("timing.json"), format!("{{\"wall_clock_seconds\": {}}}\n", started.elapsed().as_secs_f64()))?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    println!("{} {}", if report.pass { "PASS" } else { "FAIL" }, dir.join("report.json").display());
    Ok(report.pass)
}

fn criterion_report(name: &str, cfg: &Config, id: u32) -> Result<(ExperimentReport, Vec<Csv>)> {
    let c = acceptance::run_criterion(id);
    if let Some(e) = c.error {
        return Err(anyhow!(e));
    }
    Ok((ExperimentReport::new(name, cfg, &c.details, c.verdicts)?, vec![]))
}

fn set<T: ToString>(cfg: &mut Config, key: &str, v: Option<T>) {
    if let Some(v) = v {
        cfg.set(key, v);
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}`"))).collect()
}

struct Fixture {
    manifold: String,
    drift: String,
    origin: Vec<f64>,
    radii: Vec<f64>,
    directions: usize,
}

const FIXTURE_KEYS: [&str; 5] = ["manifold", "drift", "origin", "radii", "directions"];

fn resolve_fixture(cfg: &mut Config, a: FixtureArgs, extra: &[&str], manifold: &str, drift: &str, radii: &[f64]) -> Result<Fixture> {
    set(cfg, "manifold", a.manifold);
    set(cfg, "drift", a.drift);
    set(cfg, "origin", a.origin);
    set(cfg, "radii", a.radii);
    set(cfg, "directions", a.directions);
    let known: Vec<&str> = FIXTURE_KEYS.iter().chain(extra).copied().collect();
    cfg.check_keys(&known)?;
    let f = Fixture {
        manifold: cfg.get("manifold").unwrap_or(manifold).to_string(),
        drift: cfg.get("drift").unwrap_or(drift).to_string(),
        origin: cfg.list_or("origin", if cfg.get("manifold").unwrap_or(manifold) == "hyperbolic" { &[0.0, 1.0] } else { &[0.0, 0.0] })?,
        radii: cfg.list_or("radii", radii)?,
        directions: cfg.parse_or("directions", 8usize)?,
    };
    cfg.set("manifold", &f.manifold);
    cfg.set("drift", &f.drift);
    cfg.set("origin", join(&f.origin));
    cfg.set("radii", join(&f.radii));
    cfg.set("directions", f.directions);
    Ok(f)
}

/// Chart covering `[-reach, reach]²` (upper half-plane `y in (0, 2 reach]` for the hyperbolic chart).
fn manifold(name: &str, reach: f64) -> Result<ChartManifold> {
    Ok(match name {
        "euclidean" => ChartManifold::euclidean(2, reach),
        "paraboloid" => ChartManifold::paraboloid(reach),
        "hyperbolic" => ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-reach, 0.0], vec![reach, 2.0 * reach])?)?,
        _ => bail!("unknown manifold `{name}` (euclidean | hyperbolic | paraboloid)"),
    })
}

fn drift(name: &str, m: &ChartManifold) -> Result<VectorFieldSpec> {
    let jf = |f: fn(&[Jet]) -> Jet| -> JetFn { Arc::new(f) };
    Ok(match name {
        "zero" => VectorFieldSpec::zero(2),
        "unit-x" => VectorFieldSpec::constant(vec![1.0, 0.0]),
        "rotation" => VectorFieldSpec::from_exprs("rotation", vec![jf(|c| -c[1]), jf(|c| c[0])]),
        "grad-phi" => VectorFieldSpec::paraboloid_gradient(m, PotentialVariant::Literal),
        "grad-phi-alternate" => VectorFieldSpec::paraboloid_gradient(m, PotentialVariant::Alternate),
        _ => bail!("unknown drift `{name}` (zero | unit-x | rotation | grad-phi | grad-phi-alternate)"),
    })
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    Ok(match s.split_once(':') {
        None if s == "exp-x" => Boundary::exp_x(),
        Some(("constant", c)) => Boundary::constant(c.trim().parse().context("boundary constant")?),
        Some(("linear", l)) => match parse_list(l)?[..] {
            [c0, cx, cy] => Boundary::linear(c0, cx, cy),
            _ => bail!("linear boundary needs three coefficients"),
        },
        _ => bail!("unknown boundary `{s}` (exp-x | constant:C | linear:C0,CX,CY)"),
    })
}

fn parse_nonlinearity(s: &str) -> Result<Nonlinearity> {
    Ok(match s.split_once(':') {
        None if s == "zero" => Nonlinearity::zero(),
        Some(("linear", c)) => Nonlinearity::linear(c.trim().parse().context("nonlinearity coefficient")?),
        _ => bail!("unknown nonlinearity `{s}` (zero | linear:C)"),
    })
}

fn verify_comparison(cfg: &mut Config, a: FixtureArgs) -> Result<(ExperimentReport, Vec<Csv>)> {
    let f = resolve_fixture(cfg, a, &[], "paraboloid", "grad-phi", &[0.5, 1.0, 2.0])?;
    let reach = f.radii.iter().copied().fold(0.0, f64::max) + f.origin.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 1.0;
    let m = if f.manifold == "hyperbolic" {
        ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-6.0 * reach, 0.0], vec![6.0 * reach, 10.0 * reach])?)?
    } else {
        manifold(&f.manifold, reach)?
    };
    let x = drift(&f.drift, &m)?;
    let rep: ComparisonReport = comparison_check(&m, &x, &f.origin, &f.radii, f.directions, ComparisonOptions::default())?;
    let verdicts = vec![
        Verdict::at_least("min_slack_sharp", rep.min_slack, -rep.tolerance),
        Verdict::at_least("min_slack_simplified", rep.min_slack_simplified, -rep.tolerance),
    ];
    let csv = Csv::new("comparison.csv", &ComparisonReport::CSV_HEADER, rep.csv_rows());
    Ok((ExperimentReport::new("verify_comparison", cfg, &rep, verdicts)?, vec![csv]))
}

fn solve(cfg: &mut Config, a: SolveArgs) -> Result<(ExperimentReport, Vec<Csv>)> {
    set(cfg, "manifold", a.manifold);
    set(cfg, "drift", a.drift);
    set(cfg, "boundary", a.boundary);
    set(cfg, "nonlinearity", a.nonlinearity);
    set(cfg, "rect", a.rect);
    set(cfg, "h", a.h);
    cfg.check_keys(&["manifold", "drift", "boundary", "nonlinearity", "rect", "h"])?;
    let mname = cfg.get("manifold").unwrap_or("euclidean").to_string();
    let dname = cfg.get("drift").unwrap_or("unit-x").to_string();
    let bname = cfg.get("boundary").unwrap_or("exp-x").to_string();
    let nname = cfg.get("nonlinearity").unwrap_or("zero").to_string();
    let rect = cfg.list_or("rect", if mname == "hyperbolic" { &[0.5, 1.5] } else { &[0.0, 1.0] })?;
    let h = cfg.parse_or("h", 1.0 / 32.0)?;
    let [lo, hi] = rect[..] else { bail!("rect must be `lo,hi`") };
    for (k, v) in [("manifold", &mname), ("drift", &dname), ("boundary", &bname), ("nonlinearity", &nname)] {
        cfg.set(k, v);
    }
    cfg.set("rect", join(&rect));
    cfg.set("h", format!("{h:?}"));
    let m = manifold(&mname, lo.abs().max(hi.abs()) + 0.5)?;
    let x = drift(&dname, &m)?;
    let nl = parse_nonlinearity(&nname)?;
    let sol = solve_elliptic_2d(&m, &x, &nl, &BoxDomain::square(2, lo, hi), &parse_boundary(&bname)?, h, SolveOptions::default())?;
    let mut verdicts = vec![Verdict::at_most("newton_residual_inf", sol.residual_inf, SolveOptions::default().newton_tol)];
    let dmp = Verdict::holds("discrete_max_principle", sol.satisfies_max_principle(0.0), "interior within boundary range");
    verdicts.push(if nname == "zero" { dmp } else { dmp.informational() });
    let rows = sol
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (i, j) = sol.mesh.coords(k);
            let p = sol.mesh.point(i, j);
            vec![p[0], p[1], *v]
        })
        .collect();
    let measured = json!({
        "mesh": sol.mesh, "iterations": sol.iterations, "linear_iterations": sol.linear_iterations,
        "residual_inf": sol.residual_inf, "min": sol.min_value(), "max": sol.max_value(),
    });
    Ok((ExperimentReport::new("solve", cfg, measured, verdicts)?, vec![Csv::new("grid.csv", &["x", "y", "u"], rows)]))
}

fn estimate(cfg: &mut Config, a: EstimateArgs) -> Result<Option<(ExperimentReport, Vec<Csv>)>> {
    set(cfg, "n", a.n);
    set(cfg, "alpha", a.alpha);
    set(cfg, "K", a.k);
    set(cfg, "beta", a.beta);
    set(cfg, "lambda", a.lambda);
    set(cfg, "R", a.r);
    set(cfg, "cn", a.cn);
    set(cfg, "distance", a.distance);
    cfg.check_keys(&["n", "alpha", "K", "beta", "lambda", "R", "cn", "distance"])?;
    let n = cfg.parse_or("n", 2usize)?;
    let mut p = EstimateParams::new(
        n,
        cfg.parse_or("K", 0.0)?,
        cfg.parse_or("lambda", 0.0)?,
        cfg.parse_or("alpha", 0.0)?,
        cfg.parse_or("beta", 0.0)?,
        cfg.parse_or("R", f64::INFINITY)?,
    )?;
    if cfg.get("cn").is_some() {
        p = p.with_cn(cfg.parse_or("cn", 0.0)?)?;
    }
    if a.raw_bracket {
        println!("{}", raw_bracket(&p));
        return Ok(None);
    }
    for (k, v) in [("n", n as f64), ("alpha", p.alpha), ("K", p.k), ("beta", p.beta), ("lambda", p.lambda), ("R", p.r), ("cn", p.cn)] {
        cfg.set(k, format!("{v:?}"));
    }
    let cubic = CubicCoeffs::from_params(&p)?;
    let roots = cubic.roots()?;
    let mut measured = json!({
        "params": p, "alpha_tilde": p.alpha_tilde(), "gamma": p.gamma(),
        "raw_bracket": raw_bracket(&p), "gradient_bound": gradient_bound_bracket(&p),
        "cubic": cubic, "cubic_roots": roots, "cubic_root_bound": cubic.root_bound(),
    });
    if cfg.get("distance").is_some() {
        let d = cfg.parse_or("distance", 0.0)?;
        measured["harnack_factor"] = json!(harnack_factor(&p, d, HarnackConstants::defaults(&p))?);
    }
    let verdicts = vec![Verdict::at_least("root_bound_margin", cubic.root_bound() - roots[2], -1e-12).informational()];
    println!("raw_bracket = {}", raw_bracket(&p));
    println!("gradient_bound = {}", gradient_bound_bracket(&p));
    Ok(Some((ExperimentReport::new("estimate", cfg, measured, verdicts)?, vec![])))
}
