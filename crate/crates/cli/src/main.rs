//! Command-line front end: run the split-feasibility benchmark sweep, solve
//! built-in toy presets, and check step-size certificates.
//!
//! Exit codes: 0 success, 1 runtime failure (including unmet benchmark
//! tolerances), 2 configuration/parse error, 3 certificate rejection.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use strongsplit::{
    make_default_schedules, norm, reproduce_tables, run_scheme, solve_dr, solve_fb, solve_km,
    sub, validate_pd_dr_stepsizes, validate_pd_fb_stepsizes, BenchConfig, BetaMode, Operator,
    Regularity, Resolvent, SchemeChoice, SfpInstance, Space, StartTag, StoppingRule, Vector,
};

use config::ConfigFile;
use output::{fmt_float, write_csv, OutDir};

#[derive(Parser)]
#[command(
    name = "strongsplit",
    about = "Strongly convergent splitting solvers: benchmark, toy solves, certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the split-feasibility benchmark: full sweep, or one traced run
    /// when --x0/--v0 are given.
    Bench(BenchArgs),
    /// Solve a built-in toy problem preset and write its trace.
    Solve(SolveArgs),
    /// Check a step-size certificate and print its arithmetic.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Flat key=value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme for a single run: alg1 or alg2.
    #[arg(long)]
    scheme: Option<String>,
    /// Beta schedule: default (Tikhonov) or ones (baseline).
    #[arg(long)]
    beta: Option<String>,
    /// Primal start for a single run: t2over10, ehalf, or eplus.
    #[arg(long)]
    x0: Option<String>,
    /// Dual start for a single run: t2over10, ehalf, or eplus.
    #[arg(long)]
    v0: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Grid size.
    #[arg(long)]
    n: Option<usize>,
    /// Tolerance on the infeasibility functional E.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory (default: $STRONGSPLIT_OUT, then the working dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the summary; all runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Preset: km-identity, fb-l1-quadratic, or dr-interval.
    #[arg(long)]
    preset: String,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Which certificate: pd_fb or pd_dr.
    #[arg(long, default_value = "pd_dr")]
    cert: String,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Dual step sizes, one per block.
    #[arg(long, default_values_t = [0.01])]
    sigma: Vec<f64>,
    /// Squared operator norms, one per block (default: the benchmark's
    /// analytic 16*pi^4/3).
    #[arg(long = "norm-sq")]
    norm_sq: Vec<f64>,
    /// Cocoercivity constant of the forward term (pd_fb only; inf allowed).
    #[arg(long, default_value_t = f64::INFINITY)]
    mu: f64,
    /// Cocoercivity constants of the dual smoothing terms (pd_fb only).
    #[arg(long)]
    nu: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct BenchSetup {
    cfg: BenchConfig,
    scheme: Option<SchemeChoice>,
    beta: BetaMode,
    x0: Option<StartTag>,
    v0: Option<StartTag>,
    out: OutDir,
    seed: Option<u64>,
}

fn parse_enum<T>(what: &str, s: &str, parse: impl Fn(&str) -> Option<T>) -> Result<T, String> {
    parse(s).ok_or_else(|| format!("invalid {what} `{s}`"))
}

fn bench_setup(args: &BenchArgs) -> Result<BenchSetup, String> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = BenchConfig::default();
    if let Some(n) = args.n.or(file.n) {
        cfg.n = n;
    }
    if let Some(t) = args.tau.or(file.tau) {
        cfg.tau = t;
    }
    if let Some(s) = args.sigma.or(file.sigma) {
        cfg.sigma = s;
    }
    if let Some(l) = args.lambda.or(file.lambda) {
        cfg.lambda = l;
    }
    if let Some(t) = args.tol.or(file.tol) {
        cfg.tol = t;
    }
    if let Some(m) = args.max_iter.or(file.max_iter) {
        cfg.max_iter = m;
    }
    if cfg.n < 2 || cfg.tol <= 0.0 || cfg.max_iter < 1 {
        return Err("config: need n >= 2, tol > 0, max_iter >= 1".into());
    }
    let pick = |flag: &Option<String>, key: &Option<String>| flag.clone().or_else(|| key.clone());
    let scheme = pick(&args.scheme, &file.scheme)
        .map(|s| parse_enum("scheme", &s, SchemeChoice::parse))
        .transpose()?;
    let beta = pick(&args.beta, &file.beta)
        .map(|s| parse_enum("beta mode", &s, BetaMode::parse))
        .transpose()?
        .unwrap_or(BetaMode::Default);
    let x0 = pick(&args.x0, &file.x0)
        .map(|s| parse_enum("start tag", &s, StartTag::parse))
        .transpose()?;
    let v0 = pick(&args.v0, &file.v0)
        .map(|s| parse_enum("start tag", &s, StartTag::parse))
        .transpose()?;
    let out = OutDir::resolve(args.out.clone().or(file.out.clone()))?;
    Ok(BenchSetup { cfg, scheme, beta, x0, v0, out, seed: args.seed.or(file.seed) })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    let setup = match bench_setup(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let quadrature_warning = setup.cfg.n < 256;
    if quadrature_warning {
        eprintln!(
            "warning: grid n={} is below 256; quadrature precision is degraded",
            setup.cfg.n
        );
    }

    if setup.x0.is_some() || setup.v0.is_some() || setup.scheme.is_some() {
        let (Some(scheme), Some(x0), Some(v0)) = (setup.scheme, setup.x0, setup.v0) else {
            eprintln!("error: a single run needs --scheme, --x0 and --v0 together");
            return Ok(ExitCode::from(2));
        };
        return bench_single(&setup, scheme, x0, v0);
    }
    bench_sweep(&setup, quadrature_warning)
}

fn trace_rows(result: &strongsplit::RunResult) -> Vec<Vec<String>> {
    result
        .residual_history
        .iter()
        .zip(&result.step_norms)
        .enumerate()
        .map(|(i, (e, s))| vec![(i + 1).to_string(), fmt_float(*e), fmt_float(*s)])
        .collect()
}

fn bench_single(
    setup: &BenchSetup,
    scheme: SchemeChoice,
    x0: StartTag,
    v0: StartTag,
) -> Result<ExitCode, String> {
    let inst = SfpInstance::new(setup.cfg.n);
    let result = run_scheme(
        &inst,
        &setup.cfg,
        scheme,
        &inst.start(x0),
        &inst.start(v0),
        setup.beta,
    )
    .map_err(|e| e.to_string())?;
    let id = format!(
        "{}_{}_{}_{}",
        scheme.label(),
        x0.label(),
        v0.label(),
        setup.beta.label()
    );
    let path = setup.out.file(&format!("trace_{id}.csv"));
    write_csv(&path, &["n", "E", "step_norm"], &trace_rows(&result))?;
    println!(
        "{id}: iterations={} final_E={} converged={} trace={}",
        result.iterations,
        fmt_float(result.final_e),
        result.converged,
        path.display()
    );
    Ok(ExitCode::from(if result.converged { 0 } else { 1 }))
}

fn bench_sweep(setup: &BenchSetup, quadrature_warning: bool) -> Result<ExitCode, String> {
    let inst = SfpInstance::new(setup.cfg.n);
    // per-run traces
    for scheme in [SchemeChoice::Alg1, SchemeChoice::Alg2] {
        for mode in [BetaMode::Ones, BetaMode::Default] {
            for x0 in StartTag::all() {
                for v0 in StartTag::all() {
                    let result = run_scheme(
                        &inst,
                        &setup.cfg,
                        scheme,
                        &inst.start(x0),
                        &inst.start(v0),
                        mode,
                    )
                    .map_err(|e| e.to_string())?;
                    let id = format!(
                        "{}_{}_{}_{}",
                        scheme.label(),
                        x0.label(),
                        v0.label(),
                        mode.label()
                    );
                    write_csv(
                        &setup.out.file(&format!("trace_{id}.csv")),
                        &["n", "E", "step_norm"],
                        &trace_rows(&result),
                    )?;
                }
            }
        }
    }

    let (t1, t2) = reproduce_tables(&setup.cfg).map_err(|e| e.to_string())?;
    let mut summary = String::new();
    summary.push_str("split-feasibility benchmark sweep\n");
    summary.push_str(
        "iteration counting: completed x-updates; E evaluated at each new iterate\n",
    );
    summary.push_str("tikhonov schedule: beta_0 = 1/4, beta_n = 1 - 1/(n+1) for n >= 1\n");
    summary.push_str(&format!(
        "config: n={} tau={} sigma={} lambda={} tol={} max_iter={} seed={}\n",
        setup.cfg.n,
        setup.cfg.tau,
        setup.cfg.sigma,
        setup.cfg.lambda,
        setup.cfg.tol,
        setup.cfg.max_iter,
        setup.seed.map_or("none".to_string(), |s| s.to_string())
    ));
    if quadrature_warning {
        summary.push_str("WARNING: grid below 256 points; quadrature precision degraded\n");
    }
    let mut all_pass = true;
    for (name, table) in [("table1", &t1), ("table2", &t2)] {
        let header = ["x0", "v0", "beta_mode", "iterations", "final_E", "paper_value", "pass"];
        let rows: Vec<Vec<String>> = table
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.x0.label().to_string(),
                    c.v0.label().to_string(),
                    c.mode.label().to_string(),
                    c.iterations.to_string(),
                    fmt_float(c.final_e),
                    c.reference.to_string(),
                    c.pass.to_string(),
                ]
            })
            .collect();
        write_csv(&setup.out.file(&format!("{name}.csv")), &header, &rows)?;
        let cells_ok = table.cells.iter().filter(|c| c.pass).count();
        summary.push_str(&format!(
            "{name}: {}/{} cells within tolerance, dominance {}/9 (need >= 8: {})\n",
            cells_ok,
            table.cells.len(),
            table.dominance,
            table.dominance_pass
        ));
        all_pass &= table.pass();
    }
    summary.push_str(&format!("overall: {}\n", if all_pass { "pass" } else { "FAIL" }));
    let summary_path = setup.out.file("summary.txt");
    std::fs::write(&summary_path, &summary)
        .map_err(|e| format!("writing {}: {e}", summary_path.display()))?;
    print!("{summary}");
    Ok(ExitCode::from(if all_pass { 0 } else { 1 }))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let out = match OutDir::resolve(args.out.clone()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let tol = args.tol.unwrap_or(1e-6);
    let max_iter = args.max_iter.unwrap_or(2_000_000);
    if tol <= 0.0 || max_iter < 1 {
        eprintln!("error: need tol > 0 and max_iter >= 1");
        return Ok(ExitCode::from(2));
    }
    let s = Space::coordinate(1);
    let point = |v: f64| Vector::new(s.clone(), vec![v]).unwrap();
    // (final iterate, analytic limit, trace) per preset; each stops on the
    // distance to the known limit, so exit 0 certifies the documented value
    let run = |preset: &str| -> Result<Option<(Vector, f64, strongsplit::SolveTrace)>, String> {
        let stop_at = |target: f64| {
            let s = s.clone();
            StoppingRule::custom(
                move |x: &Vector| norm(&sub(x, &Vector::constant(s.clone(), target)).unwrap()),
                tol,
                max_iter,
            )
            .with_snapshot_stride(None)
        };
        match preset {
            "km-identity" => {
                // T = id: every point is fixed; the Tikhonov limit is the
                // minimal-norm fixed point 0
                let t = Operator::new(s.clone(), Regularity::Nonexpansive, |x: &Vector| x.clone());
                let sched = make_default_schedules(0.9, 1.0).map_err(|e| e.to_string())?;
                let (x, trace) =
                    solve_km(&t, &point(3.0), &sched, &stop_at(0.0)).map_err(|e| e.to_string())?;
                Ok(Some((x, 0.0, trace)))
            }
            "fb-l1-quadratic" => {
                // min |x| + (x-3)^2/2, unique minimizer 2
                let a = Resolvent::soft_threshold(s.clone());
                let b = Operator::new(s.clone(), Regularity::Cocoercive(1.0), |x: &Vector| {
                    x.map(|v| v - 3.0)
                });
                let sched = make_default_schedules(1.0, 1.5).map_err(|e| e.to_string())?;
                let (x, trace) = solve_fb(&a, &b, 1.0, &point(0.0), &sched, &stop_at(2.0))
                    .map_err(|e| e.to_string())?;
                Ok(Some((x, 2.0, trace)))
            }
            "dr-interval" => {
                // A = 0, B = normal cone of [1,2]; minimal-norm solution 1
                let a = Resolvent::identity(s.clone());
                let b = Resolvent::normal_cone_interval(s.clone(), 1.0, 2.0);
                let sched = make_default_schedules(0.4, 2.0).map_err(|e| e.to_string())?;
                let (shadow, _, trace) =
                    solve_dr(&a, &b, 1.0, &point(5.0), &sched, &stop_at(1.0))
                        .map_err(|e| e.to_string())?;
                Ok(Some((shadow, 1.0, trace)))
            }
            _ => Ok(None),
        }
    };
    let Some((x, target, trace)) = run(&args.preset)? else {
        eprintln!("error: unknown preset `{}`", args.preset);
        return Ok(ExitCode::from(2));
    };
    // subsample long residual histories to at most ~2000 trace rows
    let stride = (trace.residual_history.len() / 2000).max(1);
    let rows: Vec<Vec<String>> = trace
        .residual_history
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i + 1 == trace.residual_history.len())
        .map(|(i, r)| vec![(i + 1).to_string(), fmt_float(*r)])
        .collect();
    let path = out.file(&format!("trace_{}.csv", args.preset));
    write_csv(&path, &["n", "residual"], &rows)?;
    let converged = trace.terminated_by == strongsplit::Termination::Tolerance;
    println!(
        "{}: final={} target={target} iterations={} converged={converged} trace={}",
        args.preset,
        fmt_float(x.values()[0]),
        trace.iterations_used,
        path.display()
    );
    Ok(ExitCode::from(if converged { 0 } else { 1 }))
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, String> {
    let norm_sq = if args.norm_sq.is_empty() {
        vec![strongsplit::l_norm_squared_analytic(); args.sigma.len()]
    } else {
        args.norm_sq.clone()
    };
    let result = match args.cert.as_str() {
        "pd_dr" => validate_pd_dr_stepsizes(args.tau, &args.sigma, &norm_sq),
        "pd_fb" => {
            let nus = if args.nu.is_empty() {
                vec![f64::INFINITY; args.sigma.len()]
            } else {
                args.nu.clone()
            };
            validate_pd_fb_stepsizes(args.tau, &args.sigma, &norm_sq, args.mu, &nus)
        }
        other => {
            eprintln!("error: unknown certificate `{other}` (use pd_fb or pd_dr)");
            return Ok(ExitCode::from(2));
        }
    };
    match result {
        Ok(cert) => {
            println!("certificate: {}", cert.scheme);
            println!("tau = {}", cert.tau);
            println!("sigmas = {:?}", cert.sigmas);
            println!("checked value = {}", fmt_float(cert.checked_value));
            println!("rho = {}", fmt_float(cert.rho));
            println!("lambda cap = {}", fmt_float(cert.lambda_cap));
            println!("accepted");
            Ok(ExitCode::from(0))
        }
        Err(e) => {
            eprintln!("rejected: {e}");
            Ok(ExitCode::from(3))
        }
    }
}
