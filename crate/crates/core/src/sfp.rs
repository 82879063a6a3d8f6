//! A split-feasibility benchmark on `L^2([0, 2*pi])`: find `x` in the
//! halfspace `C = {x : int x <= 1}` whose image under the rank-one map
//! `(Lx)(t) = (int x) * t` lies in the ball `Q` of radius 4 around `sin`.
//!
//! Two instantiations of the forward-backward-type primal-dual scheme are
//! benchmarked, with and without Tikhonov regularization, against recorded
//! reference iteration counts.

use std::f64::consts::PI;

use crate::error::Result;
use crate::linmap::LinearMap;
use crate::operators::{project_ball, project_halfspace, Operator, ProxFunction};
use crate::primal_dual::{solve_pd_fb_opt, FbOptBlock, GProx, PdState};
use crate::schedules::{
    make_default_schedules, make_unregularized_schedules, validate_pd_fb_stepsizes,
};
use crate::solvers::{SolveTrace, StoppingRule, Termination};
use crate::space::{axpby, inner, norm, sub, Space, SpaceRef, Vector};

/// Exact squared operator norm of `L`: `16 pi^4 / 3`, attained in the limit
/// by constant inputs.
pub fn l_norm_squared_analytic() -> f64 {
    16.0 * PI.powi(4) / 3.0
}

/// Build `L` on the grid: `(Lx)(t) = (int x) * t`, `(L*y)(t) = int s y(s) ds`.
/// `analytic_bound` controls whether the exact operator norm is attached.
pub fn rank_one_map(space: &SpaceRef, analytic_bound: bool) -> LinearMap {
    let t_fwd = Vector::sample(space.clone(), |t| t);
    let ones_fwd = Vector::constant(space.clone(), 1.0);
    let t_adj = t_fwd.clone();
    let l = LinearMap::new(
        space.clone(),
        space.clone(),
        move |x| t_fwd.scale(inner(x, &ones_fwd).expect("rank-one apply")),
        move |y| Vector::constant(y.space().clone(), inner(y, &t_adj).expect("rank-one adjoint")),
    );
    if analytic_bound {
        l.with_norm_bound(l_norm_squared_analytic().sqrt())
    } else {
        l
    }
}

/// The discretized split-feasibility instance.
#[derive(Clone)]
pub struct SfpInstance {
    space: SpaceRef,
    /// Halfspace normal (the constant-one function); the bound is 1.
    u: Vector,
    /// Ball center `sin`.
    center: Vector,
    radius: f64,
    lin: LinearMap,
}

impl SfpInstance {
    pub fn new(n: usize) -> Self {
        let space = Space::grid(0.0, 2.0 * PI, n);
        let u = Vector::constant(space.clone(), 1.0);
        let center = Vector::sample(space.clone(), f64::sin);
        let lin = rank_one_map(&space, true);
        SfpInstance { space, u, center, radius: 4.0, lin }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn lin(&self) -> &LinearMap {
        &self.lin
    }

    pub fn l_norm_squared(&self) -> f64 {
        l_norm_squared_analytic()
    }

    pub fn project_c(&self, x: &Vector) -> Vector {
        project_halfspace(&self.u, 1.0, x).expect("halfspace projection")
    }

    pub fn project_q(&self, y: &Vector) -> Vector {
        project_ball(&self.center, self.radius, y).expect("ball projection")
    }

    /// Infeasibility functional
    /// `E(x) = 1/2 ||P_C x - x||^2 + 1/2 ||P_Q(Lx) - Lx||^2`.
    pub fn residual(&self, x: &Vector) -> f64 {
        let rc = norm(&sub(&self.project_c(x), x).expect("residual C"));
        let lx = self.lin.apply(x);
        let rq = norm(&sub(&self.project_q(&lx), &lx).expect("residual Q"));
        0.5 * rc * rc + 0.5 * rq * rq
    }

    /// Starting function for a tag, sampled on the grid.
    pub fn start(&self, tag: StartTag) -> Vector {
        Vector::sample(self.space.clone(), tag.function())
    }
}

/// Starting-point families used by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartTag {
    /// `t^2 / 10`
    T2Over10,
    /// `e^t / 2`
    EHalf,
    /// `e^t + t^2 / 24`
    EPlusT2Over24,
}

impl StartTag {
    pub fn all() -> [StartTag; 3] {
        [StartTag::T2Over10, StartTag::EHalf, StartTag::EPlusT2Over24]
    }

    pub fn label(&self) -> &'static str {
        match self {
            StartTag::T2Over10 => "t2over10",
            StartTag::EHalf => "ehalf",
            StartTag::EPlusT2Over24 => "eplus",
        }
    }

    pub fn parse(s: &str) -> Option<StartTag> {
        match s {
            "t2over10" => Some(StartTag::T2Over10),
            "ehalf" => Some(StartTag::EHalf),
            "eplus" => Some(StartTag::EPlusT2Over24),
            _ => None,
        }
    }

    pub fn function(&self) -> fn(f64) -> f64 {
        match self {
            StartTag::T2Over10 => |t| t * t / 10.0,
            StartTag::EHalf => |t| t.exp() / 2.0,
            StartTag::EPlusT2Over24 => |t| t.exp() + t * t / 24.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    /// Tikhonov schedules (`beta_0 = 1/4`, `beta_n -> 1`).
    Default,
    /// `beta_n = 1`: the unregularized baseline.
    Ones,
}

impl BetaMode {
    pub fn label(&self) -> &'static str {
        match self {
            BetaMode::Default => "default",
            BetaMode::Ones => "ones",
        }
    }

    pub fn parse(s: &str) -> Option<BetaMode> {
        match s {
            "default" => Some(BetaMode::Default),
            "ones" => Some(BetaMode::Ones),
            _ => None,
        }
    }
}

/// Which of the two scheme instantiations to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    /// Both sets enter through indicators: `f = i_C`, `g_1 = i_Q`.
    Alg1,
    /// `C` enters smoothly through `h = 1/2 d_C^2`; `f = 0`, `g_1 = i_Q`.
    Alg2,
}

impl SchemeChoice {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeChoice::Alg1 => "alg1",
            SchemeChoice::Alg2 => "alg2",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeChoice> {
        match s {
            "alg1" => Some(SchemeChoice::Alg1),
            "alg2" => Some(SchemeChoice::Alg2),
            _ => None,
        }
    }
}

/// Benchmark configuration; `default()` reproduces the reference runs.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n: usize,
    pub tau: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { n: 4096, tau: 0.1, sigma: 0.01, lambda: 0.4, tol: 1e-3, max_iter: 150 }
    }
}

/// Outcome of one benchmark run.
pub struct RunResult {
    pub iterations: usize,
    pub final_e: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// `||x_{n+1} - x_n||` per iteration, aligned with `residual_history`.
    pub step_norms: Vec<f64>,
    pub x: Vector,
    pub v: Vec<Vector>,
}

fn run_trace(inst: &SfpInstance, x0: &Vector, trace: SolveTrace, state: PdState) -> RunResult {
    let step_norms = match &trace.iterates {
        Some(snaps) => {
            let mut prev = x0;
            let mut steps = Vec::with_capacity(snaps.len());
            for snap in snaps {
                steps.push(norm(&sub(snap, prev).expect("trace step diff")));
                prev = snap;
            }
            steps
        }
        None => Vec::new(),
    };
    RunResult {
        iterations: trace.iterations_used,
        final_e: inst.residual(&state.x),
        converged: trace.terminated_by == Termination::Tolerance,
        residual_history: trace.residual_history,
        step_norms,
        x: state.x,
        v: state.v,
    }
}

/// Run one scheme choice from the given starting pair.
pub fn run_scheme(
    inst: &SfpInstance,
    cfg: &BenchConfig,
    scheme: SchemeChoice,
    x0: &Vector,
    v0: &Vector,
    mode: BetaMode,
) -> Result<RunResult> {
    let norm_sq = inst.l_norm_squared();
    let mu = match scheme {
        SchemeChoice::Alg1 => f64::INFINITY,
        SchemeChoice::Alg2 => 1.0,
    };
    let cert = validate_pd_fb_stepsizes(cfg.tau, &[cfg.sigma], &[norm_sq], mu, &[f64::INFINITY])?;
    let sched = match mode {
        BetaMode::Default => make_default_schedules(cfg.lambda, cert.lambda_cap)?,
        BetaMode::Ones => make_unregularized_schedules(cfg.lambda, cert.lambda_cap)?,
    };

    let space = inst.space().clone();
    let ball = {
        let inst = inst.clone();
        ProxFunction::indicator(space.clone(), "ball-around-sin", move |y| inst.project_q(y))
    };
    let blocks = vec![FbOptBlock {
        g: GProx::Primal(ball),
        l_conj_grad: Operator::zero(space.clone()),
        lin: inst.lin().clone(),
    }];
    let start = PdState::new(x0.clone(), vec![v0.clone()]);
    let stop = {
        let inst = inst.clone();
        StoppingRule::custom(move |x| inst.residual(x), cfg.tol, cfg.max_iter)
            .with_snapshot_stride(Some(1))
    };

    let (state, trace) = match scheme {
        SchemeChoice::Alg1 => {
            let halfspace = {
                let inst = inst.clone();
                ProxFunction::indicator(space, "halfspace-int<=1", move |x| inst.project_c(x))
            };
            solve_pd_fb_opt(&halfspace, None, &blocks, &start, &cert, &sched, &stop)?
        }
        SchemeChoice::Alg2 => {
            let f = ProxFunction::zero(space.clone());
            let h = {
                let inst_p = inst.clone();
                let inst_g = inst.clone();
                ProxFunction::new(space, "half-sq-dist-to-halfspace", move |g, x| {
                    // prox of 1/2 d_C^2: x + g/(1+g) (P_C x - x)
                    let p = inst_p.project_c(x);
                    axpby(1.0, x, g / (1.0 + g), &sub(&p, x).expect("prox diff"))
                        .expect("half-sq-dist prox")
                })
                .with_gradient(
                    move |x| sub(x, &inst_g.project_c(x)).expect("half-sq-dist gradient"),
                    1.0,
                )
            };
            solve_pd_fb_opt(&f, Some(&h), &blocks, &start, &cert, &sched, &stop)?
        }
    };
    Ok(run_trace(inst, x0, trace, state))
}

/// A recorded reference iteration count: either a count, or "did not reach
/// the tolerance within the 150-iteration budget".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperCell {
    Iters(usize),
    ExceedsBudget,
}

impl std::fmt::Display for PaperCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PaperCell::Iters(k) => write!(f, "{k}"),
            PaperCell::ExceedsBudget => write!(f, ">150"),
        }
    }
}

/// Reference iteration counts, row order: `x0` tag outer, `v0` tag inner,
/// both over `[t2over10, ehalf, eplus]`.
pub fn reference_counts(scheme: SchemeChoice, mode: BetaMode) -> [PaperCell; 9] {
    use PaperCell::{ExceedsBudget as Over, Iters as I};
    match (scheme, mode) {
        (SchemeChoice::Alg1, BetaMode::Ones) => {
            [I(13), I(20), I(21), Over, I(20), I(21), Over, I(20), I(21)]
        }
        (SchemeChoice::Alg1, BetaMode::Default) => {
            [I(1), I(11), I(12), I(11), I(12), I(13), I(15), I(13), I(13)]
        }
        (SchemeChoice::Alg2, BetaMode::Ones) => {
            [I(24), I(46), I(46), I(30), I(24), I(35), I(32), I(36), I(24)]
        }
        (SchemeChoice::Alg2, BetaMode::Default) => {
            [I(1), I(10), I(10), I(6), I(11), I(21), I(6), I(12), I(11)]
        }
    }
}

/// One comparison row of a reproduced table.
pub struct TableCell {
    pub x0: StartTag,
    pub v0: StartTag,
    pub mode: BetaMode,
    pub iterations: usize,
    pub converged: bool,
    pub final_e: f64,
    pub reference: PaperCell,
    pub pass: bool,
}

/// A reproduced table: 9 baseline rows, 9 Tikhonov rows, and the
/// regularized-vs-baseline dominance count.
pub struct TableReport {
    pub scheme: SchemeChoice,
    pub cells: Vec<TableCell>,
    pub dominance: usize,
    pub all_cells_pass: bool,
    pub dominance_pass: bool,
}

impl TableReport {
    pub fn pass(&self) -> bool {
        self.all_cells_pass && self.dominance_pass
    }
}

fn cell_pass(mode: BetaMode, reference: PaperCell, iterations: usize, converged: bool) -> bool {
    match (mode, reference) {
        (_, PaperCell::ExceedsBudget) => !converged,
        (BetaMode::Default, PaperCell::Iters(k)) => converged && iterations <= k + 4,
        (BetaMode::Ones, PaperCell::Iters(k)) => {
            let slack = (0.5 * k as f64).max(5.0);
            converged && (iterations as f64 - k as f64).abs() <= slack
        }
    }
}

/// Rerun the nine starting pairs of one table under both schedules and
/// compare against the recorded counts.
pub fn reproduce_table(
    inst: &SfpInstance,
    cfg: &BenchConfig,
    scheme: SchemeChoice,
) -> Result<TableReport> {
    let mut cells = Vec::with_capacity(18);
    let mut tikhonov_iters = [0usize; 9];
    let mut baseline_iters = [0usize; 9];
    for mode in [BetaMode::Ones, BetaMode::Default] {
        let refs = reference_counts(scheme, mode);
        let mut row = 0usize;
        for x0_tag in StartTag::all() {
            let x0 = inst.start(x0_tag);
            for v0_tag in StartTag::all() {
                let v0 = inst.start(v0_tag);
                let run = run_scheme(inst, cfg, scheme, &x0, &v0, mode)?;
                let reference = refs[row];
                let pass = cell_pass(mode, reference, run.iterations, run.converged);
                match mode {
                    BetaMode::Default => tikhonov_iters[row] = run.iterations,
                    BetaMode::Ones => baseline_iters[row] = run.iterations,
                }
                cells.push(TableCell {
                    x0: x0_tag,
                    v0: v0_tag,
                    mode,
                    iterations: run.iterations,
                    converged: run.converged,
                    final_e: run.final_e,
                    reference,
                    pass,
                });
                row += 1;
            }
        }
    }
    let dominance = tikhonov_iters
        .iter()
        .zip(&baseline_iters)
        .filter(|(t, b)| t <= b)
        .count();
    let all_cells_pass = cells.iter().all(|c| c.pass);
    Ok(TableReport {
        scheme,
        cells,
        dominance,
        all_cells_pass,
        dominance_pass: dominance >= 8,
    })
}

/// Reproduce both tables with one instance.
pub fn reproduce_tables(cfg: &BenchConfig) -> Result<(TableReport, TableReport)> {
    let inst = SfpInstance::new(cfg.n);
    let t1 = reproduce_table(&inst, cfg, SchemeChoice::Alg1)?;
    let t2 = reproduce_table(&inst, cfg, SchemeChoice::Alg2)?;
    Ok((t1, t2))
}
