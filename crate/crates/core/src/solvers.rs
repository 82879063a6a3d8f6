//! Single-space solvers: Tikhonov-regularized Krasnosel'skii-Mann,
//! forward-backward, and Douglas-Rachford, with prox instantiations.
//!
//! Every scheme relaxes around the shrunk iterate `beta_n x_n`; the
//! `beta_n` factor is the Tikhonov term that steers the iterates to the
//! minimal-norm solution. With `beta_n = 1` the recursions reduce to the
//! classical weakly convergent methods.

use std::sync::Arc;

use crate::error::{Result, SplitError};
use crate::operators::{Operator, ProxFunction, Regularity, Resolvent};
use crate::schedules::ParamSchedules;
use crate::space::{axpby, norm, relax, sub, Vector};

/// Iterate snapshots are disabled above this dimension to bound trace size.
const SNAPSHOT_DIM_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIterations,
}

/// Per-run diagnostic record: one residual entry per completed iteration.
#[derive(Debug)]
pub struct SolveTrace {
    pub iterates: Option<Vec<Vector>>,
    pub residual_history: Vec<f64>,
    pub iterations_used: usize,
    pub terminated_by: Termination,
    pub schedule_tag: String,
    pub config_echo: String,
}

impl SolveTrace {
    fn new(schedule_tag: String, config_echo: String, snapshots: bool) -> Self {
        SolveTrace {
            iterates: if snapshots { Some(Vec::new()) } else { None },
            residual_history: Vec::new(),
            iterations_used: 0,
            terminated_by: Termination::MaxIterations,
            schedule_tag,
            config_echo,
        }
    }

    pub(crate) fn record(&mut self, n: usize, stride: usize, residual: f64, iterate: &Vector) {
        self.residual_history.push(residual);
        if let Some(snaps) = &mut self.iterates {
            if n % stride == 0 {
                snaps.push(iterate.clone());
            }
        }
        self.iterations_used = self.residual_history.len();
    }
}

#[derive(Clone)]
pub enum StopKind {
    /// Stop when the scheme's own fixed-point residual and the iterate
    /// increment both fall below `tol`.
    FixedPointResidual(f64),
    /// Stop when a user-supplied residual, evaluated at the new iterate,
    /// falls below `tol`.
    CustomResidual {
        eval: Arc<dyn Fn(&Vector) -> f64 + Send + Sync>,
        tol: f64,
    },
}

#[derive(Clone)]
pub struct StoppingRule {
    pub kind: StopKind,
    pub max_iterations: usize,
    /// Snapshot every `stride`-th iterate; `None` disables snapshots.
    pub snapshot_stride: Option<usize>,
}

impl StoppingRule {
    pub fn fixed_point(tol: f64, max_iterations: usize) -> Self {
        assert!(tol > 0.0 && max_iterations >= 1);
        StoppingRule {
            kind: StopKind::FixedPointResidual(tol),
            max_iterations,
            snapshot_stride: Some(10),
        }
    }

    pub fn custom(
        eval: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        tol: f64,
        max_iterations: usize,
    ) -> Self {
        assert!(tol > 0.0 && max_iterations >= 1);
        StoppingRule {
            kind: StopKind::CustomResidual { eval: Arc::new(eval), tol },
            max_iterations,
            snapshot_stride: Some(10),
        }
    }

    pub fn with_snapshot_stride(mut self, stride: Option<usize>) -> Self {
        self.snapshot_stride = stride;
        self
    }

    fn tol(&self) -> f64 {
        match &self.kind {
            StopKind::FixedPointResidual(t) => *t,
            StopKind::CustomResidual { tol, .. } => *tol,
        }
    }
}

pub(crate) fn snapshot_setup(stop: &StoppingRule, dim: usize) -> (bool, usize) {
    match stop.snapshot_stride {
        Some(stride) if dim <= SNAPSHOT_DIM_LIMIT => (true, stride.max(1)),
        _ => (false, 1),
    }
}

/// Shared loop for all schemes of the form
/// `x_{n+1} = beta_n x_n + lambda_n (T(beta_n x_n) - beta_n x_n)`,
/// with `scale` multiplying `lambda_n` (used by the DR-as-KM equivalence).
fn km_loop(
    t: &dyn Fn(&Vector) -> Vector,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
    echo: String,
) -> Result<(Vector, SolveTrace)> {
    let (snaps, stride) = snapshot_setup(stop, x0.len());
    let mut trace = SolveTrace::new(sched.tag(), echo, snaps);
    let mut x = x0.clone();
    for n in 0..stop.max_iterations {
        let (beta, lambda) = sched.check_step(n)?;
        let bx = x.scale(beta);
        let tx = t(&bx);
        let x_next = relax(&bx, &tx, lambda);
        match &stop.kind {
            StopKind::FixedPointResidual(tol) => {
                let r = norm(&sub(&tx, &bx)?);
                let inc = norm(&sub(&x_next, &x)?);
                trace.record(n, stride, r, &x_next);
                if r <= *tol && inc <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((bx, trace));
                }
            }
            StopKind::CustomResidual { eval, tol } => {
                let r = eval(&x_next);
                trace.record(n, stride, r, &x_next);
                if r <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((x_next, trace));
                }
            }
        }
        x = x_next;
    }
    trace.terminated_by = Termination::MaxIterations;
    Ok((x, trace))
}

/// Regularized Krasnosel'skii-Mann iteration for a nonexpansive map;
/// with the default Tikhonov schedules the iterates approach the
/// minimal-norm fixed point.
pub fn solve_km(
    t: &Operator,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, SolveTrace)> {
    match t.regularity() {
        Regularity::Nonexpansive | Regularity::Averaged(_) => {}
        other => {
            return Err(SplitError::Domain(format!(
                "solve_km expects a nonexpansive operator, got {other:?}"
            )))
        }
    }
    if sched.lambda_cap() > 1.0 {
        return Err(SplitError::Schedule {
            iteration: 0,
            detail: format!("lambda cap {} exceeds 1 for plain KM", sched.lambda_cap()),
        });
    }
    km_loop(
        &|v| t.apply(v),
        x0,
        sched,
        stop,
        format!("solve_km tol={} max_iter={}", stop.tol(), stop.max_iterations),
    )
}

/// KM iteration for an `alpha`-averaged map; the relaxation cap rises to `1/alpha`.
pub fn solve_km_averaged(
    r: &Operator,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, SolveTrace)> {
    let alpha = match r.regularity() {
        Regularity::Averaged(a) if a > 0.0 && a < 1.0 => a,
        other => {
            return Err(SplitError::Domain(format!(
                "solve_km_averaged expects averaged(alpha in (0,1)), got {other:?}"
            )))
        }
    };
    if sched.lambda_cap() > 1.0 / alpha {
        return Err(SplitError::Schedule {
            iteration: 0,
            detail: format!(
                "lambda cap {} exceeds 1/alpha = {}",
                sched.lambda_cap(),
                1.0 / alpha
            ),
        });
    }
    km_loop(
        &|v| r.apply(v),
        x0,
        sched,
        stop,
        format!(
            "solve_km_averaged alpha={alpha} tol={} max_iter={}",
            stop.tol(),
            stop.max_iterations
        ),
    )
}

fn cocoercivity_of(b: &Operator) -> Result<f64> {
    match b.regularity() {
        Regularity::Cocoercive(beta) if beta > 0.0 => Ok(beta),
        other => Err(SplitError::Domain(format!(
            "forward operator must be cocoercive(beta > 0), got {other:?}"
        ))),
    }
}

/// Forward-backward iteration
/// `x_{n+1} = (1 - lambda_n) beta_n x_n + lambda_n J_{gamma A}(beta_n x_n - gamma B(beta_n x_n))`.
pub fn solve_fb(
    a_res: &Resolvent,
    b: &Operator,
    gamma: f64,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, SolveTrace)> {
    let beta = cocoercivity_of(b)?;
    if !(gamma > 0.0 && gamma <= 2.0 * beta) {
        return Err(SplitError::Domain(format!(
            "gamma = {gamma} outside (0, 2*beta] with beta = {beta}"
        )));
    }
    let cap = if beta.is_infinite() { 2.0 } else { (4.0 * beta - gamma) / (2.0 * beta) };
    if sched.lambda_cap() > cap {
        return Err(SplitError::Schedule {
            iteration: 0,
            detail: format!("lambda cap {} exceeds (4b-g)/(2b) = {cap}", sched.lambda_cap()),
        });
    }
    let step = |v: &Vector| {
        let grad = b.apply(v);
        let arg = axpby(1.0, v, -gamma, &grad).expect("fb forward step");
        a_res.resolve(gamma, &arg)
    };
    km_loop(
        &step,
        x0,
        sched,
        stop,
        format!(
            "solve_fb gamma={gamma} beta={beta} tol={} max_iter={}",
            stop.tol(),
            stop.max_iterations
        ),
    )
}

/// Proximal-gradient instantiation of `solve_fb`: `A = df`, `B = grad g`.
pub fn solve_prox_grad(
    f: &ProxFunction,
    g: &ProxFunction,
    gamma: f64,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, SolveTrace)> {
    let (grad, lipschitz) = g
        .gradient()
        .ok_or_else(|| SplitError::Domain("smooth term needs a gradient".into()))?;
    let beta = if lipschitz == 0.0 { f64::INFINITY } else { 1.0 / lipschitz };
    let grad = grad.clone();
    let b = Operator::new(g.space().clone(), Regularity::Cocoercive(beta), move |v| grad(v));
    solve_fb(&f.as_resolvent(), &b, gamma, x0, sched, stop)
}

/// Douglas-Rachford iteration
/// `y_n = J_{gamma B}(beta_n x_n); z_n = J_{gamma A}(2 y_n - beta_n x_n);
///  x_{n+1} = beta_n x_n + lambda_n (z_n - y_n)`.
///
/// Returns the shadow limit (`y`, a zero of `A + B`) and the governing
/// limit (`x`). Termination requires both `||z - y||` and the governing
/// increment to fall below the tolerance; `z - y` alone can vanish while
/// `x_n` still drifts.
pub fn solve_dr(
    a_res: &Resolvent,
    b_res: &Resolvent,
    gamma: f64,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, Vector, SolveTrace)> {
    if gamma <= 0.0 {
        return Err(SplitError::Domain("solve_dr requires gamma > 0".into()));
    }
    if sched.lambda_cap() > 2.0 {
        return Err(SplitError::Schedule {
            iteration: 0,
            detail: format!("lambda cap {} exceeds 2 for DR", sched.lambda_cap()),
        });
    }
    let (snaps, stride) = snapshot_setup(stop, x0.len());
    let mut trace = SolveTrace::new(
        sched.tag(),
        format!("solve_dr gamma={gamma} tol={} max_iter={}", stop.tol(), stop.max_iterations),
        snaps,
    );
    let mut x = x0.clone();
    let mut shadow = b_res.resolve(gamma, &x);
    for n in 0..stop.max_iterations {
        let (beta, lambda) = sched.check_step(n)?;
        let bx = x.scale(beta);
        let y = b_res.resolve(gamma, &bx);
        let z = a_res.resolve(gamma, &axpby(2.0, &y, -1.0, &bx)?);
        let diff = sub(&z, &y)?;
        let x_next = axpby(1.0, &bx, lambda, &diff)?;
        shadow = y;
        match &stop.kind {
            StopKind::FixedPointResidual(tol) => {
                let r = norm(&diff);
                let inc = norm(&sub(&x_next, &x)?);
                trace.record(n, stride, r.max(inc), &x_next);
                if r <= *tol && inc <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((shadow, x_next, trace));
                }
            }
            StopKind::CustomResidual { eval, tol } => {
                let r = eval(&x_next);
                trace.record(n, stride, r, &x_next);
                if r <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((shadow, x_next, trace));
                }
            }
        }
        x = x_next;
    }
    trace.terminated_by = Termination::MaxIterations;
    Ok((shadow, x, trace))
}

/// DR on `argmin f + g` with prox resolvents. The shadow limit is
/// `prox_{gamma g}(x_bar)`, a minimizer; the caller is responsible for the
/// qualification `0 in sqri(dom f - dom g)`.
pub fn solve_dr_opt(
    f: &ProxFunction,
    g: &ProxFunction,
    gamma: f64,
    x0: &Vector,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(Vector, Vector, SolveTrace)> {
    solve_dr(&f.as_resolvent(), &g.as_resolvent(), gamma, x0, sched, stop)
}
