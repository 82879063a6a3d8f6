//! Structured primal-dual solvers over the product space
//! `H x G_1 x ... x G_m`: a forward-backward-type scheme and a
//! Douglas-Rachford-type scheme, both with Tikhonov regularization.

use crate::error::{Result, SplitError};
use crate::linmap::LinearMap;
use crate::operators::{
    conjugate_prox_handle, inverse_resolvent_handle, Operator, ProxFunction, Regularity, Resolvent,
};
use crate::schedules::{CertScheme, ParamSchedules, StepSizeCertificate};
use crate::solvers::{SolveTrace, StopKind, StoppingRule, Termination};
use crate::space::{add, axpby, norm, relax, sub, Vector};

/// How the strongly monotone dual term `D_i` enters a scheme.
///
/// The forward-backward scheme evaluates `D_i^{-1}` directly (it is
/// single-valued when `D_i` is strongly monotone); the Douglas-Rachford
/// scheme only needs its resolvent. Construction of a solver fails early
/// when the wrong representation is supplied.
#[derive(Clone)]
pub enum DualSmoothing {
    /// Single-valued evaluation of `D_i^{-1}` (cocoercive).
    Eval(Operator),
    /// Resolvent family of `D_i^{-1}`.
    Resolvent(Resolvent),
}

/// One coupled block `(B_i, D_i, L_i)` of the structured inclusion.
#[derive(Clone)]
pub struct PdBlock {
    /// Resolvent family of `B_i^{-1}`.
    pub b_inv_res: Resolvent,
    pub d_inv: DualSmoothing,
    pub lin: LinearMap,
}

/// The structured inclusion
/// `0 in A x + sum_i L_i^* (B_i [] D_i)(L_i x) + C x`.
#[derive(Clone)]
pub struct PdProblem {
    pub a_res: Resolvent,
    /// Cocoercive single-valued term; `None` stands for the zero map.
    pub c_eval: Option<Operator>,
    pub blocks: Vec<PdBlock>,
}

impl PdProblem {
    fn check(&self, cert: &StepSizeCertificate) -> Result<()> {
        if self.blocks.len() != cert.sigmas.len() {
            return Err(SplitError::Config(format!(
                "problem has {} blocks but certificate carries {} sigmas",
                self.blocks.len(),
                cert.sigmas.len()
            )));
        }
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.lin.domain() != self.a_res.space() {
                return Err(SplitError::Config(format!("block {i}: L_i domain is not H")));
            }
            if blk.lin.codomain() != blk.b_inv_res.space() {
                return Err(SplitError::Config(format!("block {i}: L_i codomain is not G_i")));
            }
        }
        Ok(())
    }
}

/// Primal iterate together with the dual block iterates.
#[derive(Debug, Clone)]
pub struct PdState {
    pub x: Vector,
    pub v: Vec<Vector>,
}

impl PdState {
    pub fn new(x: Vector, v: Vec<Vector>) -> Self {
        PdState { x, v }
    }

    fn check(&self, prob: &PdProblem) -> Result<()> {
        if self.v.len() != prob.blocks.len() {
            return Err(SplitError::Config(format!(
                "state has {} dual blocks, problem has {}",
                self.v.len(),
                prob.blocks.len()
            )));
        }
        Ok(())
    }
}

fn check_cert(cert: &StepSizeCertificate, expected: CertScheme, sched: &ParamSchedules) -> Result<()> {
    if cert.scheme != expected {
        return Err(SplitError::CertificateScheme {
            expected: expected.to_string(),
            got: cert.scheme.to_string(),
        });
    }
    if sched.lambda_cap() > cert.lambda_cap {
        return Err(SplitError::Schedule {
            iteration: 0,
            detail: format!(
                "lambda cap {} exceeds the certificate cap {}",
                sched.lambda_cap(),
                cert.lambda_cap
            ),
        });
    }
    Ok(())
}

fn adjoint_sum(blocks: &[PdBlock], v: &[Vector]) -> Result<Vector> {
    let mut acc = blocks[0].lin.adjoint_apply(&v[0]);
    for (blk, vi) in blocks.iter().zip(v).skip(1) {
        acc = add(&acc, &blk.lin.adjoint_apply(vi))?;
    }
    Ok(acc)
}

fn product_residual(px: f64, pv: &[f64]) -> f64 {
    (px * px + pv.iter().map(|r| r * r).sum::<f64>()).sqrt()
}

/// Forward-backward-type primal-dual iteration:
/// `p_n = J_{tau A}[b x_n - tau (b sum_i L_i^* v_{i,n} + C(b x_n))]`,
/// `q_{i,n} = J_{sigma_i B_i^{-1}}[b v_{i,n} + sigma_i (L_i(2 p_n - b x_n) - D_i^{-1}(b v_{i,n}))]`,
/// each followed by the relaxed Tikhonov update (`b = beta_n`).
pub fn solve_pd_fb(
    prob: &PdProblem,
    start: &PdState,
    cert: &StepSizeCertificate,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(PdState, SolveTrace)> {
    check_cert(cert, CertScheme::PdFb, sched)?;
    prob.check(cert)?;
    start.check(prob)?;
    let d_evals: Vec<&Operator> = prob
        .blocks
        .iter()
        .enumerate()
        .map(|(i, blk)| match &blk.d_inv {
            DualSmoothing::Eval(op) => Ok(op),
            DualSmoothing::Resolvent(_) => Err(SplitError::Config(format!(
                "block {i}: the forward-backward scheme needs a direct evaluation of D_i^{{-1}}; \
                 a resolvent alone cannot supply it"
            ))),
        })
        .collect::<Result<_>>()?;

    let tau = cert.tau;
    let (snapshots, stride) = crate::solvers::snapshot_setup(stop, start.x.space().dim());
    let mut trace = SolveTrace {
        iterates: if snapshots { Some(Vec::new()) } else { None },
        residual_history: Vec::new(),
        iterations_used: 0,
        terminated_by: Termination::MaxIterations,
        schedule_tag: sched.tag(),
        config_echo: format!(
            "solve_pd_fb tau={tau} sigmas={:?} m={} tol={:?} max_iter={}",
            cert.sigmas,
            prob.blocks.len(),
            match &stop.kind {
                StopKind::FixedPointResidual(t) => *t,
                StopKind::CustomResidual { tol, .. } => *tol,
            },
            stop.max_iterations
        ),
    };

    let mut x = start.x.clone();
    let mut v = start.v.clone();
    for n in 0..stop.max_iterations {
        let (beta, lambda) = sched.check_step(n)?;
        let bx = x.scale(beta);
        let bv: Vec<Vector> = v.iter().map(|vi| vi.scale(beta)).collect();

        let lsum = adjoint_sum(&prob.blocks, &v)?;
        let forward = match &prob.c_eval {
            Some(c) => axpby(beta, &lsum, 1.0, &c.apply(&bx))?,
            None => lsum.scale(beta),
        };
        let p = prob.a_res.resolve(tau, &axpby(1.0, &bx, -tau, &forward)?);
        let x_next = relax(&bx, &p, lambda);

        let two_p = axpby(2.0, &p, -1.0, &bx)?;
        let mut v_next = Vec::with_capacity(v.len());
        let mut dual_residuals = Vec::with_capacity(v.len());
        for (i, blk) in prob.blocks.iter().enumerate() {
            let sigma = cert.sigmas[i];
            let li = blk.lin.apply(&two_p);
            let d = d_evals[i].apply(&bv[i]);
            let arg = axpby(1.0, &bv[i], sigma, &sub(&li, &d)?)?;
            let q = blk.b_inv_res.resolve(sigma, &arg);
            dual_residuals.push(norm(&sub(&q, &bv[i])?));
            v_next.push(relax(&bv[i], &q, lambda));
        }

        match &stop.kind {
            StopKind::FixedPointResidual(tol) => {
                let r = product_residual(norm(&sub(&p, &bx)?), &dual_residuals);
                let inc = product_residual(
                    norm(&sub(&x_next, &x)?),
                    &v_next
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| Ok(norm(&sub(a, b)?)))
                        .collect::<Result<Vec<_>>>()?,
                );
                trace.record(n, stride, r, &x_next);
                if r <= *tol && inc <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((PdState::new(x_next, v_next), trace));
                }
            }
            StopKind::CustomResidual { eval, tol } => {
                let r = eval(&x_next);
                trace.record(n, stride, r, &x_next);
                if r <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((PdState::new(x_next, v_next), trace));
                }
            }
        }
        x = x_next;
        v = v_next;
    }
    trace.terminated_by = Termination::MaxIterations;
    Ok((PdState::new(x, v), trace))
}

/// How the prox of a conjugate is obtained: directly, or from the primal
/// prox through Moreau's identity on every call.
#[derive(Clone)]
pub enum GProx {
    Primal(ProxFunction),
    Conjugate(ProxFunction),
}

impl GProx {
    /// Resolvent handle evaluating `prox_{sigma g*}`.
    fn conjugate_resolvent(&self) -> Resolvent {
        match self {
            GProx::Primal(g) => conjugate_prox_handle(g).as_resolvent(),
            GProx::Conjugate(gs) => gs.as_resolvent(),
        }
    }
}

/// One block of the optimization instantiation of the FB-type scheme.
#[derive(Clone)]
pub struct FbOptBlock {
    pub g: GProx,
    /// `grad l_i^*`, cocoercive with the block's `nu_i`.
    pub l_conj_grad: Operator,
    pub lin: LinearMap,
}

/// Optimization instantiation: `A = df`, `C = grad h`, `B_i = dg_i`,
/// `D_i^{-1} = grad l_i^*`.
pub fn solve_pd_fb_opt(
    f: &ProxFunction,
    h: Option<&ProxFunction>,
    blocks: &[FbOptBlock],
    start: &PdState,
    cert: &StepSizeCertificate,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(PdState, SolveTrace)> {
    let c_eval = match h {
        Some(h) => {
            let (grad, lipschitz) = h
                .gradient()
                .ok_or_else(|| SplitError::Config("smooth term h needs a gradient".into()))?;
            let mu = if lipschitz == 0.0 { f64::INFINITY } else { 1.0 / lipschitz };
            let grad = grad.clone();
            Some(Operator::new(h.space().clone(), Regularity::Cocoercive(mu), move |x| grad(x)))
        }
        None => None,
    };
    let prob = PdProblem {
        a_res: f.as_resolvent(),
        c_eval,
        blocks: blocks
            .iter()
            .map(|blk| PdBlock {
                b_inv_res: blk.g.conjugate_resolvent(),
                d_inv: DualSmoothing::Eval(blk.l_conj_grad.clone()),
                lin: blk.lin.clone(),
            })
            .collect(),
    };
    solve_pd_fb(&prob, start, cert, sched, stop)
}

/// Douglas-Rachford-type primal-dual iteration (three half-step sweeps over
/// the blocks, relaxed Tikhonov updates of the governing sequence).
///
/// Returns the primal-dual point `(p_1, p_{2,i})` and the governing state
/// `(x, v)`. Termination requires `max(||z_1 - p_1||, max_i ||z_{2,i} - p_{2,i}||)`
/// and the governing increments to fall below the tolerance.
pub fn solve_pd_dr(
    prob: &PdProblem,
    start: &PdState,
    cert: &StepSizeCertificate,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(PdState, PdState, SolveTrace)> {
    check_cert(cert, CertScheme::PdDr, sched)?;
    prob.check(cert)?;
    start.check(prob)?;
    let d_resolvents: Vec<&Resolvent> = prob
        .blocks
        .iter()
        .enumerate()
        .map(|(i, blk)| match &blk.d_inv {
            DualSmoothing::Resolvent(r) => Ok(r),
            DualSmoothing::Eval(_) => Err(SplitError::Config(format!(
                "block {i}: the Douglas-Rachford scheme needs the resolvent of D_i^{{-1}}"
            ))),
        })
        .collect::<Result<_>>()?;

    let tau = cert.tau;
    let (snapshots, stride) = crate::solvers::snapshot_setup(stop, start.x.space().dim());
    let mut trace = SolveTrace {
        iterates: if snapshots { Some(Vec::new()) } else { None },
        residual_history: Vec::new(),
        iterations_used: 0,
        terminated_by: Termination::MaxIterations,
        schedule_tag: sched.tag(),
        config_echo: format!(
            "solve_pd_dr tau={tau} sigmas={:?} m={} max_iter={}",
            cert.sigmas,
            prob.blocks.len(),
            stop.max_iterations
        ),
    };

    let mut x = start.x.clone();
    let mut v = start.v.clone();
    let mut solution = PdState::new(x.clone(), v.clone());
    for n in 0..stop.max_iterations {
        let (beta, lambda) = sched.check_step(n)?;
        let bx = x.scale(beta);
        let bv: Vec<Vector> = v.iter().map(|vi| vi.scale(beta)).collect();

        let lsum = adjoint_sum(&prob.blocks, &v)?;
        let p1 = prob
            .a_res
            .resolve(tau, &axpby(1.0, &bx, -0.5 * tau, &lsum.scale(beta))?);
        let w1 = axpby(2.0, &p1, -1.0, &bx)?;

        let mut p2 = Vec::with_capacity(v.len());
        let mut w2 = Vec::with_capacity(v.len());
        for (i, blk) in prob.blocks.iter().enumerate() {
            let sigma = cert.sigmas[i];
            let arg = axpby(1.0, &bv[i], 0.5 * sigma, &blk.lin.apply(&w1))?;
            let p2i = blk.b_inv_res.resolve(sigma, &arg);
            w2.push(axpby(2.0, &p2i, -1.0, &bv[i])?);
            p2.push(p2i);
        }

        let wsum = adjoint_sum(&prob.blocks, &w2)?;
        let z1 = axpby(1.0, &w1, -0.5 * tau, &wsum)?;
        let x_next = axpby(1.0, &bx, lambda, &sub(&z1, &p1)?)?;

        let reflect = axpby(2.0, &z1, -1.0, &w1)?;
        let mut v_next = Vec::with_capacity(v.len());
        let mut dual_gaps = Vec::with_capacity(v.len());
        for (i, blk) in prob.blocks.iter().enumerate() {
            let sigma = cert.sigmas[i];
            let arg = axpby(1.0, &w2[i], 0.5 * sigma, &blk.lin.apply(&reflect))?;
            let z2i = d_resolvents[i].resolve(sigma, &arg);
            let gap = sub(&z2i, &p2[i])?;
            dual_gaps.push(norm(&gap));
            v_next.push(axpby(1.0, &bv[i], lambda, &gap)?);
        }

        solution = PdState::new(p1.clone(), p2.clone());
        match &stop.kind {
            StopKind::FixedPointResidual(tol) => {
                let gap = dual_gaps
                    .iter()
                    .fold(norm(&sub(&z1, &p1)?), |m, &g| m.max(g));
                let inc = product_residual(
                    norm(&sub(&x_next, &x)?),
                    &v_next
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| Ok(norm(&sub(a, b)?)))
                        .collect::<Result<Vec<_>>>()?,
                );
                trace.record(n, stride, gap.max(inc), &x_next);
                if gap <= *tol && inc <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((solution, PdState::new(x_next, v_next), trace));
                }
            }
            StopKind::CustomResidual { eval, tol } => {
                let r = eval(&x_next);
                trace.record(n, stride, r, &x_next);
                if r <= *tol {
                    trace.terminated_by = Termination::Tolerance;
                    return Ok((solution, PdState::new(x_next, v_next), trace));
                }
            }
        }
        x = x_next;
        v = v_next;
    }
    trace.terminated_by = Termination::MaxIterations;
    Ok((solution, PdState::new(x, v), trace))
}

/// One block of the optimization instantiation of the DR-type scheme.
#[derive(Clone)]
pub struct DrOptBlock {
    pub g: GProx,
    pub l: GProx,
    pub lin: LinearMap,
}

/// Optimization instantiation of the DR-type scheme:
/// `A = df`, `B_i = dg_i`, `D_i = dl_i`; conjugate proxes are built via
/// Moreau's identity when only the primal proxes are supplied.
pub fn solve_pd_dr_opt(
    f: &ProxFunction,
    blocks: &[DrOptBlock],
    start: &PdState,
    cert: &StepSizeCertificate,
    sched: &ParamSchedules,
    stop: &StoppingRule,
) -> Result<(PdState, PdState, SolveTrace)> {
    let prob = PdProblem {
        a_res: f.as_resolvent(),
        c_eval: None,
        blocks: blocks
            .iter()
            .map(|blk| PdBlock {
                b_inv_res: blk.g.conjugate_resolvent(),
                d_inv: DualSmoothing::Resolvent(blk.l.conjugate_resolvent()),
                lin: blk.lin.clone(),
            })
            .collect(),
    };
    solve_pd_dr(&prob, start, cert, sched, stop)
}

/// Resolvent of `B^{-1}` from the resolvent of `B` (Moreau identity for
/// operators); convenience re-export for building `PdBlock`s.
pub fn b_inverse_resolvent(b_res: &Resolvent) -> Resolvent {
    inverse_resolvent_handle(b_res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{make_default_schedules, validate_pd_dr_stepsizes, validate_pd_fb_stepsizes};
    use crate::space::Space;

    fn scalar(v: f64) -> Vector {
        Vector::new(Space::coordinate(1), vec![v]).unwrap()
    }

    fn tiny_stop(max_iter: usize) -> StoppingRule {
        StoppingRule::fixed_point(1e-300, max_iter).with_snapshot_stride(None)
    }

    #[test]
    fn pd_fb_collapses_to_origin() {
        // A = 0, C = 0, B_1 = normal cone of {0}, D_1^{-1} = 0, L = id
        let s = Space::coordinate(1);
        let prob = PdProblem {
            a_res: Resolvent::identity(s.clone()),
            c_eval: None,
            blocks: vec![PdBlock {
                b_inv_res: b_inverse_resolvent(&Resolvent::normal_cone_point(scalar(0.0))),
                d_inv: DualSmoothing::Eval(Operator::zero(s.clone())),
                lin: LinearMap::identity(s.clone()),
            }],
        };
        let cert =
            validate_pd_fb_stepsizes(0.5, &[0.5], &[1.0], f64::INFINITY, &[f64::INFINITY]).unwrap();
        let sched = make_default_schedules(1.0, cert.lambda_cap).unwrap();
        let start = PdState::new(scalar(2.0), vec![scalar(-1.0)]);
        let (out, _) = solve_pd_fb(&prob, &start, &cert, &sched, &tiny_stop(200_000)).unwrap();
        assert!(norm(&out.x) < 1e-5, "x {}", norm(&out.x));
        assert!(norm(&out.v[0]) < 1e-4, "v {}", norm(&out.v[0]));
    }

    #[test]
    fn pd_fb_small_sfp_feasibility() {
        // C = {x1 <= 1}, Q = unit ball, L = id, in coordinate(2)
        let s = Space::coordinate(2);
        let u = Vector::new(s.clone(), vec![1.0, 0.0]).unwrap();
        let center = Vector::zeros(s.clone());
        let proj_c = {
            let u = u.clone();
            move |x: &Vector| crate::operators::project_halfspace(&u, 1.0, x).unwrap()
        };
        let proj_q = {
            let center = center.clone();
            move |x: &Vector| crate::operators::project_ball(&center, 1.0, x).unwrap()
        };
        let f = ProxFunction::indicator(s.clone(), "halfspace", proj_c.clone());
        let g = ProxFunction::indicator(s.clone(), "ball", proj_q.clone());
        let blocks = vec![FbOptBlock {
            g: GProx::Primal(g),
            l_conj_grad: Operator::zero(s.clone()),
            lin: LinearMap::identity(s.clone()),
        }];
        let cert =
            validate_pd_fb_stepsizes(0.5, &[0.5], &[1.0], f64::INFINITY, &[f64::INFINITY]).unwrap();
        let sched = make_default_schedules(1.0, cert.lambda_cap).unwrap();
        let start = PdState::new(
            Vector::new(s.clone(), vec![3.0, 2.0]).unwrap(),
            vec![Vector::zeros(s)],
        );
        let (out, _) =
            solve_pd_fb_opt(&f, None, &blocks, &start, &cert, &sched, &tiny_stop(300_000)).unwrap();
        let rc = norm(&sub(&proj_c(&out.x), &out.x).unwrap());
        let rq = norm(&sub(&proj_q(&out.x), &out.x).unwrap());
        assert!(rc <= 1e-4, "P_C residual {rc}");
        assert!(rq <= 1e-4, "P_Q residual {rq}");
    }

    #[test]
    fn pd_fb_opt_quadratic() {
        // f = 0, h = 1/2||x-c||^2, g_1 = 0, grad l_1* = 0, L = id
        let s = Space::coordinate(1);
        let f = ProxFunction::zero(s.clone());
        let h = ProxFunction::sq_dist_half(scalar(3.0));
        let blocks = vec![FbOptBlock {
            g: GProx::Primal(ProxFunction::zero(s.clone())),
            l_conj_grad: Operator::zero(s.clone()),
            lin: LinearMap::identity(s.clone()),
        }];
        let cert = validate_pd_fb_stepsizes(0.4, &[0.4], &[1.0], 1.0, &[f64::INFINITY]).unwrap();
        let sched = make_default_schedules(0.9, cert.lambda_cap.min(1.0)).unwrap();
        let start = PdState::new(scalar(0.0), vec![scalar(0.0)]);
        let (out, _) =
            solve_pd_fb_opt(&f, Some(&h), &blocks, &start, &cert, &sched, &tiny_stop(300_000))
                .unwrap();
        assert!((out.x.values()[0] - 3.0).abs() < 1e-4, "x {}", out.x.values()[0]);
        assert!(norm(&out.v[0]) < 1e-3, "v {}", norm(&out.v[0]));
    }

    #[test]
    fn pd_fb_requires_direct_d_inverse() {
        let s = Space::coordinate(1);
        let prob = PdProblem {
            a_res: Resolvent::identity(s.clone()),
            c_eval: None,
            blocks: vec![PdBlock {
                b_inv_res: Resolvent::identity(s.clone()),
                d_inv: DualSmoothing::Resolvent(Resolvent::identity(s.clone())),
                lin: LinearMap::identity(s.clone()),
            }],
        };
        let cert =
            validate_pd_fb_stepsizes(0.5, &[0.5], &[1.0], f64::INFINITY, &[f64::INFINITY]).unwrap();
        let sched = make_default_schedules(1.0, cert.lambda_cap).unwrap();
        let start = PdState::new(scalar(0.0), vec![scalar(0.0)]);
        let err = solve_pd_fb(&prob, &start, &cert, &sched, &tiny_stop(5)).unwrap_err();
        assert!(matches!(err, SplitError::Config(_)));
    }

    #[test]
    fn pd_fb_rejects_scheme_mismatch() {
        let s = Space::coordinate(1);
        let prob = PdProblem {
            a_res: Resolvent::identity(s.clone()),
            c_eval: None,
            blocks: vec![PdBlock {
                b_inv_res: Resolvent::identity(s.clone()),
                d_inv: DualSmoothing::Eval(Operator::zero(s.clone())),
                lin: LinearMap::identity(s),
            }],
        };
        let cert = validate_pd_dr_stepsizes(0.5, &[0.5], &[1.0]).unwrap();
        let sched = make_default_schedules(1.0, 2.0).unwrap();
        let start = PdState::new(scalar(0.0), vec![scalar(0.0)]);
        let err = solve_pd_fb(&prob, &start, &cert, &sched, &tiny_stop(5)).unwrap_err();
        assert!(matches!(err, SplitError::CertificateScheme { .. }));
    }

    #[test]
    fn pd_dr_interval_membership() {
        // f = indicator [1,2], g_1 = 0, l_1 = indicator {0}, L = id
        let s = Space::coordinate(1);
        let f = ProxFunction::indicator_interval(s.clone(), 1.0, 2.0);
        let blocks = vec![DrOptBlock {
            g: GProx::Primal(ProxFunction::zero(s.clone())),
            // l = indicator of {0}: l* = 0, prox of l* is the identity
            l: GProx::Conjugate(ProxFunction::zero(s.clone())),
            lin: LinearMap::identity(s.clone()),
        }];
        let cert = validate_pd_dr_stepsizes(1.0, &[1.0], &[1.0]).unwrap();
        let sched = make_default_schedules(0.9, 2.0).unwrap();
        let start = PdState::new(scalar(5.0), vec![scalar(0.5)]);
        let (sol, _, _) =
            solve_pd_dr_opt(&f, &blocks, &start, &cert, &sched, &tiny_stop(300_000)).unwrap();
        let p = sol.x.values()[0];
        let proj = p.clamp(1.0, 2.0);
        assert!((proj - p).abs() <= 1e-6, "primal limit {p} not in [1,2]");
    }

    #[test]
    fn pd_dr_all_zero() {
        let s = Space::coordinate(1);
        let f = ProxFunction::zero(s.clone());
        let blocks = vec![DrOptBlock {
            g: GProx::Primal(ProxFunction::zero(s.clone())),
            l: GProx::Conjugate(ProxFunction::zero(s.clone())),
            lin: LinearMap::identity(s.clone()),
        }];
        let cert = validate_pd_dr_stepsizes(1.0, &[1.0], &[1.0]).unwrap();
        let sched = make_default_schedules(0.9, 2.0).unwrap();
        let start = PdState::new(scalar(4.0), vec![scalar(-2.0)]);
        let (sol, gov, _) =
            solve_pd_dr_opt(&f, &blocks, &start, &cert, &sched, &tiny_stop(300_000)).unwrap();
        assert!(norm(&sol.x) < 1e-4);
        assert!(norm(&gov.x) < 1e-4);
        assert!(norm(&gov.v[0]) < 1e-4);
    }

    #[test]
    fn pd_dr_quadratic() {
        // f = 1/2||.-c||^2, g_1 = 0, L = id: primal limit c
        let s = Space::coordinate(1);
        let f = ProxFunction::sq_dist_half(scalar(3.0));
        let blocks = vec![DrOptBlock {
            g: GProx::Primal(ProxFunction::zero(s.clone())),
            l: GProx::Conjugate(ProxFunction::zero(s.clone())),
            lin: LinearMap::identity(s.clone()),
        }];
        let cert = validate_pd_dr_stepsizes(1.0, &[1.0], &[1.0]).unwrap();
        let sched = make_default_schedules(0.9, 2.0).unwrap();
        let start = PdState::new(scalar(0.0), vec![scalar(0.0)]);
        let (sol, _, _) =
            solve_pd_dr_opt(&f, &blocks, &start, &cert, &sched, &tiny_stop(300_000)).unwrap();
        assert!((sol.x.values()[0] - 3.0).abs() < 1e-4, "got {}", sol.x.values()[0]);
    }

    #[test]
    fn pd_dr_rejects_boundary_stepsizes() {
        assert!(validate_pd_dr_stepsizes(1.0, &[1.0], &[4.0]).is_err());
    }
}
