//! Scheme-equivalence checks: the composite solvers must reproduce the
//! simpler schemes they generalize, per iterate, to tight tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strongsplit::{
    add, axpby, make_default_schedules, make_unregularized_schedules, norm, solve_fb, solve_km,
    solve_km_averaged, solve_pd_dr, solve_pd_fb, sub, validate_pd_dr_stepsizes,
    validate_pd_fb_stepsizes, BenchConfig, BetaMode, DualSmoothing, LinearMap, Operator, PdBlock,
    PdProblem, PdState, ProxFunction, Regularity, Resolvent, SchemeChoice, SfpInstance, Space,
    StartTag, StoppingRule, Vector,
};

fn iterates(trace: &strongsplit::SolveTrace) -> &[Vector] {
    trace.iterates.as_deref().expect("snapshots enabled")
}

/// Forward-backward equals the averaged KM iteration on
/// `T = J_{gamma A} o (id - gamma B)` with `alpha = 2 beta / (4 beta - gamma)`.
#[test]
fn fb_is_averaged_km() {
    let s = Space::coordinate(3);
    let a = Resolvent::normal_cone_interval(s.clone(), 1.0, 2.0);
    let cocoercivity = 1.0;
    let b = Operator::new(s.clone(), Regularity::Cocoercive(cocoercivity), |x: &Vector| {
        x.map(|v| v - 3.0)
    });
    let gamma = 1.0;
    let alpha = 2.0 * cocoercivity / (4.0 * cocoercivity - gamma);
    let t = {
        let a = a.clone();
        let b = b.clone();
        Operator::new(s.clone(), Regularity::Averaged(alpha), move |v: &Vector| {
            let grad = b.apply(v);
            let arg = axpby(1.0, v, -gamma, &grad).unwrap();
            a.resolve(gamma, &arg)
        })
    };

    let x0 = Vector::new(s, vec![5.0, -1.0, 0.3]).unwrap();
    let cap = (4.0 * cocoercivity - gamma) / (2.0 * cocoercivity);
    let sched = make_default_schedules(0.8, cap).unwrap();
    let stop = StoppingRule::fixed_point(1e-300, 50).with_snapshot_stride(Some(1));

    let (_, fb_trace) = solve_fb(&a, &b, gamma, &x0, &sched, &stop).unwrap();
    let (_, km_trace) = solve_km_averaged(&t, &x0, &sched, &stop).unwrap();

    let fb = iterates(&fb_trace);
    let km = iterates(&km_trace);
    assert_eq!(fb.len(), 50);
    assert_eq!(km.len(), 50);
    for (n, (a, b)) in fb.iter().zip(km).enumerate() {
        let d = norm(&sub(a, b).unwrap());
        assert!(d <= 1e-10, "iterate {n} differs by {d}");
    }
}

/// Douglas-Rachford equals KM on the composed reflected resolvents
/// `R_{gamma A} R_{gamma B}` with the relaxation halved.
#[test]
fn dr_is_km_with_halved_relaxation() {
    let s = Space::coordinate(2);
    let gamma = 1.0;
    let a = Resolvent::normal_cone_interval(s.clone(), 0.0, 2.0);
    let b = ProxFunction::sq_dist_half(Vector::constant(s.clone(), 3.0)).as_resolvent();

    let r = {
        let a = a.clone();
        let b = b.clone();
        Operator::new(s.clone(), Regularity::Nonexpansive, move |x: &Vector| {
            let y = b.resolve(gamma, x);
            let ry = axpby(2.0, &y, -1.0, x).unwrap();
            let z = a.resolve(gamma, &ry);
            axpby(2.0, &z, -1.0, &ry).unwrap()
        })
    };

    let x0 = Vector::new(s, vec![4.0, -2.0]).unwrap();
    let lambda_dr = 1.0;
    let sched_dr = make_default_schedules(lambda_dr, 2.0).unwrap();
    let sched_km = make_default_schedules(lambda_dr / 2.0, 1.0).unwrap();
    let stop = StoppingRule::fixed_point(1e-300, 50).with_snapshot_stride(Some(1));

    let (_, _, dr_trace) = strongsplit::solve_dr(&a, &b, gamma, &x0, &sched_dr, &stop).unwrap();
    let (_, km_trace) = solve_km(&r, &x0, &sched_km, &stop).unwrap();

    for (n, (u, w)) in iterates(&dr_trace).iter().zip(iterates(&km_trace)).enumerate() {
        let d = norm(&sub(u, w).unwrap());
        assert!(d <= 1e-10, "iterate {n} differs by {d}");
    }
}

fn final_x_pd_fb(prob: &PdProblem, start: &PdState, budget: usize) -> Vector {
    let cert = validate_pd_fb_stepsizes(0.7, &[0.5], &[0.0], f64::INFINITY, &[f64::INFINITY])
        .unwrap();
    let sched = make_default_schedules(0.9, cert.lambda_cap).unwrap();
    let stop = StoppingRule::fixed_point(1e-300, budget).with_snapshot_stride(None);
    let (state, _) = solve_pd_fb(prob, start, &cert, &sched, &stop).unwrap();
    state.x
}

/// The primal-dual FB scheme with a nulled coupling block is the plain FB
/// iteration on `A` alone (`gamma = tau`).
#[test]
fn pd_fb_with_nulled_block_reduces_to_fb() {
    let s = Space::coordinate(3);
    let a = ProxFunction::sq_dist_half(Vector::new(s.clone(), vec![1.0, -2.0, 4.0]).unwrap());
    let prob = PdProblem {
        a_res: a.as_resolvent(),
        c_eval: None,
        blocks: vec![PdBlock {
            b_inv_res: Resolvent::identity(s.clone()),
            d_inv: DualSmoothing::Eval(Operator::zero(s.clone())),
            lin: LinearMap::zero(s.clone(), s.clone()),
        }],
    };
    let start = PdState::new(
        Vector::new(s.clone(), vec![3.0, 0.5, -1.0]).unwrap(),
        vec![Vector::new(s.clone(), vec![0.3, -0.7, 1.1]).unwrap()],
    );

    let b_zero = Operator::zero(s);
    let sched = make_default_schedules(0.9, 2.0).unwrap();
    for budget in [1usize, 2, 5, 17, 50] {
        let stop = StoppingRule::fixed_point(1e-300, budget).with_snapshot_stride(None);
        let (x_fb, _) =
            solve_fb(&a.as_resolvent(), &b_zero, 0.7, &start.x, &sched, &stop).unwrap();
        let x_pd = final_x_pd_fb(&prob, &start, budget);
        let d = norm(&sub(&x_pd, &x_fb).unwrap());
        assert!(d <= 1e-12, "budget {budget}: deviation {d}");
    }
}

/// The primal-dual DR scheme with a nulled coupling block performs the
/// proximal-point iteration on `A` alone, i.e. FB with a zero forward term.
#[test]
fn pd_dr_with_nulled_block_reduces_to_proximal_point() {
    let s = Space::coordinate(2);
    let tau = 0.7;
    let a = Resolvent::normal_cone_interval(s.clone(), 1.0, 2.0);
    let prob = PdProblem {
        a_res: a.clone(),
        c_eval: None,
        blocks: vec![PdBlock {
            b_inv_res: Resolvent::identity(s.clone()),
            d_inv: DualSmoothing::Resolvent(Resolvent::identity(s.clone())),
            lin: LinearMap::zero(s.clone(), s.clone()),
        }],
    };
    let start = PdState::new(
        Vector::new(s.clone(), vec![5.0, -3.0]).unwrap(),
        vec![Vector::new(s.clone(), vec![0.4, 0.4]).unwrap()],
    );
    let cert = validate_pd_dr_stepsizes(tau, &[0.5], &[0.0]).unwrap();
    let sched = make_default_schedules(0.9, 2.0).unwrap();
    let b_zero = Operator::zero(s);

    for budget in [1usize, 3, 8, 25, 50] {
        let stop = StoppingRule::fixed_point(1e-300, budget).with_snapshot_stride(None);
        let (_, gov, _) = solve_pd_dr(&prob, &start, &cert, &sched, &stop).unwrap();
        let (x_fb, _) = solve_fb(&a, &b_zero, tau, &start.x, &sched, &stop).unwrap();
        let d = norm(&sub(&gov.x, &x_fb).unwrap());
        assert!(d <= 1e-12, "budget {budget}: deviation {d}");
    }
}

/// The DR-type primal-dual solver matches a directly transcribed iteration
/// bit for bit over 50 iterations on randomized two-block problems.
#[test]
fn pd_dr_matches_direct_transcription() {
    let s = Space::coordinate(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..5 {
        let c = Vector::new(s.clone(), (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .unwrap();
        let diag1: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag2: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a_res = ProxFunction::sq_dist_half(c).as_resolvent();
        let blocks = vec![
            PdBlock {
                b_inv_res: Resolvent::soft_threshold(s.clone()),
                d_inv: DualSmoothing::Resolvent(Resolvent::normal_cone_interval(
                    s.clone(),
                    -1.0,
                    1.0,
                )),
                lin: LinearMap::diagonal(s.clone(), diag1),
            },
            PdBlock {
                b_inv_res: Resolvent::of_identity_operator(s.clone()),
                d_inv: DualSmoothing::Resolvent(Resolvent::identity(s.clone())),
                lin: LinearMap::diagonal(s.clone(), diag2),
            },
        ];
        let prob = PdProblem { a_res, c_eval: None, blocks };
        let tau = 0.3;
        let sigmas = [0.4, 0.5];
        let norm_sqs: Vec<f64> = prob
            .blocks
            .iter()
            .map(|b| b.lin.norm_squared(1e-8, 100).unwrap())
            .collect();
        let cert = validate_pd_dr_stepsizes(tau, &sigmas, &norm_sqs).unwrap();
        let lambda = 1.3;
        let sched = make_unregularized_schedules(lambda, 2.0).unwrap();

        let x0 = Vector::new(s.clone(), (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .unwrap();
        let v0: Vec<Vector> = (0..2)
            .map(|_| {
                Vector::new(s.clone(), (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect())
                    .unwrap()
            })
            .collect();
        let start = PdState::new(x0.clone(), v0.clone());

        // direct transcription (beta = 1, constant lambda)
        let mut x = x0;
        let mut v = v0;
        let d_res: Vec<&Resolvent> = prob
            .blocks
            .iter()
            .map(|b| match &b.d_inv {
                DualSmoothing::Resolvent(r) => r,
                DualSmoothing::Eval(_) => unreachable!(),
            })
            .collect();
        for _ in 0..50 {
            let bx = x.scale(1.0);
            let bv: Vec<Vector> = v.iter().map(|vi| vi.scale(1.0)).collect();
            let mut lsum = prob.blocks[0].lin.adjoint_apply(&v[0]);
            lsum = add(&lsum, &prob.blocks[1].lin.adjoint_apply(&v[1])).unwrap();
            let p1 = prob
                .a_res
                .resolve(tau, &axpby(1.0, &bx, -0.5 * tau, &lsum.scale(1.0)).unwrap());
            let w1 = axpby(2.0, &p1, -1.0, &bx).unwrap();
            let mut p2 = Vec::new();
            let mut w2 = Vec::new();
            for (i, blk) in prob.blocks.iter().enumerate() {
                let arg = axpby(1.0, &bv[i], 0.5 * sigmas[i], &blk.lin.apply(&w1)).unwrap();
                let p2i = blk.b_inv_res.resolve(sigmas[i], &arg);
                w2.push(axpby(2.0, &p2i, -1.0, &bv[i]).unwrap());
                p2.push(p2i);
            }
            let mut wsum = prob.blocks[0].lin.adjoint_apply(&w2[0]);
            wsum = add(&wsum, &prob.blocks[1].lin.adjoint_apply(&w2[1])).unwrap();
            let z1 = axpby(1.0, &w1, -0.5 * tau, &wsum).unwrap();
            let x_next = axpby(1.0, &bx, lambda, &sub(&z1, &p1).unwrap()).unwrap();
            let reflect = axpby(2.0, &z1, -1.0, &w1).unwrap();
            let mut v_next = Vec::new();
            for (i, blk) in prob.blocks.iter().enumerate() {
                let arg = axpby(1.0, &w2[i], 0.5 * sigmas[i], &blk.lin.apply(&reflect)).unwrap();
                let z2i = d_res[i].resolve(sigmas[i], &arg);
                v_next.push(axpby(1.0, &bv[i], lambda, &sub(&z2i, &p2[i]).unwrap()).unwrap());
            }
            x = x_next;
            v = v_next;
        }

        let stop = StoppingRule::fixed_point(1e-300, 50).with_snapshot_stride(None);
        let (_, gov, _) = solve_pd_dr(&prob, &start, &cert, &sched, &stop).unwrap();
        assert_eq!(gov.x.values(), x.values(), "case {case}: primal drifted");
        for i in 0..2 {
            assert_eq!(gov.v[i].values(), v[i].values(), "case {case}: dual {i} drifted");
        }
    }
}

/// The first benchmark iteration of each scheme matches a hand transcription
/// of the displayed update formulas bit for bit.
#[test]
fn sfp_first_iteration_matches_hand_transcription() {
    let inst = SfpInstance::new(512);
    let cfg = BenchConfig { n: 512, tol: 1e-300, max_iter: 1, ..BenchConfig::default() };
    let x0 = inst.start(StartTag::EHalf);
    let v0 = inst.start(StartTag::T2Over10);
    let (beta, lambda) = (0.25, cfg.lambda);
    let (tau, sigma) = (cfg.tau, cfg.sigma);
    let l = inst.lin();

    let relax = |x: &Vector, y: &Vector, s: f64| {
        Vector::new(
            x.space().clone(),
            x.values()
                .iter()
                .zip(y.values())
                .map(|(&a, &b)| a + s * (b - a))
                .collect(),
        )
        .unwrap()
    };
    let conj_ball_prox = |arg: &Vector| {
        // prox_{sigma i_Q*} via Moreau: arg - sigma P_Q(arg / sigma)
        let inner = inst.project_q(&arg.scale(1.0 / sigma));
        axpby(1.0, arg, -sigma, &inner).unwrap()
    };

    // scheme with both sets as indicators
    {
        let bx = x0.scale(beta);
        let bv = v0.scale(beta);
        let lsum = l.adjoint_apply(&v0);
        let forward = lsum.scale(beta);
        let p = inst.project_c(&axpby(1.0, &bx, -tau, &forward).unwrap());
        let x1 = relax(&bx, &p, lambda);
        let two_p = axpby(2.0, &p, -1.0, &bx).unwrap();
        let li = l.apply(&two_p);
        let d = Vector::zeros(inst.space().clone());
        let arg = axpby(1.0, &bv, sigma, &sub(&li, &d).unwrap()).unwrap();
        let q = conj_ball_prox(&arg);
        let v1 = relax(&bv, &q, lambda);

        let run = strongsplit::run_scheme(&inst, &cfg, SchemeChoice::Alg1, &x0, &v0,
            BetaMode::Default)
        .unwrap();
        assert_eq!(run.iterations, 1);
        assert_eq!(run.x.values(), x1.values(), "alg1 primal first iterate");
        assert_eq!(run.v[0].values(), v1.values(), "alg1 dual first iterate");
    }

    // scheme with the halfspace entering through its smoothed distance
    {
        let bx = x0.scale(beta);
        let bv = v0.scale(beta);
        let lsum = l.adjoint_apply(&v0);
        let grad = sub(&bx, &inst.project_c(&bx)).unwrap();
        let forward = axpby(beta, &lsum, 1.0, &grad).unwrap();
        let p = axpby(1.0, &bx, -tau, &forward).unwrap();
        let x1 = relax(&bx, &p, lambda);
        let two_p = axpby(2.0, &p, -1.0, &bx).unwrap();
        let li = l.apply(&two_p);
        let d = Vector::zeros(inst.space().clone());
        let arg = axpby(1.0, &bv, sigma, &sub(&li, &d).unwrap()).unwrap();
        let q = conj_ball_prox(&arg);
        let v1 = relax(&bv, &q, lambda);

        let run = strongsplit::run_scheme(&inst, &cfg, SchemeChoice::Alg2, &x0, &v0,
            BetaMode::Default)
        .unwrap();
        assert_eq!(run.x.values(), x1.values(), "alg2 primal first iterate");
        assert_eq!(run.v[0].values(), v1.values(), "alg2 dual first iterate");
    }
}

/// At a converged point of the optimization instantiation the KKT residual
/// is below ten times the stopping tolerance.
#[test]
fn kkt_residual_small_at_returned_point() {
    let s = Space::coordinate(2);
    let center = Vector::new(s.clone(), vec![3.0, -1.0]).unwrap();
    let f = ProxFunction::sq_dist_half(center.clone());
    let g_ball = ProxFunction::indicator(s.clone(), "unit-ball", {
        let origin = Vector::zeros(s.clone());
        move |y: &Vector| strongsplit::project_ball(&origin, 1.0, y).unwrap()
    });
    let lin = LinearMap::identity(s.clone());
    let tau = 0.5;
    let sigma = 0.5;
    let cert = validate_pd_fb_stepsizes(tau, &[sigma], &[1.0], f64::INFINITY, &[f64::INFINITY])
        .unwrap();
    let sched = make_unregularized_schedules(0.9, cert.lambda_cap).unwrap();
    let tol = 1e-8;
    let stop = StoppingRule::fixed_point(tol, 2_000_000).with_snapshot_stride(None);
    let start = PdState::new(Vector::zeros(s.clone()), vec![Vector::zeros(s.clone())]);
    let blocks = vec![strongsplit::FbOptBlock {
        g: strongsplit::GProx::Primal(g_ball.clone()),
        l_conj_grad: Operator::zero(s.clone()),
        lin: lin.clone(),
    }];
    let (state, trace) =
        strongsplit::solve_pd_fb_opt(&f, None, &blocks, &start, &cert, &sched, &stop).unwrap();
    assert_eq!(trace.terminated_by, strongsplit::Termination::Tolerance);

    // KKT residual at (x, v)
    let x = &state.x;
    let v = &state.v[0];
    let p = f
        .as_resolvent()
        .resolve(tau, &axpby(1.0, x, -tau, &lin.adjoint_apply(v)).unwrap());
    let q_arg = axpby(1.0, v, sigma, &lin.apply(x)).unwrap();
    let q = strongsplit::conjugate_prox_handle(&g_ball)
        .as_resolvent()
        .resolve(sigma, &q_arg);
    let res = norm(&sub(x, &p).unwrap()) + norm(&sub(v, &q).unwrap());
    assert!(res <= 10.0 * tol, "KKT residual {res} above {}", 10.0 * tol);
}

/// At a converged DR-type run, the returned primal-dual point satisfies the
/// defining resolvent equations of the limit.
#[test]
fn pd_dr_limit_satisfies_resolvent_equations() {
    let s = Space::coordinate(2);
    let c = Vector::new(s.clone(), vec![2.0, -1.0]).unwrap();
    let prob = PdProblem {
        a_res: ProxFunction::sq_dist_half(c).as_resolvent(),
        c_eval: None,
        blocks: vec![PdBlock {
            b_inv_res: strongsplit::conjugate_prox_handle(&ProxFunction::zero(s.clone()))
                .as_resolvent(),
            d_inv: DualSmoothing::Resolvent(Resolvent::identity(s.clone())),
            lin: LinearMap::identity(s.clone()),
        }],
    };
    let tau = 1.0;
    let sigma = 1.0;
    let cert = validate_pd_dr_stepsizes(tau, &[sigma], &[1.0]).unwrap();
    let sched = make_unregularized_schedules(0.9, 2.0).unwrap();
    let stop = StoppingRule::fixed_point(1e-9, 2_000_000).with_snapshot_stride(None);
    let start = PdState::new(Vector::zeros(s.clone()), vec![Vector::zeros(s)]);
    let (sol, gov, trace) = solve_pd_dr(&prob, &start, &cert, &sched, &stop).unwrap();
    assert_eq!(trace.terminated_by, strongsplit::Termination::Tolerance);

    // p1 = J_{tau A}(x - (tau/2) L* v)
    let p1 = prob.a_res.resolve(
        tau,
        &axpby(1.0, &gov.x, -0.5 * tau, &prob.blocks[0].lin.adjoint_apply(&gov.v[0])).unwrap(),
    );
    assert!(norm(&sub(&p1, &sol.x).unwrap()) <= 1e-6, "primal resolvent equation");

    // p2 = J_{sigma B^{-1}}(v + (sigma/2) L (2 p1 - x))
    let w1 = axpby(2.0, &p1, -1.0, &gov.x).unwrap();
    let p2 = prob.blocks[0].b_inv_res.resolve(
        sigma,
        &axpby(1.0, &gov.v[0], 0.5 * sigma, &prob.blocks[0].lin.apply(&w1)).unwrap(),
    );
    assert!(norm(&sub(&p2, &sol.v[0]).unwrap()) <= 1e-6, "dual resolvent equation");
}
