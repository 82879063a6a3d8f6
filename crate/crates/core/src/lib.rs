//! Strongly convergent operator-splitting solvers.
//!
//! The schemes here are Tikhonov-regularized variants of the classical
//! Krasnosel'skii-Mann, forward-backward, and Douglas-Rachford iterations,
//! plus two structured primal-dual schemes. Shrinking each iterate by a
//! factor `beta_n -> 1` before the relaxation step turns the weakly
//! convergent classical methods into strongly convergent ones whose limits
//! are the minimal-norm solutions.
//!
//! `space` provides weighted finite-dimensional models of the underlying
//! Hilbert spaces; `operators` the resolvent/prox calculus; `schedules` the
//! parameter sequences and step-size certificates; `solvers` and
//! `primal_dual` the iterations; `sfp` a split-feasibility benchmark.

pub mod error;
pub mod linmap;
pub mod operators;
pub mod primal_dual;
pub mod schedules;
pub mod sfp;
pub mod solvers;
pub mod space;

pub use error::{Result, SplitError};
pub use linmap::{operator_norm_estimate, LinearMap};
pub use operators::{
    compose_averaged_alpha, conjugate_prox_handle, distance_sq_gradient, inverse_resolvent_handle,
    moreau_conjugate_prox, project_ball, project_halfspace, reflected_resolvent,
    resolvent_of_inverse, Operator, ProxFunction, Regularity, Resolvent,
};
pub use primal_dual::{
    b_inverse_resolvent, solve_pd_dr, solve_pd_dr_opt, solve_pd_fb, solve_pd_fb_opt, DrOptBlock,
    DualSmoothing, FbOptBlock, GProx, PdBlock, PdProblem, PdState,
};
pub use schedules::{
    make_default_schedules, make_unregularized_schedules, validate_pd_dr_stepsizes,
    validate_pd_fb_stepsizes, CertScheme, FamilyTag, ParamSchedules, StepSizeCertificate,
};
pub use sfp::{
    l_norm_squared_analytic, rank_one_map, reference_counts, reproduce_table, reproduce_tables,
    run_scheme, BenchConfig, BetaMode, PaperCell, RunResult, SchemeChoice, SfpInstance, StartTag,
    TableCell, TableReport,
};
pub use solvers::{
    solve_dr, solve_dr_opt, solve_fb, solve_km, solve_km_averaged, solve_prox_grad, SolveTrace,
    StopKind, StoppingRule, Termination,
};
pub use space::{add, axpby, distance, inner, norm, sub, Space, SpaceRef, Vector};
