//! Shared fixtures for the criterion benchmarks: small solver problems and
//! the discretized split-feasibility instance.

use strongsplit::{
    make_default_schedules, Operator, ParamSchedules, Regularity, Resolvent, Space, SpaceRef,
    StoppingRule, Vector,
};

/// A soft-threshold + affine-gradient pair on a coordinate space: the
/// forward-backward iteration's workhorse shapes.
pub fn fb_problem(dim: usize) -> (Resolvent, Operator, Vector) {
    let s = Space::coordinate(dim);
    let a = Resolvent::soft_threshold(s.clone());
    let b = Operator::new(s.clone(), Regularity::Cocoercive(1.0), |x: &Vector| {
        x.map(|v| v - 3.0)
    });
    let x0 = Vector::constant(s, 0.5);
    (a, b, x0)
}

/// An interval projection as a nonexpansive operator.
pub fn km_operator(dim: usize) -> (Operator, Vector) {
    let s = Space::coordinate(dim);
    let t = Operator::new(s.clone(), Regularity::Nonexpansive, |x: &Vector| {
        x.map(|v| v.clamp(1.0, 2.0))
    });
    (t, Vector::constant(s, 5.0))
}

pub fn grid_space(n: usize) -> SpaceRef {
    Space::grid(0.0, 2.0 * std::f64::consts::PI, n)
}

/// Tikhonov schedules with the default cap for nonexpansive iterations.
pub fn schedules() -> ParamSchedules {
    make_default_schedules(0.9, 1.0).expect("valid schedules")
}

/// A budget-only stopping rule (tolerance effectively disabled).
pub fn budget(iterations: usize) -> StoppingRule {
    StoppingRule::fixed_point(1e-300, iterations).with_snapshot_stride(None)
}
