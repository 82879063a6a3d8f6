//! Operator and function contracts: nonexpansive/averaged/cocoercive maps,
//! resolvents of set-valued operators, prox-friendly functions, and the
//! calculus rules connecting them.

use std::sync::Arc;

use crate::error::{Result, SplitError};
use crate::space::{axpby, inner, norm, sub, SpaceRef, Vector};

/// Declared regularity class of a single-valued operator. Declarations are
/// trusted at runtime; the test suite spot-checks them statistically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    Nonexpansive,
    /// `R = (1-alpha) id + alpha T` for some nonexpansive `T`.
    Averaged(f64),
    /// `<x-y, Bx-By> >= beta ||Bx-By||^2`. `f64::INFINITY` encodes the zero map.
    Cocoercive(f64),
    Lipschitz(f64),
}

type ApplyFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type ResolveFn = Arc<dyn Fn(f64, &Vector) -> Vector + Send + Sync>;
type ValueFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// A single-valued operator with a declared regularity class.
#[derive(Clone)]
pub struct Operator {
    apply: ApplyFn,
    regularity: Regularity,
    space: SpaceRef,
}

impl Operator {
    pub fn new(
        space: SpaceRef,
        regularity: Regularity,
        apply: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Operator { apply: Arc::new(apply), regularity, space }
    }

    /// The zero map, cocoercive for every modulus.
    pub fn zero(space: SpaceRef) -> Self {
        let s = space.clone();
        Operator::new(space, Regularity::Cocoercive(f64::INFINITY), move |_| {
            Vector::zeros(s.clone())
        })
    }

    pub fn identity(space: SpaceRef) -> Self {
        Operator::new(space, Regularity::Nonexpansive, Vector::clone)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.apply)(x)
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }
}

/// The resolvent family `gamma -> J_{gamma A}` of a maximally monotone
/// operator `A`, the only way set-valued operators enter any scheme.
#[derive(Clone)]
pub struct Resolvent {
    resolve: ResolveFn,
    space: SpaceRef,
    label: String,
}

impl Resolvent {
    pub fn new(
        space: SpaceRef,
        label: impl Into<String>,
        resolve: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Resolvent { resolve: Arc::new(resolve), space, label: label.into() }
    }

    /// Resolvent of the zero operator: the identity at every `gamma`.
    pub fn identity(space: SpaceRef) -> Self {
        Resolvent::new(space, "zero-operator", |_, x| x.clone())
    }

    /// Resolvent of the identity operator: `x / (1 + gamma)`.
    pub fn of_identity_operator(space: SpaceRef) -> Self {
        Resolvent::new(space, "identity-operator", |g, x| x.scale(1.0 / (1.0 + g)))
    }

    /// Resolvent of the normal cone of `[lo, hi]` (componentwise interval
    /// projection, independent of `gamma`).
    pub fn normal_cone_interval(space: SpaceRef, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        Resolvent::new(space, format!("normal-cone[{lo},{hi}]"), move |_, x| {
            x.map(|v| v.clamp(lo, hi))
        })
    }

    /// Resolvent of the normal cone of the singleton `{c}`: the constant map.
    pub fn normal_cone_point(c: Vector) -> Self {
        Resolvent::new(c.space().clone(), "normal-cone-point", move |_, _| c.clone())
    }

    /// Resolvent built from a metric projection (normal cone of the set).
    pub fn from_projection(
        space: SpaceRef,
        label: impl Into<String>,
        project: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Resolvent::new(space, label, move |_, x| project(x))
    }

    /// Resolvent of `A = d|.|` (componentwise soft-thresholding by `gamma`).
    pub fn soft_threshold(space: SpaceRef) -> Self {
        Resolvent::new(space, "subdiff-abs", |g, x| {
            x.map(|v| {
                if v > g {
                    v - g
                } else if v < -g {
                    v + g
                } else {
                    0.0
                }
            })
        })
    }

    pub fn resolve(&self, gamma: f64, x: &Vector) -> Vector {
        (self.resolve)(gamma, x)
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A prox-friendly function: its prox family, and optionally its value and
/// gradient (with Lipschitz constant of the gradient).
#[derive(Clone)]
pub struct ProxFunction {
    prox: ResolveFn,
    value: Option<ValueFn>,
    gradient: Option<(ApplyFn, f64)>,
    space: SpaceRef,
    label: String,
}

impl ProxFunction {
    pub fn new(
        space: SpaceRef,
        label: impl Into<String>,
        prox: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        ProxFunction {
            prox: Arc::new(prox),
            value: None,
            gradient: None,
            space,
            label: label.into(),
        }
    }

    pub fn with_value(mut self, value: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.value = Some(Arc::new(value));
        self
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        lipschitz: f64,
    ) -> Self {
        self.gradient = Some((Arc::new(gradient), lipschitz));
        self
    }

    /// The zero function: prox is the identity.
    pub fn zero(space: SpaceRef) -> Self {
        let s = space.clone();
        ProxFunction::new(space, "zero", |_, x| x.clone())
            .with_value(|_| 0.0)
            .with_gradient(move |_| Vector::zeros(s.clone()), 0.0)
    }

    /// `f = 1/2 ||.||^2`; prox is `x / (1 + gamma)`.
    pub fn sq_norm_half(space: SpaceRef) -> Self {
        ProxFunction::new(space, "sq-norm-half", |g, x| x.scale(1.0 / (1.0 + g)))
            .with_value(|x| 0.5 * norm(x) * norm(x))
            .with_gradient(Vector::clone, 1.0)
    }

    /// `f = 1/2 ||. - c||^2`.
    pub fn sq_dist_half(c: Vector) -> Self {
        let space = c.space().clone();
        let c1 = c.clone();
        let c2 = c.clone();
        ProxFunction::new(space, "sq-dist-half", move |g, x| {
            // prox = (x + gamma c)/(1 + gamma)
            axpby(1.0 / (1.0 + g), x, g / (1.0 + g), &c1).expect("sq_dist prox")
        })
        .with_value(move |x| {
            let d = sub(x, &c).expect("sq_dist value");
            0.5 * norm(&d) * norm(&d)
        })
        .with_gradient(move |x| sub(x, &c2).expect("sq_dist grad"), 1.0)
    }

    /// Indicator of the interval `[lo, hi]` (componentwise).
    pub fn indicator_interval(space: SpaceRef, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        ProxFunction::new(space, format!("indicator[{lo},{hi}]"), move |_, x| {
            x.map(|v| v.clamp(lo, hi))
        })
    }

    /// Indicator of a set given by its metric projection.
    pub fn indicator(
        space: SpaceRef,
        label: impl Into<String>,
        project: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        ProxFunction::new(space, label, move |_, x| project(x))
    }

    /// `f = |.|` summed over components; prox is soft-thresholding.
    pub fn abs(space: SpaceRef) -> Self {
        ProxFunction::new(space, "abs", |g, x| {
            x.map(|v| {
                if v > g {
                    v - g
                } else if v < -g {
                    v + g
                } else {
                    0.0
                }
            })
        })
        .with_value(|x| x.values().iter().map(|v| v.abs()).sum())
    }

    pub fn prox(&self, gamma: f64, x: &Vector) -> Vector {
        (self.prox)(gamma, x)
    }

    pub fn value(&self, x: &Vector) -> Option<f64> {
        self.value.as_ref().map(|f| f(x))
    }

    pub fn gradient(&self) -> Option<(&ApplyFn, f64)> {
        self.gradient.as_ref().map(|(g, l)| (g, *l))
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// View the prox family as a resolvent handle (`J_{gamma df} = prox_{gamma f}`).
    pub fn as_resolvent(&self) -> Resolvent {
        let p = self.prox.clone();
        Resolvent::new(self.space.clone(), format!("prox-{}", self.label), move |g, x| p(g, x))
    }
}

/// `R_A(x) = 2 J_{gamma A}(x) - x`, the reflected resolvent.
pub fn reflected_resolvent(j: &Resolvent, gamma: f64, x: &Vector) -> Result<Vector> {
    if gamma <= 0.0 {
        return Err(SplitError::Domain("reflected_resolvent requires gamma > 0".into()));
    }
    axpby(2.0, &j.resolve(gamma, x), -1.0, x)
}

/// `prox_{gamma f*}(x)` via Moreau's decomposition:
/// `x - gamma * prox_{(1/gamma) f}(x / gamma)`.
pub fn moreau_conjugate_prox(f: &ProxFunction, gamma: f64, x: &Vector) -> Result<Vector> {
    if gamma <= 0.0 {
        return Err(SplitError::Domain("moreau_conjugate_prox requires gamma > 0".into()));
    }
    let inner_prox = f.prox(1.0 / gamma, &x.scale(1.0 / gamma));
    axpby(1.0, x, -gamma, &inner_prox)
}

/// Prox handle of the conjugate `f*`, evaluated through Moreau's identity
/// on each call (never cached numerically).
pub fn conjugate_prox_handle(f: &ProxFunction) -> ProxFunction {
    let inner_f = f.clone();
    ProxFunction::new(f.space().clone(), format!("conj-{}", f.label()), move |g, x| {
        moreau_conjugate_prox(&inner_f, g, x).expect("conjugate prox")
    })
}

/// `J_{gamma^{-1} M^{-1}}(x / gamma) = (x - J_{gamma M}(x)) / gamma`,
/// the resolvent-of-the-inverse identity.
pub fn resolvent_of_inverse(j: &Resolvent, gamma: f64, x: &Vector) -> Result<Vector> {
    if gamma <= 0.0 {
        return Err(SplitError::Domain("resolvent_of_inverse requires gamma > 0".into()));
    }
    let jx = j.resolve(gamma, x);
    Ok(sub(x, &jx)?.scale(1.0 / gamma))
}

/// Resolvent handle for `M^{-1}` built from the resolvent of `M`:
/// `J_{sigma M^{-1}}(x) = x - sigma J_{sigma^{-1} M}(x / sigma)`.
pub fn inverse_resolvent_handle(j: &Resolvent) -> Resolvent {
    let inner_j = j.clone();
    Resolvent::new(j.space().clone(), format!("inv-{}", j.label()), move |sigma, x| {
        let jr = inner_j.resolve(1.0 / sigma, &x.scale(1.0 / sigma));
        axpby(1.0, x, -sigma, &jr).expect("inverse resolvent")
    })
}

/// Averagedness constant of a composition `T_1 o T_2` of averaged maps.
pub fn compose_averaged_alpha(alpha1: f64, alpha2: f64) -> Result<f64> {
    for a in [alpha1, alpha2] {
        if !(0.0 < a && a < 1.0) {
            return Err(SplitError::Domain(format!(
                "averagedness constants must lie in (0,1), got {a}"
            )));
        }
    }
    Ok((alpha1 + alpha2 - 2.0 * alpha1 * alpha2) / (1.0 - alpha1 * alpha2))
}

/// Projection onto the halfspace `{x : <x,u> <= b}`. Boundary points
/// (equality) are returned unchanged.
pub fn project_halfspace(u: &Vector, b: f64, x: &Vector) -> Result<Vector> {
    let u_norm_sq = inner(u, u)?;
    if u_norm_sq == 0.0 {
        return Err(SplitError::Domain("halfspace normal u must be nonzero".into()));
    }
    let ip = inner(x, u)?;
    if ip <= b {
        Ok(x.clone())
    } else {
        axpby(1.0, x, (b - ip) / u_norm_sq, u)
    }
}

/// Projection onto the closed ball of radius `r` around `center`.
pub fn project_ball(center: &Vector, r: f64, x: &Vector) -> Result<Vector> {
    if r <= 0.0 {
        return Err(SplitError::Domain("ball radius must be positive".into()));
    }
    let d = sub(x, center)?;
    let dist = norm(&d);
    if dist <= r {
        Ok(x.clone())
    } else {
        axpby(1.0, center, r / dist, &d)
    }
}

/// `x - P(x)`, the gradient of half the squared distance to the set
/// projected onto by `project`. The map is 1-cocoercive.
pub fn distance_sq_gradient(
    project: impl Fn(&Vector) -> Vector,
    x: &Vector,
) -> Result<Vector> {
    sub(x, &project(x))
}
