//! Linear maps with adjoints, and power-iteration norm estimation.

use std::sync::Arc;

use crate::error::{Result, SplitError};
use crate::space::{inner, norm, SpaceRef, Vector};

type MapFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// A linear continuous map between two spaces, given by its action and the
/// action of its adjoint. `norm_bound`, when set, is an analytic bound on
/// the operator norm and takes precedence over iterative estimation.
#[derive(Clone)]
pub struct LinearMap {
    apply: MapFn,
    adjoint: MapFn,
    domain: SpaceRef,
    codomain: SpaceRef,
    norm_bound: Option<f64>,
}

impl LinearMap {
    pub fn new(
        domain: SpaceRef,
        codomain: SpaceRef,
        apply: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        adjoint: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        LinearMap {
            apply: Arc::new(apply),
            adjoint: Arc::new(adjoint),
            domain,
            codomain,
            norm_bound: None,
        }
    }

    pub fn with_norm_bound(mut self, bound: f64) -> Self {
        assert!(bound >= 0.0);
        self.norm_bound = Some(bound);
        self
    }

    pub fn identity(space: SpaceRef) -> Self {
        LinearMap::new(space.clone(), space, Vector::clone, Vector::clone).with_norm_bound(1.0)
    }

    /// Diagonal map on a coordinate space.
    pub fn diagonal(space: SpaceRef, diag: Vec<f64>) -> Self {
        assert_eq!(space.dim(), diag.len());
        let bound = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let d2 = diag.clone();
        LinearMap::new(
            space.clone(),
            space,
            move |x: &Vector| {
                let vals = x.values().iter().zip(&diag).map(|(v, d)| v * d).collect();
                Vector::new(x.space().clone(), vals).expect("diagonal apply")
            },
            move |x: &Vector| {
                let vals = x.values().iter().zip(&d2).map(|(v, d)| v * d).collect();
                Vector::new(x.space().clone(), vals).expect("diagonal adjoint")
            },
        )
        .with_norm_bound(bound)
    }

    /// The zero map (useful for reductions where a coupling block is absent).
    pub fn zero(domain: SpaceRef, codomain: SpaceRef) -> Self {
        let cod = codomain.clone();
        let dom = domain.clone();
        LinearMap::new(
            domain,
            codomain.clone(),
            move |_: &Vector| Vector::zeros(cod.clone()),
            move |_: &Vector| Vector::zeros(dom.clone()),
        )
        .with_norm_bound(0.0)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.apply)(x)
    }

    pub fn adjoint_apply(&self, y: &Vector) -> Vector {
        (self.adjoint)(y)
    }

    pub fn domain(&self) -> &SpaceRef {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceRef {
        &self.codomain
    }

    pub fn norm_bound(&self) -> Option<f64> {
        self.norm_bound
    }

    /// Squared operator norm for certificates: the analytic bound when one
    /// was supplied, otherwise a power-iteration estimate.
    pub fn norm_squared(&self, tol: f64, max_iter: usize) -> Result<f64> {
        match self.norm_bound {
            Some(b) => Ok(b * b),
            None => operator_norm_estimate(self, tol, max_iter).map(|s| s * s),
        }
    }

    /// `|<Lx,y> - <x,L*y>|` for the adjoint identity spot-check.
    pub fn adjoint_defect(&self, x: &Vector, y: &Vector) -> Result<f64> {
        let lhs = inner(&self.apply(x), y)?;
        let rhs = inner(x, &self.adjoint_apply(y))?;
        Ok((lhs - rhs).abs())
    }
}

/// Power iteration on `L*L`, returning an estimate of the operator norm.
///
/// Starts from the all-ones vector; falls back to a deterministic
/// pseudo-random start if the ones vector lies in the null space.
pub fn operator_norm_estimate(l: &LinearMap, tol: f64, max_iter: usize) -> Result<f64> {
    if tol <= 0.0 {
        return Err(SplitError::Domain("operator_norm_estimate requires tol > 0".into()));
    }
    let mut v = Vector::constant(l.domain().clone(), 1.0);
    let mut lv = l.apply(&v);
    if norm(&lv) == 0.0 {
        // fixed-seed fallback start (splitmix-style sequence)
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        let vals: Vec<f64> = (0..l.domain().dim())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        v = Vector::new(l.domain().clone(), vals)?;
        lv = l.apply(&v);
        if norm(&lv) == 0.0 {
            return Err(SplitError::Domain("operator appears to be zero".into()));
        }
    }

    let mut sigma = 0.0f64;
    for it in 0..max_iter {
        let w = l.adjoint_apply(&lv); // w = L*L v
        let vn = norm(&v);
        let rayleigh = inner(&v, &w)? / (vn * vn);
        let next_sigma = rayleigh.max(0.0).sqrt();
        let wn = norm(&w);
        if wn == 0.0 {
            return Err(SplitError::NormEstimateFailed { iterations: it, best: sigma });
        }
        v = w.scale(1.0 / wn);
        lv = l.apply(&v);
        if it > 0 && (next_sigma - sigma).abs() <= 0.1 * tol * next_sigma.max(f64::MIN_POSITIVE) {
            return Ok(next_sigma);
        }
        sigma = next_sigma;
    }
    Err(SplitError::NormEstimateFailed { iterations: max_iter, best: sigma })
}
