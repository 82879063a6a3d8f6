//! Real inner-product spaces and the vectors living on them.
//!
//! Three kinds of spaces are supported: plain coordinate spaces,
//! quadrature-weighted grid spaces standing in for `L^2([a,b])`, and
//! finite products of spaces. Grid spaces carry trapezoid weights, so the
//! inner product of two grid vectors approximates the integral of their
//! pointwise product.

use std::sync::Arc;

use crate::error::{Result, SplitError};

/// Handle to a space. Spaces are immutable and shared by reference.
pub type SpaceRef = Arc<Space>;

#[derive(Debug, PartialEq)]
pub enum Space {
    Coordinate {
        dim: usize,
    },
    Grid {
        a: f64,
        b: f64,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    },
    Product {
        components: Vec<SpaceRef>,
    },
}

impl Space {
    pub fn coordinate(dim: usize) -> SpaceRef {
        assert!(dim > 0, "coordinate space needs positive dimension");
        Arc::new(Space::Coordinate { dim })
    }

    /// Uniform grid on `[a, b]` with trapezoid quadrature weights
    /// (`h/2` at the endpoints, `h` inside, `h = (b-a)/(n-1)`).
    pub fn grid(a: f64, b: f64, n: usize) -> SpaceRef {
        assert!(n >= 2, "grid needs at least two nodes");
        assert!(a < b, "grid endpoints must satisfy a < b");
        let h = (b - a) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
        let mut weights = vec![h; n];
        weights[0] = h / 2.0;
        weights[n - 1] = h / 2.0;
        Arc::new(Space::Grid { a, b, nodes, weights })
    }

    pub fn product(components: Vec<SpaceRef>) -> SpaceRef {
        assert!(!components.is_empty(), "product space needs components");
        Arc::new(Space::Product { components })
    }

    /// Total dimension (sum of component dimensions for products).
    pub fn dim(&self) -> usize {
        match self {
            Space::Coordinate { dim } => *dim,
            Space::Grid { nodes, .. } => nodes.len(),
            Space::Product { components } => components.iter().map(|c| c.dim()).sum(),
        }
    }

    /// Grid nodes; panics for non-grid spaces.
    pub fn nodes(&self) -> &[f64] {
        match self {
            Space::Grid { nodes, .. } => nodes,
            _ => panic!("nodes() is only defined on grid spaces"),
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Space::Grid { .. })
    }
}

fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A vector on a space. Values are stored flat; product vectors store
/// the component blocks concatenated.
#[derive(Debug, Clone)]
pub struct Vector {
    space: SpaceRef,
    values: Vec<f64>,
}

impl Vector {
    pub fn new(space: SpaceRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(SplitError::DimensionMismatch {
                left: space.dim(),
                right: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SplitError::NonFinite {
                context: "Vector::new".into(),
            });
        }
        Ok(Vector { space, values })
    }

    pub fn zeros(space: SpaceRef) -> Self {
        let n = space.dim();
        Vector { space, values: vec![0.0; n] }
    }

    pub fn constant(space: SpaceRef, c: f64) -> Self {
        let n = space.dim();
        Vector { space, values: vec![c; n] }
    }

    /// Sample a scalar function at the grid nodes.
    pub fn sample(space: SpaceRef, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = space.nodes().iter().map(|&t| f(t)).collect();
        Vector { space, values }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entrywise map; the result stays on the same space.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Vector {
        self.map(|v| a * v)
    }

    fn check_same(&self, other: &Vector) -> Result<()> {
        if !same_space(&self.space, &other.space) {
            return Err(SplitError::DimensionMismatch {
                left: self.space.dim(),
                right: other.space.dim(),
            });
        }
        Ok(())
    }
}

fn inner_rec(space: &Space, xs: &[f64], ys: &[f64]) -> f64 {
    match space {
        Space::Coordinate { .. } => xs.iter().zip(ys).map(|(x, y)| x * y).sum(),
        Space::Grid { weights, .. } => weights
            .iter()
            .zip(xs.iter().zip(ys))
            .map(|(w, (x, y))| w * x * y)
            .sum(),
        Space::Product { components } => {
            let mut acc = 0.0;
            let mut offset = 0;
            for c in components {
                let d = c.dim();
                acc += inner_rec(c, &xs[offset..offset + d], &ys[offset..offset + d]);
                offset += d;
            }
            acc
        }
    }
}

/// Inner product of the common space (quadrature-weighted on grids,
/// block sum on products).
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    x.check_same(y)?;
    Ok(inner_rec(&x.space, &x.values, &y.values))
}

pub fn norm(x: &Vector) -> f64 {
    inner_rec(&x.space, &x.values, &x.values).sqrt()
}

/// Entrywise `a*x + b*y`.
pub fn axpby(a: f64, x: &Vector, b: f64, y: &Vector) -> Result<Vector> {
    x.check_same(y)?;
    let values: Vec<f64> = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(&xv, &yv)| a * xv + b * yv)
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SplitError::NonFinite { context: "axpby".into() });
    }
    Ok(Vector { space: x.space.clone(), values })
}

/// `x + s*(y - x)`, the relaxation step shared by all solvers.
pub(crate) fn relax(x: &Vector, y: &Vector, s: f64) -> Vector {
    let values: Vec<f64> = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(&xv, &yv)| xv + s * (yv - xv))
        .collect();
    Vector { space: x.space.clone(), values }
}

pub fn sub(x: &Vector, y: &Vector) -> Result<Vector> {
    axpby(1.0, x, -1.0, y)
}

pub fn add(x: &Vector, y: &Vector) -> Result<Vector> {
    axpby(1.0, x, 1.0, y)
}

/// Distance in the space's norm.
pub fn distance(x: &Vector, y: &Vector) -> Result<f64> {
    Ok(norm(&sub(x, y)?))
}
