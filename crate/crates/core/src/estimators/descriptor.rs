use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{centered_extremes, Body, EmbeddedBody, Polytope};
use crate::linalg::VectorN;

/// Quantized orthogonal-invariant shape class of a body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ShapeClass {
    /// Ball of the given radius (rounded to the grid).
    Ball { dim: usize, radius: i64 },
    /// Sorted pairwise distances between extreme vertices, each rounded to
    /// the nearest grid multiple.
    Vertices { dim: usize, distances: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    pub grid_step: f64,
    pub class: ShapeClass,
}

/// Sorted pairwise distances between the given points.
pub fn pairwise_signature(points: &[VectorN]) -> Vec<f64> {
    let mut d = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d.push((a - b).norm());
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

fn quantize(x: f64, step: f64) -> i64 {
    (x / step).round() as i64
}

pub fn polytope_descriptor(p: &Polytope, grid_step: f64) -> ShapeDescriptor {
    assert!(grid_step > 0.0, "descriptor grid step must be positive");
    let ext = centered_extremes(p);
    ShapeDescriptor {
        grid_step,
        class: ShapeClass::Vertices {
            dim: p.dim(),
            distances: pairwise_signature(&ext)
                .into_iter()
                .map(|d| quantize(d, grid_step))
                .collect(),
        },
    }
}

pub fn shape_descriptor(body: &Body, grid_step: f64) -> ShapeDescriptor {
    assert!(grid_step > 0.0, "descriptor grid step must be positive");
    match body {
        Body::Polytope(p) => polytope_descriptor(p, grid_step),
        Body::Ball { dim, radius } => ShapeDescriptor {
            grid_step,
            class: ShapeClass::Ball {
                dim: *dim,
                radius: quantize(*radius, grid_step),
            },
        },
    }
}

pub fn embedded_descriptor(body: &EmbeddedBody, grid_step: f64) -> ShapeDescriptor {
    shape_descriptor(body.body(), grid_step)
}

/// Unrounded orthogonal invariants of a body: the input to [`ClassRegistry`].
#[derive(Debug, Clone, PartialEq)]
pub enum RawShape {
    Ball { dim: usize, radius: f64 },
    Vertices { dim: usize, distances: Vec<f64> },
}

pub fn raw_shape(body: &Body) -> RawShape {
    match body {
        Body::Polytope(p) => RawShape::Vertices {
            dim: p.dim(),
            distances: pairwise_signature(&centered_extremes(p)),
        },
        Body::Ball { dim, radius } => RawShape::Ball {
            dim: *dim,
            radius: *radius,
        },
    }
}

impl RawShape {
    fn kind(&self) -> (usize, usize) {
        match self {
            RawShape::Ball { dim, .. } => (*dim, usize::MAX),
            RawShape::Vertices { dim, distances } => (*dim, distances.len()),
        }
    }

    fn key(&self) -> f64 {
        match self {
            RawShape::Ball { radius, .. } => *radius,
            RawShape::Vertices { distances, .. } => distances.last().copied().unwrap_or(0.0),
        }
    }

    fn within(&self, other: &RawShape, tol: f64) -> bool {
        match (self, other) {
            (RawShape::Ball { dim: a, radius: r }, RawShape::Ball { dim: b, radius: s }) => {
                a == b && (r - s).abs() <= tol
            }
            (
                RawShape::Vertices { dim: a, distances: x },
                RawShape::Vertices { dim: b, distances: y },
            ) => a == b && x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol),
            _ => false,
        }
    }
}

/// Assigns class ids to shapes in arrival order.
///
/// A shape joins the earliest class whose representative (its first member)
/// matches every sorted pairwise distance within `δ/2`; otherwise it opens a
/// new class. Moving each vertex by less than `δ/10` shifts every sorted
/// distance by less than `δ/5`, so such perturbations of a representative
/// keep its class.
#[derive(Debug, Clone)]
pub struct ClassRegistry {
    tol: f64,
    reps: Vec<RawShape>,
    buckets: HashMap<(usize, usize, i64), Vec<usize>>,
}

impl ClassRegistry {
    pub fn new(grid_step: f64) -> Self {
        assert!(grid_step > 0.0, "descriptor grid step must be positive");
        ClassRegistry {
            tol: grid_step / 2.0,
            reps: Vec::new(),
            buckets: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representatives(&self) -> &[RawShape] {
        &self.reps
    }

    fn bucket(&self, shape: &RawShape) -> (usize, usize, i64) {
        let (dim, len) = shape.kind();
        (dim, len, (shape.key() / self.tol).floor() as i64)
    }

    pub fn assign(&mut self, shape: RawShape) -> usize {
        let (dim, len, b) = self.bucket(&shape);
        let found = (b - 1..=b + 1)
            .filter_map(|k| self.buckets.get(&(dim, len, k)))
            .flatten()
            .copied()
            .filter(|&i| self.reps[i].within(&shape, self.tol))
            .min();
        if let Some(i) = found {
            return i;
        }
        let id = self.reps.len();
        self.buckets.entry((dim, len, b)).or_default().push(id);
        self.reps.push(shape);
        id
    }
}
