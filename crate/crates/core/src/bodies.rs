//! Built-in test bodies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Body, Polytope};
use crate::linalg::{orthonormalize, VectorN};
use crate::sampling::{gaussian_vector, RandomSource};

pub const BODY_NAMES: [&str; 8] = [
    "cube",
    "box",
    "cross-polytope",
    "simplex-regular",
    "simplex-random",
    "prism-regular-polygon",
    "random-hull",
    "ball",
];

/// Parameters shared by the generators; each generator reads the ones it
/// needs and rejects nonsensical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyParams {
    pub n: usize,
    /// Half-widths for `box` (length `n`).
    #[serde(default)]
    pub half_widths: Option<Vec<f64>>,
    /// Ball radius.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Point count for `random-hull`.
    #[serde(default)]
    pub points: Option<usize>,
    /// Seed for the random generators.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Polygon side count for `prism-regular-polygon`.
    #[serde(default)]
    pub sides: Option<usize>,
    /// Prism half-height.
    #[serde(default)]
    pub height: Option<f64>,
}

impl BodyParams {
    pub fn dim(n: usize) -> Self {
        BodyParams {
            n,
            half_widths: None,
            radius: None,
            points: None,
            seed: None,
            sides: None,
            height: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

pub fn generate_body(name: &str, params: &BodyParams) -> Result<Body> {
    let n = params.n;
    if n == 0 {
        return Err(bad("n must be positive"));
    }
    let poly = |rows: Vec<Vec<f64>>| Polytope::from_rows(&rows).map(Body::Polytope);
    match name {
        "cube" => poly(hypercube(n, &vec![1.0; n])),
        "box" => {
            let hw = params
                .half_widths
                .clone()
                .ok_or_else(|| bad("box needs half_widths"))?;
            if hw.len() != n || hw.iter().any(|h| !h.is_finite() || *h <= 0.0) {
                return Err(bad("box needs n positive half_widths"));
            }
            poly(hypercube(n, &hw))
        }
        "cross-polytope" => {
            let mut rows = Vec::with_capacity(2 * n);
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut r = vec![0.0; n];
                    r[i] = s;
                    rows.push(r);
                }
            }
            poly(rows)
        }
        "simplex-regular" => regular_simplex(n).map(Body::Polytope),
        "simplex-random" => {
            let seed = params.seed.ok_or_else(|| bad("simplex-random needs seed"))?;
            let mut rng = RandomSource::new(seed).rng();
            Polytope::new((0..=n).map(|_| gaussian_vector(&mut rng, n)).collect()).map(Body::Polytope)
        }
        "prism-regular-polygon" => {
            if n != 3 {
                return Err(bad("prism-regular-polygon is defined for n = 3"));
            }
            let k = params.sides.ok_or_else(|| bad("prism needs sides"))?;
            if k < 3 {
                return Err(bad("prism needs at least 3 sides"));
            }
            let h = params.height.unwrap_or(1.0);
            if h.is_nan() || h <= 0.0 {
                return Err(bad("prism height must be positive"));
            }
            let mut rows = Vec::with_capacity(2 * k);
            for z in [-h, h] {
                for j in 0..k {
                    let a = 2.0 * PI * j as f64 / k as f64;
                    rows.push(vec![a.cos(), a.sin(), z]);
                }
            }
            poly(rows)
        }
        "random-hull" => {
            let seed = params.seed.ok_or_else(|| bad("random-hull needs seed"))?;
            let k = params.points.unwrap_or(2 * n);
            if k < 1 {
                return Err(bad("random-hull needs at least one point"));
            }
            let mut rng = RandomSource::new(seed).rng();
            Polytope::new((0..k).map(|_| gaussian_vector(&mut rng, n)).collect()).map(Body::Polytope)
        }
        "ball" => {
            let radius = params.radius.unwrap_or(1.0);
            if !radius.is_finite() || radius <= 0.0 {
                return Err(bad("ball radius must be positive"));
            }
            Ok(Body::Ball { dim: n, radius })
        }
        other => Err(Error::UnknownBody(other.to_string())),
    }
}

fn hypercube(n: usize, half_widths: &[f64]) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|k| if mask >> k & 1 == 1 { half_widths[k] } else { -half_widths[k] })
                .collect()
        })
        .collect()
}

/// Regular simplex with `n + 1` vertices on the unit sphere.
fn regular_simplex(n: usize) -> Result<Polytope> {
    // centred standard basis of R^{n+1}, written in a basis of the
    // hyperplane sum(x) = 0
    let m = n + 1;
    let ones = VectorN::from_element(m, 1.0 / (m as f64).sqrt());
    let plane = orthonormalize(&[ones])?.complement();
    let centre = 1.0 / m as f64;
    let verts: Vec<VectorN> = (0..m)
        .map(|i| {
            let e = VectorN::from_fn(m, |k, _| if k == i { 1.0 } else { 0.0 } - centre);
            let c = plane.coords(&e);
            let norm = c.norm();
            c / norm
        })
        .collect();
    Polytope::new(verts)
}

/// Regular tetrahedron `{(1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)}`.
pub fn tetrahedron() -> Polytope {
    Polytope::from_rows(&[
        vec![1.0, 1.0, 1.0],
        vec![1.0, -1.0, -1.0],
        vec![-1.0, 1.0, -1.0],
        vec![-1.0, -1.0, 1.0],
    ])
    .expect("valid tetrahedron")
}
