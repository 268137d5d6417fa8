//! Convex polytopes in vertex representation and their orthogonal shadows.
//!
//! A [`Polytope`] is the convex hull of a finite vertex list; no facet
//! description is ever built. Projections map vertex lists to vertex
//! lists, and every downstream quantity (support values, nearest points,
//! Hausdorff distances, congruence, symmetry) is unchanged by redundant
//! interior points, so hulls are only reduced where it is cheap (d <= 3).
//!
//! Shadows that live in different subspaces are compared up to an
//! orthogonal identification: "equal" shadows means ε-congruent shadows,
//! see [`congruent`].

pub(crate) mod congruence;
mod hull;
mod nearest;

use std::fmt;
use std::str::FromStr;

pub use congruence::{
    centered_extremes, congruent, symmetry_group, SymmetryGroup, TOL_GROUP,
};
pub use hull::{extreme_points, reduce_hull};
pub use nearest::{hausdorff, nearest_point, NEAREST_MAX_ITER};

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, MatrixNM, Subspace, VectorN};

/// Vertices closer than this are merged after projection.
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<VectorN>,
}

impl Polytope {
    pub fn new(vertices: Vec<VectorN>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::DomainError("polytope needs at least one vertex".into()))?;
        let dim = first.len();
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::DomainError("vertex coordinates must be finite".into()));
            }
        }
        Ok(Polytope { dim, vertices })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Polytope::new(rows.iter().map(|r| VectorN::from_column_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[VectorN] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Applies a linear map to every vertex.
    pub fn transform(&self, m: &MatrixNM) -> Polytope {
        Polytope {
            dim: m.nrows(),
            vertices: self.vertices.iter().map(|v| m * v).collect(),
        }
    }

    pub fn translate(&self, t: &VectorN) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        }
    }

    /// Merges vertices within [`DEDUP_TOL`] of an earlier one.
    pub fn dedup(&self) -> Polytope {
        let mut kept: Vec<VectorN> = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if !kept.iter().any(|k| (k - v).norm() <= DEDUP_TOL) {
                kept.push(v.clone());
            }
        }
        Polytope {
            dim: self.dim,
            vertices: kept,
        }
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = format!("dim {}\n", self.dim);
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// Text format: first line `dim n`, then one whitespace-separated vertex per
/// line. Blank lines and lines starting with `#` are ignored.
impl FromStr for Polytope {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty vertex file".into()))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["dim", n] => n
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad dimension `{n}`: {e}")))?,
            _ => return Err(Error::Parse(format!("expected `dim n` header, got `{header}`"))),
        };
        if dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: `{t}`: {e}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::Parse(format!(
                    "line {}: expected {dim} coordinates, got {}",
                    lineno + 1,
                    row.len()
                )));
            }
            rows.push(row);
        }
        Polytope::from_rows(&rows)
    }
}

/// A convex body: a polytope, or the analytic Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Polytope(Polytope),
    Ball { dim: usize, radius: f64 },
}

impl Body {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ball { dim, .. } => *dim,
        }
    }

    pub fn circumradius(&self) -> f64 {
        match self {
            Body::Polytope(p) => circumradius(p),
            Body::Ball { radius, .. } => *radius,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::Polytope(p) => Some(p),
            Body::Ball { .. } => None,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, Body::Ball { .. })
    }
}

impl From<Polytope> for Body {
    fn from(p: Polytope) -> Self {
        Body::Polytope(p)
    }
}

/// A body living in a `d`-dimensional subspace of R^n, stored in the
/// subspace's own coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedBody {
    subspace: Subspace,
    body: Body,
}

impl EmbeddedBody {
    pub fn new(subspace: Subspace, body: Body) -> Result<Self> {
        if body.ambient_dim() != subspace.dim() {
            return Err(Error::DimensionMismatch {
                expected: subspace.dim(),
                got: body.ambient_dim(),
            });
        }
        Ok(EmbeddedBody { subspace, body })
    }

    /// The body itself, embedded in its own ambient space.
    pub fn ambient(body: Body) -> Self {
        EmbeddedBody {
            subspace: Subspace::full(body.ambient_dim()),
            body,
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Orthogonal projection of an ambient polytope onto `target`.
    pub fn project_onto(p: &Polytope, target: &Subspace) -> EmbeddedBody {
        let verts = p.vertices().iter().map(|v| target.coords(v)).collect();
        let local = Polytope {
            dim: target.dim(),
            vertices: verts,
        };
        EmbeddedBody {
            subspace: target.clone(),
            body: Body::Polytope(reduce_hull(&local.dedup())),
        }
    }

    /// Projects out an ambient direction `u` that lies in this body's
    /// subspace.
    pub fn project_out_ambient(&self, u: &VectorN) -> Result<EmbeddedBody> {
        if u.len() != self.subspace.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.subspace.ambient_dim(),
                got: u.len(),
            });
        }
        let local_u = self.subspace.coords(u);
        let norm = local_u.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit(norm));
        }
        let local_u = local_u / norm;
        let step = match &self.body {
            Body::Polytope(p) => project_out(p, &local_u)?,
            Body::Ball { dim, radius } => {
                let basis = complement_of_direction(&local_u);
                EmbeddedBody {
                    subspace: basis,
                    body: Body::Ball {
                        dim: dim - 1,
                        radius: *radius,
                    },
                }
            }
        };
        Ok(EmbeddedBody {
            subspace: Subspace::from_orthonormal(self.subspace.basis() * step.subspace.basis())
                .expect("product of orthonormal bases"),
            body: step.body,
        })
    }

    /// The shadow as a polytope in the ambient space (`B c` per vertex).
    ///
    /// Panics for ball bodies.
    pub fn embedded_polytope(&self) -> Polytope {
        let p = self
            .body
            .as_polytope()
            .expect("embedded_polytope needs a polytope body");
        Polytope {
            dim: self.subspace.ambient_dim(),
            vertices: p.vertices().iter().map(|c| self.subspace.embed(c)).collect(),
        }
    }
}

/// Deterministic orthonormal basis of `u^⊥`: the standard basis minus the
/// coordinate where `|u_i|` is largest, orthogonalized against `u`.
fn complement_of_direction(u: &VectorN) -> Subspace {
    let n = u.len();
    let pivot = u
        .iter()
        .enumerate()
        .fold(0, |best, (i, x)| if x.abs() > u[best].abs() { i } else { best });
    let mut cols = vec![u.clone()];
    for j in (0..n).filter(|&j| j != pivot) {
        cols.push(VectorN::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 }));
    }
    let full = orthonormalize(&cols).expect("u and the non-pivot axes span R^n");
    Subspace::from_orthonormal(full.basis().columns(1, n - 1).into_owned())
        .expect("columns of an orthonormal basis")
}

/// Projects `p` orthogonally onto `u^⊥`, returning the shadow in an
/// orthonormal basis of `u^⊥`.
pub fn project_out(p: &Polytope, u: &VectorN) -> Result<EmbeddedBody> {
    if u.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: u.len(),
        });
    }
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(norm));
    }
    Ok(EmbeddedBody::project_onto(p, &complement_of_direction(u)))
}

/// `max_v <v, dir>`.
pub fn support(p: &Polytope, dir: &VectorN) -> Result<f64> {
    if dir.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: dir.len(),
        });
    }
    if dir.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(p.vertices()
        .iter()
        .map(|v| v.dot(dir))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `max_v |v|`, the radius of the smallest origin-centred ball containing `p`.
pub fn circumradius(p: &Polytope) -> f64 {
    p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cube3() -> Polytope {
        let mut rows = Vec::new();
        for i in 0..8 {
            rows.push((0..3).map(|k| if i >> k & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
        Polytope::from_rows(&rows).unwrap()
    }

    fn v(xs: &[f64]) -> VectorN {
        VectorN::from_column_slice(xs)
    }

    #[test]
    fn axis_shadow_of_cube_is_square() {
        let s = project_out(&cube3(), &v(&[0.0, 0.0, 1.0])).unwrap();
        let p = s.embedded_polytope();
        assert_eq!(p.len(), 4);
        for vert in p.vertices() {
            assert_abs_diff_eq!(vert[2], 0.0);
            assert_abs_diff_eq!(vert[0].abs(), 1.0);
            assert_abs_diff_eq!(vert[1].abs(), 1.0);
        }
    }

    #[test]
    fn diagonal_shadow_of_cube_is_hexagon() {
        let u = v(&[1.0, 1.0, 1.0]) / 3f64.sqrt();
        let s = project_out(&cube3(), &u).unwrap();
        let p = s.body().as_polytope().unwrap();
        assert_eq!(p.len(), 6);
        let r = (8.0f64 / 3.0).sqrt();
        for vert in p.vertices() {
            assert_abs_diff_eq!(vert.norm(), r, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(circumradius(p), 1.632_993_161_855_452, epsilon = 1e-12);
    }

    #[test]
    fn point_shadow_is_point() {
        let p = Polytope::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let s = project_out(&p, &v(&[0.6, 0.8, 0.0])).unwrap();
        let q = s.body().as_polytope().unwrap();
        assert_eq!(q.len(), 1);
        assert_abs_diff_eq!(q.vertices()[0].norm(), 0.0);
    }

    #[test]
    fn project_out_rejects_non_unit() {
        assert!(matches!(
            project_out(&cube3(), &v(&[0.0, 0.0, 1.1])),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn support_examples() {
        let sq = Polytope::from_rows(&[
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
        ])
        .unwrap();
        assert_abs_diff_eq!(support(&sq, &v(&[1.0, 0.0])).unwrap(), 1.0);
        let d = v(&[1.0, 1.0]) / 2f64.sqrt();
        assert_abs_diff_eq!(support(&sq, &d).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        let pt = Polytope::from_rows(&[vec![0.3, -2.0]]).unwrap();
        assert_abs_diff_eq!(support(&pt, &d).unwrap(), (0.3 - 2.0) / 2f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(support(&sq, &v(&[0.0, 0.0])), Err(Error::ZeroDirection)));
    }

    #[test]
    fn circumradius_examples() {
        assert_abs_diff_eq!(circumradius(&cube3()), 3f64.sqrt());
        assert_eq!(circumradius(&Polytope::from_rows(&[vec![0.0, 0.0]]).unwrap()), 0.0);
        let seg = Polytope::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(circumradius(&seg), 5.0);
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let c = cube3();
        let back: Polytope = c.to_text().parse().unwrap();
        assert_eq!(back, c);
        let parsed: Polytope = "# square\ndim 2\n1 1\n-1 1\n\n-1 -1\n1 -1\n".parse().unwrap();
        assert_eq!(parsed.len(), 4);
        assert!("2\n1 1\n".parse::<Polytope>().is_err());
        assert!("dim 2\n1 1 1\n".parse::<Polytope>().is_err());
        assert!("dim 2\n1 x\n".parse::<Polytope>().is_err());
        assert!("dim 2\n".parse::<Polytope>().is_err());
    }

    #[test]
    fn ball_shadow_keeps_radius() {
        let b = EmbeddedBody::ambient(Body::Ball { dim: 4, radius: 2.0 });
        let s = b.project_out_ambient(&v(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.body(), &Body::Ball { dim: 3, radius: 2.0 });
        assert_eq!(s.dim(), 3);
    }
}
