use super::{nearest_point, Polytope};
use crate::linalg::VectorN;

/// Distance above which a vertex counts as extreme.
const EXTREME_TOL: f64 = 1e-9;

/// Drops hull-redundant vertices when the dimension is at most 3; higher
/// dimensions are returned unchanged.
pub fn reduce_hull(p: &Polytope) -> Polytope {
    match p.dim() {
        0 => Polytope {
            dim: 0,
            vertices: vec![p.vertices()[0].clone()],
        },
        1 => {
            let (lo, hi) = p.vertices().iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])),
            );
            let mut vertices = vec![VectorN::from_element(1, lo)];
            if hi - lo > EXTREME_TOL {
                vertices.push(VectorN::from_element(1, hi));
            }
            Polytope { dim: 1, vertices }
        }
        2 => planar_hull(p),
        3 => extreme_points(p),
        _ => p.clone(),
    }
}

/// Vertices not within `1e-9` of the hull of the others, after
/// deduplication. Vertex order is preserved.
pub fn extreme_points(p: &Polytope) -> Polytope {
    let p = p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut keep: Vec<bool> = vec![true; p.len()];
    for i in 0..p.len() {
        let others: Vec<VectorN> = p
            .vertices()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, v)| v.clone())
            .collect();
        let others = Polytope {
            dim: p.dim(),
            vertices: others,
        };
        // a non-converged solve leaves the vertex in place, which is harmless
        if let Ok((_, d)) = nearest_point(&others, &p.vertices()[i]) {
            if d <= EXTREME_TOL {
                keep[i] = false;
            }
        }
    }
    Polytope {
        dim: p.dim(),
        vertices: p
            .vertices()
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| v.clone())
            .collect(),
    }
}

/// Andrew's monotone chain, counter-clockwise, dropping points within
/// `1e-9` of a hull edge.
fn planar_hull(p: &Polytope) -> Polytope {
    let mut pts: Vec<(f64, f64)> = p.vertices().iter().map(|v| (v[0], v[1])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) <= super::DEDUP_TOL);
    if pts.len() <= 2 {
        let vertices: Vec<VectorN> = pts
            .iter()
            .map(|&(x, y)| VectorN::from_column_slice(&[x, y]))
            .collect();
        return Polytope { dim: 2, vertices };
    }
    // signed distance of c from the line through a and b
    let turn = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        cross / (b.0 - a.0).hypot(b.1 - a.1)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &c in iter {
            while hull.len() >= start + 2
                && turn(hull[hull.len() - 2], hull[hull.len() - 1], c) <= EXTREME_TOL
            {
                hull.pop();
            }
            hull.push(c);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // all points collinear within tolerance: keep the two extremes
        hull = vec![pts[0], pts[pts.len() - 1]];
    }
    Polytope {
        dim: 2,
        vertices: hull
            .into_iter()
            .map(|(x, y)| VectorN::from_column_slice(&[x, y]))
            .collect(),
    }
}
