//! Nearest point in a polytope (Wolfe's minimum-norm-point method) and the
//! exact Hausdorff distance built on it.

use nalgebra::DMatrix;

use super::Polytope;
use crate::error::{Error, Result};
use crate::linalg::VectorN;

/// Combined major and minor iteration cap for [`nearest_point`].
pub const NEAREST_MAX_ITER: usize = 100_000;

const WEIGHT_EPS: f64 = 1e-14;

/// Closest point of `conv(p)` to `x`, and its distance.
///
/// Runs Wolfe's minimum-norm-point iteration on the translated vertex set
/// until the duality gap `max_v <x - y, v - y>` drops to
/// `1e-10 (1 + |x|)`.
pub fn nearest_point(p: &Polytope, x: &VectorN) -> Result<(VectorN, f64)> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    let pts: Vec<VectorN> = p.vertices().iter().map(|v| v - x).collect();
    let z = min_norm_point(&pts, 1e-10 * (1.0 + x.norm()))?;
    let d = z.norm();
    Ok((z + x, d))
}

fn min_norm_point(pts: &[VectorN], tol: f64) -> Result<VectorN> {
    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_squared().total_cmp(&pts[b].norm_squared()))
        .expect("nonempty polytope");
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut z = pts[start].clone();
    let mut iterations = 0usize;
    let mut gap = f64::INFINITY;

    while iterations < NEAREST_MAX_ITER {
        iterations += 1;
        let (j, zj) = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (i, z.dot(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty polytope");
        gap = z.norm_squared() - zj;
        if gap <= tol || corral.contains(&j) {
            // a repeated vertex means z is optimal to working precision
            return Ok(z);
        }
        corral.push(j);
        weights.push(0.0);

        loop {
            iterations += 1;
            if iterations >= NEAREST_MAX_ITER {
                break;
            }
            let alpha = affine_minimizer(pts, &corral);
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                weights = alpha;
                z = combine(pts, &corral, &weights);
                break;
            }
            // step from the current weights toward alpha until one hits zero
            let mut theta = 1.0f64;
            let mut leaving = None;
            for (k, (&a, &w)) in alpha.iter().zip(&weights).enumerate() {
                if a <= WEIGHT_EPS {
                    let t = if w - a > 0.0 { w / (w - a) } else { 0.0 };
                    if t <= theta {
                        theta = t;
                        leaving = Some(k);
                    }
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            if let Some(k) = leaving {
                weights[k] = 0.0;
            }
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= WEIGHT_EPS {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            z = combine(pts, &corral, &weights);
            if corral.len() == 1 {
                break;
            }
        }
        if !corral.contains(&j) {
            // the entering vertex cannot carry weight: no descent left
            return Ok(z);
        }
    }
    Err(Error::NonConvergence { iterations, gap })
}

fn combine(pts: &[VectorN], idx: &[usize], w: &[f64]) -> VectorN {
    let mut z = VectorN::zeros(pts[0].len());
    for (&i, &wi) in idx.iter().zip(w) {
        z.axpy(wi, &pts[i], 1.0);
    }
    z
}

/// Weights `a` with `sum a = 1` minimizing `|sum a_i p_i|` over the affine
/// hull of the corral.
fn affine_minimizer(pts: &[VectorN], idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    if k == 1 {
        return vec![1.0];
    }
    let base = &pts[idx[0]];
    let dim = base.len();
    let d = DMatrix::from_fn(dim, k - 1, |r, c| pts[idx[c + 1]][r] - base[r]);
    let rhs = -base;
    let svd = d.svd(true, true);
    let beta = svd
        .solve(&rhs, 1e-13 * svd.singular_values.max().max(1e-300))
        .expect("svd with u and v_t");
    let mut a = Vec::with_capacity(k);
    a.push(1.0 - beta.sum());
    a.extend(beta.iter().copied());
    a
}

/// Hausdorff distance between the convex hulls of two vertex sets.
///
/// The distance to a convex set is a convex function, so its maximum over
/// the other polytope is attained at a vertex.
pub fn hausdorff(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let mut d = 0.0f64;
    for v in p.vertices() {
        d = d.max(nearest_point(q, v)?.1);
    }
    for v in q.vertices() {
        d = d.max(nearest_point(p, v)?.1);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn poly(rows: &[&[f64]]) -> Polytope {
        Polytope::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn v(xs: &[f64]) -> VectorN {
        VectorN::from_column_slice(xs)
    }

    fn unit_square() -> Polytope {
        poly(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])
    }

    #[test]
    fn inside_point_has_zero_distance() {
        let (y, d) = nearest_point(&unit_square(), &v(&[0.3, 0.6])).unwrap();
        assert!(d < 1e-9);
        assert_abs_diff_eq!(y, v(&[0.3, 0.6]), epsilon = 1e-9);
    }

    #[test]
    fn face_projection() {
        let (y, d) = nearest_point(&unit_square(), &v(&[2.0, 0.5])).unwrap();
        assert_abs_diff_eq!(y, v(&[1.0, 0.5]), epsilon = 1e-9);
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn segment_endpoint() {
        let seg = poly(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let (y, d) = nearest_point(&seg, &v(&[2.0, 1.0])).unwrap();
        assert_abs_diff_eq!(y, v(&[1.0, 0.0]), epsilon = 1e-9);
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn nearest_matches_brute_force_on_segments_and_triangles() {
        // closed-form oracle for a triangle: min over the face, edges, vertices
        let tri = poly(&[&[0.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 3.0, 0.0]]);
        let x = v(&[0.5, 0.5, 2.0]);
        let (_, d) = nearest_point(&tri, &x).unwrap();
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-9);
        let x = v(&[3.0, 3.0, 1.0]);
        // nearest point is on the hypotenuse 3x + 2y = 6
        let t = (3.0 * 3.0 + 2.0 * 3.0 - 6.0) / 13.0;
        let want = (t * t * 13.0 + 1.0f64).sqrt();
        let (_, d) = nearest_point(&tri, &x).unwrap();
        assert_abs_diff_eq!(d, want, epsilon = 1e-9);
    }

    #[test]
    fn hausdorff_examples() {
        let sq = unit_square();
        assert_eq!(hausdorff(&sq, &sq).unwrap(), 0.0);
        let moved = sq.translate(&v(&[1.0, 0.0]));
        assert_abs_diff_eq!(hausdorff(&sq, &moved).unwrap(), 1.0, epsilon = 1e-9);
        let big = poly(&[&[-1.0, -1.0], &[1.0, -1.0], &[1.0, 1.0], &[-1.0, 1.0]]);
        let diamond = poly(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]]);
        assert_abs_diff_eq!(
            hausdorff(&big, &diamond).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn degenerate_corral_in_high_dimension() {
        // many coplanar points in R^5
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..12 {
            let a = i as f64 * 0.5;
            rows.push(vec![a.cos(), a.sin(), 0.0, 0.0, 0.0]);
        }
        let p = Polytope::from_rows(&rows).unwrap();
        let (_, d) = nearest_point(&p, &v(&[0.0, 0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-9);
    }
}
