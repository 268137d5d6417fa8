//! Orthogonal congruence of polytopes and their finite symmetry groups.
//!
//! Both searches work on centred extreme vertices. A reference tuple of
//! linearly independent vertices is picked from the first body; every
//! ordered tuple of the second body with a matching Gram matrix proposes an
//! orthogonal map (least squares over the tuple), which is then verified on
//! the whole vertex set.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{extreme_points, hausdorff, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{orthogonality_error, procrustes, MatrixNM, VectorN};

/// Entrywise tolerance for group closure and vertex permutation checks.
pub const TOL_GROUP: f64 = 1e-8;

/// A finite group of orthogonal n x n matrices.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    dim: usize,
    elements: Vec<MatrixNM>,
}

impl SymmetryGroup {
    pub fn trivial(n: usize) -> Self {
        SymmetryGroup {
            dim: n,
            elements: vec![MatrixNM::identity(n, n)],
        }
    }

    /// `{I, -I}`.
    pub fn central_inversion(n: usize) -> Self {
        SymmetryGroup::from_elements(n, vec![MatrixNM::identity(n, n), -MatrixNM::identity(n, n)])
            .expect("{I, -I} is a group")
    }

    /// Builds a group from explicit elements, checking orthogonality,
    /// identity membership and closure.
    pub fn from_elements(n: usize, elements: Vec<MatrixNM>) -> Result<Self> {
        let g = SymmetryGroup::from_elements_unchecked(n, elements);
        g.validate(TOL_GROUP)?;
        Ok(g)
    }

    pub(crate) fn from_elements_unchecked(n: usize, mut elements: Vec<MatrixNM>) -> Self {
        elements.sort_by(lex_cmp);
        SymmetryGroup { dim: n, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in canonical (rounded lexicographic) order.
    pub fn elements(&self) -> &[MatrixNM] {
        &self.elements
    }

    /// Index of an element within `tol` entrywise.
    pub fn position(&self, m: &MatrixNM, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| (e - m).amax() <= tol)
    }

    pub fn contains(&self, m: &MatrixNM, tol: f64) -> bool {
        self.position(m, tol).is_some()
    }

    pub fn contains_negative_identity(&self) -> bool {
        self.contains(&-MatrixNM::identity(self.dim, self.dim), TOL_GROUP)
    }

    /// Checks the group axioms: orthogonal elements, identity present,
    /// closure under products (brute force).
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.dim;
        for e in &self.elements {
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.nrows(),
                });
            }
            if orthogonality_error(e) > 1e-10 {
                return Err(Error::DomainError("group element is not orthogonal".into()));
            }
        }
        if !self.contains(&MatrixNM::identity(n, n), tol) {
            return Err(Error::DomainError("group lacks the identity".into()));
        }
        for a in &self.elements {
            for b in &self.elements {
                if !self.contains(&(a * b), tol) {
                    return Err(Error::DomainError("group is not closed under products".into()));
                }
            }
        }
        Ok(())
    }

    /// `true` if every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &SymmetryGroup, tol: f64) -> bool {
        self.elements.iter().all(|e| other.contains(e, tol))
    }

    /// Set equality within `tol`.
    pub fn same_elements(&self, other: &SymmetryGroup, tol: f64) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other, tol)
    }

    /// `g H g^T` (the inverse of an orthogonal g is its transpose).
    pub fn conjugate_by(&self, g: &MatrixNM) -> SymmetryGroup {
        SymmetryGroup::from_elements_unchecked(
            self.dim,
            self.elements.iter().map(|h| g * h * g.transpose()).collect(),
        )
    }
}

fn round_key(x: f64) -> i64 {
    (x / TOL_GROUP).round() as i64
}

/// Lexicographic order on row-major entries rounded to the group tolerance.
pub(crate) fn lex_cmp(a: &MatrixNM, b: &MatrixNM) -> Ordering {
    let ka = a.transpose().iter().map(|x| round_key(*x)).collect::<Vec<_>>();
    let kb = b.transpose().iter().map(|x| round_key(*x)).collect::<Vec<_>>();
    ka.cmp(&kb)
}

/// Lexicographic order on element lists.
pub(crate) fn group_lex_cmp(a: &SymmetryGroup, b: &SymmetryGroup) -> Ordering {
    for (x, y) in a.elements.iter().zip(&b.elements) {
        match lex_cmp(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.order().cmp(&b.order())
}

/// Extreme vertices translated so their centroid is the origin.
pub fn centered_extremes(p: &Polytope) -> Vec<VectorN> {
    let ext = extreme_points(p);
    let n = p.dim();
    let mut c = VectorN::zeros(n);
    for v in ext.vertices() {
        c += v;
    }
    c /= ext.len() as f64;
    ext.vertices().iter().map(|v| v - &c).collect()
}

/// Greedy pivoted selection of linearly independent vertices.
fn reference_tuple(points: &[VectorN], scale: f64) -> Vec<usize> {
    let n = points.first().map_or(0, |p| p.len());
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<VectorN> = Vec::new();
    while chosen.len() < n {
        let mut best: Option<(usize, VectorN, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = p.clone();
            for _ in 0..2 {
                for b in &basis {
                    let a = b.dot(&r);
                    r.axpy(-a, b, 1.0);
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|b| norm > b.2 + 1e-12 * scale) {
                best = Some((i, r, norm));
            }
        }
        match best {
            Some((i, r, norm)) if norm > 1e-9 * scale.max(1.0) => {
                chosen.push(i);
                basis.push(r / norm);
            }
            _ => break,
        }
    }
    chosen
}

/// Calls `visit` with the orthogonal map proposed by every tuple of `to`
/// whose Gram matrix matches the reference tuple of `from` within `gram_tol`.
/// Stops early when `visit` returns `true`.
fn for_each_candidate_map(
    from: &[VectorN],
    reference: &[usize],
    to: &[VectorN],
    gram_tol: f64,
    visit: &mut dyn FnMut(MatrixNM) -> bool,
) {
    let xs: Vec<VectorN> = reference.iter().map(|&i| from[i].clone()).collect();
    if xs.is_empty() {
        let n = from.first().map_or(0, |p| p.len());
        visit(MatrixNM::identity(n, n));
        return;
    }
    let gram: Vec<Vec<f64>> = xs
        .iter()
        .map(|a| xs.iter().map(|b| a.dot(b)).collect())
        .collect();
    let mut tuple: Vec<usize> = Vec::with_capacity(xs.len());
    extend_tuple(&xs, &gram, to, gram_tol, &mut tuple, visit);
}

fn extend_tuple(
    xs: &[VectorN],
    gram: &[Vec<f64>],
    to: &[VectorN],
    gram_tol: f64,
    tuple: &mut Vec<usize>,
    visit: &mut dyn FnMut(MatrixNM) -> bool,
) -> bool {
    let k = tuple.len();
    if k == xs.len() {
        let ys: Vec<VectorN> = tuple.iter().map(|&i| to[i].clone()).collect();
        return visit(procrustes(xs, &ys));
    }
    for (j, q) in to.iter().enumerate() {
        if tuple.contains(&j) {
            continue;
        }
        if (q.norm_squared() - gram[k][k]).abs() > gram_tol {
            continue;
        }
        let fits = tuple
            .iter()
            .enumerate()
            .all(|(a, &ia)| (to[ia].dot(q) - gram[a][k]).abs() <= gram_tol);
        if !fits {
            continue;
        }
        tuple.push(j);
        let stop = extend_tuple(xs, gram, to, gram_tol, tuple, visit);
        tuple.pop();
        if stop {
            return true;
        }
    }
    false
}

fn radius(points: &[VectorN]) -> f64 {
    points.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

/// Finds an orthogonal `g` with `d_H(g P', Q') <= tol`, where `P'`, `Q'` are
/// the bodies translated to put the centroid of their extreme vertices at
/// the origin. `Ok(None)` means no such map was found.
pub fn congruent(p: &Polytope, q: &Polytope, tol: f64) -> Result<Option<MatrixNM>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let n = p.dim();
    let a = centered_extremes(p);
    let b = centered_extremes(q);
    let (ra, rb) = (radius(&a), radius(&b));
    // both centred hulls contain the origin, so d_H <= max radius for any g
    if ra.max(rb) <= tol {
        return Ok(Some(MatrixNM::identity(n, n)));
    }
    let gram_tol = 2.0 * tol * (ra.max(rb) + tol) + 1e-12;
    if a.len() == b.len() {
        let mut na: Vec<f64> = a.iter().map(|v| v.norm()).collect();
        let mut nb: Vec<f64> = b.iter().map(|v| v.norm()).collect();
        na.sort_by(f64::total_cmp);
        nb.sort_by(f64::total_cmp);
        if na.iter().zip(&nb).any(|(x, y)| (x - y).abs() > 2.0 * tol + 1e-12) {
            return Ok(None);
        }
    }
    let pa = Polytope::new(a.clone())?;
    let pb = Polytope::new(b.clone())?;
    let reference = reference_tuple(&a, ra);
    let mut found: Option<MatrixNM> = None;
    let mut failure: Option<Error> = None;
    for_each_candidate_map(&a, &reference, &b, gram_tol, &mut |g| {
        match hausdorff(&pa.transform(&g), &pb) {
            Ok(d) if d <= tol => {
                found = Some(g);
                true
            }
            Ok(_) => false,
            Err(e) => {
                failure = Some(e);
                true
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// All orthogonal maps permuting the centred extreme vertices of `p`.
///
/// Requires a full-dimensional hull.
pub fn symmetry_group(p: &Polytope, tol: f64) -> Result<SymmetryGroup> {
    let n = p.dim();
    let a = centered_extremes(p);
    let r = radius(&a);
    let reference = reference_tuple(&a, r);
    if reference.len() < n {
        return Err(Error::Degenerate {
            rank: reference.len(),
            dim: n,
        });
    }
    let gram_tol = 2.0 * tol * (r + tol) + 1e-12;
    let mut elements: Vec<MatrixNM> = Vec::new();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    for_each_candidate_map(&a, &reference, &a, gram_tol, &mut |g| {
        if orthogonality_error(&g) > 1e-10 {
            return false;
        }
        if let Some(perm) = vertex_permutation(&g, &a, tol) {
            if !perms.contains(&perm) {
                perms.push(perm);
                elements.push(g);
            }
        }
        false
    });
    check_closure(&elements, &perms, tol)?;
    Ok(SymmetryGroup::from_elements_unchecked(n, elements))
}

/// The permutation `g` induces on `points`, if it maps the set onto itself.
fn vertex_permutation(g: &MatrixNM, points: &[VectorN], tol: f64) -> Option<Vec<usize>> {
    let mut perm = Vec::with_capacity(points.len());
    let mut hit = vec![false; points.len()];
    for v in points {
        let img = g * v;
        let j = points.iter().position(|w| (&img - w).amax() <= tol)?;
        if hit[j] {
            return None;
        }
        hit[j] = true;
        perm.push(j);
    }
    Some(perm)
}

fn check_closure(elements: &[MatrixNM], perms: &[Vec<usize>], tol: f64) -> Result<()> {
    let index: HashMap<&[usize], usize> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    for (ga, pa) in elements.iter().zip(perms) {
        for (gb, pb) in elements.iter().zip(perms) {
            // (ga gb) v_i = ga v_{pb[i]} = v_{pa[pb[i]]}
            let composed: Vec<usize> = pb.iter().map(|&i| pa[i]).collect();
            let ok = index
                .get(composed.as_slice())
                .is_some_and(|&k| (ga * gb - &elements[k]).amax() <= tol);
            if !ok {
                return Err(Error::DomainError(
                    "detected symmetries are not closed under products".into(),
                ));
            }
        }
    }
    Ok(())
}
