mod common;

use shadowlab_core::bodies::{generate_body, tetrahedron, BodyParams};
use shadowlab_core::error::Error;
use shadowlab_core::geometry::{hausdorff, symmetry_group, Polytope, SymmetryGroup, TOL_GROUP};
use shadowlab_core::linalg::{MatrixNM, VectorN};
use shadowlab_core::sampling::{sample_grassmannian, RandomSource};
use shadowlab_core::strata::{orbit, stabilizer, TOL_SUBSPACE};

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn maps_vertices_onto_itself(p: &Polytope, g: &MatrixNM) -> bool {
    p.vertices().iter().all(|v| {
        let w = g * v;
        p.vertices().iter().any(|x| (x - &w).amax() <= 1e-9)
    })
}

/// All signed permutation matrices that preserve the vertex set.
fn signed_permutation_oracle(p: &Polytope) -> Vec<MatrixNM> {
    let n = p.dim();
    let mut out = Vec::new();
    for perm in permutations(n) {
        for signs in 0..(1u32 << n) {
            let g = MatrixNM::from_fn(n, n, |r, c| {
                if perm[c] == r {
                    if signs >> c & 1 == 1 { -1.0 } else { 1.0 }
                } else {
                    0.0
                }
            });
            if maps_vertices_onto_itself(p, &g) {
                out.push(g);
            }
        }
    }
    out
}

/// Orthogonal maps induced by vertex permutations of a simplex about its
/// centroid.
fn simplex_permutation_oracle(p: &Polytope) -> usize {
    let n = p.dim();
    let c = p.vertices().iter().fold(VectorN::zeros(n), |a, v| a + v) / p.len() as f64;
    let x: Vec<VectorN> = p.vertices().iter().map(|v| v - &c).collect();
    let xm = MatrixNM::from_columns(&x[..n]);
    let inv = xm.clone().try_inverse().unwrap();
    permutations(n + 1)
        .into_iter()
        .filter(|perm| {
            let ym = MatrixNM::from_columns(&perm[..n].iter().map(|&i| x[i].clone()).collect::<Vec<_>>());
            let g = ym * &inv;
            (g.transpose() * &g - MatrixNM::identity(n, n)).amax() <= 1e-9
                && (&g * &x[n] - &x[perm[n]]).amax() <= 1e-9
        })
        .count()
}

fn assert_matches_oracle(p: &Polytope, want: usize) {
    let oracle = signed_permutation_oracle(p);
    assert_eq!(oracle.len(), want);
    let g = symmetry_group(p, TOL_GROUP).unwrap();
    assert_eq!(g.order(), want);
    for m in &oracle {
        assert!(g.contains(m, TOL_GROUP));
    }
    g.validate(TOL_GROUP).unwrap();
}

#[test]
fn square_cube_and_tetrahedron() {
    assert_matches_oracle(&common::polytope("cube", 2), 8);
    assert_matches_oracle(&common::polytope("cube", 3), 48);
    assert_matches_oracle(&tetrahedron(), 24);
    assert_matches_oracle(&common::polytope("cube", 4), 384);
    assert_matches_oracle(&common::polytope("cross-polytope", 3), 48);
}

#[test]
fn generic_simplex_is_asymmetric() {
    for seed in [1u64, 2, 3] {
        let mut params = BodyParams::dim(3);
        params.seed = Some(seed);
        let s = generate_body("simplex-random", &params).unwrap();
        let p = s.as_polytope().unwrap();
        assert_eq!(simplex_permutation_oracle(p), 1);
        assert_eq!(symmetry_group(p, TOL_GROUP).unwrap().order(), 1);
    }
}

#[test]
fn regular_simplex_oracle_agrees() {
    let p = common::polytope("simplex-regular", 3);
    assert_eq!(simplex_permutation_oracle(&p), 24);
    assert_eq!(symmetry_group(&p, TOL_GROUP).unwrap().order(), 24);
}

#[test]
fn elements_map_the_body_to_itself() {
    let p = common::polytope("cube", 3);
    let g = symmetry_group(&p, TOL_GROUP).unwrap();
    for m in g.elements() {
        assert!(hausdorff(&p, &p.transform(m)).unwrap() <= 1e-9);
    }
}

#[test]
fn flat_body_is_degenerate() {
    let flat = Polytope::from_rows(&[
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
    ])
    .unwrap();
    assert!(matches!(symmetry_group(&flat, TOL_GROUP), Err(Error::Degenerate { .. })));
}

fn prism(sides: usize) -> Polytope {
    let mut params = BodyParams::dim(3);
    params.sides = Some(sides);
    generate_body("prism-regular-polygon", &params)
        .unwrap()
        .as_polytope()
        .unwrap()
        .clone()
}

fn check_orbit_stabilizer(g: &SymmetryGroup, n: usize, seed: u64) {
    let mut rng = RandomSource::new(seed).rng();
    for _ in 0..100 {
        let w = sample_grassmannian(&mut rng, n, 2).unwrap();
        let h = stabilizer(g, &w, TOL_SUBSPACE).unwrap();
        let o = orbit(g, &w, TOL_SUBSPACE).unwrap();
        assert_eq!(o.len() * h.order(), g.order());
    }
}

#[test]
fn orbit_stabilizer_on_acceptance_groups() {
    let groups = [
        (symmetry_group(&common::polytope("cube", 3), TOL_GROUP).unwrap(), 3),
        (symmetry_group(&tetrahedron(), TOL_GROUP).unwrap(), 3),
        (symmetry_group(&prism(4), TOL_GROUP).unwrap(), 3),
        (symmetry_group(&common::polytope("cube", 4), TOL_GROUP).unwrap(), 4),
    ];
    assert_eq!(groups[2].0.order(), 16);
    for (i, (g, n)) in groups.iter().enumerate() {
        check_orbit_stabilizer(g, *n, 500 + i as u64);
    }
}

#[test]
fn special_planes_of_the_cube() {
    let g = symmetry_group(&common::polytope("cube", 3), TOL_GROUP).unwrap();
    let diag = shadowlab_core::linalg::orthonormalize(&[
        VectorN::from_column_slice(&[1.0, 1.0, 0.0]),
        VectorN::from_column_slice(&[0.0, 0.0, 1.0]),
    ])
    .unwrap();
    let h = stabilizer(&g, &diag, TOL_SUBSPACE).unwrap();
    assert_eq!(h.order(), 8);
    assert_eq!(orbit(&g, &diag, TOL_SUBSPACE).unwrap().len(), 6);
}
