#![allow(dead_code)]

use shadowlab_core::bodies::{generate_body, BodyParams};
use shadowlab_core::geometry::{Body, Polytope};
use shadowlab_core::linalg::VectorN;
use shadowlab_core::sampling::{gaussian_vector, sample_unit_sphere, SourceRng};

use rand::Rng;

pub fn body(name: &str, n: usize) -> Body {
    generate_body(name, &BodyParams::dim(n)).unwrap()
}

pub fn polytope(name: &str, n: usize) -> Polytope {
    body(name, n).as_polytope().unwrap().clone()
}

pub fn random_hull(n: usize, seed: u64) -> Polytope {
    let mut params = BodyParams::dim(n);
    params.seed = Some(seed);
    params.points = Some(2 * n + 2);
    generate_body("random-hull", &params)
        .unwrap()
        .as_polytope()
        .unwrap()
        .clone()
}

/// Polytope drawn from a rotating mix of named and random bodies.
pub fn mixed_polytope(rng: &mut SourceRng, n: usize) -> Polytope {
    match rng.random_range(0..4) {
        0 => polytope("cube", n),
        1 => polytope("cross-polytope", n),
        2 => polytope("simplex-regular", n),
        _ => random_hull(n, rng.random()),
    }
}

/// Unit vector at a random distance from `u`, spread over several scales.
pub fn nearby_unit(rng: &mut SourceRng, u: &VectorN) -> VectorN {
    if rng.random_bool(0.2) {
        return sample_unit_sphere(rng, u.len());
    }
    let scale = 10f64.powf(rng.random_range(-6.0..0.0));
    let v = u + gaussian_vector(rng, u.len()) * scale;
    v.normalize()
}
