mod common;

use rand::Rng;
use shadowlab_core::geometry::{circumradius, hausdorff, project_out};
use shadowlab_core::sampling::{sample_unit_sphere, RandomSource};

#[test]
fn shadow_map_is_lipschitz() {
    let mut rng = RandomSource::new(2024).rng();
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(3..=6);
        let k0 = common::mixed_polytope(&mut rng, n);
        let u = sample_unit_sphere(&mut rng, n);
        let v = common::nearby_unit(&mut rng, &u);
        let a = project_out(&k0, &u).unwrap().embedded_polytope();
        let b = project_out(&k0, &v).unwrap().embedded_polytope();
        let d = hausdorff(&a, &b).unwrap();
        let bound = 2.0 * circumradius(&k0) * (&u - &v).norm();
        if d > bound + 1e-12 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn antipodal_directions_give_the_same_shadow() {
    let mut rng = RandomSource::new(5).rng();
    for n in 3..=6 {
        let k0 = common::random_hull(n, n as u64);
        let u = sample_unit_sphere(&mut rng, n);
        let a = project_out(&k0, &u).unwrap().embedded_polytope();
        let b = project_out(&k0, &(-&u)).unwrap().embedded_polytope();
        assert!(hausdorff(&a, &b).unwrap() <= 1e-9);
    }
}
