use shadowlab_core::linalg::{MatrixNM, Subspace};
use shadowlab_core::sampling::{sample_grassmannian, sample_unit_sphere, RandomSource};
use statrs::distribution::{Beta, ContinuousCDF};

const N: usize = 10_000;
// asymptotic 1% critical value of the Kolmogorov distribution
const K_01: f64 = 1.628;

fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn sphere_coordinate_follows_beta() {
    for n in 3..=6 {
        let mut rng = RandomSource::new(100 + n as u64).rng();
        let xs: Vec<f64> = (0..N)
            .map(|_| sample_unit_sphere(&mut rng, n)[0].powi(2))
            .collect();
        let beta = Beta::new(0.5, (n as f64 - 1.0) / 2.0).unwrap();
        let d = ks_one_sample(xs, |x| beta.cdf(x));
        assert!(d < K_01 / (N as f64).sqrt(), "n = {n}: D = {d}");
    }
}

fn rotation(n: usize, seed: u64) -> MatrixNM {
    let mut rng = RandomSource::new(seed).rng();
    sample_grassmannian(&mut rng, n, n).unwrap().basis().clone()
}

fn statistic(s: &Subspace) -> f64 {
    s.projector()[(0, 0)]
}

#[test]
fn grassmannian_is_rotation_invariant() {
    let (n, k) = (4, 2);
    let q = rotation(n, 31);
    let mut ra = RandomSource::new(41).rng();
    let mut rb = RandomSource::new(42).rng();
    let a: Vec<f64> = (0..N)
        .map(|_| statistic(&sample_grassmannian(&mut ra, n, k).unwrap()))
        .collect();
    let b: Vec<f64> = (0..N)
        .map(|_| {
            let w = sample_grassmannian(&mut rb, n, k).unwrap();
            statistic(&Subspace::from_orthonormal(&q * w.basis()).unwrap())
        })
        .collect();
    let d = ks_two_sample(a, b);
    let crit = K_01 * (2.0 / N as f64).sqrt();
    assert!(d < crit, "D = {d}, critical {crit}");
}

#[test]
fn grassmannian_diagonal_entry_follows_beta() {
    // P_11 of a Haar k-plane in R^n is Beta(k/2, (n-k)/2); across 20 seeds
    // an unbiased sampler exceeds the 1% level at most twice with
    // probability 0.999
    let (n, k) = (4, 2);
    let beta = Beta::new(k as f64 / 2.0, (n - k) as f64 / 2.0).unwrap();
    let rejections = (0..20u64)
        .filter(|&seed| {
            let mut rng = RandomSource::new(1000 + seed).rng();
            let xs: Vec<f64> = (0..N)
                .map(|_| statistic(&sample_grassmannian(&mut rng, n, k).unwrap()))
                .collect();
            ks_one_sample(xs, |x| beta.cdf(x)) >= K_01 / (N as f64).sqrt()
        })
        .count();
    assert!(rejections <= 2, "{rejections} of 20 seeds rejected");
}
