//! Seeded random sources, sphere and Grassmannian samplers, and the nested
//! direction chains that drive iterated projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Body, EmbeddedBody};
use crate::linalg::{orthonormalize, Subspace, VectorN};

/// Identifies one reproducible random stream.
///
/// Streams are ChaCha20 keyed by `seed` with `stream_id` as the 64-bit
/// stream selector, so distinct ids never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream_id: u64,
}

pub type SourceRng = ChaCha20Rng;

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RandomSource { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> SourceRng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child source for a labelled task; the same label always yields the
    /// same child.
    pub fn substream(&self, label: u64) -> RandomSource {
        RandomSource {
            seed: self.seed,
            stream_id: splitmix64(splitmix64(self.stream_id) ^ label.wrapping_mul(0xA24B_AED4_963E_E407)),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> VectorN {
    VectorN::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point on `S^{n-1}` by normalizing a standard Gaussian vector.
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> VectorN {
    loop {
        let g = gaussian_vector(rng, n);
        let norm = g.norm();
        if norm >= 1e-6 {
            return g / norm;
        }
    }
}

/// Mutually orthogonal unit directions `U_1..U_m` in R^n, where each `U_i`
/// is uniform on the unit sphere of the complement of the previous ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionChain {
    ambient_dim: usize,
    directions: Vec<VectorN>,
}

impl DirectionChain {
    /// Builds a chain from explicit directions, checking the chain invariants.
    pub fn new(ambient_dim: usize, directions: Vec<VectorN>) -> Result<Self> {
        if directions.len() >= ambient_dim.max(1) {
            return Err(Error::DimensionError(format!(
                "chain length {} exceeds n - 1 = {}",
                directions.len(),
                ambient_dim.saturating_sub(1)
            )));
        }
        for (i, u) in directions.iter().enumerate() {
            if u.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: u.len(),
                });
            }
            if (u.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::NotUnit(u.norm()));
            }
            for w in &directions[..i] {
                if u.dot(w).abs() > 1e-10 {
                    return Err(Error::DomainError("chain directions are not orthogonal".into()));
                }
            }
        }
        Ok(DirectionChain {
            ambient_dim,
            directions,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[VectorN] {
        &self.directions
    }

    /// `max_{i != j} |<U_i, U_j>|`.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.directions.len() {
            for j in 0..i {
                worst = worst.max(self.directions[i].dot(&self.directions[j]).abs());
            }
        }
        worst
    }

    /// `W_m`: the intersection of the complements of all directions.
    pub fn residual_subspace(&self) -> Subspace {
        if self.directions.is_empty() {
            return Subspace::full(self.ambient_dim);
        }
        orthonormalize(&self.directions)
            .expect("chain directions are orthonormal")
            .complement()
    }
}

/// Samples a chain of length `m` in R^n.
pub fn sample_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<DirectionChain> {
    if m < 1 || m + 1 > n {
        return Err(Error::DimensionError(format!(
            "chain length m = {m} must satisfy 1 <= m <= n - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let mut residual = Subspace::full(n);
    let mut dirs: Vec<VectorN> = Vec::with_capacity(m);
    while dirs.len() < m {
        let g = gaussian_vector(rng, n);
        let p = residual.projector() * g;
        // tidy the last bits of drift out of span{U_1..U_{i-1}}
        let mut u = p;
        for w in &dirs {
            let a = w.dot(&u);
            u.axpy(-a, w, 1.0);
        }
        let norm = u.norm();
        if norm < 1e-6 {
            continue;
        }
        dirs.push(u / norm);
        residual = orthonormalize(&dirs)?.complement();
    }
    DirectionChain::new(n, dirs)
}

/// Haar-distributed `k`-dimensional subspace of R^n (orthonormalized
/// Gaussian columns).
pub fn sample_grassmannian<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Subspace> {
    if k < 1 || k > n {
        return Err(Error::DimensionError(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    loop {
        let cols: Vec<VectorN> = (0..k).map(|_| gaussian_vector(rng, n)).collect();
        match orthonormalize(&cols) {
            Ok(s) => return Ok(s),
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Iterated shadows `K_1..K_m` of `k0` along the chain.
///
/// Each step projects out the next direction inside the previous shadow's
/// subspace. The direct projection of `k0` onto `W_m` is computed as well
/// and must agree with the iterated result to `1e-9` in Hausdorff distance.
pub fn project_chain(k0: &Body, chain: &DirectionChain) -> Result<Vec<EmbeddedBody>> {
    if k0.ambient_dim() != chain.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: k0.ambient_dim(),
            got: chain.ambient_dim(),
        });
    }
    let stages = iterate_chain(k0, chain)?;
    if let (Some(last), Body::Polytope(p)) = (stages.last(), k0) {
        let direct = EmbeddedBody::project_onto(p, &chain.residual_subspace());
        let gap = crate::geometry::hausdorff(&last.embedded_polytope(), &direct.embedded_polytope())?;
        if gap > 1e-9 {
            return Err(Error::DomainError(format!(
                "iterated and direct projections disagree by {gap:e}"
            )));
        }
    }
    Ok(stages)
}

/// Iterated shadows without the direct-projection cross-check.
pub fn iterate_chain(k0: &Body, chain: &DirectionChain) -> Result<Vec<EmbeddedBody>> {
    let mut current = EmbeddedBody::ambient(k0.clone());
    let mut out = Vec::with_capacity(chain.len());
    for u in chain.directions() {
        current = current.project_out_ambient(u)?;
        out.push(current.clone());
    }
    Ok(out)
}
