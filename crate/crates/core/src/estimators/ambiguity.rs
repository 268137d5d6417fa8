//! Monte-Carlo estimates of the subspace-ambiguity fraction `N_ε(K0, K2)`,
//! its expected logarithm, and the information bound assembled from them.
//!
//! Two shadows count as equal when they are ε-congruent, so every number
//! here is an `N_ε` estimate for an explicit ε, never the exact `N`.

use serde::{Deserialize, Serialize};

use super::descriptor::pairwise_signature;
use crate::error::{Error, Result};
use crate::geometry::{centered_extremes, congruent, Body, EmbeddedBody, Polytope};
use crate::linalg::{log_gamma, pairwise_sum};
use crate::parallel::try_map_tasks;
use crate::sampling::{sample_grassmannian, RandomSource};

const OUTER_STREAM: u64 = 0x006f_7574_6572;
const INNER_STREAM: u64 = 0x0069_6e6e_6572;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Result flags carried through to reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    /// Some inner fraction was zero, so the log-mean is -inf.
    Divergent,
    /// The body's symmetry group is finite: the exact `E[log N]` diverges
    /// and any finite value is an ε-artifact.
    FiniteGroupDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NEstimate {
    pub epsilon: f64,
    pub n_samples: usize,
    pub hits: usize,
    pub fraction: f64,
    pub wilson_ci: (f64, f64),
}

impl NEstimate {
    pub fn from_counts(epsilon: f64, hits: usize, n_samples: usize) -> Self {
        NEstimate {
            epsilon,
            n_samples,
            hits,
            fraction: hits as f64 / n_samples as f64,
            wilson_ci: wilson_interval(hits, n_samples, Z95),
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let hi = if hits == n { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (lo, hi)
}

/// `E[log N_ε]` or the divergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LogN {
    Finite(f64),
    Divergent,
}

impl LogN {
    pub fn finite(&self) -> Option<f64> {
        match self {
            LogN::Finite(v) => Some(*v),
            LogN::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElogNEstimate {
    pub epsilon: f64,
    pub value: LogN,
    /// Normal-approximation 95% interval over the outer draws, when finite.
    pub ci: Option<(f64, f64)>,
    pub outer: usize,
    pub inner: usize,
    /// Inner fraction for each outer draw, in draw order.
    pub fractions: Vec<f64>,
    pub flags: Vec<Flag>,
}

/// A shadow prepared for repeated ε-congruence tests.
#[derive(Debug, Clone)]
struct PreparedShadow {
    body: Polytope,
    radius: f64,
    signature: Vec<f64>,
}

impl PreparedShadow {
    fn new(p: &Polytope) -> Result<Self> {
        let ext = centered_extremes(p);
        let radius = ext.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let signature = pairwise_signature(&ext);
        Ok(PreparedShadow {
            body: Polytope::new(ext)?,
            radius,
            signature,
        })
    }
}

/// ε-congruence with two cheap exits: bodies that both fit in an ε-ball
/// after centring always match, and bodies whose sorted pairwise
/// extreme-vertex distances differ by more than 2ε never do.
fn epsilon_congruent(a: &PreparedShadow, b: &PreparedShadow, eps: f64) -> Result<bool> {
    if a.radius.max(b.radius) <= eps {
        return Ok(true);
    }
    if a.signature.len() != b.signature.len()
        || a
            .signature
            .iter()
            .zip(&b.signature)
            .any(|(x, y)| (x - y).abs() > 2.0 * eps + 1e-12)
    {
        return Ok(false);
    }
    Ok(congruent(&a.body, &b.body, eps)?.is_some())
}

/// Shadow of `k0` on the complement of a Haar-random 2-plane.
pub fn random_codim2_shadow(k0: &Polytope, src: &RandomSource) -> Result<EmbeddedBody> {
    let mut rng = src.rng();
    let w = sample_grassmannian(&mut rng, k0.dim(), 2)?;
    Ok(EmbeddedBody::project_onto(k0, &w.complement()))
}

fn check_inputs(k0: &Body, k2ref: &EmbeddedBody, eps_grid: &[f64], n_samples: usize) -> Result<()> {
    let n = k0.ambient_dim();
    if n < 3 {
        return Err(Error::DomainError("N estimates need n >= 3".into()));
    }
    if k2ref.dim() + 2 != n {
        return Err(Error::DimensionError(format!(
            "reference shadow has dimension {}, expected n - 2 = {}",
            k2ref.dim(),
            n - 2
        )));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| e.is_nan() || *e <= 0.0) {
        return Err(Error::DomainError("epsilon must be positive".into()));
    }
    if n_samples < 1 {
        return Err(Error::DomainError("n_samples must be at least 1".into()));
    }
    Ok(())
}

/// `N_ε` for every ε of the grid, evaluated on the same Haar draws.
pub fn estimate_n_sweep(
    k0: &Body,
    k2ref: &EmbeddedBody,
    eps_grid: &[f64],
    n_samples: usize,
    src: &RandomSource,
) -> Result<Vec<NEstimate>> {
    check_inputs(k0, k2ref, eps_grid, n_samples)?;
    let p = match (k0, k2ref.body()) {
        (Body::Ball { radius, .. }, Body::Ball { radius: r2, .. }) => {
            // every shadow of a ball is the same ball
            return Ok(eps_grid
                .iter()
                .map(|&e| {
                    let hits = if (radius - r2).abs() <= e { n_samples } else { 0 };
                    NEstimate::from_counts(e, hits, n_samples)
                })
                .collect());
        }
        (Body::Polytope(p), Body::Polytope(r)) => (p, r),
        _ => {
            return Err(Error::DomainError(
                "reference shadow and body must both be polytopes or both balls".into(),
            ))
        }
    };
    let (k0p, refp) = p;
    let reference = PreparedShadow::new(refp)?;
    let hits_per_sample: Vec<Vec<bool>> = try_map_tasks(n_samples, |i| {
        let shadow = random_codim2_shadow(k0p, &src.substream(i as u64))?;
        let prepared = PreparedShadow::new(shadow.body().as_polytope().expect("polytope shadow"))?;
        eps_grid
            .iter()
            .map(|&e| epsilon_congruent(&prepared, &reference, e))
            .collect()
    })?;
    Ok(eps_grid
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let hits = hits_per_sample.iter().filter(|h| h[k]).count();
            NEstimate::from_counts(e, hits, n_samples)
        })
        .collect())
}

/// Fraction of Haar 2-planes `W` whose shadow `Proj_{W^⊥} K0` is
/// ε-congruent to `k2ref`.
pub fn estimate_n(
    k0: &Body,
    k2ref: &EmbeddedBody,
    eps: f64,
    n_samples: usize,
    src: &RandomSource,
) -> Result<NEstimate> {
    Ok(estimate_n_sweep(k0, k2ref, &[eps], n_samples, src)?.remove(0))
}

/// Reference shadow `K2` for the `j`-th outer draw of [`estimate_elogn`].
pub fn reference_shadow(k0: &Body, src: &RandomSource, j: usize) -> Result<EmbeddedBody> {
    let s = src.substream(OUTER_STREAM).substream(j as u64);
    match k0 {
        Body::Polytope(p) => random_codim2_shadow(p, &s),
        Body::Ball { dim, radius } => {
            let mut rng = s.rng();
            let w = sample_grassmannian(&mut rng, *dim, 2)?;
            EmbeddedBody::new(
                w.complement(),
                Body::Ball {
                    dim: dim - 2,
                    radius: *radius,
                },
            )
        }
    }
}

/// `E[log N_ε]` for every ε of a strictly decreasing grid. The inner Haar
/// draws of each outer sample are shared across the grid.
pub fn estimate_elogn_sweep(
    k0: &Body,
    eps_grid: &[f64],
    outer: usize,
    inner: usize,
    src: &RandomSource,
) -> Result<Vec<ElogNEstimate>> {
    if outer < 1 || inner < 1 {
        return Err(Error::DomainError("outer and inner counts must be at least 1".into()));
    }
    let inner_root = src.substream(INNER_STREAM);
    let per_outer: Vec<Vec<f64>> = try_map_tasks(outer, |j| {
        let k2 = reference_shadow(k0, src, j)?;
        let ests = estimate_n_sweep(k0, &k2, eps_grid, inner, &inner_root.substream(j as u64))?;
        Ok(ests.iter().map(|e| e.fraction).collect())
    })?;
    let flags_base: Vec<Flag> = if k0.is_ball() {
        Vec::new()
    } else {
        vec![Flag::FiniteGroupDegenerate]
    };
    Ok(eps_grid
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let fractions: Vec<f64> = per_outer.iter().map(|f| f[k]).collect();
            let mut flags = flags_base.clone();
            let (value, ci) = if fractions.contains(&0.0) {
                flags.insert(0, Flag::Divergent);
                (LogN::Divergent, None)
            } else {
                let logs: Vec<f64> = fractions.iter().map(|f| f.ln()).collect();
                let mean = pairwise_sum(&logs) / outer as f64;
                let ci = if outer > 1 {
                    let dev: Vec<f64> = logs.iter().map(|l| (l - mean).powi(2)).collect();
                    let sd = (pairwise_sum(&dev) / (outer - 1) as f64).sqrt();
                    let half = Z95 * sd / (outer as f64).sqrt();
                    Some((mean - half, mean + half))
                } else {
                    Some((mean, mean))
                };
                (LogN::Finite(mean), ci)
            };
            ElogNEstimate {
                epsilon: eps,
                value,
                ci,
                outer,
                inner,
                fractions,
                flags,
            }
        })
        .collect())
}

/// Mean of `ln N_ε(K0, K2)` over `outer` random reference shadows `K2`,
/// each scored with `inner` Haar draws; divergent if any fraction is zero.
pub fn estimate_elogn(
    k0: &Body,
    eps: f64,
    outer: usize,
    inner: usize,
    src: &RandomSource,
) -> Result<ElogNEstimate> {
    Ok(estimate_elogn_sweep(k0, &[eps], outer, inner, src)?.remove(0))
}

/// `ln(pi^{n/2 - 2} / Gamma((n - 2)/2))`.
pub fn theorem1_first_term(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::DomainError("the information bound needs n >= 3".into()));
    }
    let nf = n as f64;
    Ok((nf / 2.0 - 2.0) * std::f64::consts::PI.ln() - log_gamma((nf - 2.0) / 2.0)?)
}

/// Upper bound value, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BoundValue {
    Finite(f64),
    Infinite,
}

impl BoundValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            BoundValue::Finite(v) => Some(*v),
            BoundValue::Infinite => None,
        }
    }
}

/// First term minus `E[log N]`; a divergent expectation gives `+inf`.
pub fn theorem1_bound(n: usize, e_log_n: LogN) -> Result<BoundValue> {
    let first = theorem1_first_term(n)?;
    Ok(match e_log_n {
        LogN::Finite(v) => BoundValue::Finite(first - v),
        LogN::Divergent => BoundValue::Infinite,
    })
}
