//! Plug-in mutual information between stages of the projection chain and
//! the data-processing check `I(K1; Km) <= I(K1; K2)`.
//!
//! `K0` is fixed for an experiment, so the conditional information given
//! `K0` is the plain information of the stage variables for that body.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::descriptor::{raw_shape, ClassRegistry, RawShape};
use crate::error::{Error, Result};
use crate::geometry::Body;
use crate::linalg::pairwise_sum;
use crate::parallel::try_map_tasks;
use crate::sampling::{iterate_chain, sample_chain, RandomSource};

const BOOTSTRAP_STREAM: u64 = 0x626f_6f74;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MIEstimate {
    /// Nats.
    pub value: f64,
    pub n_samples: usize,
    pub classes_x: usize,
    pub classes_y: usize,
    pub classes_joint: usize,
}

/// Plug-in (maximum-likelihood) mutual information of paired labels.
pub fn plug_in_mi(pairs: &[(usize, usize)]) -> MIEstimate {
    let n = pairs.len();
    let mut cx: HashMap<usize, usize> = HashMap::new();
    let mut cy: HashMap<usize, usize> = HashMap::new();
    let mut cxy: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(x, y) in pairs {
        *cx.entry(x).or_default() += 1;
        *cy.entry(y).or_default() += 1;
        *cxy.entry((x, y)).or_default() += 1;
    }
    let nf = n as f64;
    let terms: Vec<f64> = cxy
        .iter()
        .map(|(&(x, y), &c)| {
            let c = c as f64;
            c / nf * (c * nf / (cx[&x] as f64 * cy[&y] as f64)).ln()
        })
        .collect();
    MIEstimate {
        value: pairwise_sum(&terms).max(0.0),
        n_samples: n,
        classes_x: cx.len(),
        classes_y: cy.len(),
        classes_joint: cxy.len(),
    }
}

/// Shape-class labels of `K1..Km` for each sampled chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StageLabels {
    pub m: usize,
    /// `labels[s][i]`: class index of stage `i + 1` in sample `s`.
    pub labels: Vec<Vec<usize>>,
    /// Distinct classes seen at each stage.
    pub classes_per_stage: Vec<usize>,
}

impl StageLabels {
    /// Label pairs `(K_a, K_b)` for the given sample indices (1-based stages).
    pub fn pairs(&self, a: usize, b: usize, samples: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
        samples
            .map(|s| (self.labels[s][a - 1], self.labels[s][b - 1]))
            .collect()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }
}

/// Samples `n_samples` chains of length `m` and classifies every stage.
pub fn sample_stage_labels(
    k0: &Body,
    m: usize,
    n_samples: usize,
    delta: f64,
    src: &RandomSource,
) -> Result<StageLabels> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::DomainError("descriptor grid must be positive".into()));
    }
    if n_samples < 1 {
        return Err(Error::DomainError("n_samples must be at least 1".into()));
    }
    let n = k0.ambient_dim();
    let shapes: Vec<Vec<RawShape>> = try_map_tasks(n_samples, |s| {
        let mut rng = src.substream(s as u64).rng();
        let chain = sample_chain(&mut rng, n, m)?;
        let stages = iterate_chain(k0, &chain)?;
        Ok(stages.iter().map(|st| raw_shape(st.body())).collect())
    })?;
    // class ids assigned in sample order
    let mut registries: Vec<ClassRegistry> = (0..m).map(|_| ClassRegistry::new(delta)).collect();
    let labels = shapes
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(stage, shape)| registries[stage].assign(shape))
                .collect()
        })
        .collect();
    Ok(StageLabels {
        m,
        labels,
        classes_per_stage: registries.iter().map(ClassRegistry::len).collect(),
    })
}

/// Plug-in `I(K1; Km | K0)` over `n_samples` random chains, with shapes
/// classified by a [`ClassRegistry`] at grid `delta`.
pub fn estimate_conditional_mi(
    k0: &Body,
    m: usize,
    n_samples: usize,
    delta: f64,
    src: &RandomSource,
) -> Result<MIEstimate> {
    if m < 2 || m + 1 > k0.ambient_dim() {
        return Err(Error::DimensionError(format!(
            "need 2 <= m <= n - 1, got m = {m}, n = {}",
            k0.ambient_dim()
        )));
    }
    let labels = sample_stage_labels(k0, m, n_samples, delta, src)?;
    Ok(plug_in_mi(&labels.pairs(1, m, 0..n_samples)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    pub m: usize,
    pub n_samples: usize,
    pub delta: f64,
    pub mi_first_second: MIEstimate,
    pub mi_first_last: MIEstimate,
    /// `I(K1;K2) - I(K1;Km)`.
    pub difference: f64,
    /// Bootstrap standard error of the difference.
    pub stderr: f64,
    pub bootstrap_replicates: usize,
    pub pass: bool,
}

/// Compares `I(K1;K2)` and `I(K1;Km)` on the same sampled chains; passes
/// when `I(K1;Km) <= I(K1;K2) + 2 stderr`.
pub fn validate_dpi(
    k0: &Body,
    m: usize,
    n_samples: usize,
    delta: f64,
    bootstrap_replicates: usize,
    src: &RandomSource,
) -> Result<DpiReport> {
    if m < 3 {
        return Err(Error::DimensionError(
            "the data-processing check needs m >= 3".into(),
        ));
    }
    if m + 1 > k0.ambient_dim() {
        return Err(Error::DimensionError(format!(
            "m = {m} exceeds n - 1 = {}",
            k0.ambient_dim() - 1
        )));
    }
    if bootstrap_replicates < 2 {
        return Err(Error::DomainError("need at least 2 bootstrap replicates".into()));
    }
    let labels = sample_stage_labels(k0, m, n_samples, delta, src)?;
    let mi12 = plug_in_mi(&labels.pairs(1, 2, 0..n_samples));
    let mi1m = plug_in_mi(&labels.pairs(1, m, 0..n_samples));
    let boot_root = src.substream(BOOTSTRAP_STREAM);
    let diffs: Vec<f64> = try_map_tasks(bootstrap_replicates, |b| {
        let mut rng = boot_root.substream(b as u64).rng();
        let idx: Vec<usize> = (0..n_samples).map(|_| rng.random_range(0..n_samples)).collect();
        let a = plug_in_mi(&labels.pairs(1, 2, idx.iter().copied())).value;
        let c = plug_in_mi(&labels.pairs(1, m, idx.iter().copied())).value;
        Ok(a - c)
    })?;
    let mean = pairwise_sum(&diffs) / diffs.len() as f64;
    let dev: Vec<f64> = diffs.iter().map(|d| (d - mean).powi(2)).collect();
    let stderr = (pairwise_sum(&dev) / (diffs.len() - 1) as f64).sqrt();
    let pass = mi1m.value <= mi12.value + 2.0 * stderr;
    Ok(DpiReport {
        m,
        n_samples,
        delta,
        difference: mi12.value - mi1m.value,
        mi_first_second: mi12,
        mi_first_last: mi1m,
        stderr,
        bootstrap_replicates,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{generate_body, BodyParams};

    #[test]
    fn mi_of_identical_labels_is_entropy() {
        let pairs: Vec<(usize, usize)> = (0..400).map(|i| (i % 4, i % 4)).collect();
        let mi = plug_in_mi(&pairs);
        assert!((mi.value - 4f64.ln()).abs() < 1e-12);
        assert_eq!(mi.classes_joint, 4);
    }

    #[test]
    fn mi_of_independent_labels_is_zero() {
        let pairs: Vec<(usize, usize)> = (0..400).map(|i| (i % 4, (i / 4) % 5)).collect();
        let mi = plug_in_mi(&pairs);
        assert!(mi.value.abs() < 1e-12);
    }

    #[test]
    fn ball_has_zero_information() {
        let ball = generate_body("ball", &BodyParams::dim(5)).unwrap();
        let src = RandomSource::new(8);
        let mi = estimate_conditional_mi(&ball, 3, 200, 0.05, &src).unwrap();
        assert_eq!(mi.value, 0.0);
        let dpi = validate_dpi(&ball, 4, 100, 0.05, 20, &src).unwrap();
        assert_eq!(dpi.mi_first_second.value, 0.0);
        assert_eq!(dpi.mi_first_last.value, 0.0);
        assert!(dpi.pass);
    }

    #[test]
    fn bounded_by_marginal_entropy() {
        let cube = generate_body("cube", &BodyParams::dim(4)).unwrap();
        let src = RandomSource::new(21);
        let mi = estimate_conditional_mi(&cube, 3, 300, 0.1, &src).unwrap();
        assert!(mi.value >= 0.0);
        assert!(mi.value <= (mi.classes_x as f64).ln() + 1e-12);
        assert!(mi.value <= (mi.classes_y as f64).ln() + 1e-12);
    }

    #[test]
    fn preconditions() {
        let cube = generate_body("cube", &BodyParams::dim(5)).unwrap();
        let src = RandomSource::new(1);
        assert!(matches!(validate_dpi(&cube, 2, 10, 0.1, 10, &src), Err(Error::DimensionError(_))));
        assert!(matches!(
            estimate_conditional_mi(&cube, 1, 10, 0.1, &src),
            Err(Error::DimensionError(_))
        ));
        assert!(matches!(
            estimate_conditional_mi(&cube, 5, 10, 0.1, &src),
            Err(Error::DimensionError(_))
        ));
    }
}
