//! Estimators for the information quantities of the projection chain.

mod ambiguity;
mod descriptor;
mod information;

pub use ambiguity::{
    estimate_elogn, estimate_elogn_sweep, estimate_n, estimate_n_sweep, random_codim2_shadow,
    reference_shadow, theorem1_bound, theorem1_first_term, wilson_interval, BoundValue,
    ElogNEstimate, Flag, LogN, NEstimate, Z95,
};
pub use descriptor::{
    embedded_descriptor, pairwise_signature, polytope_descriptor, raw_shape, shape_descriptor,
    ClassRegistry, RawShape, ShapeClass, ShapeDescriptor,
};
pub use information::{
    estimate_conditional_mi, plug_in_mi, sample_stage_labels, validate_dpi, DpiReport, MIEstimate,
    StageLabels,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Body;
use crate::sampling::RandomSource;

const BOUND_MI_STREAM: u64 = 0x6d69;

/// The information bound for `I(K1; K2 | K0)` next to its plug-in estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub first_term: f64,
    pub e_log_n: LogN,
    pub bound: BoundValue,
    pub mi_plugin: f64,
    /// Distinct `(K1, K2)` classes observed by the plug-in estimate.
    pub mi_classes: (usize, usize),
    pub outer: usize,
    pub inner: usize,
    pub chains: usize,
    pub seed: u64,
    pub flags: Vec<Flag>,
}

/// Evaluates the bound from an `E[log N_ε]` estimate and measures the
/// plug-in `I(K1; K2)` on `chains` random chains.
#[allow(clippy::too_many_arguments)]
pub fn bound_report(
    k0: &Body,
    eps: f64,
    outer: usize,
    inner: usize,
    chains: usize,
    delta: f64,
    src: &RandomSource,
) -> Result<BoundReport> {
    let n = k0.ambient_dim();
    let elogn = estimate_elogn(k0, eps, outer, inner, src)?;
    let bound = theorem1_bound(n, elogn.value)?;
    let mi = estimate_conditional_mi(k0, 2, chains, delta, &src.substream(BOUND_MI_STREAM))?;
    Ok(BoundReport {
        n,
        epsilon: eps,
        delta,
        first_term: theorem1_first_term(n)?,
        e_log_n: elogn.value,
        bound,
        mi_plugin: mi.value,
        mi_classes: (mi.classes_x, mi.classes_y),
        outer,
        inner,
        chains,
        seed: src.seed,
        flags: elogn.flags,
    })
}

/// Default descriptor grid: 5% of the circumradius.
pub fn default_delta(k0: &Body) -> f64 {
    let r = k0.circumradius();
    if r > 0.0 {
        0.05 * r
    } else {
        0.05
    }
}
