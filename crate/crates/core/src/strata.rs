//! Stabilizers, orbits and the orbit-type stratification of `G_{n,2}`
//! under a finite symmetry group.
//!
//! Finite groups carry counting measure: `Vol(G) = |G|` and the stratum
//! constant `v_[H]` is the order of a representative stabilizer.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimators::Flag;
use crate::geometry::congruence::group_lex_cmp;
use crate::geometry::SymmetryGroup;
use crate::linalg::{log_grassmannian_volume, Subspace};
use crate::parallel::try_map_tasks;
use crate::sampling::{sample_grassmannian, RandomSource};

/// Subspace-equality tolerance on projector entries.
pub const TOL_SUBSPACE: f64 = 1e-8;

impl Serialize for SymmetryGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self
            .elements()
            .iter()
            .map(|g| g.transpose().iter().copied().collect())
            .collect();
        let mut s = serializer.serialize_struct("SymmetryGroup", 3)?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("order", &self.order())?;
        s.serialize_field("elements_row_major", &rows)?;
        s.end()
    }
}

/// `H_W = {g in G : g W = W}`, tested through projector equality.
pub fn stabilizer(g: &SymmetryGroup, w: &Subspace, tol: f64) -> Result<SymmetryGroup> {
    if g.dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: w.ambient_dim(),
        });
    }
    let p = w.projector();
    let fixing = g
        .elements()
        .iter()
        .filter(|h| ((*h) * &p * h.transpose() - &p).amax() <= tol)
        .cloned()
        .collect();
    Ok(SymmetryGroup::from_elements_unchecked(g.dim(), fixing))
}

/// Distinct images `g W`; checks `|orbit| * |stabilizer| = |G|`.
pub fn orbit(g: &SymmetryGroup, w: &Subspace, tol: f64) -> Result<Vec<Subspace>> {
    if g.dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: w.ambient_dim(),
        });
    }
    let mut images: Vec<(Subspace, crate::linalg::MatrixNM)> = Vec::new();
    for h in g.elements() {
        let img = Subspace::from_orthonormal(h * w.basis()).ok_or_else(|| {
            Error::DomainError("group element does not preserve orthonormality".into())
        })?;
        let p = img.projector();
        if !images.iter().any(|(_, q)| (q - &p).amax() <= tol) {
            images.push((img, p));
        }
    }
    let stab = stabilizer(g, w, tol)?;
    if images.len() * stab.order() != g.order() {
        return Err(Error::OrbitStabilizerMismatch {
            orbit: images.len(),
            stabilizer: stab.order(),
            group: g.order(),
        });
    }
    Ok(images.into_iter().map(|(s, _)| s).collect())
}

/// Conjugacy classes of a list of subgroups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Member indices per class, classes in order of first appearance.
    pub classes: Vec<Vec<usize>>,
    /// Index of the canonical (lexicographically smallest) member per class.
    pub representatives: Vec<usize>,
}

/// `true` if some `g` in `G` has `g h1 g^T = h2` as sets.
pub fn are_conjugate(g: &SymmetryGroup, h1: &SymmetryGroup, h2: &SymmetryGroup, tol: f64) -> bool {
    if h1.order() != h2.order() {
        return false;
    }
    if h1.same_elements(h2, tol) {
        return true;
    }
    g.elements()
        .iter()
        .any(|x| h1.conjugate_by(x).same_elements(h2, tol))
}

pub fn conjugacy_classify(
    g: &SymmetryGroup,
    subgroups: &[SymmetryGroup],
    tol: f64,
) -> Result<Partition> {
    for h in subgroups {
        if !h.is_subgroup_of(g, tol) {
            return Err(Error::DomainError("subgroup is not contained in G".into()));
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, h) in subgroups.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|c| are_conjugate(g, &subgroups[c[0]], h, tol))
        {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    let representatives = classes
        .iter()
        .map(|c| {
            *c.iter()
                .min_by(|&&a, &&b| group_lex_cmp(&subgroups[a], &subgroups[b]))
                .expect("nonempty class")
        })
        .collect();
    Ok(Partition {
        classes,
        representatives,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Stratum {
    /// Representative stabilizer `H_0` of the class.
    pub class_rep: SymmetryGroup,
    /// `v_[H] = |H_0|`.
    pub v: f64,
    pub mu_hat: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Finite,
    /// `O(n)`, the symmetry group of the Euclidean ball.
    BallOrthogonal,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratReport {
    pub strata: Vec<Stratum>,
    pub group_kind: GroupKind,
    pub group_order: usize,
    pub n: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Counting-measure evaluation of the stratified lower bound on
    /// `E[log N]`; `None` for the ball.
    pub lower_bound: Option<f64>,
    pub measure_convention: &'static str,
    pub flags: Vec<Flag>,
}

impl StratReport {
    /// Report for the ball, whose shadows are all congruent (`N = 1`).
    pub fn analytic_ball(n: usize) -> Self {
        StratReport {
            strata: Vec::new(),
            group_kind: GroupKind::BallOrthogonal,
            group_order: 0,
            n,
            n_samples: 0,
            seed: 0,
            lower_bound: None,
            measure_convention: "analytic-ball",
            flags: Vec::new(),
        }
    }

    pub fn mu_total(&self) -> f64 {
        self.strata.iter().map(|s| s.mu_hat).sum()
    }
}

/// Samples Haar 2-planes, computes their stabilizers, and groups them by
/// conjugacy class.
pub fn stratify(
    g: &SymmetryGroup,
    n: usize,
    n_samples: usize,
    src: &RandomSource,
    tol: f64,
) -> Result<StratReport> {
    if n < 3 {
        return Err(Error::DomainError("stratification needs n >= 3".into()));
    }
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    if n_samples < 1 {
        return Err(Error::DomainError("n_samples must be at least 1".into()));
    }
    let stabs: Vec<SymmetryGroup> = try_map_tasks(n_samples, |i| {
        let mut rng = src.substream(i as u64).rng();
        let w = sample_grassmannian(&mut rng, n, 2)?;
        stabilizer(g, &w, tol)
    })?;
    // classify in sample order against the running list of class heads
    let mut heads: Vec<SymmetryGroup> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for h in &stabs {
        match heads.iter().position(|r| are_conjugate(g, r, h, tol)) {
            Some(k) => {
                counts[k] += 1;
                if group_lex_cmp(h, &heads[k]).is_lt() {
                    heads[k] = h.clone();
                }
            }
            None => {
                heads.push(h.clone());
                counts.push(1);
            }
        }
    }
    let strata: Vec<Stratum> = heads
        .into_iter()
        .zip(counts)
        .map(|(h, count)| Stratum {
            v: h.order() as f64,
            class_rep: h,
            mu_hat: count as f64 / n_samples as f64,
            count,
        })
        .collect();
    let mut report = StratReport {
        strata,
        group_kind: GroupKind::Finite,
        group_order: g.order(),
        n,
        n_samples,
        seed: src.seed,
        lower_bound: None,
        measure_convention: "counting",
        flags: vec![Flag::FiniteGroupDegenerate],
    };
    report.lower_bound = Some(theorem2_lower_bound(&report, BoundMode::Counting)?);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    Counting,
    AnalyticBall,
}

/// `ln|G| - ln Vol(G_{n,2}) - sum ln(v_[H]) mu_hat` (counting mode), or `0`
/// for the ball. The counting value is the formula's evaluation, not a
/// certified bound: for finite `G` the true `E[log N]` diverges.
pub fn theorem2_lower_bound(report: &StratReport, mode: BoundMode) -> Result<f64> {
    match (mode, report.group_kind) {
        (BoundMode::Counting, GroupKind::Finite) => {
            let strata_term: f64 = report.strata.iter().map(|s| s.v.ln() * s.mu_hat).sum();
            Ok((report.group_order as f64).ln() - log_grassmannian_volume(report.n)? - strata_term)
        }
        (BoundMode::AnalyticBall, GroupKind::BallOrthogonal) => Ok(0.0),
        (BoundMode::Counting, GroupKind::BallOrthogonal) => Err(Error::ModeUnsupported(
            "counting measure needs a finite group; use analytic-ball for the ball".into(),
        )),
        (BoundMode::AnalyticBall, GroupKind::Finite) => Err(Error::ModeUnsupported(
            "analytic-ball mode applies only to the ball".into(),
        )),
    }
}
