//! Small dense linear algebra: orthonormal bases, projectors, principal
//! angles, and the log-Gamma based volume constants.
//!
//! Everything here targets ambient dimensions up to about 16.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type VectorN = DVector<f64>;
pub type MatrixNM = DMatrix<f64>;

/// Orthonormality tolerance for subspace bases.
pub const TOL_ORTH: f64 = 1e-10;
/// Relative pivot tolerance used by [`orthonormalize`].
pub const RANK_TOL: f64 = 1e-12;

/// A linear subspace of R^n held as an n x d matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: MatrixNM,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal. Returns `None` if it is not.
    pub fn from_orthonormal(basis: MatrixNM) -> Option<Self> {
        if basis.ncols() > basis.nrows() {
            return None;
        }
        let s = Subspace { basis };
        (s.orthonormality_error() <= TOL_ORTH).then_some(s)
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            basis: MatrixNM::identity(n, n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &MatrixNM {
        &self.basis
    }

    pub fn column(&self, j: usize) -> VectorN {
        self.basis.column(j).into_owned()
    }

    /// `max |B^T B - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        let d = g.nrows();
        (g - MatrixNM::identity(d, d)).amax()
    }

    /// Coordinates of an ambient vector in this basis (`B^T x`).
    pub fn coords(&self, x: &VectorN) -> VectorN {
        self.basis.tr_mul(x)
    }

    /// Ambient vector for subspace coordinates (`B c`).
    pub fn embed(&self, c: &VectorN) -> VectorN {
        &self.basis * c
    }

    pub fn projector(&self) -> MatrixNM {
        projector(self)
    }

    /// Orthonormal basis of the orthogonal complement.
    ///
    /// Deterministic: standard basis vectors are orthogonalized against the
    /// current span in order of decreasing residual norm.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim();
        let mut cols: Vec<VectorN> = (0..self.dim()).map(|j| self.column(j)).collect();
        let mut picked: Vec<VectorN> = Vec::with_capacity(n - self.dim());
        let mut used = vec![false; n];
        while cols.len() < n {
            let mut best: Option<(usize, VectorN, f64)> = None;
            for (i, taken) in used.iter().enumerate() {
                if *taken {
                    continue;
                }
                let mut r = VectorN::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
                for _ in 0..2 {
                    for c in &cols {
                        let a = c.dot(&r);
                        r.axpy(-a, c, 1.0);
                    }
                }
                let norm = r.norm();
                if best.as_ref().is_none_or(|b| norm > b.2) {
                    best = Some((i, r, norm));
                }
            }
            let (i, r, norm) = best.expect("complement search exhausted");
            used[i] = true;
            let v = r / norm;
            cols.push(v.clone());
            picked.push(v);
        }
        Subspace {
            basis: columns_to_matrix(n, &picked),
        }
    }
}

pub(crate) fn columns_to_matrix(n: usize, cols: &[VectorN]) -> MatrixNM {
    MatrixNM::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
pub fn orthonormalize(columns: &[VectorN]) -> Result<Subspace> {
    let first = columns
        .first()
        .ok_or_else(|| Error::DomainError("orthonormalize needs at least one column".into()))?;
    let n = first.len();
    for c in columns {
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
    }
    let mut q: Vec<VectorN> = Vec::with_capacity(columns.len());
    for c in columns {
        let input_norm = c.norm();
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &q {
                let a = b.dot(&v);
                v.axpy(-a, b, 1.0);
            }
        }
        let norm = v.norm();
        if input_norm == 0.0 || norm < RANK_TOL * input_norm || q.len() == n {
            return Err(Error::RankDeficient {
                rank: q.len(),
                expected: columns.len(),
            });
        }
        q.push(v / norm);
    }
    Ok(Subspace {
        basis: columns_to_matrix(n, &q),
    })
}

/// Orthogonal projector `B B^T` onto the subspace.
pub fn projector(s: &Subspace) -> MatrixNM {
    &s.basis * s.basis.transpose()
}

/// Principal angles between two subspaces, ascending, in `[0, pi/2]`.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.ambient_dim(),
            got: s2.ambient_dim(),
        });
    }
    // canonical argument order so that swapping the inputs is bitwise neutral
    let (a, b) = if (s1.dim(), basis_key(s1)) <= (s2.dim(), basis_key(s2)) {
        (s1, s2)
    } else {
        (s2, s1)
    };
    let sv = a.basis.tr_mul(&b.basis).singular_values();
    let mut angles: Vec<f64> = sv.iter().map(|s| s.clamp(0.0, 1.0).acos()).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    Ok(angles)
}

fn basis_key(s: &Subspace) -> Vec<u64> {
    s.basis.iter().map(|x| x.to_bits()).collect()
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0`.
///
/// Lanczos (g = 7, 9 terms) for `x >= 0.5`, reflection below. Integer and
/// half-integer arguments are evaluated exactly from factorial identities,
/// since those are the only arguments the volume formulas use.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::DomainError(format!("log_gamma requires x > 0, got {x}")));
    }
    if let Some(v) = log_gamma_half_integer(x) {
        return Ok(v);
    }
    Ok(lanczos_log_gamma(x))
}

fn log_gamma_half_integer(x: f64) -> Option<f64> {
    let twice = 2.0 * x;
    if twice.fract() != 0.0 || twice > 340.0 {
        return None;
    }
    let k = twice as u64;
    if k.is_multiple_of(2) {
        // Gamma(m) = (m-1)!
        let m = k / 2;
        let mut acc = 1.0f64;
        for i in 2..m {
            acc *= i as f64;
        }
        Some(acc.ln())
    } else {
        // Gamma(m + 1/2) = sqrt(pi) * prod_{i=1..m} (i - 1/2)
        let m = (k - 1) / 2;
        let mut acc = 1.0f64;
        for i in 1..=m {
            acc *= i as f64 - 0.5;
        }
        Some(0.5 * PI.ln() + acc.ln())
    }
}

fn lanczos_log_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return (PI / (PI * x).sin()).ln() - lanczos_log_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `ln(2 pi^{n/2} / Gamma(n/2))`, the log surface area of `S^{n-1}`.
pub fn log_sphere_area(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DomainError("log_sphere_area requires n >= 1".into()));
    }
    let half = n as f64 / 2.0;
    Ok(2f64.ln() + half * PI.ln() - log_gamma(half)?)
}

/// `ln Vol(G_{n,2}) = ln(4 pi^{n-1/2} / (Gamma(n/2) Gamma((n-1)/2)))`.
pub fn log_grassmannian_volume(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::DomainError(
            "log_grassmannian_volume requires n >= 3".into(),
        ));
    }
    let nf = n as f64;
    Ok(4f64.ln() + (nf - 0.5) * PI.ln()
        - log_gamma(nf / 2.0)?
        - log_gamma((nf - 1.0) / 2.0)?)
}

/// Orthogonal Procrustes: the orthogonal `g` minimizing `sum |g x_i - y_i|^2`.
pub fn procrustes(xs: &[VectorN], ys: &[VectorN]) -> MatrixNM {
    let n = xs[0].len();
    let mut m = MatrixNM::zeros(n, n);
    for (x, y) in xs.iter().zip(ys) {
        m += y * x.transpose();
    }
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

/// `max |g^T g - I|`.
pub fn orthogonality_error(g: &MatrixNM) -> f64 {
    let n = g.ncols();
    (g.tr_mul(g) - MatrixNM::identity(n, n)).amax()
}

/// Sum in a fixed pairwise tree, independent of how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len if len <= 8 => values.iter().sum(),
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> VectorN {
        VectorN::from_column_slice(xs)
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let s = orthonormalize(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_abs_diff_eq!(s.column(0), v(&[1.0, 0.0, 0.0]), epsilon = 1e-15);
        assert_abs_diff_eq!(s.column(1), v(&[0.0, 1.0, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn orthonormalize_hand_example() {
        let s = orthonormalize(&[v(&[1.0, 1.0]), v(&[1.0, 0.0])]).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.column(0), v(&[r, r]), epsilon = 1e-15);
        assert_abs_diff_eq!(s.column(1), v(&[r, -r]), epsilon = 1e-15);
    }

    #[test]
    fn orthonormalize_collinear_is_rank_deficient() {
        let err = orthonormalize(&[v(&[1.0, 0.0]), v(&[2.0, 0.0])]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 1, expected: 2 }));
    }

    #[test]
    fn projector_examples() {
        let p = projector(&Subspace::full(2));
        assert_abs_diff_eq!(p, MatrixNM::identity(2, 2), epsilon = 1e-15);
        let p = projector(&orthonormalize(&[v(&[1.0, 0.0])]).unwrap());
        assert_abs_diff_eq!(p, MatrixNM::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let p = projector(&orthonormalize(&[v(&[1.0, 1.0])]).unwrap());
        assert_abs_diff_eq!(
            p,
            MatrixNM::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn principal_angle_examples() {
        let e1 = orthonormalize(&[v(&[1.0, 0.0])]).unwrap();
        let e2 = orthonormalize(&[v(&[0.0, 1.0])]).unwrap();
        let d = orthonormalize(&[v(&[1.0, 1.0])]).unwrap();
        assert_abs_diff_eq!(principal_angles(&e1, &e1).unwrap()[0], 0.0);
        assert_abs_diff_eq!(principal_angles(&e1, &e2).unwrap()[0], PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(principal_angles(&d, &e1).unwrap()[0], PI / 4.0, epsilon = 1e-12);
    }

    // 50-digit mpmath values.
    #[allow(clippy::excessive_precision)]
    const LOG_GAMMA_ORACLE: [(f64, f64); 8] = [
        (1.0, 0.0),
        (4.0, 1.791_759_469_228_055_000_812_477),
        (0.5, 0.572_364_942_924_700_087_071_713_7),
        (1.5, -0.120_782_237_635_245_222_345_518_4),
        (2.5, 0.284_682_870_472_919_159_632_494_7),
        (3.7, 1.428_072_326_665_388_129_200_498),
        (10.25, 13.368_023_671_476_046_295_430_91),
        (0.1, 2.252_712_651_734_205_902_006_238),
    ];

    #[test]
    fn log_gamma_matches_oracle() {
        for (x, want) in LOG_GAMMA_ORACLE {
            let got = log_gamma(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "x={x}: {got} vs {want}"
            );
        }
        // the Lanczos branch alone, at half-integers
        assert!((lanczos_log_gamma(0.5) - LOG_GAMMA_ORACLE[2].1).abs() < 1e-13);
        assert!((lanczos_log_gamma(4.0) - LOG_GAMMA_ORACLE[1].1).abs() < 1e-13);
    }

    #[test]
    fn log_gamma_domain() {
        assert!(matches!(log_gamma(0.0), Err(Error::DomainError(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn sphere_area_examples() {
        assert_abs_diff_eq!(log_sphere_area(2).unwrap(), (2.0 * PI).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_sphere_area(3).unwrap(), (4.0 * PI).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_sphere_area(1).unwrap(), 2f64.ln(), epsilon = 1e-14);
        assert!(log_sphere_area(0).is_err());
    }

    #[test]
    fn grassmannian_volume_examples() {
        assert_abs_diff_eq!(
            log_grassmannian_volume(3).unwrap(),
            (8.0 * PI * PI).ln(),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            log_grassmannian_volume(4).unwrap(),
            (8.0 * PI.powi(3)).ln(),
            epsilon = 1e-13
        );
        assert!(log_grassmannian_volume(2).is_err());
    }

    #[test]
    fn complement_is_orthogonal() {
        let s = orthonormalize(&[v(&[1.0, 2.0, 3.0, 4.0]), v(&[0.0, 1.0, -1.0, 2.0])]).unwrap();
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        assert!(c.orthonormality_error() < 1e-14);
        assert!((s.basis().tr_mul(c.basis())).amax() < 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
