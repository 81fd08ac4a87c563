//! Projective maps between the reference image and a camera frame:
//! normalized DLT and seeded RANSAC.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{fmt_f64, parse_numbers};

/// Projections with `|c| <= PROJECTIVE_EPS` are at infinity.
pub const PROJECTIVE_EPS: f64 = 1e-12;
/// Relative singular-value gap below which the DLT system is rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Minimal samples with a triangle of smaller area (px^2) are skipped.
pub const MIN_TRIANGLE_AREA: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomographyError {
    #[error("point maps to infinity (c = {0:.3e})")]
    PointAtInfinity(f64),
    #[error("need at least 4 correspondences, got {0}")]
    TooFewCorrespondences(usize),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("no consensus: best model has {inliers} inliers, need {required}")]
    NoConsensus { inliers: usize, required: usize },
    #[error("invalid RANSAC configuration: {0}")]
    BadConfig(&'static str),
    #[error("expected 9 numbers for a homography, found {0}")]
    WrongCount(usize),
    #[error("cannot parse homography: {0}")]
    Parse(String),
}

/// A 3x3 homography stored at canonical scale: `||H||_F = 1`, `h33 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl Homography {
    pub fn identity() -> Self {
        Self::new(Matrix3::identity()).expect("identity is invertible")
    }

    /// Rescales to canonical form; rejects singular or non-finite matrices.
    pub fn new(m: Matrix3<f64>) -> Result<Self, HomographyError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(HomographyError::DegenerateConfiguration(
                "non-finite homography",
            ));
        }
        let norm = m.norm();
        if norm == 0.0 {
            return Err(HomographyError::DegenerateConfiguration("zero homography"));
        }
        // Already-canonical input is kept bit-exact so text round trips are lossless.
        let mut h = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            m
        } else {
            m / norm
        };
        if h[(2, 2)] < 0.0 || (h[(2, 2)] == 0.0 && first_nonzero(&h) < 0.0) {
            h = -h;
        }
        if h.determinant().abs() < 1e-300 {
            return Err(HomographyError::DegenerateConfiguration(
                "singular homography",
            ));
        }
        Ok(Self(h))
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self::new(Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0)).expect("invertible")
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Result<Self, HomographyError> {
        let inv = self
            .0
            .try_inverse()
            .ok_or(HomographyError::DegenerateConfiguration(
                "singular homography",
            ))?;
        Self::new(inv)
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                out[r * 3 + c] = self.0[(r, c)];
            }
        }
        out
    }
}

fn first_nonzero(m: &Matrix3<f64>) -> f64 {
    m.transpose()
        .iter()
        .copied()
        .find(|v| *v != 0.0)
        .unwrap_or(0.0)
}

impl fmt::Display for Homography {
    /// Three lines of three numbers, row-major, canonical scale.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_row_major();
        for r in 0..3 {
            writeln!(
                f,
                "{} {} {}",
                fmt_f64(v[r * 3]),
                fmt_f64(v[r * 3 + 1]),
                fmt_f64(v[r * 3 + 2])
            )?;
        }
        Ok(())
    }
}

impl FromStr for Homography {
    type Err = HomographyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = parse_numbers(s).map_err(|e| HomographyError::Parse(e.to_string()))?;
        if v.len() != 9 {
            return Err(HomographyError::WrongCount(v.len()));
        }
        Self::new(Matrix3::from_row_slice(&v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    /// Reference-image pixel.
    pub source: [f64; 2],
    /// Frame pixel.
    pub target: [f64; 2],
}

impl Correspondence {
    pub fn new(source: [f64; 2], target: [f64; 2]) -> Self {
        Self { source, target }
    }
}

/// `[a b c]^T = H [x y 1]^T`, returns `(a / c, b / c)`.
pub fn project(h: &Homography, p: [f64; 2]) -> Result<[f64; 2], HomographyError> {
    project_matrix(h.matrix(), p)
}

fn project_matrix(m: &Matrix3<f64>, p: [f64; 2]) -> Result<[f64; 2], HomographyError> {
    let v = m * Vector3::new(p[0], p[1], 1.0);
    if v.z.abs() <= PROJECTIVE_EPS {
        return Err(HomographyError::PointAtInfinity(v.z));
    }
    Ok([v.x / v.z, v.y / v.z])
}

/// Forward transfer error in pixels; infinite when the source maps to infinity.
pub fn reprojection_error(h: &Homography, c: &Correspondence) -> f64 {
    match project(h, c.source) {
        Ok(p) => ((p[0] - c.target[0]).powi(2) + (p[1] - c.target[1]).powi(2)).sqrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Translate the centroid to the origin and scale the mean distance to sqrt(2).
fn normalizing_transform(pts: impl Iterator<Item = [f64; 2]> + Clone) -> Option<Matrix3<f64>> {
    let n = pts.clone().count() as f64;
    let (sx, sy) = pts
        .clone()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p[0], acc.1 + p[1]));
    let (cx, cy) = (sx / n, sy / n);
    let mean = pts
        .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    if !(mean > 0.0) || !mean.is_finite() {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean;
    Some(Matrix3::new(
        s,
        0.0,
        -s * cx,
        0.0,
        s,
        -s * cy,
        0.0,
        0.0,
        1.0,
    ))
}

fn apply(m: &Matrix3<f64>, p: [f64; 2]) -> [f64; 2] {
    [
        m[(0, 0)] * p[0] + m[(0, 1)] * p[1] + m[(0, 2)],
        m[(1, 0)] * p[0] + m[(1, 1)] * p[1] + m[(1, 2)],
    ]
}

/// Least-squares homography from `n >= 4` correspondences.
///
/// Both point sets are isotropically normalized, the `2n x 9` system is solved
/// by SVD, and the result is denormalized and brought to canonical scale.
pub fn estimate_dlt(correspondences: &[Correspondence]) -> Result<Homography, HomographyError> {
    let n = correspondences.len();
    if n < 4 {
        return Err(HomographyError::TooFewCorrespondences(n));
    }
    if correspondences.iter().any(|c| {
        !(c.source
            .iter()
            .chain(c.target.iter())
            .all(|v| v.is_finite()))
    }) {
        return Err(HomographyError::DegenerateConfiguration(
            "non-finite coordinates",
        ));
    }
    let t_src = normalizing_transform(correspondences.iter().map(|c| c.source)).ok_or(
        HomographyError::DegenerateConfiguration("coincident source points"),
    )?;
    let t_dst = normalizing_transform(correspondences.iter().map(|c| c.target)).ok_or(
        HomographyError::DegenerateConfiguration("coincident target points"),
    )?;

    // Pad to at least 9 rows so the thin SVD exposes the null vector.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, c) in correspondences.iter().enumerate() {
        let [x, y] = apply(&t_src, c.source);
        let [u, v] = apply(&t_dst, c.target);
        let r = 2 * i;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }
    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or(HomographyError::DegenerateConfiguration("SVD failed"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = &svd.singular_values;
    let largest = s[order[0]];
    let eighth = s[order[7]];
    if !(largest > 0.0) || eighth / largest < RANK_TOLERANCE {
        return Err(HomographyError::DegenerateConfiguration(
            "rank-deficient design matrix",
        ));
    }
    let null = v_t.row(order[8]);
    let hn = Matrix3::from_row_slice(null.clone_owned().as_slice());
    let t_dst_inv = t_dst
        .try_inverse()
        .ok_or(HomographyError::DegenerateConfiguration(
            "normalization not invertible",
        ))?;
    Homography::new(t_dst_inv * hn * t_src)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacConfig {
    /// Inlier iff forward reprojection error is strictly below this (px).
    pub reprojection_threshold: f64,
    pub confidence: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Fewer final inliers than this is reported as no consensus.
    pub min_inliers: usize,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            reprojection_threshold: 3.0,
            confidence: 0.995,
            max_iterations: 2000,
            seed: 0,
            min_inliers: crate::features::MIN_MATCHES,
        }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<(), HomographyError> {
        if !(self.reprojection_threshold > 0.0) {
            return Err(HomographyError::BadConfig("threshold must be positive"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(HomographyError::BadConfig("confidence must lie in (0, 1)"));
        }
        if self.max_iterations == 0 {
            return Err(HomographyError::BadConfig(
                "max_iterations must be at least 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacResult {
    pub homography: Homography,
    pub inliers: Vec<bool>,
    pub iterations: usize,
}

impl RansacResult {
    pub fn inlier_count(&self) -> usize {
        self.inliers.iter().filter(|&&b| b).count()
    }
}

fn triangle_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

fn has_collinear_triple(pts: &[[f64; 2]; 4]) -> bool {
    const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    TRIPLES
        .iter()
        .any(|t| triangle_area(pts[t[0]], pts[t[1]], pts[t[2]]) < MIN_TRIANGLE_AREA)
}

fn inlier_mask(h: &Homography, data: &[Correspondence], threshold: f64) -> Vec<bool> {
    data.iter()
        .map(|c| reprojection_error(h, c) < threshold)
        .collect()
}

/// Required iterations for `confidence` given inlier ratio `w`.
pub fn adaptive_iterations(confidence: f64, w: f64, cap: usize) -> usize {
    if w >= 1.0 {
        return 1;
    }
    if w <= 0.0 {
        return cap;
    }
    let denom = (1.0 - w.powi(4)).ln();
    if denom >= 0.0 {
        return cap;
    }
    let n = ((1.0 - confidence).ln() / denom).ceil();
    if n.is_finite() && n >= 0.0 {
        (n as usize).clamp(1, cap)
    } else {
        cap
    }
}

/// Seeded RANSAC over 4-point minimal samples.
///
/// The best model (most inliers; the earliest iteration wins ties) is refit
/// by [`estimate_dlt`] on its inliers until the inlier set stops changing,
/// and the mask is recomputed under the returned homography.
pub fn estimate_ransac(
    correspondences: &[Correspondence],
    cfg: &RansacConfig,
) -> Result<RansacResult, HomographyError> {
    cfg.validate()?;
    let n = correspondences.len();
    if n < 4 {
        return Err(HomographyError::TooFewCorrespondences(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Homography, usize)> = None;
    let mut needed = cfg.max_iterations;
    let mut iter = 0;
    while iter < needed.min(cfg.max_iterations) {
        iter += 1;
        let idx = sample(&mut rng, n, 4);
        let sample: [Correspondence; 4] = std::array::from_fn(|k| correspondences[idx.index(k)]);
        let src: [[f64; 2]; 4] = std::array::from_fn(|k| sample[k].source);
        let dst: [[f64; 2]; 4] = std::array::from_fn(|k| sample[k].target);
        if has_collinear_triple(&src) || has_collinear_triple(&dst) {
            continue;
        }
        let Ok(h) = estimate_dlt(&sample) else {
            continue;
        };
        let count = correspondences
            .iter()
            .filter(|c| reprojection_error(&h, c) < cfg.reprojection_threshold)
            .count();
        if best.as_ref().is_none_or(|(_, b)| count > *b) {
            best = Some((h, count));
            needed =
                adaptive_iterations(cfg.confidence, count as f64 / n as f64, cfg.max_iterations);
        }
    }

    let Some((mut h, count)) = best else {
        return Err(HomographyError::DegenerateConfiguration(
            "every minimal sample was degenerate",
        ));
    };
    if count < cfg.min_inliers.max(4) {
        return Err(HomographyError::NoConsensus {
            inliers: count,
            required: cfg.min_inliers,
        });
    }

    let mut mask = inlier_mask(&h, correspondences, cfg.reprojection_threshold);
    for _ in 0..10 {
        let subset: Vec<Correspondence> = correspondences
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(c, _)| *c)
            .collect();
        if subset.len() < 4 {
            break;
        }
        let Ok(refit) = estimate_dlt(&subset) else {
            break;
        };
        let new_mask = inlier_mask(&refit, correspondences, cfg.reprojection_threshold);
        let new_count = new_mask.iter().filter(|&&b| b).count();
        let old_count = mask.iter().filter(|&&b| b).count();
        // Keep the refit only if it does not lose support.
        if new_count < old_count {
            break;
        }
        let stable = new_mask == mask;
        h = refit;
        mask = new_mask;
        if stable {
            break;
        }
    }
    let inliers = mask.iter().filter(|&&b| b).count();
    if inliers < cfg.min_inliers.max(4) {
        return Err(HomographyError::NoConsensus {
            inliers,
            required: cfg.min_inliers,
        });
    }
    Ok(RansacResult {
        homography: h,
        inliers: mask,
        iterations: iter,
    })
}
