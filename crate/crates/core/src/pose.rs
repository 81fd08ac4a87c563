//! Metric 6-DOF pose of a textured plane from a homography and a depth map.
//!
//! Camera frame convention: X right, Y down, Z forward. The object frame has
//! x to the right of the texture, y towards the top of the texture and z out
//! of the textured face, so a plane facing the camera has `k ~ (0, 0, -1)`.

use std::fmt;

use thiserror::Error;

use crate::features::{
    object_present_with, DetectorDescriptor, FeatureError, Features, Keypoint, Match,
};
use crate::geometry::{euler_from_rot, EulerAngles, RotationMatrix, Vec3};
use crate::homography::{
    estimate_ransac, project, Correspondence, Homography, HomographyError, RansacConfig,
};
use crate::image::{Gray16Image, GrayImage, RgbImage};

/// Radius (px) searched for valid depth when a pixel has none.
pub const DEPTH_REPAIR_RADIUS: i64 = 3;
/// Minimum basis vector length in meters.
pub const MIN_BASIS_LENGTH: f64 = 1e-6;
/// Basis vectors must be between these angles (degrees).
pub const MIN_BASIS_ANGLE_DEG: f64 = 10.0;
pub const MAX_BASIS_ANGLE_DEG: f64 = 170.0;
/// Object width used when a reference carries no physical size.
pub const DEFAULT_OBJECT_WIDTH_M: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoseError {
    #[error("invalid camera intrinsics: {0}")]
    BadIntrinsics(String),
    #[error("image is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("pixel ({0:.2}, {1:.2}) lies outside the frame")]
    OutOfFrame(f64, f64),
    #[error("no valid depth within {radius} px of ({u}, {v})")]
    NoDepth { u: i64, v: i64, radius: i64 },
    #[error("degenerate plane: {0}")]
    DegeneratePlane(String),
    #[error(transparent)]
    Homography(#[from] HomographyError),
    #[error("epsilon metric needs at least one pair")]
    EmptyInput,
    #[error("reference object: {0}")]
    BadReference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for CameraIntrinsics {
    /// 640x480, f = 525 px, principal point at the image center.
    fn default() -> Self {
        Self {
            fx: 525.0,
            fy: 525.0,
            cx: 319.5,
            cy: 239.5,
            width: 640,
            height: 480,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<(), PoseError> {
        let finite = [self.fx, self.fy, self.cx, self.cy]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(PoseError::BadIntrinsics("non-finite parameter".into()));
        }
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(PoseError::BadIntrinsics(
                "focal lengths must be positive".into(),
            ));
        }
        if !(self.cx > 0.0
            && self.cx < self.width as f64
            && self.cy > 0.0
            && self.cy < self.height as f64)
        {
            return Err(PoseError::BadIntrinsics(
                "principal point outside the image".into(),
            ));
        }
        Ok(())
    }

    /// Pinhole projection; `None` for points at or behind the camera.
    pub fn project(&self, p: &Vec3) -> Option<[f64; 2]> {
        (p.z > 0.0).then(|| [self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy])
    }

    /// `((u - cx) d / fx, (v - cy) d / fy, d)`
    pub fn backproject_with_depth(&self, u: f64, v: f64, depth_m: f64) -> Vec3 {
        Vec3::new(
            (u - self.cx) * depth_m / self.fx,
            (v - self.cy) * depth_m / self.fy,
            depth_m,
        )
    }
}

/// Per-pixel depth in millimeters, 0 = invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    intrinsics: CameraIntrinsics,
    depth_mm: Vec<u16>,
}

impl DepthFrame {
    pub fn new(intrinsics: CameraIntrinsics, depth: Gray16Image) -> Result<Self, PoseError> {
        intrinsics.validate()?;
        if depth.width() != intrinsics.width || depth.height() != intrinsics.height {
            return Err(PoseError::DimensionMismatch {
                want_w: intrinsics.width,
                want_h: intrinsics.height,
                got_w: depth.width(),
                got_h: depth.height(),
            });
        }
        Ok(Self {
            intrinsics,
            depth_mm: depth.into_data(),
        })
    }

    pub fn from_millimeters(
        intrinsics: CameraIntrinsics,
        depth_mm: Vec<u16>,
    ) -> Result<Self, PoseError> {
        let img = Gray16Image::new(intrinsics.width, intrinsics.height, depth_mm)
            .map_err(|e| PoseError::BadIntrinsics(e.to_string()))?;
        Self::new(intrinsics, img)
    }

    pub fn intrinsics(&self) -> &CameraIntrinsics {
        &self.intrinsics
    }

    pub fn width(&self) -> usize {
        self.intrinsics.width
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height
    }

    pub fn millimeters(&self) -> &[u16] {
        &self.depth_mm
    }

    pub fn to_image(&self) -> Gray16Image {
        Gray16Image::new(self.width(), self.height(), self.depth_mm.clone())
            .expect("consistent dims")
    }

    pub fn raw(&self, u: usize, v: usize) -> u16 {
        self.depth_mm[v * self.width() + u]
    }

    /// Depth in meters at an integer pixel. Holes are filled with the median
    /// of valid depths within [`DEPTH_REPAIR_RADIUS`] (mean of the two middle
    /// values for even counts).
    pub fn depth_at(&self, u: i64, v: i64) -> Result<f64, PoseError> {
        let (w, h) = (self.width() as i64, self.height() as i64);
        if u < 0 || v < 0 || u >= w || v >= h {
            return Err(PoseError::OutOfFrame(u as f64, v as f64));
        }
        let d = self.raw(u as usize, v as usize);
        if d != 0 {
            return Ok(d as f64 / 1000.0);
        }
        let r = DEPTH_REPAIR_RADIUS;
        let mut vals = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let (x, y) = (u + dx, v + dy);
                if x < 0 || y < 0 || x >= w || y >= h {
                    continue;
                }
                let d = self.raw(x as usize, y as usize);
                if d != 0 {
                    vals.push(d);
                }
            }
        }
        if vals.is_empty() {
            return Err(PoseError::NoDepth { u, v, radius: r });
        }
        vals.sort_unstable();
        let n = vals.len();
        let mm = if n % 2 == 1 {
            vals[n / 2] as f64
        } else {
            (vals[n / 2 - 1] as f64 + vals[n / 2] as f64) / 2.0
        };
        Ok(mm / 1000.0)
    }
}

/// A trained planar object.
#[derive(Debug, Clone)]
pub struct ReferenceObject<D> {
    pub id: String,
    pub detector_id: String,
    pub color: RgbImage,
    pub texture: GrayImage,
    pub features: Features<D>,
    pub physical_width_m: Option<f64>,
    pub physical_height_m: Option<f64>,
}

impl<D> ReferenceObject<D> {
    pub fn train<F>(
        id: impl Into<String>,
        color: RgbImage,
        detector: &F,
        physical_width_m: Option<f64>,
        physical_height_m: Option<f64>,
    ) -> Self
    where
        F: DetectorDescriptor<Descriptor = D>,
    {
        let texture = color.to_gray();
        let features = detector.extract(&texture);
        Self {
            id: id.into(),
            detector_id: detector.id(),
            color,
            texture,
            features,
            physical_width_m,
            physical_height_m,
        }
    }

    pub fn width_px(&self) -> usize {
        self.texture.width()
    }

    pub fn height_px(&self) -> usize {
        self.texture.height()
    }

    /// Meters per reference pixel along x and y.
    pub fn meters_per_pixel(&self) -> (f64, f64) {
        let sx = self.physical_width_m.unwrap_or(DEFAULT_OBJECT_WIDTH_M) / self.width_px() as f64;
        let sy = match self.physical_height_m {
            Some(h) => h / self.height_px() as f64,
            None => sx,
        };
        (sx, sy)
    }

    pub fn check(&self) -> Result<(), PoseError> {
        if self.features.keypoints.len() != self.features.descriptors.len() {
            return Err(PoseError::BadReference(
                "descriptor count differs from keypoint count".into(),
            ));
        }
        let (w, h) = (self.width_px() as f64, self.height_px() as f64);
        if let Some(k) = self
            .features
            .keypoints
            .iter()
            .find(|k| !(k.x >= 0.0 && k.x < w && k.y >= 0.0 && k.y < h))
        {
            return Err(PoseError::BadReference(format!(
                "keypoint ({}, {}) outside texture",
                k.x, k.y
            )));
        }
        if self.color.width() != self.texture.width()
            || self.color.height() != self.texture.height()
        {
            return Err(PoseError::BadReference(
                "color and texture sizes differ".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPose {
    /// Object origin `c` in the camera frame, meters.
    pub position: Vec3,
    /// Columns are the object axes `i`, `j`, `k`.
    pub frame: RotationMatrix,
    pub euler: EulerAngles,
    pub num_matches: usize,
    pub num_inliers: usize,
    /// Euler extraction hit gimbal lock.
    pub degenerate: bool,
    /// Measured `x - c` before orthogonalization.
    pub basis_x: Vec3,
    /// Measured `y - c`.
    pub basis_y: Vec3,
    pub homography: Homography,
}

impl PlanarPose {
    /// `(i * |x|, x)`: the recomputed and the measured x basis vector.
    pub fn x_recalculation(&self) -> (Vec3, Vec3) {
        (self.frame.column(0) * self.basis_x.norm(), self.basis_x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsenceReason {
    InsufficientMatches,
    NoConsensus,
    DegenerateHomography,
    OutOfFrame,
    NoDepth,
    DegeneratePlane,
}

impl AbsenceReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::InsufficientMatches => "insufficient_matches",
            Self::NoConsensus => "no_consensus",
            Self::DegenerateHomography => "degenerate_homography",
            Self::OutOfFrame => "out_of_frame",
            Self::NoDepth => "no_depth",
            Self::DegeneratePlane => "degenerate_plane",
        }
    }
}

impl fmt::Display for AbsenceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Absence {
    pub reason: AbsenceReason,
    pub num_matches: usize,
    pub num_inliers: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PoseEstimate {
    Present(PlanarPose),
    Absent(Absence),
}

impl PoseEstimate {
    pub fn pose(&self) -> Option<&PlanarPose> {
        match self {
            Self::Present(p) => Some(p),
            Self::Absent(_) => None,
        }
    }

    pub fn is_present(&self) -> bool {
        matches!(self, Self::Present(_))
    }

    pub fn absence_reason(&self) -> Option<AbsenceReason> {
        match self {
            Self::Present(_) => None,
            Self::Absent(a) => Some(a.reason),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseConfig {
    pub ransac: RansacConfig,
    pub min_matches: usize,
}

impl Default for PoseConfig {
    fn default() -> Self {
        Self {
            ransac: RansacConfig::default(),
            min_matches: crate::features::MIN_MATCHES,
        }
    }
}

/// `p_c = (w/2, h/2)`, `p_x = (w, h/2)`, `p_y = (w/2, 0)`.
pub fn reference_axis_points(width_px: usize, height_px: usize) -> [[f64; 2]; 3] {
    let (w, h) = (width_px as f64, height_px as f64);
    [[w / 2.0, h / 2.0], [w, h / 2.0], [w / 2.0, 0.0]]
}

/// Lifts a sub-pixel location to the camera frame using the (repaired) depth
/// of the nearest integer pixel.
pub fn backproject(pixel: [f64; 2], depth: &DepthFrame) -> Result<Vec3, PoseError> {
    let [u, v] = pixel;
    if !u.is_finite() || !v.is_finite() {
        return Err(PoseError::OutOfFrame(u, v));
    }
    let (ui, vi) = (u.round(), v.round());
    if ui < 0.0 || vi < 0.0 || ui >= depth.width() as f64 || vi >= depth.height() as f64 {
        return Err(PoseError::OutOfFrame(u, v));
    }
    let d = depth.depth_at(ui as i64, vi as i64)?;
    Ok(depth.intrinsics().backproject_with_depth(u, v, d))
}

/// Orthonormal object frame from the three measured points.
///
/// With `x = x_raw - c` and `y = y_raw - c`: `j = y / |y|`, `z = x cross y`,
/// `k = z / |z|`, `i = (y cross z) / |y cross z|`.
pub fn build_frame(c: &Vec3, x_raw: &Vec3, y_raw: &Vec3) -> Result<RotationMatrix, PoseError> {
    let x = x_raw - c;
    let y = y_raw - c;
    let (nx, ny) = (x.norm(), y.norm());
    if !(nx > MIN_BASIS_LENGTH && ny > MIN_BASIS_LENGTH) {
        return Err(PoseError::DegeneratePlane(format!(
            "basis vector too short (|x| = {nx:.3e}, |y| = {ny:.3e})"
        )));
    }
    let angle = (x.dot(&y) / (nx * ny)).clamp(-1.0, 1.0).acos().to_degrees();
    if !(angle > MIN_BASIS_ANGLE_DEG && angle < MAX_BASIS_ANGLE_DEG) {
        return Err(PoseError::DegeneratePlane(format!(
            "basis angle {angle:.2} deg"
        )));
    }
    let j = y / ny;
    let z = x.cross(&y);
    let k = z / z.norm();
    let yz = y.cross(&z);
    let i = yz / yz.norm();
    RotationMatrix::from_columns(&i, &j, &k).map_err(|e| PoseError::DegeneratePlane(e.to_string()))
}

/// Pose from a known homography: project the three axis points, lift them
/// with depth, shift to `c` and orthonormalize.
pub fn pose_from_homography(
    h: &Homography,
    width_px: usize,
    height_px: usize,
    depth: &DepthFrame,
) -> Result<PlanarPose, PoseError> {
    let [pc, px, py] = reference_axis_points(width_px, height_px);
    let pc = project(h, pc)?;
    let px = project(h, px)?;
    let py = project(h, py)?;
    let c = backproject(pc, depth)?;
    let x_raw = backproject(px, depth)?;
    let y_raw = backproject(py, depth)?;
    let frame = build_frame(&c, &x_raw, &y_raw)?;
    let sol = euler_from_rot(&frame);
    Ok(PlanarPose {
        position: c,
        frame,
        euler: sol.angles,
        num_matches: 0,
        num_inliers: 0,
        degenerate: sol.gimbal_lock,
        basis_x: x_raw - c,
        basis_y: y_raw - c,
        homography: *h,
    })
}

fn absent(
    reason: AbsenceReason,
    num_matches: usize,
    num_inliers: usize,
    detail: impl Into<String>,
) -> PoseEstimate {
    PoseEstimate::Absent(Absence {
        reason,
        num_matches,
        num_inliers,
        detail: detail.into(),
    })
}

fn reason_for(err: &PoseError) -> AbsenceReason {
    match err {
        PoseError::NoDepth { .. } => AbsenceReason::NoDepth,
        PoseError::OutOfFrame(..) => AbsenceReason::OutOfFrame,
        PoseError::DegeneratePlane(_) => AbsenceReason::DegeneratePlane,
        _ => AbsenceReason::DegenerateHomography,
    }
}

/// Everything after matching: presence check, RANSAC and pose recovery.
///
/// `matches` index the object's keypoints (query) and `frame_keypoints` (train).
pub fn pose_from_matches<D>(
    obj: &ReferenceObject<D>,
    frame_keypoints: &[Keypoint],
    matches: &[Match],
    depth: &DepthFrame,
    cfg: &PoseConfig,
) -> PoseEstimate {
    let n = matches.len();
    if !object_present_with(matches, cfg.min_matches) {
        return absent(
            AbsenceReason::InsufficientMatches,
            n,
            0,
            format!("{n} matches, need {}", cfg.min_matches),
        );
    }
    let corr: Vec<Correspondence> = matches
        .iter()
        .map(|m| {
            let a = obj.features.keypoints[m.query_index];
            let b = frame_keypoints[m.train_index];
            Correspondence::new([a.x, a.y], [b.x, b.y])
        })
        .collect();
    let ransac = match estimate_ransac(&corr, &cfg.ransac) {
        Ok(r) => r,
        Err(e @ HomographyError::NoConsensus { .. }) => {
            return absent(AbsenceReason::NoConsensus, n, 0, e.to_string());
        }
        Err(e) => return absent(AbsenceReason::NoConsensus, n, 0, e.to_string()),
    };
    let inliers = ransac.inlier_count();
    match pose_from_homography(&ransac.homography, obj.width_px(), obj.height_px(), depth) {
        Ok(mut pose) => {
            pose.num_matches = n;
            pose.num_inliers = inliers;
            PoseEstimate::Present(pose)
        }
        Err(e) => absent(reason_for(&e), n, inliers, e.to_string()),
    }
}

/// Matches the object against precomputed frame features and recovers its pose.
pub fn estimate_pose_with_features<F: DetectorDescriptor>(
    obj: &ReferenceObject<F::Descriptor>,
    frame: &Features<F::Descriptor>,
    depth: &DepthFrame,
    detector: &F,
    cfg: &PoseConfig,
) -> PoseEstimate {
    if frame.is_empty() || obj.features.is_empty() {
        return absent(
            AbsenceReason::InsufficientMatches,
            0,
            0,
            "no descriptors to match",
        );
    }
    let matches = match detector.match_descriptors(&obj.features.descriptors, &frame.descriptors) {
        Ok(m) => m,
        Err(FeatureError::EmptyTrainSet) => Vec::new(),
        Err(e) => return absent(AbsenceReason::InsufficientMatches, 0, 0, e.to_string()),
    };
    pose_from_matches(obj, &frame.keypoints, &matches, depth, cfg)
}

/// Full single-object pipeline on one RGB-D frame.
pub fn estimate_pose<F: DetectorDescriptor>(
    obj: &ReferenceObject<F::Descriptor>,
    gray: &GrayImage,
    depth: &DepthFrame,
    detector: &F,
    cfg: &PoseConfig,
) -> Result<PoseEstimate, PoseError> {
    if gray.width() != depth.width() || gray.height() != depth.height() {
        return Err(PoseError::DimensionMismatch {
            want_w: depth.width(),
            want_h: depth.height(),
            got_w: gray.width(),
            got_h: gray.height(),
        });
    }
    let frame = detector.extract(gray);
    Ok(estimate_pose_with_features(
        obj, &frame, depth, detector, cfg,
    ))
}

/// Mean Euclidean distance between recomputed and measured x vectors.
pub fn epsilon_metric(pairs: &[(Vec3, Vec3)]) -> Result<f64, PoseError> {
    if pairs.is_empty() {
        return Err(PoseError::EmptyInput);
    }
    let total: f64 = pairs.iter().map(|(a, b)| (a - b).norm()).sum();
    Ok(total / pairs.len() as f64)
}

pub const AXIS_COLORS: [[u8; 3]; 3] = [[255, 0, 0], [0, 255, 0], [0, 0, 255]];
const NEAR_PLANE: f64 = 1e-3;

/// Draws the projected object axes (x red, y green, z blue).
pub fn overlay_axes(
    image: &RgbImage,
    pose: &PlanarPose,
    intrinsics: &CameraIntrinsics,
    axis_length_m: f64,
) -> RgbImage {
    let mut out = image.clone();
    let c = pose.position;
    for (axis, color) in AXIS_COLORS.iter().enumerate() {
        let tip = c + pose.frame.column(axis) * axis_length_m;
        let Some((a, b)) = clip_near(&c, &tip) else {
            continue;
        };
        let (Some(pa), Some(pb)) = (intrinsics.project(&a), intrinsics.project(&b)) else {
            continue;
        };
        draw_segment(&mut out, pa, pb, *color);
    }
    out
}

fn clip_near(a: &Vec3, b: &Vec3) -> Option<(Vec3, Vec3)> {
    match (a.z > NEAR_PLANE, b.z > NEAR_PLANE) {
        (true, true) => Some((*a, *b)),
        (false, false) => None,
        (ain, _) => {
            let t = (NEAR_PLANE - a.z) / (b.z - a.z);
            let cut = a + (b - a) * t;
            if ain {
                Some((*a, cut))
            } else {
                Some((cut, *b))
            }
        }
    }
}

/// Clips the segment to the image rectangle, then rasterizes it.
fn draw_segment(img: &mut RgbImage, a: [f64; 2], b: [f64; 2], color: [u8; 3]) {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = [b[0] - a[0], b[1] - a[1]];
    let checks = [
        (-d[0], a[0] + 0.5),
        (d[0], w - 0.5 - a[0]),
        (-d[1], a[1] + 0.5),
        (d[1], h - 0.5 - a[1]),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return;
    }
    let s = [a[0] + t0 * d[0], a[1] + t0 * d[1]];
    let e = [a[0] + t1 * d[0], a[1] + t1 * d[1]];
    let steps = ((e[0] - s[0]).abs().max((e[1] - s[1]).abs()).ceil() as usize).max(1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let x = (s[0] + t * (e[0] - s[0])).round();
        let y = (s[1] + t * (e[1] - s[1])).round();
        if x >= 0.0 && y >= 0.0 && x < w && y < h {
            img.set(x as usize, y as usize, color);
        }
    }
}
