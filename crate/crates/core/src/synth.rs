//! Synthetic RGB-D scenes with exact ground truth.
//!
//! A textured plane is placed in front of a pinhole camera, the texture is
//! inverse-warped through the plane-induced homography and the depth map is
//! the analytic ray/plane intersection quantized to millimeters.

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use thiserror::Error;

use crate::features::DetectorDescriptor;
use crate::geometry::{RigidTransform, RotationMatrix, Vec3};
use crate::homography::{project, Homography, HomographyError};
use crate::image::{GrayImage, RgbImage};
use crate::pose::{
    epsilon_metric, estimate_pose, CameraIntrinsics, DepthFrame, PoseConfig, PoseError,
    ReferenceObject,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("object faces away from the camera")]
    BackFacing,
    #[error("object center is not in front of the camera")]
    BehindCamera,
    #[error("invalid noise settings: {0}")]
    BadNoise(&'static str),
    #[error("invalid sweep: {0}")]
    BadSweep(String),
    #[error(transparent)]
    Homography(#[from] HomographyError),
    #[error(transparent)]
    Pose(#[from] PoseError),
}

/// Object frame expressed in the camera frame (`T_camera^object`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenePose {
    pub camera_to_object: RigidTransform,
}

impl ScenePose {
    pub fn new(camera_to_object: RigidTransform) -> Result<Self, SynthError> {
        if !(camera_to_object.translation.z > 0.0) {
            return Err(SynthError::BehindCamera);
        }
        Ok(Self { camera_to_object })
    }

    /// The texture facing the camera (x right, y up, z towards the camera),
    /// tilted by `angle_deg` about its own y axis, centered `distance_m`
    /// along the optical axis.
    pub fn out_of_plane(angle_deg: f64, distance_m: f64) -> Result<Self, SynthError> {
        let rot = RotationMatrix::rot_x(std::f64::consts::PI)
            .mul(&RotationMatrix::rot_y(angle_deg.to_radians()));
        Self::new(RigidTransform::new(rot, Vec3::new(0.0, 0.0, distance_m)))
    }

    pub fn frame(&self) -> &RotationMatrix {
        &self.camera_to_object.rotation
    }

    pub fn position(&self) -> Vec3 {
        self.camera_to_object.translation
    }

    /// Angle between the object normal and the camera's backward axis, degrees.
    pub fn out_of_plane_deg(&self) -> f64 {
        let k = self.frame().column(2);
        (-k.z).clamp(-1.0, 1.0).acos().to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderNoise {
    /// Standard deviation of additive intensity noise, 8-bit levels.
    pub pixel_noise_sigma: f64,
    /// Standard deviation of additive depth noise, millimeters.
    pub depth_noise_mm: f64,
    /// Fraction of object pixels whose depth is zeroed.
    pub hole_rate: f64,
    pub seed: u64,
}

impl Default for RenderNoise {
    fn default() -> Self {
        Self {
            pixel_noise_sigma: 0.0,
            depth_noise_mm: 0.0,
            hole_rate: 0.0,
            seed: 0,
        }
    }
}

impl RenderNoise {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.pixel_noise_sigma >= 0.0 && self.pixel_noise_sigma.is_finite()) {
            return Err(SynthError::BadNoise(
                "pixel noise must be finite and non-negative",
            ));
        }
        if !(self.depth_noise_mm >= 0.0 && self.depth_noise_mm.is_finite()) {
            return Err(SynthError::BadNoise(
                "depth noise must be finite and non-negative",
            ));
        }
        if !(0.0..=1.0).contains(&self.hole_rate) {
            return Err(SynthError::BadNoise("hole rate must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RenderResult {
    pub color: RgbImage,
    pub gray: GrayImage,
    pub depth: DepthFrame,
    pub ground_truth: ScenePose,
    /// Maps reference pixels to frame pixels.
    pub homography: Homography,
}

#[derive(Debug, Clone)]
pub struct SceneRender {
    pub color: RgbImage,
    pub gray: GrayImage,
    pub depth: DepthFrame,
    pub homographies: Vec<Homography>,
}

/// Plane coordinates (meters) of reference pixel `(u, v)`:
/// `X = sx (u - w/2)`, `Y = sy (h/2 - v)`.
fn reference_to_plane(width_px: usize, height_px: usize, sx: f64, sy: f64) -> Matrix3<f64> {
    let (w, h) = (width_px as f64, height_px as f64);
    Matrix3::new(
        sx,
        0.0,
        -sx * w / 2.0,
        0.0,
        -sy,
        sy * h / 2.0,
        0.0,
        0.0,
        1.0,
    )
}

fn intrinsic_matrix(k: &CameraIntrinsics) -> Matrix3<f64> {
    Matrix3::new(k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0)
}

/// `H = K [r1 r2 t] S`, where `S` maps reference pixels to plane meters.
pub fn induced_homography_for(
    pose: &ScenePose,
    intrinsics: &CameraIntrinsics,
    width_px: usize,
    height_px: usize,
    meters_per_pixel: (f64, f64),
) -> Result<Homography, SynthError> {
    let k_axis = pose.frame().column(2);
    let t = pose.position();
    if k_axis.dot(&t) / t.norm() >= -1e-9 {
        return Err(SynthError::BackFacing);
    }
    let r = pose.frame().matrix();
    let rt = Matrix3::from_columns(&[r.column(0).into_owned(), r.column(1).into_owned(), t]);
    let s = reference_to_plane(width_px, height_px, meters_per_pixel.0, meters_per_pixel.1);
    Ok(Homography::new(intrinsic_matrix(intrinsics) * rt * s)?)
}

pub fn induced_homography<D>(
    pose: &ScenePose,
    intrinsics: &CameraIntrinsics,
    obj: &ReferenceObject<D>,
) -> Result<Homography, SynthError> {
    induced_homography_for(
        pose,
        intrinsics,
        obj.width_px(),
        obj.height_px(),
        obj.meters_per_pixel(),
    )
}

/// Depth (meters) along the ray through `(u, v)` to the object plane.
pub fn ray_plane_depth(
    pose: &ScenePose,
    intrinsics: &CameraIntrinsics,
    u: f64,
    v: f64,
) -> Option<f64> {
    let ray = Vec3::new(
        (u - intrinsics.cx) / intrinsics.fx,
        (v - intrinsics.cy) / intrinsics.fy,
        1.0,
    );
    let n = pose.frame().column(2);
    let denom = n.dot(&ray);
    if denom.abs() < 1e-12 {
        return None;
    }
    let z = n.dot(&pose.position()) / denom;
    (z > 0.0).then_some(z)
}

fn bilinear(img: &RgbImage, x: f64, y: f64) -> [f64; 3] {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let x = x.clamp(0.0, w - 1.0);
    let y = y.clamp(0.0, h - 1.0);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let (a, b, c, d) = (
        img.get(x0, y0),
        img.get(x1, y0),
        img.get(x0, y1),
        img.get(x1, y1),
    );
    std::array::from_fn(|ch| {
        let top = a[ch] as f64 * (1.0 - fx) + b[ch] as f64 * fx;
        let bottom = c[ch] as f64 * (1.0 - fx) + d[ch] as f64 * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

/// Low-contrast gray tiles, 16 px on a side.
pub fn background(width: usize, height: usize, seed: u64) -> RgbImage {
    const TILE: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6267_6e64);
    let tiles_x = width.div_ceil(TILE);
    let tiles_y = height.div_ceil(TILE);
    let levels: Vec<u8> = (0..tiles_x * tiles_y)
        .map(|_| rng.random_range(112..=144))
        .collect();
    let mut img = RgbImage::filled(width, height, [0, 0, 0]);
    for y in 0..height {
        for x in 0..width {
            let g = levels[(y / TILE) * tiles_x + x / TILE];
            img.set(x, y, [g, g, g]);
        }
    }
    img
}

/// High-texture test card: overlapping rectangles, discs and triangles in
/// random colors.
pub fn generate_texture(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = [
        rng.random_range(0..=255u8),
        rng.random_range(0..=255u8),
        rng.random_range(0..=255u8),
    ];
    let mut img = RgbImage::filled(width, height, base);
    let shapes = (width * height / 150).max(20);
    let (wf, hf) = (width as f64, height as f64);
    for _ in 0..shapes {
        let color = [
            rng.random_range(0..=255u8),
            rng.random_range(0..=255u8),
            rng.random_range(0..=255u8),
        ];
        let cx = rng.random_range(0.0..wf);
        let cy = rng.random_range(0.0..hf);
        let size = rng.random_range(3.0..(wf.min(hf) / 5.0).max(4.0));
        match rng.random_range(0..3) {
            0 => {
                let aspect = rng.random_range(0.4..2.5);
                let (hw, hh) = (size * aspect / 2.0, size / aspect / 2.0);
                fill(&mut img, color, |x, y| {
                    (x - cx).abs() <= hw && (y - cy).abs() <= hh
                });
            }
            1 => {
                let r = size / 2.0;
                fill(&mut img, color, |x, y| {
                    (x - cx).powi(2) + (y - cy).powi(2) <= r * r
                });
            }
            _ => {
                let pts: [(f64, f64); 3] = std::array::from_fn(|_| {
                    (
                        cx + rng.random_range(-size..size),
                        cy + rng.random_range(-size..size),
                    )
                });
                fill(&mut img, color, |x, y| in_triangle((x, y), &pts));
            }
        }
    }
    img
}

fn fill(img: &mut RgbImage, color: [u8; 3], inside: impl Fn(f64, f64) -> bool) {
    for y in 0..img.height() {
        for x in 0..img.width() {
            if inside(x as f64, y as f64) {
                img.set(x, y, color);
            }
        }
    }
}

fn in_triangle(p: (f64, f64), t: &[(f64, f64); 3]) -> bool {
    let sign = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        (a.0 - c.0) * (b.1 - c.1) - (b.0 - c.0) * (a.1 - c.1)
    };
    let d1 = sign(p, t[0], t[1]);
    let d2 = sign(p, t[1], t[2]);
    let d3 = sign(p, t[2], t[0]);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

fn stream_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Renders several objects, nearest last.
pub fn render_scene<D>(
    placements: &[(ScenePose, &ReferenceObject<D>)],
    intrinsics: &CameraIntrinsics,
    noise: &RenderNoise,
) -> Result<SceneRender, SynthError> {
    intrinsics.validate()?;
    noise.validate()?;
    let (w, h) = (intrinsics.width, intrinsics.height);
    let mut color = background(w, h, noise.seed);
    let mut depth_m = vec![0.0f64; w * h];

    let mut homographies = Vec::with_capacity(placements.len());
    let mut order: Vec<usize> = (0..placements.len()).collect();
    for (pose, obj) in placements {
        homographies.push(induced_homography(pose, intrinsics, *obj)?);
    }
    order.sort_by(|&a, &b| {
        placements[b]
            .0
            .position()
            .norm()
            .total_cmp(&placements[a].0.position().norm())
    });

    for &idx in &order {
        let (pose, obj) = &placements[idx];
        let inv = homographies[idx].inverse()?;
        let (tw, th) = (obj.width_px() as f64, obj.height_px() as f64);
        let (u_range, v_range) = footprint(&homographies[idx], tw, th, w, h);
        for v in v_range {
            for u in u_range.clone() {
                let Ok([x, y]) = project(&inv, [u as f64, v as f64]) else {
                    continue;
                };
                if !(x >= -0.5 && x < tw - 0.5 && y >= -0.5 && y < th - 0.5) {
                    continue;
                }
                let Some(z) = ray_plane_depth(pose, intrinsics, u as f64, v as f64) else {
                    continue;
                };
                let c = bilinear(&obj.color, x, y);
                color.set(u, v, c.map(|ch| ch.round().clamp(0.0, 255.0) as u8));
                depth_m[v * w + u] = z;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(noise.seed, 1));
    if noise.pixel_noise_sigma > 0.0 {
        let n = Normal::new(0.0, noise.pixel_noise_sigma).expect("valid sigma");
        for y in 0..h {
            for x in 0..w {
                let e = n.sample(&mut rng);
                let p = color.get(x, y);
                color.set(
                    x,
                    y,
                    p.map(|ch| (ch as f64 + e).round().clamp(0.0, 255.0) as u8),
                );
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(noise.seed, 2));
    let depth_noise = (noise.depth_noise_mm > 0.0)
        .then(|| Normal::new(0.0, noise.depth_noise_mm).expect("valid sigma"));
    let depth_mm: Vec<u16> = depth_m
        .iter()
        .map(|&z| {
            if z <= 0.0 {
                return 0;
            }
            let mut mm = z * 1000.0;
            if let Some(n) = &depth_noise {
                mm += n.sample(&mut rng);
            }
            if noise.hole_rate > 0.0 && rng.random::<f64>() < noise.hole_rate {
                return 0;
            }
            mm.round().clamp(1.0, 65535.0) as u16
        })
        .collect();

    let gray = color.to_gray();
    let depth = DepthFrame::from_millimeters(*intrinsics, depth_mm)?;
    Ok(SceneRender {
        color,
        gray,
        depth,
        homographies,
    })
}

/// Frame pixel ranges covering the projected texture, or the whole frame
/// when a corner does not project in front of the camera.
fn footprint(
    h: &Homography,
    tw: f64,
    th: f64,
    w: usize,
    hgt: usize,
) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let m = h.matrix();
    let corners = [
        (-0.5, -0.5),
        (tw - 0.5, -0.5),
        (-0.5, th - 0.5),
        (tw - 0.5, th - 0.5),
    ];
    let sign = m[(2, 2)].signum();
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (x, y) in corners {
        let p = m * nalgebra::Vector3::new(x, y, 1.0);
        if p.z * sign <= 1e-12 {
            return (0..w, 0..hgt);
        }
        for (i, c) in [p.x / p.z, p.y / p.z].into_iter().enumerate() {
            lo[i] = lo[i].min(c);
            hi[i] = hi[i].max(c);
        }
    }
    let range = |lo: f64, hi: f64, n: usize| {
        let a = (lo.floor() - 1.0).clamp(0.0, n as f64) as usize;
        let b = (hi.ceil() + 2.0).clamp(0.0, n as f64) as usize;
        a..b
    };
    (range(lo[0], hi[0], w), range(lo[1], hi[1], hgt))
}

pub fn render<D>(
    pose: &ScenePose,
    obj: &ReferenceObject<D>,
    intrinsics: &CameraIntrinsics,
    noise: &RenderNoise,
) -> Result<RenderResult, SynthError> {
    let scene = render_scene(&[(*pose, obj)], intrinsics, noise)?;
    Ok(RenderResult {
        color: scene.color,
        gray: scene.gray,
        depth: scene.depth,
        ground_truth: *pose,
        homography: scene.homographies[0],
    })
}

/// Background only, no object.
pub fn render_empty(
    intrinsics: &CameraIntrinsics,
    noise: &RenderNoise,
) -> Result<SceneRender, SynthError> {
    render_scene::<()>(&[], intrinsics, noise)
}

/// Distance at which a frontal object appears at one frame pixel per
/// reference pixel.
pub fn unit_scale_distance<D>(obj: &ReferenceObject<D>, intrinsics: &CameraIntrinsics) -> f64 {
    intrinsics.fx * obj.meters_per_pixel().0
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub angles_deg: Vec<f64>,
    pub frames_per_angle: usize,
    /// `None` places the object at [`unit_scale_distance`].
    pub distance_m: Option<f64>,
    pub noise: RenderNoise,
    pub pose: PoseConfig,
    pub intrinsics: CameraIntrinsics,
    /// A frame counts as a detection when the estimate is present and its
    /// rotation error is at most this many degrees.
    pub success_rot_tol_deg: f64,
    /// Fraction of frames that must succeed for an angle to count as detected.
    pub success_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            angles_deg: (0..10).map(|i| i as f64 * 5.0).collect(),
            frames_per_angle: 1,
            distance_m: None,
            noise: RenderNoise::default(),
            pose: PoseConfig::default(),
            intrinsics: CameraIntrinsics::default(),
            success_rot_tol_deg: 10.0,
            success_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub present: bool,
    pub success: bool,
    pub num_matches: usize,
    pub rot_err_deg: f64,
    pub pos_err_m: f64,
    /// `(i |x|, x)` when a pose was found.
    pub x_pair: Option<(Vec3, Vec3)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub angle_deg: f64,
    pub detected: bool,
    pub frames: usize,
    pub successes: usize,
    /// Median over frames.
    pub num_matches: usize,
    /// Means over successful frames; NaN when there are none.
    pub rot_err_deg: f64,
    pub pos_err_m: f64,
    pub epsilon: f64,
}

pub const SWEEP_CSV_HEADER: &str = "angle_deg,detected,num_matches,rot_err_deg,pos_err_m,epsilon";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.angle_deg,
            self.detected,
            self.num_matches,
            fmt_metric(self.rot_err_deg),
            fmt_metric(self.pos_err_m),
            fmt_metric(self.epsilon)
        )
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.9e}")
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Renders and evaluates one frame of a sweep.
pub fn evaluate_frame<F: DetectorDescriptor>(
    obj: &ReferenceObject<F::Descriptor>,
    angle_deg: f64,
    frame_index: usize,
    detector: &F,
    cfg: &SweepConfig,
) -> Result<FrameOutcome, SynthError> {
    let distance = cfg
        .distance_m
        .unwrap_or_else(|| unit_scale_distance(obj, &cfg.intrinsics));
    let pose = ScenePose::out_of_plane(angle_deg, distance)?;
    let stream = (angle_deg.to_bits())
        .wrapping_mul(31)
        .wrapping_add(frame_index as u64);
    let noise = RenderNoise {
        seed: stream_seed(cfg.noise.seed, stream),
        ..cfg.noise
    };
    let missing = FrameOutcome {
        present: false,
        success: false,
        num_matches: 0,
        rot_err_deg: f64::NAN,
        pos_err_m: f64::NAN,
        x_pair: None,
    };
    let scene = match render(&pose, obj, &cfg.intrinsics, &noise) {
        Ok(s) => s,
        Err(SynthError::BackFacing) => return Ok(missing),
        Err(e) => return Err(e),
    };
    let mut pose_cfg = cfg.pose;
    pose_cfg.ransac.seed = stream_seed(cfg.pose.ransac.seed, stream);
    let est = estimate_pose(obj, &scene.gray, &scene.depth, detector, &pose_cfg)?;
    Ok(match est.pose() {
        Some(p) => {
            let rot_err_deg = p.frame.angle_to(pose.frame()).to_degrees();
            FrameOutcome {
                present: true,
                success: rot_err_deg <= cfg.success_rot_tol_deg,
                num_matches: p.num_matches,
                rot_err_deg,
                pos_err_m: (p.position - pose.position()).norm(),
                x_pair: Some(p.x_recalculation()),
            }
        }
        None => {
            let n = match &est {
                crate::pose::PoseEstimate::Absent(a) => a.num_matches,
                _ => 0,
            };
            FrameOutcome {
                num_matches: n,
                ..missing
            }
        }
    })
}

/// Renders `frames_per_angle` frames at each angle, runs the pose pipeline
/// and aggregates errors and the x-recalculation metric per angle.
pub fn sweep_out_of_plane<F: DetectorDescriptor>(
    obj: &ReferenceObject<F::Descriptor>,
    detector: &F,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>, SynthError> {
    if cfg.angles_deg.is_empty() {
        return Err(SynthError::BadSweep("no angles".into()));
    }
    if let Some(a) = cfg.angles_deg.iter().find(|a| !(a.abs() < 90.0)) {
        return Err(SynthError::BadSweep(format!("angle {a} outside (-90, 90)")));
    }
    if cfg.frames_per_angle == 0 {
        return Err(SynthError::BadSweep(
            "frames_per_angle must be at least 1".into(),
        ));
    }
    if !(cfg.success_fraction > 0.0 && cfg.success_fraction <= 1.0) {
        return Err(SynthError::BadSweep(
            "success_fraction must lie in (0, 1]".into(),
        ));
    }
    cfg.noise.validate()?;

    let jobs: Vec<(usize, usize)> = (0..cfg.angles_deg.len())
        .flat_map(|a| (0..cfg.frames_per_angle).map(move |f| (a, f)))
        .collect();
    let outcomes: Vec<FrameOutcome> = jobs
        .par_iter()
        .map(|&(a, f)| evaluate_frame(obj, cfg.angles_deg[a], f, detector, cfg))
        .collect::<Result<_, _>>()?;

    let rows = outcomes
        .chunks(cfg.frames_per_angle)
        .zip(&cfg.angles_deg)
        .map(|(frames, &angle_deg)| aggregate(angle_deg, frames, cfg.success_fraction))
        .collect();
    Ok(rows)
}

fn aggregate(angle_deg: f64, frames: &[FrameOutcome], success_fraction: f64) -> SweepRow {
    let ok: Vec<&FrameOutcome> = frames.iter().filter(|f| f.success).collect();
    let mut matches: Vec<usize> = frames.iter().map(|f| f.num_matches).collect();
    matches.sort_unstable();
    let mean = |v: Vec<f64>| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let pairs: Vec<(Vec3, Vec3)> = ok.iter().filter_map(|f| f.x_pair).collect();
    SweepRow {
        angle_deg,
        detected: ok.len() as f64 >= success_fraction * frames.len() as f64 - 1e-9,
        frames: frames.len(),
        successes: ok.len(),
        num_matches: matches[matches.len() / 2],
        rot_err_deg: mean(ok.iter().map(|f| f.rot_err_deg).collect()),
        pos_err_m: mean(ok.iter().map(|f| f.pos_err_m).collect()),
        epsilon: epsilon_metric(&pairs).unwrap_or(f64::NAN),
    }
}

/// Largest angle of the contiguous run of detected rows starting at the
/// smallest angle (rows are taken in ascending angle order).
pub fn max_out_of_plane_angle(rows: &[SweepRow]) -> Option<f64> {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.angle_deg.total_cmp(&b.angle_deg));
    let mut best = None;
    for r in sorted {
        if !r.detected {
            break;
        }
        best = Some(r.angle_deg);
    }
    best
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (average ranks for ties); `None` for fewer than
/// two points or a constant series.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}
