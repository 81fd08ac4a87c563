use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Args;
use planograsp::features::{BinaryDescriptor, DetectorDescriptor, FastBrief};
use planograsp::geometry::{EulerAngles, RigidTransform};
use planograsp::grasp::pose_to_transform;
use planograsp::image::{read_pnm, write_ppm, RgbImage};
use planograsp::pose::{
    estimate_pose_with_features, overlay_axes, DepthFrame, PoseConfig, PoseEstimate,
    ReferenceObject,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{write_out, MatchFlags};
use crate::bundle::load_bundle;
use crate::config::{load_camera, Camera};
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Object bundle directories; one record is printed per bundle, in order.
    #[arg(long = "bundle", required = true)]
    pub bundles: Vec<PathBuf>,
    /// Color frame (PPM or PGM).
    #[arg(long, required_unless_present = "watch")]
    pub rgb: Option<PathBuf>,
    /// Depth frame, 16-bit PGM in millimeters (0 = invalid).
    #[arg(long, required_unless_present = "watch")]
    pub depth: Option<PathBuf>,
    /// Camera file (TOML).
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Write the color frame with projected object axes.
    #[arg(long, conflicts_with = "watch")]
    pub overlay: Option<PathBuf>,
    /// Axis length for the overlay, meters.
    #[arg(long, default_value_t = 0.1)]
    pub axis_length: f64,
    /// Process `<name>.ppm` + `<name>.pgm` pairs as they appear in this directory.
    #[arg(long)]
    pub watch: Option<PathBuf>,
    /// Stop watching after this many frames.
    #[arg(long, requires = "watch")]
    pub max_frames: Option<usize>,
    /// Directory polling interval, milliseconds.
    #[arg(long, default_value_t = 200)]
    pub poll_ms: u64,
    #[command(flatten)]
    pub flags: MatchFlags,
}

/// One detection result, serialized as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub frame: String,
    pub object_id: String,
    pub present: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub num_matches: usize,
    pub num_inliers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_m: Option<[f64; 3]>,
    /// Object axes as columns, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 9]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_rad: Option<EulerAngles>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gimbal_lock: Option<bool>,
    /// `T_camera^object`, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_to_object: Option<[f64; 16]>,
    /// `T_base^object`, present when the camera file has an extrinsic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_to_object: Option<[f64; 16]>,
}

impl PoseRecord {
    pub fn new(
        frame: &str,
        object_id: &str,
        est: &PoseEstimate,
        camera_to_base: Option<&RigidTransform>,
    ) -> Self {
        let mut rec = PoseRecord {
            frame: frame.to_string(),
            object_id: object_id.to_string(),
            present: false,
            reason: None,
            num_matches: 0,
            num_inliers: 0,
            position_m: None,
            rotation: None,
            euler_rad: None,
            gimbal_lock: None,
            camera_to_object: None,
            base_to_object: None,
        };
        match est {
            PoseEstimate::Absent(a) => {
                rec.reason = Some(a.reason.as_str().to_string());
                rec.num_matches = a.num_matches;
                rec.num_inliers = a.num_inliers;
            }
            PoseEstimate::Present(p) => {
                rec.present = true;
                rec.num_matches = p.num_matches;
                rec.num_inliers = p.num_inliers;
                rec.position_m = Some([p.position.x, p.position.y, p.position.z]);
                rec.rotation = Some(std::array::from_fn(|i| p.frame.at(i / 3, i % 3)));
                rec.euler_rad = Some(p.euler);
                rec.gimbal_lock = Some(p.degenerate);
                rec.camera_to_object =
                    Some(RigidTransform::new(p.frame, p.position).to_row_major());
                if let Some(ext) = camera_to_base {
                    rec.base_to_object = pose_to_transform(p, Some(ext))
                        .ok()
                        .map(|t| t.to_row_major());
                }
            }
        }
        rec
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records serialize");
        s.push('\n');
        s
    }
}

/// Extracts frame features once and estimates every object's pose, in
/// parallel, returning results in input order with per-object wall time.
pub fn detect_objects(
    objects: &[ReferenceObject<BinaryDescriptor>],
    gray: &planograsp::image::GrayImage,
    depth: &DepthFrame,
    detector: &FastBrief,
    cfg: &PoseConfig,
) -> Result<Vec<(PoseEstimate, Duration)>, CliError> {
    if (gray.width(), gray.height()) != (depth.width(), depth.height()) {
        return Err(CliError::Config(format!(
            "color frame is {}x{} but depth is {}x{}",
            gray.width(),
            gray.height(),
            depth.width(),
            depth.height()
        )));
    }
    let frame = detector.extract(gray);
    Ok(objects
        .par_iter()
        .map(|obj| {
            let t = Instant::now();
            let est = estimate_pose_with_features(obj, &frame, depth, detector, cfg);
            (est, t.elapsed())
        })
        .collect())
}

pub struct Frame {
    pub name: String,
    pub color: RgbImage,
    pub depth: DepthFrame,
}

pub fn load_frame(rgb: &Path, depth: &Path, camera: &Camera) -> Result<Frame, CliError> {
    let color = read_pnm(rgb)
        .and_then(|p| p.into_rgb())
        .map_err(|e| CliError::io(rgb.display(), e))?;
    let depth_img = read_pnm(depth)
        .and_then(|p| p.into_gray16())
        .map_err(|e| CliError::io(depth.display(), e))?;
    let depth = DepthFrame::new(camera.intrinsics, depth_img)
        .map_err(|e| CliError::config(depth.display(), e))?;
    Ok(Frame {
        name: rgb
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        color,
        depth,
    })
}

fn process(
    frame: &Frame,
    objects: &[ReferenceObject<BinaryDescriptor>],
    camera: &Camera,
    detector: &FastBrief,
    cfg: &PoseConfig,
    out: &mut dyn Write,
) -> Result<Vec<PoseEstimate>, CliError> {
    let gray = frame.color.to_gray();
    let results = detect_objects(objects, &gray, &frame.depth, detector, cfg)?;
    let mut text = String::new();
    let mut estimates = Vec::with_capacity(results.len());
    for (obj, (est, dt)) in objects.iter().zip(results) {
        eprintln!(
            "{} {}: {:.3} ms",
            frame.name,
            obj.id,
            dt.as_secs_f64() * 1e3
        );
        text.push_str(
            &PoseRecord::new(&frame.name, &obj.id, &est, camera.camera_to_base.as_ref())
                .to_json_line(),
        );
        estimates.push(est);
    }
    write_out(out, &text)?;
    out.flush().map_err(|e| CliError::io("stdout", e))?;
    Ok(estimates)
}

pub fn run(args: &DetectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let detector = args.flags.detector()?;
    let cfg = args.flags.pose_config()?;
    if !(args.axis_length > 0.0) {
        return Err(CliError::Config("--axis-length must be positive".into()));
    }
    let camera = load_camera(&args.intrinsics)?;
    let objects = args
        .bundles
        .iter()
        .map(|b| load_bundle(b))
        .collect::<Result<Vec<_>, _>>()?;

    if let Some(dir) = &args.watch {
        return watch(dir, args, &objects, &camera, &detector, &cfg, out);
    }
    let (Some(rgb), Some(depth)) = (&args.rgb, &args.depth) else {
        return Err(CliError::Config("--rgb and --depth are required".into()));
    };
    let frame = load_frame(rgb, depth, &camera)?;
    let estimates = process(&frame, &objects, &camera, &detector, &cfg, out)?;
    if let Some(path) = &args.overlay {
        let mut img = frame.color.clone();
        for est in &estimates {
            if let Some(p) = est.pose() {
                img = overlay_axes(&img, p, &camera.intrinsics, args.axis_length);
            }
        }
        write_ppm(path, &img).map_err(|e| CliError::io(path.display(), e))?;
    }
    Ok(())
}

fn watch(
    dir: &Path,
    args: &DetectArgs,
    objects: &[ReferenceObject<BinaryDescriptor>],
    camera: &Camera,
    detector: &FastBrief,
    cfg: &PoseConfig,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut done = BTreeSet::new();
    loop {
        let mut pending = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir.display(), e))? {
            let path = entry.map_err(|e| CliError::io(dir.display(), e))?.path();
            if path.extension().is_some_and(|e| e == "ppm") {
                let depth = path.with_extension("pgm");
                if depth.exists() && !done.contains(&path) {
                    pending.push((path, depth));
                }
            }
        }
        pending.sort();
        for (rgb, depth) in pending {
            // A frame that fails to decode may still be being written.
            let frame = match load_frame(&rgb, &depth, camera) {
                Ok(f) => f,
                Err(e @ CliError::Config(_)) => return Err(e),
                Err(_) => continue,
            };
            process(&frame, objects, camera, detector, cfg, out)?;
            done.insert(rgb);
            if args.max_frames.is_some_and(|m| done.len() >= m) {
                return Ok(());
            }
        }
        std::thread::sleep(Duration::from_millis(args.poll_ms));
    }
}
