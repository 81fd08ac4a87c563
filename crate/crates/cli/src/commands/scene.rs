use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use planograsp::geometry::{RigidTransform, RotationMatrix, Vec3};
use planograsp::image::{write_pgm16, write_ppm};
use planograsp::pose::CameraIntrinsics;
use planograsp::synth::{generate_texture, render_empty, render_scene, RenderNoise, ScenePose};

use super::write_out;
use crate::bundle::load_bundle;
use crate::config::load_camera;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Bundles to place in the scene; none renders the background only.
    #[arg(long = "bundle")]
    pub bundles: Vec<PathBuf>,
    /// Camera file; defaults to a 640x480, f = 525 camera.
    #[arg(long)]
    pub intrinsics: Option<PathBuf>,
    /// Out-of-plane tilt about the object y axis, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub angle: f64,
    /// In-plane rotation about the object normal, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub roll: f64,
    /// Object distance along the optical axis, meters.
    #[arg(long, default_value_t = 1.0)]
    pub distance: f64,
    /// Horizontal spacing between objects, meters.
    #[arg(long, default_value_t = 0.5)]
    pub spacing: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub depth_noise_mm: f64,
    #[arg(long, default_value_t = 0.0)]
    pub hole_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub rgb_out: PathBuf,
    #[arg(long)]
    pub depth_out: PathBuf,
    /// Write each object's ground-truth `T_camera^object` here, one file per
    /// bundle with the bundle index appended when there are several.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TextureArgs {
    #[arg(long, default_value_t = 320)]
    pub width: usize,
    #[arg(long, default_value_t = 240)]
    pub height: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Objects side by side along x, centered on the optical axis.
pub fn scene_poses(
    count: usize,
    angle_deg: f64,
    roll_deg: f64,
    distance: f64,
    spacing: f64,
) -> Result<Vec<ScenePose>, CliError> {
    let rot = RotationMatrix::rot_x(std::f64::consts::PI)
        .mul(&RotationMatrix::rot_y(angle_deg.to_radians()))
        .mul(&RotationMatrix::rot_z(roll_deg.to_radians()));
    (0..count)
        .map(|i| {
            let x = (i as f64 - (count as f64 - 1.0) / 2.0) * spacing;
            ScenePose::new(RigidTransform::new(rot, Vec3::new(x, 0.0, distance)))
                .map_err(|e| CliError::config("pose", e))
        })
        .collect()
}

pub fn run_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let intrinsics = match &args.intrinsics {
        Some(p) => load_camera(p)?.intrinsics,
        None => CameraIntrinsics::default(),
    };
    let noise = RenderNoise {
        pixel_noise_sigma: args.noise_sigma,
        depth_noise_mm: args.depth_noise_mm,
        hole_rate: args.hole_rate,
        seed: args.seed,
    };
    let objects = args
        .bundles
        .iter()
        .map(|b| load_bundle(b))
        .collect::<Result<Vec<_>, _>>()?;
    let poses = scene_poses(
        objects.len(),
        args.angle,
        args.roll,
        args.distance,
        args.spacing,
    )?;
    let scene = if objects.is_empty() {
        render_empty(&intrinsics, &noise)
    } else {
        let placements: Vec<_> = poses.iter().copied().zip(objects.iter()).collect();
        render_scene(&placements, &intrinsics, &noise)
    }
    .map_err(|e| CliError::config("render", e))?;
    write_ppm(&args.rgb_out, &scene.color).map_err(|e| CliError::io(args.rgb_out.display(), e))?;
    write_pgm16(&args.depth_out, &scene.depth.to_image())
        .map_err(|e| CliError::io(args.depth_out.display(), e))?;
    if let Some(path) = &args.truth_out {
        for (i, p) in poses.iter().enumerate() {
            let target = if poses.len() == 1 {
                path.clone()
            } else {
                let mut name = path.as_os_str().to_owned();
                name.push(format!(".{i}"));
                PathBuf::from(name)
            };
            std::fs::write(&target, p.camera_to_object.to_string())
                .map_err(|e| CliError::io(target.display(), e))?;
        }
    }
    write_out(out, &format!("rendered {} object(s)\n", objects.len()))
}

pub fn run_texture(args: &TextureArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.width < 8 || args.height < 8 {
        return Err(CliError::Config("texture must be at least 8x8".into()));
    }
    let img = generate_texture(args.width, args.height, args.seed);
    write_ppm(&args.out, &img).map_err(|e| CliError::io(args.out.display(), e))?;
    write_out(
        out,
        &format!("wrote {}x{} texture\n", args.width, args.height),
    )
}
