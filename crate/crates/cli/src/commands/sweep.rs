use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use planograsp::pose::CameraIntrinsics;
use planograsp::synth::{
    max_out_of_plane_angle, sweep_csv, sweep_out_of_plane, RenderNoise, SweepConfig, SweepRow,
};

use super::{write_out, MatchFlags};
use crate::bundle::load_bundle;
use crate::config::{load_camera, load_sweep, SweepFile};
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Object bundle directory.
    #[arg(long)]
    pub bundle: PathBuf,
    /// Sweep settings (TOML); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Camera file; defaults to a 640x480, f = 525 camera.
    #[arg(long)]
    pub intrinsics: Option<PathBuf>,
    /// Comma-separated angles in degrees (default 0,5,...,45).
    #[arg(long)]
    pub angles: Option<String>,
    /// Rendered frames per angle.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Object distance in meters; defaults to native texture resolution.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Intensity noise standard deviation, gray levels.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Depth noise standard deviation, millimeters.
    #[arg(long)]
    pub depth_noise_mm: Option<f64>,
    /// Fraction of object depth pixels dropped.
    #[arg(long)]
    pub hole_rate: Option<f64>,
    /// Render seed.
    #[arg(long)]
    pub render_seed: Option<u64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub flags: MatchFlags,
}

pub fn parse_angles(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::config(format!("angle `{s}`"), e))
        })
        .collect()
}

pub fn build_config(
    args: &SweepArgs,
    file: &SweepFile,
    intrinsics: CameraIntrinsics,
) -> Result<SweepConfig, CliError> {
    let defaults = SweepConfig::default();
    let angles_deg = match &args.angles {
        Some(text) => parse_angles(text)?,
        None => file.angles_deg.clone().unwrap_or(defaults.angles_deg),
    };
    if angles_deg.is_empty() {
        return Err(CliError::Config("angle list is empty".into()));
    }
    let noise = RenderNoise {
        pixel_noise_sigma: args.noise_sigma.or(file.pixel_noise_sigma).unwrap_or(0.0),
        depth_noise_mm: args.depth_noise_mm.or(file.depth_noise_mm).unwrap_or(0.0),
        hole_rate: args.hole_rate.or(file.hole_rate).unwrap_or(0.0),
        seed: args.render_seed.or(file.seed).unwrap_or(0),
    };
    noise.validate().map_err(|e| CliError::config("noise", e))?;
    let distance_m = args.distance.or(file.distance_m);
    if let Some(d) = distance_m {
        if !(d > 0.0 && d.is_finite()) {
            return Err(CliError::Config(format!(
                "distance must be positive, got {d}"
            )));
        }
    }
    Ok(SweepConfig {
        angles_deg,
        frames_per_angle: args
            .frames
            .or(file.frames_per_angle)
            .unwrap_or(defaults.frames_per_angle),
        distance_m,
        noise,
        pose: args.flags.pose_config()?,
        intrinsics,
        success_rot_tol_deg: file
            .success_rot_tol_deg
            .unwrap_or(defaults.success_rot_tol_deg),
        success_fraction: file.success_fraction.unwrap_or(defaults.success_fraction),
    })
}

pub fn summary_line(rows: &[SweepRow]) -> String {
    match max_out_of_plane_angle(rows) {
        Some(a) => format!("max_out_of_plane_deg: {a}\n"),
        None => "max_out_of_plane_deg: none\n".to_string(),
    }
}

pub fn run(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &args.config {
        Some(p) => load_sweep(p)?,
        None => SweepFile::default(),
    };
    let intrinsics = match &args.intrinsics {
        Some(p) => load_camera(p)?.intrinsics,
        None => CameraIntrinsics::default(),
    };
    let cfg = build_config(args, &file, intrinsics)?;
    let detector = args.flags.detector()?;
    let obj = load_bundle(&args.bundle)?;
    let rows =
        sweep_out_of_plane(&obj, &detector, &cfg).map_err(|e| CliError::config("sweep", e))?;
    let csv = sweep_csv(&rows);
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| CliError::io(path.display(), e))?;
            write_out(out, &summary_line(&rows))
        }
        None => {
            write_out(out, &csv)?;
            eprint!("{}", summary_line(&rows));
            Ok(())
        }
    }
}
