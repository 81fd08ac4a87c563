use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use planograsp::features::{FastBrief, MIN_MATCHES};
use planograsp::image::read_pnm;
use planograsp::pose::ReferenceObject;

use super::write_out;
use crate::bundle::save_bundle;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Texture image (PPM color or PGM gray).
    #[arg(long)]
    pub image: PathBuf,
    /// Bundle directory to create.
    #[arg(long)]
    pub out: PathBuf,
    /// Object id; defaults to the image file stem.
    #[arg(long)]
    pub id: Option<String>,
    /// Physical width of the texture in meters.
    #[arg(long)]
    pub width_m: Option<f64>,
    /// Physical height of the texture in meters; defaults to square pixels.
    #[arg(long)]
    pub height_m: Option<f64>,
    /// Segment-test intensity threshold.
    #[arg(long, default_value_t = 20)]
    pub threshold: u8,
    /// Keep at most this many keypoints.
    #[arg(long, default_value_t = planograsp::features::DEFAULT_MAX_KEYPOINTS)]
    pub max_keypoints: usize,
}

pub fn run(args: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    for (name, v) in [("--width-m", args.width_m), ("--height-m", args.height_m)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
    }
    if args.threshold == 0 || args.max_keypoints == 0 {
        return Err(CliError::Config(
            "--threshold and --max-keypoints must be positive".into(),
        ));
    }
    let color = read_pnm(&args.image)
        .and_then(|p| p.into_rgb())
        .map_err(|e| CliError::io(args.image.display(), e))?;
    let id = match &args.id {
        Some(id) => id.clone(),
        None => args
            .image
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "object".into()),
    };
    let detector = FastBrief {
        threshold: args.threshold,
        max_keypoints: args.max_keypoints,
        ..FastBrief::default()
    };
    let obj = ReferenceObject::train(id, color, &detector, args.width_m, args.height_m);
    let n = obj.features.len();
    if n < MIN_MATCHES {
        return Err(CliError::Untrainable(format!(
            "{}: {n} keypoints, at least {MIN_MATCHES} are needed",
            args.image.display()
        )));
    }
    save_bundle(&args.out, &obj)?;
    write_out(out, &format!("keypoints: {n}\n"))
}
