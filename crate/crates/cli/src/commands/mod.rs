//! Subcommands.

pub mod bench;
pub mod detect;
pub mod grasp;
pub mod scene;
pub mod sweep;
pub mod train;

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use planograsp::features::FastBrief;
use planograsp::homography::RansacConfig;
use planograsp::pose::PoseConfig;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "planograsp",
    version,
    about = "Planar object pose estimation and grasp transfer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract features from a texture image and write an object bundle.
    Train(train::TrainArgs),
    /// Detect bundled objects in one RGB-D frame (or a watched directory).
    Detect(detect::DetectArgs),
    /// Render an out-of-plane sweep of a bundle and write the error table.
    EvalSweep(sweep::SweepArgs),
    /// Time detection against 1..N objects.
    Bench(bench::BenchArgs),
    /// Record a canonical grasp in the object frame.
    GraspTrain(grasp::GraspTrainArgs),
    /// Re-target a canonical grasp to a new object pose.
    GraspAdapt(grasp::GraspAdaptArgs),
    /// Render a synthetic RGB-D frame of a bundle.
    Synth(scene::SynthArgs),
    /// Write a seeded high-texture test card.
    MakeTexture(scene::TextureArgs),
}

/// Matching and robust-fit flags shared by detection commands.
#[derive(Debug, Clone, Args)]
pub struct MatchFlags {
    /// RANSAC seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ratio-test threshold.
    #[arg(long, default_value_t = planograsp::features::DEFAULT_RATIO)]
    pub ratio: f64,
    /// RANSAC inlier threshold in pixels.
    #[arg(long, default_value_t = 3.0)]
    pub ransac_threshold: f64,
    /// Matches required to declare the object present.
    #[arg(long, default_value_t = planograsp::features::MIN_MATCHES)]
    pub min_matches: usize,
}

impl Default for MatchFlags {
    fn default() -> Self {
        Self {
            seed: 0,
            ratio: planograsp::features::DEFAULT_RATIO,
            ransac_threshold: 3.0,
            min_matches: planograsp::features::MIN_MATCHES,
        }
    }
}

impl MatchFlags {
    pub fn detector(&self) -> Result<FastBrief, CliError> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(CliError::Config(format!(
                "--ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        Ok(FastBrief {
            ratio: self.ratio,
            ..FastBrief::default()
        })
    }

    pub fn pose_config(&self) -> Result<PoseConfig, CliError> {
        let ransac = RansacConfig {
            reprojection_threshold: self.ransac_threshold,
            seed: self.seed,
            min_inliers: self.min_matches,
            ..RansacConfig::default()
        };
        ransac
            .validate()
            .map_err(|e| CliError::config("ransac", e))?;
        if self.min_matches < 4 {
            return Err(CliError::Config(format!(
                "--min-matches must be at least 4, got {}",
                self.min_matches
            )));
        }
        Ok(PoseConfig {
            ransac,
            min_matches: self.min_matches,
        })
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => train::run(&a, out),
        Command::Detect(a) => detect::run(&a, out),
        Command::EvalSweep(a) => sweep::run(&a, out),
        Command::Bench(a) => bench::run(&a, out),
        Command::GraspTrain(a) => grasp::run_train(&a, out),
        Command::GraspAdapt(a) => grasp::run_adapt(&a, out),
        Command::Synth(a) => scene::run_synth(&a, out),
        Command::MakeTexture(a) => scene::run_texture(&a, out),
    }
}

pub(crate) fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("stdout", e))
}
