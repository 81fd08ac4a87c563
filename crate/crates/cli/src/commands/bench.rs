use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use planograsp::features::{BinaryDescriptor, DetectorDescriptor, FastBrief};
use planograsp::image::GrayImage;
use planograsp::pose::{estimate_pose_with_features, DepthFrame, PoseConfig, ReferenceObject};

use super::detect::load_frame;
use super::{write_out, MatchFlags};
use crate::bundle::load_bundle;
use crate::config::load_camera;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Object bundles; row n times detection of the first n.
    #[arg(long = "bundle", required = true)]
    pub bundles: Vec<PathBuf>,
    #[arg(long)]
    pub rgb: PathBuf,
    #[arg(long)]
    pub depth: PathBuf,
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Timed runs per object count.
    #[arg(long, default_value_t = 11)]
    pub repetitions: usize,
    #[command(flatten)]
    pub flags: MatchFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub objects: usize,
    pub median_ms: f64,
}

/// Median wall time of one frame's detection (feature extraction plus every
/// object's pose) for 1..=N objects. Objects run one after another so the
/// time reflects total work.
pub fn bench_timings(
    objects: &[ReferenceObject<BinaryDescriptor>],
    gray: &GrayImage,
    depth: &DepthFrame,
    detector: &FastBrief,
    cfg: &PoseConfig,
    repetitions: usize,
) -> Vec<BenchRow> {
    let run = |n: usize| {
        let t = Instant::now();
        let frame = detector.extract(gray);
        for obj in &objects[..n] {
            std::hint::black_box(estimate_pose_with_features(
                obj, &frame, depth, detector, cfg,
            ));
        }
        t.elapsed().as_secs_f64() * 1e3
    };
    run(objects.len());
    let mut samples = vec![Vec::with_capacity(repetitions); objects.len()];
    for _ in 0..repetitions {
        for n in 1..=objects.len() {
            samples[n - 1].push(run(n));
        }
    }
    samples
        .into_iter()
        .enumerate()
        .map(|(i, mut s)| {
            s.sort_by(f64::total_cmp);
            let m = s.len() / 2;
            let median_ms = if s.len() % 2 == 1 {
                s[m]
            } else {
                (s[m - 1] + s[m]) / 2.0
            };
            BenchRow {
                objects: i + 1,
                median_ms,
            }
        })
        .collect()
}

/// Coefficient of determination of the least-squares line; `None` with fewer
/// than two points or no spread in either variable.
pub fn r_squared(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy * sxy / (sxx * syy))
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = String::from("objects,median_ms\n");
    for r in rows {
        s.push_str(&format!("{},{:.3}\n", r.objects, r.median_ms));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.objects as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.median_ms).collect();
    match r_squared(&xs, &ys) {
        Some(r2) => s.push_str(&format!("r_squared: {r2:.4}\n")),
        None => s.push_str("r_squared: n/a\n"),
    }
    s
}

pub fn run(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.repetitions == 0 {
        return Err(CliError::Config("--repetitions must be at least 1".into()));
    }
    let detector = args.flags.detector()?;
    let cfg = args.flags.pose_config()?;
    let camera = load_camera(&args.intrinsics)?;
    let objects = args
        .bundles
        .iter()
        .map(|b| load_bundle(b))
        .collect::<Result<Vec<_>, _>>()?;
    let frame = load_frame(&args.rgb, &args.depth, &camera)?;
    let gray = frame.color.to_gray();
    if (gray.width(), gray.height()) != (frame.depth.width(), frame.depth.height()) {
        return Err(CliError::Config("color and depth sizes differ".into()));
    }
    let rows = bench_timings(
        &objects,
        &gray,
        &frame.depth,
        &detector,
        &cfg,
        args.repetitions,
    );
    write_out(out, &format_table(&rows))
}
