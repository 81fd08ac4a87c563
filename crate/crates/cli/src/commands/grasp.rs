use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use planograsp::geometry::{fmt_f64, RigidTransform};
use planograsp::grasp::{
    adapt_grasp, grasp_orientation, train_grasp, CanonicalGrasp, GraspLibrary,
};

use super::detect::PoseRecord;
use super::write_out;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct GraspTrainArgs {
    /// Grasp library (JSON); created if missing.
    #[arg(long)]
    pub library: PathBuf,
    #[arg(long)]
    pub object_id: String,
    #[arg(long)]
    pub grasp_id: String,
    /// Object pose: a 4x4 transform file or `detect` output; `-` reads stdin.
    #[arg(long)]
    pub object_pose: PathBuf,
    /// Gripper wrist pose in the base frame (4x4 transform file).
    #[arg(long)]
    pub gripper: PathBuf,
    /// Replace an existing grasp with the same ids.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GraspAdaptArgs {
    #[arg(long)]
    pub library: PathBuf,
    #[arg(long)]
    pub object_id: String,
    #[arg(long)]
    pub grasp_id: String,
    /// New object pose: a 4x4 transform file or `detect` output; `-` reads stdin.
    #[arg(long)]
    pub object_pose: PathBuf,
}

fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::io("stdin", e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
    }
}

/// Parses an object pose from transform text or from `detect` JSON lines,
/// where the first present record for `object_id` is used (base frame when
/// available, camera frame otherwise).
pub fn parse_pose_source(text: &str, object_id: &str) -> Result<RigidTransform, CliError> {
    if !text.trim_start().starts_with('{') {
        return text
            .parse::<RigidTransform>()
            .map_err(|e| CliError::config("object pose", e));
    }
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let rec: PoseRecord =
            serde_json::from_str(line).map_err(|e| CliError::config("pose record", e))?;
        if rec.object_id != object_id || !rec.present {
            continue;
        }
        let values = rec.base_to_object.or(rec.camera_to_object).ok_or_else(|| {
            CliError::Config(format!("record for `{object_id}` has no transform"))
        })?;
        return RigidTransform::from_row_major(&values)
            .map_err(|e| CliError::config("pose record", e));
    }
    Err(CliError::NotFound(format!(
        "no present pose for object `{object_id}`"
    )))
}

fn load_transform(path: &Path) -> Result<RigidTransform, CliError> {
    read_source(path)?
        .parse::<RigidTransform>()
        .map_err(|e| CliError::config(path.display(), e))
}

pub fn format_adapted(t: &RigidTransform) -> String {
    let rpy = grasp_orientation(t);
    format!(
        "{t}# rpy gamma={} beta={} alpha={} gimbal_lock={}\n",
        fmt_f64(rpy.gamma),
        fmt_f64(rpy.beta),
        fmt_f64(rpy.alpha),
        rpy.gimbal_lock
    )
}

pub fn run_train(args: &GraspTrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let base_to_object = parse_pose_source(&read_source(&args.object_pose)?, &args.object_id)?;
    let base_to_gripper = load_transform(&args.gripper)?;
    let mut lib = GraspLibrary::load(&args.library)?;
    let grasp = CanonicalGrasp {
        object_id: args.object_id.clone(),
        grasp_id: args.grasp_id.clone(),
        object_to_gripper: train_grasp(&base_to_object, &base_to_gripper),
    };
    lib.insert(grasp.clone(), args.force)?;
    lib.save(&args.library)?;
    write_out(out, &grasp.object_to_gripper.to_string())
}

pub fn run_adapt(args: &GraspAdaptArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let lib = GraspLibrary::load(&args.library)?;
    let grasp = lib.get(&args.object_id, &args.grasp_id)?;
    let base_to_object = parse_pose_source(&read_source(&args.object_pose)?, &args.object_id)?;
    write_out(out, &format_adapted(&adapt_grasp(&base_to_object, &grasp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use planograsp::geometry::RotationMatrix;

    #[test]
    fn transform_text_source() {
        let t = RigidTransform::new(
            RotationMatrix::rot_z(0.3),
            planograsp::geometry::Vec3::new(1.0, 2.0, 3.0),
        );
        assert_eq!(parse_pose_source(&t.to_string(), "any").unwrap(), t);
        assert_eq!(
            parse_pose_source("1 2 3", "any").unwrap_err().exit_code(),
            4
        );
    }

    #[test]
    fn record_source_prefers_base_frame() {
        let cam = RigidTransform::from_translation(0.0, 0.0, 1.0).to_row_major();
        let base = RigidTransform::from_translation(0.5, 0.0, 0.2).to_row_major();
        let absent = r#"{"frame":"f","object_id":"a","present":false,"reason":"no_consensus","num_matches":3,"num_inliers":0}"#;
        let present = format!(
            r#"{{"frame":"f","object_id":"a","present":true,"num_matches":30,"num_inliers":25,"camera_to_object":{:?},"base_to_object":{:?}}}"#,
            cam, base
        );
        let text = format!("{absent}\n{present}\n");
        assert_eq!(
            parse_pose_source(&text, "a").unwrap(),
            RigidTransform::from_translation(0.5, 0.0, 0.2)
        );
        assert_eq!(parse_pose_source(absent, "a").unwrap_err().exit_code(), 6);
        assert_eq!(parse_pose_source(&text, "b").unwrap_err().exit_code(), 6);
    }
}
