//! TOML camera and sweep settings.

use std::path::Path;

use planograsp::geometry::RigidTransform;
use planograsp::pose::CameraIntrinsics;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Camera file: pinhole intrinsics plus an optional camera-to-base extrinsic
/// (16 numbers, row-major, `T_base^camera`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_to_base: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub intrinsics: CameraIntrinsics,
    pub camera_to_base: Option<RigidTransform>,
}

impl CameraFile {
    pub fn from_camera(
        intrinsics: &CameraIntrinsics,
        camera_to_base: Option<&RigidTransform>,
    ) -> Self {
        Self {
            fx: intrinsics.fx,
            fy: intrinsics.fy,
            cx: intrinsics.cx,
            cy: intrinsics.cy,
            width: intrinsics.width,
            height: intrinsics.height,
            camera_to_base: camera_to_base.map(|t| t.to_row_major().to_vec()),
        }
    }

    pub fn into_camera(self) -> Result<Camera, CliError> {
        let intrinsics = CameraIntrinsics {
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
            width: self.width,
            height: self.height,
        };
        intrinsics
            .validate()
            .map_err(|e| CliError::config("intrinsics", e))?;
        let camera_to_base = match self.camera_to_base {
            Some(v) => Some(
                RigidTransform::from_row_major(&v)
                    .map_err(|e| CliError::config("camera_to_base", e))?,
            ),
            None => None,
        };
        Ok(Camera {
            intrinsics,
            camera_to_base,
        })
    }
}

pub fn parse_camera(text: &str) -> Result<Camera, CliError> {
    let file: CameraFile = toml::from_str(text).map_err(|e| CliError::config("camera file", e))?;
    file.into_camera()
}

pub fn load_camera(path: &Path) -> Result<Camera, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    parse_camera(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn save_camera(path: &Path, camera: &CameraFile) -> Result<(), CliError> {
    let text = toml::to_string(camera).map_err(|e| CliError::config("camera file", e))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

/// Sweep settings; every field is optional and command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub angles_deg: Option<Vec<f64>>,
    pub frames_per_angle: Option<usize>,
    pub distance_m: Option<f64>,
    pub pixel_noise_sigma: Option<f64>,
    pub depth_noise_mm: Option<f64>,
    pub hole_rate: Option<f64>,
    pub seed: Option<u64>,
    pub success_rot_tol_deg: Option<f64>,
    pub success_fraction: Option<f64>,
}

pub fn load_sweep(path: &Path) -> Result<SweepFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    toml::from_str(&text).map_err(|e| CliError::config(path.display(), e))
}
