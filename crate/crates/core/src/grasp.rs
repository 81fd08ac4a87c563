//! Canonical grasps recorded in the object frame and re-targeted to new
//! object poses.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    compose, invert, rpy_from_transform, GeometryError, RigidTransform, RollPitchYaw,
};
use crate::pose::PlanarPose;

pub const LIBRARY_FORMAT: &str = "planograsp-grasp-library/1";

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("pose is degenerate (gimbal lock in the object frame)")]
    DegeneratePose,
    #[error("grasp `{grasp_id}` already exists for object `{object_id}`")]
    Duplicate { object_id: String, grasp_id: String },
    #[error("no grasp `{grasp_id}` for object `{object_id}`")]
    NotFound { object_id: String, grasp_id: String },
    #[error("unsupported grasp library format `{0}`")]
    Format(String),
    #[error("grasp `{object_id}/{grasp_id}`: {source}")]
    BadTransform {
        object_id: String,
        grasp_id: String,
        source: GeometryError,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalGrasp {
    pub object_id: String,
    pub grasp_id: String,
    /// Gripper wrist in the object frame.
    pub object_to_gripper: RigidTransform,
}

/// `T_o^g = (T_b^o)^-1 * T_b^g`
pub fn train_grasp(
    base_to_object: &RigidTransform,
    base_to_gripper: &RigidTransform,
) -> RigidTransform {
    compose(&invert(base_to_object), base_to_gripper)
}

/// `T_b^g = T_b^o * T_o^g`
pub fn adapt_grasp(base_to_object: &RigidTransform, grasp: &CanonicalGrasp) -> RigidTransform {
    compose(base_to_object, &grasp.object_to_gripper)
}

pub fn grasp_orientation(base_to_gripper: &RigidTransform) -> RollPitchYaw {
    rpy_from_transform(base_to_gripper)
}

/// Object pose as a transform, optionally moved from the camera frame into
/// the robot base frame by `camera_to_base` (`T_base^camera`).
pub fn pose_to_transform(
    pose: &PlanarPose,
    camera_to_base: Option<&RigidTransform>,
) -> Result<RigidTransform, GraspError> {
    if pose.degenerate {
        return Err(GraspError::DegeneratePose);
    }
    let camera_to_object = RigidTransform::new(pose.frame, pose.position);
    Ok(match camera_to_base {
        Some(ext) => compose(ext, &camera_to_object),
        None => camera_to_object,
    })
}

/// Trained grasps keyed by object and grasp id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraspLibrary {
    grasps: BTreeMap<String, BTreeMap<String, RigidTransform>>,
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    format: String,
    objects: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

impl GraspLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, grasp: CanonicalGrasp, overwrite: bool) -> Result<(), GraspError> {
        let slot = self.grasps.entry(grasp.object_id.clone()).or_default();
        if !overwrite && slot.contains_key(&grasp.grasp_id) {
            return Err(GraspError::Duplicate {
                object_id: grasp.object_id,
                grasp_id: grasp.grasp_id,
            });
        }
        slot.insert(grasp.grasp_id, grasp.object_to_gripper);
        Ok(())
    }

    pub fn get(&self, object_id: &str, grasp_id: &str) -> Result<CanonicalGrasp, GraspError> {
        self.grasps
            .get(object_id)
            .and_then(|m| m.get(grasp_id))
            .map(|t| CanonicalGrasp {
                object_id: object_id.to_string(),
                grasp_id: grasp_id.to_string(),
                object_to_gripper: *t,
            })
            .ok_or_else(|| GraspError::NotFound {
                object_id: object_id.to_string(),
                grasp_id: grasp_id.to_string(),
            })
    }

    pub fn grasps_for(&self, object_id: &str) -> Vec<CanonicalGrasp> {
        self.grasps
            .get(object_id)
            .map(|m| {
                m.iter()
                    .map(|(gid, t)| CanonicalGrasp {
                        object_id: object_id.to_string(),
                        grasp_id: gid.clone(),
                        object_to_gripper: *t,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.grasps.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// JSON document; transforms are 16 row-major numbers.
    pub fn to_json(&self) -> Result<String, GraspError> {
        let objects = self
            .grasps
            .iter()
            .map(|(oid, m)| {
                let inner = m
                    .iter()
                    .map(|(gid, t)| (gid.clone(), t.to_row_major().to_vec()))
                    .collect();
                (oid.clone(), inner)
            })
            .collect();
        let file = LibraryFile {
            format: LIBRARY_FORMAT.to_string(),
            objects,
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, GraspError> {
        let file: LibraryFile = serde_json::from_str(text)?;
        if file.format != LIBRARY_FORMAT {
            return Err(GraspError::Format(file.format));
        }
        let mut lib = Self::new();
        for (oid, m) in file.objects {
            for (gid, values) in m {
                let t = RigidTransform::from_row_major(&values).map_err(|source| {
                    GraspError::BadTransform {
                        object_id: oid.clone(),
                        grasp_id: gid.clone(),
                        source,
                    }
                })?;
                lib.grasps.entry(oid.clone()).or_default().insert(gid, t);
            }
        }
        Ok(lib)
    }

    /// Missing file reads as an empty library.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraspError> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes to a sibling temporary file and renames it over the target.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraspError> {
        let path = path.as_ref();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "library".into());
        let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
        std::fs::write(&tmp, self.to_json()?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
