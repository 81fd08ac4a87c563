//! Trained object bundles on disk.
//!
//! A bundle directory holds `texture.pgm`, `color.ppm`, `meta.toml`,
//! `keypoints.csv` and `descriptors.bin` (32 bytes per keypoint, same order).

use std::path::Path;

use planograsp::features::{
    read_descriptors, read_keypoints, write_descriptors, write_keypoints, BinaryDescriptor,
    DetectorDescriptor, FastBrief, Features,
};
use planograsp::image::{read_pnm, write_pgm, write_ppm};
use planograsp::pose::ReferenceObject;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BUNDLE_FORMAT: &str = "planograsp-bundle/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleMeta {
    pub format: String,
    pub id: String,
    pub detector: String,
    pub width_px: usize,
    pub height_px: usize,
    pub physical_width_m: f64,
    pub physical_height_m: f64,
    pub keypoints: usize,
    pub descriptor_bytes: usize,
}

pub fn save_bundle(dir: &Path, obj: &ReferenceObject<BinaryDescriptor>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let (sx, sy) = obj.meters_per_pixel();
    let meta = BundleMeta {
        format: BUNDLE_FORMAT.to_string(),
        id: obj.id.clone(),
        detector: obj.detector_id.clone(),
        width_px: obj.width_px(),
        height_px: obj.height_px(),
        physical_width_m: sx * obj.width_px() as f64,
        physical_height_m: sy * obj.height_px() as f64,
        keypoints: obj.features.len(),
        descriptor_bytes: BinaryDescriptor::BYTES,
    };
    let text = toml::to_string(&meta).map_err(|e| CliError::io("bundle metadata", e))?;
    std::fs::write(dir.join("meta.toml"), text).map_err(|e| CliError::io(dir.display(), e))?;
    write_pgm(dir.join("texture.pgm"), &obj.texture)?;
    write_ppm(dir.join("color.ppm"), &obj.color)?;
    write_keypoints(dir.join("keypoints.csv"), &obj.features.keypoints)?;
    write_descriptors(dir.join("descriptors.bin"), &obj.features.descriptors)?;
    Ok(())
}

pub fn load_bundle(dir: &Path) -> Result<ReferenceObject<BinaryDescriptor>, CliError> {
    let bad = |msg: String| CliError::Io(format!("bundle {}: {msg}", dir.display()));
    let meta_path = dir.join("meta.toml");
    let text =
        std::fs::read_to_string(&meta_path).map_err(|e| CliError::io(meta_path.display(), e))?;
    let meta: BundleMeta = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if meta.format != BUNDLE_FORMAT {
        return Err(bad(format!("unsupported format `{}`", meta.format)));
    }
    let expected = FastBrief::default().id();
    if meta.detector != expected {
        return Err(bad(format!(
            "detector `{}` is not `{expected}`",
            meta.detector
        )));
    }
    if meta.descriptor_bytes != BinaryDescriptor::BYTES {
        return Err(bad(format!(
            "descriptor size {} is not {}",
            meta.descriptor_bytes,
            BinaryDescriptor::BYTES
        )));
    }
    let texture = read_pnm(dir.join("texture.pgm"))?.into_gray()?;
    let color = read_pnm(dir.join("color.ppm"))?.into_rgb()?;
    if (texture.width(), texture.height()) != (meta.width_px, meta.height_px)
        || (color.width(), color.height()) != (meta.width_px, meta.height_px)
    {
        return Err(bad("image size differs from metadata".into()));
    }
    let keypoints = read_keypoints(dir.join("keypoints.csv"))?;
    let descriptors = read_descriptors(dir.join("descriptors.bin"))?;
    if keypoints.len() != meta.keypoints || descriptors.len() != meta.keypoints {
        return Err(bad(format!(
            "expected {} features, found {} keypoints and {} descriptors",
            meta.keypoints,
            keypoints.len(),
            descriptors.len()
        )));
    }
    let obj = ReferenceObject {
        id: meta.id,
        detector_id: meta.detector,
        color,
        texture,
        features: Features {
            keypoints,
            descriptors,
        },
        physical_width_m: Some(meta.physical_width_m),
        physical_height_m: Some(meta.physical_height_m),
    };
    obj.check().map_err(|e| bad(e.to_string()))?;
    Ok(obj)
}
