//! Planar object detection in RGB-D frames, 6-DoF pose recovery from a
//! homography plus depth, and grasp transfer between object poses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod features;
pub mod geometry;
pub mod grasp;
pub mod homography;
pub mod image;
pub mod pose;
pub mod synth;

pub use features::{BinaryDescriptor, DetectorDescriptor, FastBrief, Features, Keypoint, Match};
pub use geometry::{EulerAngles, RigidTransform, RotationMatrix, Vec3};
pub use grasp::{CanonicalGrasp, GraspLibrary};
pub use homography::{Homography, RansacConfig};
pub use image::{GrayImage, RgbImage};
pub use pose::{
    CameraIntrinsics, DepthFrame, PlanarPose, PoseConfig, PoseEstimate, ReferenceObject,
};
