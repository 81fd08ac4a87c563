//! Command-line front end: object bundles, frame detection, sweeps, timing
//! and grasp workflows.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod commands;
pub mod config;

use std::fmt;

use planograsp::features::FeatureError;
use planograsp::grasp::GraspError;
use planograsp::image::ImageError;

/// Failure with a stable process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Untrainable(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Duplicate(String),
    #[error("{0}")]
    NotFound(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Untrainable(_) => 3,
            CliError::Config(_) => 4,
            CliError::Duplicate(_) => 5,
            CliError::NotFound(_) => 6,
        }
    }

    pub(crate) fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    pub(crate) fn config(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        CliError::Config(format!("{context}: {err}"))
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GraspError> for CliError {
    fn from(e: GraspError) -> Self {
        match e {
            GraspError::Duplicate { .. } => CliError::Duplicate(e.to_string()),
            GraspError::NotFound { .. } => CliError::NotFound(e.to_string()),
            GraspError::DegeneratePose => CliError::Config(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
