//! Keypoints, binary descriptors and ratio-test matching.
//!
//! [`DetectorDescriptor`] is the plug-in point for detector/descriptor pairs.
//! The built-in [`FastBrief`] pairs a 9-of-16 segment-test corner detector with
//! a 256-bit comparison descriptor.

pub mod brief;
pub mod fast;
pub mod pattern;

use std::io::{self, BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::image::GrayImage;

pub use brief::describe_binary;
pub use fast::detect_corners;

/// Number of matches at which an object is considered present.
pub const MIN_MATCHES: usize = 10;
/// Default nearest-neighbour ratio.
pub const DEFAULT_RATIO: f64 = 0.7;
/// Hamming cap used when the train set has a single descriptor.
pub const SINGLE_CANDIDATE_CAP_BITS: u32 = 64;
pub const DEFAULT_MAX_KEYPOINTS: usize = 1000;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("ratio must lie in (0, 1), got {0}")]
    BadRatio(f64),
    #[error("train descriptor set is empty")]
    EmptyTrainSet,
    #[error("descriptor file length {0} is not a multiple of 32")]
    BadDescriptorFile(usize),
    #[error("keypoint file line {line}: {msg}")]
    BadKeypointFile { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub score: f64,
}

/// 256 comparison bits; bit `b` lives in word `b / 64`, position `b % 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryDescriptor([u64; 4]);

impl BinaryDescriptor {
    pub const BYTES: usize = 32;

    pub fn from_words(words: [u64; 4]) -> Self {
        Self(words)
    }

    pub fn words(&self) -> &[u64; 4] {
        &self.0
    }

    pub fn bit(&self, b: usize) -> bool {
        self.0[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    /// Byte `b / 8`, bit `b % 8` (least significant first).
    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, w) in self.0.iter().enumerate() {
            out[i * 8..i * 8 + 8].copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[i * 8..i * 8 + 8]);
            *w = u64::from_le_bytes(b);
        }
        Self(words)
    }
}

/// A descriptor type with a distance. Binary descriptors use Hamming counts;
/// plug-ins may use any non-negative metric.
pub trait Descriptor: Clone + Send + Sync {
    fn distance(&self, other: &Self) -> f64;

    /// Largest distance accepted when the ratio test is undefined
    /// (train set of size one).
    fn single_candidate_cap() -> f64;
}

impl Descriptor for BinaryDescriptor {
    fn distance(&self, other: &Self) -> f64 {
        self.hamming(other) as f64
    }

    fn single_candidate_cap() -> f64 {
        SINGLE_CANDIDATE_CAP_BITS as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub query_index: usize,
    pub train_index: usize,
    pub distance: f64,
}

/// Keypoints with one descriptor each.
#[derive(Debug, Clone, PartialEq)]
pub struct Features<D> {
    pub keypoints: Vec<Keypoint>,
    pub descriptors: Vec<D>,
}

impl<D> Features<D> {
    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    pub fn from_pairs(pairs: Vec<(Keypoint, D)>) -> Self {
        let (keypoints, descriptors) = pairs.into_iter().unzip();
        Self {
            keypoints,
            descriptors,
        }
    }
}

pub trait DetectorDescriptor: Send + Sync {
    type Descriptor: Descriptor;

    /// Identifier stored with trained objects so descriptor files are never
    /// matched against an incompatible extractor.
    fn id(&self) -> String;

    fn detect(&self, image: &GrayImage) -> Vec<Keypoint>;

    /// At most one descriptor per keypoint; keypoints the sampling pattern
    /// cannot cover are dropped.
    fn describe(
        &self,
        image: &GrayImage,
        keypoints: &[Keypoint],
    ) -> Vec<(Keypoint, Self::Descriptor)>;

    fn match_descriptors(
        &self,
        query: &[Self::Descriptor],
        train: &[Self::Descriptor],
    ) -> Result<Vec<Match>, FeatureError>;

    fn extract(&self, image: &GrayImage) -> Features<Self::Descriptor> {
        let kps = self.detect(image);
        Features::from_pairs(self.describe(image, &kps))
    }
}

/// Segment-test corners plus 256-bit comparison descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct FastBrief {
    pub threshold: u8,
    pub nonmax_radius: usize,
    pub max_keypoints: usize,
    pub ratio: f64,
}

impl Default for FastBrief {
    fn default() -> Self {
        Self {
            threshold: 20,
            nonmax_radius: 3,
            max_keypoints: DEFAULT_MAX_KEYPOINTS,
            ratio: DEFAULT_RATIO,
        }
    }
}

impl FastBrief {
    pub const ID_PREFIX: &'static str = "fast9-brief256";
}

impl DetectorDescriptor for FastBrief {
    type Descriptor = BinaryDescriptor;

    fn id(&self) -> String {
        format!("{}-v{}", Self::ID_PREFIX, pattern::PATTERN_VERSION)
    }

    /// Corners that the descriptor could not cover are removed before the cap,
    /// so the cap counts describable keypoints.
    fn detect(&self, image: &GrayImage) -> Vec<Keypoint> {
        let mut kps = detect_corners(image, self.threshold, self.nonmax_radius);
        kps.retain(|k| brief::patch_fits(image, k));
        kps.truncate(self.max_keypoints);
        kps
    }

    fn describe(
        &self,
        image: &GrayImage,
        keypoints: &[Keypoint],
    ) -> Vec<(Keypoint, BinaryDescriptor)> {
        describe_binary(image, keypoints, &pattern::SAMPLING_PATTERN)
    }

    fn match_descriptors(
        &self,
        query: &[BinaryDescriptor],
        train: &[BinaryDescriptor],
    ) -> Result<Vec<Match>, FeatureError> {
        match_ratio(query, train, self.ratio)
    }
}

/// Exhaustive two-nearest-neighbour search with the ratio test.
///
/// A query keeps its best match iff `best < ratio * second_best`. With a single
/// train descriptor the test is undefined and the match is kept iff its
/// distance is within [`Descriptor::single_candidate_cap`].
pub fn match_ratio<D: Descriptor>(
    query: &[D],
    train: &[D],
    ratio: f64,
) -> Result<Vec<Match>, FeatureError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(FeatureError::BadRatio(ratio));
    }
    if train.is_empty() {
        return Err(FeatureError::EmptyTrainSet);
    }
    let cap = D::single_candidate_cap();
    let matches = query
        .par_iter()
        .enumerate()
        .filter_map(|(qi, q)| {
            let mut best = (f64::INFINITY, usize::MAX);
            let mut second = f64::INFINITY;
            for (ti, t) in train.iter().enumerate() {
                let d = q.distance(t);
                if d < best.0 {
                    second = best.0;
                    best = (d, ti);
                } else if d < second {
                    second = d;
                }
            }
            let keep = if train.len() == 1 {
                best.0 <= cap
            } else {
                best.0 < ratio * second
            };
            keep.then_some(Match {
                query_index: qi,
                train_index: best.1,
                distance: best.0,
            })
        })
        .collect();
    Ok(matches)
}

/// True iff there are at least [`MIN_MATCHES`] matches.
pub fn object_present(matches: &[Match]) -> bool {
    object_present_with(matches, MIN_MATCHES)
}

pub fn object_present_with(matches: &[Match], min_matches: usize) -> bool {
    matches.len() >= min_matches
}

/// Raw 32-byte records, no header.
pub fn write_descriptors(
    path: impl AsRef<Path>,
    descriptors: &[BinaryDescriptor],
) -> Result<(), FeatureError> {
    let mut bytes = Vec::with_capacity(descriptors.len() * BinaryDescriptor::BYTES);
    for d in descriptors {
        bytes.extend_from_slice(&d.to_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_descriptors(path: impl AsRef<Path>) -> Result<Vec<BinaryDescriptor>, FeatureError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % BinaryDescriptor::BYTES != 0 {
        return Err(FeatureError::BadDescriptorFile(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(BinaryDescriptor::BYTES)
        .map(|c| BinaryDescriptor::from_bytes(c.try_into().expect("chunk of 32")))
        .collect())
}

/// CSV with header `x,y,score`.
pub fn write_keypoints(path: impl AsRef<Path>, keypoints: &[Keypoint]) -> Result<(), FeatureError> {
    let mut out = io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,y,score")?;
    for k in keypoints {
        writeln!(out, "{},{},{}", k.x, k.y, k.score)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_keypoints(path: impl AsRef<Path>) -> Result<Vec<Keypoint>, FeatureError> {
    let file = io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if i == 0 {
            if line != "x,y,score" {
                return Err(FeatureError::BadKeypointFile {
                    line: 1,
                    msg: format!("expected header `x,y,score`, found `{line}`"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| FeatureError::BadKeypointFile {
                line: i + 1,
                msg: e.to_string(),
            })?;
        if vals.len() != 3 {
            return Err(FeatureError::BadKeypointFile {
                line: i + 1,
                msg: format!("expected 3 fields, found {}", vals.len()),
            });
        }
        out.push(Keypoint {
            x: vals[0],
            y: vals[1],
            score: vals[2],
        });
    }
    Ok(out)
}
