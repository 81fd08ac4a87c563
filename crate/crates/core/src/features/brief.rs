//! 256-bit intensity-comparison descriptor on a box-smoothed 31x31 patch.

use super::pattern::SAMPLING_PATTERN;
use super::{BinaryDescriptor, Keypoint};
use crate::image::GrayImage;

/// Half-size of the sampling patch.
pub const PATCH_RADIUS: usize = 15;
/// Half-size of the box smoothing kernel (5x5).
pub const SMOOTH_RADIUS: usize = 2;
/// Keypoints closer than this to any border are dropped.
pub const BORDER: usize = PATCH_RADIUS + SMOOTH_RADIUS;

/// Summed-area table with a zero first row and column.
struct Integral {
    stride: usize,
    sums: Vec<u32>,
}

impl Integral {
    fn new(image: &GrayImage) -> Self {
        let (w, h) = (image.width(), image.height());
        let stride = w + 1;
        let mut sums = vec![0u32; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0u32;
            for x in 0..w {
                row += image.get(x, y) as u32;
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { stride, sums }
    }

    /// Sum of the 5x5 box centered on `(x, y)`; the caller guarantees it fits.
    #[inline]
    fn box_sum(&self, x: usize, y: usize) -> u32 {
        let (x0, y0) = (x - SMOOTH_RADIUS, y - SMOOTH_RADIUS);
        let (x1, y1) = (x + SMOOTH_RADIUS + 1, y + SMOOTH_RADIUS + 1);
        let s = self.stride;
        self.sums[y1 * s + x1] + self.sums[y0 * s + x0]
            - self.sums[y0 * s + x1]
            - self.sums[y1 * s + x0]
    }
}

pub fn patch_fits(image: &GrayImage, kp: &Keypoint) -> bool {
    let (x, y) = (kp.x.round(), kp.y.round());
    x >= BORDER as f64
        && y >= BORDER as f64
        && x + (BORDER as f64) < image.width() as f64
        && y + (BORDER as f64) < image.height() as f64
}

/// Bit `b` is set iff the smoothed intensity at the first point of pair `b`
/// is strictly below the one at the second point. Keypoints whose patch
/// leaves the image are dropped.
pub fn describe_binary(
    image: &GrayImage,
    keypoints: &[Keypoint],
    pattern: &[[(i8, i8); 2]; 256],
) -> Vec<(Keypoint, BinaryDescriptor)> {
    let integral = Integral::new(image);
    keypoints
        .iter()
        .filter(|kp| patch_fits(image, kp))
        .map(|kp| {
            let (cx, cy) = (kp.x.round() as isize, kp.y.round() as isize);
            let mut bits = [0u64; 4];
            for (b, [(x1, y1), (x2, y2)]) in pattern.iter().enumerate() {
                let a =
                    integral.box_sum((cx + *x1 as isize) as usize, (cy + *y1 as isize) as usize);
                let c =
                    integral.box_sum((cx + *x2 as isize) as usize, (cy + *y2 as isize) as usize);
                if a < c {
                    bits[b / 64] |= 1u64 << (b % 64);
                }
            }
            (*kp, BinaryDescriptor::from_words(bits))
        })
        .collect()
}

/// Describes with the built-in sampling table.
pub fn describe_default(
    image: &GrayImage,
    keypoints: &[Keypoint],
) -> Vec<(Keypoint, BinaryDescriptor)> {
    describe_binary(image, keypoints, &SAMPLING_PATTERN)
}
