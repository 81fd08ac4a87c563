//! Segment-test corner detection on the radius-3 Bresenham circle.

use super::Keypoint;
use crate::image::GrayImage;

/// Offsets of the 16-pixel circle, clockwise from 12 o'clock.
pub const CIRCLE: [(i32, i32); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

/// Minimum contiguous arc length.
pub const ARC_LENGTH: usize = 9;

/// Corner score of a single pixel, `None` if the segment test fails.
///
/// The score is the sum of `|I(p) - I(c)|` over the longest contiguous arc of
/// circle pixels that are all brighter than `I(c) + t` or all darker than
/// `I(c) - t`.
pub fn segment_score(image: &GrayImage, x: usize, y: usize, threshold: u8) -> Option<u32> {
    let w = image.width() as i32;
    let h = image.height() as i32;
    let (xi, yi) = (x as i32, y as i32);
    if xi < 3 || yi < 3 || xi + 3 >= w || yi + 3 >= h {
        return None;
    }
    let center = image.get(x, y) as i32;
    let t = threshold as i32;
    // Any arc of 9 covers at least two of the four compass pixels.
    let (mut bright, mut dark) = (0, 0);
    for k in [0, 4, 8, 12] {
        let (dx, dy) = CIRCLE[k];
        let p = image.get((xi + dx) as usize, (yi + dy) as usize) as i32;
        bright += (p > center + t) as u32;
        dark += (p < center - t) as u32;
    }
    if bright < 2 && dark < 2 {
        return None;
    }
    // +1 brighter, -1 darker, 0 similar
    let mut class = [0i8; 16];
    let mut diff = [0u32; 16];
    for (k, (dx, dy)) in CIRCLE.iter().enumerate() {
        let p = image.get((xi + dx) as usize, (yi + dy) as usize) as i32;
        diff[k] = (p - center).unsigned_abs();
        class[k] = if p > center + t {
            1
        } else if p < center - t {
            -1
        } else {
            0
        };
    }

    let mut best: Option<(usize, u32)> = None;
    for sign in [1i8, -1i8] {
        if class.iter().all(|&c| c == sign) {
            let s: u32 = diff.iter().sum();
            return Some(s);
        }
        // Start each run just after a non-member so wrap-around arcs are whole.
        let Some(start) = (0..16).find(|&k| class[k] != sign) else {
            continue;
        };
        let mut run = 0usize;
        let mut sum = 0u32;
        for step in 1..=16 {
            let k = (start + step) % 16;
            if class[k] == sign {
                run += 1;
                sum += diff[k];
                if run >= ARC_LENGTH && best.is_none_or(|(r, s)| run > r || (run == r && sum > s)) {
                    best = Some((run, sum));
                }
            } else {
                run = 0;
                sum = 0;
            }
        }
    }
    best.map(|(_, s)| s)
}

/// Detects corners, suppresses non-maxima in a `(2r+1)^2` window and returns
/// them sorted by descending score (ties by row, then column).
pub fn detect_corners(image: &GrayImage, threshold: u8, nonmax_radius: usize) -> Vec<Keypoint> {
    let (w, h) = (image.width(), image.height());
    if w < 7 || h < 7 || threshold == 0 {
        return Vec::new();
    }
    let mut scores = vec![0u32; w * h];
    for y in 3..h - 3 {
        for x in 3..w - 3 {
            if let Some(s) = segment_score(image, x, y, threshold) {
                scores[y * w + x] = s;
            }
        }
    }

    let r = nonmax_radius as isize;
    let mut out = Vec::new();
    for y in 3..h - 3 {
        for x in 3..w - 3 {
            let s = scores[y * w + x];
            if s == 0 {
                continue;
            }
            let mut keep = true;
            'window: for dy in -r..=r {
                let yy = y as isize + dy;
                if yy < 0 || yy >= h as isize {
                    continue;
                }
                for dx in -r..=r {
                    let xx = x as isize + dx;
                    if xx < 0 || xx >= w as isize || (dx == 0 && dy == 0) {
                        continue;
                    }
                    let o = scores[yy as usize * w + xx as usize];
                    // Equal scores: the earlier pixel in raster order wins.
                    if o > s || (o == s && (dy < 0 || (dy == 0 && dx < 0))) {
                        keep = false;
                        break 'window;
                    }
                }
            }
            if keep {
                out.push(Keypoint {
                    x: x as f64,
                    y: y as f64,
                    score: s as f64,
                });
            }
        }
    }
    sort_keypoints(&mut out);
    out
}

pub(crate) fn sort_keypoints(kps: &mut [Keypoint]) {
    kps.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
    });
}
