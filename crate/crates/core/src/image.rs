//! Image buffers and binary netpbm I/O (P5 8/16-bit, P6 8-bit).

use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {0}x{1}")]
    EmptyImage(usize, usize),
    #[error("buffer holds {got} values, expected {expected}")]
    BufferSize { expected: usize, got: usize },
    #[error("unsupported netpbm magic `{0}`")]
    UnsupportedFormat(String),
    #[error("malformed netpbm header: {0}")]
    BadHeader(String),
    #[error("expected {expected}, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// 8-bit single channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage(width, height));
        }
        if data.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                got: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }
}

/// 8-bit interleaved RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage(width, height));
        }
        if data.len() != width * height * 3 {
            return Err(ImageError::BufferSize {
                expected: width * height * 3,
                got: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        Self {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Luma `0.299 R + 0.587 G + 0.114 B`, rounded to the nearest integer.
    pub fn to_gray(&self) -> GrayImage {
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| gray_from_rgb([p[0], p[1], p[2]]))
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn from_gray(gray: &GrayImage) -> Self {
        let data = gray.data.iter().flat_map(|&v| [v, v, v]).collect();
        Self {
            width: gray.width,
            height: gray.height,
            data,
        }
    }
}

/// Integer arithmetic in thousandths keeps the conversion exact and portable.
#[inline]
pub fn gray_from_rgb(p: [u8; 3]) -> u8 {
    let acc = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
    ((acc + 500) / 1000) as u8
}

/// 16-bit single channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray16Image {
    width: usize,
    height: usize,
    data: Vec<u16>,
}

impl Gray16Image {
    pub fn new(width: usize, height: usize, data: Vec<u16>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage(width, height));
        }
        if data.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                got: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u16> {
        self.data
    }
}

/// Any image a netpbm file can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pnm {
    Gray(GrayImage),
    Gray16(Gray16Image),
    Rgb(RgbImage),
}

impl Pnm {
    fn kind(&self) -> &'static str {
        match self {
            Pnm::Gray(_) => "8-bit PGM",
            Pnm::Gray16(_) => "16-bit PGM",
            Pnm::Rgb(_) => "PPM",
        }
    }

    /// Color images are converted, 16-bit images are rejected.
    pub fn into_gray(self) -> Result<GrayImage, ImageError> {
        match self {
            Pnm::Gray(g) => Ok(g),
            Pnm::Rgb(c) => Ok(c.to_gray()),
            other => Err(ImageError::WrongKind {
                expected: "8-bit image",
                found: other.kind(),
            }),
        }
    }

    pub fn into_rgb(self) -> Result<RgbImage, ImageError> {
        match self {
            Pnm::Rgb(c) => Ok(c),
            Pnm::Gray(g) => Ok(RgbImage::from_gray(&g)),
            other => Err(ImageError::WrongKind {
                expected: "8-bit image",
                found: other.kind(),
            }),
        }
    }

    pub fn into_gray16(self) -> Result<Gray16Image, ImageError> {
        match self {
            Pnm::Gray16(d) => Ok(d),
            other => Err(ImageError::WrongKind {
                expected: "16-bit PGM",
                found: other.kind(),
            }),
        }
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ImageError> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::BadHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::BadHeader(format!("bad {what}")))
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Pnm, ImageError> {
    if bytes.len() < 2 {
        return Err(ImageError::BadHeader("file too short".into()));
    }
    let magic = &bytes[..2];
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => {
            return Err(ImageError::UnsupportedFormat(
                String::from_utf8_lossy(magic).into_owned(),
            ))
        }
    };
    let mut rd = HeaderReader { bytes, pos: 2 };
    let width = rd.number("width")?;
    let height = rd.number("height")?;
    let maxval = rd.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::EmptyImage(width, height));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ImageError::BadHeader(format!(
            "maxval {maxval} out of range"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if rd.pos >= bytes.len() || !bytes[rd.pos].is_ascii_whitespace() {
        return Err(ImageError::BadHeader("missing raster separator".into()));
    }
    let raster = &bytes[rd.pos + 1..];
    let samples = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| ImageError::BadHeader("dimensions overflow".into()))?;
    let wide = maxval > 255;
    let needed = if wide { samples * 2 } else { samples };
    if raster.len() < needed {
        return Err(ImageError::BadHeader(format!(
            "raster truncated: need {needed} bytes, have {}",
            raster.len()
        )));
    }
    match (channels, wide) {
        (1, false) => Ok(Pnm::Gray(GrayImage::new(
            width,
            height,
            raster[..needed].to_vec(),
        )?)),
        (1, true) => {
            let data = raster[..needed]
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect();
            Ok(Pnm::Gray16(Gray16Image::new(width, height, data)?))
        }
        (3, false) => Ok(Pnm::Rgb(RgbImage::new(
            width,
            height,
            raster[..needed].to_vec(),
        )?)),
        _ => Err(ImageError::UnsupportedFormat("16-bit PPM".into())),
    }
}

pub fn read_pnm(path: impl AsRef<Path>) -> Result<Pnm, ImageError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_pnm(&bytes)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Big-endian samples, maxval 65535.
pub fn encode_pgm16(img: &Gray16Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width, img.height).into_bytes();
    for v in &img.data {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

fn write_bytes(path: impl AsRef<Path>, bytes: &[u8]) -> Result<(), ImageError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<(), ImageError> {
    write_bytes(path, &encode_pgm(img))
}

pub fn write_pgm16(path: impl AsRef<Path>, img: &Gray16Image) -> Result<(), ImageError> {
    write_bytes(path, &encode_pgm16(img))
}

pub fn write_ppm(path: impl AsRef<Path>, img: &RgbImage) -> Result<(), ImageError> {
    write_bytes(path, &encode_ppm(img))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_conversion_rounds() {
        assert_eq!(gray_from_rgb([255, 255, 255]), 255);
        assert_eq!(gray_from_rgb([0, 0, 0]), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(gray_from_rgb([255, 0, 0]), 76);
        // 0.587 * 255 = 149.685
        assert_eq!(gray_from_rgb([0, 255, 0]), 150);
        assert_eq!(gray_from_rgb([0, 0, 255]), 29);
    }

    #[test]
    fn pgm16_is_big_endian() {
        let img = Gray16Image::new(2, 1, vec![0x0102, 1000]).unwrap();
        let bytes = encode_pgm16(&img);
        assert!(bytes.starts_with(b"P5\n2 1\n65535\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0x01, 0x02, 0x03, 0xE8]);
        assert_eq!(decode_pnm(&bytes).unwrap().into_gray16().unwrap(), img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5 # gray\n# size\n3 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        let img = decode_pnm(&bytes).unwrap().into_gray().unwrap();
        assert_eq!(img.data(), &[1, 2, 3]);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(
            decode_pnm(b"P3\n1 1\n255\n0 0 0"),
            Err(ImageError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode_pnm(b"P5\n4 4\n255\n\x00\x01"),
            Err(ImageError::BadHeader(_))
        ));
        assert!(matches!(
            decode_pnm(b"P6\n0 4\n255\n"),
            Err(ImageError::EmptyImage(0, 4))
        ));
        let rgb = RgbImage::filled(2, 2, [1, 2, 3]);
        assert!(decode_pnm(&encode_ppm(&rgb))
            .unwrap()
            .into_gray16()
            .is_err());
    }

    #[test]
    fn ppm_and_pgm_round_trip() {
        let mut rgb = RgbImage::filled(3, 2, [10, 20, 30]);
        rgb.set(2, 1, [200, 100, 0]);
        assert_eq!(
            decode_pnm(&encode_ppm(&rgb)).unwrap().into_rgb().unwrap(),
            rgb
        );
        let gray = rgb.to_gray();
        assert_eq!(
            decode_pnm(&encode_pgm(&gray)).unwrap().into_gray().unwrap(),
            gray
        );
    }
}
