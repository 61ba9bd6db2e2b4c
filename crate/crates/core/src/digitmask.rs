//! Numeral mask assets and image binarization.
//!
//! Binarization collapses the channel axis to its mean and thresholds it at
//! 128: a mean of at least 128 becomes white (255), everything else black (0).
//! The comparison is done on the exact channel sum, so no rounding is
//! involved.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Binarization threshold applied to the channel mean.
pub const THRESHOLD: u8 = 128;
/// Pixel value used for "on" pixels.
pub const WHITE: u8 = 255;
/// Pixel value used for "off" pixels.
pub const BLACK: u8 = 0;
/// Digit height used by the bundled masks.
pub const DEFAULT_DIGIT_HEIGHT: usize = 16;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("mask asset {path}: {reason}")]
    Asset { path: PathBuf, reason: String },
    #[error("masks for numerals {0} and {1} are identical")]
    Ambiguous(usize, usize),
    #[error("invalid mask set: {0}")]
    Invalid(String),
}

/// An interleaved 8-bit image with any number of channels.
#[derive(Clone, PartialEq, Eq)]
pub struct ColorImage {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl ColorImage {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<u8>) -> Result<Self, MaskError> {
        if channels == 0 {
            return Err(MaskError::Shape("image must have at least one channel".into()));
        }
        if data.len() != height * width * channels {
            return Err(MaskError::Shape(format!(
                "buffer of {} bytes does not hold {height}x{width}x{channels}",
                data.len()
            )));
        }
        Ok(Self { height, width, channels, data })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: u8) -> Self {
        Self { height, width, channels, data: vec![value; height * width * channels] }
    }

    fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }
}

impl fmt::Debug for ColorImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColorImage({}x{}x{})", self.height, self.width, self.channels)
    }
}

/// A single-channel image whose pixels are all [`BLACK`] or [`WHITE`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayBinaryImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayBinaryImage {
    /// Wraps a pixel buffer, rejecting values other than 0 and 255.
    pub fn from_pixels(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self, MaskError> {
        if pixels.len() != height * width {
            return Err(MaskError::Shape(format!(
                "buffer of {} bytes does not hold {height}x{width}",
                pixels.len()
            )));
        }
        if pixels.iter().any(|&p| p != BLACK && p != WHITE) {
            return Err(MaskError::Invalid("pixel values must be 0 or 255".into()));
        }
        Ok(Self { height, width, pixels })
    }

    pub fn blank(height: usize, width: usize) -> Self {
        Self { height, width, pixels: vec![BLACK; height * width] }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, y: usize, x: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Row `y`, columns `[x0, x0 + len)`.
    pub fn row_span(&self, y: usize, x0: usize, len: usize) -> &[u8] {
        let start = y * self.width + x0;
        &self.pixels[start..start + len]
    }

    /// Lifts the image to a one-channel [`ColorImage`].
    pub fn to_color(&self) -> ColorImage {
        ColorImage { height: self.height, width: self.width, channels: 1, data: self.pixels.clone() }
    }
}

impl fmt::Debug for GrayBinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrayBinaryImage({}x{})", self.height, self.width)
    }
}

/// Binarizes one image.
pub fn binarize(image: &ColorImage) -> GrayBinaryImage {
    let channels = image.channels;
    // mean >= t  <=>  sum >= t * channels, exactly.
    let cutoff = THRESHOLD as u32 * channels as u32;
    let pixels = if channels == 1 {
        image.data.iter().map(|&v| if v >= THRESHOLD { WHITE } else { BLACK }).collect()
    } else if channels == 3 {
        // Branch-free; this is the hot path for RGB strips.
        let cutoff = cutoff as u16;
        let mut out = vec![BLACK; image.height * image.width];
        for (o, px) in out.iter_mut().zip(image.data.chunks_exact(3)) {
            let sum = px[0] as u16 + px[1] as u16 + px[2] as u16;
            *o = 0u8.wrapping_sub((sum >= cutoff) as u8);
        }
        out
    } else {
        image
            .data
            .chunks_exact(channels)
            .map(|px| if px.iter().map(|&v| v as u32).sum::<u32>() >= cutoff { WHITE } else { BLACK })
            .collect()
    };
    GrayBinaryImage { height: image.height, width: image.width, pixels }
}

/// Binarizes a stack of same-shaped images. An empty stack yields an empty stack.
pub fn binarize_images(images: &[ColorImage]) -> Result<Vec<GrayBinaryImage>, MaskError> {
    let Some(first) = images.first() else {
        return Ok(Vec::new());
    };
    let shape = first.shape();
    if shape.2 == 0 {
        return Err(MaskError::Shape("image must have at least one channel".into()));
    }
    if let Some((i, img)) = images.iter().enumerate().find(|(_, img)| img.shape() != shape) {
        return Err(MaskError::Shape(format!(
            "image {i} is {:?}, expected {:?}",
            img.shape(),
            shape
        )));
    }
    Ok(images.iter().map(binarize).collect())
}

/// The ten numeral templates, indexed by numeral value.
///
/// Immutable once built. Construction checks that every mask is square with
/// the same side, binary, and distinct from every other mask.
#[derive(Clone, PartialEq, Eq)]
pub struct DigitMaskSet {
    masks: Vec<GrayBinaryImage>,
    digit_height: usize,
}

impl DigitMaskSet {
    pub fn new(masks: Vec<GrayBinaryImage>) -> Result<Self, MaskError> {
        if masks.len() != 10 {
            return Err(MaskError::Invalid(format!("expected 10 masks, got {}", masks.len())));
        }
        let h = masks[0].height;
        if h == 0 {
            return Err(MaskError::Invalid("digit height must be positive".into()));
        }
        for (d, m) in masks.iter().enumerate() {
            if m.height != h || m.width != h {
                return Err(MaskError::Shape(format!(
                    "mask {d} is {}x{}, expected {h}x{h}",
                    m.height, m.width
                )));
            }
        }
        for a in 0..10 {
            for b in a + 1..10 {
                if masks[a] == masks[b] {
                    return Err(MaskError::Ambiguous(a, b));
                }
            }
        }
        Ok(Self { masks, digit_height: h })
    }

    pub fn digit_height(&self) -> usize {
        self.digit_height
    }

    pub fn mask(&self, digit: usize) -> &GrayBinaryImage {
        &self.masks[digit]
    }

    pub fn masks(&self) -> &[GrayBinaryImage] {
        &self.masks
    }

    /// Writes the set as `0.pgm` … `9.pgm` into `dir`, creating it if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), MaskError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| MaskError::Asset { path: dir.to_path_buf(), reason: e.to_string() })?;
        for (d, m) in self.masks.iter().enumerate() {
            let path = dir.join(format!("{d}.pgm"));
            let h = self.digit_height as u32;
            image::GrayImage::from_raw(h, h, m.pixels.clone())
                .expect("mask buffer matches its shape")
                .save_with_format(&path, image::ImageFormat::Pnm)
                .map_err(|e| MaskError::Asset { path: path.clone(), reason: e.to_string() })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DigitMaskSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitMaskSet(h={})", self.digit_height)
    }
}

/// Loads `0.pgm` … `9.pgm` from `dir`. Non-binary images are binarized.
pub fn load_digit_masks(dir: &Path) -> Result<DigitMaskSet, MaskError> {
    let mut masks = Vec::with_capacity(10);
    for d in 0..10 {
        let path = dir.join(format!("{d}.pgm"));
        if !path.is_file() {
            return Err(MaskError::Asset { path, reason: format!("missing mask for numeral {d}") });
        }
        let img = image::open(&path)
            .map_err(|e| MaskError::Asset { path: path.clone(), reason: e.to_string() })?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let color = match img {
            image::DynamicImage::ImageLuma8(g) => ColorImage::new(h, w, 1, g.into_raw())?,
            other => ColorImage::new(h, w, 3, other.into_rgb8().into_raw())?,
        };
        masks.push(binarize(&color));
    }
    DigitMaskSet::new(masks)
}
