//! Image and histogram types with the PMF/CDF machinery every equalizer
//! consumes.

use crate::error::{Error, Result};
use crate::LEVELS;

/// 8-bit grayscale image, row-major.
///
/// Construction enforces the invariants once: non-zero dimensions and a
/// pixel buffer of exactly `width * height` bytes. Every pixel is a valid
/// gray level by virtue of being a `u8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::BadDimensions {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single level.
    pub fn constant(width: u32, height: u32, level: u8) -> Result<Self> {
        Self::new(width, height, vec![level; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Pixel at column `x`, row `y`. Panics when out of bounds.
    pub fn get(&self, x: u32, y: u32) -> u8 {
        assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Largest pixel value.
    pub fn max_level(&self) -> u8 {
        self.pixels.iter().copied().max().unwrap_or(0)
    }

    /// True when every pixel holds the same value.
    pub fn is_constant(&self) -> bool {
        let first = self.pixels[0];
        self.pixels.iter().all(|&p| p == first)
    }
}

/// 256-bin pixel-count histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn count(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Probability mass function over the 256 gray levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: [f64; LEVELS],
}

impl Pmf {
    pub fn probs(&self) -> &[f64; LEVELS] {
        &self.probs
    }
}

/// Cumulative distribution over the 256 gray levels (inclusive prefix sum).
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    cum: [f64; LEVELS],
}

impl Cdf {
    pub fn values(&self) -> &[f64; LEVELS] {
        &self.cum
    }
}

/// Per-level pixel counts of an image.
pub fn histogram_of(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; LEVELS];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    Histogram {
        counts,
        total: img.pixel_count() as u64,
    }
}

/// Normalizes a histogram into a PMF. Errors on zero total count.
pub fn pmf_of(h: &Histogram) -> Result<Pmf> {
    if h.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = h.total as f64;
    let mut probs = [0f64; LEVELS];
    for (p, &c) in probs.iter_mut().zip(h.counts.iter()) {
        *p = c as f64 / total;
    }
    Ok(Pmf { probs })
}

/// Inclusive prefix sum of a PMF.
pub fn cdf_of(p: &Pmf) -> Cdf {
    let mut cum = [0f64; LEVELS];
    let mut acc = 0.0;
    for (c, &pr) in cum.iter_mut().zip(p.probs.iter()) {
        acc += pr;
        *c = acc;
    }
    Cdf { cum }
}

/// Remaps every pixel through a 256-entry level map. Dimensions preserved.
pub fn apply_lut(img: &GrayImage, lut: &[u8; LEVELS]) -> GrayImage {
    let pixels = img.pixels().iter().map(|&p| lut[p as usize]).collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Rounds half away from zero and clamps into the gray-level range.
pub(crate) fn round_to_level(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}
