//! Classical full-image histogram equalization: remap every gray level
//! through the image's cumulative distribution so the output occupies the
//! full dynamic range.

use crate::error::Result;
use crate::image::{apply_lut, cdf_of, histogram_of, pmf_of, round_to_level, GrayImage, Histogram};
use crate::LEVELS;

/// Monotone 256-entry gray-level map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    lut: [u8; LEVELS],
}

impl LevelMap {
    pub fn as_array(&self) -> &[u8; LEVELS] {
        &self.lut
    }

    pub fn map(&self, level: u8) -> u8 {
        self.lut[level as usize]
    }
}

/// Equalization LUT from a histogram: `lut[k] = round(255 * cdf(k))`
/// with the inclusive prefix-sum CDF, so a single occupied level maps to
/// 255. Errors on an empty histogram.
pub fn he_lut(h: &Histogram) -> Result<LevelMap> {
    let cdf = cdf_of(&pmf_of(h)?);
    let mut lut = [0u8; LEVELS];
    for (l, &c) in lut.iter_mut().zip(cdf.values().iter()) {
        *l = round_to_level(255.0 * c);
    }
    Ok(LevelMap { lut })
}

/// Histogram-equalizes one image.
pub fn equalize(img: &GrayImage) -> GrayImage {
    let map = he_lut(&histogram_of(img)).expect("image histogram is non-empty");
    apply_lut(img, map.as_array())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn he_lut_rejects_empty_histogram() {
        assert_eq!(
            he_lut(&Histogram::from_counts([0; LEVELS])).unwrap_err(),
            Error::EmptyHistogram
        );
    }

    #[test]
    fn single_level_maps_to_full_scale() {
        for v in [0u8, 17, 255] {
            let mut counts = [0u64; LEVELS];
            counts[v as usize] = 9;
            let map = he_lut(&Histogram::from_counts(counts)).unwrap();
            assert_eq!(map.map(v), 255);
        }
    }

    #[test]
    fn uniform_histogram_lut() {
        let map = he_lut(&Histogram::from_counts([1; LEVELS])).unwrap();
        for k in 0..LEVELS {
            let expected = (255.0 * (k + 1) as f64 / 256.0).round() as u8;
            assert_eq!(map.map(k as u8), expected, "level {k}");
        }
        assert_eq!(map.map(127), 128);
        assert_eq!(map.map(255), 255);
    }

    #[test]
    fn two_extreme_levels_equal_counts() {
        let mut counts = [0u64; LEVELS];
        counts[0] = 10;
        counts[255] = 10;
        let map = he_lut(&Histogram::from_counts(counts)).unwrap();
        assert_eq!(map.map(0), 128);
        assert_eq!(map.map(255), 255);
    }

    #[test]
    fn lut_is_monotone() {
        let mut counts = [0u64; LEVELS];
        for (i, c) in counts.iter_mut().enumerate() {
            *c = (i as u64 * 13) % 41;
        }
        let map = he_lut(&Histogram::from_counts(counts)).unwrap();
        for k in 1..LEVELS {
            assert!(map.map(k as u8) >= map.map((k - 1) as u8));
        }
    }

    #[test]
    fn equalize_constant_image_goes_white() {
        let img = GrayImage::constant(3, 2, 42).unwrap();
        let out = equalize(&img);
        assert!(out.pixels().iter().all(|&p| p == 255));
    }

    #[test]
    fn equalize_ramp_is_near_identity() {
        let img = GrayImage::new(256, 1, (0..=255).collect()).unwrap();
        let out = equalize(&img);
        for k in 0..256usize {
            let expected = (255.0 * (k + 1) as f64 / 256.0).round() as u8;
            assert_eq!(out.pixels()[k], expected);
            assert!((out.pixels()[k] as i32 - k as i32).abs() <= 1);
        }
    }

    #[test]
    fn equalize_two_level_image() {
        let img = GrayImage::new(4, 1, vec![0, 255, 0, 255]).unwrap();
        let out = equalize(&img);
        assert_eq!(out.pixels(), &[128, 255, 128, 255]);
    }

    #[test]
    fn output_reaches_full_scale() {
        let img = GrayImage::new(5, 1, vec![10, 20, 20, 30, 40]).unwrap();
        assert_eq!(equalize(&img).max_level(), 255);
    }

    #[test]
    fn equalize_is_idempotent_within_one_level() {
        let pixels: Vec<u8> = (0..2000).map(|i| (((i * i) % 89) + 60) as u8).collect();
        let img = GrayImage::new(2000, 1, pixels).unwrap();
        let once = equalize(&img);
        let twice = equalize(&once);
        for (a, b) in once.pixels().iter().zip(twice.pixels()) {
            assert!((*a as i32 - *b as i32).abs() <= 1);
        }
    }
}
