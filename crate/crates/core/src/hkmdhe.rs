//! Duo-histogram equalization around the hyper-kurtosis-derived split.
//!
//! The histogram is cut at the split level S (which belongs to the lower
//! segment); each segment is equalized independently into its own output
//! range, so no pixel crosses the split in the wrong direction and the
//! overall brightness anchor is preserved:
//!
//! * lower, `t <= S`:  `lut[t] = round(S * cdf_lo(t))`
//! * upper, `t > S`:   `lut[t] = round((255 - S) * cdf_hi(t) + S)`
//!
//! where each `cdf` is the cumulative share of that segment's own pixel
//! mass. A segment with zero pixel mass keeps the identity map on its
//! levels.

use crate::error::{Error, Result};
use crate::image::{apply_lut, histogram_of, GrayImage, Histogram};
use crate::params::EnhanceParams;
use crate::stats::{select_split, SplitDecision};
use crate::LEVELS;

/// Split level plus the combined per-segment LUT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuoLut {
    split_level: u8,
    lut: [u8; LEVELS],
}

impl DuoLut {
    pub fn split_level(&self) -> u8 {
        self.split_level
    }

    pub fn lut(&self) -> &[u8; LEVELS] {
        &self.lut
    }
}

/// Two-segment equalization map over an arbitrary alphabet of gray
/// levels (`counts.len()` levels, at most 256). Level `split` belongs to
/// the lower segment; `split` must satisfy `1 <= split <= levels - 2`.
///
/// This is the full algorithm; [`duo_lut`] wraps it for the 256-level
/// histogram type.
pub fn duo_lut_over(counts: &[u64], split: usize) -> Vec<u8> {
    let levels = counts.len();
    assert!((3..=LEVELS).contains(&levels), "alphabet size out of range");
    assert!((1..=levels - 2).contains(&split), "split {split} out of range");

    let top = (levels - 1) as f64;
    let s = split as f64;
    let mut lut: Vec<u8> = (0..levels).map(|t| t as u8).collect();

    let lower_mass: u64 = counts[..=split].iter().sum();
    if lower_mass > 0 {
        let mut acc = 0u64;
        for t in 0..=split {
            acc += counts[t];
            let cdf = acc as f64 / lower_mass as f64;
            lut[t] = (s * cdf).round() as u8;
        }
    }

    let upper_mass: u64 = counts[split + 1..].iter().sum();
    if upper_mass > 0 {
        let mut acc = 0u64;
        for t in split + 1..levels {
            acc += counts[t];
            let cdf = acc as f64 / upper_mass as f64;
            // Single rounding of the combined expression.
            lut[t] = ((top - s) * cdf + s).round() as u8;
        }
    }

    lut
}

/// Builds the duo-histogram LUT for a 256-level histogram and a split
/// decision. Errors on an empty histogram.
pub fn duo_lut(h: &Histogram, split: &SplitDecision) -> Result<DuoLut> {
    if h.total() == 0 {
        return Err(Error::EmptyHistogram);
    }
    let lut_vec = duo_lut_over(h.counts(), split.split_level as usize);
    let mut lut = [0u8; LEVELS];
    lut.copy_from_slice(&lut_vec);
    Ok(DuoLut {
        split_level: split.split_level,
        lut,
    })
}

/// Full duo-histogram enhancement of one image: select the split, build
/// the LUT, remap. Returns the split decision alongside the output so
/// callers can log which branch ran.
pub fn enhance_hkmdhe(
    img: &GrayImage,
    params: &EnhanceParams,
) -> Result<(GrayImage, SplitDecision)> {
    let split = select_split(img, params)?;
    let duo = duo_lut(&histogram_of(img), &split)?;
    Ok((apply_lut(img, duo.lut()), split))
}
