//! Quality metrics: RMSE, PSNR and the modified-mean brightness error,
//! plus the mean ± std aggregation used by corpus comparisons.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::params::{EnhanceParams, PeakMode};
use crate::stats::select_split;
use crate::MAX_LEVEL;

/// PSNR value in decibels, or the explicit infinite flag for identical
/// images (zero RMSE).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Db(f64),
    Infinite,
}

impl Psnr {
    pub fn db(&self) -> Option<f64> {
        match self {
            Psnr::Db(v) => Some(*v),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Psnr::Infinite)
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Db(v) => write!(f, "{v}"),
            Psnr::Infinite => f.write_str("infinite"),
        }
    }
}

// JSON form: a number in dB, or the string "infinite" — never a bare
// numeric infinity.
impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Db(v) => s.serialize_f64(*v),
            Psnr::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Psnr::Db(v)),
            Raw::Text(t) if t == "infinite" => Ok(Psnr::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid psnr '{t}'"))),
        }
    }
}

fn check_dims(x: &GrayImage, y: &GrayImage) -> Result<()> {
    if x.dimensions() != y.dimensions() {
        return Err(Error::SizeMismatch(
            x.width(),
            x.height(),
            y.width(),
            y.height(),
        ));
    }
    Ok(())
}

/// Root mean square pixel difference, in gray levels.
pub fn rmse(x: &GrayImage, y: &GrayImage) -> Result<f64> {
    check_dims(x, y)?;
    let sum: f64 = x
        .pixels()
        .iter()
        .zip(y.pixels())
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok((sum / x.pixel_count() as f64).sqrt())
}

/// Peak signal-to-noise ratio `20 log10(peak / rmse)`. The default peak
/// is the maximum pixel of the output image `y`; `Fixed255` uses the
/// conventional full-scale peak instead. Identical images yield the
/// infinite flag; a zero peak in max-of-output mode is an error.
pub fn psnr(x: &GrayImage, y: &GrayImage, peak_mode: PeakMode) -> Result<Psnr> {
    let err = rmse(x, y)?;
    if err == 0.0 {
        return Ok(Psnr::Infinite);
    }
    let peak = match peak_mode {
        PeakMode::MaxOfOutput => {
            let m = y.max_level();
            if m == 0 {
                return Err(Error::ZeroPeak);
            }
            m as f64
        }
        PeakMode::Fixed255 => 255.0,
    };
    Ok(Psnr::Db(20.0 * (peak / err).log10()))
}

/// Modified mean of one image (before rounding), in gray levels, under
/// the split policy in `params`.
pub fn modified_mean(img: &GrayImage, params: &EnhanceParams) -> Result<f64> {
    Ok(select_split(img, params)?.mm_raw)
}

/// Absolute modified-mean brightness error: |mm(x) - mm(y)| normalized by
/// 255, each modified mean re-derived per image under the same tau/gamma
/// policy. Small values mean the enhancement preserved brightness.
pub fn ammbe(x: &GrayImage, y: &GrayImage, params: &EnhanceParams) -> Result<f64> {
    let mx = modified_mean(x, params)?;
    let my = modified_mean(y, params)?;
    Ok((mx - my).abs() / f64::from(MAX_LEVEL))
}

/// PSNR, RMSE and AMMBE for one (input, output) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub psnr_db: Psnr,
    pub rmse: f64,
    pub ammbe: f64,
}

/// All three metrics for one (input, output) pair under one parameter set.
pub fn measure(input: &GrayImage, output: &GrayImage, params: &EnhanceParams) -> Result<MetricsReport> {
    Ok(MetricsReport {
        psnr_db: psnr(input, output, params.peak_mode)?,
        rmse: rmse(input, output)?,
        ammbe: ammbe(input, output, params)?,
    })
}

/// Mean and population standard deviation of PSNR and AMMBE over one
/// method's corpus. Reports with an infinite PSNR are excluded and
/// counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub ammbe_mean: f64,
    pub ammbe_std: f64,
    pub samples: usize,
    pub excluded_infinite: usize,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates a corpus of reports. Errors when no finite-PSNR report
/// remains.
pub fn summarize(reports: &[MetricsReport]) -> Result<MetricsSummary> {
    let finite: Vec<&MetricsReport> = reports.iter().filter(|r| !r.psnr_db.is_infinite()).collect();
    let excluded = reports.len() - finite.len();
    if finite.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let psnrs: Vec<f64> = finite.iter().map(|r| r.psnr_db.db().unwrap()).collect();
    let ammbes: Vec<f64> = finite.iter().map(|r| r.ammbe).collect();
    let (psnr_mean, psnr_std) = mean_std(&psnrs);
    let (ammbe_mean, ammbe_std) = mean_std(&ammbes);
    Ok(MetricsSummary {
        psnr_mean,
        psnr_std,
        ammbe_mean,
        ammbe_std,
        samples: finite.len(),
        excluded_infinite: excluded,
    })
}
