//! Moment statistics and the split-level selection for the duo-histogram
//! equalizer.
//!
//! The split level (the "modified mean") is derived from the
//! hyper-kurtosis `beta`, the sixth standardized central moment of the
//! intensity distribution. Distributions close to a flat or two-point
//! shape have small beta (it is always >= 1); heavy-tailed histograms —
//! the typical low-contrast CT profile of a dark background plus a bright
//! minority — have large beta. Below the threshold `tau` the split is
//! `sqrt(mean + beta)`; at or above it, a power-law transform of the mean
//! with exponent gamma in [0, 1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{apply_lut, histogram_of, pmf_of, GrayImage, Histogram};
use crate::params::{EnhanceParams, GammaMode, MmScale};
use crate::MAX_LEVEL;

/// Mean, standard deviation and hyper-kurtosis of an intensity
/// distribution, all on the native [0, 255] gray-level scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentStats {
    pub mean: f64,
    pub sigma: f64,
    /// Sixth standardized central moment; >= 1 for any non-constant
    /// distribution, 15 for a Gaussian.
    pub beta: f64,
}

/// Which modified-mean formula produced the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `beta < tau`: square-root rule.
    #[serde(rename = "sqrt")]
    Sqrt,
    /// `beta >= tau`: power-law transform of the mean.
    #[serde(rename = "power-law")]
    PowerLaw,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Sqrt => "sqrt",
            Branch::PowerLaw => "power-law",
        })
    }
}

/// Record of how the split level was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitDecision {
    pub beta: f64,
    pub branch: Branch,
    /// Exponent used by the power-law branch; absent on the sqrt branch.
    pub gamma_used: Option<f64>,
    /// Modified mean before rounding and clamping, in gray levels.
    pub mm_raw: f64,
    /// Final split level, clamped to [1, 254] so both segments are
    /// non-empty in level space.
    pub split_level: u8,
}

/// Moment statistics of an image. Errors on a constant image, where the
/// standard deviation is zero and beta is undefined.
pub fn moment_stats(img: &GrayImage) -> Result<MomentStats> {
    moment_stats_of_histogram(&histogram_of(img))
}

/// Histogram-weighted moments, shared by everything that already holds a
/// histogram.
pub fn moment_stats_of_histogram(h: &Histogram) -> Result<MomentStats> {
    let pmf = pmf_of(h)?;
    let mean: f64 = pmf
        .probs()
        .iter()
        .enumerate()
        .map(|(v, &p)| v as f64 * p)
        .sum();
    let mut m2 = 0.0;
    let mut m6 = 0.0;
    for (v, &p) in pmf.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let d = v as f64 - mean;
        let d2 = d * d;
        m2 += p * d2;
        m6 += p * d2 * d2 * d2;
    }
    if m2 == 0.0 {
        return Err(Error::ConstantImage);
    }
    Ok(MomentStats {
        mean,
        sigma: m2.sqrt(),
        beta: m6 / (m2 * m2 * m2),
    })
}

fn clamp_split(mm_raw: f64) -> u8 {
    (mm_raw.round().clamp(1.0, 254.0)) as u8
}

/// Modified mean on the sqrt branch under the given scale convention.
fn sqrt_decision(stats: &MomentStats, mm_scale: MmScale) -> SplitDecision {
    let mm_raw = match mm_scale {
        MmScale::Native => (stats.mean + stats.beta).sqrt(),
        MmScale::Normalized => 255.0 * (stats.mean / 255.0 + stats.beta).sqrt(),
    };
    SplitDecision {
        beta: stats.beta,
        branch: Branch::Sqrt,
        gamma_used: None,
        mm_raw,
        split_level: clamp_split(mm_raw),
    }
}

/// Modified mean on the power-law branch under the given scale convention.
fn power_decision(stats: &MomentStats, gamma: f64, mm_scale: MmScale) -> SplitDecision {
    let mm_raw = match mm_scale {
        MmScale::Native => 255.0 * (stats.mean / 255.0).powf(gamma),
        MmScale::Normalized => stats.mean.powf(gamma),
    };
    SplitDecision {
        beta: stats.beta,
        branch: Branch::PowerLaw,
        gamma_used: Some(gamma),
        mm_raw,
        split_level: clamp_split(mm_raw),
    }
}

/// Split decision for a fixed gamma (no search). `gamma` is ignored on
/// the sqrt branch.
pub(crate) fn select_split_fixed(
    stats: &MomentStats,
    tau: f64,
    gamma: f64,
    mm_scale: MmScale,
) -> SplitDecision {
    if stats.beta < tau {
        sqrt_decision(stats, mm_scale)
    } else {
        power_decision(stats, gamma, mm_scale)
    }
}

/// Candidate exponents for the gamma search: 0.05, 0.10, ..., 1.00.
fn gamma_grid() -> impl Iterator<Item = f64> {
    (1..=20).map(|i| i as f64 / 20.0)
}

/// Chooses the split level for an image.
///
/// Branching is exactly `beta < tau` (sqrt) versus `beta >= tau`
/// (power-law). In search mode the power-law exponent is picked from the
/// grid 0.05..=1.00 by minimizing the modified-mean brightness error of
/// the duo-equalized output against the input, each candidate evaluated
/// under its own fixed gamma; ties go to the larger exponent.
pub fn select_split(img: &GrayImage, params: &EnhanceParams) -> Result<SplitDecision> {
    params.gamma.validate()?;
    let hist = histogram_of(img);
    let stats = moment_stats_of_histogram(&hist)?;
    if stats.beta < params.tau {
        return Ok(sqrt_decision(&stats, params.mm_scale));
    }
    match params.gamma {
        GammaMode::Fixed(g) => Ok(power_decision(&stats, g, params.mm_scale)),
        GammaMode::Search => search_gamma(img, &hist, &stats, params),
    }
}

/// Grid search over gamma, scoring each candidate by the brightness error
/// |mm(input) - mm(output)| / 255 of the resulting duo-equalized image.
fn search_gamma(
    img: &GrayImage,
    hist: &Histogram,
    stats: &MomentStats,
    params: &EnhanceParams,
) -> Result<SplitDecision> {
    let mut best: Option<(f64, SplitDecision)> = None;
    for g in gamma_grid() {
        let candidate = power_decision(stats, g, params.mm_scale);
        let duo = crate::hkmdhe::duo_lut(hist, &candidate)?;
        let output = apply_lut(img, duo.lut());
        let score = match mm_error_fixed(stats, &output, params.tau, g, params.mm_scale) {
            Ok(s) => s,
            // A collapsed (constant) output cannot be scored; treat as
            // the worst possible candidate.
            Err(Error::ConstantImage) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((b, _)) => score <= *b,
        };
        if better {
            best = Some((score, candidate));
        }
    }
    Ok(best.expect("gamma grid is non-empty").1)
}

/// |mm(input) - mm(output)| / 255 with both modified means taken under a
/// fixed gamma policy.
fn mm_error_fixed(
    input_stats: &MomentStats,
    output: &GrayImage,
    tau: f64,
    gamma: f64,
    mm_scale: MmScale,
) -> Result<f64> {
    let out_stats = moment_stats(output)?;
    let mm_in = select_split_fixed(input_stats, tau, gamma, mm_scale).mm_raw;
    let mm_out = select_split_fixed(&out_stats, tau, gamma, mm_scale).mm_raw;
    Ok((mm_in - mm_out).abs() / f64::from(MAX_LEVEL))
}
