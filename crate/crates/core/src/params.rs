//! Shared enhancement configuration and the method dispatcher.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::stats::SplitDecision;

/// Enhancement method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    He,
    Clahe,
    Hkmdhe,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::He => "he",
            Method::Clahe => "clahe",
            Method::Hkmdhe => "hkmdhe",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "he" => Ok(Method::He),
            "clahe" => Ok(Method::Clahe),
            "hkmdhe" => Ok(Method::Hkmdhe),
            other => Err(format!("unknown method '{other}' (expected he, clahe or hkmdhe)")),
        }
    }
}

/// Gamma policy for the power-law branch of the split selection: a fixed
/// exponent in [0, 1], or a grid search that minimizes the modified-mean
/// brightness error of the enhanced output against the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    Fixed(f64),
    Search,
}

impl GammaMode {
    pub fn validate(&self) -> Result<()> {
        if let GammaMode::Fixed(g) = self {
            if !(0.0..=1.0).contains(g) || g.is_nan() {
                return Err(Error::InvalidGamma(*g));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GammaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaMode::Fixed(g) => write!(f, "{g}"),
            GammaMode::Search => f.write_str("search"),
        }
    }
}

impl FromStr for GammaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "search" {
            return Ok(GammaMode::Search);
        }
        let g: f64 = s
            .parse()
            .map_err(|_| format!("gamma must be a number in [0, 1] or 'search', got '{s}'"))?;
        if !(0.0..=1.0).contains(&g) {
            return Err(format!("gamma {g} out of range [0, 1]"));
        }
        Ok(GammaMode::Fixed(g))
    }
}

// JSON form: a bare number for a fixed gamma, the string "search" otherwise.
impl Serialize for GammaMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GammaMode::Fixed(g) => s.serialize_f64(*g),
            GammaMode::Search => s.serialize_str("search"),
        }
    }
}

impl<'de> Deserialize<'de> for GammaMode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(g) => Ok(GammaMode::Fixed(g)),
            Raw::Text(t) if t == "search" => Ok(GammaMode::Search),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid gamma '{t}'"))),
        }
    }
}

/// Intensity scale on which the mean enters the modified-mean formulas.
///
/// The formulas are ambiguous about whether the mean is taken in gray
/// levels or normalized to [0, 1], so both readings are implemented:
///
/// * `Native` (default): square-root rule on the gray-level mean,
///   `sqrt(m + beta)`; power-law applied to the normalized mean and
///   rescaled, `255 * (m / 255)^gamma`. This pairing yields an interior
///   split point on both branches.
/// * `Normalized`: the flipped pair — square-root on the normalized mean
///   rescaled, `255 * sqrt(m / 255 + beta)` (always clamps high, kept for
///   comparison), and power-law on the gray-level mean, `m^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MmScale {
    #[default]
    Native,
    Normalized,
}

impl fmt::Display for MmScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MmScale::Native => "native",
            MmScale::Normalized => "normalized",
        })
    }
}

impl FromStr for MmScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "native" => Ok(MmScale::Native),
            "normalized" => Ok(MmScale::Normalized),
            other => Err(format!("unknown mm-scale '{other}' (expected native or normalized)")),
        }
    }
}

/// Peak convention for PSNR: the maximum pixel of the output image, or
/// the fixed full-scale value 255.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PeakMode {
    #[default]
    #[serde(rename = "max-output")]
    MaxOfOutput,
    #[serde(rename = "fixed255")]
    Fixed255,
}

impl fmt::Display for PeakMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeakMode::MaxOfOutput => "max-output",
            PeakMode::Fixed255 => "fixed255",
        })
    }
}

impl FromStr for PeakMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "max-output" => Ok(PeakMode::MaxOfOutput),
            "fixed255" => Ok(PeakMode::Fixed255),
            other => Err(format!(
                "unknown peak-mode '{other}' (expected max-output or fixed255)"
            )),
        }
    }
}

/// Behavior when a constant image reaches the duo-histogram equalizer,
/// where the split is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnConstant {
    #[default]
    Error,
    Passthrough,
}

impl fmt::Display for OnConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OnConstant::Error => "error",
            OnConstant::Passthrough => "passthrough",
        })
    }
}

impl FromStr for OnConstant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "error" => Ok(OnConstant::Error),
            "passthrough" => Ok(OnConstant::Passthrough),
            other => Err(format!(
                "unknown on-constant policy '{other}' (expected error or passthrough)"
            )),
        }
    }
}

/// CLAHE tile grid and clip limit.
///
/// The clip limit is a multiple of the uniform tile-bin height;
/// `f64::INFINITY` disables clipping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub tiles_x: u32,
    pub tiles_y: u32,
    #[serde(with = "clip_limit_serde")]
    pub clip_limit: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            tiles_x: 8,
            tiles_y: 8,
            clip_limit: 2.0,
        }
    }
}

/// JSON form of the clip limit: a number, or the string "inf" (bare
/// numeric infinities are not representable in JSON).
mod clip_limit_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid clip limit '{t}'"))),
        }
    }
}

/// Full set of tunables for one enhancement run. Every field is echoed
/// into the run record so any output can be reproduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhanceParams {
    pub method: Method,
    pub tau: f64,
    pub gamma: GammaMode,
    pub mm_scale: MmScale,
    pub clahe: ClaheParams,
    pub peak_mode: PeakMode,
    pub on_constant: OnConstant,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self {
            method: Method::Hkmdhe,
            tau: 3.0,
            gamma: GammaMode::Fixed(0.75),
            mm_scale: MmScale::Native,
            clahe: ClaheParams::default(),
            peak_mode: PeakMode::MaxOfOutput,
            on_constant: OnConstant::Error,
        }
    }
}

impl EnhanceParams {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Result of [`enhance`]: the output image, the split decision when the
/// duo-histogram path ran, and whether a constant input was passed
/// through unchanged.
#[derive(Debug, Clone)]
pub struct Enhanced {
    pub image: GrayImage,
    pub split: Option<SplitDecision>,
    pub constant_passthrough: bool,
}

/// Runs the method selected in `params` over one image.
pub fn enhance(img: &GrayImage, params: &EnhanceParams) -> Result<Enhanced> {
    params.gamma.validate()?;
    match params.method {
        Method::He => Ok(Enhanced {
            image: crate::he::equalize(img),
            split: None,
            constant_passthrough: false,
        }),
        Method::Clahe => Ok(Enhanced {
            image: crate::clahe::enhance_clahe(img, &params.clahe)?,
            split: None,
            constant_passthrough: false,
        }),
        Method::Hkmdhe => match crate::hkmdhe::enhance_hkmdhe(img, params) {
            Ok((image, split)) => Ok(Enhanced {
                image,
                split: Some(split),
                constant_passthrough: false,
            }),
            Err(Error::ConstantImage) if params.on_constant == OnConstant::Passthrough => {
                Ok(Enhanced {
                    image: img.clone(),
                    split: None,
                    constant_passthrough: true,
                })
            }
            Err(e) => Err(e),
        },
    }
}
