//! Grayscale contrast enhancement toolkit.
//!
//! Three equalizers over 8-bit grayscale images:
//!
//! * [`he::equalize`] — classical global histogram equalization,
//! * [`clahe::enhance_clahe`] — contrast-limited adaptive histogram
//!   equalization over a tile grid with bilinear blending,
//! * [`hkmdhe::enhance_hkmdhe`] — duo-histogram equalization around a
//!   split level derived from the hyper-kurtosis (sixth standardized
//!   moment) of the intensity distribution.
//!
//! Plus the quality metrics used to compare them ([`metrics`]), a
//! deterministic low-contrast phantom generator ([`phantom`]), binary PGM
//! I/O ([`pgm`]) and machine-readable run reports ([`report`]).
//!
//! All operations are pure functions over immutable values; results never
//! depend on evaluation order, so batch drivers are free to process
//! distinct images in parallel.

pub mod clahe;
pub mod error;
pub mod he;
pub mod hkmdhe;
pub mod image;
pub mod metrics;
pub mod params;
pub mod pgm;
pub mod phantom;
pub mod report;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use image::{apply_lut, cdf_of, histogram_of, pmf_of, Cdf, GrayImage, Histogram, Pmf};
pub use params::{
    enhance, ClaheParams, Enhanced, EnhanceParams, GammaMode, Method, MmScale, OnConstant,
    PeakMode,
};
pub use stats::{moment_stats, select_split, Branch, MomentStats, SplitDecision};

/// Number of representable gray levels (8-bit).
pub const LEVELS: usize = 256;

/// Maximum gray level, `LEVELS - 1`.
pub const MAX_LEVEL: u8 = 255;
