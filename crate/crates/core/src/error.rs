//! Error type shared by the whole crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    /// Image with zero pixels.
    #[error("empty image")]
    EmptyImage,

    /// Pixel buffer length does not match the declared dimensions.
    #[error("pixel buffer has {actual} bytes, expected {width}x{height} = {expected}")]
    BadDimensions {
        width: u32,
        height: u32,
        expected: usize,
        actual: usize,
    },

    /// Histogram with zero total count.
    #[error("empty histogram")]
    EmptyHistogram,

    /// Constant image: the standard deviation is zero, so the
    /// hyper-kurtosis (and everything derived from it) is undefined.
    #[error("degenerate: constant image")]
    ConstantImage,

    /// Gamma outside the valid [0, 1] range.
    #[error("gamma {0} out of range [0, 1]")]
    InvalidGamma(f64),

    /// CLAHE clip limit at or below the uniform bin height.
    #[error("clip limit must exceed uniform height")]
    ClipLimit,

    /// CLAHE tile grid too fine for the image.
    #[error("tile too small")]
    TileTooSmall,

    /// Metric over images of different dimensions.
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    SizeMismatch(u32, u32, u32, u32),

    /// PSNR peak of zero in max-of-output mode.
    #[error("zero peak")]
    ZeroPeak,

    /// Corpus summary over zero usable reports.
    #[error("empty corpus")]
    EmptyCorpus,

    /// Phantom ellipse with a non-positive axis.
    #[error("degenerate ellipse axes ({0}, {1})")]
    DegenerateEllipse(f64, f64),

    /// Phantom intensity delta outside the low-contrast bound.
    #[error("ellipse delta {0} exceeds the low-contrast bound of 20")]
    DeltaTooLarge(i32),

    /// Phantom noise sigma negative or non-finite.
    #[error("invalid noise sigma {0}")]
    InvalidSigma(f64),

    /// Malformed PGM input.
    #[error("invalid pgm: {0}")]
    PgmFormat(String),

    /// PGM maxval other than 255.
    #[error("unsupported maxval {0}")]
    UnsupportedMaxval(u32),

    /// Report writer over zero records.
    #[error("empty report")]
    EmptyReport,
}
