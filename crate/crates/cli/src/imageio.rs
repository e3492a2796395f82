//! File-format adapter for the CLI.
//!
//! PGM P5 is the canonical container with a bit-exact round trip; PNG is
//! a convenience for interchange with other tools and guarantees pixel
//! equality only. Format selection goes by file extension.

use std::path::Path;

use anyhow::Context;

use histeq_core::pgm::{read_pgm, write_pgm};
use histeq_core::GrayImage;

fn is_png(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("png"))
        .unwrap_or(false)
}

/// Loads a grayscale image from PGM or PNG. PNG inputs are converted to
/// 8-bit luma.
pub fn load_gray(path: &Path) -> anyhow::Result<GrayImage> {
    if is_png(path) {
        let decoded = image::open(path)
            .with_context(|| format!("decoding {}", path.display()))?
            .into_luma8();
        GrayImage::new(decoded.width(), decoded.height(), decoded.into_raw())
            .with_context(|| format!("converting {}", path.display()))
    } else {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        read_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Saves a grayscale image as canonical PGM, or PNG when the target
/// extension says so.
pub fn save_gray(path: &Path, img: &GrayImage) -> anyhow::Result<()> {
    if is_png(path) {
        let buffer = image::GrayImage::from_raw(img.width(), img.height(), img.pixels().to_vec())
            .expect("dimensions match the pixel buffer");
        buffer
            .save_with_format(path, image::ImageFormat::Png)
            .with_context(|| format!("encoding {}", path.display()))
    } else {
        std::fs::write(path, write_pgm(img)).with_context(|| format!("writing {}", path.display()))
    }
}
