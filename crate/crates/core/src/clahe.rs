//! Contrast-limited adaptive histogram equalization: per-tile clipped
//! equalization with bilinear blending between neighboring tile maps.

use crate::error::{Error, Result};
use crate::he::he_lut;
use crate::image::{histogram_of, round_to_level, GrayImage, Histogram};
use crate::params::ClaheParams;
use crate::LEVELS;

/// Caps every bin at `ceil(clip_limit * total / 256)` and spreads the
/// excess uniformly: `excess / 256` to every bin in one pass, with the
/// integer-division residue going to the lowest bins one unit each. The
/// total count is conserved exactly. `clip_limit` must exceed 1 (the
/// uniform height); infinity disables clipping.
pub fn clip_histogram(h: &Histogram, clip_limit: f64) -> Result<Histogram> {
    if h.total() == 0 {
        return Err(Error::EmptyHistogram);
    }
    if clip_limit.is_nan() || clip_limit <= 1.0 {
        return Err(Error::ClipLimit);
    }
    if clip_limit.is_infinite() {
        return Ok(h.clone());
    }

    let ceiling = (clip_limit * h.total() as f64 / LEVELS as f64).ceil() as u64;
    let mut counts = *h.counts();
    let mut excess = 0u64;
    for c in counts.iter_mut() {
        if *c > ceiling {
            excess += *c - ceiling;
            *c = ceiling;
        }
    }
    if excess > 0 {
        let per_bin = excess / LEVELS as u64;
        let residue = (excess % LEVELS as u64) as usize;
        for (i, c) in counts.iter_mut().enumerate() {
            *c += per_bin + u64::from(i < residue);
        }
    }
    Ok(Histogram::from_counts(counts))
}

/// Start offsets and sizes of a 1-D tile partition: `tiles` contiguous
/// spans of `extent / tiles` cells, the last span absorbing the
/// remainder.
fn partition(extent: u32, tiles: u32) -> Vec<(u32, u32)> {
    let base = extent / tiles;
    (0..tiles)
        .map(|i| {
            let start = i * base;
            let size = if i == tiles - 1 { extent - start } else { base };
            (start, size)
        })
        .collect()
}

/// For each pixel coordinate along one axis: the two neighboring tile
/// indices and the blend weight toward the second. Outside the first and
/// last tile centers both indices coincide (nearest).
fn blend_axis(spans: &[(u32, u32)], extent: u32) -> Vec<(usize, usize, f64)> {
    let centers: Vec<f64> = spans
        .iter()
        .map(|&(start, size)| start as f64 + (size as f64 - 1.0) / 2.0)
        .collect();
    (0..extent as usize)
        .map(|p| {
            let x = p as f64;
            if x <= centers[0] {
                return (0, 0, 0.0);
            }
            if x >= *centers.last().unwrap() {
                let last = centers.len() - 1;
                return (last, last, 0.0);
            }
            // centers are strictly increasing; find the bracketing pair
            let hi = centers.partition_point(|&c| c <= x);
            let lo = hi - 1;
            let t = (x - centers[lo]) / (centers[hi] - centers[lo]);
            (lo, hi, t)
        })
        .collect()
}

/// CLAHE over one image. Each tile's histogram is clipped and equalized
/// into its own LUT; every output pixel is the bilinear blend of the four
/// nearest tile maps evaluated at the pixel's input value, degrading to
/// linear or nearest lookup along the borders.
pub fn enhance_clahe(img: &GrayImage, params: &ClaheParams) -> Result<GrayImage> {
    if params.tiles_x == 0 || params.tiles_y == 0 {
        return Err(Error::TileTooSmall);
    }
    if img.width() / params.tiles_x < 2 || img.height() / params.tiles_y < 2 {
        return Err(Error::TileTooSmall);
    }
    if params.clip_limit.is_nan() || params.clip_limit <= 1.0 {
        return Err(Error::ClipLimit);
    }

    let cols = partition(img.width(), params.tiles_x);
    let rows = partition(img.height(), params.tiles_y);

    // One equalization LUT per tile, row-major over the tile grid.
    let mut luts: Vec<[u8; LEVELS]> = Vec::with_capacity(cols.len() * rows.len());
    for &(y0, th) in &rows {
        for &(x0, tw) in &cols {
            let mut pixels = Vec::with_capacity((tw * th) as usize);
            for y in y0..y0 + th {
                let row = y as usize * img.width() as usize;
                pixels.extend_from_slice(&img.pixels()[row + x0 as usize..row + (x0 + tw) as usize]);
            }
            let tile = GrayImage::new(tw, th, pixels).expect("tile dimensions are validated");
            let hist = histogram_of(&tile);
            let clipped = if params.clip_limit.is_finite() {
                clip_histogram(&hist, params.clip_limit)?
            } else {
                hist
            };
            luts.push(*he_lut(&clipped)?.as_array());
        }
    }

    let h_blend = blend_axis(&cols, img.width());
    let v_blend = blend_axis(&rows, img.height());
    let tiles_x = cols.len();

    let mut out = Vec::with_capacity(img.pixel_count());
    for (y, &(i0, i1, ty)) in v_blend.iter().enumerate() {
        let row = y * img.width() as usize;
        for (x, &(j0, j1, tx)) in h_blend.iter().enumerate() {
            let v = img.pixels()[row + x] as usize;
            if i0 == i1 && j0 == j1 {
                // Single-tile lookup: exact, no float rounding involved.
                out.push(luts[i0 * tiles_x + j0][v]);
                continue;
            }
            let f00 = luts[i0 * tiles_x + j0][v] as f64;
            let f01 = luts[i0 * tiles_x + j1][v] as f64;
            let f10 = luts[i1 * tiles_x + j0][v] as f64;
            let f11 = luts[i1 * tiles_x + j1][v] as f64;
            let top = f00 * (1.0 - tx) + f01 * tx;
            let bottom = f10 * (1.0 - tx) + f11 * tx;
            out.push(round_to_level(top * (1.0 - ty) + bottom * ty));
        }
    }
    GrayImage::new(img.width(), img.height(), out)
}
