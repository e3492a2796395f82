//! Deterministic synthetic low-contrast phantoms: elliptical
//! "skull/brain" compositions over a near-black background with additive
//! Gaussian noise, standing in for clinical CT slices.
//!
//! Reproducibility contract — the same spec always produces the same
//! bytes, on every platform:
//!
//! * PRNG: [`SplitMix64`](crate::rng::SplitMix64), seeded from the spec.
//! * Noise: one sample per pixel in row-major order; each sample is the
//!   sum of twelve consecutive uniform draws minus 6 (Irwin-Hall
//!   approximation to a standard normal), scaled by `noise_sigma`. Only
//!   IEEE additions and multiplications, so results are bit-stable.
//! * Ellipse rotation uses fixed-degree sine/cosine series (pure
//!   arithmetic, no libm).
//! * Final value: background plus the deltas of every covering ellipse
//!   plus noise, rounded half away from zero, clamped to [0, 255].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{round_to_level, GrayImage};
use crate::rng::SplitMix64;

/// Largest allowed per-ellipse intensity delta; keeps phantoms inside the
/// low-contrast regime.
pub const MAX_DELTA: i32 = 20;

/// Axis-rotated filled ellipse with an additive intensity delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    /// Center in pixel coordinates (x, y).
    pub center: (f64, f64),
    /// Semi-axes in pixels (a, b), both positive.
    pub axes: (f64, f64),
    /// Rotation in radians.
    pub angle: f64,
    /// Intensity added to every covered pixel, |delta| <= 20.
    pub delta: i32,
}

/// Complete description of one phantom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    pub background_level: u8,
    pub ellipses: Vec<Ellipse>,
    pub noise_sigma: f64,
}

/// Checked-in corpus manifest: a versioned list of phantom specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub schema_version: u32,
    pub phantoms: Vec<PhantomSpec>,
}

impl CorpusManifest {
    pub fn from_json(bytes: &[u8]) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }
}

/// Sine by an 8-term odd Taylor series. Deterministic across platforms;
/// absolute error under 1e-10 for |x| <= pi/2, which is far below the
/// geometric resolution of a pixel grid.
fn sin_det(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..8 {
        term *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
    }
    sum
}

fn cos_det(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..8 {
        term *= -x2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        sum += term;
    }
    sum
}

/// One approximately standard-normal draw: sum of 12 uniforms minus 6.
fn gaussian_ih12(rng: &mut SplitMix64) -> f64 {
    let mut acc = 0.0;
    for _ in 0..12 {
        acc += rng.next_f64();
    }
    acc - 6.0
}

fn validate(spec: &PhantomSpec) -> Result<()> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::EmptyImage);
    }
    if !spec.noise_sigma.is_finite() || spec.noise_sigma < 0.0 {
        return Err(Error::InvalidSigma(spec.noise_sigma));
    }
    for e in &spec.ellipses {
        let positive = |a: f64| a.is_finite() && a > 0.0;
        if !positive(e.axes.0) || !positive(e.axes.1) {
            return Err(Error::DegenerateEllipse(e.axes.0, e.axes.1));
        }
        if e.delta.abs() > MAX_DELTA {
            return Err(Error::DeltaTooLarge(e.delta));
        }
    }
    Ok(())
}

/// Renders one phantom. Identical spec, identical bytes.
pub fn generate(spec: &PhantomSpec) -> Result<GrayImage> {
    validate(spec)?;

    // Precompute the rotation of each ellipse once.
    let rotations: Vec<(f64, f64)> = spec
        .ellipses
        .iter()
        .map(|e| (cos_det(e.angle), sin_det(e.angle)))
        .collect();

    let mut rng = SplitMix64::new(spec.seed);
    let mut pixels = Vec::with_capacity(spec.width as usize * spec.height as usize);
    for y in 0..spec.height {
        for x in 0..spec.width {
            let mut level = spec.background_level as i32;
            for (e, &(ca, sa)) in spec.ellipses.iter().zip(&rotations) {
                let dx = x as f64 - e.center.0;
                let dy = y as f64 - e.center.1;
                let u = (dx * ca + dy * sa) / e.axes.0;
                let v = (-dx * sa + dy * ca) / e.axes.1;
                if u * u + v * v <= 1.0 {
                    level += e.delta;
                }
            }
            let value = if spec.noise_sigma > 0.0 {
                level as f64 + spec.noise_sigma * gaussian_ih12(&mut rng)
            } else {
                level as f64
            };
            pixels.push(round_to_level(value));
        }
    }
    GrayImage::new(spec.width, spec.height, pixels)
}

/// The default 20-phantom corpus, seeds 0..=19. Per-index jitter uses
/// only small integer-derived offsets so the serialized manifest
/// round-trips exactly.
pub fn default_corpus() -> Vec<PhantomSpec> {
    (0..20).map(default_phantom).collect()
}

fn default_phantom(index: u32) -> PhantomSpec {
    let jx = ((index * 7) % 13) as f64 - 6.0;
    let jy = ((index * 5) % 11) as f64 - 5.0;
    let tilt = (((index * 3) % 9) as f64 - 4.0) * 0.0625;
    let grow = ((index % 5) as f64 - 2.0) * 2.0;
    let cx = 96.0 + jx;
    let cy = 96.0 + jy;
    PhantomSpec {
        width: 192,
        height: 192,
        seed: index as u64,
        background_level: 24,
        ellipses: vec![
            // skull disc
            Ellipse {
                center: (cx, cy),
                axes: (78.0 + grow, 64.0 + grow),
                angle: tilt,
                delta: 16,
            },
            // brain interior, leaving a bright rim
            Ellipse {
                center: (cx, cy),
                axes: (70.0 + grow, 56.0 + grow),
                angle: tilt,
                delta: -10,
            },
            // ventricles
            Ellipse {
                center: (cx - 18.0, cy - 6.0),
                axes: (10.0, 22.0),
                angle: tilt,
                delta: -6,
            },
            Ellipse {
                center: (cx + 18.0, cy - 6.0),
                axes: (10.0, 22.0),
                angle: -tilt,
                delta: -6,
            },
            // bright lesion
            Ellipse {
                center: (cx + 10.0 + jy, cy + 22.0),
                axes: (9.0, 7.0),
                angle: 0.0,
                delta: 12,
            },
        ],
        noise_sigma: 1.25,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::histogram_of;
    use crate::stats::moment_stats;

    #[test]
    fn sigma_zero_no_ellipses_is_constant_background() {
        let spec = PhantomSpec {
            width: 16,
            height: 9,
            seed: 123,
            background_level: 77,
            ellipses: vec![],
            noise_sigma: 0.0,
        };
        let img = generate(&spec).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 77));
    }

    #[test]
    fn same_spec_same_bytes() {
        let spec = default_corpus().remove(3);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_axes_rejected() {
        let spec = PhantomSpec {
            width: 8,
            height: 8,
            seed: 0,
            background_level: 10,
            ellipses: vec![Ellipse {
                center: (4.0, 4.0),
                axes: (0.0, 3.0),
                angle: 0.0,
                delta: 5,
            }],
            noise_sigma: 0.0,
        };
        assert!(matches!(generate(&spec), Err(Error::DegenerateEllipse(..))));
    }

    #[test]
    fn oversized_delta_rejected() {
        let spec = PhantomSpec {
            width: 8,
            height: 8,
            seed: 0,
            background_level: 10,
            ellipses: vec![Ellipse {
                center: (4.0, 4.0),
                axes: (2.0, 3.0),
                angle: 0.0,
                delta: 21,
            }],
            noise_sigma: 0.0,
        };
        assert_eq!(generate(&spec).unwrap_err(), Error::DeltaTooLarge(21));
    }

    #[test]
    fn default_corpus_is_low_contrast_and_non_constant() {
        let corpus = default_corpus();
        assert_eq!(corpus.len(), 20);
        for (i, spec) in corpus.iter().enumerate() {
            assert_eq!(spec.seed, i as u64);
            let img = generate(spec).unwrap();
            let distinct = histogram_of(&img)
                .counts()
                .iter()
                .filter(|&&c| c > 0)
                .count();
            assert!(distinct <= 64, "phantom {i} has {distinct} levels");
            assert!(distinct >= 2, "phantom {i} is constant");
            // beta must exist for every default phantom
            assert!(moment_stats(&img).is_ok());
            // dynamic range stays within a quarter of the full scale
            let lo = img.pixels().iter().min().unwrap();
            let hi = img.pixels().iter().max().unwrap();
            assert!((hi - lo) as u32 <= 64, "phantom {i} range {lo}..{hi}");
        }
    }

    #[test]
    fn manifest_round_trips_exactly() {
        let manifest = CorpusManifest {
            schema_version: 1,
            phantoms: default_corpus(),
        };
        let json = manifest.to_json();
        let back = CorpusManifest::from_json(&json).unwrap();
        assert_eq!(back, manifest);
    }

    #[test]
    fn series_trig_close_to_libm() {
        for i in -20..=20 {
            let x = i as f64 * 0.05;
            assert!((sin_det(x) - x.sin()).abs() < 1e-10);
            assert!((cos_det(x) - x.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn ih12_noise_moments_are_sane() {
        let mut rng = SplitMix64::new(999);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let z = gaussian_ih12(&mut rng);
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
