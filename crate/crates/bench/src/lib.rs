//! Shared fixtures for the equalizer benchmarks.

use histeq_core::phantom::{generate, Ellipse, PhantomSpec};
use histeq_core::GrayImage;

/// Low-contrast phantom scaled up to a realistic slice size.
pub fn bench_image(side: u32) -> GrayImage {
    let c = side as f64 / 2.0;
    let spec = PhantomSpec {
        width: side,
        height: side,
        seed: 7,
        background_level: 24,
        ellipses: vec![
            Ellipse {
                center: (c, c),
                axes: (c * 0.8, c * 0.66),
                angle: 0.125,
                delta: 16,
            },
            Ellipse {
                center: (c, c),
                axes: (c * 0.72, c * 0.58),
                angle: 0.125,
                delta: -10,
            },
            Ellipse {
                center: (c - side as f64 * 0.09, c),
                axes: (c * 0.1, c * 0.22),
                angle: 0.0,
                delta: -6,
            },
        ],
        noise_sigma: 1.25,
    };
    generate(&spec).expect("valid bench spec")
}
