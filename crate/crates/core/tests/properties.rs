//! Property tests over randomized images and histograms.

use proptest::prelude::*;

use histeq_core::clahe::{clip_histogram, enhance_clahe};
use histeq_core::he::{equalize, he_lut};
use histeq_core::hkmdhe::{duo_lut, duo_lut_over, enhance_hkmdhe};
use histeq_core::metrics::rmse;
use histeq_core::pgm::{read_pgm, write_pgm};
use histeq_core::stats::{moment_stats, Branch, SplitDecision};
use histeq_core::{
    apply_lut, histogram_of, ClaheParams, EnhanceParams, GrayImage, Histogram, LEVELS,
};

/// Textbook two-segment equalization, written independently of the
/// library path: materialize each sub-histogram, build its full CDF,
/// then map its range.
fn oracle_duo(counts: &[u64], split: usize) -> Vec<u8> {
    let levels = counts.len();
    let top = (levels - 1) as f64;
    let mut lut: Vec<u8> = (0..levels as u32).map(|t| t as u8).collect();

    let lower: Vec<u64> = counts[..=split].to_vec();
    let lower_total: u64 = lower.iter().sum();
    if lower_total > 0 {
        let mut cdf = Vec::with_capacity(lower.len());
        let mut acc = 0u64;
        for &c in &lower {
            acc += c;
            cdf.push(acc as f64 / lower_total as f64);
        }
        for (t, &c) in cdf.iter().enumerate() {
            lut[t] = (split as f64 * c).round() as u8;
        }
    }

    let upper: Vec<u64> = counts[split + 1..].to_vec();
    let upper_total: u64 = upper.iter().sum();
    if upper_total > 0 {
        let mut cdf = Vec::with_capacity(upper.len());
        let mut acc = 0u64;
        for &c in &upper {
            acc += c;
            cdf.push(acc as f64 / upper_total as f64);
        }
        for (i, &c) in cdf.iter().enumerate() {
            lut[split + 1 + i] = ((top - split as f64) * c + split as f64).round() as u8;
        }
    }
    lut
}

fn decision(split_level: u8) -> SplitDecision {
    SplitDecision {
        beta: 10.0,
        branch: Branch::PowerLaw,
        gamma_used: Some(0.75),
        mm_raw: split_level as f64,
        split_level,
    }
}

fn arb_image(max_side: u32) -> impl Strategy<Value = GrayImage> {
    (2..=max_side, 2..=max_side)
        .prop_flat_map(|(w, h)| {
            prop::collection::vec(any::<u8>(), (w * h) as usize)
                .prop_map(move |pixels| GrayImage::new(w, h, pixels).unwrap())
        })
}

fn arb_histogram() -> impl Strategy<Value = Histogram> {
    prop::collection::vec(0u64..200, LEVELS).prop_map(|v| {
        let mut counts = [0u64; LEVELS];
        counts.copy_from_slice(&v);
        Histogram::from_counts(counts)
    })
}

proptest! {
    #[test]
    fn he_lut_is_monotone(h in arb_histogram()) {
        prop_assume!(h.total() > 0);
        let map = he_lut(&h).unwrap();
        for k in 1..LEVELS {
            prop_assert!(map.map(k as u8) >= map.map((k - 1) as u8));
        }
    }

    #[test]
    fn equalize_reaches_full_scale_and_preserves_rank(img in arb_image(24)) {
        let out = equalize(&img);
        prop_assert_eq!(out.max_level(), 255);
        let map = he_lut(&histogram_of(&img)).unwrap();
        for (a, b) in img.pixels().iter().zip(out.pixels()) {
            prop_assert_eq!(map.map(*a), *b);
        }
        // monotone lut preserves pixel order
        for i in 1..img.pixel_count() {
            let (p1, p2) = (img.pixels()[i - 1], img.pixels()[i]);
            let (q1, q2) = (out.pixels()[i - 1], out.pixels()[i]);
            if p1 <= p2 {
                prop_assert!(q1 <= q2);
            }
        }
    }

    #[test]
    fn duo_lut_matches_oracle_full_alphabet(h in arb_histogram(), split in 1u8..=254) {
        prop_assume!(h.total() > 0);
        let duo = duo_lut(&h, &decision(split)).unwrap();
        let expected = oracle_duo(h.counts(), split as usize);
        prop_assert_eq!(&duo.lut()[..], &expected[..]);
    }

    #[test]
    fn duo_lut_matches_oracle_eight_levels(
        counts in prop::collection::vec(0u64..50, 8),
        split in 1usize..=6,
    ) {
        let lut = duo_lut_over(&counts, split);
        prop_assert_eq!(lut, oracle_duo(&counts, split));
    }

    #[test]
    fn duo_lut_segment_bounds_and_monotonicity(h in arb_histogram(), split in 1u8..=254) {
        prop_assume!(h.total() > 0);
        let duo = duo_lut(&h, &decision(split)).unwrap();
        let s = split as usize;
        for t in 0..=s {
            prop_assert!(duo.lut()[t] as usize <= s);
            if t > 0 {
                prop_assert!(duo.lut()[t] >= duo.lut()[t - 1]);
            }
        }
        for t in s + 1..LEVELS {
            prop_assert!(duo.lut()[t] as usize >= s);
            if t > s + 1 {
                prop_assert!(duo.lut()[t] >= duo.lut()[t - 1]);
            }
        }
    }

    #[test]
    fn duo_segment_mass_accounting(h in arb_histogram(), split in 1u8..=254) {
        prop_assume!(h.total() > 0);
        let duo = duo_lut(&h, &decision(split)).unwrap();
        let s = split as usize;
        let lower_in: u64 = h.counts()[..=s].iter().sum();
        // Upper levels may legally round down onto the split itself;
        // account for that mass explicitly and the books must balance.
        let upper_on_split: u64 = (s + 1..LEVELS)
            .filter(|&t| duo.lut()[t] as usize == s)
            .map(|t| h.counts()[t])
            .sum();
        let mut out_counts = [0u64; LEVELS];
        for t in 0..LEVELS {
            out_counts[duo.lut()[t] as usize] += h.counts()[t];
        }
        let lower_out: u64 = out_counts[..=s].iter().sum();
        prop_assert_eq!(lower_out, lower_in + upper_on_split);
    }

    #[test]
    fn hkmdhe_never_crosses_split(img in arb_image(24)) {
        prop_assume!(!img.is_constant());
        let (out, split) = enhance_hkmdhe(&img, &EnhanceParams::default()).unwrap();
        let s = split.split_level;
        for (i, o) in img.pixels().iter().zip(out.pixels()) {
            if *i <= s {
                prop_assert!(*o <= s);
            } else {
                prop_assert!(*o >= s);
            }
        }
        prop_assert_eq!(histogram_of(&out).total(), histogram_of(&img).total());
    }

    #[test]
    fn beta_at_least_one(img in arb_image(24)) {
        prop_assume!(!img.is_constant());
        let s = moment_stats(&img).unwrap();
        prop_assert!(s.beta >= 1.0 - 1e-9, "beta = {}", s.beta);
        prop_assert!(s.sigma > 0.0);
    }

    #[test]
    fn clip_conserves_total_and_caps_bins(h in arb_histogram(), clip in 1.01f64..16.0) {
        prop_assume!(h.total() > 0);
        let clipped = clip_histogram(&h, clip).unwrap();
        prop_assert_eq!(clipped.total(), h.total());
        let ceiling = (clip * h.total() as f64 / 256.0).ceil() as u64;
        let excess: u64 = h.counts().iter().map(|&c| c.saturating_sub(ceiling)).sum();
        let bound = ceiling + excess / 256 + u64::from(!excess.is_multiple_of(256));
        for &c in clipped.counts().iter() {
            prop_assert!(c <= bound);
        }
    }

    #[test]
    fn clahe_single_tile_unclipped_is_global_he(img in arb_image(20)) {
        let params = ClaheParams { tiles_x: 1, tiles_y: 1, clip_limit: f64::INFINITY };
        prop_assert_eq!(enhance_clahe(&img, &params).unwrap(), equalize(&img));
    }

    #[test]
    fn clahe_output_dimensions_and_range(img in arb_image(40), tiles in 1u32..4, clip in 1.5f64..8.0) {
        prop_assume!(img.width() / tiles >= 2 && img.height() / tiles >= 2);
        let params = ClaheParams { tiles_x: tiles, tiles_y: tiles, clip_limit: clip };
        let out = enhance_clahe(&img, &params).unwrap();
        prop_assert_eq!(out.dimensions(), img.dimensions());
    }

    #[test]
    fn pgm_round_trip(img in arb_image(24)) {
        let bytes = write_pgm(&img);
        let back = read_pgm(&bytes).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert_eq!(write_pgm(&back), bytes);
    }

    #[test]
    fn rmse_symmetry(a in arb_image(12)) {
        let b = equalize(&a);
        prop_assert_eq!(rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
    }

    #[test]
    fn lut_application_is_pointwise(img in arb_image(12), lut in prop::collection::vec(any::<u8>(), LEVELS)) {
        let mut table = [0u8; LEVELS];
        table.copy_from_slice(&lut);
        let out = apply_lut(&img, &table);
        for (i, o) in img.pixels().iter().zip(out.pixels()) {
            prop_assert_eq!(table[*i as usize], *o);
        }
    }
}
