mod common;

use common::flood_fill_components;
use nuctrack_core::autothresh::*;
use nuctrack_core::imgproc::*;
use nuctrack_core::regions::Connectivity;

/// 64x64 black frame with one 20x20 block of 200.
fn block_image() -> GrayImage {
    GrayImage::from_fn(64, 64, |x, y| {
        if (10..30).contains(&x) && (10..30).contains(&y) {
            200
        } else {
            0
        }
    })
    .unwrap()
}

/// Thirty isolated pixels of 150 on a 6-pixel lattice, away from the block.
fn with_specks(mut img: GrayImage) -> GrayImage {
    let mut n = 0;
    'outer: for y in (36..64).step_by(6) {
        for x in (2..64).step_by(6) {
            img.set(x, y, 150);
            n += 1;
            if n == 30 {
                break 'outer;
            }
        }
    }
    assert_eq!(n, 30);
    img
}

/// Counts through the brute-force labeling oracle.
fn oracle_counts(img: &GrayImage, t: u8, morph: &MorphParams, min_area: usize) -> (usize, usize) {
    let mask = binarize(img, t);
    let raw = flood_fill_components(&mask, true).len();
    let clean = flood_fill_components(&morph.apply(&mask), true)
        .iter()
        .filter(|c| c.pixels.len() >= min_area)
        .count();
    (raw, clean)
}

fn row(rows: &[ThresholdScanRow], t: u8) -> ThresholdScanRow {
    rows[255 - t as usize]
}

#[test]
fn block_scan_matches_oracle() {
    let img = block_image();
    let morph = MorphParams::new(1, 0);
    assert_eq!(oracle_counts(&img, 100, &morph, 20), (1, 1));
    let rows = scan_thresholds(&img, &morph, Connectivity::Eight, 20);
    let r = row(&rows, 100);
    assert_eq!(
        (r.raw_components, r.clean_components, r.noise_count),
        (1, 1, 0)
    );
}

#[test]
fn specks_are_counted_as_noise() {
    let img = with_specks(block_image());
    let morph = MorphParams::new(1, 0);
    assert_eq!(oracle_counts(&img, 120, &morph, 20), (31, 1));
    let rows = scan_thresholds(&img, &morph, Connectivity::Eight, 20);
    let r = row(&rows, 120);
    assert_eq!(
        (r.raw_components, r.clean_components, r.noise_count),
        (31, 1, 30)
    );
}

#[test]
fn scan_equals_naive_per_threshold_evaluation() {
    let img = GrayImage::from_fn(40, 30, |x, y| ((x * 37 + y * 91) % 7 * 40) as u8).unwrap();
    for morph in [
        MorphParams::new(0, 0),
        MorphParams::new(1, 1),
        MorphParams::new(2, 0),
    ] {
        let rows = scan_thresholds(&img, &morph, Connectivity::Eight, 3);
        assert_eq!(rows.len(), 256);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.threshold as usize, 255 - i);
            let (raw, clean) = oracle_counts(&img, r.threshold, &morph, 3);
            assert_eq!(
                (r.raw_components, r.clean_components),
                (raw, clean),
                "t={}",
                r.threshold
            );
            assert_eq!(r.noise_count, raw.saturating_sub(clean));
        }
    }
}

#[test]
fn noise_free_two_level_image() {
    // Background 40, one 8x8 blob at 170: every t in (40, 170] sees one nucleus.
    let img = GrayImage::from_fn(32, 32, |x, y| {
        if (10..18).contains(&x) && (10..18).contains(&y) {
            170
        } else {
            40
        }
    })
    .unwrap();
    let params = AutoThresholdParams::default();
    let rows = scan_thresholds(&img, &params.morph, params.connectivity, params.min_area);
    for t in 41..=170u8 {
        assert_eq!(row(&rows, t).clean_components, 1);
    }
    assert_eq!(find_max_nuclei_threshold(&rows).unwrap(), 170);
    let d = select_threshold(&img, &params).unwrap();
    // No noise anywhere, so the knee falls back to the max-nuclei threshold.
    assert_eq!(
        d,
        ThresholdDecision {
            knee_threshold: 170,
            max_nuclei_threshold: 170,
            selected: 170
        }
    );
}

#[test]
fn speckled_two_blob_image_recovers_ground_truth() {
    // Two 12x12 blobs of 180 on 30 with a regular grid of specks at 130.
    let blob = |x: usize, y: usize| {
        ((8..20).contains(&x) && (8..20).contains(&y))
            || ((40..52).contains(&x) && (30..42).contains(&y))
    };
    let img = GrayImage::from_fn(64, 64, |x, y| {
        if blob(x, y) {
            180
        } else if x % 5 == 2 && y % 5 == 3 {
            130
        } else {
            30
        }
    })
    .unwrap();
    let params = AutoThresholdParams::default();
    let d = select_threshold(&img, &params).unwrap();
    assert!(d.selected > 130 && d.selected <= 180, "{d:?}");
    assert!(d.selected >= d.knee_threshold.min(d.max_nuclei_threshold));
    assert!(d.selected <= d.knee_threshold.max(d.max_nuclei_threshold));

    let truth = BinaryMask::from_fn(64, 64, blob).unwrap();
    let got = params.morph.apply(&binarize(&img, d.selected));
    assert_eq!(got, params.morph.apply(&truth));
    assert_eq!(select_threshold(&img, &params).unwrap(), d);
}

#[test]
fn opening_can_split_a_component_and_noise_is_clamped() {
    // Two 6x6 blocks joined by a one-pixel bridge: one raw component, two after opening.
    let img = GrayImage::from_fn(24, 12, |x, y| {
        let a = (2..8).contains(&x) && (3..9).contains(&y);
        let b = (14..20).contains(&x) && (3..9).contains(&y);
        let bridge = (8..14).contains(&x) && y == 5;
        if a || b || bridge {
            200
        } else {
            0
        }
    })
    .unwrap();
    let rows = scan_thresholds(&img, &MorphParams::new(1, 0), Connectivity::Eight, 0);
    let r = row(&rows, 200);
    assert_eq!(
        (r.raw_components, r.clean_components, r.noise_count),
        (1, 2, 0)
    );
}

#[test]
fn clean_never_exceeds_raw_for_convex_blobs_and_specks() {
    let img = with_specks(block_image());
    for opening in 0..4 {
        let rows = scan_thresholds(&img, &MorphParams::new(opening, 0), Connectivity::Eight, 0);
        assert!(rows.iter().all(|r| r.clean_components <= r.raw_components));
    }
}
