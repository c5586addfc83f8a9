mod common;

use common::*;
use nuctrack_core::imgproc::BinaryMask;
use nuctrack_core::regions::*;
use proptest::prelude::*;

fn conn_strategy() -> impl Strategy<Value = Connectivity> {
    prop_oneof![Just(Connectivity::Four), Just(Connectivity::Eight)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_flood_fill(m in arb_mask_density(32, 32), conn in conn_strategy()) {
        let (map, regions) = label_components(&m, conn);
        let oracle = flood_fill_components(&m, conn == Connectivity::Eight);
        prop_assert_eq!(regions.len(), oracle.len());
        for (i, (r, o)) in regions.iter().zip(&oracle).enumerate() {
            prop_assert_eq!(r.label, i as u32 + 1);
            prop_assert_eq!(r.area, o.pixels.len());
            let (cx, cy) = o.centroid();
            prop_assert!((r.centroid.x - cx).abs() < 1e-9 && (r.centroid.y - cy).abs() < 1e-9);
            let b = o.bbox();
            prop_assert_eq!((r.bbox.min_x, r.bbox.min_y, r.bbox.max_x, r.bbox.max_y), b);
            for &(x, y) in &o.pixels {
                prop_assert_eq!(map.get(x, y), r.label);
            }
        }
        prop_assert_eq!(count_components(&m, conn, 0), oracle.len());
        prop_assert_eq!(find_regions(&m, conn), regions);
    }

    #[test]
    fn labels_partition_the_foreground(m in arb_mask_density(32, 32), conn in conn_strategy()) {
        let (map, regions) = label_components(&m, conn);
        let total: usize = regions.iter().map(|r| r.area).sum();
        prop_assert_eq!(total, m.count());
        let mut per_label = vec![0usize; regions.len() + 1];
        for y in 0..32 {
            for x in 0..32 {
                let l = map.get(x, y) as usize;
                prop_assert_eq!(l > 0, m.get(x, y));
                prop_assert!(l <= regions.len());
                per_label[l] += 1;
            }
        }
        for r in &regions {
            prop_assert_eq!(per_label[r.label as usize], r.area);
            prop_assert!(r.area >= 1);
            prop_assert!(r.bbox.contains(r.centroid));
            prop_assert!(r.bbox.width() * r.bbox.height() >= r.area);
        }
    }

    #[test]
    fn translation_moves_geometry(m in arb_mask_density(20, 20), dx in 0usize..12, dy in 0usize..12) {
        let shifted = BinaryMask::from_fn(32, 32, |x, y| {
            x >= dx && y >= dy && x - dx < 20 && y - dy < 20 && m.get(x - dx, y - dy)
        }).unwrap();
        let a = label_components(&m, Connectivity::Eight).1;
        let b = label_components(&shifted, Connectivity::Eight).1;
        prop_assert_eq!(a.len(), b.len());
        for (r, s) in a.iter().zip(&b) {
            prop_assert_eq!(r.area, s.area);
            prop_assert!((s.centroid.x - r.centroid.x - dx as f64).abs() < 1e-9);
            prop_assert!((s.centroid.y - r.centroid.y - dy as f64).abs() < 1e-9);
            prop_assert_eq!(s.bbox.min_x, r.bbox.min_x + dx);
            prop_assert_eq!(s.bbox.max_y, r.bbox.max_y + dy);
        }
    }

    #[test]
    fn filter_keeps_exactly_large_regions(m in arb_mask_density(32, 32), min_area in 0usize..8) {
        let regions = label_components(&m, Connectivity::Eight).1;
        let kept = filter_regions(&regions, min_area);
        let expected: Vec<_> = regions.iter().filter(|r| r.area >= min_area).cloned().collect();
        prop_assert_eq!(&kept, &expected);
        prop_assert_eq!(count_components(&m, Connectivity::Eight, min_area), kept.len());
    }
}
