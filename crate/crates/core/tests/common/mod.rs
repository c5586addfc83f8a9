//! Brute-force reference implementations shared by the property suites. They
//! deliberately avoid every fast path used by the library.

#![allow(dead_code)]

use nuctrack_core::imgproc::{BinaryMask, StructuringElement};
use proptest::prelude::*;

pub fn offsets(se: StructuringElement) -> Vec<(isize, isize)> {
    match se {
        StructuringElement::Square3x3 => (-1..=1)
            .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
            .collect(),
        StructuringElement::Cross3x3 => vec![(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)],
    }
}

fn at(m: &BinaryMask, x: isize, y: isize) -> bool {
    x >= 0
        && y >= 0
        && (x as usize) < m.width()
        && (y as usize) < m.height()
        && m.get(x as usize, y as usize)
}

pub fn erode_oracle(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let offs = offsets(se);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        offs.iter()
            .all(|&(dx, dy)| at(m, x as isize + dx, y as isize + dy))
    })
    .unwrap()
}

pub fn dilate_oracle(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let offs = offsets(se);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        offs.iter()
            .any(|&(dx, dy)| at(m, x as isize + dx, y as isize + dy))
    })
    .unwrap()
}

/// Component found by flood fill: sorted member pixels.
pub struct OracleComponent {
    pub pixels: Vec<(usize, usize)>,
}

impl OracleComponent {
    pub fn centroid(&self) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let sx: f64 = self.pixels.iter().map(|p| p.0 as f64).sum();
        let sy: f64 = self.pixels.iter().map(|p| p.1 as f64).sum();
        (sx / n, sy / n)
    }

    pub fn bbox(&self) -> (usize, usize, usize, usize) {
        let xs = self.pixels.iter().map(|p| p.0);
        let ys = self.pixels.iter().map(|p| p.1);
        (
            xs.clone().min().unwrap(),
            ys.clone().min().unwrap(),
            xs.max().unwrap(),
            ys.max().unwrap(),
        )
    }
}

/// Stack-based flood fill started from each unvisited foreground pixel in
/// raster order, so components come out in first-pixel raster order.
pub fn flood_fill_components(m: &BinaryMask, eight: bool) -> Vec<OracleComponent> {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    let neigh: Vec<(isize, isize)> = if eight {
        (-1..=1)
            .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
            .filter(|&d| d != (0, 0))
            .collect()
    } else {
        vec![(1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut stack = vec![(x, y)];
            seen[y * w + x] = true;
            let mut pixels = Vec::new();
            while let Some((px, py)) = stack.pop() {
                pixels.push((px, py));
                for &(dx, dy) in &neigh {
                    let (nx, ny) = (px as isize + dx, py as isize + dy);
                    if at(m, nx, ny) && !seen[ny as usize * w + nx as usize] {
                        seen[ny as usize * w + nx as usize] = true;
                        stack.push((nx as usize, ny as usize));
                    }
                }
            }
            pixels.sort();
            comps.push(OracleComponent { pixels });
        }
    }
    comps
}

pub fn arb_mask(w: usize, h: usize) -> impl Strategy<Value = BinaryMask> {
    prop::collection::vec(any::<bool>(), w * h)
        .prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
}

/// Masks with a chosen foreground density, so sparse and dense cases both occur.
pub fn arb_mask_density(w: usize, h: usize) -> impl Strategy<Value = BinaryMask> {
    (0u32..=100).prop_flat_map(move |pct| {
        prop::collection::vec(0u32..100, w * h).prop_map(move |v| {
            BinaryMask::new(w, h, v.into_iter().map(|r| r < pct).collect()).unwrap()
        })
    })
}

pub fn arb_se() -> impl Strategy<Value = StructuringElement> {
    prop_oneof![
        Just(StructuringElement::Square3x3),
        Just(StructuringElement::Cross3x3)
    ]
}
