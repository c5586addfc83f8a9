//! Connected-component labeling and per-component geometry.
//!
//! Components are found on horizontal runs of foreground pixels: runs on
//! adjacent rows that touch under the chosen connectivity are merged with a
//! union-find forest. Working on runs instead of pixels keeps the cost
//! proportional to the foreground boundary, which matters for the threshold
//! scan where hundreds of masks are labeled per frame.

use alloc::vec;
use alloc::vec::Vec;

use crate::imgproc::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Real-valued pixel coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_squared(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }
}

/// Axis-aligned rectangle with inclusive integer bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn new(min_x: usize, min_y: usize, max_x: usize, max_y: usize) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }

    /// Inclusive containment of a real-valued point.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x as f64
            && p.x <= self.max_x as f64
            && p.y >= self.min_y as f64
            && p.y <= self.max_y as f64
    }

    /// Grows by `pad` on every side, clamped to a `width`×`height` frame.
    pub fn expanded(&self, pad: usize, width: usize, height: usize) -> BoundingBox {
        BoundingBox {
            min_x: self.min_x.saturating_sub(pad),
            min_y: self.min_y.saturating_sub(pad),
            max_x: (self.max_x + pad).min(width - 1),
            max_y: (self.max_y + pad).min(height - 1),
        }
    }
}

/// One labeled connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub label: u32,
    pub area: usize,
    /// Mean of member pixel coordinates.
    pub centroid: Point,
    pub bbox: BoundingBox,
}

/// Per-pixel component labels, 0 for background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LabelMap {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    y: usize,
    start: usize,
    end: usize,
}

fn collect_runs(mask: &BinaryMask) -> (Vec<Run>, Vec<usize>) {
    let w = mask.width();
    let data = mask.data();
    let mut runs = Vec::new();
    // row_start[y]..row_start[y + 1] indexes the runs of row y.
    let mut row_start = Vec::with_capacity(mask.height() + 1);
    for y in 0..mask.height() {
        row_start.push(runs.len());
        let row = &data[y * w..(y + 1) * w];
        let mut x = 0;
        while x < w {
            if row[x] {
                let start = x;
                while x < w && row[x] {
                    x += 1;
                }
                runs.push(Run {
                    y,
                    start,
                    end: x - 1,
                });
            } else {
                x += 1;
            }
        }
    }
    row_start.push(runs.len());
    (runs, row_start)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // Keep the earlier run as root so roots are stable in raster order.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Union-find over runs; returns the root of every run.
fn run_roots(runs: &[Run], row_start: &[usize], conn: Connectivity) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..runs.len()).collect();
    let slack = match conn {
        Connectivity::Four => 0,
        Connectivity::Eight => 1,
    };
    for y in 1..row_start.len() - 1 {
        let prev = row_start[y - 1]..row_start[y];
        let curr = row_start[y]..row_start[y + 1];
        let mut i = prev.start;
        let mut j = curr.start;
        while i < prev.end && j < curr.end {
            let (a, b) = (runs[i], runs[j]);
            if a.start <= b.end + slack && b.start <= a.end + slack {
                union(&mut parent, i, j);
            }
            // Advance whichever run finishes first.
            if a.end < b.end {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    (0..runs.len()).map(|i| find(&mut parent, i)).collect()
}

#[derive(Clone, Copy)]
struct Accum {
    area: usize,
    sum_x: u64,
    sum_y: u64,
    bbox: BoundingBox,
}

impl Accum {
    fn new(run: &Run) -> Self {
        Accum {
            area: 0,
            sum_x: 0,
            sum_y: 0,
            bbox: BoundingBox::new(run.start, run.y, run.end, run.y),
        }
    }

    fn add(&mut self, run: &Run) {
        let len = run.end - run.start + 1;
        self.area += len;
        self.sum_x += ((run.start + run.end) * len / 2) as u64;
        self.sum_y += (run.y * len) as u64;
        self.bbox.min_x = self.bbox.min_x.min(run.start);
        self.bbox.max_x = self.bbox.max_x.max(run.end);
        self.bbox.min_y = self.bbox.min_y.min(run.y);
        self.bbox.max_y = self.bbox.max_y.max(run.y);
    }

    fn into_region(self, label: u32) -> Region {
        let n = self.area as f64;
        Region {
            label,
            area: self.area,
            centroid: Point::new(self.sum_x as f64 / n, self.sum_y as f64 / n),
            bbox: self.bbox,
        }
    }
}

/// Assigns each run a label (1-based, in raster order of the component's first
/// pixel) and accumulates region statistics.
fn label_runs(runs: &[Run], roots: &[usize]) -> (Vec<u32>, Vec<Region>) {
    let mut label_of_root = vec![0u32; runs.len()];
    let mut accums: Vec<Accum> = Vec::new();
    let mut run_labels = Vec::with_capacity(runs.len());
    for (run, &root) in runs.iter().zip(roots) {
        if label_of_root[root] == 0 {
            accums.push(Accum::new(run));
            label_of_root[root] = accums.len() as u32;
        }
        let label = label_of_root[root];
        accums[label as usize - 1].add(run);
        run_labels.push(label);
    }
    let regions = accums
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.into_region(i as u32 + 1))
        .collect();
    (run_labels, regions)
}

/// Partitions the foreground into maximal connected components.
///
/// Labels start at 1 and follow the raster-scan order of each component's
/// first pixel, so the output is identical run to run.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> (LabelMap, Vec<Region>) {
    let (runs, row_start) = collect_runs(mask);
    let roots = run_roots(&runs, &row_start, connectivity);
    let (run_labels, regions) = label_runs(&runs, &roots);

    let w = mask.width();
    let mut labels = vec![0u32; w * mask.height()];
    for (run, &label) in runs.iter().zip(&run_labels) {
        labels[run.y * w + run.start..=run.y * w + run.end].fill(label);
    }
    (
        LabelMap {
            width: w,
            height: mask.height(),
            labels,
        },
        regions,
    )
}

/// Region list without materializing a label map.
pub fn find_regions(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Region> {
    let (runs, row_start) = collect_runs(mask);
    let roots = run_roots(&runs, &row_start, connectivity);
    label_runs(&runs, &roots).1
}

/// Number of components whose area is at least `min_area`.
pub fn count_components(mask: &BinaryMask, connectivity: Connectivity, min_area: usize) -> usize {
    let (runs, row_start) = collect_runs(mask);
    let roots = run_roots(&runs, &row_start, connectivity);
    let mut area = vec![0usize; runs.len()];
    for (run, &root) in runs.iter().zip(&roots) {
        area[root] += run.end - run.start + 1;
    }
    area.iter().filter(|&&a| a > 0 && a >= min_area).count()
}

/// Keeps regions with `area >= min_area`, preserving order.
pub fn filter_regions(regions: &[Region], min_area: usize) -> Vec<Region> {
    regions
        .iter()
        .filter(|r| r.area >= min_area)
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(w: usize, h: usize, pts: &[(usize, usize)]) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h).unwrap();
        for &(x, y) in pts {
            m.set(x, y, true);
        }
        m
    }

    #[test]
    fn empty_mask_has_no_regions() {
        let m = BinaryMask::empty(8, 5).unwrap();
        let (map, regions) = label_components(&m, Connectivity::Eight);
        assert!(regions.is_empty());
        assert!(map.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn single_pixel_region() {
        let m = mask(10, 10, &[(3, 7)]);
        let (map, regions) = label_components(&m, Connectivity::Eight);
        assert_eq!(regions.len(), 1);
        let r = &regions[0];
        assert_eq!(r.label, 1);
        assert_eq!(r.area, 1);
        assert_eq!(r.centroid, Point::new(3.0, 7.0));
        assert_eq!(r.bbox, BoundingBox::new(3, 7, 3, 7));
        assert_eq!(map.get(3, 7), 1);
    }

    #[test]
    fn diagonal_pixels_depend_on_connectivity() {
        let m = mask(4, 4, &[(1, 1), (2, 2)]);
        assert_eq!(label_components(&m, Connectivity::Eight).1.len(), 1);
        assert_eq!(label_components(&m, Connectivity::Four).1.len(), 2);
        assert_eq!(count_components(&m, Connectivity::Four, 0), 2);
    }

    #[test]
    fn u_shape_merges_late() {
        // Two prongs joined only on the bottom row.
        let m = mask(
            5,
            3,
            &[
                (0, 0),
                (4, 0),
                (0, 1),
                (4, 1),
                (0, 2),
                (1, 2),
                (2, 2),
                (3, 2),
                (4, 2),
            ],
        );
        let (map, regions) = label_components(&m, Connectivity::Four);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].area, 9);
        assert_eq!(map.get(4, 0), 1);
    }

    #[test]
    fn labels_follow_raster_order() {
        let m = mask(6, 4, &[(5, 0), (0, 2), (1, 2)]);
        let (map, regions) = label_components(&m, Connectivity::Eight);
        assert_eq!(map.get(5, 0), 1);
        assert_eq!(map.get(0, 2), 2);
        assert_eq!(regions[1].centroid, Point::new(0.5, 2.0));
    }

    #[test]
    fn filtering_by_area() {
        let mk = |label, area| Region {
            label,
            area,
            centroid: Point::default(),
            bbox: BoundingBox::new(0, 0, 0, 0),
        };
        let regions = [mk(1, 1), mk(2, 25), mk(3, 400)];
        let kept: Vec<_> = filter_regions(&regions, 20)
            .iter()
            .map(|r| r.area)
            .collect();
        assert_eq!(kept, [25, 400]);
        assert_eq!(filter_regions(&regions, 0), regions.to_vec());
        assert!(filter_regions(&[], 5).is_empty());
    }

    #[test]
    fn count_respects_min_area() {
        let m = mask(10, 3, &[(0, 0), (1, 0), (5, 1), (9, 2)]);
        assert_eq!(count_components(&m, Connectivity::Eight, 0), 3);
        assert_eq!(count_components(&m, Connectivity::Eight, 2), 1);
    }

    #[test]
    fn bbox_helpers() {
        let b = BoundingBox::new(2, 3, 5, 9);
        assert_eq!((b.width(), b.height()), (4, 7));
        assert!(b.contains(Point::new(5.0, 9.0)));
        assert!(!b.contains(Point::new(5.01, 9.0)));
        assert_eq!(b.expanded(4, 8, 20), BoundingBox::new(0, 0, 7, 13));
    }
}
