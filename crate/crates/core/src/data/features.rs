use rayon::prelude::*;

use super::RawImageSet;
use crate::gp::FeatureMatrix;

/// Grid of boxes; each box contributes its mean and population standard
/// deviation (pixels scaled to [0, 1]), row-major over boxes, mean first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureSpec {
    pub grid_rows: usize,
    pub grid_cols: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            grid_rows: 3,
            grid_cols: 3,
        }
    }
}

impl FeatureSpec {
    pub fn n_features(&self) -> usize {
        self.grid_rows * self.grid_cols * 2
    }
}

/// Contiguous bands of `len / k` with the remainder added to the last band
/// (28 over 3 bands gives 9, 9, 10).
fn bands(len: usize, k: usize) -> Vec<(usize, usize)> {
    let base = len / k;
    (0..k)
        .map(|b| {
            let start = b * base;
            let end = if b + 1 == k { len } else { start + base };
            (start, end)
        })
        .collect()
}

pub fn box_features(image: &[u8], rows: usize, cols: usize, spec: &FeatureSpec) -> Vec<f64> {
    assert_eq!(image.len(), rows * cols, "image size");
    let mut out = Vec::with_capacity(spec.n_features());
    for &(r0, r1) in &bands(rows, spec.grid_rows) {
        for &(c0, c1) in &bands(cols, spec.grid_cols) {
            let count = ((r1 - r0) * (c1 - c0)) as f64;
            let px = |r: usize, c: usize| image[r * cols + c] as f64 / 255.0;
            let mut sum = 0.0;
            for r in r0..r1 {
                for c in c0..c1 {
                    sum += px(r, c);
                }
            }
            let mean = sum / count;
            let mut sq = 0.0;
            for r in r0..r1 {
                for c in c0..c1 {
                    sq += (px(r, c) - mean).powi(2);
                }
            }
            out.push(mean);
            out.push((sq / count).sqrt());
        }
    }
    out
}

/// Box features for every image in `raw`.
pub fn extract_features(raw: &RawImageSet, spec: &FeatureSpec) -> FeatureMatrix {
    let rows: Vec<f64> = (0..raw.len())
        .into_par_iter()
        .flat_map_iter(|i| box_features(raw.image(i), raw.rows, raw.cols, spec))
        .collect();
    FeatureMatrix::from_row_major(raw.len(), spec.n_features(), &rows)
}
