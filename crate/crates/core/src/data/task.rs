use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DataError;
use crate::gp::FeatureMatrix;
use crate::objectives::LabeledDataset;

/// One-vs-rest train/test pair for `digit`.
///
/// A seeded subsample of `per_digit` images of every digit is drawn, and each
/// digit's subsample is split in half, so both halves keep the 1:9 ratio.
/// The subsample and split depend only on `seed`, not on `digit`.
pub fn build_binary_task(
    digit_labels: &[u8],
    features: &FeatureMatrix,
    digit: u8,
    per_digit: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), DataError> {
    if digit > 9 {
        return Err(DataError::Config(format!("digit {digit} outside 0..=9")));
    }
    if digit_labels.len() != features.n_rows() {
        return Err(DataError::Inconsistent(format!(
            "{} labels for {} feature rows",
            digit_labels.len(),
            features.n_rows()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for d in 0..10u8 {
        let mut idx: Vec<usize> = (0..digit_labels.len()).filter(|&i| digit_labels[i] == d).collect();
        if idx.len() < per_digit {
            return Err(DataError::InsufficientSamples {
                digit: d,
                needed: per_digit,
                available: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        idx.truncate(per_digit);
        let half = per_digit / 2;
        train.extend_from_slice(&idx[..half]);
        test.extend_from_slice(&idx[half..]);
    }
    let make = |rows: &[usize]| {
        let labels = rows.iter().map(|&i| u8::from(digit_labels[i] == digit)).collect();
        LabeledDataset::new(features.select_rows(rows), labels)
    };
    Ok((make(&train), make(&test)))
}

/// Seeded 50/50 split that keeps each class's count balanced between halves.
pub fn stratified_split(data: &LabeledDataset, seed: u64) -> (LabeledDataset, LabeledDataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..=1u8 {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let half = idx.len().div_ceil(2);
        train.extend_from_slice(&idx[..half]);
        test.extend_from_slice(&idx[half..]);
    }
    let make = |rows: &[usize]| {
        LabeledDataset::new(
            data.features.select_rows(rows),
            rows.iter().map(|&i| data.labels[i]).collect(),
        )
    };
    (make(&train), make(&test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(per: usize) -> (Vec<u8>, FeatureMatrix) {
        let labels: Vec<u8> = (0..per * 10).map(|i| (i % 10) as u8).collect();
        let rows: Vec<f64> = (0..labels.len()).flat_map(|i| [i as f64, 0.5]).collect();
        (labels.clone(), FeatureMatrix::from_row_major(labels.len(), 2, &rows))
    }

    #[test]
    fn keeps_imbalance_exactly() {
        let (labels, x) = synthetic(130);
        for digit in [0, 4, 9] {
            let (tr, te) = build_binary_task(&labels, &x, digit, 120, 1).unwrap();
            assert_eq!((tr.len(), te.len()), (600, 600));
            assert_eq!((tr.positives(), tr.negatives()), (60, 540));
            assert_eq!((te.positives(), te.negatives()), (60, 540));
        }
    }

    #[test]
    fn deterministic_and_disjoint() {
        let (labels, x) = synthetic(50);
        let (a, b) = build_binary_task(&labels, &x, 3, 40, 9).unwrap();
        let (a2, _) = build_binary_task(&labels, &x, 3, 40, 9).unwrap();
        assert_eq!(a, a2);
        let ids = |d: &LabeledDataset| d.features.column(0).to_vec();
        let (ia, ib) = (ids(&a), ids(&b));
        assert!(ia.iter().all(|v| !ib.contains(v)));
        let (c, _) = build_binary_task(&labels, &x, 7, 40, 9).unwrap();
        assert_eq!(ids(&a), ids(&c));
    }

    #[test]
    fn insufficient_samples() {
        let (labels, x) = synthetic(10);
        assert!(matches!(
            build_binary_task(&labels, &x, 0, 11, 0),
            Err(DataError::InsufficientSamples { needed: 11, available: 10, .. })
        ));
    }

    #[test]
    fn stratified_halves() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64]).collect();
        let labels = (0..100).map(|i| u8::from(i % 10 == 0)).collect();
        let d = LabeledDataset::new(FeatureMatrix::from_rows(&rows), labels);
        let (a, b) = stratified_split(&d, 3);
        assert_eq!((a.positives(), b.positives()), (5, 5));
        assert_eq!((a.len(), b.len()), (50, 50));
    }
}
