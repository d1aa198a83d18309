use std::fs;
use std::path::Path;

use super::DataError;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Images (row-major `rows × cols` bytes each) with their digit labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawImageSet {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
    pub labels: Vec<u8>,
}

impl RawImageSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let sz = self.rows * self.cols;
        &self.pixels[i * sz..(i + 1) * sz]
    }
}

fn be_u32(bytes: &[u8], at: usize, what: &'static str) -> Result<u32, DataError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(DataError::Truncated {
            what,
            expected: at + 4,
            found: bytes.len(),
        })
}

/// Decodes an image file and a label file already in memory.
pub fn read_idx(images: &[u8], labels: &[u8]) -> Result<RawImageSet, DataError> {
    let magic = be_u32(images, 0, "image header")?;
    if magic != IMAGE_MAGIC {
        return Err(DataError::BadMagic {
            what: "image file",
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let n = be_u32(images, 4, "image header")? as usize;
    let rows = be_u32(images, 8, "image header")? as usize;
    let cols = be_u32(images, 12, "image header")? as usize;
    let expected = 16 + n * rows * cols;
    if images.len() < expected {
        return Err(DataError::Truncated {
            what: "image payload",
            expected,
            found: images.len(),
        });
    }

    let magic = be_u32(labels, 0, "label header")?;
    if magic != LABEL_MAGIC {
        return Err(DataError::BadMagic {
            what: "label file",
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let n_labels = be_u32(labels, 4, "label header")? as usize;
    if labels.len() < 8 + n_labels {
        return Err(DataError::Truncated {
            what: "label payload",
            expected: 8 + n_labels,
            found: labels.len(),
        });
    }
    if n_labels != n {
        return Err(DataError::Inconsistent(format!(
            "{n} images but {n_labels} labels"
        )));
    }
    let label_bytes = labels[8..8 + n].to_vec();
    if let Some((i, &l)) = label_bytes.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(DataError::Inconsistent(format!("label {l} at index {i} outside 0..=9")));
    }
    Ok(RawImageSet {
        rows,
        cols,
        pixels: images[16..expected].to_vec(),
        labels: label_bytes,
    })
}

pub fn parse_idx(image_path: &Path, label_path: &Path) -> Result<RawImageSet, DataError> {
    let images = fs::read(image_path).map_err(|e| DataError::io(image_path, e))?;
    let labels = fs::read(label_path).map_err(|e| DataError::io(label_path, e))?;
    read_idx(&images, &labels)
}

/// Encodes `set` as an (image file, label file) byte pair.
pub fn write_idx(set: &RawImageSet) -> (Vec<u8>, Vec<u8>) {
    let n = set.len() as u32;
    let mut img = Vec::with_capacity(16 + set.pixels.len());
    img.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    img.extend_from_slice(&n.to_be_bytes());
    img.extend_from_slice(&(set.rows as u32).to_be_bytes());
    img.extend_from_slice(&(set.cols as u32).to_be_bytes());
    img.extend_from_slice(&set.pixels);
    let mut lab = Vec::with_capacity(8 + set.labels.len());
    lab.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    lab.extend_from_slice(&n.to_be_bytes());
    lab.extend_from_slice(&set.labels);
    (img, lab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_images() -> RawImageSet {
        RawImageSet {
            rows: 28,
            cols: 28,
            pixels: (0..2 * 784).map(|i| (i % 256) as u8).collect(),
            labels: vec![3, 9],
        }
    }

    #[test]
    fn round_trip_two_images() {
        let set = two_images();
        let (img, lab) = write_idx(&set);
        assert_eq!(&img[..4], &[0, 0, 8, 3]);
        assert_eq!(read_idx(&img, &lab).unwrap(), set);
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let set = two_images();
        let (img, lab) = write_idx(&set);
        let (ip, lp) = (dir.path().join("img"), dir.path().join("lab"));
        std::fs::write(&ip, img).unwrap();
        std::fs::write(&lp, lab).unwrap();
        assert_eq!(parse_idx(&ip, &lp).unwrap(), set);
        assert!(matches!(parse_idx(&dir.path().join("nope"), &lp), Err(DataError::Io { .. })));
    }

    #[test]
    fn errors() {
        let set = two_images();
        let (img, lab) = write_idx(&set);
        assert!(matches!(read_idx(&lab, &lab), Err(DataError::BadMagic { found: LABEL_MAGIC, .. })));
        assert!(matches!(read_idx(&img, &img), Err(DataError::BadMagic { expected: LABEL_MAGIC, .. })));
        assert!(matches!(read_idx(&img[..100], &lab), Err(DataError::Truncated { .. })));
        let mut bad = lab.clone();
        bad[9] = 10;
        assert!(matches!(read_idx(&img, &bad), Err(DataError::Inconsistent(_))));
        let one = RawImageSet { labels: vec![1], pixels: set.pixels[..784].to_vec(), ..set };
        let (_, lab1) = write_idx(&one);
        assert!(matches!(read_idx(&img, &lab1), Err(DataError::Inconsistent(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn idx_round_trip(
            n in 0usize..6, rows in 1usize..9, cols in 1usize..9, seed in any::<u64>(),
        ) {
            let pixels = (0..n * rows * cols).map(|i| (seed.wrapping_mul(i as u64 + 1) >> 13) as u8).collect();
            let labels = (0..n).map(|i| ((seed >> (i % 60)) % 10) as u8).collect();
            let set = RawImageSet { rows, cols, pixels, labels };
            let (img, lab) = write_idx(&set);
            prop_assert_eq!(read_idx(&img, &lab).unwrap(), set);
        }
    }
}
