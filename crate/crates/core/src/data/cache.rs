use std::fs;
use std::path::Path;

use super::DataError;
use crate::gp::FeatureMatrix;

/// Leading tag of the feature cache format.
pub const CACHE_TAG: &[u8; 4] = b"SGF1";

/// `SGF1`, then `n` and `F` as little-endian u64, then `n × F` little-endian
/// f64 values in row-major order.
pub fn write_feature_cache(path: &Path, features: &FeatureMatrix) -> Result<(), DataError> {
    let rows = features.to_row_major();
    let mut buf = Vec::with_capacity(20 + rows.len() * 8);
    buf.extend_from_slice(CACHE_TAG);
    buf.extend_from_slice(&(features.n_rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(features.n_features() as u64).to_le_bytes());
    for v in rows {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| DataError::io(path, e))
}

pub fn read_feature_cache(path: &Path) -> Result<FeatureMatrix, DataError> {
    let bytes = fs::read(path).map_err(|e| DataError::io(path, e))?;
    if bytes.len() < 20 {
        return Err(DataError::Truncated {
            what: "feature cache header",
            expected: 20,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != CACHE_TAG {
        return Err(DataError::Inconsistent(format!(
            "feature cache tag {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..4]),
            "SGF1"
        )));
    }
    let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes")) as usize;
    let (n, f) = (u64_at(4), u64_at(12));
    let expected = 20 + n * f * 8;
    if bytes.len() != expected {
        return Err(DataError::Truncated {
            what: "feature cache payload",
            expected,
            found: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes[20..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(FeatureMatrix::from_row_major(n, f, &values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trip_and_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.sgf");
        let x = FeatureMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 0.5]);
        write_feature_cache(&p, &x).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"SGF1");
        assert_eq!(bytes[4], 2);
        assert_eq!(bytes[12], 3);
        assert_eq!(&bytes[20..28], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[28..36], &2.0f64.to_le_bytes());
        assert_eq!(read_feature_cache(&p).unwrap(), x);
        std::fs::write(&p, &bytes[..30]).unwrap();
        assert!(read_feature_cache(&p).is_err());
    }
}
