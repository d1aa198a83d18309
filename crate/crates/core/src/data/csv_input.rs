use std::path::Path;

use super::DataError;
use crate::gp::FeatureMatrix;
use crate::objectives::LabeledDataset;

/// Reads a headered numeric CSV. Every column except `label_column` is a
/// feature; labels must be 0 or 1.
pub fn load_csv(path: &Path, label_column: &str) -> Result<LabeledDataset, DataError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| DataError::Config(format!("label column `{label_column}` not in header")))?;
    let n_features = headers.len() - 1;
    if n_features == 0 {
        return Err(DataError::Config("no feature columns".into()));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| DataError::Parse {
                row: row + 1,
                column: headers.get(col).unwrap_or("?").to_string(),
                value: cell.to_string(),
            })?;
            if col == label_idx {
                if v != 0.0 && v != 1.0 {
                    return Err(DataError::Parse {
                        row: row + 1,
                        column: label_column.to_string(),
                        value: cell.to_string(),
                    });
                }
                labels.push(v as u8);
            } else {
                if !v.is_finite() {
                    return Err(DataError::Parse {
                        row: row + 1,
                        column: headers.get(col).unwrap_or("?").to_string(),
                        value: cell.to_string(),
                    });
                }
                values.push(v);
            }
        }
    }
    Ok(LabeledDataset::new(
        FeatureMatrix::from_row_major(labels.len(), n_features, &values),
        labels,
    ))
}
