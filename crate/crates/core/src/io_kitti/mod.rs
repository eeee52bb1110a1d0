//! Semantic-KITTI layout readers and writers.
//!
//! Scans are packed little-endian `f32` quadruples `(x, y, z, intensity)`;
//! labels are packed little-endian `u32` words with the semantic class in the
//! low 16 bits. Predictions are a one-byte-per-point sidecar.

mod cloud;
mod labels;
mod ply;
mod prediction;

pub use cloud::{read_point_cloud, write_point_cloud, Point, PointCloud, SENSOR_FRAME, VEHICLE_FRAME};
pub use labels::{read_labels, write_labels, Label, LabelArray};
pub use ply::export_ply;
pub use prediction::{read_prediction, write_prediction};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_records(path: &Path, record_size: usize) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let rem = bytes.len() % record_size;
    if rem != 0 {
        return Err(Error::TruncatedRecord { path: path.to_path_buf(), offset: (bytes.len() - rem) as u64, record_size });
    }
    Ok(bytes)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
