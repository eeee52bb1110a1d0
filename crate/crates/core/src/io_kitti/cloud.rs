use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Scalar;

use super::{read_records, write_bytes};

pub const SENSOR_FRAME: &str = "sensor";
pub const VEHICLE_FRAME: &str = "vehicle";

const RECORD_SIZE: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub position: Vec3<T>,
    pub intensity: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T, z: T, intensity: T) -> Self {
        Self { position: Vec3::new(x, y, z), intensity }
    }
}

/// An unordered scan. Point order is significant: it is the join key against
/// per-point label files.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    pub points: Vec<Point<T>>,
    pub frame_id: String,
    /// Record indices (in the source file) that were dropped for holding
    /// non-finite values. Sorted ascending.
    pub dropped_records: Vec<usize>,
}

impl<T: Scalar> Default for PointCloud<T> {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Vec<Point<T>>) -> Self {
        Self { points, frame_id: SENSOR_FRAME.to_string(), dropped_records: Vec::new() }
    }

    pub fn from_positions(positions: impl IntoIterator<Item = Vec3<T>>) -> Self {
        Self::new(positions.into_iter().map(|position| Point { position, intensity: T::zero() }).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of records in the source file, including dropped ones.
    pub fn record_count(&self) -> usize {
        self.points.len() + self.dropped_records.len()
    }

    /// Maps per-point values back onto source records, filling dropped ones.
    pub fn expand_to_records<L: Copy>(&self, per_point: &[L], fill: L) -> Result<Vec<L>> {
        if per_point.len() != self.points.len() {
            return Err(Error::LengthMismatch { what: "per-point values vs cloud", left: per_point.len(), right: self.len() });
        }
        let mut out = Vec::with_capacity(self.record_count());
        let mut values = per_point.iter();
        let mut dropped = self.dropped_records.iter().peekable();
        for record in 0..self.record_count() {
            if dropped.peek() == Some(&&record) {
                dropped.next();
                out.push(fill);
            } else {
                out.push(*values.next().expect("count checked above"));
            }
        }
        Ok(out)
    }

    /// Selects per-record values for the points that survived loading.
    pub fn select_records<L: Copy>(&self, per_record: &[L]) -> Result<Vec<L>> {
        if per_record.len() != self.record_count() {
            return Err(Error::LengthMismatch {
                what: "per-record values vs scan records",
                left: per_record.len(),
                right: self.record_count(),
            });
        }
        let mut dropped = self.dropped_records.iter().peekable();
        let mut out = Vec::with_capacity(self.len());
        for (record, value) in per_record.iter().enumerate() {
            if dropped.peek() == Some(&&record) {
                dropped.next();
            } else {
                out.push(*value);
            }
        }
        Ok(out)
    }

    pub fn cast<U: Scalar>(&self) -> PointCloud<U> {
        PointCloud {
            points: self.points.iter().map(|p| Point { position: p.position.cast(), intensity: U::lit(p.intensity.as_f64()) }).collect(),
            frame_id: self.frame_id.clone(),
            dropped_records: self.dropped_records.clone(),
        }
    }
}

/// Reads a velodyne `.bin` scan. Records holding any non-finite value are
/// dropped and listed in [`PointCloud::dropped_records`].
pub fn read_point_cloud<T: Scalar>(path: impl AsRef<Path>) -> Result<PointCloud<T>> {
    let path = path.as_ref();
    let bytes = read_records(path, RECORD_SIZE)?;
    let mut points = Vec::with_capacity(bytes.len() / RECORD_SIZE);
    let mut dropped_records = Vec::new();
    for (i, rec) in bytes.chunks_exact(RECORD_SIZE).enumerate() {
        let f = |k: usize| f32::from_le_bytes([rec[4 * k], rec[4 * k + 1], rec[4 * k + 2], rec[4 * k + 3]]);
        let v = [f(0), f(1), f(2), f(3)];
        if v.iter().all(|c| c.is_finite()) {
            points.push(Point::new(T::lit(v[0] as f64), T::lit(v[1] as f64), T::lit(v[2] as f64), T::lit(v[3] as f64)));
        } else {
            dropped_records.push(i);
        }
    }
    Ok(PointCloud { points, frame_id: SENSOR_FRAME.to_string(), dropped_records })
}

/// Writes the cloud as packed `f32` quadruples. Dropped records are not
/// reproduced.
pub fn write_point_cloud<T: Scalar>(path: impl AsRef<Path>, cloud: &PointCloud<T>) -> Result<()> {
    let mut bytes = Vec::with_capacity(cloud.len() * RECORD_SIZE);
    for p in &cloud.points {
        for c in [p.position.x, p.position.y, p.position.z, p.intensity] {
            bytes.extend_from_slice(&(c.as_f64() as f32).to_le_bytes());
        }
    }
    write_bytes(path.as_ref(), &bytes)
}
