//! Run configuration, loaded from JSON with every key optional.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RigidTransform, Vec3};
use crate::normals::{GradientKernel, KernelKind};
use crate::projection::ProjectionModel;
use crate::scalar::Scalar;

/// Semantic KITTI classes counted as free space: road, parking, sidewalk,
/// other-ground, lane-marking.
pub const DEFAULT_FREESPACE_IDS: [u16; 5] = [40, 44, 48, 49, 60];

/// KITTI velodyne mounting height above the road, meters.
pub const KITTI_SENSOR_HEIGHT: f64 = 1.73;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Image rows (laser layers).
    pub height: usize,
    /// Image columns (azimuth steps over 360°).
    pub width: usize,
    /// Elevation of the top row, degrees above the horizon.
    pub fov_up_deg: f64,
    /// Elevation of the bottom row, degrees (negative below the horizon).
    pub fov_down_deg: f64,
    /// Sensor-to-vehicle rotation, row-major.
    pub rotation: [[f64; 3]; 3],
    /// Sensor-to-vehicle translation, meters.
    pub translation: [f64; 3],
    pub cos_gamma_min: f64,
    pub cos_gamma_max: f64,
    pub sigma_multiplier: f64,
    /// Lower bound on the ground-height standard deviation, meters.
    pub sigma_floor: f64,
    pub freespace_label_ids: BTreeSet<u16>,
    pub gradient_kernel: KernelKind,
    /// Untimed warm-up runs before benchmark sampling.
    pub warmup_scans: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            height: 64,
            width: 1024,
            fov_up_deg: 2.0,
            fov_down_deg: -24.8,
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0, 0.0, KITTI_SENSOR_HEIGHT],
            cos_gamma_min: 0.90,
            cos_gamma_max: 1.0,
            sigma_multiplier: 1.0,
            sigma_floor: 0.01,
            freespace_label_ids: DEFAULT_FREESPACE_IDS.into_iter().collect(),
            gradient_kernel: KernelKind::Scharr,
            warmup_scans: 3,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.cos_gamma_min > 0.0 && self.cos_gamma_min <= self.cos_gamma_max && self.cos_gamma_max <= 1.0) {
            return bad(format!("need 0 < cos_gamma_min <= cos_gamma_max <= 1, got {} and {}", self.cos_gamma_min, self.cos_gamma_max));
        }
        if !(self.sigma_multiplier > 0.0 && self.sigma_multiplier.is_finite()) {
            return bad(format!("sigma_multiplier must be > 0, got {}", self.sigma_multiplier));
        }
        if !(self.sigma_floor >= 0.0 && self.sigma_floor.is_finite()) {
            return bad(format!("sigma_floor must be >= 0, got {}", self.sigma_floor));
        }
        if self.height < 3 || self.width < 3 {
            return bad(format!("image must be at least 3x3, got {}x{}", self.width, self.height));
        }
        if !(self.fov_up_deg > self.fov_down_deg) || self.fov_up_deg > 90.0 || self.fov_down_deg < -90.0 {
            return bad(format!("invalid vertical field of view [{}, {}]", self.fov_down_deg, self.fov_up_deg));
        }
        self.transform::<f64>().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    pub fn projection_model<T: Scalar>(&self) -> Result<ProjectionModel<T>> {
        ProjectionModel::from_fov_degrees(self.width, self.height, T::lit(self.fov_up_deg), T::lit(self.fov_down_deg))
    }

    /// Sensor-to-vehicle transform. Orthonormality is checked in `f64`
    /// before narrowing to `T`.
    pub fn transform<T: Scalar>(&self) -> Result<RigidTransform<T>> {
        let t = RigidTransform::new(self.rotation, Vec3::from(self.translation))?;
        Ok(t.cast())
    }

    pub fn kernel<T: Scalar>(&self) -> GradientKernel<T> {
        GradientKernel::new(self.gradient_kernel)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg = RunConfig::from_json(&text).map_err(|source| Error::ConfigParse { path: path.to_path_buf(), source })?;
    cfg.validate()?;
    Ok(cfg)
}
