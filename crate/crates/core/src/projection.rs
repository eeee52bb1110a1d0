//! Spherical projection of an unordered scan into a staggered range image.
//!
//! Azimuth `phi = atan2(y, x)` maps to columns through `u = phi / dphi + c_phi`
//! (wrapping modulo the width); elevation above the xy-plane maps to rows with
//! row 0 at the top of the field of view. Several points may fall on one
//! pixel; the nearest one wins.

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::grid::MaskedGrid;
use crate::io_kitti::PointCloud;
use crate::scalar::{round_half_even, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionModel<T> {
    /// Azimuth step per column, radians.
    pub delta_phi: T,
    /// Elevation step per row, radians.
    pub delta_theta: T,
    /// Column of azimuth zero.
    pub c_phi: T,
    /// Row offset such that `v = c_theta - theta / delta_theta`.
    pub c_theta: T,
    pub width: usize,
    pub height: usize,
    pub theta_min: T,
    pub theta_max: T,
}

/// Angular coordinates of a point: azimuth, elevation from the xy-plane, range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spherical<T> {
    pub phi: T,
    pub theta: T,
    pub r: T,
}

/// Elevation outside the modeled field of view. `row` is the rounded row the
/// point would have landed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfFov {
    pub row: i64,
}

impl<T: Scalar> ProjectionModel<T> {
    /// Full 360° model with `height` rows spanning `[theta_min, theta_max]`
    /// (radians, inclusive at both row centers).
    pub fn new(width: usize, height: usize, theta_max: T, theta_min: T) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::InvalidModel(format!("image must be at least 3x3, got {width}x{height}")));
        }
        if !(theta_max > theta_min) || !theta_max.is_finite() || !theta_min.is_finite() {
            return Err(Error::InvalidModel(format!("need theta_max > theta_min, got {theta_max} and {theta_min}")));
        }
        let delta_phi = T::TAU() / T::from_count(width);
        let delta_theta = (theta_max - theta_min) / T::from_count(height - 1);
        Ok(Self {
            delta_phi,
            delta_theta,
            c_phi: T::from_count(width) / T::lit(2.0),
            c_theta: theta_max / delta_theta,
            width,
            height,
            theta_min,
            theta_max,
        })
    }

    pub fn from_fov_degrees(width: usize, height: usize, fov_up_deg: T, fov_down_deg: T) -> Result<Self> {
        Self::new(width, height, fov_up_deg.to_radians(), fov_down_deg.to_radians())
    }

    /// 64x1024 model with the HDL-64E vertical field of view, +2.0° to -24.8°.
    pub fn kitti_hdl64() -> Self {
        Self::from_fov_degrees(1024, 64, T::lit(2.0), T::lit(-24.8)).expect("static model is valid")
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Continuous (unrounded, unwrapped) image coordinates.
    #[inline]
    pub fn continuous(&self, phi: T, theta: T) -> (T, T) {
        (phi / self.delta_phi + self.c_phi, (self.theta_max - theta) / self.delta_theta)
    }

    /// Discrete pixel `(u, v)`; the column wraps, the row never clamps.
    pub fn project(&self, phi: T, theta: T) -> Result<(usize, usize), OutOfFov> {
        let (u, v) = self.continuous(phi, theta);
        let u = round_half_even(u);
        let v = round_half_even(v);
        if !v.is_finite() || !u.is_finite() {
            return Err(OutOfFov { row: i64::MIN });
        }
        let row = v.to_i64().unwrap_or(i64::MIN);
        if row < 0 || row >= self.height as i64 {
            return Err(OutOfFov { row });
        }
        let col = u.to_i64().unwrap_or(0).rem_euclid(self.width as i64);
        Ok((col as usize, row as usize))
    }

    /// Angles of the ray through the center of pixel `(u, v)`.
    pub fn ray_angles(&self, u: usize, v: usize) -> (T, T) {
        let phi = (T::from_count(u) - self.c_phi) * self.delta_phi;
        let theta = self.theta_max - T::from_count(v) * self.delta_theta;
        (phi, theta)
    }

    /// Unit direction of the ray through pixel `(u, v)`.
    pub fn ray_direction(&self, u: usize, v: usize) -> Vec3<T> {
        let (phi, theta) = self.ray_angles(u, v);
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Vec3::new(ct * cp, ct * sp, st)
    }

    pub fn cast<U: Scalar>(&self) -> ProjectionModel<U> {
        let c = |x: T| U::lit(x.as_f64());
        ProjectionModel {
            delta_phi: c(self.delta_phi),
            delta_theta: c(self.delta_theta),
            c_phi: c(self.c_phi),
            c_theta: c(self.c_theta),
            width: self.width,
            height: self.height,
            theta_min: c(self.theta_min),
            theta_max: c(self.theta_max),
        }
    }
}

/// Spherical coordinates of `p`, or `None` for a zero or non-finite vector.
pub fn cart_to_spherical<T: Scalar>(p: Vec3<T>) -> Option<Spherical<T>> {
    let r = p.norm();
    if !(r > T::zero() && r.is_finite()) {
        return None;
    }
    Some(Spherical { phi: p.y.atan2(p.x), theta: p.z.atan2(p.x.hypot(p.y)), r })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProjectionStats {
    /// Pixels holding a point.
    pub occupied: usize,
    /// Points that lost a pixel to a nearer point.
    pub conflicts: usize,
    pub out_of_fov: usize,
    /// Zero-length or non-finite points.
    pub invalid_points: usize,
}

/// Per-pixel 3D points of a scan, `I_xyz(u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredImage<T> {
    pub width: usize,
    pub height: usize,
    pub points: Vec<Vec3<T>>,
    /// Distance to the sensor origin; stays a sensor-frame quantity after
    /// the points are moved to another frame.
    pub range: Vec<T>,
    pub valid: Vec<bool>,
    pub source_index: Vec<Option<u32>>,
    pub frame_id: String,
    pub stats: ProjectionStats,
}

impl<T: Scalar> StaggeredImage<T> {
    pub fn empty(width: usize, height: usize, frame_id: &str) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            points: vec![Vec3::zero(); n],
            range: vec![T::zero(); n],
            valid: vec![false; n],
            source_index: vec![None; n],
            frame_id: frame_id.to_string(),
            stats: ProjectionStats::default(),
        }
    }

    #[inline]
    pub fn index(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

/// Projects every point of `cloud`, keeping the nearest point per pixel.
/// Exact range ties keep the lower source index.
pub fn build_staggered_image<T: Scalar>(cloud: &PointCloud<T>, model: &ProjectionModel<T>) -> StaggeredImage<T> {
    let mut img = StaggeredImage::empty(model.width, model.height, &cloud.frame_id);
    let mut landed = 0usize;
    for (i, point) in cloud.points.iter().enumerate() {
        let Some(s) = cart_to_spherical(point.position) else {
            img.stats.invalid_points += 1;
            continue;
        };
        let (u, v) = match model.project(s.phi, s.theta) {
            Ok(px) => px,
            Err(_) => {
                img.stats.out_of_fov += 1;
                continue;
            }
        };
        landed += 1;
        let px = img.index(u, v);
        let idx = i as u32;
        let replace = match img.source_index[px] {
            None => true,
            Some(cur) => s.r < img.range[px] || (s.r == img.range[px] && idx < cur),
        };
        if replace {
            img.points[px] = point.position;
            img.range[px] = s.r;
            img.valid[px] = true;
            img.source_index[px] = Some(idx);
        }
    }
    img.stats.occupied = img.valid_count();
    img.stats.conflicts = landed - img.stats.occupied;
    img
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    X,
    Y,
    Z,
    Range,
}

/// One scalar channel of the image with its validity mask.
pub fn image_channel<T: Scalar>(img: &StaggeredImage<T>, channel: Channel) -> MaskedGrid<T> {
    let data = img
        .points
        .iter()
        .zip(&img.range)
        .zip(&img.valid)
        .map(|((p, r), &ok)| {
            if !ok {
                return T::zero();
            }
            match channel {
                Channel::X => p.x,
                Channel::Y => p.y,
                Channel::Z => p.z,
                Channel::Range => *r,
            }
        })
        .collect();
    MaskedGrid::new(img.width, img.height, data, img.valid.clone())
}
