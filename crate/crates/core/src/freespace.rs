//! Ground extraction from height change features.
//!
//! After moving points and normals into the vehicle frame (x forward, y left,
//! z up), `cos γ` is the z-component of each unit normal. Pixels whose normal
//! is close to vertical form `V`; the members of `V` whose height lies within
//! one (scaled) standard deviation of the mean height of `V` form the ground
//! set `G`. Everything else that holds a point is off-ground.

use std::time::{Duration, Instant};

use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::RigidTransform;
use crate::grid::{MaskedGrid, PixelMask};
use crate::io_kitti::{PointCloud, VEHICLE_FRAME};
use crate::normals::{estimate_normals, GradientKernel, NormalImage};
use crate::projection::{build_staggered_image, ProjectionModel, ProjectionStats, StaggeredImage};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SpaceClass {
    OffGround = 0,
    Free = 1,
    Invalid = 2,
}

impl SpaceClass {
    pub fn to_byte(self) -> u8 {
        self as u8
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Self::OffGround),
            1 => Some(Self::Free),
            2 => Some(Self::Invalid),
            _ => None,
        }
    }

    /// Semantic KITTI label word for external tools: free space becomes
    /// road (40), off-ground becomes other-object (99), invalid unlabeled (0).
    pub fn to_label_word(self) -> u32 {
        match self {
            Self::Free => 40,
            Self::OffGround => 99,
            Self::Invalid => 0,
        }
    }
}

pub fn to_vehicle_frame<T: Scalar>(img: &StaggeredImage<T>, transform: &RigidTransform<T>) -> StaggeredImage<T> {
    let mut out = img.clone();
    for (p, &ok) in out.points.iter_mut().zip(&img.valid) {
        if ok {
            *p = transform.apply(*p);
        }
    }
    out.frame_id = VEHICLE_FRAME.to_string();
    out
}

/// Rotates valid normals; directions ignore the translation.
pub fn rotate_normals<T: Scalar>(normals: &NormalImage<T>, transform: &RigidTransform<T>) -> NormalImage<T> {
    let mut out = normals.clone();
    for (n, &ok) in out.normals.iter_mut().zip(&normals.valid) {
        if ok {
            *n = transform.rotate(*n);
        }
    }
    out.frame_id = VEHICLE_FRAME.to_string();
    out
}

/// `cos γ` per pixel: the z-component of the vehicle-frame normal, clamped to [-1, 1].
pub fn height_change_feature<T: Scalar>(normals: &NormalImage<T>) -> MaskedGrid<T> {
    let data =
        normals.normals.iter().zip(&normals.valid).map(|(n, &ok)| if ok { n.z.max(-T::one()).min(T::one()) } else { T::zero() }).collect();
    MaskedGrid::new(normals.width, normals.height, data, normals.valid.clone())
}

/// `V`: valid pixels with `cos_gamma_min <= cos γ <= cos_gamma_max`.
pub fn select_verticals<T: Scalar>(cos_gamma: &MaskedGrid<T>, cfg: &RunConfig) -> PixelMask {
    let (lo, hi) = (T::lit(cfg.cos_gamma_min), T::lit(cfg.cos_gamma_max));
    let bits = cos_gamma.data.iter().zip(&cos_gamma.valid).map(|(&c, &ok)| ok && lo <= c && c <= hi).collect();
    PixelMask::from_bits(cos_gamma.width, cos_gamma.height, bits)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundFilter<T> {
    pub ground: PixelMask,
    /// Mean vehicle-frame height over `V`.
    pub mean: T,
    /// Population standard deviation of the height over `V`.
    pub std: T,
    /// Acceptance half-width: `sigma_multiplier * max(std, sigma_floor)`.
    pub band: T,
}

/// Mean and population standard deviation of `values`; `(0, 0)` when empty.
pub fn mean_std<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> (T, T) {
    let n = values.clone().count();
    if n == 0 {
        return (T::zero(), T::zero());
    }
    let count = T::from_count(n);
    let mean = values.clone().sum::<T>() / count;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<T>() / count;
    (mean, var.sqrt())
}

/// `G = {p ∈ V : |z(p) - μ| < k · max(σ, σ_floor)}` over vehicle-frame heights.
pub fn statistical_ground_filter<T: Scalar>(verticals: &PixelMask, img_vehicle: &StaggeredImage<T>, cfg: &RunConfig) -> GroundFilter<T> {
    let heights = verticals.iter().map(|px| img_vehicle.points[px].z);
    let (mean, std) = mean_std(heights);
    let band = T::lit(cfg.sigma_multiplier) * std.max(T::lit(cfg.sigma_floor));
    let mut ground = PixelMask::empty(verticals.width, verticals.height);
    for px in verticals.iter() {
        ground.bits[px] = (img_vehicle.points[px].z - mean).abs() < band;
    }
    GroundFilter { ground, mean, std, band }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationResult<T> {
    pub width: usize,
    pub height: usize,
    pub pixel_class: Vec<SpaceClass>,
    /// One class per cloud point, in cloud order.
    pub point_labels: Vec<SpaceClass>,
    /// Pixel each point occupies; `None` for points that never made it into
    /// the image.
    pub point_pixel: Vec<Option<u32>>,
    pub valid: PixelMask,
    pub verticals: PixelMask,
    pub ground: PixelMask,
    pub mean: T,
    pub std: T,
    pub band: T,
    pub projection: ProjectionStats,
}

impl<T: Scalar> SegmentationResult<T> {
    /// All-invalid result for `points` points on a `width x height` image.
    pub fn empty(width: usize, height: usize, points: usize) -> Self {
        Self {
            width,
            height,
            pixel_class: vec![SpaceClass::Invalid; width * height],
            point_labels: vec![SpaceClass::Invalid; points],
            point_pixel: vec![None; points],
            valid: PixelMask::empty(width, height),
            verticals: PixelMask::empty(width, height),
            ground: PixelMask::empty(width, height),
            mean: T::zero(),
            std: T::zero(),
            band: T::zero(),
            projection: ProjectionStats::default(),
        }
    }

    /// `OG = valid \ G`.
    pub fn off_ground(&self) -> PixelMask {
        self.valid.difference(&self.ground)
    }

    pub fn count(&self, class: SpaceClass) -> usize {
        self.point_labels.iter().filter(|&&c| c == class).count()
    }
}

/// Vehicle-frame intermediates kept for inspection and post-hoc checks.
#[derive(Clone, Debug)]
pub struct Intermediates<T> {
    pub image: StaggeredImage<T>,
    pub normals: NormalImage<T>,
    pub cos_gamma: MaskedGrid<T>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub projection: Duration,
    pub normals: Duration,
    pub filter: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.projection + self.normals + self.filter
    }
}

impl std::ops::AddAssign for StageTimings {
    fn add_assign(&mut self, o: Self) {
        self.projection += o.projection;
        self.normals += o.normals;
        self.filter += o.filter;
    }
}

/// Configuration resolved once into the concrete pieces the pipeline needs.
#[derive(Clone, Debug)]
pub struct Segmenter<T> {
    pub model: ProjectionModel<T>,
    pub kernel: GradientKernel<T>,
    pub transform: RigidTransform<T>,
    pub config: RunConfig,
}

impl<T: Scalar> Segmenter<T> {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { model: cfg.projection_model()?, kernel: cfg.kernel(), transform: cfg.transform()?, config: cfg.clone() })
    }

    pub fn segment(&self, cloud: &PointCloud<T>) -> SegmentationResult<T> {
        self.segment_detailed(cloud).0
    }

    pub fn segment_detailed(&self, cloud: &PointCloud<T>) -> (SegmentationResult<T>, Intermediates<T>, StageTimings) {
        let t0 = Instant::now();
        let sensor_img = build_staggered_image(cloud, &self.model);
        let t1 = Instant::now();
        let sensor_normals = estimate_normals(&sensor_img, &self.kernel);
        let t2 = Instant::now();

        let image = to_vehicle_frame(&sensor_img, &self.transform);
        let normals = rotate_normals(&sensor_normals, &self.transform);
        let cos_gamma = height_change_feature(&normals);
        let verticals = select_verticals(&cos_gamma, &self.config);
        let filter = statistical_ground_filter(&verticals, &image, &self.config);
        let result = back_project(cloud.len(), &image, verticals, filter);
        let t3 = Instant::now();

        let timings = StageTimings { projection: t1 - t0, normals: t2 - t1, filter: t3 - t2 };
        (result, Intermediates { image, normals, cos_gamma }, timings)
    }
}

fn back_project<T: Scalar>(
    points: usize,
    image: &StaggeredImage<T>,
    verticals: PixelMask,
    filter: GroundFilter<T>,
) -> SegmentationResult<T> {
    let (w, h) = (image.width, image.height);
    let mut result = SegmentationResult::empty(w, h, points);
    result.valid = PixelMask::from_bits(w, h, image.valid.clone());
    for px in 0..w * h {
        let class = if !image.valid[px] {
            SpaceClass::Invalid
        } else if filter.ground.contains(px) {
            SpaceClass::Free
        } else {
            SpaceClass::OffGround
        };
        result.pixel_class[px] = class;
        if let Some(src) = image.source_index[px] {
            result.point_labels[src as usize] = class;
            result.point_pixel[src as usize] = Some(px as u32);
        }
    }
    result.verticals = verticals;
    result.ground = filter.ground;
    result.mean = filter.mean;
    result.std = filter.std;
    result.band = filter.band;
    result.projection = image.stats;
    result
}

/// Full pipeline from a sensor-frame scan to per-point classes.
pub fn segment<T: Scalar>(cloud: &PointCloud<T>, cfg: &RunConfig) -> Result<SegmentationResult<T>> {
    Ok(Segmenter::new(cfg)?.segment(cloud))
}
