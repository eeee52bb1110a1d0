//! Free space detection for spinning LiDAR scans.
//!
//! A scan is projected into a staggered range image, surface normals are
//! estimated with 3x3 gradient filters over the image channels, and pixels
//! whose vehicle-frame normal is near vertical and whose height is close to
//! the mean ground height are reported as free space.
//!
//! ```
//! use hfsd_core::{segment, PointCloudF32, RunConfig, SceneSpec, SpaceClass};
//!
//! let (cloud, _truth) = hfsd_core::synth::generate::<f32>(&SceneSpec::plane(1.73)).unwrap();
//! let result = segment(&cloud, &RunConfig::default()).unwrap();
//! assert!(result.count(SpaceClass::Free) > 0);
//! # let _: &PointCloudF32 = &cloud;
//! ```
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F32` / `*F64` aliases below name the common instantiations.

// `!(a > b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod eval;
pub mod freespace;
pub mod geometry;
pub mod grid;
pub mod io_kitti;
pub mod normals;
pub mod projection;
pub mod scalar;
pub mod synth;

pub use config::{load_config, RunConfig};
pub use error::{Error, Result};
pub use freespace::{segment, SegmentationResult, Segmenter, SpaceClass};
pub use geometry::{RigidTransform, Vec3};
pub use io_kitti::{Label, LabelArray, Point, PointCloud};
pub use normals::{estimate_normals, GradientKernel, KernelKind, NormalImage};
pub use projection::{build_staggered_image, ProjectionModel, StaggeredImage};
pub use scalar::Scalar;
pub use synth::SceneSpec;

pub type PointCloudF32 = PointCloud<f32>;
pub type PointCloudF64 = PointCloud<f64>;
pub type ProjectionModelF32 = ProjectionModel<f32>;
pub type ProjectionModelF64 = ProjectionModel<f64>;
pub type StaggeredImageF32 = StaggeredImage<f32>;
pub type StaggeredImageF64 = StaggeredImage<f64>;
pub type NormalImageF32 = NormalImage<f32>;
pub type NormalImageF64 = NormalImage<f64>;
pub type SegmentationResultF32 = SegmentationResult<f32>;
pub type SegmentationResultF64 = SegmentationResult<f64>;
pub type SegmenterF32 = Segmenter<f32>;
pub type SegmenterF64 = Segmenter<f64>;
pub type RigidTransformF32 = RigidTransform<f32>;
pub type RigidTransformF64 = RigidTransform<f64>;
