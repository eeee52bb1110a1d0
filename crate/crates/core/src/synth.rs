//! Ray-cast synthetic scans with exact ground truth.
//!
//! One ray per pixel center of a [`ProjectionModel`], cast from the sensor
//! origin against simple analytic geometry. The sensor sits `sensor_height`
//! meters above a horizontal ground plane (`z = -sensor_height` in the sensor
//! frame). Output points are ordered row-major by `(v, u)`.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::io_kitti::{write_labels, write_point_cloud, Label, LabelArray, Point, PointCloud};
use crate::projection::ProjectionModel;
use crate::scalar::Scalar;

/// Semantic id written for ground points (road).
pub const GROUND_LABEL: u16 = 40;
/// Semantic id written for everything else (other-object).
pub const OBSTACLE_LABEL: u16 = 99;

/// Axis-aligned box given by its center and full side lengths, meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub center: Vec3<f64>,
    pub extents: Vec3<f64>,
}

impl BoxSpec {
    /// Box of the given size standing on ground `sensor_height` below the sensor.
    pub fn on_ground(x: f64, y: f64, extents: Vec3<f64>, sensor_height: f64) -> Self {
        Self { center: Vec3::new(x, y, -sensor_height + extents.z / 2.0), extents }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SceneKind {
    Plane,
    /// Flat ground that starts rising along +x at `x = start` with slope `grade`.
    Ramp {
        grade: f64,
        start: f64,
    },
    PlaneWithBoxes(Vec<BoxSpec>),
    /// Ground plus an unbounded vertical wall `x = distance` facing the sensor.
    Wall {
        distance: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub sensor_height: f64,
    pub kind: SceneKind,
    pub model: ProjectionModel<f64>,
    /// Gaussian range noise along each ray, meters.
    pub noise_sigma: f64,
    pub rng_seed: u64,
    /// Hits farther than this are not returned, meters.
    pub max_range: f64,
}

/// Default distance at which a ramp scene starts to climb, meters.
pub const DEFAULT_RAMP_START: f64 = 4.0;

impl SceneSpec {
    pub fn new(sensor_height: f64, kind: SceneKind) -> Self {
        Self { sensor_height, kind, model: ProjectionModel::kitti_hdl64(), noise_sigma: 0.0, rng_seed: 0, max_range: 120.0 }
    }

    pub fn plane(sensor_height: f64) -> Self {
        Self::new(sensor_height, SceneKind::Plane)
    }

    pub fn ramp(sensor_height: f64, grade: f64) -> Self {
        Self::new(sensor_height, SceneKind::Ramp { grade, start: DEFAULT_RAMP_START })
    }

    pub fn wall(sensor_height: f64, distance: f64) -> Self {
        Self::new(sensor_height, SceneKind::Wall { distance })
    }

    /// Ground with a handful of boxes scattered around the sensor.
    pub fn with_default_boxes(sensor_height: f64) -> Self {
        let b = |x, y, sx, sy, sz| BoxSpec::on_ground(x, y, Vec3::new(sx, sy, sz), sensor_height);
        Self::new(
            sensor_height,
            SceneKind::PlaneWithBoxes(vec![
                b(8.0, 2.0, 1.0, 1.0, 1.0),
                b(-6.0, -4.0, 2.0, 1.5, 2.5),
                b(3.0, -9.0, 4.0, 1.8, 1.5),
                b(-15.0, 10.0, 3.0, 3.0, 3.0),
                b(20.0, -5.0, 1.0, 6.0, 2.0),
            ]),
        )
    }

    pub fn with_model(mut self, model: ProjectionModel<f64>) -> Self {
        self.model = model;
        self
    }

    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Self {
        self.noise_sigma = sigma;
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScene(m));
        if !(self.sensor_height > 0.0) {
            return bad(format!("sensor height must be > 0, got {}", self.sensor_height));
        }
        if !(self.noise_sigma >= 0.0) {
            return bad(format!("noise sigma must be >= 0, got {}", self.noise_sigma));
        }
        if !(self.max_range > 0.0) {
            return bad(format!("max range must be > 0, got {}", self.max_range));
        }
        match &self.kind {
            SceneKind::Ramp { grade, start } if !(*grade >= 0.0) || !start.is_finite() => {
                bad(format!("ramp grade must be >= 0, got {grade}"))
            }
            SceneKind::Wall { distance } if !(*distance > 0.0) => bad(format!("wall distance must be > 0, got {distance}")),
            SceneKind::PlaneWithBoxes(boxes) => {
                for b in boxes {
                    if !(b.extents.x > 0.0 && b.extents.y > 0.0 && b.extents.z > 0.0) {
                        return bad(format!("box extents must be > 0, got {:?}", b.extents));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Sensor-frame height of the drivable surface at `(x, y)`.
    pub fn ground_elevation(&self, x: f64, _y: f64) -> f64 {
        match self.kind {
            SceneKind::Ramp { grade, start } => -self.sensor_height + grade * (x - start).max(0.0),
            _ => -self.sensor_height,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Surface {
    Ground,
    Ramp,
    Wall,
    Box(usize),
}

impl Surface {
    pub fn is_ground(self) -> bool {
        matches!(self, Surface::Ground | Surface::Ramp)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    pub is_ground: Vec<bool>,
    pub true_normal: Vec<Vec3<f64>>,
    pub surface: Vec<Surface>,
    /// Pixel `(u, v)` of the generating ray.
    pub pixel: Vec<(usize, usize)>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.is_ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_ground.is_empty()
    }

    pub fn labels(&self) -> LabelArray {
        self.is_ground.iter().map(|&g| Label { semantic_id: if g { GROUND_LABEL } else { OBSTACLE_LABEL }, instance_id: 0 }).collect()
    }
}

/// Upward unit normal of a ramp rising along +x.
pub fn ramp_normal(grade: f64) -> Vec3<f64> {
    let a = grade.atan();
    Vec3::new(-a.sin(), 0.0, a.cos())
}

struct Hit {
    t: f64,
    normal: Vec3<f64>,
    surface: Surface,
}

fn closer(best: Option<Hit>, candidate: Option<Hit>) -> Option<Hit> {
    match (best, candidate) {
        (Some(b), Some(c)) => Some(if c.t < b.t { c } else { b }),
        (b, c) => b.or(c),
    }
}

fn hit_plane_z(d: Vec3<f64>, z: f64) -> Option<f64> {
    (d.z < 0.0 && z < 0.0).then(|| z / d.z)
}

fn hit_ground(spec: &SceneSpec, d: Vec3<f64>) -> Option<Hit> {
    let h = spec.sensor_height;
    let flat = hit_plane_z(d, -h).filter(|&t| match spec.kind {
        SceneKind::Ramp { start, .. } => d.x * t < start,
        _ => true,
    });
    let flat = flat.map(|t| Hit { t, normal: Vec3::new(0.0, 0.0, 1.0), surface: Surface::Ground });
    let SceneKind::Ramp { grade, start } = spec.kind else {
        return flat;
    };
    // z = -h + grade (x - start) along t d.
    let denom = d.z - grade * d.x;
    let ramp = (denom != 0.0).then(|| (-h - grade * start) / denom).filter(|&t| t > 0.0 && d.x * t >= start).map(|t| Hit {
        t,
        normal: ramp_normal(grade),
        surface: Surface::Ramp,
    });
    closer(flat, ramp)
}

fn hit_box(b: &BoxSpec, d: Vec3<f64>, index: usize) -> Option<Hit> {
    let c = b.center.to_array();
    let e = b.extents.to_array();
    let dir = d.to_array();
    let (mut t_enter, mut t_exit) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut enter_axis = 0;
    for axis in 0..3 {
        let (lo, hi) = (c[axis] - e[axis] / 2.0, c[axis] + e[axis] / 2.0);
        if dir[axis] == 0.0 {
            if !(lo <= 0.0 && 0.0 <= hi) {
                return None;
            }
            continue;
        }
        let (t1, t2) = (lo / dir[axis], hi / dir[axis]);
        let (near, far) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        if near > t_enter {
            t_enter = near;
            enter_axis = axis;
        }
        t_exit = t_exit.min(far);
    }
    if !(t_enter <= t_exit && t_enter > 0.0) {
        return None;
    }
    let mut n = [0.0; 3];
    n[enter_axis] = -dir[enter_axis].signum();
    Some(Hit { t: t_enter, normal: n.into(), surface: Surface::Box(index) })
}

fn cast_ray(spec: &SceneSpec, d: Vec3<f64>) -> Option<Hit> {
    let mut best = hit_ground(spec, d);
    match &spec.kind {
        SceneKind::Wall { distance } if d.x > 0.0 => {
            let wall = Hit { t: distance / d.x, normal: Vec3::new(-1.0, 0.0, 0.0), surface: Surface::Wall };
            best = closer(best, Some(wall));
        }
        SceneKind::PlaneWithBoxes(boxes) => {
            for (i, b) in boxes.iter().enumerate() {
                best = closer(best, hit_box(b, d, i));
            }
        }
        _ => {}
    }
    best.filter(|h| h.t <= spec.max_range)
}

/// Casts one ray per pixel and returns the hits with their ground truth.
pub fn generate<T: Scalar>(spec: &SceneSpec) -> Result<(PointCloud<T>, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidScene(e.to_string()))?;
    let mut points = Vec::new();
    let mut gt = GroundTruth::default();
    let m = &spec.model;
    for v in 0..m.height {
        for u in 0..m.width {
            let d = m.ray_direction(u, v);
            let Some(hit) = cast_ray(spec, d) else { continue };
            let r = if spec.noise_sigma > 0.0 { hit.t + noise.sample(&mut rng) } else { hit.t };
            if r <= 0.0 {
                continue;
            }
            let p = (d * r).cast::<T>();
            points.push(Point { position: p, intensity: T::zero() });
            gt.is_ground.push(hit.surface.is_ground());
            gt.true_normal.push(hit.normal);
            gt.surface.push(hit.surface);
            gt.pixel.push((u, v));
        }
    }
    Ok((PointCloud::new(points), gt))
}

/// Writes `<base>.bin` and `<base>.label`; ground points get label 40, the
/// rest 99. Returns the two paths.
pub fn write_scene<T: Scalar>(base: impl AsRef<Path>, cloud: &PointCloud<T>, gt: &GroundTruth) -> Result<(PathBuf, PathBuf)> {
    if gt.len() != cloud.len() {
        return Err(Error::LengthMismatch { what: "ground truth vs cloud", left: gt.len(), right: cloud.len() });
    }
    let base = base.as_ref();
    let bin = base.with_extension("bin");
    let label = base.with_extension("label");
    write_point_cloud(&bin, cloud)?;
    write_labels(&label, &gt.labels())?;
    Ok((bin, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io_kitti::{read_labels, read_point_cloud};

    #[test]
    fn nadir_ray_range() {
        // One row exactly at -45°: hit range is h / sin 45°.
        let model = ProjectionModel::new(8, 3, 0.0, -std::f64::consts::FRAC_PI_4).unwrap();
        let spec = SceneSpec::plane(1.8).with_model(model);
        let (cloud, gt) = generate::<f64>(&spec).unwrap();
        let bottom: Vec<_> = gt.pixel.iter().enumerate().filter(|(_, px)| px.1 == 2).map(|(i, _)| i).collect();
        assert_eq!(bottom.len(), 8);
        for i in bottom {
            assert!((cloud.points[i].position.norm() - 2.545_584_412_271_571).abs() < 1e-9);
        }
    }

    #[test]
    fn wall_hits_face_the_sensor() {
        let (cloud, gt) = generate::<f64>(&SceneSpec::wall(1.8, 10.0)).unwrap();
        let mut walls = 0;
        for (i, s) in gt.surface.iter().enumerate() {
            if *s == Surface::Wall {
                walls += 1;
                assert_eq!(gt.true_normal[i], Vec3::new(-1.0, 0.0, 0.0));
                assert!((cloud.points[i].position.x - 10.0).abs() < 1e-9);
                assert!(!gt.is_ground[i]);
            }
        }
        assert!(walls > 1000);
    }

    #[test]
    fn same_seed_same_cloud() {
        let spec = SceneSpec::with_default_boxes(1.8).with_noise(0.02, 7);
        let (a, _) = generate::<f32>(&spec).unwrap();
        let (b, _) = generate::<f32>(&spec).unwrap();
        assert_eq!(a, b);
        let (c, _) = generate::<f32>(&spec.clone().with_noise(0.02, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ramp_normals() {
        assert_eq!(ramp_normal(0.0), Vec3::new(0.0, 0.0, 1.0));
        assert!((ramp_normal(0.12).z - 0.992_876_838_486_922_1).abs() < 1e-12);
        assert!((ramp_normal(1.0).z - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((ramp_normal(0.37).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ramp_points_lie_on_the_ramp() {
        let spec = SceneSpec::ramp(1.8, 0.12);
        let (cloud, gt) = generate::<f64>(&spec).unwrap();
        let mut ramp = 0;
        for (p, s) in cloud.points.iter().zip(&gt.surface) {
            let p = p.position;
            assert!((p.z - spec.ground_elevation(p.x, p.y)).abs() < 1e-9, "{p:?}");
            if *s == Surface::Ramp {
                ramp += 1;
                assert!(p.x >= DEFAULT_RAMP_START - 1e-9);
            }
        }
        assert!(ramp > 1000);
    }

    #[test]
    fn points_lie_on_their_rays() {
        let spec = SceneSpec::with_default_boxes(1.8);
        let (cloud, gt) = generate::<f64>(&spec).unwrap();
        for (p, &(u, v)) in cloud.points.iter().zip(&gt.pixel) {
            let d = spec.model.ray_direction(u, v);
            let p = p.position;
            assert!(d.cross(&p).norm() <= 1e-9 * p.norm());
            assert!(d.dot(&p) > 0.0);
        }
    }

    #[test]
    fn boxes_occlude_ground() {
        let spec = SceneSpec::with_default_boxes(1.8);
        let SceneKind::PlaneWithBoxes(boxes) = &spec.kind else { unreachable!() };
        let (cloud, gt) = generate::<f64>(&spec).unwrap();
        assert!(gt.surface.iter().any(|s| matches!(s, Surface::Box(_))));
        for (p, s) in cloud.points.iter().zip(&gt.surface) {
            if *s != Surface::Ground {
                continue;
            }
            // No ground point may have a box between it and the sensor.
            let d = p.position.normalized().unwrap();
            for (i, b) in boxes.iter().enumerate() {
                if let Some(h) = hit_box(b, d, i) {
                    assert!(h.t >= p.position.norm() - 1e-9, "ground point behind box {i}");
                }
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate::<f64>(&SceneSpec::ramp(1.8, -0.1)).is_err());
        assert!(generate::<f64>(&SceneSpec::wall(1.8, 0.0)).is_err());
        assert!(generate::<f64>(&SceneSpec::plane(1.8).with_noise(-1.0, 0)).is_err());
        let flat_box =
            SceneSpec::new(1.8, SceneKind::PlaneWithBoxes(vec![BoxSpec { center: Vec3::zero(), extents: Vec3::new(1.0, 0.0, 1.0) }]));
        assert!(generate::<f64>(&flat_box).is_err());
    }

    #[test]
    fn scene_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (cloud, gt) = generate::<f32>(&SceneSpec::with_default_boxes(1.8)).unwrap();
        let (bin, label) = write_scene(dir.path().join("scene"), &cloud, &gt).unwrap();
        let back: PointCloud<f32> = read_point_cloud(&bin).unwrap();
        assert_eq!(back, cloud);
        let labels = read_labels(&label).unwrap();
        assert_eq!(labels.len(), cloud.len());
        for (l, &g) in labels.labels.iter().zip(&gt.is_ground) {
            assert_eq!(l.to_word() & 0xFFFF, if g { 40 } else { 99 });
        }
    }

    #[test]
    fn empty_scene_writes_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let (bin, label) = write_scene(dir.path().join("e"), &PointCloud::<f32>::default(), &GroundTruth::default()).unwrap();
        assert_eq!(std::fs::metadata(bin).unwrap().len(), 0);
        assert_eq!(std::fs::metadata(label).unwrap().len(), 0);
    }
}
