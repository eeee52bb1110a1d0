use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::freespace::{SegmentationResult, SpaceClass};
use crate::normals::NormalImage;
use crate::scalar::Scalar;

use super::PointCloud;

fn color(class: SpaceClass) -> [u8; 3] {
    match class {
        SpaceClass::Free => [255, 165, 0],
        SpaceClass::OffGround => [128, 128, 128],
        SpaceClass::Invalid => [255, 0, 0],
    }
}

/// Writes an ASCII PLY 1.0 file colored by class. When `normals` is given,
/// each vertex also carries the normal of the pixel it landed in (zero when
/// the point has no valid normal).
pub fn export_ply<T: Scalar>(
    path: impl AsRef<Path>,
    cloud: &PointCloud<T>,
    result: &SegmentationResult<T>,
    normals: Option<&NormalImage<T>>,
) -> Result<()> {
    let path = path.as_ref();
    if result.point_labels.len() != cloud.len() {
        return Err(Error::LengthMismatch { what: "segmentation labels vs cloud", left: result.point_labels.len(), right: cloud.len() });
    }
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);

    writeln!(w, "ply").map_err(io)?;
    writeln!(w, "format ascii 1.0").map_err(io)?;
    writeln!(w, "comment hfsd free space export").map_err(io)?;
    writeln!(w, "element vertex {}", cloud.len()).map_err(io)?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property float {axis}").map_err(io)?;
    }
    for channel in ["red", "green", "blue"] {
        writeln!(w, "property uchar {channel}").map_err(io)?;
    }
    if normals.is_some() {
        for axis in ["nx", "ny", "nz"] {
            writeln!(w, "property float {axis}").map_err(io)?;
        }
    }
    writeln!(w, "end_header").map_err(io)?;

    for (i, (p, class)) in cloud.points.iter().zip(&result.point_labels).enumerate() {
        let [r, g, b] = color(*class);
        let pos = p.position;
        write!(w, "{} {} {} {r} {g} {b}", pos.x, pos.y, pos.z).map_err(io)?;
        if let Some(img) = normals {
            let n = result.point_pixel[i].map(|px| px as usize).filter(|&px| img.valid[px]).map(|px| img.normals[px]).unwrap_or_default();
            write!(w, " {} {} {}", n.x, n.y, n.z).map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freespace::SegmentationResult;
    use crate::geometry::Vec3;

    fn single_free_point() -> (PointCloud<f64>, SegmentationResult<f64>) {
        let cloud = PointCloud::from_positions([Vec3::zero()]);
        let mut result = SegmentationResult::empty(3, 3, 1);
        result.point_labels[0] = SpaceClass::Free;
        (cloud, result)
    }

    #[test]
    fn free_point_is_orange() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ply");
        let (cloud, result) = single_free_point();
        export_ply(&path, &cloud, &result, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0\n"));
        assert!(text.contains("element vertex 1\n"));
        assert!(text.lines().any(|l| l == "0 0 0 255 165 0"), "{text}");
    }

    #[test]
    fn empty_cloud_has_valid_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.ply");
        let cloud = PointCloud::<f32>::default();
        export_ply(&path, &cloud, &SegmentationResult::empty(3, 3, 0), None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("element vertex 0\n"));
        assert!(text.ends_with("end_header\n"));
    }

    #[test]
    fn normals_add_properties() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.ply");
        let (cloud, result) = single_free_point();
        let normals = NormalImage::<f64>::invalid(3, 3);
        export_ply(&path, &cloud, &result, Some(&normals)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        for axis in ["nx", "ny", "nz"] {
            assert!(text.contains(&format!("property float {axis}\n")));
        }
        assert!(text.lines().any(|l| l == "0 0 0 255 165 0 0 0 0"));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cloud = PointCloud::from_positions([Vec3::<f64>::zero(), Vec3::zero()]);
        let result = SegmentationResult::empty(3, 3, 1);
        assert!(matches!(export_ply(dir.path().join("x.ply"), &cloud, &result, None), Err(Error::LengthMismatch { .. })));
    }
}
