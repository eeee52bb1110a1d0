//! Surface normals from image gradients.
//!
//! Neighbouring pixels of a staggered image are neighbouring laser rays, so a
//! 3x3 derivative filter run over the x, y and z channels yields two tangent
//! vectors per pixel: one along the azimuth (`Gu`) and one along the
//! elevation (`Gv`). Their normalized cross product is the surface normal.
//! That is six small convolutions and one cross product per pixel.

mod kernel;
mod oracle;

pub use kernel::{GradientKernel, KernelKind};
pub use oracle::{oracle_normal, OracleError, EIGEN_DEGENERACY_TOL};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::grid::MaskedGrid;
use crate::projection::{image_channel, Channel, StaggeredImage};
use crate::scalar::Scalar;

/// Cross products shorter than this (m²) mark the pixel invalid.
pub const CROSS_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalImage<T> {
    pub width: usize,
    pub height: usize,
    pub normals: Vec<Vec3<T>>,
    pub valid: Vec<bool>,
    pub frame_id: String,
}

impl<T: Scalar> NormalImage<T> {
    pub fn invalid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            normals: vec![Vec3::zero(); width * height],
            valid: vec![false; width * height],
            frame_id: crate::io_kitti::SENSOR_FRAME.to_string(),
        }
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

/// Per-pixel tangent vectors along increasing column (`gu`) and row (`gv`).
#[derive(Clone, Debug, PartialEq)]
pub struct GradientImages<T> {
    pub width: usize,
    pub height: usize,
    pub gu: Vec<Vec3<T>>,
    pub gv: Vec<Vec3<T>>,
    pub valid: Vec<bool>,
}

/// 3x3 correlation `out(u,v) = Σ k[dv+1][du+1] · f(u+du, v+dv)`.
///
/// Columns wrap around (azimuth is periodic); the first and last rows are
/// invalid. An output is valid only if all nine support pixels are.
pub fn convolve_channel<T: Scalar>(grid: &MaskedGrid<T>, kernel: &[[T; 3]; 3]) -> Result<MaskedGrid<T>> {
    let (w, h) = (grid.width, grid.height);
    if w < 3 || h < 3 {
        return Err(Error::UndersizedGrid { width: w, height: h });
    }
    let mut out = MaskedGrid::invalid(w, h);
    for v in 1..h - 1 {
        for u in 0..w {
            let cols = [if u == 0 { w - 1 } else { u - 1 }, u, if u + 1 == w { 0 } else { u + 1 }];
            let mut acc = T::zero();
            let mut ok = true;
            'support: for (kr, row) in kernel.iter().enumerate() {
                let base = (v + kr - 1) * w;
                for (kc, &weight) in row.iter().enumerate() {
                    let i = base + cols[kc];
                    if !grid.valid[i] {
                        ok = false;
                        break 'support;
                    }
                    acc = acc + weight * grid.data[i];
                }
            }
            if ok {
                let i = v * w + u;
                out.data[i] = acc;
                out.valid[i] = true;
            }
        }
    }
    Ok(out)
}

/// Six channel convolutions: `S_u` and `S_v` over x, y and z.
pub fn gradient_images<T: Scalar>(img: &StaggeredImage<T>, kernel: &GradientKernel<T>) -> GradientImages<T> {
    let (w, h) = (img.width, img.height);
    let n = w * h;
    let mut out = GradientImages { width: w, height: h, gu: vec![Vec3::zero(); n], gv: vec![Vec3::zero(); n], valid: vec![false; n] };
    if w < 3 || h < 3 {
        return out;
    }
    let channels = [Channel::X, Channel::Y, Channel::Z].map(|c| image_channel(img, c));
    let conv =
        |k: &[[T; 3]; 3]| -> [MaskedGrid<T>; 3] { [0, 1, 2].map(|c| convolve_channel(&channels[c], k).expect("size checked above")) };
    let [ux, uy, uz] = conv(&kernel.horizontal);
    let [vx, vy, vz] = conv(&kernel.vertical);
    for i in 0..n {
        // All six share the image mask, so one channel's validity speaks for all.
        if ux.valid[i] {
            out.gu[i] = Vec3::new(ux.data[i], uy.data[i], uz.data[i]);
            out.gv[i] = Vec3::new(vx.data[i], vy.data[i], vz.data[i]);
            out.valid[i] = true;
        }
    }
    out
}

/// `n = (Gu × Gv) / ‖Gu × Gv‖`, invalid where the tangents are parallel.
pub fn normals_from_gradients<T: Scalar>(grads: &GradientImages<T>) -> NormalImage<T> {
    let mut out = NormalImage::invalid(grads.width, grads.height);
    let eps = T::lit(CROSS_EPSILON);
    for i in 0..grads.gu.len() {
        if !grads.valid[i] {
            continue;
        }
        let c = grads.gu[i].cross(&grads.gv[i]);
        let len = c.norm();
        if len >= eps && len.is_finite() {
            out.normals[i] = c * (T::one() / len);
            out.valid[i] = true;
        }
    }
    out
}

/// Flips normals so they face the sensor origin: `n · (-P) >= 0`.
pub fn orient_normals<T: Scalar>(normals: &NormalImage<T>, img: &StaggeredImage<T>) -> NormalImage<T> {
    debug_assert_eq!(normals.frame_id, img.frame_id);
    let mut out = normals.clone();
    for (i, n) in out.normals.iter_mut().enumerate() {
        if out.valid[i] && n.dot(&-img.points[i]) < T::zero() {
            *n = -*n;
        }
    }
    out
}

/// Gradients, cross product and orientation, in the frame of `img`.
pub fn estimate_normals<T: Scalar>(img: &StaggeredImage<T>, kernel: &GradientKernel<T>) -> NormalImage<T> {
    let mut normals = normals_from_gradients(&gradient_images(img, kernel));
    normals.frame_id = img.frame_id.clone();
    orient_normals(&normals, img)
}
