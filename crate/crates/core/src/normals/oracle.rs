//! Reference normals from the covariance of the k nearest neighbours.
//!
//! Slow (brute-force neighbour search) and independent of the image
//! machinery; used to cross-check the gradient estimator.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::io_kitti::PointCloud;
use crate::scalar::Scalar;

/// Relative gap below which the two smallest eigenvalues count as equal.
pub const EIGEN_DEGENERACY_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("need k >= 3 and at least k + 1 points (k = {k}, cloud has {points})")]
    InsufficientPoints { k: usize, points: usize },
    #[error("query index {0} out of range")]
    BadQuery(usize),
    #[error("neighbourhood has no unique normal direction (eigenvalues {0:?})")]
    Degenerate([f64; 3]),
}

/// Unit normal at point `query`, oriented toward the sensor origin, from the
/// query point and its `k` nearest neighbours.
pub fn oracle_normal<T: Scalar>(cloud: &PointCloud<T>, query: usize, k: usize) -> Result<Vec3<T>, OracleError> {
    if k < 3 || cloud.len() < k + 1 {
        return Err(OracleError::InsufficientPoints { k, points: cloud.len() });
    }
    let q = cloud.points.get(query).ok_or(OracleError::BadQuery(query))?.position.cast::<f64>();

    let mut dists: Vec<(f64, usize)> = cloud
        .points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, p)| ((p.position.cast::<f64>() - q).norm_squared(), i))
        .collect();
    dists.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("finite distances"));

    let mut members: Vec<Vector3<f64>> = vec![Vector3::new(q.x, q.y, q.z)];
    members.extend(dists[..k].iter().map(|&(_, i)| {
        let p = cloud.points[i].position.cast::<f64>();
        Vector3::new(p.x, p.y, p.z)
    }));

    let mean = members.iter().sum::<Vector3<f64>>() / members.len() as f64;
    let cov = members.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - mean;
        acc + d * d.transpose()
    }) / members.len() as f64;

    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
    let lambda = order.map(|i| eig.eigenvalues[i]);
    if !(lambda[2] > 0.0) || lambda[1] - lambda[0] <= EIGEN_DEGENERACY_TOL * lambda[2] {
        return Err(OracleError::Degenerate(lambda));
    }
    let col = eig.eigenvectors.column(order[0]);
    let mut n = Vec3::new(col[0], col[1], col[2]).normalized().ok_or(OracleError::Degenerate(lambda))?;
    if n.dot(&-q) < 0.0 {
        n = -n;
    }
    Ok(n.cast())
}
