use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Derivative `(-1, 0, 1)` smoothed by `(3, 10, 3) / 16` across it.
    #[default]
    Scharr,
    /// Plain `(-1, 0, 1)` with no smoothing.
    CentralDifference,
}

/// A pair of 3x3 derivative kernels indexed `[row][col]`, i.e. `[dv+1][du+1]`.
/// `vertical` is the transpose of `horizontal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientKernel<T> {
    pub kind: KernelKind,
    pub horizontal: [[T; 3]; 3],
    pub vertical: [[T; 3]; 3],
}

impl<T: Scalar> GradientKernel<T> {
    pub fn new(kind: KernelKind) -> Self {
        let weights: [[f64; 3]; 3] = match kind {
            KernelKind::Scharr => {
                let (a, b) = (3.0 / 16.0, 10.0 / 16.0);
                [[-a, 0.0, a], [-b, 0.0, b], [-a, 0.0, a]]
            }
            KernelKind::CentralDifference => [[0.0, 0.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
        };
        let horizontal = weights.map(|row| row.map(T::lit));
        Self { kind, horizontal, vertical: transpose(&horizontal) }
    }

    /// Both kernels multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let scale = |k: &[[T; 3]; 3]| k.map(|row| row.map(|x| x * s));
        Self { kind: self.kind, horizontal: scale(&self.horizontal), vertical: scale(&self.vertical) }
    }

    /// Response of `horizontal` to the field `f(u, v) = u`.
    pub fn ramp_gain(&self) -> T {
        let mut gain = T::zero();
        for row in &self.horizontal {
            for (c, &w) in row.iter().enumerate() {
                gain = gain + w * T::from_count(c) - w;
            }
        }
        gain
    }
}

fn transpose<T: Copy>(k: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut t = *k;
    for (r, row) in t.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = k[c][r];
        }
    }
    t
}
