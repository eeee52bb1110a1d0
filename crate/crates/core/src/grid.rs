//! Row-major `width x height` rasters shared by the image stages.
//!
//! Pixel `(u, v)` lives at `v * width + u`; `u` is the azimuth column and `v`
//! the elevation row, row 0 being the highest elevation.

/// Scalar raster with a validity mask. Invalid cells hold zero in `data`; the
/// mask is the only source of truth.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedGrid<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
    pub valid: Vec<bool>,
}

impl<T: Copy + Default> MaskedGrid<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>, valid: Vec<bool>) -> Self {
        assert_eq!(data.len(), width * height);
        assert_eq!(valid.len(), width * height);
        Self { width, height, data, valid }
    }

    pub fn invalid(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![T::default(); width * height], vec![false; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Option<T>) -> Self {
        let mut grid = Self::invalid(width, height);
        for v in 0..height {
            for u in 0..width {
                if let Some(x) = f(u, v) {
                    let i = v * width + u;
                    grid.data[i] = x;
                    grid.valid[i] = true;
                }
            }
        }
        grid
    }

    #[inline]
    pub fn index(&self, u: usize, v: usize) -> usize {
        v * self.width + u
    }

    /// Value at `(u, v)` if valid.
    pub fn get(&self, u: usize, v: usize) -> Option<T> {
        let i = self.index(u, v);
        self.valid[i].then(|| self.data[i])
    }
}

/// A set of pixels, stored as a dense membership mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl PixelMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height);
        Self { width, height, bits }
    }

    #[inline]
    pub fn contains(&self, pixel: usize) -> bool {
        self.bits[pixel]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits.len() == other.bits.len() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !(a && b))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_bits(self.width, self.height, self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_bits(self.width, self.height, self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && !b).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + Clone + '_ {
        self.bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let a = PixelMask::from_bits(2, 2, vec![true, true, false, false]);
        let b = PixelMask::from_bits(2, 2, vec![true, false, false, false]);
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        let d = a.difference(&b);
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![1]);
        assert!(d.is_disjoint(&b));
        assert_eq!(d.union(&b), a);
        assert_eq!(a.count(), 2);
    }

    #[test]
    fn masked_get() {
        let g = MaskedGrid::from_fn(3, 2, |u, v| (u != v).then_some((u + 10 * v) as f64));
        assert_eq!(g.get(0, 0), None);
        assert_eq!(g.get(2, 1), Some(12.0));
    }
}
