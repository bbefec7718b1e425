use super::GridSpec;
use crate::error::{Error, Result};

/// Boolean mask over the points of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    grid: GridSpec,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(grid: GridSpec, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::ShapeMismatch("mask length differs from grid size".into()));
        }
        Ok(Mask { grid, bits })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> bool) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let bits = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut x);
                f(&x)
            })
            .collect();
        Mask { grid, bits }
    }

    /// Open axis-aligned box `∏ (lo_d, hi_d)`.
    pub fn open_box(grid: GridSpec, lo: &[f64], hi: &[f64]) -> Self {
        Self::from_fn(grid, |x| x.iter().zip(lo.iter().zip(hi)).all(|(c, (a, b))| c > a && c < b))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> Self {
        Mask { grid: self.grid, bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.grid == other.grid && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    /// Chebyshev dilation by `cells` grid cells (wrapping on periodic grids).
    pub fn dilate(&self, cells: usize) -> Self {
        let n = self.grid.points_per_axis() as i64;
        let dim = self.grid.dim();
        let periodic = self.grid.is_periodic();
        let r = cells as i64;
        let mut bits = self.bits.clone();
        let mut idx = vec![0usize; dim];
        let mut probe = vec![0usize; dim];
        for i in self.indices() {
            self.grid.multi_index(i, &mut idx);
            let mut off = vec![-r; dim];
            'outer: loop {
                let mut ok = true;
                for d in 0..dim {
                    let mut k = idx[d] as i64 + off[d];
                    if periodic {
                        k = k.rem_euclid(n);
                    } else if k < 0 || k >= n {
                        ok = false;
                    }
                    probe[d] = k.max(0) as usize;
                }
                if ok {
                    bits[self.grid.flat_index(&probe)] = true;
                }
                let mut d = 0;
                loop {
                    if d == dim {
                        break 'outer;
                    }
                    off[d] += 1;
                    if off[d] <= r {
                        break;
                    }
                    off[d] = -r;
                    d += 1;
                }
            }
        }
        Mask { grid: self.grid, bits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_grows_interval() {
        let g = GridSpec::truncated(1, 1.0, 20).unwrap();
        let m = Mask::open_box(g, &[-0.25], &[0.25]);
        let d = m.dilate(2);
        assert_eq!(d.count(), m.count() + 4);
        assert!(m.is_subset_of(&d));
        assert!(!d.is_subset_of(&m));
    }

    #[test]
    fn periodic_dilation_wraps() {
        let g = GridSpec::periodic(1, 8).unwrap();
        let m = Mask::new(g, vec![true, false, false, false, false, false, false, false]).unwrap();
        let d = m.dilate(1);
        assert!(d.contains(7) && d.contains(1));
    }
}
