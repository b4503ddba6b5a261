//! Uniform spacetime lattices, field storage, masks and finite-difference
//! operators.
//!
//! Axis 0 is always time; axes 1.. are x, y, z in that order. A lattice with
//! `ndim = 3` therefore samples `(t, x, y)` and every derivative along the
//! missing `z` coordinate is identically zero.

mod field;
pub mod io;
mod mask;
mod stencil;

pub use field::{sym_index, CovectorField, Field, Sample, SymTensorField, SYM_PAIRS};
pub use mask::{build_mask, Mask};
pub use stencil::{
    box_flat, coordinate_derivative, curved_maxwell_operator, partial_derivative, second_derivative, MetricSlices,
    StencilOrder,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeomPoint;

pub type RealField = Field<f64>;
pub type ComplexField = Field<num_complex::Complex64>;

/// Default cap on lattice size (points), roughly 1 GiB per complex field.
pub const DEFAULT_MAX_POINTS: usize = 1 << 26;

/// Uniform rectangular sampling of `(t, x[, y[, z]])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Lattice {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        Self::with_cap(origin, spacing, counts, DEFAULT_MAX_POINTS)
    }

    pub fn with_cap(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>, cap: usize) -> Result<Self> {
        let l = Lattice { origin, spacing, counts };
        l.validate(cap)?;
        Ok(l)
    }

    /// `cells` intervals per axis over `[origin, origin + extent]`, endpoints
    /// included.
    pub fn from_extent(origin: &[f64], extent: &[f64], cells: &[usize]) -> Result<Self> {
        if origin.len() != extent.len() || origin.len() != cells.len() {
            return Err(Error::InvalidLattice("origin, extent and cells differ in length".into()));
        }
        let spacing = extent.iter().zip(cells).map(|(e, &n)| e / n as f64).collect();
        let counts = cells.iter().map(|n| n + 1).collect();
        Self::new(origin.to_vec(), spacing, counts)
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        let n = self.counts.len();
        if !(2..=4).contains(&n) {
            return Err(Error::InvalidLattice(format!("ndim must be 2, 3 or 4, got {n}")));
        }
        if self.origin.len() != n || self.spacing.len() != n {
            return Err(Error::InvalidLattice("origin, spacing and counts differ in length".into()));
        }
        if let Some(h) = self.spacing.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidLattice(format!("spacing must be positive, got {h}")));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidLattice("origin must be finite".into()));
        }
        if let Some(c) = self.counts.iter().find(|c| **c < 5) {
            return Err(Error::InvalidLattice(format!("every axis needs at least 5 points, got {c}")));
        }
        let points = self.counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
        if points > cap {
            return Err(Error::MemoryCap { points, cap, level: None });
        }
        Ok(())
    }

    pub fn ndim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> [usize; 4] {
        let mut s = [0usize; 4];
        let mut acc = 1;
        for a in (0..self.ndim()).rev() {
            s[a] = acc;
            acc *= self.counts[a];
        }
        s
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    pub fn unravel(&self, mut idx: usize) -> [usize; 4] {
        let mut out = [0usize; 4];
        for a in (0..self.ndim()).rev() {
            out[a] = idx % self.counts[a];
            idx /= self.counts[a];
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        let s = self.strides();
        multi.iter().enumerate().map(|(a, i)| i * s[a]).sum()
    }

    pub fn point_of(&self, multi: &[usize; 4]) -> GeomPoint {
        let mut c = [0.0; 4];
        for a in 0..self.ndim() {
            c[a] = self.coord(a, multi[a]);
        }
        GeomPoint { coords: c }
    }

    pub fn point(&self, idx: usize) -> GeomPoint {
        self.point_of(&self.unravel(idx))
    }

    /// Lattice center, used as the default unwrapping reference.
    pub fn center(&self) -> Vec<usize> {
        self.counts.iter().map(|c| c / 2).collect()
    }

    /// Halves every spacing while keeping the closed extent, so every coarse
    /// point is also a fine point.
    pub fn refine(&self) -> Result<Lattice> {
        self.refine_with_cap(DEFAULT_MAX_POINTS)
    }

    pub fn refine_with_cap(&self, cap: usize) -> Result<Lattice> {
        Lattice::with_cap(
            self.origin.clone(),
            self.spacing.iter().map(|h| h / 2.0).collect(),
            self.counts.iter().map(|c| 2 * c - 1).collect(),
            cap,
        )
    }

    /// True when every axis index lies at least `margin` points from both
    /// boundaries.
    pub fn is_interior(&self, multi: &[usize; 4], margin: usize) -> bool {
        (0..self.ndim()).all(|a| multi[a] >= margin && multi[a] + margin < self.counts[a])
    }

    /// Iterates `(flat index, multi index)` in storage order.
    pub fn indices(&self) -> LatticeIter<'_> {
        LatticeIter { lattice: self, next: 0, multi: [0; 4] }
    }
}

pub struct LatticeIter<'a> {
    lattice: &'a Lattice,
    next: usize,
    multi: [usize; 4],
}

impl Iterator for LatticeIter<'_> {
    type Item = (usize, [usize; 4]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.lattice.len() {
            return None;
        }
        let out = (self.next, self.multi);
        self.next += 1;
        for a in (0..self.lattice.ndim()).rev() {
            self.multi[a] += 1;
            if self.multi[a] < self.lattice.counts[a] {
                break;
            }
            self.multi[a] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lattices() {
        assert!(Lattice::new(vec![0.0], vec![1.0], vec![10]).is_err());
        assert!(Lattice::new(vec![0.0; 2], vec![1.0, 0.0], vec![10, 10]).is_err());
        assert!(Lattice::new(vec![0.0; 2], vec![1.0, 1.0], vec![10, 4]).is_err());
        assert!(matches!(
            Lattice::with_cap(vec![0.0; 2], vec![1.0; 2], vec![100, 100], 1000),
            Err(Error::MemoryCap { .. })
        ));
    }

    #[test]
    fn ravel_round_trip_and_iteration_order() {
        let l = Lattice::new(vec![0.0; 3], vec![0.5; 3], vec![5, 6, 7]).unwrap();
        for (idx, multi) in l.indices() {
            assert_eq!(l.unravel(idx), multi);
            assert_eq!(l.ravel(&multi[..3]), idx);
        }
        assert_eq!(l.indices().count(), l.len());
    }

    #[test]
    fn refinement_shares_coarse_points() {
        let l = Lattice::from_extent(&[0.0, -1.0], &[2.0, 2.0], &[8, 8]).unwrap();
        let f = l.refine().unwrap();
        assert_eq!(f.counts, vec![17, 17]);
        for i in 0..l.counts[1] {
            assert_eq!(l.coord(1, i), f.coord(1, 2 * i));
        }
    }
}
