use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::Lattice;
use crate::error::{Error, Result};
use crate::geometry::GeomPoint;

/// Value type storable in a lattice field.
pub trait Sample:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn is_finite_sample(&self) -> bool;
    fn modulus(&self) -> f64;
}

impl Sample for f64 {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl Sample for Complex64 {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Scalar lattice function. `margin` counts the boundary layers (on every
/// axis) whose values are not valid, e.g. after a stencil was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    lattice: Lattice,
    values: Vec<T>,
    margin: usize,
}

impl<T: Sample> Field<T> {
    pub fn zeros(lattice: &Lattice) -> Self {
        Field { lattice: lattice.clone(), values: vec![T::default(); lattice.len()], margin: 0 }
    }

    pub fn from_values(lattice: &Lattice, values: Vec<T>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a lattice of {} points",
                values.len(),
                lattice.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(Error::Eval { coords: lattice.point(i).coords });
        }
        Ok(Field { lattice: lattice.clone(), values, margin: 0 })
    }

    /// Values inside the margin are reset to zero.
    pub(crate) fn with_margin(lattice: &Lattice, mut values: Vec<T>, margin: usize) -> Self {
        if margin > 0 {
            for (i, multi) in lattice.indices() {
                if !lattice.is_interior(&multi, margin) {
                    values[i] = T::default();
                }
            }
        }
        Field { lattice: lattice.clone(), values, margin }
    }

    /// Trusted constructor for operator outputs whose margin values are
    /// already zero.
    pub(crate) fn from_raw(lattice: &Lattice, values: Vec<T>, margin: usize) -> Self {
        debug_assert_eq!(values.len(), lattice.len());
        Field { lattice: lattice.clone(), values, margin }
    }

    /// Samples a pointwise closed form exactly at every lattice point.
    pub fn sample(lattice: &Lattice, f: impl Fn(&GeomPoint) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(lattice.len());
        for (_, multi) in lattice.indices() {
            let p = lattice.point_of(&multi);
            let v = f(&p);
            if !v.is_finite_sample() {
                return Err(Error::Eval { coords: p.coords });
            }
            values.push(v);
        }
        Ok(Field { lattice: lattice.clone(), values, margin: 0 })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
            margin: self.margin,
        }
    }

    pub fn zip_map<U: Sample, V: Sample>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Result<Field<V>> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Field::with_margin(&self.lattice, values, self.margin.max(other.margin)))
    }

    /// Largest modulus over the valid (non-margin) region.
    pub fn max_modulus(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (i, multi) in self.lattice.indices() {
            if self.lattice.is_interior(&multi, self.margin) {
                m = m.max(self.values[i].modulus());
            }
        }
        m
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| v.modulus() == 0.0)
    }

    /// Raises the margin without touching the lattice.
    pub fn widen_margin(mut self, margin: usize) -> Self {
        if margin > self.margin {
            self = Field::with_margin(&self.lattice.clone(), self.values, margin);
        }
        self
    }
}

impl Field<Complex64> {
    pub fn re(&self) -> Field<f64> {
        self.map(|z| z.re)
    }
    pub fn im(&self) -> Field<f64> {
        self.map(|z| z.im)
    }
}

/// Four components per point, `(t, x, y, z)`, regardless of lattice
/// dimension. Houses polarization amplitudes `ξ_μ` and wavevectors `k_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorField<T = f64> {
    pub comps: [Field<T>; 4],
}

impl<T: Sample> CovectorField<T> {
    pub fn zeros(lattice: &Lattice) -> Self {
        CovectorField { comps: std::array::from_fn(|_| Field::zeros(lattice)) }
    }

    pub fn sample(lattice: &Lattice, f: impl Fn(&GeomPoint) -> [T; 4]) -> Result<Self> {
        let mut vals: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(lattice.len()));
        for (_, multi) in lattice.indices() {
            let p = lattice.point_of(&multi);
            let v = f(&p);
            if v.iter().any(|c| !c.is_finite_sample()) {
                return Err(Error::Eval { coords: p.coords });
            }
            for (dst, c) in vals.iter_mut().zip(v) {
                dst.push(c);
            }
        }
        Ok(CovectorField { comps: vals.map(|values| Field { lattice: lattice.clone(), values, margin: 0 }) })
    }

    pub fn from_components(comps: [Field<T>; 4]) -> Result<Self> {
        if comps.iter().any(|c| c.lattice != comps[0].lattice) {
            return Err(Error::LatticeMismatch);
        }
        Ok(CovectorField { comps })
    }

    pub fn lattice(&self) -> &Lattice {
        self.comps[0].lattice()
    }

    pub fn margin(&self) -> usize {
        self.comps.iter().map(|c| c.margin).max().unwrap_or(0)
    }

    pub fn at(&self, idx: usize) -> [T; 4] {
        std::array::from_fn(|m| self.comps[m].values[idx])
    }
}

/// Independent index pairs of a symmetric rank-2 tensor, in storage order.
pub const SYM_PAIRS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Storage slot of `(μ, ν)` in a symmetric tensor.
pub fn sym_index(mu: usize, nu: usize) -> usize {
    let (a, b) = if mu <= nu { (mu, nu) } else { (nu, mu) };
    SYM_PAIRS.iter().position(|p| *p == (a, b)).expect("indices below 4")
}

/// Symmetric rank-2 tensor field, ten independent components per point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField<T = f64> {
    pub comps: [Field<T>; 10],
}

impl<T: Sample> SymTensorField<T> {
    pub fn zeros(lattice: &Lattice) -> Self {
        SymTensorField { comps: std::array::from_fn(|_| Field::zeros(lattice)) }
    }

    pub fn sample(lattice: &Lattice, f: impl Fn(&GeomPoint) -> [T; 10]) -> Result<Self> {
        let mut vals: [Vec<T>; 10] = std::array::from_fn(|_| Vec::with_capacity(lattice.len()));
        for (_, multi) in lattice.indices() {
            let p = lattice.point_of(&multi);
            let v = f(&p);
            if v.iter().any(|c| !c.is_finite_sample()) {
                return Err(Error::Eval { coords: p.coords });
            }
            for (dst, c) in vals.iter_mut().zip(v) {
                dst.push(c);
            }
        }
        Ok(SymTensorField { comps: vals.map(|values| Field { lattice: lattice.clone(), values, margin: 0 }) })
    }

    pub fn from_components(comps: [Field<T>; 10]) -> Result<Self> {
        if comps.iter().any(|c| c.lattice != comps[0].lattice) {
            return Err(Error::LatticeMismatch);
        }
        Ok(SymTensorField { comps })
    }

    pub fn lattice(&self) -> &Lattice {
        self.comps[0].lattice()
    }

    pub fn margin(&self) -> usize {
        self.comps.iter().map(|c| c.margin).max().unwrap_or(0)
    }

    pub fn get(&self, mu: usize, nu: usize) -> &Field<T> {
        &self.comps[sym_index(mu, nu)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Lattice {
        Lattice::new(vec![0.0, 0.0], vec![0.1, 0.1], vec![6, 7]).unwrap()
    }

    #[test]
    fn constant_sample_is_all_ones() {
        let f = Field::sample(&lat(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn non_finite_evaluator_is_rejected() {
        let err = Field::sample(&lat(), |p| if p.x() > 0.25 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, Error::Eval { .. }));
        assert!(Field::from_values(&lat(), vec![f64::INFINITY; 42]).is_err());
    }

    #[test]
    fn sym_index_is_symmetric() {
        for mu in 0..4 {
            for nu in 0..4 {
                assert_eq!(sym_index(mu, nu), sym_index(nu, mu));
                assert_eq!(SYM_PAIRS[sym_index(mu, nu)], (mu.min(nu), mu.max(nu)));
            }
        }
    }

    #[test]
    fn margin_values_are_zeroed() {
        let f = Field::with_margin(&lat(), vec![1.0; 42], 1);
        assert_eq!(f.values()[0], 0.0);
        assert_eq!(f.values()[lat().ravel(&[1, 1])], 1.0);
        assert_eq!(f.max_modulus(), 1.0);
    }
}
