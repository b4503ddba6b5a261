use super::{Lattice, RealField};
use crate::error::{Error, Result};

/// Points on which quotient-type quantities are trusted. Always excludes a
/// boundary margin.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    lattice: Lattice,
    keep: Vec<bool>,
    kept: usize,
}

impl Mask {
    pub fn from_keep(lattice: &Lattice, keep: Vec<bool>) -> Result<Self> {
        if keep.len() != lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        let kept = keep.iter().filter(|k| **k).count();
        Ok(Mask { lattice: lattice.clone(), keep, kept })
    }

    pub fn interior(lattice: &Lattice, margin: usize) -> Self {
        let keep = lattice.indices().map(|(_, m)| lattice.is_interior(&m, margin)).collect();
        Mask::from_keep(lattice, keep).expect("lengths agree")
    }

    pub fn all(lattice: &Lattice) -> Self {
        Mask::from_keep(lattice, vec![true; lattice.len()]).expect("lengths agree")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn is_kept(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    pub fn kept_count(&self) -> usize {
        self.kept
    }

    pub fn kept_fraction(&self) -> f64 {
        self.kept as f64 / self.keep.len() as f64
    }

    pub fn kept_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.keep.iter().enumerate().filter_map(|(i, k)| k.then_some(i))
    }

    pub fn and(&self, other: &Mask) -> Result<Mask> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let keep = self.keep.iter().zip(&other.keep).map(|(a, b)| *a && *b).collect();
        Mask::from_keep(&self.lattice, keep)
    }

    pub fn and_interior(&self, margin: usize) -> Mask {
        self.and(&Mask::interior(&self.lattice, margin)).expect("same lattice")
    }

    /// Keeps a point only if every neighbour within `half_width` along every
    /// axis is kept, so a stencil centred on a kept point reads kept data only.
    pub fn erode(&self, half_width: usize) -> Mask {
        if half_width == 0 {
            return self.clone();
        }
        let l = &self.lattice;
        let strides = l.strides();
        let keep = l
            .indices()
            .map(|(i, multi)| {
                if !self.keep[i] {
                    return false;
                }
                (0..l.ndim()).all(|a| {
                    (1..=half_width).all(|s| {
                        multi[a] >= s
                            && multi[a] + s < l.counts[a]
                            && self.keep[i - s * strides[a]]
                            && self.keep[i + s * strides[a]]
                    })
                })
            })
            .collect();
        Mask::from_keep(l, keep).expect("lengths agree")
    }

    pub fn require_nonempty(self, what: &str) -> Result<Mask> {
        if self.kept == 0 {
            Err(Error::EmptyMask(what.to_string()))
        } else {
            Ok(self)
        }
    }
}

/// Keeps interior points where `|amp| ≥ epsilon_rel · max|amp|`.
///
/// The interior excludes the field's own invalid margin and at least one
/// layer for the narrowest stencil.
pub fn build_mask(amp: &RealField, epsilon_rel: f64) -> Result<Mask> {
    if !(epsilon_rel > 0.0 && epsilon_rel < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon_rel must lie in (0, 0.5), got {epsilon_rel}")));
    }
    let l = amp.lattice();
    let margin = amp.margin().max(1);
    let mut max: f64 = 0.0;
    for (i, multi) in l.indices() {
        if l.is_interior(&multi, margin) {
            max = max.max(amp.values()[i].abs());
        }
    }
    if max == 0.0 {
        return Err(Error::EmptyMask("amplitude vanishes on the interior".into()));
    }
    let threshold = epsilon_rel * max;
    let keep =
        l.indices().map(|(i, multi)| l.is_interior(&multi, margin) && amp.values()[i].abs() >= threshold).collect();
    Mask::from_keep(l, keep)?.require_nonempty("amplitude threshold")
}
