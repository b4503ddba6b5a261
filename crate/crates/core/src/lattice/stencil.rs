use serde::{Deserialize, Serialize};

use super::{CovectorField, Field, Lattice, Sample};
use crate::error::{Error, Result};
use crate::geometry::{GeomPoint, MetricSpec};

/// Accuracy order of the centred difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn half_width(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            StencilOrder::Second => 2.0,
            StencilOrder::Fourth => 4.0,
        }
    }

    /// `(k, w_k)` with `f' ≈ Σ w_k (f_{+k} - f_{-k}) / h`.
    fn first_weights(self) -> &'static [(isize, f64)] {
        match self {
            StencilOrder::Second => &[(1, 0.5)],
            StencilOrder::Fourth => &[(1, 8.0 / 12.0), (2, -1.0 / 12.0)],
        }
    }

    /// `(k, w_k)` with `f'' ≈ Σ w_k ((f_{+k} - f_0) + (f_{-k} - f_0)) / h²`,
    /// which vanishes exactly on constants.
    fn second_weights(self) -> &'static [(isize, f64)] {
        match self {
            StencilOrder::Second => &[(1, 1.0)],
            StencilOrder::Fourth => &[(1, 16.0 / 12.0), (2, -1.0 / 12.0)],
        }
    }
}

#[derive(Clone, Copy)]
enum Parity {
    Odd,
    Even,
}

impl TryFrom<u8> for StencilOrder {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            other => Err(format!("stencil order must be 2 or 4, got {other}")),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(o: StencilOrder) -> u8 {
        match o {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

fn check_room(l: &Lattice, margin: usize) -> Result<()> {
    for (axis, &count) in l.counts.iter().enumerate() {
        if count < 2 * margin + 1 {
            return Err(Error::TooFewPoints { axis, count, needed: 2 * margin + 1 });
        }
    }
    Ok(())
}

#[inline]
fn stencil_at<T: Sample>(vals: &[T], i: usize, stride: usize, weights: &[(isize, f64)], parity: Parity) -> T {
    let mut acc = T::default();
    let centre = vals[i];
    for &(k, w) in weights {
        let off = k as usize * stride;
        let (plus, minus) = (vals[i + off], vals[i - off]);
        let term = match parity {
            Parity::Odd => plus - minus,
            Parity::Even => (plus - centre) + (minus - centre),
        };
        acc = acc + term * w;
    }
    acc
}

fn apply_axis<T: Sample>(
    f: &Field<T>,
    axis: usize,
    weights: &[(isize, f64)],
    parity: Parity,
    scale: f64,
    margin: usize,
) -> Field<T> {
    let l = f.lattice();
    let stride = l.strides()[axis];
    let vals = f.values();
    let mut out = vec![T::default(); l.len()];
    for (i, multi) in l.indices() {
        if l.is_interior(&multi, margin) {
            out[i] = stencil_at(vals, i, stride, weights, parity) * scale;
        }
    }
    Field::from_raw(l, out, margin)
}

/// Centred first derivative along a lattice axis. Exact on polynomials of
/// degree up to the stencil order; the margin grows by the half-width.
pub fn partial_derivative<T: Sample>(f: &Field<T>, axis: usize, order: StencilOrder) -> Result<Field<T>> {
    let l = f.lattice();
    if axis >= l.ndim() {
        return Err(Error::Axis { axis, ndim: l.ndim() });
    }
    let margin = f.margin() + order.half_width();
    check_room(l, margin)?;
    Ok(apply_axis(f, axis, order.first_weights(), Parity::Odd, 1.0 / l.spacing[axis], margin))
}

/// Centred second derivative along a lattice axis.
pub fn second_derivative<T: Sample>(f: &Field<T>, axis: usize, order: StencilOrder) -> Result<Field<T>> {
    let l = f.lattice();
    if axis >= l.ndim() {
        return Err(Error::Axis { axis, ndim: l.ndim() });
    }
    let margin = f.margin() + order.half_width();
    check_room(l, margin)?;
    let h = l.spacing[axis];
    Ok(apply_axis(f, axis, order.second_weights(), Parity::Even, 1.0 / (h * h), margin))
}

/// `∂_μ` for a spacetime index: zero (with the usual margin growth) along
/// coordinates the lattice does not sample.
pub fn coordinate_derivative<T: Sample>(f: &Field<T>, mu: usize, order: StencilOrder) -> Result<Field<T>> {
    if mu >= 4 {
        return Err(Error::Axis { axis: mu, ndim: 4 });
    }
    if mu < f.lattice().ndim() {
        partial_derivative(f, mu, order)
    } else {
        let margin = f.margin() + order.half_width();
        check_room(f.lattice(), margin)?;
        Ok(Field::from_raw(f.lattice(), vec![T::default(); f.len()], margin))
    }
}

/// Flat d'Alembertian `-∂_t²/c² + Σ ∂_i²`.
pub fn box_flat<T: Sample>(f: &Field<T>, c: f64, order: StencilOrder) -> Result<Field<T>> {
    let l = f.lattice();
    let margin = f.margin() + order.half_width();
    check_room(l, margin)?;
    let strides = l.strides();
    let weights = order.second_weights();
    let scales: Vec<f64> = (0..l.ndim())
        .map(|a| {
            let h = l.spacing[a];
            let s = 1.0 / (h * h);
            if a == 0 {
                -s / (c * c)
            } else {
                s
            }
        })
        .collect();
    let vals = f.values();
    let mut out = vec![T::default(); l.len()];
    for (i, multi) in l.indices() {
        if !l.is_interior(&multi, margin) {
            continue;
        }
        let mut total = T::default();
        for a in 0..l.ndim() {
            total = total + stencil_at(vals, i, strides[a], weights, Parity::Even) * scales[a];
        }
        out[i] = total;
    }
    Ok(Field::from_raw(l, out, margin))
}

/// Closed-form metric factors per time slice. Every supported background
/// depends on `t` only, so one entry per time index suffices.
#[derive(Debug, Clone)]
pub struct MetricSlices {
    t_stride: usize,
    volume: Vec<f64>,
    inverse: Vec<[f64; 4]>,
}

impl MetricSlices {
    pub fn new(metric: &MetricSpec, lattice: &Lattice) -> Result<Self> {
        metric.validate()?;
        let mut volume = Vec::with_capacity(lattice.counts[0]);
        let mut inverse = Vec::with_capacity(lattice.counts[0]);
        for it in 0..lattice.counts[0] {
            let p = GeomPoint::new(lattice.coord(0, it), 0.0, 0.0, 0.0);
            volume.push(metric.volume_factor(&p)?);
            inverse.push(metric.inverse_diag(&p)?);
        }
        Ok(MetricSlices { t_stride: lattice.strides()[0], volume, inverse })
    }

    /// `√(-g)` at a flat lattice index.
    pub fn volume(&self, idx: usize) -> f64 {
        self.volume[idx / self.t_stride]
    }

    /// Diagonal of `g^{μν}` at a flat lattice index.
    pub fn inverse_diag(&self, idx: usize) -> [f64; 4] {
        self.inverse[idx / self.t_stride]
    }

    /// `g^{μν} u_μ w_ν` for diagonal metrics.
    pub fn contract(&self, idx: usize, u: &[f64; 4], w: &[f64; 4]) -> f64 {
        let gi = self.inverse_diag(idx);
        (0..4).map(|m| gi[m] * u[m] * w[m]).sum()
    }
}

fn add_scaled<T: Sample>(acc: &mut [T], f: &Field<T>, s: f64) {
    for (a, v) in acc.iter_mut().zip(f.values()) {
        *a = *a + *v * s;
    }
}

/// Curved-spacetime Maxwell operator on a covector potential,
/// `∂_α[√(-g) g^{αμ} g^{βν} (∂_μ A_ν - ∂_ν A_μ)]` for each upper index `β`.
///
/// Built from nested first-derivative stencils with closed-form metric
/// factors; the margin grows by twice the half-width.
pub fn curved_maxwell_operator<T: Sample>(
    metric: &MetricSpec,
    a: &CovectorField<T>,
    order: StencilOrder,
) -> Result<CovectorField<T>> {
    let l = a.lattice().clone();
    let ms = MetricSlices::new(metric, &l)?;
    let nd = l.ndim();
    let hw = order.half_width();
    let inner = a.margin() + hw;
    let outer = inner + hw;
    check_room(&l, outer)?;

    let nonzero: [bool; 4] = std::array::from_fn(|nu| !a.comps[nu].is_identically_zero());
    // d[μ][ν] = ∂_μ A_ν; None where it vanishes identically.
    let mut d: Vec<[Option<Field<T>>; 4]> = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut row: [Option<Field<T>>; 4] = Default::default();
        if mu < nd {
            for nu in 0..4 {
                if nonzero[nu] {
                    row[nu] = Some(partial_derivative(&a.comps[nu], mu, order)?.widen_margin(inner));
                }
            }
        }
        d.push(row);
    }

    // G^{αβ} for α < β (antisymmetric).
    let mut g: [[Option<Field<T>>; 4]; 4] = Default::default();
    for al in 0..4 {
        for be in al + 1..4 {
            let (f1, f2) = (&d[al][be], &d[be][al]);
            if f1.is_none() && f2.is_none() {
                continue;
            }
            let mut vals = vec![T::default(); l.len()];
            if let Some(f1) = f1 {
                vals.copy_from_slice(f1.values());
            }
            if let Some(f2) = f2 {
                add_scaled(&mut vals, f2, -1.0);
            }
            for (i, v) in vals.iter_mut().enumerate() {
                let gi = ms.inverse_diag(i);
                *v = *v * (ms.volume(i) * gi[al] * gi[be]);
            }
            g[al][be] = Some(Field::from_raw(&l, vals, inner));
        }
    }
    drop(d);

    let mut out: Vec<Field<T>> = Vec::with_capacity(4);
    for be in 0..4 {
        let mut acc = vec![T::default(); l.len()];
        for al in 0..nd {
            if al == be {
                continue;
            }
            let (lo, hi, sign) = if al < be { (al, be, 1.0) } else { (be, al, -1.0) };
            if let Some(gf) = &g[lo][hi] {
                let dg = partial_derivative(gf, al, order)?;
                add_scaled(&mut acc, &dg, sign);
            }
        }
        out.push(Field::with_margin(&l, acc, outer));
    }
    let comps: [Field<T>; 4] = out.try_into().map_err(|_| Error::LatticeMismatch)?;
    CovectorField::from_components(comps)
}
