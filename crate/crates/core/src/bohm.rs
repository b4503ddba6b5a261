//! Bohm potentials: the amplitude-curvature term that separates the wave
//! dispersion relation `k·k = V_B` from the classical `k·k = 0`.
//!
//! Every evaluator is a masked quotient. Points where the amplitude (or the
//! polarization norm) drops below `epsilon_rel` of its maximum are excluded
//! rather than regularized, and the boundary margin of the stencils is always
//! excluded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeomPoint, MetricSpec};
use crate::lattice::{
    box_flat, build_mask, curved_maxwell_operator, second_derivative, CovectorField, Field, Mask, MetricSlices,
    RealField, StencilOrder, SymTensorField, SYM_PAIRS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    NonRel,
    Scalar,
    EmFlat,
    EmCurved,
    Gw,
}

impl Sector {
    pub fn name(self) -> &'static str {
        match self {
            Sector::NonRel => "non_rel",
            Sector::Scalar => "scalar",
            Sector::EmFlat => "em_flat",
            Sector::EmCurved => "em_curved",
            Sector::Gw => "gw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BohmOptions {
    pub order: StencilOrder,
    pub epsilon_rel: f64,
}

impl Default for BohmOptions {
    fn default() -> Self {
        BohmOptions { order: StencilOrder::Second, epsilon_rel: 0.05 }
    }
}

/// `V_B` on the kept points; zero elsewhere.
#[derive(Debug, Clone)]
pub struct BohmField {
    pub vb: RealField,
    pub mask: Mask,
    pub sector: Sector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl BohmField {
    pub fn summary(&self) -> Summary {
        summarize(&self.vb, &self.mask)
    }
}

/// Mean, population standard deviation and range over the kept points.
pub fn summarize(f: &RealField, mask: &Mask) -> Summary {
    let n = mask.kept_count().max(1) as f64;
    let vals = f.values();
    let mean = mask.kept_indices().map(|i| vals[i]).sum::<f64>() / n;
    let var = mask.kept_indices().map(|i| (vals[i] - mean).powi(2)).sum::<f64>() / n;
    let (min, max) = mask
        .kept_indices()
        .map(|i| vals[i])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Summary { mean, stddev: var.sqrt(), min, max }
}

fn quotient(num: &RealField, den: &RealField, mask: Mask, sector: Sector) -> Result<BohmField> {
    let mask = mask.and_interior(num.margin()).require_nonempty("Bohm potential quotient")?;
    let mut vb = vec![0.0; num.len()];
    for i in mask.kept_indices() {
        vb[i] = num.values()[i] / den.values()[i];
    }
    Ok(BohmField { vb: Field::from_values(num.lattice(), vb)?, mask, sector })
}

/// `V_B = -(ħ²/2m) ∇²A / A`, Laplacian over the spatial axes only.
pub fn bohm_nonrel(a: &RealField, hbar: f64, m: f64, opts: &BohmOptions) -> Result<BohmField> {
    if !(hbar > 0.0 && m > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar and m must be positive, got {hbar}, {m}")));
    }
    let l = a.lattice();
    let mut lap: RealField = Field::zeros(l);
    for axis in 1..l.ndim() {
        let d2 = second_derivative(a, axis, opts.order)?;
        lap = lap.zip_map(&d2, |x, y| x + y)?;
    }
    let num = lap.map(|v| -hbar * hbar / (2.0 * m) * v);
    let mask = build_mask(&a.map(f64::abs), opts.epsilon_rel)?;
    quotient(&num, a, mask, Sector::NonRel)
}

/// `V_B = □U / U`.
pub fn bohm_scalar(u: &RealField, c: f64, opts: &BohmOptions) -> Result<BohmField> {
    let num = box_flat(u, c, opts.order)?;
    let mask = build_mask(&u.map(f64::abs), opts.epsilon_rel)?;
    quotient(&num, u, mask, Sector::Scalar)
}

/// `ξ² = g^{μν} ξ_μ ξ_ν` for a diagonal inverse metric.
fn covector_norm(ms: &MetricSlices, xi: &CovectorField) -> Result<RealField> {
    let l = xi.lattice();
    let vals = (0..l.len()).map(|i| ms.contract(i, &xi.at(i), &xi.at(i))).collect();
    Field::from_values(l, vals)
}

fn polarization_mask(norm: &RealField, opts: &BohmOptions, null: Error) -> Result<Mask> {
    if norm.is_identically_zero() {
        return Err(null);
    }
    build_mask(&norm.map(|v| v.abs().sqrt()), opts.epsilon_rel)
}

/// `V_B = ξ_ν □ξ^ν / ξ²` with Minkowski index raising.
pub fn bohm_em_flat(xi: &CovectorField, c: f64, opts: &BohmOptions) -> Result<BohmField> {
    let l = xi.lattice();
    let ms = MetricSlices::new(&MetricSpec::minkowski(c), l)?;
    let norm = covector_norm(&ms, xi)?;
    let mask = polarization_mask(&norm, opts, Error::NullPolarization)?;
    let mut num = vec![0.0; l.len()];
    let mut margin = xi.margin();
    for nu in 0..4 {
        if xi.comps[nu].is_identically_zero() {
            continue;
        }
        let b = box_flat(&xi.comps[nu], c, opts.order)?;
        margin = margin.max(b.margin());
        for (i, acc) in num.iter_mut().enumerate() {
            *acc += ms.inverse_diag(i)[nu] * xi.comps[nu].values()[i] * b.values()[i];
        }
    }
    margin = margin.max(xi.margin() + opts.order.half_width());
    let num = Field::from_values(l, num)?.widen_margin(margin);
    quotient(&num, &norm, mask, Sector::EmFlat)
}

/// `V_B = ξ_β ∂_α[√(-g) g^{αμ} g^{βν} F_{μν}] / (√(-g) ξ²)`, with `F` built
/// from the real polarization amplitude.
pub fn bohm_em_curved(metric: &MetricSpec, xi: &CovectorField, opts: &BohmOptions) -> Result<BohmField> {
    let l = xi.lattice();
    let ms = MetricSlices::new(metric, l)?;
    let norm = covector_norm(&ms, xi)?;
    let mask = polarization_mask(&norm, opts, Error::NullPolarization)?;
    let x = curved_maxwell_operator(metric, xi, opts.order)?;
    let vals = (0..l.len())
        .map(|i| {
            let (xi_i, x_i) = (xi.at(i), x.at(i));
            (0..4).map(|b| xi_i[b] * x_i[b]).sum::<f64>() / ms.volume(i)
        })
        .collect();
    let num = Field::from_values(l, vals)?.widen_margin(x.margin());
    quotient(&num, &norm, mask, Sector::EmCurved)
}

/// Tensor Bohm potential on a Minkowski background,
/// `(ζ^{μν} □ζ_{μν} + 2 R_{μανβ} ζ^{μν} ζ^{αβ}) / ζ²`.
///
/// The curvature coupling is evaluated from the closed-form Riemann tensor
/// and is exactly zero on the supported background.
pub fn bohm_gw(metric: &MetricSpec, zeta: &SymTensorField, opts: &BohmOptions) -> Result<BohmField> {
    if !metric.is_minkowski() {
        return Err(Error::UnsupportedBackground(
            "gravitational-wave Bohm potential is defined on Minkowski backgrounds only".into(),
        ));
    }
    let c = metric.c;
    let l = zeta.lattice();
    let ms = MetricSlices::new(metric, l)?;
    // Off-diagonal pairs appear twice in the full contraction.
    let weight = |i: usize, (mu, nu): (usize, usize)| {
        let g = ms.inverse_diag(i);
        g[mu] * g[nu] * if mu == nu { 1.0 } else { 2.0 }
    };
    let mut norm = vec![0.0; l.len()];
    for (slot, &pair) in SYM_PAIRS.iter().enumerate() {
        for (i, acc) in norm.iter_mut().enumerate() {
            *acc += weight(i, pair) * zeta.comps[slot].values()[i].powi(2);
        }
    }
    let norm = Field::from_values(l, norm)?;
    let mask = polarization_mask(&norm, opts, Error::NullAmplitude)?;

    let mut num = vec![0.0; l.len()];
    let mut margin = zeta.margin() + opts.order.half_width();
    for (slot, &pair) in SYM_PAIRS.iter().enumerate() {
        let comp = &zeta.comps[slot];
        if comp.is_identically_zero() {
            continue;
        }
        let b = box_flat(comp, c, opts.order)?;
        margin = margin.max(b.margin());
        for (i, acc) in num.iter_mut().enumerate() {
            *acc += weight(i, pair) * comp.values()[i] * b.values()[i];
        }
    }
    let t_stride = l.strides()[0];
    for it in 0..l.counts[0] {
        let riem = metric.riemann_at(&GeomPoint::new(l.coord(0, it), 0.0, 0.0, 0.0))?;
        let g = metric.metric_diag(&GeomPoint::new(l.coord(0, it), 0.0, 0.0, 0.0))?;
        let gi = metric.inverse_diag(&GeomPoint::new(l.coord(0, it), 0.0, 0.0, 0.0))?;
        if riem.iter().flatten().flatten().flatten().all(|r| *r == 0.0) {
            continue;
        }
        for i in it * t_stride..(it + 1) * t_stride {
            let up = |a: usize, b: usize| gi[a] * gi[b] * zeta.get(a, b).values()[i];
            let mut coupling = 0.0;
            for mu in 0..4 {
                for al in 0..4 {
                    for nu in 0..4 {
                        for be in 0..4 {
                            coupling += g[mu] * riem[mu][al][nu][be] * up(mu, nu) * up(al, be);
                        }
                    }
                }
            }
            num[i] += 2.0 * coupling;
        }
    }
    let num = Field::from_values(l, num)?.widen_margin(margin);
    quotient(&num, &norm, mask, Sector::Gw)
}
