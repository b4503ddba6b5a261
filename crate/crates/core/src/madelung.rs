//! Polar decomposition `ψ = A exp(iS/ħ)` with flood-fill phase unwrapping.
//!
//! Unwrapping walks the lattice breadth-first from a reference point,
//! visiting neighbours axis by axis in a configurable order. Each step adds
//! the wrapped argument difference to the accumulated phase, so the result is
//! deterministic for a given reference and axis order.
//!
//! Two amplitude conventions are supported. `NonNegative` keeps `A = |ψ|` and
//! forces every step into `(-π, π]`. `Signed` additionally lets the amplitude
//! change sign, reducing steps into `(-π/2, π/2]`; this is what keeps the phase
//! smooth across the nodes of real standing-wave profiles such as `cos(κy)`.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    coordinate_derivative, io::write_csv, ComplexField, CovectorField, Field, Lattice, Mask, RealField, StencilOrder,
};

/// Fraction of the admissible step (π, or π/2 in signed mode) above which a
/// neighbour step is treated as aliased.
pub const NYQUIST_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    /// Try `NonNegative`; fall back to `Signed` when a step aliases.
    #[default]
    Auto,
    Signed,
    NonNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeOptions {
    /// Unwrapping seed; the lattice center when absent.
    pub reference: Option<Vec<usize>>,
    pub hbar: f64,
    pub mode: AmplitudeMode,
    /// Points with `|ψ| ≤ floor_rel · max|ψ|` carry no phase of their own.
    /// The fill steps across a single such point, so a sign change at an
    /// isolated node still trips the step guard.
    pub floor_rel: f64,
    /// Neighbour visiting order; identity when absent.
    pub axis_order: Option<Vec<usize>>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { reference: None, hbar: 1.0, mode: AmplitudeMode::Auto, floor_rel: 1e-12, axis_order: None }
    }
}

/// Amplitude and unwrapped phase of a complex field.
#[derive(Debug, Clone)]
pub struct MadelungPair {
    pub amplitude: RealField,
    /// `S`, already multiplied by `ħ`.
    pub phase: RealField,
    pub reference: Vec<usize>,
    pub hbar: f64,
    /// Convention actually used (never `Auto`).
    pub mode: AmplitudeMode,
    /// Points whose phase came from the flood fill, i.e. above the floor.
    pub kept: Mask,
}

/// `k_μ = ∂_μ S` together with the points where it is trustworthy.
#[derive(Debug, Clone)]
pub struct WaveVectorField {
    pub k: CovectorField,
    pub valid: Mask,
}

pub fn decompose(psi: &ComplexField, opts: &DecomposeOptions) -> Result<MadelungPair> {
    if !(opts.hbar > 0.0 && opts.hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", opts.hbar)));
    }
    if !(opts.floor_rel >= 0.0 && opts.floor_rel < 1.0) {
        return Err(Error::InvalidParameter(format!("floor_rel must lie in [0, 1), got {}", opts.floor_rel)));
    }
    let l = psi.lattice();
    let reference = opts.reference.clone().unwrap_or_else(|| l.center());
    if reference.len() != l.ndim() || reference.iter().zip(&l.counts).any(|(r, c)| r >= c) {
        return Err(Error::InvalidParameter(format!("reference {reference:?} outside lattice {:?}", l.counts)));
    }
    let axis_order = match &opts.axis_order {
        Some(order) => {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..l.ndim()).collect::<Vec<_>>() {
                return Err(Error::InvalidParameter(format!("axis_order {order:?} is not a permutation")));
            }
            order.clone()
        }
        None => (0..l.ndim()).collect(),
    };
    let floor = opts.floor_rel * psi.max_modulus();
    let ref_idx = l.ravel(&reference);
    if psi.values()[ref_idx].norm() <= floor || psi.values()[ref_idx].norm() == 0.0 {
        return Err(Error::ZeroAtReference(reference));
    }

    let run = |signed: bool| unwrap(psi, ref_idx, &axis_order, floor, signed);
    let (signed, (amp, phase, keep)) = match opts.mode {
        AmplitudeMode::Signed => (true, run(true)?),
        AmplitudeMode::NonNegative => (false, run(false)?),
        AmplitudeMode::Auto => match run(false) {
            Ok(r) => (false, r),
            Err(Error::NyquistViolation { .. }) => (true, run(true)?),
            Err(e) => return Err(e),
        },
    };
    let phase = phase.into_iter().map(|s| s * opts.hbar).collect();
    Ok(MadelungPair {
        amplitude: Field::from_values(l, amp)?,
        phase: Field::from_values(l, phase)?,
        reference,
        hbar: opts.hbar,
        mode: if signed { AmplitudeMode::Signed } else { AmplitudeMode::NonNegative },
        kept: Mask::from_keep(l, keep)?,
    })
}

type Unwrapped = (Vec<f64>, Vec<f64>, Vec<bool>);

fn unwrap(psi: &ComplexField, ref_idx: usize, axis_order: &[usize], floor: f64, signed: bool) -> Result<Unwrapped> {
    let l = psi.lattice();
    let vals = psi.values();
    let strides = l.strides();
    let n = l.len();
    let (step_limit, guard) =
        if signed { (PI / 2.0, NYQUIST_FRACTION * PI / 2.0) } else { (PI, NYQUIST_FRACTION * PI) };

    let mut amp: Vec<f64> = vals.iter().map(|z| z.norm()).collect();
    let mut phase = vec![0.0; n];
    let mut visited = vec![false; n];
    let mut keep = vec![false; n];
    let above = |i: usize| vals[i].norm() > floor;

    // Seeds: the reference first, then any region it cannot reach, in
    // storage order. Each extra region is offset by an arbitrary 2πn.
    let mut queue = VecDeque::new();
    let mut seeds = std::iter::once(ref_idx).chain(0..n);
    while let Some(seed) = seeds.by_ref().find(|&i| !visited[i] && above(i)) {
        visited[seed] = true;
        keep[seed] = true;
        phase[seed] = vals[seed].arg();
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            let multi = l.unravel(i);
            let rotor = Complex64::from_polar(1.0, -phase[i]);
            for &axis in axis_order {
                let s = strides[axis];
                let neighbours = [(multi[axis] > 0).then(|| i - s), (multi[axis] + 1 < l.counts[axis]).then(|| i + s)];
                for j in neighbours.into_iter().flatten() {
                    if visited[j] {
                        continue;
                    }
                    if !above(j) {
                        // A below-floor point inherits the phase and, when
                        // reached from a kept point, bridges to kept points
                        // beyond it: sign changes across isolated lattice
                        // nodes stay visible to the step guard.
                        phase[j] = phase[i];
                        if keep[i] {
                            visited[j] = true;
                            queue.push_back(j);
                        }
                        continue;
                    }
                    visited[j] = true;
                    let mut d = (vals[j] * rotor).arg();
                    let mut sign = 1.0;
                    if signed && d.abs() > step_limit {
                        d -= PI.copysign(d);
                        sign = -1.0;
                    }
                    if d.abs() >= guard {
                        return Err(Error::NyquistViolation {
                            from: l.unravel(i)[..l.ndim()].to_vec(),
                            to: l.unravel(j)[..l.ndim()].to_vec(),
                            jump: d,
                        });
                    }
                    phase[j] = phase[i] + d;
                    amp[j] = sign * vals[j].norm();
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok((amp, phase, keep))
}

/// Decomposes a multi-component field (`A_μ` or `h_μν`) using the phase of
/// its dominant component. Returns the common pair and the real polarization
/// amplitudes `Re(A_i e^{-iS/ħ})`.
pub fn decompose_components(comps: &[ComplexField], opts: &DecomposeOptions) -> Result<(MadelungPair, Vec<RealField>)> {
    let dominant = comps
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.max_modulus()))
        .fold(None, |best: Option<(usize, f64)>, (i, m)| match best {
            Some((_, bm)) if bm >= m => best,
            _ => Some((i, m)),
        })
        .filter(|(_, m)| *m > 0.0)
        .ok_or(Error::NullAmplitude)?
        .0;
    let pair = decompose(&comps[dominant], opts)?;
    let amps = comps
        .iter()
        .map(|c| c.zip_map(&pair.phase, |z, s| (z * Complex64::from_polar(1.0, -s / pair.hbar)).re))
        .collect::<Result<Vec<_>>>()?;
    Ok((pair, amps))
}

impl MadelungPair {
    /// `k_μ = ∂_μ S`. Valid where the whole stencil reads flood-filled phase
    /// and lies off the boundary margin.
    pub fn wavevector(&self, order: StencilOrder) -> Result<WaveVectorField> {
        let l = self.phase.lattice();
        let comps: [RealField; 4] = [
            coordinate_derivative(&self.phase, 0, order)?,
            coordinate_derivative(&self.phase, 1, order)?,
            coordinate_derivative(&self.phase, 2, order)?,
            coordinate_derivative(&self.phase, 3, order)?,
        ];
        let margin = self.phase.margin() + order.half_width();
        let valid = self.kept.erode(order.half_width()).and_interior(margin).require_nonempty("wavevector")?;
        debug_assert_eq!(valid.lattice(), l);
        Ok(WaveVectorField { k: CovectorField::from_components(comps)?, valid })
    }

    /// `A exp(iS/ħ)`.
    pub fn reconstruct(&self) -> ComplexField {
        self.amplitude
            .zip_map(&self.phase, |a, s| Complex64::from_polar(1.0, s / self.hbar) * a)
            .expect("amplitude and phase share a lattice")
    }

    pub fn lattice(&self) -> &Lattice {
        self.amplitude.lattice()
    }

    /// CSV with coordinates, `A`, `S` and a 0/1 kept column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let kept: Vec<f64> = self.kept.keep().iter().map(|k| if *k { 1.0 } else { 0.0 }).collect();
        write_csv(
            writer,
            self.lattice(),
            &[("A", self.amplitude.values()), ("S", self.phase.values()), ("kept", &kept)],
        )
    }
}
