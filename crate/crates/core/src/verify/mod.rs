//! Residual checks on sampled solutions.
//!
//! Every check returns a [`ResidualReport`] carrying the masked maximum and
//! mean of its residual. [`convergence_study`] reruns a set of checks under
//! uniform refinement and fills in the observed orders; [`suite`] assembles
//! the per-sector check lists used by the command line.

mod report;
pub mod suite;

use num_complex::Complex64;

use crate::bohm::{BohmField, Sector};
use crate::catalog::{Branch, Luminality, SampledField, SlepianParams};
use crate::error::{Error, Result};
use crate::geometry::MetricSpec;
use crate::lattice::{
    box_flat, coordinate_derivative, curved_maxwell_operator, partial_derivative, second_derivative, ComplexField,
    CovectorField, Field, Lattice, Mask, MetricSlices, RealField, StencilOrder, SymTensorField,
};
use crate::madelung::WaveVectorField;

pub use report::{observed_orders, ResidualReport, Status, Warning, ZERO_RESIDUAL};
pub use suite::{run_convergence, run_suite, SuiteConfig};

/// Class of a single `k·k` value; `scale` is `Σ |g^{μμ}| k_μ²`.
pub fn classify(kk: f64, scale: f64, null_tol_rel: f64) -> Luminality {
    if kk.abs() <= null_tol_rel * scale {
        Luminality::Null
    } else if kk < 0.0 {
        Luminality::Timelike
    } else {
        Luminality::Spacelike
    }
}

#[derive(Default)]
struct Votes {
    timelike: usize,
    null: usize,
    spacelike: usize,
}

impl Votes {
    fn add(&mut self, class: Luminality) {
        match class {
            Luminality::Timelike => self.timelike += 1,
            Luminality::Null => self.null += 1,
            Luminality::Spacelike => self.spacelike += 1,
            Luminality::NotApplicable => {}
        }
    }

    /// Majority class and its share. Ties resolve towards null.
    fn majority(&self) -> Option<(Luminality, f64)> {
        let total = self.timelike + self.null + self.spacelike;
        if total == 0 {
            return None;
        }
        let best = [
            (Luminality::Null, self.null),
            (Luminality::Timelike, self.timelike),
            (Luminality::Spacelike, self.spacelike),
        ]
        .into_iter()
        .fold((Luminality::Null, 0), |acc, c| if c.1 > acc.1 { c } else { acc });
        Some((best.0, best.1 as f64 / total as f64))
    }
}

fn k_dot_k(ms: &MetricSlices, k: &CovectorField, i: usize) -> (f64, f64) {
    let kv = k.at(i);
    let gi = ms.inverse_diag(i);
    let kk = (0..4).map(|m| gi[m] * kv[m] * kv[m]).sum();
    let scale = (0..4).map(|m| gi[m].abs() * kv[m] * kv[m]).sum();
    (kk, scale)
}

/// Majority luminality of `k` over its valid points, with the agreeing share.
pub fn classify_luminality(k: &WaveVectorField, metric: &MetricSpec, null_tol_rel: f64) -> Result<(Luminality, f64)> {
    let ms = MetricSlices::new(metric, k.k.lattice())?;
    let mut votes = Votes::default();
    for i in k.valid.kept_indices() {
        let (kk, scale) = k_dot_k(&ms, &k.k, i);
        votes.add(classify(kk, scale, null_tol_rel));
    }
    votes.majority().ok_or_else(|| Error::EmptyMask("no valid wavevector points".into()))
}

/// `k·k - V_B` on the points where both are valid, plus the majority
/// luminality of `k` there.
pub fn dispersion_residual(
    k: &WaveVectorField,
    vb: &BohmField,
    metric: &MetricSpec,
    null_tol_rel: f64,
) -> Result<ResidualReport> {
    let l = k.k.lattice();
    let ms = MetricSlices::new(metric, l)?;
    let mask = k.valid.and(&vb.mask)?.require_nonempty("dispersion")?;
    let mut res = vec![0.0; l.len()];
    let mut votes = Votes::default();
    let (mut kk_sum, mut vb_sum) = (0.0, 0.0);
    for i in mask.kept_indices() {
        let (kk, scale) = k_dot_k(&ms, &k.k, i);
        res[i] = kk - vb.vb.values()[i];
        votes.add(classify(kk, scale, null_tol_rel));
        kk_sum += kk;
        vb_sum += vb.vb.values()[i];
    }
    let mut r = ResidualReport::from_field("dispersion", vb.sector, &Field::from_values(l, res)?, &mask);
    let n = mask.kept_count() as f64;
    r.extra.insert("kk_mean".into(), kk_sum / n);
    r.extra.insert("vb_mean".into(), vb_sum / n);
    if let Some((class, share)) = votes.majority() {
        r.classification = Some(class);
        r.unanimity = Some(share);
    }
    Ok(r)
}

/// Pointwise Hamilton-Jacobi residual `∂_t S + |∇S|²/2m + V + V_B` and
/// the joint mask it lives on. `include_bohm = false` drops `V_B`.
pub fn qhj_fields(
    k: &WaveVectorField,
    vb: &BohmField,
    mass: f64,
    potential: Option<&RealField>,
    include_bohm: bool,
) -> Result<(RealField, Mask)> {
    let l = k.k.lattice();
    let mask = k.valid.and(&vb.mask)?.require_nonempty("Hamilton-Jacobi")?;
    let nd = l.ndim();
    let mut res = vec![0.0; l.len()];
    for i in mask.kept_indices() {
        let kv = k.k.at(i);
        let kinetic: f64 = (1..nd).map(|a| kv[a] * kv[a]).sum::<f64>() / (2.0 * mass);
        let v = potential.map_or(0.0, |p| p.values()[i]);
        let b = if include_bohm { vb.vb.values()[i] } else { 0.0 };
        res[i] = kv[0] + kinetic + v + b;
    }
    Ok((Field::from_values(l, res)?, mask))
}

/// Report form of [`qhj_fields`]: `qhj` with `V_B`, `classical_hj` without.
pub fn qhj_residual(
    k: &WaveVectorField,
    vb: &BohmField,
    mass: f64,
    potential: Option<&RealField>,
    include_bohm: bool,
) -> Result<ResidualReport> {
    let (res, mask) = qhj_fields(k, vb, mass, potential, include_bohm)?;
    let name = if include_bohm { "qhj" } else { "classical_hj" };
    Ok(ResidualReport::from_field(name, Sector::NonRel, &res, &mask))
}

/// `(1/w) Σ_μ ∂_μ F^μ` on the points whose stencils read valid `k`.
fn flux_divergence(
    k: &WaveVectorField,
    fluxes: Vec<RealField>,
    weight: impl Fn(usize) -> f64,
    order: StencilOrder,
) -> Result<(RealField, Mask)> {
    let l = k.k.lattice();
    let mut div = vec![0.0; l.len()];
    let mut margin = 0;
    for (mu, f) in fluxes.iter().enumerate() {
        let d = partial_derivative(f, mu, order)?;
        margin = margin.max(d.margin());
        for (acc, v) in div.iter_mut().zip(d.values()) {
            *acc += v;
        }
    }
    for (i, v) in div.iter_mut().enumerate() {
        *v /= weight(i);
    }
    let mask = k.valid.erode(order.half_width()).and_interior(margin).require_nonempty("continuity")?;
    Ok((Field::from_values(l, div)?, mask))
}

/// Covariant current conservation `∇_μ(ρ k^μ) = 0` with `ρ` the squared
/// amplitude (or polarization norm).
pub fn continuity_residual(
    k: &WaveVectorField,
    density: &RealField,
    metric: &MetricSpec,
    sector: Sector,
    order: StencilOrder,
) -> Result<ResidualReport> {
    let l = k.k.lattice();
    let ms = MetricSlices::new(metric, l)?;
    let fluxes = (0..l.ndim())
        .map(|mu| {
            let vals = (0..l.len())
                .map(|i| ms.volume(i) * ms.inverse_diag(i)[mu] * k.k.comps[mu].values()[i] * density.values()[i])
                .collect();
            Field::from_values(l, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    let (div, mask) = flux_divergence(k, fluxes, |i| ms.volume(i), order)?;
    Ok(ResidualReport::from_field("continuity", sector, &div, &mask))
}

/// `∂_t ρ + ∇·(ρ ∇S/m) = 0`.
pub fn continuity_nonrel(
    k: &WaveVectorField,
    density: &RealField,
    mass: f64,
    order: StencilOrder,
) -> Result<ResidualReport> {
    let l = k.k.lattice();
    let mut fluxes = vec![density.clone()];
    for a in 1..l.ndim() {
        fluxes.push(density.zip_map(&k.k.comps[a], |rho, ka| rho * ka / mass)?);
    }
    let (div, mask) = flux_divergence(k, fluxes, |_| 1.0, order)?;
    Ok(ResidualReport::from_field("continuity", Sector::NonRel, &div, &mask))
}

/// Real polarization amplitude of a vector or tensor mode.
#[derive(Debug, Clone, Copy)]
pub enum Polarization<'a> {
    Covector(&'a CovectorField),
    Tensor(&'a SymTensorField),
}

#[derive(Debug, Clone)]
pub struct GaugeReports {
    /// `k^μ ξ_μ` (or `k^μ ζ_μν`).
    pub algebraic: ResidualReport,
    /// `∇^μ ξ_μ` (or `∂^μ ζ_μν`).
    pub differential: ResidualReport,
}

/// Lorenz and transverse gauge conditions. Tensor modes are checked on
/// Minkowski only.
pub fn gauge_residual(
    pol: Polarization<'_>,
    k: &WaveVectorField,
    metric: &MetricSpec,
    sector: Sector,
    order: StencilOrder,
) -> Result<GaugeReports> {
    let l = k.k.lattice();
    let ms = MetricSlices::new(metric, l)?;
    let n = l.len();
    let mut alg = vec![0.0; n];
    let mut diff = vec![0.0; n];
    match pol {
        Polarization::Covector(xi) => {
            for i in k.valid.kept_indices() {
                alg[i] = ms.contract(i, &k.k.at(i), &xi.at(i));
            }
            for mu in 0..4 {
                if xi.comps[mu].is_identically_zero() {
                    continue;
                }
                let flux = Field::from_values(
                    l,
                    (0..n).map(|i| ms.volume(i) * ms.inverse_diag(i)[mu] * xi.comps[mu].values()[i]).collect(),
                )?;
                let d = coordinate_derivative(&flux, mu, order)?;
                for (i, v) in d.values().iter().enumerate() {
                    diff[i] += v / ms.volume(i);
                }
            }
        }
        Polarization::Tensor(zeta) => {
            if !metric.is_minkowski() {
                return Err(Error::UnsupportedBackground(
                    "tensor gauge conditions are implemented on Minkowski only".into(),
                ));
            }
            for nu in 0..4 {
                let mut col_alg = vec![0.0; n];
                let mut col_diff = vec![0.0; n];
                for mu in 0..4 {
                    let comp = zeta.get(mu, nu);
                    if comp.is_identically_zero() {
                        continue;
                    }
                    for i in k.valid.kept_indices() {
                        col_alg[i] += ms.inverse_diag(i)[mu] * k.k.comps[mu].values()[i] * comp.values()[i];
                    }
                    let d = coordinate_derivative(comp, mu, order)?;
                    for (i, v) in d.values().iter().enumerate() {
                        col_diff[i] += ms.inverse_diag(i)[mu] * v;
                    }
                }
                for i in 0..n {
                    alg[i] = if col_alg[i].abs() > alg[i].abs() { col_alg[i] } else { alg[i] };
                    diff[i] = if col_diff[i].abs() > diff[i].abs() { col_diff[i] } else { diff[i] };
                }
            }
        }
    }
    let algebraic = ResidualReport::from_field("gauge_algebraic", sector, &Field::from_values(l, alg)?, &k.valid);
    let differential =
        ResidualReport::from_field("gauge_differential", sector, &Field::from_values(l, diff)?, &k.valid);
    Ok(GaugeReports { algebraic, differential })
}

fn max_modulus_over(comps: &[ComplexField]) -> Result<RealField> {
    let l = comps[0].lattice();
    let mut out = vec![0.0f64; l.len()];
    for c in comps {
        for (o, v) in out.iter_mut().zip(c.values()) {
            *o = o.max(v.norm());
        }
    }
    Field::from_values(l, out)
}

/// Field-equation residual of the sampled field itself: the Schrödinger
/// equation for the non-relativistic sector, the flat d'Alembertian for
/// scalar, flat EM and tensor modes, and the curved Maxwell operator for
/// EM on FRW. Reports the largest component modulus.
pub fn wave_residual(
    field: &SampledField,
    metric: &MetricSpec,
    sector: Sector,
    order: StencilOrder,
    hbar: f64,
    mass: f64,
) -> Result<ResidualReport> {
    let (res, margin) = match (sector, field) {
        (Sector::NonRel, SampledField::Scalar(psi)) => {
            let l = psi.lattice();
            let dt = partial_derivative(psi, 0, order)?;
            let mut out = dt.map(|z| z * Complex64::new(0.0, hbar));
            for a in 1..l.ndim() {
                let d2 = second_derivative(psi, a, order)?;
                out = out.zip_map(&d2, |x, y| x + y * (hbar * hbar / (2.0 * mass)))?;
            }
            let margin = dt.margin();
            (max_modulus_over(&[out])?, margin)
        }
        (Sector::EmCurved, SampledField::Covector(a)) => {
            let x = curved_maxwell_operator(metric, a, order)?;
            (max_modulus_over(&x.comps)?, x.margin())
        }
        (Sector::Scalar | Sector::EmFlat | Sector::Gw, f) => {
            let outs = f.components().iter().map(|c| box_flat(c, metric.c, order)).collect::<Result<Vec<_>>>()?;
            let margin = outs[0].margin();
            (max_modulus_over(&outs)?, margin)
        }
        _ => return Err(Error::InvalidParameter(format!("field rank does not match sector {}", sector.name()))),
    };
    let mask = Mask::interior(res.lattice(), margin).require_nonempty("wave residual")?;
    Ok(ResidualReport::from_field("wave", sector, &res, &mask))
}

/// Off-parallel share of the curved Maxwell source `X^β` relative to the
/// raised polarization `ξ^β`: `|X - (X·n)n| / |X|` with `n = ξ^/|ξ^|`,
/// Euclidean in components.
pub fn alignment_residual(
    xi: &CovectorField,
    x: &CovectorField,
    metric: &MetricSpec,
    sector: Sector,
    epsilon_rel: f64,
) -> Result<ResidualReport> {
    let l = xi.lattice();
    let ms = MetricSlices::new(metric, l)?;
    let n = l.len();
    let raised: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (g, v) = (ms.inverse_diag(i), xi.at(i));
            std::array::from_fn(|m| g[m] * v[m])
        })
        .collect();
    let norm = |v: &[f64; 4]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let x_norm = Field::from_values(l, (0..n).map(|i| norm(&x.at(i))).collect())?.widen_margin(x.margin());
    let xi_norm = Field::from_values(l, raised.iter().map(norm).collect())?;
    if x_norm.is_identically_zero() {
        return Err(Error::EmptyMask("field-equation source vanishes identically".into()));
    }
    let mask = crate::lattice::build_mask(&x_norm, epsilon_rel)?
        .and(&crate::lattice::build_mask(&xi_norm, epsilon_rel)?)?
        .require_nonempty("alignment")?;
    let mut res = vec![0.0; n];
    for i in mask.kept_indices() {
        let xv = x.at(i);
        let nv = raised[i].map(|c| c / xi_norm.values()[i]);
        let along: f64 = (0..4).map(|m| xv[m] * nv[m]).sum();
        let ortho: [f64; 4] = std::array::from_fn(|m| xv[m] - along * nv[m]);
        res[i] = norm(&ortho) / x_norm.values()[i];
    }
    Ok(ResidualReport::from_field("alignment", sector, &Field::from_values(l, res)?, &mask))
}

/// Splits a cos-branch Slepian mode into its two null constituents
/// `½ e^{i(kx ± κy - ωt)}` and checks both the sum and the null condition
/// `k² + κ² - ω²/c² = 0`, the latter exactly.
pub fn scissor_check(params: &SlepianParams, lattice: &Lattice) -> Result<Vec<ResidualReport>> {
    if params.branch() != Branch::CosSuperPhase {
        return Err(Error::BranchDomain { v: params.v, c: params.c, branch: "cos (null decomposition)" });
    }
    if lattice.ndim() < 3 {
        return Err(Error::InvalidParameter("null decomposition needs (t, x, y) axes".into()));
    }
    let (k, kappa, omega, amp) = (params.k, params.kappa(), params.omega(), params.amp);
    let profile = params.profile();
    let res = RealField::sample(lattice, |p| {
        let phase = k * p.x() - omega * p.t();
        let mode = Complex64::from_polar(profile(p.y()), phase);
        let plus = Complex64::from_polar(0.5 * amp, phase + kappa * p.y());
        let minus = Complex64::from_polar(0.5 * amp, phase - kappa * p.y());
        (mode - plus - minus).norm() / amp.abs()
    })?;
    let all = Mask::all(lattice);
    let sum = ResidualReport::from_field("scissor_sum", Sector::Scalar, &res, &all);
    let defect = (k * k + params.kappa_squared() - (omega / params.c).powi(2)).abs();
    let null = ResidualReport::from_values("scissor_null", Sector::Scalar, lattice, defect, defect, 1.0);
    Ok(vec![sum, null])
}

/// Reruns `run` on `levels` successively refined lattices and merges the
/// reports by check name. The finest report is returned with every level's
/// maximum and the observed orders; its verdict is re-evaluated.
pub fn convergence_study<F>(base: &Lattice, levels: usize, cap: usize, mut run: F) -> Result<Vec<ResidualReport>>
where
    F: FnMut(&Lattice) -> Result<Vec<ResidualReport>>,
{
    if levels == 0 {
        return Err(Error::InvalidParameter("a convergence study needs at least one level".into()));
    }
    let mut lattices = vec![base.clone()];
    base.validate(cap).map_err(|e| with_level(e, 0))?;
    for level in 1..levels {
        let next = lattices[level - 1].refine_with_cap(cap).map_err(|e| with_level(e, level))?;
        lattices.push(next);
    }
    let mut per_level = Vec::with_capacity(levels);
    for l in &lattices {
        per_level.push(run(l)?);
    }
    let mut finest = per_level.pop().expect("levels ≥ 1");
    for report in &mut finest {
        let mut maxes = Vec::with_capacity(levels);
        for reports in &per_level {
            let same = reports.iter().find(|r| r.check_name == report.check_name).ok_or_else(|| {
                Error::InvalidParameter(format!("check {} missing on a coarser level", report.check_name))
            })?;
            maxes.push(same.masked_max);
        }
        maxes.push(report.masked_max);
        report.orders = observed_orders(&maxes);
        report.level_max = maxes;
        report.evaluate();
    }
    Ok(finest)
}

fn with_level(e: Error, level: usize) -> Error {
    match e {
        Error::MemoryCap { points, cap, .. } => Error::MemoryCap { points, cap, level: Some(level) },
        other => other,
    }
}
