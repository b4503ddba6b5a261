//! Closed-form solutions with their predicted Bohm potentials. These are the
//! oracles every verification run is measured against.

pub mod airy;

pub use airy::{airy_ai, AI_FIRST_MAX};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohm::Sector;
use crate::error::{Error, Result};
use crate::geometry::{GeomPoint, MetricSpec, ScaleFactor};
use crate::lattice::{sym_index, ComplexField, CovectorField, Lattice, SymTensorField};

pub type ScalarFn = Arc<dyn Fn(&GeomPoint) -> Complex64 + Send + Sync>;
pub type CovectorFn = Arc<dyn Fn(&GeomPoint) -> [Complex64; 4] + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&GeomPoint) -> [Complex64; 10] + Send + Sync>;
pub type RealFn = Arc<dyn Fn(&GeomPoint) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Evaluator {
    Scalar(ScalarFn),
    Covector(CovectorFn),
    Tensor(TensorFn),
}

/// A sampled evaluator, one variant per field rank.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SampledField {
    Scalar(ComplexField),
    Covector(CovectorField<Complex64>),
    Tensor(SymTensorField<Complex64>),
}

impl SampledField {
    pub fn lattice(&self) -> &Lattice {
        match self {
            SampledField::Scalar(f) => f.lattice(),
            SampledField::Covector(f) => f.lattice(),
            SampledField::Tensor(f) => f.lattice(),
        }
    }

    /// Components as scalar fields, in storage order.
    pub fn components(&self) -> Vec<ComplexField> {
        match self {
            SampledField::Scalar(f) => vec![f.clone()],
            SampledField::Covector(f) => f.comps.to_vec(),
            SampledField::Tensor(f) => f.comps.to_vec(),
        }
    }
}

/// Sign of `k·k` in signature (-,+,+,+).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Luminality {
    Timelike,
    Null,
    Spacelike,
    #[serde(rename = "NA")]
    NotApplicable,
}

impl fmt::Display for Luminality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Luminality::Timelike => "Timelike",
            Luminality::Null => "Null",
            Luminality::Spacelike => "Spacelike",
            Luminality::NotApplicable => "NA",
        };
        f.write_str(s)
    }
}

/// Transverse profile branch of a Slepian wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `cos(κy)`, phase speed above `c`.
    #[serde(rename = "cos")]
    CosSuperPhase,
    /// `cosh(κy)`, phase speed below `c`.
    #[serde(rename = "cosh")]
    CoshSubPhase,
}

fn one() -> f64 {
    1.0
}

fn default_a0() -> f64 {
    2.0
}

/// Parameters of `U(y) e^{ik(x - vt)}` with `U = amp·cos(κy)` or
/// `amp·cosh(κy)`, `κ = k √|v²/c² - 1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlepianParams {
    pub k: f64,
    pub v: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub amp: f64,
    /// Defaults to `cos` for `v ≥ c` and `cosh` otherwise.
    #[serde(default)]
    pub branch: Option<Branch>,
    /// Relative error injected into the speed used for the profile only;
    /// nonzero values produce a field that no longer solves the wave
    /// equation (negative control).
    #[serde(default)]
    pub detune: f64,
}

impl SlepianParams {
    pub fn new(k: f64, v: f64, c: f64, branch: Branch) -> Self {
        SlepianParams { k, v, c, amp: 1.0, branch: Some(branch), detune: 0.0 }
    }

    pub fn branch(&self) -> Branch {
        self.branch.unwrap_or(if self.v >= self.c { Branch::CosSuperPhase } else { Branch::CoshSubPhase })
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0.0 {
            return Err(Error::ZeroWavenumber);
        }
        for (name, val) in [("k", self.k), ("v", self.v), ("c", self.c), ("amp", self.amp), ("detune", self.detune)] {
            if !val.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if !(self.c > 0.0 && self.v >= 0.0) {
            return Err(Error::InvalidParameter(format!("need c > 0 and v ≥ 0, got c={} v={}", self.c, self.v)));
        }
        let ok = match self.branch() {
            Branch::CosSuperPhase => self.v >= self.c,
            Branch::CoshSubPhase => self.v <= self.c,
        };
        if !ok {
            let branch = match self.branch() {
                Branch::CosSuperPhase => "cos (requires v ≥ c)",
                Branch::CoshSubPhase => "cosh (requires v ≤ c)",
            };
            return Err(Error::BranchDomain { v: self.v, c: self.c, branch });
        }
        Ok(())
    }

    /// `κ² = k² |v²/c² - 1|`, computed without a square root.
    pub fn kappa_squared(&self) -> f64 {
        let beta2 = self.v * self.v / (self.c * self.c);
        self.k * self.k * (beta2 - 1.0).abs()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_squared().sqrt()
    }

    /// `k²(1 - v²/c²)`, the dispersion value of either branch.
    pub fn dispersion_value(&self) -> f64 {
        self.k * self.k * (1.0 - self.v * self.v / (self.c * self.c))
    }

    pub fn omega(&self) -> f64 {
        self.k * self.v
    }

    /// Transverse profile, including any detuning.
    pub fn profile(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let v = self.v * (1.0 + self.detune);
        let kappa = self.k * (v * v / (self.c * self.c) - 1.0).abs().sqrt();
        let (amp, branch) = (self.amp, self.branch());
        move |y| match branch {
            Branch::CosSuperPhase => amp * (kappa * y).cos(),
            Branch::CoshSubPhase => amp * (kappa * y).cosh(),
        }
    }

    fn class(&self) -> Luminality {
        if self.v == self.c {
            Luminality::Null
        } else if self.v > self.c {
            Luminality::Timelike
        } else {
            Luminality::Spacelike
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        GaussianParams { sigma: 1.0, x0: 0.0, p0: 0.0, hbar: 1.0, m: 1.0 }
    }
}

impl GaussianParams {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.hbar > 0.0 && self.m > 0.0) {
            return Err(Error::InvalidParameter("gaussian packet needs sigma, hbar, m > 0".into()));
        }
        Ok(())
    }

    /// `τ = ħt / (2mσ²)`.
    pub fn tau(&self, t: f64) -> f64 {
        self.hbar * t / (2.0 * self.m * self.sigma * self.sigma)
    }

    /// Standard deviation of `|ψ|²`, `σ√(1 + τ²)`.
    pub fn width(&self, t: f64) -> f64 {
        self.sigma * (1.0 + self.tau(t).powi(2)).sqrt()
    }

    pub fn centroid(&self, t: f64) -> f64 {
        self.x0 + self.p0 * t / self.m
    }

    /// Time at which the width has grown by `√2`.
    pub fn doubling_time(&self) -> f64 {
        2.0 * self.m * self.sigma * self.sigma / self.hbar
    }

    /// Exact free-particle solution.
    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let q = Complex64::new(1.0, self.tau(t));
        let xr = x - self.centroid(t);
        let norm = (2.0 * PI * self.sigma * self.sigma).powf(-0.25);
        let phase = self.p0 * x / self.hbar - self.p0 * self.p0 * t / (2.0 * self.m * self.hbar);
        let exponent = -xr * xr / (4.0 * self.sigma * self.sigma * q) + Complex64::i() * phase;
        norm / q.sqrt() * exponent.exp()
    }

    /// `-(ħ²/2m) A''/A` for `A = |ψ|`.
    pub fn bohm_potential(&self, x: f64, t: f64) -> f64 {
        let s2 = self.width(t).powi(2);
        let xr = x - self.centroid(t);
        -self.hbar * self.hbar / (2.0 * self.m) * (xr * xr / (4.0 * s2 * s2) - 1.0 / (2.0 * s2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiryParams {
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
}

impl Default for AiryParams {
    fn default() -> Self {
        AiryParams { b: 1.0, hbar: 1.0, m: 1.0 }
    }
}

impl AiryParams {
    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.hbar > 0.0 && self.m > 0.0) {
            return Err(Error::InvalidParameter("airy packet needs B, hbar, m > 0".into()));
        }
        Ok(())
    }

    /// Spatial scale factor `B / ħ^{2/3}` of the Airy argument.
    pub fn scale(&self) -> f64 {
        self.b / self.hbar.powf(2.0 / 3.0)
    }

    /// Airy argument at `(x, t)`.
    pub fn argument(&self, x: f64, t: f64) -> f64 {
        let b3 = self.b.powi(3);
        self.scale() * (x - b3 * t * t / (4.0 * self.m * self.m))
    }

    /// `ψ = Ai[(B/ħ^{2/3})(x - B³t²/4m²)] exp[(iB³t/2mħ)(x - B³t²/6m²)]`.
    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let b3 = self.b.powi(3);
        let phase = b3 * t / (2.0 * self.m * self.hbar) * (x - b3 * t * t / (6.0 * self.m * self.m));
        Complex64::from_polar(1.0, phase) * airy_ai(self.argument(x, t))
    }

    /// Constant peak acceleration `B³ / (2m²)`.
    pub fn acceleration(&self) -> f64 {
        self.b.powi(3) / (2.0 * self.m * self.m)
    }

    pub fn peak(&self, t: f64) -> f64 {
        AI_FIRST_MAX / self.scale() + 0.5 * self.acceleration() * t * t
    }

    /// `-(ħ²/2m) A''/A`, linear in `x` because `Ai'' = z Ai`.
    pub fn bohm_potential(&self, x: f64, t: f64) -> f64 {
        -self.hbar * self.hbar / (2.0 * self.m) * self.scale().powi(2) * self.argument(x, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Harmonic {
    /// `eˣ cos y`
    ExpCos,
    /// `x² - y²`
    SaddleXy,
    /// `x²`, not harmonic; negative control.
    Square,
}

/// Serializable description of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solution", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionSpec {
    PlaneWaveNonrel {
        #[serde(default = "one")]
        p: f64,
        #[serde(default = "one")]
        hbar: f64,
        #[serde(default = "one")]
        m: f64,
    },
    PlaneWave {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "one")]
        c: f64,
    },
    PlaneWaveEmFlat {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "one")]
        c: f64,
    },
    /// Null mode on a constant-scale-factor FRW background.
    PlaneWaveEmFrw {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "default_a0")]
        a0: f64,
    },
    PlaneWaveGw {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "one")]
        c: f64,
    },
    SlepianScalar(SlepianParams),
    SlepianEmFlat(SlepianParams),
    SlepianEmFrw {
        k: f64,
        v: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "one")]
        amp: f64,
        #[serde(default)]
        branch: Option<Branch>,
        #[serde(default)]
        detune: f64,
        scale_factor: ScaleFactor,
    },
    SlepianGw(SlepianParams),
    GaussianPacket(GaussianParams),
    AiryPacket(AiryParams),
    HarmonicAmplitude {
        choice: Harmonic,
        #[serde(default = "one")]
        hbar: f64,
        #[serde(default = "one")]
        m: f64,
    },
}

/// Alternative sign convention recorded next to the oracle value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignNote {
    pub alternative_formula: String,
    pub alternative_value: f64,
    pub oracle_formula: String,
    pub oracle_value: f64,
}

/// A closed-form solution with its predicted Bohm potential.
#[derive(Clone)]
pub struct AnalyticSolution {
    pub name: String,
    pub spec: SolutionSpec,
    pub sector: Sector,
    pub params: BTreeMap<String, f64>,
    pub metric: MetricSpec,
    pub evaluator: Evaluator,
    pub expected_vb: Option<RealFn>,
    pub vb_formula: String,
    pub expected_class: Luminality,
    pub anchor: String,
    pub sign_note: Option<SignNote>,
    /// `ħ` and `m` of the non-relativistic sector; 1 elsewhere.
    pub hbar: f64,
    pub mass: f64,
}

impl fmt::Debug for AnalyticSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSolution")
            .field("name", &self.name)
            .field("spec", &self.spec)
            .field("sector", &self.sector)
            .field("expected_class", &self.expected_class)
            .finish_non_exhaustive()
    }
}

impl AnalyticSolution {
    pub fn sample(&self, lattice: &Lattice) -> Result<SampledField> {
        Ok(match &self.evaluator {
            Evaluator::Scalar(f) => SampledField::Scalar(ComplexField::sample(lattice, |p| f(p))?),
            Evaluator::Covector(f) => SampledField::Covector(CovectorField::sample(lattice, |p| f(p))?),
            Evaluator::Tensor(f) => SampledField::Tensor(SymTensorField::sample(lattice, |p| f(p))?),
        })
    }

    pub fn slepian(&self) -> Option<SlepianParams> {
        match self.spec {
            SolutionSpec::SlepianScalar(p) | SolutionSpec::SlepianEmFlat(p) | SolutionSpec::SlepianGw(p) => Some(p),
            SolutionSpec::SlepianEmFrw { k, v, c, amp, branch, detune, .. } => {
                Some(SlepianParams { k, v, c, amp, branch, detune })
            }
            _ => None,
        }
    }
}

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn constant(v: f64) -> Option<RealFn> {
    Some(Arc::new(move |_: &GeomPoint| v))
}

fn z_covector(z: Complex64) -> [Complex64; 4] {
    let mut out = [Complex64::default(); 4];
    out[3] = z;
    out
}

fn zz_tensor(z: Complex64) -> [Complex64; 10] {
    let mut out = [Complex64::default(); 10];
    out[sym_index(3, 3)] = z;
    out
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k == 0.0 {
        Err(Error::ZeroWavenumber)
    } else if !k.is_finite() {
        Err(Error::InvalidParameter(format!("k must be finite, got {k}")))
    } else {
        Ok(())
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c must be positive, got {c}")))
    }
}

struct Entry {
    name: &'static str,
    sector: Sector,
    params: BTreeMap<String, f64>,
    metric: MetricSpec,
    evaluator: Evaluator,
    expected_vb: Option<RealFn>,
    vb_formula: String,
    class: Luminality,
    anchor: &'static str,
}

impl SolutionSpec {
    pub fn build(&self) -> Result<AnalyticSolution> {
        let mut sign_note = None;
        let (mut hbar, mut mass) = (1.0, 1.0);
        let e = match *self {
            SolutionSpec::PlaneWaveNonrel { p, hbar: hb, m } => {
                if !(hb > 0.0 && m > 0.0) {
                    return Err(Error::InvalidParameter("hbar and m must be positive".into()));
                }
                check_wavenumber(p)?;
                (hbar, mass) = (hb, m);
                let energy = p * p / (2.0 * m);
                Entry {
                    name: "plane_wave_nonrel",
                    sector: Sector::NonRel,
                    params: params([("p", p), ("hbar", hb), ("m", m)]),
                    metric: MetricSpec::minkowski(1.0),
                    evaluator: Evaluator::Scalar(Arc::new(move |q| {
                        Complex64::from_polar(1.0, (p * q.x() - energy * q.t()) / hb)
                    })),
                    expected_vb: constant(0.0),
                    vb_formula: "0".into(),
                    class: Luminality::NotApplicable,
                    anchor: "free particle plane wave: constant amplitude, Bohm potential vanishes",
                }
            }
            SolutionSpec::PlaneWave { k, c } => {
                check_wavenumber(k)?;
                check_c(c)?;
                Entry {
                    name: "plane_wave",
                    sector: Sector::Scalar,
                    params: params([("k", k), ("c", c)]),
                    metric: MetricSpec::minkowski(c),
                    evaluator: Evaluator::Scalar(Arc::new(move |q| {
                        Complex64::from_polar(1.0, k * (q.x() - c * q.t()))
                    })),
                    expected_vb: constant(0.0),
                    vb_formula: "0".into(),
                    class: Luminality::Null,
                    anchor: "scalar plane wave e^{ik(x-ct)}: k·k = 0, Bohm potential vanishes",
                }
            }
            SolutionSpec::PlaneWaveEmFlat { k, c } => {
                check_wavenumber(k)?;
                check_c(c)?;
                Entry {
                    name: "plane_wave_em_flat",
                    sector: Sector::EmFlat,
                    params: params([("k", k), ("c", c)]),
                    metric: MetricSpec::minkowski(c),
                    evaluator: Evaluator::Covector(Arc::new(move |q| {
                        z_covector(Complex64::from_polar(1.0, k * (q.x() - c * q.t())))
                    })),
                    expected_vb: constant(0.0),
                    vb_formula: "0".into(),
                    class: Luminality::Null,
                    anchor: "z-polarized electromagnetic plane wave: constant polarization, k·k = 0",
                }
            }
            SolutionSpec::PlaneWaveEmFrw { k, c, a0 } => {
                check_wavenumber(k)?;
                check_c(c)?;
                let sf = ScaleFactor::Constant { a0 };
                let metric = MetricSpec::frw(c, sf);
                metric.validate()?;
                Entry {
                    name: "plane_wave_em_frw",
                    sector: Sector::EmCurved,
                    params: params([("k", k), ("c", c), ("a0", a0)]),
                    metric,
                    evaluator: Evaluator::Covector(Arc::new(move |q| {
                        z_covector(Complex64::from_polar(1.0, k * (q.x() - c * q.t() / a0)))
                    })),
                    expected_vb: constant(0.0),
                    vb_formula: "0".into(),
                    class: Luminality::Null,
                    anchor: "electromagnetic plane wave on a static FRW background: k·k = 0",
                }
            }
            SolutionSpec::PlaneWaveGw { k, c } => {
                check_wavenumber(k)?;
                check_c(c)?;
                Entry {
                    name: "plane_wave_gw",
                    sector: Sector::Gw,
                    params: params([("k", k), ("c", c)]),
                    metric: MetricSpec::minkowski(c),
                    evaluator: Evaluator::Tensor(Arc::new(move |q| {
                        zz_tensor(Complex64::from_polar(1.0, k * (q.x() - c * q.t())))
                    })),
                    expected_vb: constant(0.0),
                    vb_formula: "0".into(),
                    class: Luminality::Null,
                    anchor: "h_zz gravitational plane wave: constant amplitude, k·k = 0",
                }
            }
            SolutionSpec::SlepianScalar(sp) => {
                sp.validate()?;
                if sp.branch() == Branch::CoshSubPhase && sp.v != sp.c {
                    let k2 = sp.k * sp.k;
                    let beta2 = sp.v * sp.v / (sp.c * sp.c);
                    sign_note = Some(SignNote {
                        alternative_formula: "k²(v²/c² - 1)".into(),
                        alternative_value: k2 * (beta2 - 1.0),
                        oracle_formula: "□U/U = κ² = k²(1 - v²/c²)".into(),
                        oracle_value: sp.kappa_squared(),
                    });
                }
                let phase = slepian_phase(sp.k, sp.v);
                let name = match sp.branch() {
                    Branch::CosSuperPhase => "slepian_scalar",
                    Branch::CoshSubPhase => "slepian_scalar_cosh",
                };
                slepian_entry(name, Sector::Scalar, sp, MetricSpec::minkowski(sp.c), move |u, _| {
                    Evaluator::Scalar(Arc::new(move |q| phase(q) * u(q.y())))
                })?
            }
            SolutionSpec::SlepianEmFlat(sp) => {
                sp.validate()?;
                let phase = slepian_phase(sp.k, sp.v);
                slepian_entry("slepian_em_flat", Sector::EmFlat, sp, MetricSpec::minkowski(sp.c), move |u, _| {
                    Evaluator::Covector(Arc::new(move |q| z_covector(phase(q) * u(q.y()))))
                })?
            }
            SolutionSpec::SlepianGw(sp) => {
                sp.validate()?;
                let phase = slepian_phase(sp.k, sp.v);
                slepian_entry("slepian_gw_flat", Sector::Gw, sp, MetricSpec::minkowski(sp.c), move |u, _| {
                    Evaluator::Tensor(Arc::new(move |q| zz_tensor(phase(q) * u(q.y()))))
                })?
            }
            SolutionSpec::SlepianEmFrw { k, v, c, amp, branch, detune, scale_factor } => {
                let sp = SlepianParams { k, v, c, amp, branch, detune };
                sp.validate()?;
                let metric = MetricSpec::frw(c, scale_factor);
                metric.validate()?;
                let mut entry = slepian_entry("slepian_em_frw", Sector::EmCurved, sp, metric, |u, sf| {
                    let sf = sf.expect("FRW metric");
                    Evaluator::Covector(Arc::new(move |q| {
                        // Off-chart times cannot occur on validated lattices; NaN
                        // makes sampling fail loudly if they do.
                        let eta = sf.conformal_time(q.t()).unwrap_or(f64::NAN);
                        z_covector(Complex64::from_polar(u(q.y()), k * q.x() - k * v * eta))
                    }))
                })?;
                let disp = sp.dispersion_value();
                entry.expected_vb =
                    Some(Arc::new(move |q: &GeomPoint| disp / scale_factor.a(q.t()).unwrap_or(f64::NAN).powi(2)));
                entry.vb_formula = "(k²/a²)(1 - v²/c²)".into();
                entry.anchor = "FRW z-polarized mode A_z = ξ0 U(y) exp(ikx - ikv∫dt/a): k·k = (k²/a²)(1 - v²/c²)";
                entry
            }
            SolutionSpec::GaussianPacket(gp) => {
                gp.validate()?;
                (hbar, mass) = (gp.hbar, gp.m);
                Entry {
                    name: "gaussian_packet",
                    sector: Sector::NonRel,
                    params: params([("sigma", gp.sigma), ("x0", gp.x0), ("p0", gp.p0), ("hbar", gp.hbar), ("m", gp.m)]),
                    metric: MetricSpec::minkowski(1.0),
                    evaluator: Evaluator::Scalar(Arc::new(move |q| gp.psi(q.x(), q.t()))),
                    expected_vb: Some(Arc::new(move |q: &GeomPoint| gp.bohm_potential(q.x(), q.t()))),
                    vb_formula: "-(ħ²/2m)(X²/(4s⁴) - 1/(2s²)), s = σ√(1+τ²)".into(),
                    class: Luminality::NotApplicable,
                    anchor: "free Gaussian packet: width σ√(1 + (ħt/2mσ²)²)",
                }
            }
            SolutionSpec::AiryPacket(ap) => {
                ap.validate()?;
                (hbar, mass) = (ap.hbar, ap.m);
                Entry {
                    name: "airy_packet",
                    sector: Sector::NonRel,
                    params: params([("b", ap.b), ("hbar", ap.hbar), ("m", ap.m)]),
                    metric: MetricSpec::minkowski(1.0),
                    evaluator: Evaluator::Scalar(Arc::new(move |q| ap.psi(q.x(), q.t()))),
                    expected_vb: Some(Arc::new(move |q: &GeomPoint| ap.bohm_potential(q.x(), q.t()))),
                    vb_formula: "-(B²ħ^{2/3}/2m) z, z the Airy argument".into(),
                    class: Luminality::NotApplicable,
                    anchor: "force-free Airy packet: peak acceleration B³/(2m²) with V = 0",
                }
            }
            SolutionSpec::HarmonicAmplitude { choice, hbar: hb, m } => {
                if !(hb > 0.0 && m > 0.0) {
                    return Err(Error::InvalidParameter("hbar and m must be positive".into()));
                }
                (hbar, mass) = (hb, m);
                #[allow(clippy::type_complexity)]
                let (name, amp, vb, formula, anchor): (_, fn(f64, f64) -> f64, Option<RealFn>, _, _) = match choice {
                    Harmonic::ExpCos => (
                        "harmonic_exp_cos",
                        |x, y| x.exp() * y.cos(),
                        constant(0.0),
                        "0",
                        "harmonic amplitude eˣ cos y: ∇²A = 0, Bohm potential vanishes",
                    ),
                    Harmonic::SaddleXy => (
                        "harmonic_saddle",
                        |x, y| x * x - y * y,
                        constant(0.0),
                        "0",
                        "harmonic amplitude x² - y²: ∇²A = 0, Bohm potential vanishes",
                    ),
                    Harmonic::Square => (
                        "non_harmonic_square",
                        |x, _| x * x,
                        Some(Arc::new(move |q: &GeomPoint| -hb * hb / m / (q.x() * q.x()))),
                        "-(ħ²/m)/x²",
                        "non-harmonic control x²: ∇²A/A = 2/x²",
                    ),
                };
                Entry {
                    name,
                    sector: Sector::NonRel,
                    params: params([("hbar", hb), ("m", m)]),
                    metric: MetricSpec::minkowski(1.0),
                    evaluator: Evaluator::Scalar(Arc::new(move |q| Complex64::new(amp(q.x(), q.y()), 0.0))),
                    expected_vb: vb,
                    vb_formula: formula.into(),
                    class: Luminality::NotApplicable,
                    anchor,
                }
            }
        };
        Ok(AnalyticSolution {
            name: e.name.to_string(),
            spec: *self,
            sector: e.sector,
            params: e.params,
            metric: e.metric,
            evaluator: e.evaluator,
            expected_vb: e.expected_vb,
            vb_formula: e.vb_formula,
            expected_class: e.class,
            anchor: e.anchor.to_string(),
            sign_note,
            hbar,
            mass,
        })
    }
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn slepian_entry(
    name: &'static str,
    sector: Sector,
    sp: SlepianParams,
    metric: MetricSpec,
    make: impl FnOnce(Profile, Option<ScaleFactor>) -> Evaluator,
) -> Result<Entry> {
    let profile: Profile = Arc::new(sp.profile());
    let evaluator = make(profile, metric.scale_factor().copied());
    let anchor = match (sector, sp.branch()) {
        (Sector::Scalar, Branch::CosSuperPhase) => "scalar cos profile, v > c: k·k = □U/U = k²(1 - v²/c²) < 0",
        (Sector::Scalar, Branch::CoshSubPhase) => "scalar cosh profile, v < c: k·k = □U/U = κ² > 0",
        (Sector::EmFlat, _) => "z-polarized potential in Lorenz gauge: k·k = ξ_ν□ξ^ν/ξ²",
        (Sector::Gw, _) => "h_zz wave in Lorenz gauge: k·k = ζ^{μν}□ζ_{μν}/ζ²",
        _ => "",
    };
    let mut p = params([("k", sp.k), ("v", sp.v), ("c", sp.c), ("amp", sp.amp)]);
    if sp.detune != 0.0 {
        p.insert("detune".into(), sp.detune);
    }
    if let Some(ScaleFactor::Exponential { h }) = metric.scale_factor() {
        p.insert("H".into(), *h);
    }
    Ok(Entry {
        name,
        sector,
        params: p,
        metric,
        evaluator,
        expected_vb: constant(sp.dispersion_value()),
        vb_formula: "k²(1 - v²/c²)".into(),
        class: sp.class(),
        anchor,
    })
}

/// `e^{ik(x - vt)}` of the Slepian family; the caller multiplies in the
/// profile. Captures nothing so it can be shared by all evaluators.
fn slepian_phase(k: f64, v: f64) -> impl Fn(&GeomPoint) -> Complex64 + Send + Sync + Copy {
    move |q| Complex64::from_polar(1.0, k * (q.x() - v * q.t()))
}

/// Default-parameter entries, one per constructor.
pub fn default_specs() -> Vec<SolutionSpec> {
    let cos = SlepianParams::new(1.0, 2.0, 1.0, Branch::CosSuperPhase);
    vec![
        SolutionSpec::PlaneWaveNonrel { p: 1.0, hbar: 1.0, m: 1.0 },
        SolutionSpec::PlaneWave { k: 1.0, c: 1.0 },
        SolutionSpec::PlaneWaveEmFlat { k: 1.0, c: 1.0 },
        SolutionSpec::PlaneWaveEmFrw { k: 1.0, c: 1.0, a0: 2.0 },
        SolutionSpec::PlaneWaveGw { k: 1.0, c: 1.0 },
        SolutionSpec::SlepianScalar(cos),
        SolutionSpec::SlepianScalar(SlepianParams::new(2.0, 0.5, 1.0, Branch::CoshSubPhase)),
        SolutionSpec::SlepianEmFlat(cos),
        SolutionSpec::SlepianEmFrw {
            k: 1.0,
            v: 2.0,
            c: 1.0,
            amp: 1.0,
            branch: Some(Branch::CosSuperPhase),
            detune: 0.0,
            scale_factor: ScaleFactor::Exponential { h: 0.1 },
        },
        SolutionSpec::SlepianGw(cos),
        SolutionSpec::GaussianPacket(GaussianParams::default()),
        SolutionSpec::AiryPacket(AiryParams::default()),
        SolutionSpec::HarmonicAmplitude { choice: Harmonic::ExpCos, hbar: 1.0, m: 1.0 },
        SolutionSpec::HarmonicAmplitude { choice: Harmonic::SaddleXy, hbar: 1.0, m: 1.0 },
        SolutionSpec::HarmonicAmplitude { choice: Harmonic::Square, hbar: 1.0, m: 1.0 },
    ]
}

pub fn catalog() -> Vec<AnalyticSolution> {
    default_specs().iter().map(|s| s.build().expect("default parameters are valid")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(t: f64, x: f64, y: f64) -> GeomPoint {
        GeomPoint::new(t, x, y, 0.0)
    }

    fn scalar(sol: &AnalyticSolution) -> ScalarFn {
        match &sol.evaluator {
            Evaluator::Scalar(f) => f.clone(),
            _ => panic!("not scalar"),
        }
    }

    #[test]
    fn catalog_has_every_constructor() {
        let all = catalog();
        assert!(all.len() >= 8);
        let cos = &all[5];
        assert_eq!(cos.expected_class, Luminality::Timelike);
        assert_eq!((cos.expected_vb.as_ref().unwrap())(&at(0.3, 0.1, 0.2)), -3.0);
        let cosh = &all[6];
        assert_eq!(cosh.expected_class, Luminality::Spacelike);
        assert_eq!((cosh.expected_vb.as_ref().unwrap())(&at(0.0, 0.0, 0.0)), 3.0);
        let note = cosh.sign_note.as_ref().unwrap();
        assert_eq!((note.alternative_value, note.oracle_value), (-3.0, 3.0));
    }

    #[test]
    fn wrong_branch_is_rejected() {
        let bad = SolutionSpec::SlepianScalar(SlepianParams::new(1.0, 0.5, 1.0, Branch::CosSuperPhase));
        assert!(matches!(bad.build(), Err(Error::BranchDomain { .. })));
        let bad = SolutionSpec::SlepianGw(SlepianParams::new(1.0, 2.0, 1.0, Branch::CoshSubPhase));
        assert!(matches!(bad.build(), Err(Error::BranchDomain { .. })));
        assert!(matches!(SolutionSpec::PlaneWave { k: 0.0, c: 1.0 }.build(), Err(Error::ZeroWavenumber)));
    }

    #[test]
    fn slepian_at_light_speed_is_a_plane_wave() {
        for branch in [Branch::CosSuperPhase, Branch::CoshSubPhase] {
            let sol = SolutionSpec::SlepianScalar(SlepianParams::new(1.0, 1.0, 1.0, branch)).build().unwrap();
            let plane = SolutionSpec::PlaneWave { k: 1.0, c: 1.0 }.build().unwrap();
            assert_eq!(sol.expected_class, Luminality::Null);
            for p in [at(0.1, 0.2, 0.3), at(-1.0, 2.0, 5.0)] {
                assert!((scalar(&sol)(&p) - scalar(&plane)(&p)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn frw_mode_reduces_to_flat_when_h_is_zero() {
        let sp = SlepianParams::new(1.0, 2.0, 1.0, Branch::CosSuperPhase);
        let frw = SolutionSpec::SlepianEmFrw {
            k: 1.0,
            v: 2.0,
            c: 1.0,
            amp: 1.0,
            branch: None,
            detune: 0.0,
            scale_factor: ScaleFactor::Exponential { h: 0.0 },
        }
        .build()
        .unwrap();
        let flat = SolutionSpec::SlepianEmFlat(sp).build().unwrap();
        let (Evaluator::Covector(a), Evaluator::Covector(b)) = (&frw.evaluator, &flat.evaluator) else { panic!() };
        for p in [at(0.0, 0.5, 0.1), at(1.3, -0.2, 0.7)] {
            assert!((a(&p)[3] - b(&p)[3]).norm() < 1e-14);
        }
        let vb = frw.expected_vb.unwrap();
        assert_eq!(vb(&at(0.0, 0.0, 0.0)), -3.0);
    }

    #[test]
    fn frw_expected_potential_redshifts() {
        let sol = default_specs()[8].build().unwrap();
        let vb = sol.expected_vb.unwrap();
        assert_eq!(vb(&at(0.0, 0.0, 0.0)), -3.0);
        assert!((vb(&at(1.0, 0.0, 0.0)) + 3.0 * (-0.2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_width_oracle() {
        let gp = GaussianParams { sigma: 1.5, x0: 0.5, p0: 0.0, hbar: 1.0, m: 2.0 };
        assert_eq!(gp.width(0.0), 1.5);
        assert!((gp.width(gp.doubling_time()) - 1.5 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(gp.centroid(3.0), 0.5);
    }

    #[test]
    fn gaussian_solves_free_schrodinger() {
        let gp = GaussianParams { sigma: 0.8, x0: -0.3, p0: 1.1, hbar: 0.9, m: 1.3 };
        let h = 1e-3;
        for (x, t) in [(0.1, 0.2), (-0.7, 1.4), (1.2, 0.05)] {
            let dt = (gp.psi(x, t + h) - gp.psi(x, t - h)) / (2.0 * h);
            let dxx = (gp.psi(x + h, t) - 2.0 * gp.psi(x, t) + gp.psi(x - h, t)) / (h * h);
            let res = Complex64::i() * gp.hbar * dt + gp.hbar * gp.hbar / (2.0 * gp.m) * dxx;
            assert!(res.norm() < 1e-5, "{res}");
        }
    }

    #[test]
    fn airy_packet_solves_free_schrodinger() {
        let ap = AiryParams { b: 1.2, hbar: 0.8, m: 1.1 };
        let h = 1e-3;
        for (x, t) in [(0.3, 0.4), (-2.5, 1.1), (-6.0, 0.7)] {
            let dt = (ap.psi(x, t + h) - ap.psi(x, t - h)) / (2.0 * h);
            let dxx = (ap.psi(x + h, t) - 2.0 * ap.psi(x, t) + ap.psi(x - h, t)) / (h * h);
            let res = Complex64::i() * ap.hbar * dt + ap.hbar * ap.hbar / (2.0 * ap.m) * dxx;
            assert!(res.norm() < 1e-4, "{res}");
        }
    }

    #[test]
    fn airy_peak_starts_at_first_maximum() {
        let ap = AiryParams::default();
        assert!((ap.peak(0.0) - AI_FIRST_MAX).abs() < 1e-15);
        assert_eq!(ap.acceleration(), 0.5);
        let small = AiryParams { b: 0.1, ..ap };
        // In units of the packet length scale the acceleration goes like B⁴.
        assert!(small.acceleration() * small.scale() < 1e-3 * ap.acceleration() * ap.scale());
    }

    #[test]
    fn harmonic_control_potential() {
        let sol = SolutionSpec::HarmonicAmplitude { choice: Harmonic::Square, hbar: 1.0, m: 1.0 }.build().unwrap();
        assert_eq!((sol.expected_vb.unwrap())(&at(0.0, 2.0, 0.0)), -0.25);
    }

    #[test]
    fn spec_round_trips_through_json() {
        for spec in default_specs() {
            let text = serde_json::to_string(&spec).unwrap();
            let back: SolutionSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
        let parsed: SolutionSpec = serde_json::from_str(r#"{"solution":"slepian_scalar","k":1,"v":2}"#).unwrap();
        assert_eq!(parsed.build().unwrap().expected_class, Luminality::Timelike);
        assert!(serde_json::from_str::<SolutionSpec>(r#"{"solution":"plane_wave","kk":1}"#).is_err());
    }
}
