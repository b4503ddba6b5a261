//! Time evolution: Crank-Nicolson for the Schrödinger equation in one or
//! two space dimensions, leapfrog for the scalar wave equation, and the
//! diagnostics run on the resulting trajectories.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohm::{bohm_nonrel, BohmOptions, Sector};
use crate::catalog::{airy::airy_ai, AiryParams};
use crate::error::{Error, Result};
use crate::lattice::{ComplexField, Field, Lattice, Mask, RealField, StencilOrder};
use crate::madelung::{decompose, AmplitudeMode, DecomposeOptions};
use crate::verify::{continuity_nonrel, qhj_fields, ResidualReport, Warning};

/// Boundary amplitude, relative to the maximum, above which a Dirichlet run
/// is flagged as leaking.
pub const LEAK_THRESHOLD: f64 = 1e-8;
/// Courant bound for the leapfrog scheme, `c dt √(Σ 1/h²)`.
pub const LEAPFROG_COURANT: f64 = 0.9;

/// Uniform grid in one or two space dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialGrid {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub counts: Vec<usize>,
}

impl SpatialGrid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let g = SpatialGrid { origin, spacing, counts };
        g.validate()?;
        Ok(g)
    }

    /// `cells` intervals on each closed interval `[lo, hi]`.
    pub fn from_bounds(bounds: &[(f64, f64)], cells: &[usize]) -> Result<Self> {
        if bounds.len() != cells.len() || cells.contains(&0) {
            return Err(Error::InvalidLattice("bounds and cell counts must match and be positive".into()));
        }
        let spacing = bounds.iter().zip(cells).map(|((lo, hi), n)| (hi - lo) / *n as f64).collect();
        SpatialGrid::new(bounds.iter().map(|b| b.0).collect(), spacing, cells.iter().map(|n| n + 1).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let nd = self.counts.len();
        if !(1..=2).contains(&nd) || self.origin.len() != nd || self.spacing.len() != nd {
            return Err(Error::InvalidLattice(format!("evolution grids have 1 or 2 axes, got {nd}")));
        }
        if self.spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) || self.counts.iter().any(|n| *n < 3) {
            return Err(Error::InvalidLattice("spacings must be positive and counts at least 3".into()));
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

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    /// Coordinates of flat index `idx`; the last axis varies fastest.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        if self.ndim() == 1 {
            vec![self.coord(0, idx)]
        } else {
            let ny = self.counts[1];
            vec![self.coord(0, idx / ny), self.coord(1, idx % ny)]
        }
    }

    fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn sample<T>(&self, f: impl Fn(&[f64]) -> T) -> Vec<T> {
        (0..self.len()).map(|i| f(&self.point(i))).collect()
    }

    fn is_boundary(&self, idx: usize) -> bool {
        if self.ndim() == 1 {
            idx == 0 || idx + 1 == self.counts[0]
        } else {
            let (nx, ny) = (self.counts[0], self.counts[1]);
            let (ix, iy) = (idx / ny, idx % ny);
            ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// The grid closes on itself; the last point neighbours the first.
    Periodic,
    /// Zero beyond both ends.
    #[default]
    Dirichlet0,
}

/// Time-independent external potential.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    #[default]
    Zero,
    /// `½ m ω² |r - r0|²`; `mass` is taken from the evolution config.
    Harmonic { omega: f64, center: [f64; 2] },
    /// `F · r`, a uniform force `-F`.
    Linear { slope: [f64; 2] },
}

impl Potential {
    pub fn eval(&self, r: &[f64], mass: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Harmonic { omega, center } => {
                0.5 * mass * omega * omega * r.iter().zip(center).map(|(x, c)| (x - c).powi(2)).sum::<f64>()
            }
            Potential::Linear { slope } => r.iter().zip(slope).map(|(x, s)| x * s).sum(),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub c: f64,
    /// Store every n-th state; the initial state is always stored.
    #[serde(default = "one_usize")]
    pub snapshot_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        EvolutionConfig {
            dt,
            steps,
            boundary: Boundary::Dirichlet0,
            potential: Potential::Zero,
            hbar: 1.0,
            m: 1.0,
            c: 1.0,
            snapshot_every: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("m", self.m), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::CflViolation(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Stored states of a Schrödinger run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: SpatialGrid,
    /// Time between stored states.
    pub dt: f64,
    pub states: Vec<Vec<Complex64>>,
    /// `Σ|ψ|² ΔV` per stored state.
    pub norms: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|n| n as f64 * self.dt).collect()
    }

    /// Largest `|N_n / N_0 - 1|`.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.norms[0];
        self.norms.iter().map(|n| (n / n0 - 1.0).abs()).fold(0.0, f64::max)
    }

    /// The run as a field on a `(t, x[, y])` lattice.
    pub fn to_spacetime_field(&self) -> Result<ComplexField> {
        let g = &self.grid;
        let mut origin = vec![0.0];
        origin.extend(&g.origin);
        let mut spacing = vec![self.dt];
        spacing.extend(&g.spacing);
        let mut counts = vec![self.states.len()];
        counts.extend(&g.counts);
        let l = Lattice::new(origin, spacing, counts)?;
        Field::from_values(&l, self.states.concat())
    }
}

/// Thomas algorithm for a tridiagonal system with constant off-diagonals.
/// `rhs` is overwritten with the solution.
fn solve_tridiagonal(lower: Complex64, diag: &[Complex64], upper: Complex64, rhs: &mut [Complex64]) {
    let n = diag.len();
    let mut c_prime = vec![Complex64::default(); n];
    let mut denom = diag[0];
    c_prime[0] = upper / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower * c_prime[i - 1];
        c_prime[i] = upper / denom;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c_prime[i] * next;
    }
}

/// Cyclic tridiagonal solve by Sherman-Morrison: the corners couple the
/// first and last unknowns through `upper` (top right is `lower`, bottom
/// left is `upper`, as for a periodic stencil).
fn solve_cyclic(lower: Complex64, diag: &[Complex64], upper: Complex64, rhs: &mut [Complex64]) {
    let n = diag.len();
    let (alpha, beta) = (upper, lower);
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - alpha * beta / gamma;
    solve_tridiagonal(lower, &bb, upper, rhs);
    let mut u = vec![Complex64::default(); n];
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiagonal(lower, &bb, upper, &mut u);
    let fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (Complex64::new(1.0, 0.0) + u[0] + beta * u[n - 1] / gamma);
    for (r, z) in rhs.iter_mut().zip(&u) {
        *r -= fact * z;
    }
}

/// One Crank-Nicolson step of `iħ ∂_t ψ = (-ħ²/2m ∂² + w V) ψ` along a
/// single line of the grid.
struct LineStepper {
    coef: f64,
    alpha: f64,
    boundary: Boundary,
}

impl LineStepper {
    fn new(h: f64, dt: f64, cfg: &EvolutionConfig) -> Self {
        LineStepper {
            coef: cfg.hbar * cfg.hbar / (2.0 * cfg.m * h * h),
            alpha: dt / (2.0 * cfg.hbar),
            boundary: cfg.boundary,
        }
    }

    fn step(&self, line: &mut [Complex64], v: &[f64]) {
        let n = line.len();
        let i = Complex64::i();
        let periodic = self.boundary == Boundary::Periodic;
        let at = |k: isize| -> Complex64 {
            if k < 0 {
                if periodic {
                    line[n - 1]
                } else {
                    Complex64::default()
                }
            } else if k as usize >= n {
                if periodic {
                    line[0]
                } else {
                    Complex64::default()
                }
            } else {
                line[k as usize]
            }
        };
        let mut rhs: Vec<Complex64> = (0..n)
            .map(|j| {
                let lap = at(j as isize + 1) + at(j as isize - 1) - line[j] * 2.0;
                let h_psi = -lap * self.coef + line[j] * v[j];
                line[j] - i * self.alpha * h_psi
            })
            .collect();
        let off = -i * self.alpha * self.coef;
        let diag: Vec<Complex64> = v.iter().map(|vj| 1.0 + i * self.alpha * (2.0 * self.coef + vj)).collect();
        if periodic {
            solve_cyclic(off, &diag, off, &mut rhs);
        } else {
            solve_tridiagonal(off, &diag, off, &mut rhs);
        }
        line.copy_from_slice(&rhs);
    }
}

/// Crank-Nicolson evolution. Two-dimensional grids use the Strang split
/// `C_x(dt/2) C_y(dt) C_x(dt/2)` with the potential shared equally.
///
/// The scheme is unconditionally stable; the guard only rejects steps
/// where the potential alone would turn the phase by π or more.
pub fn schrodinger_evolve(grid: &SpatialGrid, psi0: &[Complex64], cfg: &EvolutionConfig) -> Result<Trajectory> {
    grid.validate()?;
    cfg.validate()?;
    if psi0.len() != grid.len() {
        return Err(Error::InvalidParameter(format!("{} initial values for {} grid points", psi0.len(), grid.len())));
    }
    if psi0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidParameter("initial state is not finite".into()));
    }
    let v: Vec<f64> = grid.sample(|r| cfg.potential.eval(r, cfg.m));
    let vmax = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if cfg.dt * vmax / cfg.hbar >= PI {
        let suggested = 0.5 * PI * cfg.hbar / vmax;
        return Err(Error::CflViolation(format!(
            "dt·max|V|/ħ = {:.3} ≥ π; use dt ≤ {suggested:.6e}",
            cfg.dt * vmax / cfg.hbar
        )));
    }
    let norm = |psi: &[Complex64]| psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_volume();
    let mut psi = psi0.to_vec();
    if norm(&psi) == 0.0 {
        return Err(Error::NullAmplitude);
    }

    let mut states = vec![psi.clone()];
    let mut norms = vec![norm(&psi)];
    let mut warnings = Vec::new();
    let mut leaked = false;
    if grid.ndim() == 1 {
        let stepper = LineStepper::new(grid.spacing[0], cfg.dt, cfg);
        for n in 1..=cfg.steps {
            stepper.step(&mut psi, &v);
            record(grid, cfg, n, &psi, &mut states, &mut norms, &mut leaked, &mut warnings, norm(&psi));
        }
    } else {
        let (nx, ny) = (grid.counts[0], grid.counts[1]);
        let half_v: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
        let sx = LineStepper::new(grid.spacing[0], 0.5 * cfg.dt, cfg);
        let sy = LineStepper::new(grid.spacing[1], cfg.dt, cfg);
        // Each direction carries half the potential; the two half-step x
        // sweeps together apply the same phase as the full y sweep.
        let mut col = vec![Complex64::default(); nx];
        let mut col_v = vec![0.0; nx];
        let x_sweep = |psi: &mut Vec<Complex64>, col: &mut Vec<Complex64>, col_v: &mut Vec<f64>| {
            for iy in 0..ny {
                for ix in 0..nx {
                    col[ix] = psi[ix * ny + iy];
                    col_v[ix] = half_v[ix * ny + iy];
                }
                sx.step(col, col_v);
                for ix in 0..nx {
                    psi[ix * ny + iy] = col[ix];
                }
            }
        };
        for n in 1..=cfg.steps {
            x_sweep(&mut psi, &mut col, &mut col_v);
            for ix in 0..nx {
                let row = ix * ny..(ix + 1) * ny;
                sy.step(&mut psi[row.clone()], &half_v[row]);
            }
            x_sweep(&mut psi, &mut col, &mut col_v);
            record(grid, cfg, n, &psi, &mut states, &mut norms, &mut leaked, &mut warnings, norm(&psi));
        }
    }
    Ok(Trajectory { grid: grid.clone(), dt: cfg.dt * cfg.snapshot_every as f64, states, norms, warnings })
}

#[allow(clippy::too_many_arguments)]
fn record(
    grid: &SpatialGrid,
    cfg: &EvolutionConfig,
    n: usize,
    psi: &[Complex64],
    states: &mut Vec<Vec<Complex64>>,
    norms: &mut Vec<f64>,
    leaked: &mut bool,
    warnings: &mut Vec<Warning>,
    norm: f64,
) {
    if cfg.boundary == Boundary::Dirichlet0 && !*leaked {
        let max = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let edge = (0..psi.len()).filter(|&i| grid.is_boundary(i)).map(|i| psi[i].norm()).fold(0.0, f64::max);
        if edge > LEAK_THRESHOLD * max {
            *leaked = true;
            warnings.push(Warning {
                code: "boundary_leak".into(),
                message: format!("boundary amplitude {:.3e} of max at step {n}", edge / max),
                values: [("step".to_string(), n as f64), ("relative_amplitude".to_string(), edge / max)].into(),
            });
        }
    }
    if n.is_multiple_of(cfg.snapshot_every) {
        states.push(psi.to_vec());
        norms.push(norm);
    }
}

/// Hamilton-Jacobi diagnostics of an evolved state.
#[derive(Debug, Clone)]
pub struct QhjReports {
    /// `∂_t S + |∇S|²/2m + V + V_B`.
    pub qhj: ResidualReport,
    /// The same without `V_B`.
    pub classical: ResidualReport,
    /// `∂_t A² + ∇·(A²∇S)/m`.
    pub continuity: ResidualReport,
    /// `| |classical| - |V_B| | / |V_B|` where `|V_B|` exceeds ten times the
    /// quantum residual.
    pub plateau: ResidualReport,
}

/// Floor below which evolved amplitudes carry no phase; evolution noise in
/// the far tails would otherwise trip the step guard.
pub const EVOLVED_FLOOR: f64 = 1e-8;

pub fn qhj_residual(
    traj: &Trajectory,
    cfg: &EvolutionConfig,
    order: StencilOrder,
    epsilon_rel: f64,
) -> Result<QhjReports> {
    let psi = traj.to_spacetime_field()?;
    let l = psi.lattice().clone();
    let opts = DecomposeOptions {
        hbar: cfg.hbar,
        mode: AmplitudeMode::NonNegative,
        floor_rel: EVOLVED_FLOOR,
        ..DecomposeOptions::default()
    };
    let pair = decompose(&psi, &opts)?;
    let k = pair.wavevector(order)?;
    let vb = bohm_nonrel(&pair.amplitude, cfg.hbar, cfg.m, &BohmOptions { order, epsilon_rel })?;
    let potential: RealField = Field::sample(&l, |p| {
        let r = [p.x(), p.y()];
        cfg.potential.eval(&r[..traj.grid.ndim()], cfg.m)
    })?;
    let (q_res, mask) = qhj_fields(&k, &vb, cfg.m, Some(&potential), true)?;
    let (c_res, _) = qhj_fields(&k, &vb, cfg.m, Some(&potential), false)?;
    let qhj = ResidualReport::from_field("qhj", Sector::NonRel, &q_res, &mask);
    let classical = ResidualReport::from_field("classical_hj", Sector::NonRel, &c_res, &mask);
    let rho = pair.amplitude.map(|a| a * a);
    let continuity = continuity_nonrel(&k, &rho, cfg.m, order)?;

    let threshold = 10.0 * qhj.masked_max;
    let keep: Vec<bool> = (0..l.len()).map(|i| mask.is_kept(i) && vb.vb.values()[i].abs() > threshold).collect();
    let dominant = Mask::from_keep(&l, keep)?;
    let mut dev = vec![0.0; l.len()];
    for i in dominant.kept_indices() {
        let b = vb.vb.values()[i].abs();
        dev[i] = (c_res.values()[i].abs() - b) / b;
    }
    let mut plateau =
        ResidualReport::from_field("hj_plateau", Sector::NonRel, &Field::from_values(&l, dev)?, &dominant);
    plateau.extra.insert("vb_threshold".into(), threshold);
    Ok(QhjReports { qhj, classical, continuity, plateau })
}

/// Scalar wave-equation run with its discrete energy per stored state.
#[derive(Debug, Clone)]
pub struct WaveTrajectory {
    pub grid: SpatialGrid,
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
    /// Energy between the stored state and the next step.
    pub energies: Vec<f64>,
}

impl WaveTrajectory {
    /// Largest `|E_n / E_0 - 1|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| (e / e0 - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn periodic_laplacian(grid: &SpatialGrid, u: &[f64], out: &mut [f64]) {
    let nd = grid.ndim();
    let (nx, ny) = (grid.counts[0], if nd == 2 { grid.counts[1] } else { 1 });
    let ihx2 = 1.0 / grid.spacing[0].powi(2);
    let ihy2 = if nd == 2 { 1.0 / grid.spacing[1].powi(2) } else { 0.0 };
    for ix in 0..nx {
        let (xm, xp) = ((ix + nx - 1) % nx, (ix + 1) % nx);
        for iy in 0..ny {
            let i = ix * ny + iy;
            let mut lap = (u[xm * ny + iy] + u[xp * ny + iy] - 2.0 * u[i]) * ihx2;
            if nd == 2 {
                let (ym, yp) = ((iy + ny - 1) % ny, (iy + 1) % ny);
                lap += (u[ix * ny + ym] + u[ix * ny + yp] - 2.0 * u[i]) * ihy2;
            }
            out[i] = lap;
        }
    }
}

/// `½ Σ ((u⁺ - u)/dt)² + ½ c² Σ ∇⁺u⁺ · ∇⁺u`, conserved exactly by leapfrog.
fn staggered_energy(grid: &SpatialGrid, u: &[f64], u_next: &[f64], dt: f64, c: f64) -> f64 {
    let nd = grid.ndim();
    let (nx, ny) = (grid.counts[0], if nd == 2 { grid.counts[1] } else { 1 });
    let mut kin = 0.0;
    let mut pot = 0.0;
    for ix in 0..nx {
        let xp = (ix + 1) % nx;
        for iy in 0..ny {
            let i = ix * ny + iy;
            kin += ((u_next[i] - u[i]) / dt).powi(2);
            let gx = |w: &[f64]| (w[xp * ny + iy] - w[i]) / grid.spacing[0];
            pot += gx(u_next) * gx(u);
            if nd == 2 {
                let yp = (iy + 1) % ny;
                let gy = |w: &[f64]| (w[ix * ny + yp] - w[i]) / grid.spacing[1];
                pot += gy(u_next) * gy(u);
            }
        }
    }
    0.5 * (kin + c * c * pot) * grid.cell_volume()
}

/// Second-order leapfrog for `∂_t² u = c² ∇² u` on a periodic grid. The
/// grid's last point is the periodic image's predecessor, i.e. the period
/// is `counts · spacing`.
pub fn leapfrog_wave(grid: &SpatialGrid, u0: &[f64], u0_dot: &[f64], cfg: &EvolutionConfig) -> Result<WaveTrajectory> {
    grid.validate()?;
    cfg.validate()?;
    if cfg.boundary != Boundary::Periodic {
        return Err(Error::InvalidParameter("leapfrog runs use periodic boundaries".into()));
    }
    if u0.len() != grid.len() || u0_dot.len() != grid.len() {
        return Err(Error::InvalidParameter("initial data do not match the grid".into()));
    }
    let courant = cfg.c * cfg.dt * grid.spacing.iter().map(|h| 1.0 / (h * h)).sum::<f64>().sqrt();
    if courant > LEAPFROG_COURANT {
        let suggested = cfg.dt * LEAPFROG_COURANT / courant;
        return Err(Error::CflViolation(format!(
            "Courant number {courant:.3} exceeds {LEAPFROG_COURANT}; use dt ≤ {suggested:.6e}"
        )));
    }
    let (dt, c2) = (cfg.dt, cfg.c * cfg.c);
    let n = grid.len();
    let mut lap = vec![0.0; n];
    periodic_laplacian(grid, u0, &mut lap);
    let mut prev = u0.to_vec();
    let mut cur: Vec<f64> = (0..n).map(|i| u0[i] + dt * u0_dot[i] + 0.5 * dt * dt * c2 * lap[i]).collect();
    let mut states = vec![prev.clone()];
    let mut energies = vec![staggered_energy(grid, &prev, &cur, dt, cfg.c)];
    for step in 1..=cfg.steps {
        periodic_laplacian(grid, &cur, &mut lap);
        let next: Vec<f64> = (0..n).map(|i| 2.0 * cur[i] - prev[i] + dt * dt * c2 * lap[i]).collect();
        prev = std::mem::replace(&mut cur, next);
        if step % cfg.snapshot_every == 0 {
            states.push(prev.clone());
            energies.push(staggered_energy(grid, &prev, &cur, dt, cfg.c));
        }
    }
    Ok(WaveTrajectory { grid: grid.clone(), dt: dt * cfg.snapshot_every as f64, states, energies })
}

/// Quadratic least-squares fit `x(t) = x0 + v t + ½ a t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFit {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub position_err: f64,
    pub velocity_err: f64,
    pub acceleration_err: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

pub fn fit_quadratic(t: &[f64], x: &[f64]) -> Result<TrajectoryFit> {
    let n = t.len();
    if n < 5 || x.len() != n {
        return Err(Error::FitIllConditioned(n));
    }
    let design = DMatrix::from_fn(n, 3, |i, j| t[i].powi(j as i32));
    let y = DVector::from_column_slice(x);
    let normal = design.transpose() * &design;
    let inv = normal.try_inverse().ok_or(Error::FitIllConditioned(n))?;
    let coef = &inv * design.transpose() * &y;
    let resid = &y - &design * &coef;
    let rss = resid.norm_squared();
    let s2 = rss / (n - 3) as f64;
    let se = |j: usize| (s2 * inv[(j, j)]).sqrt();
    Ok(TrajectoryFit {
        position: coef[0],
        velocity: coef[1],
        acceleration: 2.0 * coef[2],
        position_err: se(0),
        velocity_err: se(1),
        acceleration_err: 2.0 * se(2),
        rms_residual: (rss / n as f64).sqrt(),
    })
}

/// Moments and peak of a one-dimensional run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketStats {
    pub times: Vec<f64>,
    pub norm: Vec<f64>,
    pub centroid: Vec<f64>,
    pub width: Vec<f64>,
    /// Maximum of `|ψ|²`, refined by a parabola through three samples.
    pub peak: Vec<f64>,
    pub peak_fit: TrajectoryFit,
    pub centroid_fit: TrajectoryFit,
    /// Apodization width of the initial data, when one was applied.
    pub taper_width: Option<f64>,
}

pub fn packet_stats(traj: &Trajectory) -> Result<PacketStats> {
    if traj.grid.ndim() != 1 {
        return Err(Error::InvalidParameter("packet statistics are one-dimensional".into()));
    }
    let times = traj.times();
    if times.len() < 5 {
        return Err(Error::FitIllConditioned(times.len()));
    }
    let g = &traj.grid;
    let h = g.spacing[0];
    let (mut norm, mut centroid, mut width, mut peak) = (vec![], vec![], vec![], vec![]);
    for psi in &traj.states {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = rho.iter().sum();
        let mean = rho.iter().enumerate().map(|(i, r)| r * g.coord(0, i)).sum::<f64>() / total;
        let var = rho.iter().enumerate().map(|(i, r)| r * (g.coord(0, i) - mean).powi(2)).sum::<f64>() / total;
        norm.push(total * h);
        centroid.push(mean);
        width.push(var.sqrt());
        let imax = rho.iter().enumerate().fold(0, |best, (i, r)| if *r > rho[best] { i } else { best });
        let offset = if imax == 0 || imax + 1 == rho.len() {
            0.0
        } else {
            let (l, c, r) = (rho[imax - 1], rho[imax], rho[imax + 1]);
            let curv = l - 2.0 * c + r;
            if curv == 0.0 {
                0.0
            } else {
                0.5 * (l - r) / curv
            }
        };
        peak.push(g.coord(0, imax) + offset * h);
    }
    Ok(PacketStats {
        peak_fit: fit_quadratic(&times, &peak)?,
        centroid_fit: fit_quadratic(&times, &centroid)?,
        times,
        norm,
        centroid,
        width,
        peak,
        taper_width: None,
    })
}

/// Airy initial slice with a half-Gaussian taper
/// `exp(-((x - start)/width)²)` for `x < start`, so the oscillating tail fits
/// a finite Dirichlet domain.
pub fn apodized_airy(params: &AiryParams, grid: &SpatialGrid, start: f64, width: f64) -> Result<Vec<Complex64>> {
    if grid.ndim() != 1 || width.is_nan() || width <= 0.0 {
        return Err(Error::InvalidParameter("apodized Airy data need a 1D grid and a positive taper width".into()));
    }
    let scale = params.scale();
    Ok(grid.sample(|r| {
        let x = r[0];
        let taper = if x < start { (-((x - start) / width).powi(2)).exp() } else { 1.0 };
        Complex64::new(airy_ai(scale * x) * taper, 0.0)
    }))
}
