//! Closed-form background metrics in signature (-,+,+,+).
//!
//! Two backgrounds are supported: Minkowski and the spatially flat FRW
//! metric `diag(-c², a², a², a²)`. Everything is evaluated from closed forms,
//! so the geometry layer contributes no discretization error to residual
//! studies. Coordinates are ordered `(t, x, y, z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix4 = [[f64; 4]; 4];
/// `Γ^λ_{μν}` indexed `[λ][μ][ν]`.
pub type Christoffel = [[[f64; 4]; 4]; 4];
/// `R^λ_{μνρ}` indexed `[λ][μ][ν][ρ]`.
pub type Riemann = [[[[f64; 4]; 4]; 4]; 4];

/// A spacetime point `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeomPoint {
    pub coords: [f64; 4],
}

impl GeomPoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { coords: [t, x, y, z] }
    }

    pub fn t(&self) -> f64 {
        self.coords[0]
    }
    pub fn x(&self) -> f64 {
        self.coords[1]
    }
    pub fn y(&self) -> f64 {
        self.coords[2]
    }
    pub fn z(&self) -> f64 {
        self.coords[3]
    }
}

/// Scale factor models for the FRW background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleFactor {
    /// `a(t) = a0`
    Constant { a0: f64 },
    /// `a(t) = exp(H t)`
    Exponential { h: f64 },
    /// `a(t) = (t / t0)^p`, chart restricted to `t > 0`
    PowerLaw { p: f64, t0: f64 },
}

impl ScaleFactor {
    fn validate(&self) -> Result<()> {
        match *self {
            ScaleFactor::Constant { a0 } if !(a0 > 0.0 && a0.is_finite()) => {
                Err(Error::InvalidParameter(format!("a0 must be positive, got {a0}")))
            }
            ScaleFactor::Exponential { h } if !h.is_finite() => {
                Err(Error::InvalidParameter(format!("H must be finite, got {h}")))
            }
            ScaleFactor::PowerLaw { p, t0 } if !(t0 > 0.0 && p.is_finite()) => {
                Err(Error::InvalidParameter(format!("power law needs t0 > 0 and finite p, got p={p} t0={t0}")))
            }
            _ => Ok(()),
        }
    }

    fn check_chart(&self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite time {t}")));
        }
        if let ScaleFactor::PowerLaw { .. } = self {
            if t <= 0.0 {
                return Err(Error::Domain(format!("power-law scale factor requires t > 0, got t = {t}")));
            }
        }
        Ok(())
    }

    /// `(a, ȧ, ä)` at time `t`.
    pub fn derivatives(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_chart(t)?;
        Ok(match *self {
            ScaleFactor::Constant { a0 } => (a0, 0.0, 0.0),
            ScaleFactor::Exponential { h } => {
                let a = (h * t).exp();
                (a, h * a, h * h * a)
            }
            ScaleFactor::PowerLaw { p, t0 } => {
                let a = (t / t0).powf(p);
                (a, p * a / t, p * (p - 1.0) * a / (t * t))
            }
        })
    }

    pub fn a(&self, t: f64) -> Result<f64> {
        Ok(self.derivatives(t)?.0)
    }

    /// Closed-form antiderivative of `1/a(t)`; any additive constant is fine
    /// since it only shifts the global phase.
    pub fn conformal_time(&self, t: f64) -> Result<f64> {
        self.check_chart(t)?;
        Ok(match *self {
            ScaleFactor::Constant { a0 } => t / a0,
            ScaleFactor::Exponential { h } => {
                if h == 0.0 {
                    t
                } else {
                    -(-h * t).exp() / h
                }
            }
            ScaleFactor::PowerLaw { p, t0 } => {
                if (p - 1.0).abs() < 1e-15 {
                    t0 * t.ln()
                } else {
                    t.powf(1.0 - p) * t0.powf(p) / (1.0 - p)
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Background {
    Minkowski,
    Frw { scale_factor: ScaleFactor },
}

/// Background metric together with the light speed used for the time
/// component (`g_tt = -c²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default = "default_c")]
    pub c: f64,
    pub background: Background,
}

fn default_c() -> f64 {
    1.0
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self::minkowski(1.0)
    }
}

impl MetricSpec {
    pub fn minkowski(c: f64) -> Self {
        Self { c, background: Background::Minkowski }
    }

    pub fn frw(c: f64, scale_factor: ScaleFactor) -> Self {
        Self { c, background: Background::Frw { scale_factor } }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {}", self.c)));
        }
        if let Background::Frw { scale_factor } = &self.background {
            scale_factor.validate()?;
        }
        Ok(())
    }

    pub fn is_minkowski(&self) -> bool {
        matches!(self.background, Background::Minkowski)
    }

    pub fn scale_factor(&self) -> Option<&ScaleFactor> {
        match &self.background {
            Background::Minkowski => None,
            Background::Frw { scale_factor } => Some(scale_factor),
        }
    }

    /// `(a, ȧ, ä)`; Minkowski is `(1, 0, 0)`.
    fn expansion(&self, t: f64) -> Result<(f64, f64, f64)> {
        match &self.background {
            Background::Minkowski => {
                if !t.is_finite() {
                    return Err(Error::Domain(format!("non-finite time {t}")));
                }
                Ok((1.0, 0.0, 0.0))
            }
            Background::Frw { scale_factor } => scale_factor.derivatives(t),
        }
    }

    /// Diagonal of `g_{μν}`.
    pub fn metric_diag(&self, p: &GeomPoint) -> Result<[f64; 4]> {
        let (a, _, _) = self.expansion(p.t())?;
        let a2 = a * a;
        Ok([-self.c * self.c, a2, a2, a2])
    }

    /// Diagonal of `g^{μν}`.
    pub fn inverse_diag(&self, p: &GeomPoint) -> Result<[f64; 4]> {
        let (a, _, _) = self.expansion(p.t())?;
        let inv_a2 = 1.0 / (a * a);
        Ok([-1.0 / (self.c * self.c), inv_a2, inv_a2, inv_a2])
    }

    pub fn metric_at(&self, p: &GeomPoint) -> Result<Matrix4> {
        Ok(diag_matrix(self.metric_diag(p)?))
    }

    pub fn inverse_metric_at(&self, p: &GeomPoint) -> Result<Matrix4> {
        Ok(diag_matrix(self.inverse_diag(p)?))
    }

    /// `√(-g)`: `c a³` (so `a³` at `c = 1`).
    pub fn volume_factor(&self, p: &GeomPoint) -> Result<f64> {
        let (a, _, _) = self.expansion(p.t())?;
        Ok(self.c * a * a * a)
    }

    pub fn christoffel_at(&self, p: &GeomPoint) -> Result<Christoffel> {
        let (a, ad, _) = self.expansion(p.t())?;
        let mut g = [[[0.0; 4]; 4]; 4];
        if ad != 0.0 {
            let c2 = self.c * self.c;
            for i in 1..4 {
                g[0][i][i] = a * ad / c2;
                g[i][0][i] = ad / a;
                g[i][i][0] = ad / a;
            }
        }
        Ok(g)
    }

    /// Time derivative of every Christoffel symbol (the only coordinate they
    /// depend on).
    fn christoffel_dt(&self, t: f64) -> Result<Christoffel> {
        let (a, ad, add) = self.expansion(t)?;
        let mut g = [[[0.0; 4]; 4]; 4];
        if ad != 0.0 || add != 0.0 {
            let c2 = self.c * self.c;
            for i in 1..4 {
                g[0][i][i] = (ad * ad + a * add) / c2;
                let d = (add * a - ad * ad) / (a * a);
                g[i][0][i] = d;
                g[i][i][0] = d;
            }
        }
        Ok(g)
    }

    /// `R^λ_{μνρ} = ∂_ν Γ^λ_{ρμ} - ∂_ρ Γ^λ_{νμ} + Γ^λ_{νσ} Γ^σ_{ρμ} - Γ^λ_{ρσ} Γ^σ_{νμ}`
    /// with the closed-form `∂_t Γ`.
    pub fn riemann_at(&self, p: &GeomPoint) -> Result<Riemann> {
        let gam = self.christoffel_at(p)?;
        let dgam = self.christoffel_dt(p.t())?;
        let mut r = [[[[0.0; 4]; 4]; 4]; 4];
        if self.is_minkowski() {
            return Ok(r);
        }
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    for q in 0..4 {
                        let mut v = 0.0;
                        if n == 0 {
                            v += dgam[l][q][m];
                        }
                        if q == 0 {
                            v -= dgam[l][n][m];
                        }
                        for s in 0..4 {
                            v += gam[l][n][s] * gam[s][q][m] - gam[l][q][s] * gam[s][n][m];
                        }
                        r[l][m][n][q] = v;
                    }
                }
            }
        }
        Ok(r)
    }
}

fn diag_matrix(d: [f64; 4]) -> Matrix4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frw_exp(h: f64) -> MetricSpec {
        MetricSpec::frw(1.0, ScaleFactor::Exponential { h })
    }

    #[test]
    fn minkowski_metric_is_flat() {
        let m = MetricSpec::minkowski(1.0);
        let p = GeomPoint::new(0.3, -1.0, 2.0, 5.0);
        assert_eq!(m.metric_at(&p).unwrap(), diag_matrix([-1.0, 1.0, 1.0, 1.0]));
        assert_eq!(m.inverse_metric_at(&p).unwrap(), diag_matrix([-1.0, 1.0, 1.0, 1.0]));
        assert_eq!(m.volume_factor(&p).unwrap(), 1.0);
        assert_eq!(m.christoffel_at(&p).unwrap(), [[[0.0; 4]; 4]; 4]);
        assert_eq!(m.riemann_at(&p).unwrap(), [[[[0.0; 4]; 4]; 4]; 4]);
    }

    #[test]
    fn exponential_with_zero_rate_is_minkowski() {
        let p = GeomPoint::new(1.7, 0.0, 0.0, 0.0);
        assert_eq!(frw_exp(0.0).metric_at(&p).unwrap(), diag_matrix([-1.0, 1.0, 1.0, 1.0]));
    }

    #[test]
    fn exponential_metric_at_ln2() {
        let p = GeomPoint::new(std::f64::consts::LN_2, 0.0, 0.0, 0.0);
        let g = frw_exp(1.0).metric_at(&p).unwrap();
        assert_eq!(g[0][0], -1.0);
        for i in 1..4 {
            assert!((g[i][i] - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_and_volume_for_a_equals_two() {
        let m = MetricSpec::frw(1.0, ScaleFactor::Constant { a0: 2.0 });
        let p = GeomPoint::default();
        assert_eq!(m.inverse_metric_at(&p).unwrap(), diag_matrix([-1.0, 0.25, 0.25, 0.25]));
        assert_eq!(m.volume_factor(&p).unwrap(), 8.0);
        let h = 0.37;
        let t = 1.3;
        let v = frw_exp(h).volume_factor(&GeomPoint::new(t, 0.0, 0.0, 0.0)).unwrap();
        assert!((v - (3.0 * h * t).exp()).abs() < 1e-13);
    }

    #[test]
    fn power_law_rejects_nonpositive_time() {
        let m = MetricSpec::frw(1.0, ScaleFactor::PowerLaw { p: 0.5, t0: 1.0 });
        for t in [0.0, -1.0] {
            let p = GeomPoint::new(t, 0.0, 0.0, 0.0);
            assert!(matches!(m.metric_at(&p), Err(Error::Domain(_))));
            assert!(matches!(m.volume_factor(&p), Err(Error::Domain(_))));
            assert!(matches!(m.christoffel_at(&p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn exponential_christoffels() {
        let h = 0.4;
        let m = frw_exp(h);
        let g = m.christoffel_at(&GeomPoint::new(0.9, 0.0, 0.0, 0.0)).unwrap();
        assert!((g[1][0][1] - h).abs() < 1e-15);
        let g0 = m.christoffel_at(&GeomPoint::default()).unwrap();
        assert!((g0[0][1][1] - h).abs() < 1e-15);
        for l in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(g[l][a][b], g[l][b][a]);
                }
            }
        }
    }

    /// Christoffels from centered differences of the metric, built directly
    /// from the textbook formula.
    fn fd_christoffel(m: &MetricSpec, t: f64, dt: f64) -> Christoffel {
        let at = |t: f64| m.metric_at(&GeomPoint::new(t, 0.0, 0.0, 0.0)).unwrap();
        let (gp, gm) = (at(t + dt), at(t - dt));
        let mut dg = [[[0.0; 4]; 4]; 4]; // dg[σ][μ][ν] = ∂_σ g_{μν}
        for mu in 0..4 {
            for nu in 0..4 {
                dg[0][mu][nu] = (gp[mu][nu] - gm[mu][nu]) / (2.0 * dt);
            }
        }
        let ginv = m.inverse_metric_at(&GeomPoint::new(t, 0.0, 0.0, 0.0)).unwrap();
        let mut out = [[[0.0; 4]; 4]; 4];
        for l in 0..4 {
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut v = 0.0;
                    for s in 0..4 {
                        v += 0.5 * ginv[l][s] * (dg[mu][s][nu] + dg[nu][s][mu] - dg[s][mu][nu]);
                    }
                    out[l][mu][nu] = v;
                }
            }
        }
        out
    }

    fn max_diff3(a: &Christoffel, b: &Christoffel) -> f64 {
        let mut e: f64 = 0.0;
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    e = e.max((a[l][m][n] - b[l][m][n]).abs());
                }
            }
        }
        e
    }

    #[test]
    fn christoffels_match_metric_differences_at_second_order() {
        let metrics = [
            frw_exp(0.7),
            MetricSpec::frw(1.0, ScaleFactor::PowerLaw { p: 2.0 / 3.0, t0: 1.0 }),
            MetricSpec::frw(2.0, ScaleFactor::Exponential { h: 0.3 }),
        ];
        for m in metrics {
            let t = 1.1;
            let exact = m.christoffel_at(&GeomPoint::new(t, 0.0, 0.0, 0.0)).unwrap();
            let e1 = max_diff3(&exact, &fd_christoffel(&m, t, 0.02));
            let e2 = max_diff3(&exact, &fd_christoffel(&m, t, 0.01));
            let order = (e1 / e2).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn inverse_times_metric_is_identity() {
        let metrics =
            [frw_exp(0.7), MetricSpec::frw(3.0, ScaleFactor::PowerLaw { p: 0.5, t0: 2.0 }), MetricSpec::minkowski(2.5)];
        for m in metrics {
            for t in [0.1, 0.5, 2.0, 7.0] {
                let p = GeomPoint::new(t, 1.0, 2.0, 3.0);
                let g = m.metric_at(&p).unwrap();
                let gi = m.inverse_metric_at(&p).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        let v: f64 = (0..4).map(|k| gi[i][k] * g[k][j]).sum();
                        let id = if i == j { 1.0 } else { 0.0 };
                        assert!((v - id).abs() <= 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_is_antisymmetric_and_matches_christoffel_differences() {
        let m = MetricSpec::frw(1.0, ScaleFactor::PowerLaw { p: 0.5, t0: 1.0 });
        for t in [0.4, 1.3, 2.9] {
            let p = GeomPoint::new(t, 0.0, 0.0, 0.0);
            let r = m.riemann_at(&p).unwrap();
            for l in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        for c in 0..4 {
                            assert!((r[l][a][b][c] + r[l][a][c][b]).abs() < 1e-13);
                        }
                    }
                }
            }
            // Riemann rebuilt with centered differences of Γ in time.
            let fd = |dt: f64| {
                let gp = m.christoffel_at(&GeomPoint::new(t + dt, 0.0, 0.0, 0.0)).unwrap();
                let gm = m.christoffel_at(&GeomPoint::new(t - dt, 0.0, 0.0, 0.0)).unwrap();
                let g = m.christoffel_at(&p).unwrap();
                let mut out = [[[[0.0; 4]; 4]; 4]; 4];
                for l in 0..4 {
                    for mu in 0..4 {
                        for nu in 0..4 {
                            for rho in 0..4 {
                                let d = |a: usize, b: usize| (gp[l][a][b] - gm[l][a][b]) / (2.0 * dt);
                                let mut v = 0.0;
                                if nu == 0 {
                                    v += d(rho, mu);
                                }
                                if rho == 0 {
                                    v -= d(nu, mu);
                                }
                                for s in 0..4 {
                                    v += g[l][nu][s] * g[s][rho][mu] - g[l][rho][s] * g[s][nu][mu];
                                }
                                out[l][mu][nu][rho] = v;
                            }
                        }
                    }
                }
                out
            };
            let err = |o: &Riemann| {
                let mut e: f64 = 0.0;
                for l in 0..4 {
                    for a in 0..4 {
                        for b in 0..4 {
                            for c in 0..4 {
                                e = e.max((o[l][a][b][c] - r[l][a][b][c]).abs());
                            }
                        }
                    }
                }
                e
            };
            let (e1, e2) = (err(&fd(0.02)), err(&fd(0.01)));
            assert!(e2 < 1e-2, "{e1} {e2}");
            let order = (e1 / e2).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn riemann_hand_component() {
        // R^t_{xtx} = a ä / c² for the flat FRW metric.
        let h = 0.3;
        let m = frw_exp(h);
        let t = 0.8;
        let a = (h * t).exp();
        let r = m.riemann_at(&GeomPoint::new(t, 0.0, 0.0, 0.0)).unwrap();
        assert!((r[0][1][0][1] - a * a * h * h).abs() < 1e-13);
    }

    #[test]
    fn conformal_time_closed_forms() {
        let s = ScaleFactor::Exponential { h: 0.1 };
        let (t1, t2) = (0.3, 0.30001);
        let d = (s.conformal_time(t2).unwrap() - s.conformal_time(t1).unwrap()) / (t2 - t1);
        assert!((d - 1.0 / s.a(0.300005).unwrap()).abs() < 1e-8);
        let pl = ScaleFactor::PowerLaw { p: 0.5, t0: 2.0 };
        let d = (pl.conformal_time(t2).unwrap() - pl.conformal_time(t1).unwrap()) / (t2 - t1);
        assert!((d - 1.0 / pl.a(0.300005).unwrap()).abs() < 1e-7);
        assert_eq!(ScaleFactor::Constant { a0: 2.0 }.conformal_time(3.0).unwrap(), 1.5);
    }
}
