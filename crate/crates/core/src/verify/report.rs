use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bohm::Sector;
use crate::catalog::Luminality;
use crate::lattice::{Lattice, Mask, RealField, StencilOrder};

/// Residuals at or below this are treated as machine zero: refinement
/// orders between such levels are reported as not available.
pub const ZERO_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Counts towards the pass/fail verdict.
    Asserted,
    /// Measured and recorded only.
    Reported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
}

/// Outcome of one residual check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check_name: String,
    pub sector: Sector,
    pub lattice: Lattice,
    pub stencil_order: StencilOrder,
    pub epsilon_rel: f64,
    pub masked_max: f64,
    pub masked_mean: f64,
    pub kept_fraction: f64,
    /// `log2(r_i / r_{i+1})` per refinement pair; `null` where both
    /// residuals are machine zero.
    pub orders: Vec<Option<f64>>,
    /// `masked_max` per refinement level, coarsest first.
    pub level_max: Vec<f64>,
    pub classification: Option<Luminality>,
    pub expected_class: Option<Luminality>,
    /// Fraction of kept points agreeing with the majority class.
    pub unanimity: Option<f64>,
    pub anchor: String,
    pub status: Status,
    pub tolerance: Option<f64>,
    pub target_order: Option<f64>,
    pub order_band: f64,
    /// Closed-form value the residual is expected to approach, when known.
    pub prediction: Option<f64>,
    pub passed: bool,
    pub extra: BTreeMap<String, f64>,
    pub warnings: Vec<Warning>,
}

impl ResidualReport {
    /// Max and mean of `|residual|` over the kept points.
    pub fn from_field(check_name: &str, sector: Sector, residual: &RealField, mask: &Mask) -> Self {
        let vals = residual.values();
        let (mut max, mut sum) = (0.0f64, 0.0);
        for i in mask.kept_indices() {
            let r = vals[i].abs();
            max = max.max(r);
            sum += r;
        }
        let mean = if mask.kept_count() == 0 { 0.0 } else { sum / mask.kept_count() as f64 };
        ResidualReport::from_values(check_name, sector, residual.lattice(), max, mean, mask.kept_fraction())
    }

    pub fn from_values(check_name: &str, sector: Sector, lattice: &Lattice, max: f64, mean: f64, kept: f64) -> Self {
        ResidualReport {
            check_name: check_name.to_string(),
            sector,
            lattice: lattice.clone(),
            stencil_order: StencilOrder::Second,
            epsilon_rel: 0.0,
            masked_max: max,
            masked_mean: mean,
            kept_fraction: kept,
            orders: Vec::new(),
            level_max: vec![max],
            classification: None,
            expected_class: None,
            unanimity: None,
            anchor: String::new(),
            status: Status::Reported,
            tolerance: None,
            target_order: None,
            order_band: 0.2,
            prediction: None,
            passed: true,
            extra: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn asserted(mut self, tolerance: Option<f64>, target_order: Option<f64>) -> Self {
        self.status = Status::Asserted;
        self.tolerance = tolerance;
        self.target_order = target_order;
        self.evaluate();
        self
    }

    pub fn with_anchor(mut self, anchor: &str) -> Self {
        self.anchor = anchor.to_string();
        self
    }

    pub fn with_settings(mut self, order: StencilOrder, epsilon_rel: f64) -> Self {
        self.stencil_order = order;
        self.epsilon_rel = epsilon_rel;
        self
    }

    pub fn tolerance_ok(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.masked_max <= tol)
    }

    /// Orders inside the band; a missing order is acceptable only when the
    /// finest residual is machine zero.
    pub fn orders_ok(&self) -> bool {
        let Some(target) = self.target_order else { return true };
        self.orders.iter().all(|o| match o {
            Some(o) => (o - target).abs() <= self.order_band,
            None => self.masked_max <= ZERO_RESIDUAL,
        })
    }

    pub fn class_ok(&self) -> bool {
        match (self.expected_class, self.classification) {
            (Some(want), Some(got)) => want == got,
            (Some(_), None) => false,
            _ => true,
        }
    }

    /// Recomputes `passed` from the current fields.
    pub fn evaluate(&mut self) {
        self.passed = match self.status {
            Status::Reported => true,
            Status::Asserted => self.tolerance_ok() && self.orders_ok() && self.class_ok(),
        };
    }
}

/// `log2(r_i / r_{i+1})`, or `None` when either residual is machine zero.
pub fn observed_orders(level_max: &[f64]) -> Vec<Option<f64>> {
    level_max
        .windows(2)
        .map(|w| if w[0] <= ZERO_RESIDUAL || w[1] <= ZERO_RESIDUAL { None } else { Some((w[0] / w[1]).log2()) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(max: f64) -> ResidualReport {
        let l = Lattice::new(vec![0.0; 2], vec![1.0; 2], vec![5, 5]).unwrap();
        ResidualReport::from_values("c", Sector::Scalar, &l, max, max, 1.0)
    }

    #[test]
    fn orders_from_halving_residuals() {
        let o = observed_orders(&[4e-2, 1e-2, 2.5e-3]);
        assert_eq!(o, vec![Some(2.0), Some(2.0)]);
        assert_eq!(observed_orders(&[1e-15, 0.0, 3e-16]), vec![None, None]);
    }

    #[test]
    fn machine_zero_passes_order_check() {
        let mut r = report(1e-15);
        r.orders = vec![None, None];
        assert!(r.asserted(Some(1e-12), Some(2.0)).passed);
        let mut r = report(1e-3);
        r.orders = vec![None, Some(2.1)];
        assert!(!r.asserted(None, Some(2.0)).passed);
    }

    #[test]
    fn reported_checks_always_pass() {
        let r = report(10.0);
        assert!(r.passed);
        assert!(!r.asserted(Some(1.0), None).passed);
    }

    #[test]
    fn class_mismatch_fails() {
        let mut r = report(0.0);
        r.expected_class = Some(Luminality::Timelike);
        r.classification = Some(Luminality::Spacelike);
        assert!(!r.asserted(None, None).passed);
    }
}
