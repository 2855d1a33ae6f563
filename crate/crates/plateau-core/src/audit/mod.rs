//! The audit engine: energy evaluation plus numerical verification of the
//! equilibrium residuals, the scaling identity, Gauss-Bonnet, the
//! torsion-flux balance on conformal annuli, and the first variation of
//! total geodesic curvature.

mod checks;
mod el;
mod energy;
mod variation;

pub use checks::{gauss_bonnet_check_mesh, gauss_bonnet_check_patch, scaling_identity_check, torsion_flux_check};
pub use el::{el_residuals, ElTolerances};
pub use energy::{energy_eval, EnergyBreakdown, SurfaceDomain};
pub use variation::{geodesic_variation_check, total_geodesic_curvature, VariationField};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One named check: a value against its reference, residuals, tolerance, and
/// the verdict.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CheckRecord {
    pub value: f64,
    pub reference: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Compare a value against a reference at an absolute tolerance.
    pub fn against(value: f64, reference: f64, tolerance: f64) -> Self {
        let abs = (value - reference).abs();
        CheckRecord {
            value,
            reference,
            abs_residual: abs,
            rel_residual: abs / reference.abs().max(1.0),
            tolerance,
            pass: abs <= tolerance,
        }
    }

    /// Relative comparison: pass when |value - reference| <= tol * max(1, |reference|).
    pub fn against_relative(value: f64, reference: f64, tolerance: f64) -> Self {
        let abs = (value - reference).abs();
        let rel = abs / reference.abs().max(1.0);
        CheckRecord {
            value,
            reference,
            abs_residual: abs,
            rel_residual: rel,
            tolerance,
            pass: rel <= tolerance,
        }
    }

    /// A residual that should vanish.
    pub fn residual(residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            value: residual,
            reference: 0.0,
            abs_residual: residual.abs(),
            rel_residual: residual.abs(),
            tolerance,
            pass: residual.abs() <= tolerance,
        }
    }

    /// A quantity that must stay at or above a threshold (convergence orders,
    /// sign margins).
    pub fn at_least(value: f64, threshold: f64) -> Self {
        CheckRecord {
            value,
            reference: threshold,
            abs_residual: (threshold - value).max(0.0),
            rel_residual: (threshold - value).max(0.0) / threshold.abs().max(1.0),
            tolerance: 0.0,
            pass: value >= threshold,
        }
    }

    /// A residual that must exceed a threshold (two-sided controls).
    pub fn must_exceed(value: f64, threshold: f64) -> Self {
        CheckRecord {
            value,
            reference: threshold,
            abs_residual: (threshold - value).max(0.0),
            rel_residual: (threshold - value).max(0.0) / threshold.abs().max(1.0),
            tolerance: 0.0,
            pass: value > threshold,
        }
    }
}

/// Structured residual/invariant report emitted by every verification
/// operation. Keys are stable (sorted) so serialized output is order-stable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: BTreeMap<String, CheckRecord>,
}

impl AuditReport {
    pub fn new() -> Self {
        AuditReport::default()
    }

    pub fn insert(&mut self, name: &str, record: CheckRecord) {
        self.checks.insert(name.to_string(), record);
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.get(name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    /// Merge another report under a key prefix.
    pub fn merge(&mut self, prefix: &str, other: &AuditReport) {
        for (k, v) in &other.checks {
            self.checks.insert(format!("{prefix}{k}"), *v);
        }
    }

    /// CLI exit-code contract: 0 all pass, 1 any fail.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

impl std::fmt::Display for AuditReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<38} {:>14} {:>14} {:>11} {:>9}  {}",
            "check", "value", "reference", "|residual|", "tol", "pass"
        )?;
        for (name, c) in &self.checks {
            writeln!(
                f,
                "{:<38} {:>14.6e} {:>14.6e} {:>11.3e} {:>9.1e}  {}",
                name,
                c.value,
                c.reference,
                c.abs_residual,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_order_stable_and_serializable() {
        let mut r = AuditReport::new();
        r.insert("zeta", CheckRecord::residual(1e-12, 1e-10));
        r.insert("alpha", CheckRecord::against(1.0, 1.0 + 1e-11, 1e-10));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.find("alpha").unwrap() < json.find("zeta").unwrap());
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert!(back.all_pass());
        assert_eq!(back.exit_code(), 0);
    }

    #[test]
    fn failing_check_flips_exit_code() {
        let mut r = AuditReport::new();
        r.insert("bad", CheckRecord::residual(1.0, 1e-10));
        assert!(!r.all_pass());
        assert_eq!(r.exit_code(), 1);
    }
}
