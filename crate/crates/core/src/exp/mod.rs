//! Experiment drivers, CSV tables and the verification suite.

mod config;
mod figures;
mod suites;

pub use config::{ExperimentSpec, PolicyName};
pub use figures::{
    fig2, fig3_4, fig6, queue_sweep, Fig34Config, Fig34Result, Fig34Row, Fig6Case, Fig6Config,
    Fig6Result, Fig6Row, QueueRow, SweepAxis,
};
pub use suites::{
    certificate_suite, delta_checks, factor_checks, fixed_point_checks, negative_control,
    occupancy_checks, policy_suite, queue_shape_checks, queue_sim_suite, spp_gap_suite,
    verify_all, CertificateSuiteConfig, PolicyRecord, PolicySuiteConfig, PolicySuiteResult,
    QueueSimConfig, QueueSimRecord, VerifyScale,
};

use std::fmt;

use serde::Serialize;

/// Outcome of one named property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<44} {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

/// Writes `# freshnet-csv v1 <name>` followed by the rows as CSV.
pub fn write_table<W: std::io::Write, T: Serialize>(
    mut out: W,
    name: &str,
    rows: &[T],
) -> crate::Result<()> {
    writeln!(out, "# {} {name}", crate::sim::CSV_VERSION)?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
