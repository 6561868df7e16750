//! Check reports: one row per inequality instance, with margins, assembled
//! tolerances, and provenance of both sides.

use serde::{Deserialize, Serialize};

/// Where a side of an inequality came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "grid")]
    Grid,
    #[serde(rename = "mc")]
    Mc,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::ClosedForm => write!(f, "closed-form"),
            Provenance::Grid => write!(f, "grid"),
            Provenance::Mc => write!(f, "mc"),
        }
    }
}

/// Result of one `lhs <= rhs` check. `margin = rhs - lhs`, and the check
/// passes iff `margin >= -tolerance`, where the tolerance is assembled from
/// the grid budget plus three combined Monte Carlo standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub lhs_provenance: Provenance,
    pub rhs_provenance: Provenance,
    pub seed: u64,
    pub runtime_ms: u64,
    /// Number of points/balls, for geometry checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Combined Monte Carlo standard error of the two sides.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

impl CheckReport {
    /// Report for a claim of the form `lhs <= rhs`.
    pub fn le_check(
        theorem_id: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        lhs_provenance: Provenance,
        rhs_provenance: Provenance,
        seed: u64,
    ) -> Self {
        let margin = rhs - lhs;
        CheckReport {
            theorem_id: theorem_id.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
            lhs_provenance,
            rhs_provenance,
            seed,
            runtime_ms: 0,
            k: None,
            dim: None,
            stderr: None,
            samples: None,
        }
    }

    pub fn with_geometry(mut self, k: usize, dim: usize, stderr: f64, samples: u64) -> Self {
        self.k = Some(k);
        self.dim = Some(dim);
        self.stderr = Some(stderr);
        self.samples = Some(samples);
        self
    }

    pub fn with_runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }

    /// Fixed-column CSV row (no header):
    /// `theorem_id,lhs,rhs,margin,tolerance,pass,lhs_provenance,rhs_provenance,seed,runtime_ms`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.theorem_id,
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance,
            self.pass,
            self.lhs_provenance,
            self.rhs_provenance,
            self.seed,
            self.runtime_ms
        )
    }

    /// CSV row without the runtime column; two runs with the same seed must
    /// agree byte-for-byte on this form.
    pub fn csv_row_stable(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.theorem_id,
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance,
            self.pass,
            self.lhs_provenance,
            self.rhs_provenance,
            self.seed
        )
    }

    /// Geometry-check CSV row:
    /// `theorem_id,k,d,lhs,rhs,margin,stderr,samples,seed,pass`.
    pub fn csv_row_geometry(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.theorem_id,
            self.k.map(|v| v.to_string()).unwrap_or_default(),
            self.dim.map(|v| v.to_string()).unwrap_or_default(),
            self.lhs,
            self.rhs,
            self.margin,
            self.stderr.map(|v| v.to_string()).unwrap_or_default(),
            self.samples.map(|v| v.to_string()).unwrap_or_default(),
            self.seed,
            self.pass
        )
    }
}

pub const CSV_HEADER: &str =
    "theorem_id,lhs,rhs,margin,tolerance,pass,lhs_provenance,rhs_provenance,seed,runtime_ms";
pub const CSV_HEADER_GEOMETRY: &str = "theorem_id,k,d,lhs,rhs,margin,stderr,samples,seed,pass";

pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn to_csv_geometry(reports: &[CheckReport]) -> String {
    let mut s = String::from(CSV_HEADER_GEOMETRY);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row_geometry());
        s.push('\n');
    }
    s
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_margin_and_tolerance() {
        let ok = CheckReport::le_check("x", 1.0, 1.5, 0.1, Provenance::Grid, Provenance::Grid, 7);
        assert!(ok.pass);
        assert!((ok.margin - 0.5).abs() < 1e-15);
        let tight = CheckReport::le_check(
            "x",
            1.0,
            0.95,
            0.1,
            Provenance::ClosedForm,
            Provenance::Mc,
            7,
        );
        assert!(tight.pass, "within tolerance");
        let fail =
            CheckReport::le_check("x", 1.0, 0.5, 0.1, Provenance::Mc, Provenance::Mc, 7);
        assert!(!fail.pass);
    }

    #[test]
    fn csv_rows_have_fixed_columns() {
        let r = CheckReport::le_check("id-1", 0.25, 0.5, 0.01, Provenance::Mc, Provenance::Mc, 3)
            .with_geometry(5, 2, 0.001, 1_000_000)
            .with_runtime(12);
        assert_eq!(r.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(
            r.csv_row_geometry().split(',').count(),
            CSV_HEADER_GEOMETRY.split(',').count()
        );
        // Stable row drops only the runtime column.
        assert!(r.csv_row().starts_with(&r.csv_row_stable()));
    }
}
