//! Machine-readable residual reports shared by the verification driver and
//! the command-line front end.

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

/// Outcome of a single named residual check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    /// Grassmann monomial carrying the worst coefficient, `1` for the body.
    pub worst_monomial: String,
    /// Jet index `(m, n)` of the worst coefficient within that monomial.
    #[serde(default)]
    pub worst_jet_index: [usize; 2],
    /// Base point of the worst residual, `[re(x+), im(x+), re(x-), im(x-)]`.
    pub worst_point: [f64; 4],
    pub pass: bool,
}

impl CheckResult {
    pub fn passing(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            max_residual: 0.0,
            worst_monomial: "1".to_string(),
            worst_jet_index: [0, 0],
            worst_point: [0.0; 4],
            pass: true,
        }
    }
}

/// Structured record of a printed-formula inconsistency: the stored family
/// fails one of its defining identities and the record names the failing
/// equation, the leading residual monomial and, when a one-parameter scan
/// finds one, the minimal parameter change restoring residual zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Discrepancy {
    pub family: String,
    pub check: String,
    pub residual: f64,
    pub leading_monomial: String,
    pub suggested_fix: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub mode: String,
    pub per_check: Vec<CheckResult>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Report {
    pub fn new(mode: &str) -> Self {
        Report {
            version: REPORT_VERSION,
            mode: mode.to_string(),
            per_check: Vec::new(),
            discrepancies: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.per_check.iter().all(|c| c.pass) && self.discrepancies.is_empty()
    }

    /// Overall verdict treating discrepancy records as structured failures.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_round_trip() {
        let mut r = Report::new("susy-gc");
        r.per_check.push(CheckResult {
            name: "gc-iii".into(),
            max_residual: 2.5e-12,
            worst_monomial: "xi1^th+".into(),
            worst_jet_index: [1, 0],
            worst_point: [0.5, 0.0, -0.25, 0.0],
            pass: true,
        });
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.version, REPORT_VERSION);
        assert_eq!(back.per_check.len(), 1);
        assert!(back.pass());
        assert_eq!(back.exit_code(), 0);
    }

    #[test]
    fn discrepancy_forces_failure_exit() {
        let mut r = Report::new("catalog");
        r.per_check.push(CheckResult::passing("gc-i"));
        r.discrepancies.push(Discrepancy {
            family: "l39".into(),
            check: "gc-iv".into(),
            residual: 1.0,
            leading_monomial: "xi1^xi4^th+".into(),
            suggested_fix: Some("set l0 = 0".into()),
        });
        assert!(!r.pass());
        assert_eq!(r.exit_code(), 1);
    }
}
