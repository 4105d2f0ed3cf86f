//! Structured results of the verification checks.
//!
//! Every verification routine returns a [`VerificationReport`]: which check
//! ran, on what parameters, whether it passed, the numeric witnesses that
//! justify the verdict, and the tolerances it was judged against. Maps are
//! ordered so that serialized reports are byte-stable across runs; the wall
//! time is the one field that varies between otherwise identical runs.

use std::collections::BTreeMap;
use std::time::Instant;

/// Outcome of one numeric check.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerificationReport {
    /// Stable identifier of the check, e.g. `"rays-minimize-perimeter"`.
    pub check_id: String,
    /// Input parameters the check ran on (variance, mass, ...).
    pub parameters: BTreeMap<String, f64>,
    /// Whether every assertion of the check held.
    pub passed: bool,
    /// Numeric evidence: margins, extrema, constructed points, or a
    /// counterexample when `passed` is false.
    pub witnesses: BTreeMap<String, serde_json::Value>,
    /// Tolerances the assertions used, keyed by assertion name.
    pub tolerances: BTreeMap<String, f64>,
    /// Elapsed time of the check in milliseconds.
    pub wall_time_ms: f64,
}

impl VerificationReport {
    pub fn new(check_id: &str) -> VerificationReport {
        VerificationReport {
            check_id: check_id.to_string(),
            parameters: BTreeMap::new(),
            passed: false,
            witnesses: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            wall_time_ms: 0.0,
        }
    }

    pub fn parameter(mut self, name: &str, value: f64) -> VerificationReport {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> VerificationReport {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn witness(mut self, name: &str, value: f64) -> VerificationReport {
        self.witnesses
            .insert(name.to_string(), serde_json::json!(value));
        self
    }

    pub fn witness_value(mut self, name: &str, value: serde_json::Value) -> VerificationReport {
        self.witnesses.insert(name.to_string(), value);
        self
    }

    pub fn witness_points(mut self, name: &str, values: &[f64]) -> VerificationReport {
        self.witnesses
            .insert(name.to_string(), serde_json::json!(values));
        self
    }

    pub fn pass(mut self, passed: bool) -> VerificationReport {
        self.passed = passed;
        self
    }

    /// Records elapsed time since `start`.
    pub fn timed(mut self, start: Instant) -> VerificationReport {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }
}

/// Formats a number with 17 significant digits, enough to reproduce the
/// exact binary value when parsed back.
pub fn format_sig17(value: f64) -> String {
    format!("{value:.16e}")
}

#[cfg(test)]
mod tests {
    use super::{format_sig17, VerificationReport};

    #[test]
    fn seventeen_digit_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 6.02e23, 0.0] {
            assert_eq!(format_sig17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn builds_and_serializes_deterministically() {
        let build = || {
            VerificationReport::new("example-check")
                .parameter("a2", 0.5)
                .parameter("mass", 0.25)
                .tolerance("margin", 1e-9)
                .witness("gap", 0.125)
                .witness_points("points", &[0.1, 0.7])
                .pass(true)
        };
        let a = serde_json::to_string(&build()).unwrap();
        let b = serde_json::to_string(&build()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"check_id\":\"example-check\""));
        assert!(a.contains("\"passed\":true"));

        let parsed: VerificationReport = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed, build());
    }

    #[test]
    fn timing_is_nonnegative() {
        let start = std::time::Instant::now();
        let r = VerificationReport::new("t").timed(start);
        assert!(r.wall_time_ms >= 0.0);
    }
}
