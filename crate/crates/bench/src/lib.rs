//! Shared workloads for the criterion benchmarks.

use hhverify::{CheckConfig, Interval, Subject};

/// The three instantiating functions and a handful of generated shapes.
pub const FUNCTIONS: &[&str] = &[
    "1/x",
    "x^3",
    "-ln(x)",
    "0.8*x^4 + 1.3*exp(0.45*x) - 0.2*x + 1",
    "1.1*x*ln(x) + 0.3*x",
];

pub fn subjects() -> Vec<Subject> {
    FUNCTIONS
        .iter()
        .map(|s| Subject::parse(s).expect("bench function parses"))
        .collect()
}

pub fn unit_interval() -> Interval {
    Interval::new(1.0, 2.0).expect("valid interval")
}

pub fn wide_interval() -> Interval {
    Interval::new(0.1, 10.0).expect("valid interval")
}

pub fn config() -> CheckConfig {
    CheckConfig::default()
}
