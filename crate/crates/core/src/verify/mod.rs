//! Verification harness: each check computes both sides of an identity,
//! one through characteristic classes and one through an independent
//! oracle, and reports whether they agree exactly.

pub mod checks;
pub mod grid;
pub mod oracle;
pub mod report;
pub mod scenario;

pub use checks::*;
pub use oracle::{binomial_poly, euler_char_oracle, koszul_class, section_trace_oracle};
pub use report::{Outcome, Report, Summary};
pub use scenario::{evaluate, parse_document, parse_scenario, run_all, run_until_failure, Scenario, ScenarioEntry};
