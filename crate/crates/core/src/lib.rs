//! Numerical verification of Hermite-Hadamard type inequalities.
//!
//! The crate evaluates the midpoint/endpoint deviation functional
//!
//! ```text
//! D(f) = 1/(b-a) ∫_a^b f + (a f(b) - b f(a)) / (2(b-a)) - f((a+b)/2) / 2
//! ```
//!
//! for smooth functions given as text expressions, checks the integral
//! identity that rewrites `D(f)` as a pair of weighted integrals of `f'`,
//! and compares `|D(f)|` against three upper bounds derived from that
//! identity. Four classical bounds on the trapezoid deviation are evaluated
//! alongside for comparison.
//!
//! Modules, bottom-up:
//!
//! * [`expr`]: expression parser, evaluator, symbolic derivative and the
//!   midpoint-chord convexity test.
//! * [`means`]: the special means of two positive numbers.
//! * [`quad`]: adaptive Gauss-Kronrod integration, the reference oracle for
//!   every integral.
//! * [`hh`]: deviation functionals and the seven bounds.
//! * [`props`]: special-means instances of the bounds, printed vs derived.
//! * [`verify`]: seeded corpus generation and the full inequality suite.

pub mod error;
pub mod expr;
pub mod hh;
pub mod means;
pub mod props;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{check_shape, EvalError, FuncExpr, ParseError, ShapeMode, ShapeReport};
pub use hh::{
    BoundEntry, BoundKind, BoundParams, BoundReport, BoundRequest, CheckConfig, Estimate,
    HadamardReport, Subject, Verdict,
};
pub use means::{gen_log, mean_set, Interval, MeanSet};
pub use props::{prop_sweep, proposition, PropParams, PropReport, PropSweep};

pub use quad::{integrate, Integrand, QuadConfig, QuadResult, WeightedIntegrand};
pub use verify::{gen_corpus, run_suite, Corpus, CorpusCase, SuiteConfig, SuiteReport};

/// Version string embedded in every serialized report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
