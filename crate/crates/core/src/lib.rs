//! Portfolio CDCL SAT solving with learned clause vivification strategies.
//!
//! Each worker runs a sequential [`cdcl::Engine`]; a [`strategy::Strategy`]
//! decides when learned clauses are vivified and how results travel through
//! the [`exchange`]. [`portfolio::run`] ties the workers together.

pub mod cdcl;
pub mod exchange;
pub mod formula;
pub mod harness;
pub mod portfolio;
pub mod stats;
pub mod strategy;
pub mod vivify;

pub use cdcl::{Budget, Engine, EngineConfig, SolveStatus};
pub use formula::{parse_dimacs, Clause, Formula, Lit, ParseError, Var};
pub use portfolio::{run, PortfolioConfig, PortfolioError, PortfolioResult};
pub use stats::Stats;
pub use strategy::LcmMode;
