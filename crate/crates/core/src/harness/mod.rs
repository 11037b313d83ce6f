//! Command line entry point, statistics CSV, and test oracles.

mod cli;
mod generate;
mod oracle;
mod record;

pub use cli::{cli_main, run_cli, EXIT_ERROR, EXIT_SAT, EXIT_UNKNOWN, EXIT_UNSAT};
pub use generate::{gen_random_3sat, phase_transition_clauses, PHASE_TRANSITION_RATIO};
pub use oracle::{brute_force, implied, pigeonhole, verify_model, OracleError, MAX_BRUTE_FORCE_VARS};
pub use record::{
    csv_header, emit_csv, emit_csv_string, read_csv, read_csv_file, write_csv, CsvError, RunRecord,
};
