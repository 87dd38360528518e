//! Command layer: expression parsing, verification suites, and the
//! drivers behind each subcommand of the `starprod` binary.

pub mod commands;
pub mod parse;
pub mod suites;

pub use commands::{
    cmd_bench, cmd_coeff, cmd_eval, cmd_verify, BenchCutoff, BenchReport, CliError, EvalReport,
    OutputFormat, RunConfig, MAX_STAR_ORDER, MAX_TABLE_ORDER,
};
pub use parse::{parse_expr, ParseError};
pub use suites::{
    four_route_agreement, suite_bracket, suite_fock, suite_geometry, suite_hs_residual,
    suite_i_independence, suite_recurrence, suite_residuals, suite_star_axioms, SuiteReport,
};
