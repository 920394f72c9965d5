//! Library surface of the CLI: the corpus and the command implementations,
//! exposed so integration tests can drive them directly.

pub mod commands;
pub mod corpus;

pub use commands::{options_from_env, run, Outcome};
