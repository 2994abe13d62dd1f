//! Command-line front end for the relational G-set engine: file
//! formats for models, interpretations, theories, proofs, and
//! counterpart data, plus the subcommand dispatch.

pub mod cli;
pub mod files;
