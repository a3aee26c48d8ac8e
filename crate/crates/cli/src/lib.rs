//! Command-line front end for the `hecke` library: series expansion,
//! closed-form `U_n` transforms, eigenfunction analysis, multiplicativity
//! classification and seeded verification suites.

pub mod commands;
pub mod rng;
pub mod verify;

pub use commands::{CliError, Format, Mode, Outcome};
