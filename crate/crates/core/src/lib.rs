//! A batch proof checker for a dependent type theory with an impredicative
//! `Prop`, cumulative universes whose levels are always inferred, and
//! parameterized inductive types and records.
//!
//! Source files are checked command by command. Universe levels are never
//! written by the user: every `Type` gets a fresh level, typing records
//! constraints between levels, and a command is rejected when the
//! accumulated constraints stop being satisfiable.

pub mod corpus;
pub mod driver;
pub mod kernel;
pub mod reduce;
pub mod report;
pub mod syntax;
pub mod term;
pub mod universe;

pub use driver::{check_files, Options, Session};
pub use report::{FileReport, Status};
