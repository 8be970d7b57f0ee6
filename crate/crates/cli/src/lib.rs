//! Command-line front end for the walk-on-spheres solver: configuration,
//! the expression language for `f` and `g`, and the experiments.

pub mod app;
pub mod catalog;
pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod fields;
pub mod table;

pub use config::{Config, RunConfig};
pub use error::CliError;
pub use expr::{parse_expr, Expr, ExprError};
pub use table::Table;
