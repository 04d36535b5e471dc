//! One module per subcommand; each builds a [`crate::report::Report`] (or,
//! for `derive`, a definition file) from parsed arguments.

pub mod check;
pub mod derive;
pub mod operator;
pub mod search;
pub mod sequation;
