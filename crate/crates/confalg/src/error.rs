//! Error type shared by every module of the crate.
//!
//! All fallible operations return [`Result`].  Errors are input errors in the
//! broad sense (malformed data, mismatched registries or modules, violated
//! preconditions); a *failed check* is never an error — checks report their
//! verdict through a report value instead.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating objects.
#[derive(Debug, Error)]
pub enum Error {
    /// A polynomial text form failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// A name was not found in the variable registry.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// A reserved variable name was declared as a parameter.
    #[error("`{0}` is a reserved variable name and cannot be declared as a parameter")]
    ReservedName(String),

    /// Two values built over different variable registries were combined.
    #[error("variable registries do not match ({0})")]
    RegistryMismatch(String),

    /// A substitution tried to bind a variable that may not be bound.
    #[error("variable `{0}` has role {1} and cannot be substituted here")]
    BadSubstitution(String, String),

    /// A lambda variable was required but the pool is exhausted or the
    /// requested variable is already live in an operand.
    #[error("lambda variable conflict: {0}")]
    LambdaConflict(String),

    /// Basis names, ranks, or modules do not line up.
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    /// An unknown basis name was referenced.
    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),

    /// An operation name is missing from a structure.
    #[error("structure has no operation `{0}`")]
    MissingOperation(String),

    /// A structure of a different kind was expected.
    #[error("wrong structure kind: expected {expected}, found {found}")]
    WrongKind { expected: String, found: String },

    /// A polynomial used variables that are not allowed in its context.
    #[error("variable `{0}` is not allowed in {1}")]
    DisallowedVariable(String, String),

    /// A degree cap was exceeded.
    #[error("degree {found} exceeds the configured bound {bound} for {what}")]
    DegreeTooLarge { what: String, found: usize, bound: usize },

    /// A map that must be invertible is not.
    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    /// A construction was asked for an input that fails its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A grid enumeration would exceed its point cap.
    #[error("grid enumeration of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: u128, cap: u128 },

    /// Malformed definition data (CLI file contents and similar).
    #[error("invalid definition: {0}")]
    InvalidDefinition(String),
}
