//! Exact symbolic workbench for finite free conformal algebras.
//!
//! A finite free conformal algebra here is a free `C[d]`-module of finite rank
//! equipped with one or more lambda-products given on basis elements by
//! polynomial tables `e_i o_lm e_j = sum_k P_ijk(lm, d) e_k`.  Everything else
//! (products of arbitrary elements, axiom checks, operator identities, tensor
//! equations) is obtained from the tables by conformal sesquilinearity:
//!
//! ```text
//! (d a) o_lm b = -lm (a o_lm b)        a o_lm (d b) = (d + lm)(a o_lm b)
//! ```
//!
//! All arithmetic is exact over the rationals; there are no floats and no
//! tolerances anywhere.  Every value is an immutable piece of data, every
//! operation is a pure function, and polynomial canonical forms make equality
//! checks and printed output deterministic down to the byte.
//!
//! Module layout:
//!
//! * [`polyring`] — sparse multivariate polynomials over Q with role-tagged
//!   variables (derivation slots, lambda pool, free parameters), affine
//!   substitution, and a small text grammar.
//! * [`calgebra`] — free modules, elements, lambda-product tables, structure
//!   kinds (Lie / left-symmetric / associative / dendriform / L-dendriform /
//!   quadri), axiom checking, and structure conversions.
//! * [`bimodule`] — conformal bimodules over left-symmetric structures,
//!   adjoint and dual constructions, semidirect products, bilinear forms,
//!   cocycles, and the pseudo-Hessian construction.
//! * [`operators`] — d-linear maps and the operator identities: O-operators,
//!   Rota-Baxter and Nijenhuis operators, graph/lift characterizations,
//!   induced L-dendriform structures, and compatibility checks.
//! * [`sequation`] — two- and three-slot tensors, the double-bracket
//!   computation, and the tensor form of the operator correspondence.
//! * [`search`] — polynomial ansatz, constraint-system extraction, family
//!   verification, and exhaustive grid enumeration.
//! * [`catalog`] — ready-made example structures, operators, and forms used by
//!   the test suites and mirrored by the JSON corpus of the CLI crate.

pub mod bimodule;
pub mod calgebra;
pub mod catalog;
pub mod error;
pub mod operators;
pub mod polyring;
pub mod search;
pub mod sequation;

pub use error::{Error, Result};
