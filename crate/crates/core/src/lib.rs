//! Numerical classification of almost contact metric structures on a
//! coordinate chart.
//!
//! A structure `(φ, ξ, η, g)` is given by closed-form coordinate
//! expressions. Derivatives come from forward-mode jets, so every
//! quantity (Levi-Civita connection, Nijenhuis-type tensors, Lie
//! derivatives) is exact up to floating-point rounding. Conditions are
//! decided by sup-norm residuals over a seeded sample of points and
//! tangent vectors.

pub mod catalog;
pub mod classify;
pub mod cone;
pub mod dsl;
pub mod error;
pub mod expr;
pub mod jet;
pub mod kernel;
pub mod report;
pub mod residual;
pub mod search;
pub mod sampling;
pub mod structure;

pub use error::{Error, ParseError, ParseErrorKind, Result};
