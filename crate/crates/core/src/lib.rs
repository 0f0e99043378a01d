//! Lagrangean computer algebra for Hermitean one-matrix models.

pub mod algebra;
pub mod coupling;
pub mod curve;
pub mod diagram;
pub mod oracle;
pub mod verify;

pub use algebra::{AlgebraError, Expression, Generator, Monomial, PointLabel, Rational};
