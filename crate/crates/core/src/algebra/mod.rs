//! Exact symbolic layer: generators, monomials and rational-coefficient expressions.

mod expression;
mod generator;
mod monomial;
mod render;

pub use expression::{rat, rational_to_f64, Expression};
pub use generator::{Generator, PointLabel};
pub use monomial::Monomial;
pub use render::TermJson;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("product would contain (log y1)^2")]
    LogDegree,
    #[error("unbound generators: {}", .0.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))]
    UnboundGenerator(Vec<Generator>),
    #[error("loop insertion is undefined on {0}")]
    NotInsertable(Generator),
    #[error("parse error: {0}")]
    Parse(String),
}
