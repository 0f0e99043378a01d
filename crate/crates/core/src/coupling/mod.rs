//! Coupling constants `λ^(h)` of the Lagrange density and the combinatorics behind them.

mod multiindex;
mod table;
mod zpoly;

pub use multiindex::{a_factor, count_terms, enumerate_mset, n_index, MultiIndex};
pub use table::{delta_remnant, gradings, max_moment, CouplingTable};
pub use zpoly::{z_poly, z_split};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CouplingError {
    #[error("multi-index {alpha} is not admissible at order {h}")]
    Admissibility { h: u32, alpha: MultiIndex },
    #[error("coupling of order {0} has not been computed")]
    MissingOrder(u32),
    #[error("the loop equation determines orders h >= 2 only (got {0})")]
    OrderTooLow(u32),
    #[error("term {0} would integrate to a logarithm")]
    DivisionByZeroGuard(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
