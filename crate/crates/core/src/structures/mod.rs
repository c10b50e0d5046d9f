//! Geometry read off from QP data of degree 1 and 2: Poisson bivectors,
//! Lie algebroids, Courant algebroids, and their twisted versions.

mod base;
mod courant;
mod lie;
mod poisson;

use thiserror::Error;

use crate::bracket::BracketError;
use crate::graded::GradedError;

pub use base::{is_body, Base};

#[cfg(test)]
pub(crate) use base::permutation_sign;
pub use courant::{CourantData, PreCourantData, Sampling, AXIOM_LABELS};
pub use lie::LieAlgebroidData;
pub use poisson::{solve_twist_scale, PoissonData, TwistScale, TwistedPoissonData};


#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("{0}")]
    Shape(String),
    #[error("`{0}` is not antisymmetric")]
    NotAntisymmetric(String),
    #[error("form is not closed: {0} does not vanish")]
    NotClosed(String),
    #[error("structure function must depend on degree-0 coordinates only: {0}")]
    NotBody(String),
}

#[cfg(test)]
mod tests;
