//! Standard example data and seeded random generators.

mod random;

pub use random::{random_function, random_polynomial, PolyShape};
