//! Exact symbolic engine for graded symplectic charts, graded Poisson and
//! derived brackets, master equations, algebroid extraction, Berezin
//! integration and Lie algebroid connection calculus.

pub mod algebroid;
pub mod berezin;
pub mod bracket;
pub mod graded;
pub mod linalg;
pub mod model;
pub mod samples;
pub mod structures;
