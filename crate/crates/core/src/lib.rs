//! Exact differential elimination: the Rosenfeld-Gröbner regular
//! decomposition for polynomial PDE systems with `m` commuting derivations,
//! weighted rankings, and the antichain-based order and weight bounds for
//! its output.

pub mod antichain;
pub mod bounds;
pub mod decompose;
pub mod diffpoly;
pub mod error;
pub mod exactnum;
pub mod linearbridge;
pub mod parse;
pub mod ranking;
pub mod reduction;

pub use decompose::{rosenfeld_groebner, DecomposeOptions, Decomposition, RegularSystem};
pub use diffpoly::{DerivativeVar, DiffPoly, Ring, WeightVector};
pub use error::{Error, Result};
pub use exactnum::Rational;
pub use parse::{parse_poly, parse_system, ProblemSpec};
pub use ranking::{TriangularSet, WeightedRanking};
