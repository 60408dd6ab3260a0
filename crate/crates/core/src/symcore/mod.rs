//! Exact sparse polynomials and rational functions over the rationals.

pub mod factored;
pub mod gcd;
mod kernel;
mod mgcd;
pub mod modp;
pub mod mono;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod render;
pub mod resultant;
pub mod scalar;
pub mod squarefree;
pub mod subst;
pub mod varset;

pub use gcd::gcd;
pub use parse::{parse_poly, parse_ratfunc};
pub use poly::{Poly, Term};
pub use ratfunc::{PoleSignal, RatFunc};
pub use resultant::resultant;
pub use scalar::Scalar;
pub use squarefree::{squarefree, squarefree_part};
pub use subst::{substitute, substitute_cleared, substitute_named};
pub use varset::VarSet;
