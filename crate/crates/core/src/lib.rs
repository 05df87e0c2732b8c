//! Exact calculus of Weil algebras and infinitesimal objects.

pub mod algebra;
pub mod diagrams;
pub mod tangent;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod object;
pub mod point;
pub mod poly;
pub mod random;
pub mod report;
pub mod runner;
pub mod script;
pub mod suite;

pub use algebra::{AlgebraHom, Element, WeilAlgebra, WeilElement};
pub use error::{Error, Result};
pub use object::{combine_maps, compose_maps, InfinitesimalMap, InfinitesimalObject};
pub use poly::{Monomial, Polynomial, Rational};
