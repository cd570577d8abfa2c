//! Canonical resolution of marked ideals over the rationals.

pub mod blowup;
pub mod error;
pub mod groebner;
pub mod ideal;
pub mod invariant;
pub mod marked;
pub mod par;
pub mod parse;
pub mod poly;
pub mod region;
pub mod report;
pub mod resolver;

pub use error::{Error, Result};
pub use groebner::Budget;
pub use ideal::Ideal;
pub use parse::parse_polynomial;
pub use poly::{Monomial, Polynomial, Rational};
