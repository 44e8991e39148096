pub mod degdyn;
pub mod error;
pub mod exec;
pub mod hiprec;
pub mod iterator;
pub mod poly;
pub mod projmap;
pub mod structure;

pub use error::{Error, Result};
pub use poly::{Monomial, Polynomial, RationalScalar};
