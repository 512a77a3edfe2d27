//! Desk-scale laboratory for slice-rank covers of diagonal polynomial
//! equations over rings of truncated polynomials.
//!
//! The pipeline: [`encoding`] turns a diagonal equation over F_q[t] into a
//! vector of multivariate coordinate polynomials, [`slicerank`] builds the
//! indicator polynomial of its zero set and covers it slot by slot,
//! [`counting`] prices the cover against exact monomial counts and a
//! concentration bound, and [`search`] brute-forces small instances to keep
//! everything honest.

pub mod algebra;
pub mod budget;
pub mod counting;
pub mod encoding;
pub mod error;
pub mod search;
pub mod slicerank;

pub use algebra::field::{Elem, Field};
pub use algebra::multipoly::{Monomial, MultiPoly};
pub use algebra::unipoly::UniPoly;
pub use budget::Budget;
pub use error::{Error, Result};
