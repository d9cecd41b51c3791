//! Stable graphs, the tropical moduli complex and the commutative graph complex.

pub mod canonical;
pub mod exactla;
pub mod error;
pub mod graphcomplex;
pub mod graphs;
pub mod growth;
pub mod symdelta;

pub use error::{Error, Result};
