pub mod arith;
pub mod error;
pub mod padic;
pub mod characters;
pub mod bernoulli;
pub mod gaussjacobi;
pub mod lvalues;
pub mod lambda;
pub mod harness;
pub mod validate;

pub use error::{Error, Result};
