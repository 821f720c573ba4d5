pub mod deformed;
pub mod error;
pub mod functionals;
pub mod inequalities;
pub mod linalg;
pub mod record;
pub mod suite;
pub mod variational;

pub use error::{Error, Result};
