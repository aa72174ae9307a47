pub mod bundlemaps;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod hamilton;
pub mod linalg;
pub mod poisson;
pub mod random;
pub mod scalar;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
