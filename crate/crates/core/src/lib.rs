pub mod error;
pub mod specfun;
pub mod solops;
pub mod spectral;
pub mod delaysolver;
pub mod analysis;

pub use error::{Error, Result};
