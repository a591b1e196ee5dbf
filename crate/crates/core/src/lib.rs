pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod floercheck;
pub mod indices;
pub mod linalg;
pub mod orbits;
pub mod planning;
pub mod quadform;
pub mod smooth;
pub mod taming;

pub use error::{Error, Result};
