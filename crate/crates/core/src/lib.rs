pub mod circuit;
pub mod clifford;
pub mod dense;
pub mod enumeration;
pub mod error;
pub mod gf2;
pub mod rng;
pub mod stabilizer;
pub mod walls;

pub use error::{Error, Result};
