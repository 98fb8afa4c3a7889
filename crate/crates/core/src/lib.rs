pub mod analysis;
pub mod cli;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod fespace;
pub mod mesh;
pub mod scenarios;
pub mod sparse;
pub mod timestepper;

pub use error::{Error, Result};
