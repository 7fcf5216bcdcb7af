pub mod clebsch_gordan;
pub mod config;
pub mod error;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod matter;
pub mod link;
pub mod report;
pub mod run;
pub mod spectra;
pub mod verify;
pub mod sparse;

pub use error::{Error, Result};
