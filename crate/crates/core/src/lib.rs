pub mod error;
pub mod cli;
pub mod fitting;
pub mod io;
pub mod mixture;
pub mod model;
pub mod montecarlo;
pub mod poisson;
pub mod solver;

pub use error::{Error, Result};
