pub mod ant;
pub mod cli;
pub mod engine;
pub mod error;
pub mod harness;
pub mod retail;
pub mod team;

pub use error::{Error, Result};
