//! Exact simulator of the QBC1 quantum bit-commitment protocol.

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod protocol;
pub mod qlin;

pub use error::{Error, Result};
