pub mod analysis;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod optimizer;
pub mod problems;
pub mod pulse;
pub mod qcore;
pub mod trainer;

pub use error::{Error, Result};
