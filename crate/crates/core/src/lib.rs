pub mod error;
pub mod cli;
pub mod conditions;
pub mod envelope;
pub mod oracle;
pub mod phi_core;

pub use error::{Error, Result};
