//! Configuration files and the commands behind the `orlicz` binary.

pub mod config;
pub mod fields;
pub mod run;

pub use config::{AnalysisConfig, BallGenerator, FieldSpec, JensenSpec, NormSpec};
pub use fields::RandomFields;
pub use run::{cmd_chain, cmd_check, cmd_envelope, cmd_jensen, cmd_norm, write_outputs, CheckName, Outcome};
