//! Spec-file driven verification pipeline over the `gradsym` library.

pub mod pipeline;
pub mod report;
pub mod spec;

pub use pipeline::run;
pub use report::{emit_report, Report, Row, Status};
pub use spec::{parse_spec, RunSpec, SpecError, SpecErrors, Stage, Target};
