//! Front end for `tropical-core`: matrix files in, JSON reports out.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{run, Outcome};
pub use input::{emit_plain, parse_matrix, parse_vector, Format, ParseError, Semiring};
