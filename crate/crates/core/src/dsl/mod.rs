//! The textual modelling language: parser and canonical formatter.

mod format;
mod parse;

pub use format::format_model;
pub use parse::parse_model;
