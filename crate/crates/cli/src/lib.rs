//! Parser, canonical printer and check runner for `.cpair` documents.
//!
//! A document declares charts, pairs, monomial covers, divisorial morphisms,
//! orbifold curves and Chern data, then lists `check` statements. Running a
//! document produces a [`Report`] with one entry per check.

pub mod ast;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod report;

pub use ast::Document;
pub use error::DslError;
pub use eval::{check_text, run, RunOptions};
pub use parser::parse;
pub use printer::format_document;
pub use report::{CheckReport, Field, Report, Status};
