//! Script language and command front end.

pub mod ast;
mod cursor;
pub mod expr;
pub mod parser;
pub mod runner;

pub use ast::{render, Script, Statement, StmtKind};
pub use cursor::Pos;
pub use parser::{parse, Scope};
pub use runner::{document, run, Output, RunError, Runner};
