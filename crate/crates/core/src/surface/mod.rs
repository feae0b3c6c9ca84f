//! Concrete syntax for `.capless` files.

pub mod ast;
pub mod diagnostic;
pub mod lexer;
pub mod parser;
pub mod print;
pub mod resolve;

pub use ast::SurfaceProgram;
pub use diagnostic::{Diagnostic, DiagnosticRecord, Severity, Span};
pub use parser::{parse, parse_exist_type};
pub use print::{
    print_bound_in, print_captures_in, print_exist_type, print_exist_type_in, print_shape_in,
    print_term, print_term_in, print_type_in, PrintScope,
};
pub use resolve::{resolve, resolve_exist_type};

/// Parses and resolves in one go.
pub fn parse_term(source: &str) -> Result<(SurfaceProgram, crate::syntax::Term), Vec<Diagnostic>> {
    let program = parse(source)?;
    let term = resolve(&program)?;
    Ok((program, term))
}
