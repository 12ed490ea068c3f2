//! A small closed-form expression language for surfaces and lifts.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! surface := '(' expr (',' expr)+ ')'
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := base ('^' integer)?
//! base    := number | 'u' | 'v' | func '(' expr ')' | '(' expr ')' | '-' base
//! func    := sin | cos | exp | sqrt | neg
//! ```
//!
//! Exponents are restricted to integers so that jet evaluation of
//! polynomial expressions stays exact. Parse errors carry the byte offset
//! and the expected-token set; evaluation errors name the offending
//! subtree.

mod ast;
mod builtins;
mod eval;
mod parser;

pub use ast::{BinOp, Expr, Func, SurfaceExpr};
pub use builtins::{builtin, builtin_names, BuiltinSurface};
pub use parser::parse;
