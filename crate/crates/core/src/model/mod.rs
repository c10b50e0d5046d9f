//! Model files: a small text format declaring a chart, structure data and a
//! list of checks, plus the runner and report writers behind the CLI.
//!
//! ```text
//! chart degree 1
//! coords x[1..3]:0 xi[1..3]:1
//! pair x[i] <-> xi[i]
//! symbol pi^2_0 antisymmetric
//! theta = sum(i in 1..3) sum(j in 1..3) 1/2*pi[i,j]*xi[i]*xi[j]
//! check master
//! ```

mod ast;
mod checks;
mod lexer;
mod parser;
mod report;
mod resolve;

use thiserror::Error;

use crate::algebroid::GeometryError;
use crate::berezin::BerezinError;
use crate::bracket::BracketError;
use crate::graded::GradedError;
use crate::structures::StructureError;

pub use ast::{BindTarget, CoordDecl, DataKind, DerivTarget, Expr, Index, ModelFile, Span, Stmt, StmtKind};
pub use checks::{check_names, run_checks, CheckInfo, CheckResult, Report, RunOptions, CHECKS};
pub use parser::{parse_expr, parse_model};
pub use report::{conventions, emit_json, emit_text, ENGINE};
pub use resolve::{resolve, resolve_source, CheckSpec, Model};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: undeclared identifier `{name}`")]
    Undeclared { name: String, span: Span },
    #[error("{span}: degree mismatch: {msg}")]
    DegreeMismatch { msg: String, span: Span },
    #[error("{span}: index {index} of `{name}` is outside {lo}..{hi}")]
    IndexOutOfRange { name: String, index: i64, lo: i64, hi: i64, span: Span },
    #[error("{span}: {msg}")]
    Invalid { msg: String, span: Span },
    #[error("{span}: {source}")]
    Graded { source: GradedError, span: Span },
    #[error("{span}: {source}")]
    Bracket { source: BracketError, span: Span },
    #[error("{span}: {source}")]
    Structure { source: StructureError, span: Span },
    #[error("{span}: {source}")]
    Geometry { source: GeometryError, span: Span },
    #[error("{span}: {source}")]
    Berezin { source: BerezinError, span: Span },
}

impl ModelError {
    pub fn span(&self) -> Span {
        match self {
            ModelError::Syntax { span, .. }
            | ModelError::Undeclared { span, .. }
            | ModelError::DegreeMismatch { span, .. }
            | ModelError::IndexOutOfRange { span, .. }
            | ModelError::Invalid { span, .. }
            | ModelError::Graded { span, .. }
            | ModelError::Bracket { span, .. }
            | ModelError::Structure { span, .. }
            | ModelError::Geometry { span, .. }
            | ModelError::Berezin { span, .. } => *span,
        }
    }

    pub(crate) fn invalid(span: Span, msg: impl Into<String>) -> Self {
        ModelError::Invalid { msg: msg.into(), span }
    }
}

/// Attaches a source location to an engine error.
pub(crate) trait At<T> {
    fn at(self, span: Span) -> Result<T, ModelError>;
}

macro_rules! at_impl {
    ($err:ty, $variant:ident) => {
        impl<T> At<T> for Result<T, $err> {
            fn at(self, span: Span) -> Result<T, ModelError> {
                self.map_err(|source| ModelError::$variant { source, span })
            }
        }
    };
}

at_impl!(GradedError, Graded);
at_impl!(BracketError, Bracket);
at_impl!(StructureError, Structure);
at_impl!(GeometryError, Geometry);
at_impl!(BerezinError, Berezin);
