use std::fmt::{self, Write as _};

use crate::graded::{IndexGroup, Rational, Symmetry};

/// 1-based source position. Spans never take part in AST equality, so a
/// printed and reparsed model compares equal to the original.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelFile {
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordDecl {
    pub name: String,
    pub range: Option<(i64, i64)>,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BindTarget {
    Jet { name: String, indices: Vec<i64> },
    Family(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Poisson,
    TwistedPoisson,
    LieAlgebroid,
    Courant,
    PreCourant,
    Connection,
}

impl DataKind {
    pub const ALL: [DataKind; 6] = [
        DataKind::Poisson,
        DataKind::TwistedPoisson,
        DataKind::LieAlgebroid,
        DataKind::Courant,
        DataKind::PreCourant,
        DataKind::Connection,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DataKind::Poisson => "poisson",
            DataKind::TwistedPoisson => "twisted_poisson",
            DataKind::LieAlgebroid => "lie_algebroid",
            DataKind::Courant => "courant",
            DataKind::PreCourant => "pre_courant",
            DataKind::Connection => "connection",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    ChartDegree(i64),
    Coords(Vec<CoordDecl>),
    /// Family-wise pairing `a[i] <-> b[i]`.
    Pair(String, String),
    Metric { family: String, rows: Vec<Vec<Rational>> },
    Symbol { name: String, upper: usize, lower: usize, symmetry: Symmetry, group: Option<IndexGroup> },
    Bind { target: BindTarget, value: Expr },
    Theta(Expr),
    Data { kind: DataKind, options: Vec<(String, String)> },
    /// Component assignment inside the preceding `data` block.
    Entry { name: String, indices: Vec<Index>, value: Expr },
    Check { name: String, params: Vec<(String, i64)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Lit(i64),
    Var(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivTarget {
    /// `None` for the bare `,k` form on a chart with one degree-0 family.
    pub family: Option<String>,
    pub index: Index,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Ref { name: String, indices: Option<Vec<Index>>, span: Span },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Rational),
    Deriv(Box<Expr>, DerivTarget),
    Sum { var: String, lo: i64, hi: i64, body: Box<Expr> },
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Lit(i) => write!(f, "{i}"),
            Index::Var(v) => f.write_str(v),
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    AddRight,
    MulLeft,
    MulRight,
    Operand,
    DerivBase,
    SumBody,
}

fn needs_parens(e: &Expr, slot: Slot) -> bool {
    use Expr::*;
    let additive = matches!(e, Add(..) | Sub(..));
    let multiplicative = matches!(e, Mul(..) | Div(..));
    let sum = matches!(e, Sum { .. });
    match slot {
        Slot::Top => false,
        Slot::AddRight | Slot::SumBody => additive,
        Slot::MulLeft => additive || sum,
        Slot::MulRight | Slot::Operand => additive || multiplicative || sum,
        Slot::DerivBase => !matches!(e, Num(_) | Ref { .. } | Deriv(..)),
    }
}

fn write_expr(out: &mut String, e: &Expr, slot: Slot) {
    if needs_parens(e, slot) {
        out.push('(');
        write_expr(out, e, Slot::Top);
        out.push(')');
        return;
    }
    match e {
        Expr::Num(q) => out.push_str(&fmt_q(q)),
        Expr::Ref { name, indices, .. } => {
            out.push_str(name);
            if let Some(ix) = indices {
                let _ = write!(out, "[{}]", join(ix));
            }
        }
        Expr::Neg(a) => {
            out.push('-');
            write_expr(out, a, Slot::Operand);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(out, a, Slot::Top);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_expr(out, b, Slot::AddRight);
        }
        Expr::Mul(a, b) => {
            write_expr(out, a, Slot::MulLeft);
            out.push('*');
            write_expr(out, b, Slot::MulRight);
        }
        Expr::Div(a, q) => {
            write_expr(out, a, Slot::MulLeft);
            let _ = write!(out, "/{}", fmt_q(q));
        }
        Expr::Deriv(a, t) => {
            write_expr(out, a, Slot::DerivBase);
            match &t.family {
                Some(fam) => {
                    let _ = write!(out, ",{fam}[{}]", t.index);
                }
                None => {
                    let _ = write!(out, ",{}", t.index);
                }
            }
        }
        Expr::Sum { var, lo, hi, body } => {
            let _ = write!(out, "sum({var} in {lo}..{hi}) ");
            write_expr(out, body, Slot::SumBody);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, Slot::Top);
        f.write_str(&s)
    }
}

impl fmt::Display for StmtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StmtKind::ChartDegree(n) => write!(f, "chart degree {n}"),
            StmtKind::Coords(cs) => {
                f.write_str("coords")?;
                for c in cs {
                    match c.range {
                        Some((lo, hi)) => write!(f, " {}[{lo}..{hi}]:{}", c.name, c.degree)?,
                        None => write!(f, " {}:{}", c.name, c.degree)?,
                    }
                }
                Ok(())
            }
            StmtKind::Pair(a, b) => write!(f, "pair {a}[i] <-> {b}[i]"),
            StmtKind::Metric { family, rows } => {
                let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.iter().map(fmt_q).collect::<Vec<_>>().join(", "))).collect();
                write!(f, "metric {family} = [{}]", rows.join(", "))
            }
            StmtKind::Symbol { name, upper, lower, symmetry, group } => {
                write!(f, "symbol {name}^{upper}_{lower}")?;
                if *symmetry != Symmetry::None {
                    write!(f, " {}", symmetry.keyword())?;
                }
                match group {
                    Some(IndexGroup::Upper) => f.write_str(" on upper"),
                    Some(IndexGroup::Lower) => f.write_str(" on lower"),
                    None => Ok(()),
                }
            }
            StmtKind::Bind { target, value } => match target {
                BindTarget::Jet { name, indices } => write!(f, "bind {name}[{}] = {value}", join(indices)),
                BindTarget::Family(name) => write!(f, "bind {name} = {value}"),
            },
            StmtKind::Theta(e) => write!(f, "theta = {e}"),
            StmtKind::Data { kind, options } => {
                write!(f, "data {}", kind.keyword())?;
                for (k, v) in options {
                    write!(f, " {k}={v}")?;
                }
                Ok(())
            }
            StmtKind::Entry { name, indices, value } => write!(f, "  {name}[{}] = {value}", join(indices)),
            StmtKind::Check { name, params } => {
                write!(f, "check {name}")?;
                for (k, v) in params {
                    write!(f, " {k}={v}")?;
                }
                Ok(())
            }
        }
    }
}

impl ModelFile {
    /// Canonical source text; reparses to an equal AST.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for s in &self.stmts {
            let _ = writeln!(out, "{}", s.kind);
        }
        out
    }
}
