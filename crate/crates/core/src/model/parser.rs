use num_bigint::BigInt;

use crate::graded::{IndexGroup, Rational, Symmetry};

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ModelError;

const KEYWORDS: [&str; 9] = ["chart", "coords", "pair", "metric", "symbol", "bind", "theta", "data", "check"];

pub fn parse_model(src: &str) -> Result<ModelFile, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut stmts = Vec::new();
    while p.peek() != &Tok::Eof {
        stmts.push(p.stmt()?);
    }
    Ok(ModelFile { stmts })
}

/// Parses a single expression, e.g. for bindings supplied programmatically.
pub fn parse_expr(src: &str) -> Result<Expr, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ModelError {
        ModelError::Syntax { span: self.span(), msg: format!("expected {wanted}, found {}", self.peek().describe()) }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ModelError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ModelError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    /// `name` or `name-with-dashes`, dashes only when written without spaces.
    fn dashed_name(&mut self) -> Result<String, ModelError> {
        let mut s = self.ident()?;
        loop {
            let prev_end = self.toks[self.pos - 1].end;
            let dash = &self.toks[self.pos];
            let next = &self.toks[(self.pos + 1).min(self.toks.len() - 1)];
            if dash.tok == Tok::Minus && dash.start == prev_end && next.start == dash.end {
                if let Tok::Ident(n) = &next.tok {
                    s.push('-');
                    s.push_str(n);
                    self.bump();
                    self.bump();
                    continue;
                }
            }
            return Ok(s);
        }
    }

    fn uint(&mut self) -> Result<i64, ModelError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let span = self.span();
                self.bump();
                s.parse().map_err(|_| ModelError::Syntax { span, msg: format!("integer {s} is out of range") })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn int(&mut self) -> Result<i64, ModelError> {
        if self.eat(&Tok::Minus) {
            Ok(-self.uint()?)
        } else {
            self.uint()
        }
    }

    fn big(&mut self) -> Result<Rational, ModelError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(Rational::from_integer(s.parse::<BigInt>().expect("digits")))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    /// `-? INT (/ INT)?`
    fn signed_rational(&mut self) -> Result<Rational, ModelError> {
        let neg = self.eat(&Tok::Minus);
        let mut q = self.big()?;
        if self.eat(&Tok::Slash) {
            let span = self.span();
            let d = self.big()?;
            if d == Rational::from_integer(0.into()) {
                return Err(ModelError::Syntax { span, msg: "division by zero".into() });
            }
            q /= d;
        }
        Ok(if neg { -q } else { q })
    }

    fn stmt(&mut self) -> Result<Stmt, ModelError> {
        let span = self.span();
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a statement")),
        };
        let kind = if KEYWORDS.contains(&word.as_str()) {
            self.bump();
            match word.as_str() {
                "chart" => {
                    self.keyword("degree")?;
                    StmtKind::ChartDegree(self.int()?)
                }
                "coords" => self.coords()?,
                "pair" => {
                    let a = self.pair_side()?;
                    self.expect(Tok::Arrow)?;
                    let b = self.pair_side()?;
                    StmtKind::Pair(a, b)
                }
                "metric" => self.metric()?,
                "symbol" => self.symbol()?,
                "bind" => self.bind()?,
                "theta" => {
                    self.expect(Tok::Eq)?;
                    StmtKind::Theta(self.expr()?)
                }
                "data" => self.data()?,
                _ => self.check()?,
            }
        } else if self.peek_at(1) == &Tok::LBracket {
            let name = self.ident()?;
            let indices = self.indices()?;
            self.expect(Tok::Eq)?;
            StmtKind::Entry { name, indices, value: self.expr()? }
        } else {
            return Err(ModelError::Syntax { span, msg: format!("unknown statement `{word}`") });
        };
        Ok(Stmt { kind, span })
    }

    fn coords(&mut self) -> Result<StmtKind, ModelError> {
        let mut decls = Vec::new();
        loop {
            let starts = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                && (self.peek_at(1) == &Tok::Colon || (self.peek_at(1) == &Tok::LBracket && self.peek_at(3) == &Tok::DotDot));
            if !starts {
                break;
            }
            let name = self.ident()?;
            let range = if self.eat(&Tok::LBracket) {
                let lo = self.int()?;
                self.expect(Tok::DotDot)?;
                let hi = self.int()?;
                self.expect(Tok::RBracket)?;
                Some((lo, hi))
            } else {
                None
            };
            self.expect(Tok::Colon)?;
            decls.push(CoordDecl { name, range, degree: self.int()? });
        }
        if decls.is_empty() {
            return Err(self.unexpected("a coordinate declaration `name[lo..hi]:degree`"));
        }
        Ok(StmtKind::Coords(decls))
    }

    fn pair_side(&mut self) -> Result<String, ModelError> {
        let name = self.ident()?;
        if self.eat(&Tok::LBracket) {
            self.ident()?;
            self.expect(Tok::RBracket)?;
        }
        Ok(name)
    }

    fn metric(&mut self) -> Result<StmtKind, ModelError> {
        let family = self.ident()?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket)?;
            let mut row = vec![self.signed_rational()?];
            while self.eat(&Tok::Comma) {
                row.push(self.signed_rational()?);
            }
            self.expect(Tok::RBracket)?;
            rows.push(row);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(StmtKind::Metric { family, rows })
    }

    fn symbol(&mut self) -> Result<StmtKind, ModelError> {
        let name = self.ident()?;
        let mut upper = 0;
        let mut lower = 0;
        if self.eat(&Tok::Caret) {
            upper = self.uint()? as usize;
        }
        if self.eat(&Tok::Underscore) {
            lower = self.uint()? as usize;
        }
        let mut symmetry = Symmetry::None;
        if matches!(self.peek(), Tok::Ident(s) if s != "on" && !KEYWORDS.contains(&s.as_str())) {
            let span = self.span();
            let word = self.dashed_name()?;
            symmetry = Symmetry::from_keyword(&word)
                .ok_or_else(|| ModelError::Syntax { span, msg: format!("unknown symmetry `{word}`") })?;
        }
        let mut group = None;
        if matches!(self.peek(), Tok::Ident(s) if s == "on") {
            self.bump();
            let span = self.span();
            group = Some(match self.ident()?.as_str() {
                "upper" => IndexGroup::Upper,
                "lower" => IndexGroup::Lower,
                w => return Err(ModelError::Syntax { span, msg: format!("expected `upper` or `lower`, found `{w}`") }),
            });
        }
        Ok(StmtKind::Symbol { name, upper, lower, symmetry, group })
    }

    fn bind(&mut self) -> Result<StmtKind, ModelError> {
        let name = self.ident()?;
        let target = if self.eat(&Tok::LBracket) {
            let mut indices = vec![self.int()?];
            while self.eat(&Tok::Comma) {
                indices.push(self.int()?);
            }
            self.expect(Tok::RBracket)?;
            BindTarget::Jet { name, indices }
        } else {
            BindTarget::Family(name)
        };
        self.expect(Tok::Eq)?;
        Ok(StmtKind::Bind { target, value: self.expr()? })
    }

    fn data(&mut self) -> Result<StmtKind, ModelError> {
        let span = self.span();
        let word = self.ident()?;
        let kind = DataKind::from_keyword(&word).ok_or_else(|| ModelError::Syntax {
            span,
            msg: format!(
                "unknown data kind `{word}`; expected one of {}",
                DataKind::ALL.iter().map(|k| k.keyword()).collect::<Vec<_>>().join(", ")
            ),
        })?;
        let mut options = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Eq {
            let k = self.ident()?;
            self.bump();
            options.push((k, self.ident()?));
        }
        Ok(StmtKind::Data { kind, options })
    }

    fn check(&mut self) -> Result<StmtKind, ModelError> {
        let name = self.dashed_name()?;
        let mut params = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Eq {
            let k = self.ident()?;
            self.bump();
            params.push((k, self.int()?));
        }
        Ok(StmtKind::Check { name, params })
    }

    fn index(&mut self) -> Result<Index, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Index::Var(s))
            }
            Tok::Int(_) | Tok::Minus => Ok(Index::Lit(self.int()?)),
            _ => Err(self.unexpected("an index")),
        }
    }

    fn indices(&mut self) -> Result<Vec<Index>, ModelError> {
        self.expect(Tok::LBracket)?;
        let mut v = vec![self.index()?];
        while self.eat(&Tok::Comma) {
            v.push(self.index()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(v)
    }

    pub fn expr(&mut self) -> Result<Expr, ModelError> {
        let mut e = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ModelError> {
        let mut e = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                let span = self.span();
                let q = self.big()?;
                if q == Rational::from_integer(0.into()) {
                    return Err(ModelError::Syntax { span, msg: "division by zero".into() });
                }
                e = Expr::Div(Box::new(e), q);
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ModelError> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Tok::Ident(s) if s == "sum") && self.peek_at(1) == &Tok::LParen {
            self.bump();
            self.bump();
            let var = self.ident()?;
            self.keyword("in")?;
            let lo = self.int()?;
            self.expect(Tok::DotDot)?;
            let hi = self.int()?;
            self.expect(Tok::RParen)?;
            let body = self.term()?;
            return Ok(Expr::Sum { var, lo, hi, body: Box::new(body) });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ModelError> {
        let mut e = self.atom()?;
        while self.eat(&Tok::Comma) {
            let target = match (self.peek().clone(), self.peek_at(1)) {
                (Tok::Ident(name), Tok::LBracket) => {
                    self.bump();
                    self.bump();
                    let index = self.index()?;
                    self.expect(Tok::RBracket)?;
                    DerivTarget { family: Some(name), index }
                }
                _ => DerivTarget { family: None, index: self.index()? },
            };
            e = Expr::Deriv(Box::new(e), target);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ModelError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(_) => Ok(Expr::Num(self.big()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let indices = if self.peek() == &Tok::LBracket { Some(self.indices()?) } else { None };
                Ok(Expr::Ref { name, indices, span })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
