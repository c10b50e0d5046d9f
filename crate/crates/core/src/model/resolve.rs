use std::collections::HashMap;
use std::sync::Arc;

use num_traits::One;

use crate::algebroid::Connection;
use crate::bracket::{ConjugatePair, SymplecticChart};
use crate::graded::{Chart, GradedPolynomial, Rational, SymbolDecl, Substitution};
use crate::linalg::Matrix;
use crate::structures::{Base, CourantData, LieAlgebroidData, PoissonData, PreCourantData, TwistedPoissonData};

use super::ast::*;
use super::{At, ModelError};

const RESERVED: [&str; 4] = ["hbar", "I", "sum", "in"];

/// A check requested by the model file.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub name: String,
    pub params: Vec<(String, i64)>,
    pub span: Span,
}

impl CheckSpec {
    pub fn param(&self, key: &str) -> Option<i64> {
        self.params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// A resolved model: the chart, the optional Darboux structure, `Theta` and
/// whatever structure data the file declares.
#[derive(Clone, Debug)]
pub struct Model {
    pub file: ModelFile,
    pub chart: Arc<Chart>,
    pub symplectic: Option<SymplecticChart>,
    pub theta: Option<(GradedPolynomial, Span)>,
    pub poisson: Option<PoissonData>,
    pub twisted: Option<TwistedPoissonData>,
    pub lie: Option<LieAlgebroidData>,
    pub courant: Option<CourantData>,
    pub pre_courant: Option<PreCourantData>,
    pub connection: Option<Connection>,
    pub checks: Vec<CheckSpec>,
    /// Span of each data block, for errors raised while running checks.
    pub data_spans: HashMap<&'static str, Span>,
}

#[derive(Clone, Copy)]
struct Family {
    range: Option<(i64, i64)>,
    degree: i64,
}

struct Scope {
    chart: Arc<Chart>,
    families: HashMap<String, Family>,
    subst: Option<Substitution>,
}

type Env = HashMap<String, i64>;

impl Scope {
    fn index(&self, ix: &Index, env: &Env, span: Span) -> Result<i64, ModelError> {
        match ix {
            Index::Lit(i) => Ok(*i),
            Index::Var(v) => env.get(v).copied().ok_or_else(|| ModelError::Undeclared { name: v.clone(), span }),
        }
    }

    fn indices(&self, ix: &[Index], env: &Env, span: Span) -> Result<Vec<i64>, ModelError> {
        ix.iter().map(|i| self.index(i, env, span)).collect()
    }

    fn coordinate(&self, name: &str, fam: Family, ix: Option<Vec<i64>>, span: Span) -> Result<GradedPolynomial, ModelError> {
        let index = match (fam.range, ix) {
            (Some((lo, hi)), Some(ix)) => {
                if ix.len() != 1 {
                    return Err(ModelError::invalid(span, format!("`{name}` takes one index, got {}", ix.len())));
                }
                if ix[0] < lo || ix[0] > hi {
                    return Err(ModelError::IndexOutOfRange { name: name.into(), index: ix[0], lo, hi, span });
                }
                ix
            }
            (None, None) => Vec::new(),
            (Some(_), None) => return Err(ModelError::invalid(span, format!("`{name}` needs an index"))),
            (None, Some(_)) => return Err(ModelError::invalid(span, format!("`{name}` is a single coordinate and takes no index"))),
        };
        GradedPolynomial::var(&self.chart, name, &index).at(span)
    }

    fn jet(&self, decl: &SymbolDecl, ix: Option<Vec<i64>>, span: Span) -> Result<GradedPolynomial, ModelError> {
        let ix = ix.unwrap_or_default();
        let (u, l) = (decl.upper, decl.lower);
        if ix.len() != u + l {
            return Err(ModelError::invalid(span, format!("`{}` takes {} indices, got {}", decl.base, u + l, ix.len())));
        }
        GradedPolynomial::jet(&self.chart, &decl.base, &ix[..u], &ix[u..]).at(span)
    }

    fn eval(&self, e: &Expr, env: &Env, span: Span) -> Result<GradedPolynomial, ModelError> {
        let chart = &self.chart;
        Ok(match e {
            Expr::Num(q) => GradedPolynomial::constant(chart, q.clone()),
            Expr::Ref { name, indices, span } => {
                let span = *span;
                let ix = indices.as_ref().map(|ix| self.indices(ix, env, span)).transpose()?;
                if let Some(&fam) = self.families.get(name) {
                    self.coordinate(name, fam, ix, span)?
                } else if let Some(decl) = chart.symbol(name) {
                    self.jet(decl, ix, span)?
                } else if ix.is_none() && name == "hbar" {
                    GradedPolynomial::hbar(chart)
                } else if ix.is_none() && name == "I" {
                    GradedPolynomial::imaginary_unit(chart)
                } else if let (None, Some(&v)) = (&ix, env.get(name)) {
                    GradedPolynomial::integer(chart, v)
                } else {
                    return Err(ModelError::Undeclared { name: name.clone(), span });
                }
            }
            Expr::Neg(a) => -self.eval(a, env, span)?,
            Expr::Add(a, b) => &self.eval(a, env, span)? + &self.eval(b, env, span)?,
            Expr::Sub(a, b) => &self.eval(a, env, span)? - &self.eval(b, env, span)?,
            Expr::Mul(a, b) => &self.eval(a, env, span)? * &self.eval(b, env, span)?,
            Expr::Div(a, q) => self.eval(a, env, span)?.scale(&(Rational::one() / q)),
            Expr::Deriv(a, t) => {
                let base = self.eval(a, env, span)?;
                let index = self.index(&t.index, env, span)?;
                let family = match &t.family {
                    Some(f) => f.clone(),
                    None => chart
                        .single_body_family()
                        .ok_or_else(|| ModelError::invalid(span, "a bare derivative index needs exactly one degree-0 family; write `,x[i]`"))?
                        .to_string(),
                };
                let fam = *self.families.get(&family).ok_or_else(|| ModelError::Undeclared { name: family.clone(), span })?;
                let id = match fam.range {
                    Some((lo, hi)) if index < lo || index > hi => {
                        return Err(ModelError::IndexOutOfRange { name: family, index, lo, hi, span })
                    }
                    Some(_) => chart.id(&family, &[index]).at(span)?,
                    None => chart.id(&family, &[]).at(span)?,
                };
                base.derive_left(id)
            }
            Expr::Sum { var, lo, hi, body } => {
                let mut env = env.clone();
                let mut acc = GradedPolynomial::zero(chart);
                for i in *lo..=*hi {
                    env.insert(var.clone(), i);
                    acc += &self.eval(body, &env, span)?;
                }
                acc
            }
        })
    }

    /// Evaluates and applies the `bind` substitution.
    fn value(&self, e: &Expr, env: &Env, span: Span) -> Result<GradedPolynomial, ModelError> {
        let p = self.eval(e, env, span)?;
        match &self.subst {
            Some(s) => s.apply(&p).at(span),
            None => Ok(p),
        }
    }

    fn family_len(&self, name: &str, span: Span) -> Result<usize, ModelError> {
        if !self.families.contains_key(name) {
            return Err(ModelError::Undeclared { name: name.into(), span });
        }
        Ok(self.chart.family(name).len())
    }
}

struct Block {
    kind: DataKind,
    options: Vec<(String, String)>,
    span: Span,
    entries: Vec<(String, Vec<Index>, Expr, Span)>,
}

/// Shape of one component table of a data block.
struct Table {
    name: &'static str,
    dims: Vec<usize>,
    /// Positions in which the table is alternating.
    alternating: Vec<usize>,
    values: HashMap<Vec<usize>, GradedPolynomial>,
}

impl Table {
    fn new(name: &'static str, dims: Vec<usize>, alternating: Vec<usize>) -> Self {
        Self { name, dims, alternating, values: HashMap::new() }
    }

    fn get(&self, ix: &[usize], chart: &Arc<Chart>) -> GradedPolynomial {
        self.values.get(ix).cloned().unwrap_or_else(|| GradedPolynomial::zero(chart))
    }

    /// Fills the images of explicit entries under permutations of the
    /// alternating positions, without touching explicit entries.
    fn complete(&mut self) {
        let explicit: Vec<(Vec<usize>, GradedPolynomial)> = {
            let mut v: Vec<_> = self.values.iter().map(|(k, p)| (k.clone(), p.clone())).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v
        };
        for (ix, p) in explicit {
            for (perm, sign) in permutations(self.alternating.len()) {
                let mut target = ix.clone();
                for (slot, &src) in perm.iter().enumerate() {
                    target[self.alternating[slot]] = ix[self.alternating[src]];
                }
                if !self.values.contains_key(&target) {
                    self.values.insert(target, p.scale_int(sign));
                }
            }
        }
    }

    fn matrix(&self, chart: &Arc<Chart>) -> Vec<Vec<GradedPolynomial>> {
        (0..self.dims[0]).map(|i| (0..self.dims[1]).map(|j| self.get(&[i, j], chart)).collect()).collect()
    }

    fn cube(&self, chart: &Arc<Chart>) -> Vec<Vec<Vec<GradedPolynomial>>> {
        (0..self.dims[0])
            .map(|i| (0..self.dims[1]).map(|j| (0..self.dims[2]).map(|k| self.get(&[i, j, k], chart)).collect()).collect())
            .collect()
    }
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if cur.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                go(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn option<'a>(block: &'a Block, key: &str, default: &'a str) -> &'a str {
    block.options.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).unwrap_or(default)
}

fn check_options(block: &Block, allowed: &[&str]) -> Result<(), ModelError> {
    for (k, _) in &block.options {
        if !allowed.contains(&k.as_str()) {
            return Err(ModelError::invalid(
                block.span,
                format!("`{}` takes options {}, not `{k}`", block.kind.keyword(), allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

/// Evaluates the entries of a block into its tables. Index variables on the
/// left run over the full range of their slot.
fn fill(scope: &Scope, block: &Block, tables: &mut [Table]) -> Result<(), ModelError> {
    for (name, indices, value, span) in &block.entries {
        let span = *span;
        let Some(t) = tables.iter_mut().find(|t| t.name == name) else {
            let names: Vec<_> = tables.iter().map(|t| t.name).collect();
            return Err(ModelError::invalid(
                span,
                format!("`{}` data has entries {}, not `{name}`", block.kind.keyword(), names.join(", ")),
            ));
        };
        if indices.len() != t.dims.len() {
            return Err(ModelError::invalid(span, format!("`{name}` takes {} indices, got {}", t.dims.len(), indices.len())));
        }
        let mut vars: Vec<(String, usize)> = Vec::new();
        for (slot, ix) in indices.iter().enumerate() {
            match ix {
                Index::Var(v) if !vars.iter().any(|(w, _)| w == v) => vars.push((v.clone(), t.dims[slot])),
                Index::Var(_) => {}
                Index::Lit(i) => {
                    if *i < 1 || *i as usize > t.dims[slot] {
                        return Err(ModelError::IndexOutOfRange { name: name.clone(), index: *i, lo: 1, hi: t.dims[slot] as i64, span });
                    }
                }
            }
        }
        let mut counter = vec![1usize; vars.len()];
        'outer: loop {
            if vars.iter().all(|(_, n)| *n > 0) {
                let env: Env = vars.iter().zip(&counter).map(|((v, _), &c)| (v.clone(), c as i64)).collect();
                let ix: Vec<usize> = indices
                    .iter()
                    .map(|i| match i {
                        Index::Lit(k) => *k as usize - 1,
                        Index::Var(v) => env[v] as usize - 1,
                    })
                    .collect();
                let p = scope.value(value, &env, span)?;
                t.values.insert(ix, p);
            }
            for k in (0..counter.len()).rev() {
                if counter[k] < vars[k].1 {
                    counter[k] += 1;
                    continue 'outer;
                }
                counter[k] = 1;
            }
            break;
        }
    }
    for t in tables.iter_mut() {
        t.complete();
    }
    Ok(())
}

/// Parses and resolves in one step.
pub fn resolve_source(src: &str) -> Result<Model, ModelError> {
    resolve(super::parse_model(src)?)
}

pub fn resolve(file: ModelFile) -> Result<Model, ModelError> {
    let mut builder = Chart::builder();
    let mut families: HashMap<String, Family> = HashMap::new();
    let mut symbols: HashMap<String, Span> = HashMap::new();
    let mut degree: Option<(i64, Span)> = None;
    let mut pairs = Vec::new();
    let mut metrics: Vec<(String, Vec<Vec<Rational>>, Span)> = Vec::new();

    for stmt in &file.stmts {
        let span = stmt.span;
        match &stmt.kind {
            StmtKind::ChartDegree(n) => {
                if degree.is_some() {
                    return Err(ModelError::invalid(span, "chart degree given twice"));
                }
                degree = Some((*n, span));
            }
            StmtKind::Coords(decls) => {
                for c in decls {
                    if RESERVED.contains(&c.name.as_str()) || families.contains_key(&c.name) || symbols.contains_key(&c.name) {
                        return Err(ModelError::invalid(span, format!("`{}` is already declared or reserved", c.name)));
                    }
                    builder = match c.range {
                        Some((lo, hi)) => {
                            if lo > hi {
                                return Err(ModelError::invalid(span, format!("empty range {lo}..{hi} for `{}`", c.name)));
                            }
                            builder.family(&c.name, lo, hi, c.degree as i32)
                        }
                        None => builder.coord(&c.name, &[], c.degree as i32),
                    };
                    families.insert(c.name.clone(), Family { range: c.range, degree: c.degree });
                }
            }
            StmtKind::Symbol { name, upper, lower, symmetry, group } => {
                if RESERVED.contains(&name.as_str()) || families.contains_key(name) || symbols.contains_key(name) {
                    return Err(ModelError::invalid(span, format!("`{name}` is already declared or reserved")));
                }
                let mut decl = SymbolDecl::new(name.clone(), *upper, *lower, *symmetry);
                if let Some(g) = group {
                    decl = decl.on_group(*g);
                }
                builder = builder.symbol(decl);
                symbols.insert(name.clone(), span);
            }
            StmtKind::Pair(a, b) => pairs.push((a.clone(), b.clone(), span)),
            StmtKind::Metric { family, rows } => metrics.push((family.clone(), rows.clone(), span)),
            _ => {}
        }
    }
    let chart = builder.build().at(Span::default())?;

    let symplectic = match degree {
        Some((n, span)) if !pairs.is_empty() || !metrics.is_empty() => {
            let n = n as i32;
            let mut cp = Vec::new();
            for (a, b, span) in &pairs {
                let fa = *families.get(a).ok_or_else(|| ModelError::Undeclared { name: a.clone(), span: *span })?;
                let fb = *families.get(b).ok_or_else(|| ModelError::Undeclared { name: b.clone(), span: *span })?;
                if fa.degree + fb.degree != n as i64 {
                    return Err(ModelError::DegreeMismatch {
                        msg: format!("`{a}` has degree {} and `{b}` has degree {}, which do not sum to the chart degree {n}", fa.degree, fb.degree),
                        span: *span,
                    });
                }
                let (ia, ib) = (chart.family(a), chart.family(b));
                if ia.len() != ib.len() {
                    return Err(ModelError::invalid(*span, format!("`{a}` and `{b}` have different sizes")));
                }
                cp.extend(ia.into_iter().zip(ib).map(|(first, second)| ConjugatePair { first, second, weight: Rational::one() }));
            }
            let metric = match metrics.as_slice() {
                [] => None,
                [(fam, rows, span)] => {
                    let f = *families.get(fam).ok_or_else(|| ModelError::Undeclared { name: fam.clone(), span: *span })?;
                    if 2 * f.degree != n as i64 {
                        return Err(ModelError::DegreeMismatch {
                            msg: format!("metric family `{fam}` has degree {}, need half the chart degree {n}", f.degree),
                            span: *span,
                        });
                    }
                    Some((chart.family(fam), rows.clone()))
                }
                [_, (_, _, span), ..] => return Err(ModelError::invalid(*span, "only one metric block is supported")),
            };
            Some(SymplecticChart::new(&chart, n, cp, metric).at(span)?)
        }
        None if !pairs.is_empty() => return Err(ModelError::invalid(pairs[0].2, "`pair` needs a `chart degree` statement")),
        _ => None,
    };

    let mut scope = Scope { chart: chart.clone(), families, subst: None };
    let mut subst = Substitution::new(&chart);
    let mut any_bind = false;
    for stmt in &file.stmts {
        if let StmtKind::Bind { target, value } = &stmt.kind {
            let span = stmt.span;
            any_bind = true;
            subst = match target {
                BindTarget::Jet { name, indices } => {
                    let decl = chart.symbol(name).ok_or_else(|| ModelError::Undeclared { name: name.clone(), span })?;
                    let (u, l) = (decl.upper, decl.lower);
                    if indices.len() != u + l {
                        return Err(ModelError::invalid(span, format!("`{name}` takes {} indices, got {}", u + l, indices.len())));
                    }
                    let v = scope.eval(value, &Env::new(), span)?;
                    subst.jet(name, &indices[..u], &indices[u..], v).at(span)?
                }
                BindTarget::Family(name) => {
                    let v = scope.eval(value, &Env::new(), span)?;
                    if !v.is_zero() {
                        return Err(ModelError::invalid(span, format!("a whole family can only be bound to 0: `bind {name} = 0`")));
                    }
                    subst.zero_family(name).map_err(|_| ModelError::Undeclared { name: name.clone(), span })?
                }
            };
        }
    }
    if any_bind {
        scope.subst = Some(subst);
    }

    let mut model = Model {
        file: file.clone(),
        chart: chart.clone(),
        symplectic,
        theta: None,
        poisson: None,
        twisted: None,
        lie: None,
        courant: None,
        pre_courant: None,
        connection: None,
        checks: Vec::new(),
        data_spans: HashMap::new(),
    };

    let mut blocks: Vec<Block> = Vec::new();
    let mut open = false;
    for stmt in &file.stmts {
        let span = stmt.span;
        match &stmt.kind {
            StmtKind::Data { kind, options } => {
                blocks.push(Block { kind: *kind, options: options.clone(), span, entries: Vec::new() });
                open = true;
                continue;
            }
            StmtKind::Entry { name, indices, value } => {
                if !open {
                    return Err(ModelError::invalid(span, format!("entry `{name}[..]` outside a data block")));
                }
                blocks.last_mut().expect("open block").entries.push((name.clone(), indices.clone(), value.clone(), span));
                continue;
            }
            StmtKind::Theta(e) => {
                if model.theta.is_some() {
                    return Err(ModelError::invalid(span, "theta given twice"));
                }
                model.theta = Some((scope.value(e, &Env::new(), span)?, span));
            }
            StmtKind::Check { name, params } => {
                model.checks.push(CheckSpec { name: name.clone(), params: params.clone(), span });
            }
            _ => {}
        }
        open = false;
    }

    for block in &blocks {
        build_block(&scope, block, &metrics, &mut model)?;
    }
    super::checks::validate(&model)?;
    Ok(model)
}

fn default_base(scope: &Scope) -> String {
    scope.chart.single_body_family().unwrap_or("x").to_string()
}

fn metric_for(fiber: &str, metrics: &[(String, Vec<Vec<Rational>>, Span)], span: Span) -> Result<Matrix, ModelError> {
    metrics
        .iter()
        .find(|(f, _, _)| f == fiber)
        .map(|(_, rows, _)| rows.clone())
        .ok_or_else(|| ModelError::invalid(span, format!("Courant data needs `metric {fiber} = [...]`")))
}

fn build_block(scope: &Scope, block: &Block, metrics: &[(String, Vec<Vec<Rational>>, Span)], model: &mut Model) -> Result<(), ModelError> {
    let span = block.span;
    let chart = &scope.chart;
    let base_default = default_base(scope);
    let key = block.kind.keyword();
    if model.data_spans.contains_key(key) {
        return Err(ModelError::invalid(span, format!("`{key}` data given twice")));
    }
    model.data_spans.insert(key, span);
    match block.kind {
        DataKind::Poisson | DataKind::TwistedPoisson => {
            check_options(block, &["base", "momenta"])?;
            let base = option(block, "base", &base_default);
            let momenta = option(block, "momenta", "xi");
            let d = scope.family_len(base, span)?;
            scope.family_len(momenta, span)?;
            let mut tables = vec![Table::new("pi", vec![d, d], vec![0, 1])];
            if block.kind == DataKind::TwistedPoisson {
                tables.push(Table::new("H", vec![d, d, d], vec![0, 1, 2]));
            }
            fill(scope, block, &mut tables)?;
            let poisson = PoissonData::new(chart, base, momenta, tables[0].matrix(chart)).at(span)?;
            if block.kind == DataKind::TwistedPoisson {
                let twisted = TwistedPoissonData::new(poisson.clone(), tables[1].cube(chart)).at(span)?;
                model.twisted = Some(twisted);
                model.data_spans.entry("poisson").or_insert(span);
            }
            if model.poisson.is_some() {
                return Err(ModelError::invalid(span, "Poisson data given twice"));
            }
            model.poisson = Some(poisson);
        }
        DataKind::LieAlgebroid => {
            check_options(block, &["base", "fiber"])?;
            let base = option(block, "base", &base_default);
            let fiber = option(block, "fiber", "q");
            let d = scope.family_len(base, span)?;
            let r = scope.family_len(fiber, span)?;
            let mut tables = vec![Table::new("rho", vec![d, r], vec![]), Table::new("C", vec![r, r, r], vec![1, 2])];
            fill(scope, block, &mut tables)?;
            model.lie = Some(LieAlgebroidData::new(chart, base, fiber, tables[0].matrix(chart), tables[1].cube(chart)).at(span)?);
        }
        DataKind::Courant | DataKind::PreCourant => {
            check_options(block, &["base", "momenta", "fiber"])?;
            let base = option(block, "base", &base_default);
            let momenta = option(block, "momenta", "xi");
            let fiber = option(block, "fiber", "eta");
            let d = scope.family_len(base, span)?;
            scope.family_len(momenta, span)?;
            let r = scope.family_len(fiber, span)?;
            let metric = metric_for(fiber, metrics, span)?;
            let mut tables = vec![Table::new("rho", vec![d, r], vec![]), Table::new("C", vec![r, r, r], vec![0, 1, 2])];
            if block.kind == DataKind::PreCourant {
                tables.push(Table::new("H", vec![d, d, d, d], vec![0, 1, 2, 3]));
            }
            fill(scope, block, &mut tables)?;
            let courant = CourantData::new(chart, base, momenta, fiber, metric, tables[0].matrix(chart), tables[1].cube(chart)).at(span)?;
            if block.kind == DataKind::PreCourant {
                let h = &tables[2];
                let pre = PreCourantData::new(courant.clone(), |ix| h.get(ix, chart)).at(span)?;
                model.pre_courant = Some(pre);
                model.data_spans.entry("courant").or_insert(span);
            }
            if model.courant.is_some() {
                return Err(ModelError::invalid(span, "Courant data given twice"));
            }
            model.courant = Some(courant);
        }
        DataKind::Connection => {
            check_options(block, &[])?;
            let (base, r) = if let Some(l) = &model.lie {
                (l.base().clone(), l.rank())
            } else if let Some(c) = &model.courant {
                (c.base().clone(), c.rank())
            } else {
                return Err(ModelError::invalid(span, "a connection block must follow lie_algebroid or courant data"));
            };
            let d = base.dim();
            let mut tables = vec![Table::new("omega", vec![d, r, r], vec![]), Table::new("gamma", vec![d, d, d], vec![])];
            fill(scope, block, &mut tables)?;
            model.connection = Some(Connection::new(&base, r, tables[0].cube(chart), tables[1].cube(chart)).at(span)?);
        }
    }
    Ok(())
}

impl Model {
    /// The connection of the model, or the flat one on the given bundle.
    pub fn connection_or_flat(&self, base: &Base, rank: usize) -> Connection {
        match &self.connection {
            Some(c) if c.rank() == rank && c.base().dim() == base.dim() => c.clone(),
            _ => Connection::flat(base, rank),
        }
    }
}
