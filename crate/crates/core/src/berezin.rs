//! Berezin integration over odd coordinates and the Berezinian of
//! supermatrices with entries in the graded algebra.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::bracket::CheckReport;
use crate::graded::{Chart, CoordId, GradedError, GradedPolynomial, Rational, Substitution};
use crate::structures::Sampling;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BerezinError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("`{0}` is not an odd coordinate")]
    NotOdd(String),
    #[error("`{0}` appears twice in the measure")]
    Duplicate(String),
    #[error("block {block} entry ({row},{col}) has the wrong parity")]
    Parity { block: char, row: usize, col: usize },
    #[error("{0}")]
    Shape(String),
    #[error("D block is not invertible: body of det D vanishes")]
    SingularD,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
}

/// Measure convention: `∫dθ¹…dθᵏ` integrates the rightmost variable first,
/// each step taking the left derivative, so `∫dθ¹dθ² θ²θ¹ = 1`.
pub const MEASURE_ORDER: &str = "right-to-left, left derivative";

/// Ordered list of distinct odd coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddVariableList {
    vars: Vec<CoordId>,
}

impl OddVariableList {
    pub fn new(chart: &Chart, vars: Vec<CoordId>) -> Result<Self, BerezinError> {
        for (i, &v) in vars.iter().enumerate() {
            if chart.parity(v) != 1 {
                return Err(BerezinError::NotOdd(chart.coord(v).to_string()));
            }
            if vars[..i].contains(&v) {
                return Err(BerezinError::Duplicate(chart.coord(v).to_string()));
            }
        }
        Ok(Self { vars })
    }

    /// Resolves `name[index]` pairs on the chart.
    pub fn named(chart: &Chart, vars: &[(&str, &[i64])]) -> Result<Self, BerezinError> {
        let ids = vars.iter().map(|(n, i)| chart.id(n, i)).collect::<Result<Vec<_>, _>>()?;
        Self::new(chart, ids)
    }

    pub fn vars(&self) -> &[CoordId] {
        &self.vars
    }
}

/// `∫ dθ¹…dθᵏ p`.
pub fn berezin_integral(p: &GradedPolynomial, vars: &OddVariableList) -> GradedPolynomial {
    vars.vars.iter().rev().fold(p.clone(), |acc, &v| acc.derive_left(v))
}

/// `p(θ ↦ Mθ)` for a constant matrix acting on the listed odd coordinates.
pub fn linear_odd_change(p: &GradedPolynomial, vars: &OddVariableList, m: &[Vec<Rational>]) -> Result<GradedPolynomial, BerezinError> {
    let chart = p.chart();
    let k = vars.vars.len();
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return Err(BerezinError::Shape(format!("change of variables must be {k}x{k}")));
    }
    let mut s = Substitution::new(chart);
    for (i, &v) in vars.vars.iter().enumerate() {
        let mut image = GradedPolynomial::zero(chart);
        for (j, &w) in vars.vars.iter().enumerate() {
            image += &GradedPolynomial::coordinate(chart, w).scale(&m[i][j]);
        }
        s = s.coordinate(v, image)?;
    }
    Ok(s.apply(p)?)
}

/// Determinant of a square matrix with pairwise commuting (even) entries.
pub fn even_det(chart: &Arc<Chart>, m: &[Vec<GradedPolynomial>]) -> GradedPolynomial {
    match m.len() {
        0 => GradedPolynomial::one(chart),
        1 => m[0][0].clone(),
        n => {
            let mut out = GradedPolynomial::zero(chart);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<GradedPolynomial>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
                let t = &m[0][j] * &even_det(chart, &minor);
                if j % 2 == 0 {
                    out += &t;
                } else {
                    out -= &t;
                }
            }
            out
        }
    }
}

/// Inverse of an even element `c + n` with `c` a nonzero rational and every
/// term of `n` containing an odd coordinate: `c⁻¹ Σ (−n/c)^k`.
pub fn invert_even(p: &GradedPolynomial) -> Result<GradedPolynomial, BerezinError> {
    let chart = p.chart();
    if p.parity().is_some_and(|q| q != 0) {
        return Err(BerezinError::NotInvertible("odd element".into()));
    }
    let c = p.constant_term();
    if c.is_zero() {
        return Err(BerezinError::NotInvertible("vanishing constant term".into()));
    }
    let n = p - &GradedPolynomial::constant(chart, c.clone());
    if n.terms().any(|(m, _)| m.parity(chart) != 0 || m.coords().iter().all(|&(id, _)| chart.parity(id) == 0)) {
        return Err(BerezinError::NotInvertible(format!("non-nilpotent part in {p}")));
    }
    let inv_c = Rational::one() / c;
    let step = n.scale(&-inv_c.clone());
    let mut out = GradedPolynomial::constant(chart, inv_c.clone());
    let mut power = GradedPolynomial::constant(chart, inv_c);
    loop {
        power = &power * &step;
        if power.is_zero() {
            return Ok(out);
        }
        out += &power;
    }
}

/// Inverse of an invertible square matrix with even entries.
fn invert_even_matrix(chart: &Arc<Chart>, m: &[Vec<GradedPolynomial>]) -> Result<Vec<Vec<GradedPolynomial>>, BerezinError> {
    let n = m.len();
    let inv_det = invert_even(&even_det(chart, m)).map_err(|_| BerezinError::SingularD)?;
    let minor = |r: usize, c: usize| -> Vec<Vec<GradedPolynomial>> {
        m.iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
            .collect()
    };
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = even_det(chart, &minor(j, i));
                    let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                    &cof * &inv_det
                })
                .collect()
        })
        .collect())
}

fn mat_mul(chart: &Arc<Chart>, a: &[Vec<GradedPolynomial>], b: &[Vec<GradedPolynomial>], cols: usize) -> Vec<Vec<GradedPolynomial>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut t = GradedPolynomial::zero(chart);
                    for (k, e) in row.iter().enumerate() {
                        t += &(e * &b[k][j]);
                    }
                    t
                })
                .collect()
        })
        .collect()
}

fn mat_add(a: &[Vec<GradedPolynomial>], b: &[Vec<GradedPolynomial>]) -> Vec<Vec<GradedPolynomial>> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

/// `[[A, B], [C, D]]` of size `(m|n) x (m|n)` with `A`, `D` even and `B`, `C` odd.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    chart: Arc<Chart>,
    even: usize,
    odd: usize,
    a: Vec<Vec<GradedPolynomial>>,
    b: Vec<Vec<GradedPolynomial>>,
    c: Vec<Vec<GradedPolynomial>>,
    d: Vec<Vec<GradedPolynomial>>,
}

impl SuperMatrix {
    pub fn new(
        chart: &Arc<Chart>,
        a: Vec<Vec<GradedPolynomial>>,
        b: Vec<Vec<GradedPolynomial>>,
        c: Vec<Vec<GradedPolynomial>>,
        d: Vec<Vec<GradedPolynomial>>,
    ) -> Result<Self, BerezinError> {
        let m = a.len();
        let n = d.len();
        let shape = |name: char, blk: &[Vec<GradedPolynomial>], rows: usize, cols: usize| {
            if blk.len() != rows || blk.iter().any(|r| r.len() != cols) {
                Err(BerezinError::Shape(format!("block {name} must be {rows}x{cols}")))
            } else {
                Ok(())
            }
        };
        shape('A', &a, m, m)?;
        shape('B', &b, m, n)?;
        shape('C', &c, n, m)?;
        shape('D', &d, n, n)?;
        let rebind = |blk: Vec<Vec<GradedPolynomial>>| -> Result<Vec<Vec<GradedPolynomial>>, BerezinError> {
            Ok(blk.into_iter().map(|r| r.into_iter().map(|e| e.rebind(chart)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?)
        };
        let (a, b, c, d) = (rebind(a)?, rebind(b)?, rebind(c)?, rebind(d)?);
        for (name, blk, parity) in [('A', &a, 0), ('B', &b, 1), ('C', &c, 1), ('D', &d, 0)] {
            for (i, r) in blk.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    if !e.is_zero() && e.parity() != Some(parity) {
                        return Err(BerezinError::Parity { block: name, row: i + 1, col: j + 1 });
                    }
                }
            }
        }
        Ok(Self { chart: chart.clone(), even: m, odd: n, a, b, c, d })
    }

    pub fn identity(chart: &Arc<Chart>, m: usize, n: usize) -> Self {
        let eye = |k: usize| -> Vec<Vec<GradedPolynomial>> {
            (0..k).map(|i| (0..k).map(|j| GradedPolynomial::integer(chart, (i == j) as i64)).collect()).collect()
        };
        let zeros = |r: usize, c: usize| vec![vec![GradedPolynomial::zero(chart); c]; r];
        Self { chart: chart.clone(), even: m, odd: n, a: eye(m), b: zeros(m, n), c: zeros(n, m), d: eye(n) }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.even, self.odd)
    }

    pub fn blocks(&self) -> [&Vec<Vec<GradedPolynomial>>; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, other: &Self) -> Result<Self, BerezinError> {
        if self.dims() != other.dims() {
            return Err(BerezinError::Shape("supermatrix dimensions differ".into()));
        }
        let ch = &self.chart;
        let (m, n) = self.dims();
        let a = mat_add(&mat_mul(ch, &self.a, &other.a, m), &mat_mul(ch, &self.b, &other.c, m));
        let b = mat_add(&mat_mul(ch, &self.a, &other.b, n), &mat_mul(ch, &self.b, &other.d, n));
        let c = mat_add(&mat_mul(ch, &self.c, &other.a, m), &mat_mul(ch, &self.d, &other.c, m));
        let d = mat_add(&mat_mul(ch, &self.c, &other.b, n), &mat_mul(ch, &self.d, &other.d, n));
        Self::new(ch, a, b, c, d)
    }

    /// `Ber = det(A - B D⁻¹ C) (det D)⁻¹`.
    pub fn berezinian(&self) -> Result<GradedPolynomial, BerezinError> {
        let ch = &self.chart;
        let (m, n) = self.dims();
        let dinv = invert_even_matrix(ch, &self.d)?;
        let bdc = mat_mul(ch, &mat_mul(ch, &self.b, &dinv, n), &self.c, m);
        let schur: Vec<Vec<GradedPolynomial>> = self.a.iter().zip(&bdc).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect();
        let inv_det_d = invert_even(&even_det(ch, &self.d)).map_err(|_| BerezinError::SingularD)?;
        Ok(&even_det(ch, &schur) * &inv_det_d)
    }
}

/// `berezinian(M)` as a free function.
pub fn berezinian(m: &SuperMatrix) -> Result<GradedPolynomial, BerezinError> {
    m.berezinian()
}

/// Random `(m|n)` supermatrix over the listed odd generators. Even entries
/// are a small integer plus products of two generators; odd entries are
/// combinations of single generators and triples. The constant part of D is
/// a nonzero diagonal-dominant integer matrix so D stays invertible.
pub fn random_supermatrix<R: Rng>(chart: &Arc<Chart>, odd: &[CoordId], m: usize, n: usize, rng: &mut R) -> SuperMatrix {
    let gen = |rng: &mut R, parity: u8, base: i64| -> GradedPolynomial {
        let mut p = GradedPolynomial::integer(chart, base);
        for _ in 0..2 {
            let k = if parity == 0 { 2 } else if rng.gen_bool(0.7) { 1 } else { 3 };
            let mut t = GradedPolynomial::integer(chart, rng.gen_range(-3..=3));
            for _ in 0..k {
                t = &t * &GradedPolynomial::coordinate(chart, odd[rng.gen_range(0..odd.len())]);
            }
            p += &t;
        }
        p
    };
    let block = |rng: &mut R, r: usize, c: usize, parity: u8, diag: bool| -> Vec<Vec<GradedPolynomial>> {
        (0..r)
            .map(|i| {
                (0..c)
                    .map(|j| {
                        let base = match (parity, diag && i == j) {
                            (1, _) => 0,
                            (_, true) => {
                                let v = rng.gen_range(2..=4);
                                if rng.gen_bool(0.5) { v } else { -v }
                            }
                            _ if diag => rng.gen_range(-1..=1),
                            _ => rng.gen_range(-3..=3),
                        };
                        gen(rng, parity, base)
                    })
                    .collect()
            })
            .collect()
    };
    let a = block(rng, m, m, 0, false);
    let b = block(rng, m, n, 1, false);
    let c = block(rng, n, m, 1, false);
    let d = block(rng, n, n, 0, true);
    SuperMatrix::new(chart, a, b, c, d).expect("parity layout by construction")
}

/// `Ber(MN) - Ber(M) Ber(N)` on random `(m|n)` supermatrices over the odd
/// coordinates of the chart, plus `Ber det D - det A` for their block
/// diagonal parts.
pub fn berezinian_report(chart: &Arc<Chart>, m: usize, n: usize, sampling: &Sampling) -> Result<CheckReport, BerezinError> {
    let odd: Vec<CoordId> = (0..chart.len()).filter(|&id| chart.parity(id) == 1).collect();
    if odd.is_empty() {
        return Err(BerezinError::Shape("the chart has no odd coordinates".into()));
    }
    let mut rep = CheckReport::new("berezinian", "Berezinian is multiplicative; block diagonal case is det A / det D");
    for trial in 0..sampling.trials {
        let mut rng = sampling.rng(trial);
        let x = random_supermatrix(chart, &odd, m, n, &mut rng);
        let y = random_supermatrix(chart, &odd, m, n, &mut rng);
        let lhs = x.mul(&y)?.berezinian()?;
        rep.push(format!("t{trial}/product"), &lhs - &(&x.berezinian()? * &y.berezinian()?));
        let zero = |r: usize, c: usize| vec![vec![GradedPolynomial::zero(chart); c]; r];
        let diag = SuperMatrix::new(chart, x.a.clone(), zero(m, n), zero(n, m), x.d.clone())?;
        rep.push(format!("t{trial}/block-diagonal"), &(&diag.berezinian()? * &even_det(chart, &x.d)) - &even_det(chart, &x.a));
    }
    rep.note(format!("{} pairs of ({m}|{n}) supermatrices, seed {}", sampling.trials, sampling.seed));
    Ok(rep)
}
